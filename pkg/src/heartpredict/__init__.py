"""Heart-disease prediction: chaotic cuttlefish feature selection, a
Gaussian-activation feedforward classifier trained by elephant-herd search
plus backpropagation, clinical evaluation metrics, and stream scoring."""

__version__ = "0.1.0"

from .cuttlefish import CuttlefishConfig, FeatureMask, run_cuttlefish
from .dataio import CLEVELAND_SCHEMA, Dataset, Record, parse_csv
from .elephant_herd import HerdConfig, run_elephant_herd
from .gaussian_net import NetworkSpec, NetworkWeights, classify, forward
from .metrics import ConfusionMatrix, MetricsReport, compute_metrics, confusion
from .pipeline import TrainedModel, evaluate, predict_stream, train_pipeline

__all__ = [
    "CLEVELAND_SCHEMA",
    "ConfusionMatrix",
    "CuttlefishConfig",
    "Dataset",
    "FeatureMask",
    "HerdConfig",
    "MetricsReport",
    "NetworkSpec",
    "NetworkWeights",
    "Record",
    "TrainedModel",
    "classify",
    "compute_metrics",
    "confusion",
    "evaluate",
    "forward",
    "parse_csv",
    "predict_stream",
    "run_cuttlefish",
    "run_elephant_herd",
    "train_pipeline",
]
