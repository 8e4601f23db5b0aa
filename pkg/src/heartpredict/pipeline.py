"""End-to-end orchestration: preprocessing, wrapper feature selection,
herd-search-plus-backprop training, cross-validated evaluation, model
persistence, and line-stream scoring with alerts.

Every run is fully determined by its configuration and seed: sub-seeds for
the optimizers, the network init and the shuffles are all derived from the
experiment seed, model files carry no wall-clock state, and record-level
scoring always goes through the same single-record forward pass so batch
and stream predictions agree bit for bit.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Mapping, TextIO

import numpy as np

from . import dataio
from .config import ExperimentConfig, config_hash
from .cuttlefish import FeatureMask, run_cuttlefish
from .dataio import DataError, Dataset, NormalizationTable
from .elephant_herd import HerdConfig, run_elephant_herd
from .gaussian_net import (
    NetworkSpec,
    NetworkWeights,
    flatten,
    forward,
    forward_batch,
    init_weights,
    mse,
    train_epochs,
    unflatten,
)
from .metrics import (
    MetricsReport,
    compute_metrics,
    confusion,
    metrics_lines,
    report_table,
)

# experiment-seed offsets for the independent random streams
SEED_CUTTLEFISH = 11
SEED_HERD = 23
SEED_HERD_BUDGET = 29
SEED_NET_INIT = 37
SEED_SHUFFLE = 41

# wrapper-fitness budgets relative to the full training budget
WRAPPER_HERD_DIVISOR = 5
WRAPPER_EPOCH_DIVISOR = 4
# candidate masks are scored on the first WRAPPER_VALIDATION_REPEATS folds
# of a WRAPPER_VALIDATION_FOLDS split and the accuracies averaged; one small
# holdout is too noisy to rank subsets reliably
WRAPPER_VALIDATION_FOLDS = 5
WRAPPER_VALIDATION_REPEATS = 2


class PipelineError(RuntimeError):
    """A stage failure, tagged with the stage name."""


@dataclass(frozen=True)
class PreprocessReport:
    rows_parsed: int
    cells_imputed: int
    duplicates_dropped: int
    constant_attributes: tuple[str, ...]

    def lines(self) -> list[str]:
        return [
            f"rows_parsed={self.rows_parsed}",
            f"cells_imputed={self.cells_imputed}",
            f"duplicates_dropped={self.duplicates_dropped}",
            f"constant_attributes_dropped={len(self.constant_attributes)}"
            + (
                " (" + ",".join(self.constant_attributes) + ")"
                if self.constant_attributes
                else ""
            ),
        ]


def preprocess(ds: Dataset, impute_k: int = 5) -> tuple[Dataset, PreprocessReport]:
    """Impute missing cells, then drop duplicate rows and constant columns."""
    cells_missing = ds.missing_count()
    imputed = dataio.impute_missing(ds, impute_k)
    clean, redundancy = dataio.remove_redundancy(imputed)
    report = PreprocessReport(
        rows_parsed=len(ds),
        cells_imputed=cells_missing,
        duplicates_dropped=len(redundancy.duplicate_rows),
        constant_attributes=redundancy.constant_attributes,
    )
    return clean, report


@dataclass
class TrainedModel:
    """Everything needed to reproduce classify outputs bit-identically:
    network shape and flattened weights, the selected-feature mask over the
    post-preprocessing predictors, the normalization table, the decision
    threshold and the training metadata (config hash, seed, training
    parameters, fitness and loss histories)."""

    layer_sizes: tuple[int, ...]
    flat_weights: np.ndarray
    alpha_lr: float
    predictor_names: tuple[str, ...]
    mask_bits: tuple[bool, ...]
    normalization: NormalizationTable
    threshold: float = 0.5
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.mask_bits) != len(self.predictor_names):
            raise ValueError("mask length must match the predictor list")
        if self.layer_sizes[0] != sum(self.mask_bits):
            raise ValueError("network input size must equal mask cardinality")

    @property
    def mask(self) -> FeatureMask:
        return FeatureMask(self.mask_bits)

    @property
    def mask_names(self) -> tuple[str, ...]:
        return tuple(
            name for name, on in zip(self.predictor_names, self.mask_bits) if on
        )

    def spec(self) -> NetworkSpec:
        return NetworkSpec(self.layer_sizes)

    def weights(self) -> NetworkWeights:
        return unflatten(self.spec(), self.flat_weights, self.alpha_lr)

    def score_record(self, values: Mapping[str, float]) -> tuple[int, float]:
        """Normalize one raw record (clamping out-of-range values) and run
        the single-record forward pass. Raises KeyError when a selected
        attribute is absent; nothing is ever imputed at scoring time."""
        x = np.array(
            [
                dataio.normalize_value(float(values[name]), self.normalization[name])
                for name in self.mask_names
            ]
        )
        score = forward(self.spec(), self.weights(), x).output
        return (1 if score >= self.threshold else 0), score

    def save(self, path: str) -> None:
        payload = {
            "layer_sizes": list(self.layer_sizes),
            "weights": [float(w) for w in self.flat_weights],
            "alpha_lr": self.alpha_lr,
            "predictors": list(self.predictor_names),
            "mask": [bool(b) for b in self.mask_bits],
            "normalization": {k: [v[0], v[1]] for k, v in self.normalization.items()},
            "threshold": self.threshold,
            "metadata": self.metadata,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "TrainedModel":
        with open(path) as fh:
            payload = json.load(fh)
        return cls(
            layer_sizes=tuple(payload["layer_sizes"]),
            flat_weights=np.array(payload["weights"], dtype=float),
            alpha_lr=float(payload["alpha_lr"]),
            predictor_names=tuple(payload["predictors"]),
            mask_bits=tuple(bool(b) for b in payload["mask"]),
            normalization={
                k: (float(v[0]), float(v[1]))
                for k, v in payload["normalization"].items()
            },
            threshold=float(payload["threshold"]),
            metadata=payload["metadata"],
        )


def _train_network(
    X: np.ndarray,
    y: np.ndarray,
    hidden: tuple[int, ...],
    herd_config: HerdConfig,
    epochs: int,
    alpha_lr: float,
    seed: int,
    weight_search: bool = True,
) -> tuple[NetworkSpec, NetworkWeights, list[float], list[float]]:
    """Global herd search over flattened weights (fitness = -MSE on the
    training data), then backprop refinement of the best vector."""
    spec = NetworkSpec((X.shape[1], *hidden, 1))
    herd_history: list[float] = []
    if weight_search:
        def weight_fitness(vec: np.ndarray) -> float:
            return -mse(spec, unflatten(spec, vec, alpha_lr), X, y)

        best_vec, herd_history = run_elephant_herd(
            weight_fitness, spec.param_count, herd_config
        )
        weights = unflatten(spec, best_vec, alpha_lr)
    else:
        weights = init_weights(spec, seed + SEED_NET_INIT, alpha_lr=alpha_lr)
    weights, loss_history = train_epochs(
        spec, weights, (X, y), epochs, alpha_lr, seed=seed + SEED_SHUFFLE
    )
    return spec, weights, herd_history, loss_history


def _masked_matrix(ds_norm: Dataset, mask: FeatureMask) -> np.ndarray:
    return dataio.feature_matrix(ds_norm)[:, list(mask.indices)]


def select_features(
    ds: Dataset, config: ExperimentConfig
) -> tuple[FeatureMask, list[float]]:
    """Wrapper selection: each candidate mask is scored by the validation
    accuracy of a budget-capped training run minus a penalty proportional
    to the subset size."""
    n_predictors = len(ds.predictors)
    inner = dataio.kfold_split(ds, WRAPPER_VALIDATION_FOLDS, config.seed)
    splits = []
    for inner_train, inner_val in inner[:WRAPPER_VALIDATION_REPEATS]:
        norm_train, table = dataio.normalize_minmax(inner_train)
        norm_val = dataio.apply_normalization(inner_val, table)
        splits.append(
            (
                dataio.feature_matrix(norm_train),
                dataio.label_vector(norm_train),
                dataio.feature_matrix(norm_val),
                dataio.label_vector(norm_val),
            )
        )

    budget_herd = replace(
        config.herd,
        max_generations=max(1, config.herd.max_generations // WRAPPER_HERD_DIVISOR),
        seed=config.seed + SEED_HERD_BUDGET,
    )
    budget_epochs = max(1, config.epochs // WRAPPER_EPOCH_DIVISOR)

    def wrapper_fitness(mask: FeatureMask) -> float:
        cols = list(mask.indices)
        accuracies = []
        for X_train, y_train, X_val, y_val in splits:
            spec, weights, _, _ = _train_network(
                X_train[:, cols],
                y_train,
                config.hidden,
                budget_herd,
                budget_epochs,
                config.alpha_lr,
                config.seed,
                weight_search=config.weight_search,
            )
            scores = forward_batch(spec, weights, X_val[:, cols])
            accuracies.append(float(np.mean((scores >= 0.5) == (y_val == 1.0))))
        return float(np.mean(accuracies)) - config.cuttlefish.subset_penalty * (
            mask.count / n_predictors
        )

    search = replace(config.cuttlefish, seed=config.seed + SEED_CUTTLEFISH)
    return run_cuttlefish(wrapper_fitness, n_predictors, search)


def _write_history(path: str, values: Iterable[float]) -> None:
    with open(path, "w") as fh:
        for i, v in enumerate(values):
            fh.write(f"{i}\t{v!r}\n")


def _write_lines(path: str, lines: Iterable[str]) -> None:
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")


def _stage(name: str):
    class _StageContext:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineError):
                raise PipelineError(f"{name}: {exc}") from exc
            return False

    return _StageContext()


def train_pipeline(config: ExperimentConfig) -> TrainedModel:
    """Run the full training chain and persist the model plus its reports
    and histories under the output directory."""
    with _stage("parse"):
        ds = dataio.parse_csv(config.dataset)
    with _stage("preprocess"):
        clean, report = preprocess(ds, config.impute_k)

    with _stage("feature-selection"):
        if config.feature_selection:
            mask, selection_history = select_features(clean, config)
        else:
            mask = FeatureMask(tuple(True for _ in clean.predictors))
            selection_history = []

    with _stage("train"):
        norm, table = dataio.normalize_minmax(clean)
        X = _masked_matrix(norm, mask)
        y = dataio.label_vector(norm)
        spec, weights, herd_history, loss_history = _train_network(
            X,
            y,
            config.hidden,
            replace(config.herd, seed=config.seed + SEED_HERD),
            config.epochs,
            config.alpha_lr,
            config.seed,
            weight_search=config.weight_search,
        )

    model = TrainedModel(
        layer_sizes=spec.layer_sizes,
        flat_weights=flatten(weights),
        alpha_lr=config.alpha_lr,
        predictor_names=tuple(a.name for a in clean.predictors),
        mask_bits=mask.selected,
        normalization=table,
        metadata={
            "config_hash": config_hash(config),
            "seed": config.seed,
            "selection_history": [float(v) for v in selection_history],
            "herd_history": [float(v) for v in herd_history],
            "loss_history": [float(v) for v in loss_history],
            "train_params": {
                "hidden": list(config.hidden),
                "epochs": config.epochs,
                "alpha_lr": config.alpha_lr,
                "weight_search": config.weight_search,
                "herd": asdict(config.herd) | {"seed": config.seed + SEED_HERD},
                "impute_k": config.impute_k,
            },
        },
    )

    with _stage("persist"):
        os.makedirs(config.outdir, exist_ok=True)
        model.save(os.path.join(config.outdir, "model.json"))
        _write_lines(
            os.path.join(config.outdir, "preprocess_report.txt"), report.lines()
        )
        _write_history(
            os.path.join(config.outdir, "selection_history.txt"), selection_history
        )
        _write_history(
            os.path.join(config.outdir, "weights_history.txt"), herd_history
        )
        _write_history(
            os.path.join(config.outdir, "training_loss.txt"), loss_history
        )
        predictions, _ = batch_predict(model, clean)
        truths = [int(v) for v in dataio.label_vector(clean)]
        train_metrics = compute_metrics(confusion(predictions, truths))
        _write_lines(
            os.path.join(config.outdir, "train_report.txt"),
            report_table([("train", train_metrics)]).splitlines(),
        )
        _write_lines(
            os.path.join(config.outdir, "train_metrics.txt"),
            metrics_lines("train", train_metrics),
        )
    return model


def batch_predict(
    model: TrainedModel, ds: Dataset
) -> tuple[list[int], list[float]]:
    """Score every record of a complete raw-valued dataset through the same
    record-level path the stream command uses."""
    names = {a.name for a in ds.schema}
    missing = [n for n in model.mask_names if n not in names]
    if missing:
        raise DataError(
            "dataset lacks selected attributes: " + ", ".join(missing)
        )
    labels: list[int] = []
    scores: list[float] = []
    for i, rec in enumerate(ds.records):
        values = {a.name: v for a, v in zip(ds.schema, rec.values)}
        for name in model.mask_names:
            if values[name] is None:
                raise DataError(
                    f"record {i}: missing value for selected attribute {name}"
                )
        label, score = model.score_record(values)
        labels.append(label)
        scores.append(score)
    return labels, scores


@dataclass
class FoldResult:
    index: int
    model: TrainedModel | None
    test: Dataset | None
    predictions: list[int]
    truths: list[int]
    metrics: MetricsReport | None
    error: str | None = None


@dataclass
class EvaluationResult:
    folds: list[FoldResult]
    aggregate: MetricsReport
    strata: dict[int, MetricsReport]

    def table_rows(self) -> list[tuple[str, MetricsReport]]:
        rows: list[tuple[str, MetricsReport]] = []
        for fr in self.folds:
            if fr.metrics is not None:
                rows.append((f"fold{fr.index}", fr.metrics))
        rows.append(("mean", self.aggregate))
        for cp in sorted(self.strata):
            rows.append((f"cp={cp}", self.strata[cp]))
        return rows


def _mean_metrics(reports: list[MetricsReport]) -> MetricsReport:
    if not reports:
        raise ValueError("no successful folds to aggregate")
    values = {}
    for name in MetricsReport.__dataclass_fields__:
        defined = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        values[name] = float(np.mean(defined)) if defined else None
    return MetricsReport(**values)


def evaluate(model: TrainedModel, ds: Dataset, k: int) -> EvaluationResult:
    """Retrain per stratified fold with the model's training parameters and
    its fixed feature mask, then report per-fold, mean, and per-chest-pain
    metrics. A failing fold is recorded and left out of the aggregate."""
    if tuple(a.name for a in ds.predictors) != model.predictor_names:
        raise DataError("dataset predictors do not match the model's schema")
    params = model.metadata.get("train_params", {})
    if "herd" in params:
        herd_kwargs = dict(params["herd"])
        herd_kwargs["bounds"] = tuple(herd_kwargs["bounds"])
        herd_cfg = HerdConfig(**herd_kwargs)
    else:
        herd_cfg = HerdConfig()
    seed = int(model.metadata.get("seed", 0))
    folds = dataio.kfold_split(ds, k, seed)

    results: list[FoldResult] = []
    for i, (train, test) in enumerate(folds):
        try:
            norm_train, table = dataio.normalize_minmax(train)
            X = _masked_matrix(norm_train, model.mask)
            y = dataio.label_vector(norm_train)
            spec, weights, _, _ = _train_network(
                X,
                y,
                tuple(params.get("hidden", [8])),
                herd_cfg,
                int(params.get("epochs", 120)),
                float(params.get("alpha_lr", 0.05)),
                seed,
                weight_search=bool(params.get("weight_search", True)),
            )
            fold_model = TrainedModel(
                layer_sizes=spec.layer_sizes,
                flat_weights=flatten(weights),
                alpha_lr=model.alpha_lr,
                predictor_names=model.predictor_names,
                mask_bits=model.mask_bits,
                normalization=table,
                threshold=model.threshold,
                metadata={"seed": seed, "fold": i},
            )
            predictions, _ = batch_predict(fold_model, test)
            truths = [int(v) for v in dataio.label_vector(test)]
            rep = compute_metrics(confusion(predictions, truths))
            results.append(FoldResult(i, fold_model, test, predictions, truths, rep))
        except Exception as exc:  # recorded, not fatal
            results.append(FoldResult(i, None, None, [], [], None, error=str(exc)))

    succeeded = [r.metrics for r in results if r.metrics is not None]
    aggregate = _mean_metrics(succeeded)

    strata: dict[int, MetricsReport] = {}
    try:
        cp_idx = ds.attribute_index("cp")
    except DataError:
        cp_idx = None
    if cp_idx is not None:
        pooled: dict[int, tuple[list[int], list[int]]] = {}
        for fr in results:
            if fr.metrics is None or fr.test is None:
                continue
            for rec, p, t in zip(fr.test.records, fr.predictions, fr.truths):
                cp = int(rec.values[cp_idx])
                pooled.setdefault(cp, ([], []))[0].append(p)
                pooled[cp][1].append(t)
        for cp, (preds, truths) in pooled.items():
            strata[cp] = compute_metrics(confusion(preds, truths))
    return EvaluationResult(results, aggregate, strata)


@dataclass(frozen=True)
class AlertEvent:
    """One scored stream record. The wire format carries exactly the id,
    label, score and severity; the timestamp rides along in memory for API
    callers."""

    record_id: str
    label: int
    score: float
    severity: str
    timestamp: object | None = None

    def wire(self) -> dict:
        return {
            "id": self.record_id,
            "label": self.label,
            "score": self.score,
            "severity": self.severity,
        }


@dataclass
class StreamSummary:
    """Counts for one stream run; processed = normal + abnormal."""

    processed: int = 0
    normal: int = 0
    abnormal: int = 0
    malformed: int = 0

    def lines(self) -> list[str]:
        return [
            f"processed={self.processed}",
            f"normal={self.normal}",
            f"abnormal={self.abnormal}",
            f"malformed={self.malformed}",
        ]


def predict_stream(
    model: TrainedModel, source: Iterable[str], sink: TextIO
) -> StreamSummary:
    """Score newline-delimited JSON records one at a time, emitting one
    alert line per record. Malformed lines (bad JSON, missing selected
    attribute, non-numeric value) produce an error line and are counted;
    the stream never aborts. Input order is preserved."""
    summary = StreamSummary()
    for line_no, raw in enumerate(source, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            obj = json.loads(text)
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
            values = {}
            for name in model.mask_names:
                if name not in obj:
                    raise ValueError(f"missing attribute {name!r}")
                v = obj[name]
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ValueError(f"attribute {name!r} is not numeric")
                values[name] = float(v)
        except ValueError as exc:
            summary.malformed += 1
            sink.write(json.dumps({"error": f"line {line_no}: {exc}"}) + "\n")
            continue
        record_id = str(obj.get("id", f"record-{line_no}"))
        label, score = model.score_record(values)
        event = AlertEvent(
            record_id=record_id,
            label=label,
            score=score,
            severity="ABNORMAL" if label == 1 else "NORMAL",
            timestamp=obj.get("timestamp"),
        )
        sink.write(json.dumps(event.wire()) + "\n")
        summary.processed += 1
        if label == 1:
            summary.abnormal += 1
        else:
            summary.normal += 1
    return summary
