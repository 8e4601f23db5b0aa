import os

import pytest

from heartpredict import datagen, dataio
from heartpredict.config import ExperimentConfig
from heartpredict.cuttlefish import CuttlefishConfig
from heartpredict.elephant_herd import HerdConfig

# First row of the public heart-disease table, used as a hand-checked parse case.
SAMPLE_ROW = "63,1,1,145,233,1,2,150,0,2.3,3,0,6,0"


def cleveland_path() -> str | None:
    """Location of the real 303-record file, when one has been supplied."""
    env = os.environ.get("CLEVELAND_CSV")
    if env and os.path.exists(env):
        return env
    local = os.path.join(os.path.dirname(__file__), "..", "data", "cleveland.csv")
    return local if os.path.exists(local) else None


requires_cleveland = pytest.mark.skipif(
    cleveland_path() is None,
    reason="real Cleveland file not available; set CLEVELAND_CSV or add data/cleveland.csv",
)


@pytest.fixture(scope="session")
def separable_csv(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("data") / "separable.csv"
    dataio.write_csv(datagen.separable_dataset(200, seed=3), str(path))
    return str(path)


@pytest.fixture(scope="session")
def clinical_csv(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("data") / "clinical.csv"
    dataio.write_csv(datagen.clinical_like_dataset(303, seed=0), str(path))
    return str(path)


def fast_config(dataset: str, outdir: str, **kwargs) -> ExperimentConfig:
    """Small budgets for quick end-to-end runs in unit tests."""
    defaults = dict(
        dataset=dataset,
        outdir=outdir,
        seed=7,
        epochs=30,
        hidden=(6, 3),
        cuttlefish=CuttlefishConfig(population=8, generations=4),
        herd=HerdConfig(clans=2, clan_size=4, max_generations=8, bounds=(-1.0, 1.0)),
    )
    defaults.update(kwargs)
    return ExperimentConfig(**defaults)


@pytest.fixture(scope="session")
def trained_model(separable_csv, tmp_path_factory):
    from heartpredict.pipeline import train_pipeline

    outdir = tmp_path_factory.mktemp("run")
    config = fast_config(separable_csv, str(outdir))
    model = train_pipeline(config)
    return model, config
