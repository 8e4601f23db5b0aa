"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criterion 6 runs against the real 303-record public file when it has been
supplied (see test_cleveland_data); a synthetic companion with the same
schema, size and difficulty always runs so the end-to-end path is exercised
either way.
"""

import json
import os
import time
import zlib

import numpy as np
import pytest

from heartpredict import dataio, pipeline
from heartpredict.benchmarks import sphere
from heartpredict.config import ExperimentConfig
from heartpredict.cuttlefish import (
    ChaosMap,
    CuttlefishConfig,
    logistic_step,
    run_cuttlefish,
)
from heartpredict.elephant_herd import HerdConfig, run_elephant_herd
from heartpredict.gaussian_net import NetworkSpec, unflatten
from heartpredict.metrics import compute_metrics, confusion, prevalence_sweep
from heartpredict.cli import cli

from conftest import cleveland_path, fast_config, requires_cleveland
from test_gaussian_net import max_gradient_mismatch
from test_metrics import brute_force_rates


def verdict(number: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number} {name}: {status}{suffix}")
    assert ok, f"criterion {number} ({name}) failed{suffix}"


def test_c01_metric_oracle_equivalence():
    rng = np.random.default_rng(101)
    start = time.time()
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 1001))
        preds = rng.integers(0, 2, size=n).tolist()
        truths = rng.integers(0, 2, size=n).tolist()
        _, expected = brute_force_rates(preds, truths)
        report = compute_metrics(confusion(preds, truths))
        for key, want in expected.items():
            got = getattr(report, key)
            assert (got is None) == (want is None), key
            if want is not None:
                worst = max(worst, abs(got - want))
    elapsed = time.time() - start
    verdict(
        1,
        "metric-oracle-equivalence",
        worst <= 1e-12 and elapsed < 10.0,
        f"max_abs_diff={worst:.2e}, {elapsed:.1f}s",
    )


def test_c02_gradient_check():
    rng = np.random.default_rng(202)
    start = time.time()
    worst = 0.0
    for _ in range(100):
        depth = int(rng.integers(1, 3))
        sizes = (int(rng.integers(1, 9)),) + tuple(
            int(rng.integers(1, 9)) for _ in range(depth)
        ) + (1,)
        spec = NetworkSpec(sizes)
        weights = unflatten(
            spec, rng.uniform(-0.5, 0.5, spec.param_count), alpha_lr=0.05
        )
        x = rng.random(sizes[0])
        target = float(rng.integers(0, 2))
        worst = max(worst, max_gradient_mismatch(spec, weights, x, target))
    elapsed = time.time() - start
    verdict(
        2,
        "gradient-check",
        worst < 1e-4 and elapsed < 30.0,
        f"max_rel_err={worst:.2e}, {elapsed:.1f}s",
    )


def test_c03_chaos_map_safety():
    start = time.time()
    rng = np.random.default_rng(303)
    states = rng.random(100)
    x = states.copy()
    lo, hi = 1.0, 0.0
    for _ in range(100_000):
        x = logistic_step(x, 4.0)
        lo = min(lo, float(x.min()))
        hi = max(hi, float(x.max()))
    in_range = 0.0 <= lo and hi <= 1.0

    # the vectorized orbit is the same recurrence the map object steps
    m = ChaosMap(cr=float(states[0]), br=float(states[1]), delta=4.0)
    a, b = states[0], states[1]
    agrees = True
    for _ in range(1000):
        m, cr, br = m.step()
        a = logistic_step(a, 4.0)
        b = logistic_step(b, 4.0)
        agrees = agrees and cr == a and br == b

    stationary = True
    for delta in (0.5, 1.7, 2.5, 3.3, 4.0):
        _, cr, _ = ChaosMap(cr=0.0, br=0.0, delta=delta).step()
        stationary = stationary and cr == 0.0
        if delta > 1.0:
            fixed = 1.0 - 1.0 / delta
            _, cr, _ = ChaosMap(cr=fixed, br=fixed, delta=delta).step()
            stationary = stationary and abs(cr - fixed) <= 1e-12
    elapsed = time.time() - start
    verdict(
        3,
        "chaos-map-safety",
        in_range and agrees and stationary and elapsed < 5.0,
        f"orbit=[{lo:.2e}, {hi:.17g}], {elapsed:.1f}s",
    )


def test_c04_herd_sphere_convergence():
    start = time.time()
    hits = 0
    for seed in range(10):
        config = HerdConfig(
            clans=3, clan_size=10, max_generations=200, bounds=(-5.0, 5.0), seed=seed
        )
        _, history = run_elephant_herd(sphere, 10, config)
        if history[-1] >= -1e-2:
            hits += 1
    elapsed = time.time() - start
    verdict(
        4,
        "herd-sphere-convergence",
        hits >= 8 and elapsed < 60.0,
        f"{hits}/10 seeds, {elapsed:.1f}s",
    )


def _planted_wrapper_fitness(seed: int):
    """Wrapper objective on a dataset whose label depends on exactly three
    of ten features: validation accuracy of a nearest-centroid classifier
    trained on the masked columns, minus the subset-size penalty."""
    rng = np.random.default_rng(5000 + seed)
    n = 400
    X = rng.random((2 * n, 10))
    planted = (1, 4, 8)
    y = (X[:, planted].sum(axis=1) > 1.5).astype(float)
    Xtr, ytr, Xval, yval = X[:n], y[:n], X[n:], y[n:]

    def fitness(mask):
        cols = list(mask.indices)
        mu1 = Xtr[ytr == 1.0][:, cols].mean(axis=0)
        mu0 = Xtr[ytr == 0.0][:, cols].mean(axis=0)
        d1 = ((Xval[:, cols] - mu1) ** 2).sum(axis=1)
        d0 = ((Xval[:, cols] - mu0) ** 2).sum(axis=1)
        accuracy = float(np.mean((d1 < d0) == (yval == 1.0)))
        return accuracy - 0.01 * mask.count / 10.0

    return fitness, set(planted)


def test_c05_cuttlefish_planted_feature_recovery():
    start = time.time()
    hits = 0
    for seed in range(10):
        fitness, planted = _planted_wrapper_fitness(seed)
        mask, _ = run_cuttlefish(
            fitness, 10, CuttlefishConfig(population=20, generations=50, seed=seed)
        )
        if planted <= set(mask.indices):
            hits += 1
    elapsed = time.time() - start
    verdict(
        5,
        "cuttlefish-planted-recovery",
        hits >= 9 and elapsed < 120.0,
        f"{hits}/10 seeds, {elapsed:.1f}s",
    )


def _end_to_end_floor(number, name, csv_path, tmp_path):
    start = time.time()
    config = ExperimentConfig(
        dataset=csv_path, outdir=str(tmp_path / "run"), seed=7
    )
    model = pipeline.train_pipeline(config)
    clean, _ = pipeline.preprocess(dataio.parse_csv(csv_path), config.impute_k)
    result = pipeline.evaluate(model, clean, config.folds)
    elapsed = time.time() - start
    n_selected = model.mask.count
    accuracy = result.aggregate.accuracy
    verdict(
        number,
        name,
        accuracy >= 0.80 and 4 <= n_selected <= 10 and elapsed < 600.0,
        f"mean_acc={accuracy:.4f}, selected={n_selected}, {elapsed:.0f}s",
    )


@pytest.mark.slow
@requires_cleveland
def test_c06_cleveland_sanity_floor(tmp_path):
    _end_to_end_floor(6, "cleveland-sanity-floor", cleveland_path(), tmp_path)


@pytest.mark.slow
def test_c06_companion_synthetic_floor(clinical_csv, tmp_path):
    # stands in for the real file in environments where it cannot be
    # fetched: same schema, 303 rows, comparable class balance and
    # difficulty (a linear baseline scores ~0.83 on both)
    _end_to_end_floor(6, "synthetic-sanity-floor", clinical_csv, tmp_path)


def test_c07_ppv_monotone_in_prevalence():
    start = time.time()
    rng = np.random.default_rng(707)
    grid = [i / 100.0 for i in range(1, 100)]
    ok = True
    for _ in range(100):
        sens = float(rng.uniform(0.05, 1.0))
        spec = float(rng.uniform(0.05, 1.0))
        ppvs = [ppv for _, ppv, _ in prevalence_sweep((sens, spec), grid)]
        ok = ok and all(b >= a for a, b in zip(ppvs, ppvs[1:]))
    elapsed = time.time() - start
    verdict(7, "ppv-monotonicity", ok and elapsed < 1.0, f"{elapsed:.2f}s")


def test_c08_train_determinism(separable_csv, tmp_path):
    outdir = tmp_path / "det"
    config_path = tmp_path / "det.toml"
    config_path.write_text(
        f"""
[data]
dataset = "{separable_csv}"
outdir = "{outdir}"
seed = 11

[features]
population = 8
generations = 3

[network]
hidden = [4]
epochs = 12

[weights]
clans = 2
clan_size = 4
generations = 5
"""
    )
    assert cli(["train", "--config", str(config_path)]) == 0
    snapshot = {}
    for name in sorted(os.listdir(outdir)):
        with open(outdir / name, "rb") as fh:
            snapshot[name] = fh.read()
    assert cli(["train", "--config", str(config_path)]) == 0
    identical = all(
        open(outdir / name, "rb").read() == blob for name, blob in snapshot.items()
    )
    verdict(8, "train-determinism", identical, f"{len(snapshot)} files compared")


def test_c09_batch_stream_parity(clinical_csv, tmp_path, capsys, monkeypatch):
    import io
    import sys

    clean, _ = pipeline.preprocess(dataio.parse_csv(clinical_csv), 5)
    config = fast_config(clinical_csv, str(tmp_path / "run"))
    model = pipeline.train_pipeline(config)
    result = pipeline.evaluate(model, clean, 3)

    mismatches = 0
    compared = 0
    for fold in result.folds:
        assert fold.error is None
        model_path = str(tmp_path / f"fold{fold.index}.json")
        fold.model.save(model_path)
        lines = []
        for i, rec in enumerate(fold.test.records):
            obj = {"id": f"fold{fold.index}-{i}"}
            obj.update(
                {a.name: v for a, v in zip(fold.test.schema[:-1], rec.values[:-1])}
            )
            lines.append(json.dumps(obj))
        monkeypatch.setattr(sys, "stdin", io.StringIO("\n".join(lines) + "\n"))
        capsys.readouterr()
        assert cli(["stream", "--model", model_path]) == 0
        captured = capsys.readouterr()
        streamed = [json.loads(line)["label"] for line in captured.out.splitlines()]
        assert "malformed=0" in captured.err
        assert len(streamed) == len(fold.predictions)
        mismatches += sum(1 for a, b in zip(streamed, fold.predictions) if a != b)
        compared += len(fold.predictions)
    verdict(
        9,
        "batch-stream-parity",
        mismatches == 0 and compared == len(clean),
        f"{compared} records, {mismatches} mismatches",
    )


def _noise_from_bytes(data: bytes) -> float:
    return (zlib.crc32(data) % 1_000_003) / 1_000_003.0


def test_c10_optimizer_elitism_under_random_fitness():
    # deterministic pseudo-random objectives: pure functions of the
    # candidate, incompressible structure, values in [0, 1)
    def mask_noise(mask):
        return _noise_from_bytes(bytes(mask.selected))

    def vector_noise(x):
        return _noise_from_bytes(np.round(x, 10).tobytes())

    _, hist_masks = run_cuttlefish(
        mask_noise, 12, CuttlefishConfig(population=8, generations=500, seed=10)
    )
    _, hist_vectors = run_elephant_herd(
        vector_noise,
        6,
        HerdConfig(clans=2, clan_size=4, max_generations=500, seed=10),
    )
    total = len(hist_masks) + len(hist_vectors)
    monotone = all(
        b >= a for a, b in zip(hist_masks, hist_masks[1:])
    ) and all(b >= a for a, b in zip(hist_vectors, hist_vectors[1:]))
    verdict(
        10,
        "optimizer-elitism",
        monotone and total == 1000,
        f"{total} generations checked",
    )
