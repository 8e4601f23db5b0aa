"""Seeded synthetic datasets in the 14-attribute clinical schema.

Used by the experiment scripts and the test suite: the generators produce
files shaped exactly like the real table (same domains, same missing-value
conventions) with labels driven by known rules, so end-to-end behavior can
be checked without shipping patient data.
"""

from __future__ import annotations

import numpy as np

from .dataio import CLEVELAND_SCHEMA, Dataset, Record


def _clipped_normal(rng: np.random.Generator, mean, sd, lo, hi) -> float:
    return float(int(np.clip(rng.normal(mean, sd), lo, hi)))


def _draw_row(rng: np.random.Generator) -> dict[str, float]:
    return {
        "age": _clipped_normal(rng, 54.5, 9.0, 29, 77),
        "sex": float(rng.random() < 0.68),
        "cp": float(rng.choice([1, 2, 3, 4], p=[0.08, 0.17, 0.28, 0.47])),
        "trestbps": _clipped_normal(rng, 131.6, 17.5, 94, 200),
        "chol": _clipped_normal(rng, 246.7, 51.0, 126, 564),
        "fbs": float(rng.random() < 0.15),
        "restecg": float(rng.choice([0, 1, 2], p=[0.48, 0.02, 0.50])),
        "thalach": _clipped_normal(rng, 149.6, 22.9, 71, 202),
        "exang": float(rng.random() < 0.33),
        "oldpeak": float(round(min(6.2, max(0.0, rng.gamma(1.2, 0.9))), 1)),
        "slope": float(rng.choice([1, 2, 3], p=[0.46, 0.46, 0.08])),
        "ca": float(rng.choice([0, 1, 2, 3], p=[0.58, 0.22, 0.13, 0.07])),
        "thal": float(rng.choice([3, 6, 7], p=[0.55, 0.06, 0.39])),
    }


def _risk_score(row: dict[str, float]) -> float:
    # plausible direction of effect for each attribute, centered near zero
    return (
        0.9 * (row["cp"] - 2.5)
        + 1.2 * (row["thal"] != 3.0)
        + 1.1 * row["ca"]
        + 1.0 * row["exang"]
        + 0.8 * (row["oldpeak"] - 1.0)
        - 0.03 * (row["thalach"] - 150.0)
        + 0.5 * (row["slope"] - 1.5)
        + 0.02 * (row["age"] - 54.0)
        + 0.4 * row["sex"]
        - 1.8
    )


def clinical_like_dataset(
    n: int = 303,
    seed: int = 0,
    missing_cells: int = 6,
    noise: float = 1.0,
    name: str = "synthetic-clinical",
) -> Dataset:
    """A dataset with the clinical table's shape: realistic marginals,
    labels 0..4 from a noisy risk score, and a few missing ca/thal cells
    mirroring the usual state of the public file."""
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        row = _draw_row(rng)
        score = _risk_score(row) + rng.normal(0.0, noise)
        if score <= 0.0:
            num = 0.0
        else:
            num = float(min(4, 1 + int(score / 1.5)))
        values = [row[a.name] for a in CLEVELAND_SCHEMA[:-1]] + [num]
        records.append(Record(tuple(values)))

    # knock out a few ca/thal cells, never the label
    ds = Dataset(CLEVELAND_SCHEMA, tuple(records), name)
    if missing_cells > 0:
        ca_idx = ds.attribute_index("ca")
        thal_idx = ds.attribute_index("thal")
        rows = rng.choice(n, size=min(missing_cells, n), replace=False)
        recs = list(ds.records)
        for j, r in enumerate(rows):
            col = ca_idx if j % 2 == 0 else thal_idx
            vals = list(recs[r].values)
            vals[col] = None
            recs[r] = Record(tuple(vals))
        ds = Dataset(CLEVELAND_SCHEMA, tuple(recs), name)
    return ds


def separable_dataset(
    n: int = 200, seed: int = 0, name: str = "synthetic-separable"
) -> Dataset:
    """Labels decided by a wide-margin rule on two attributes (thalach and
    oldpeak); everything else is in-domain noise. Useful as an easy
    end-to-end target."""
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(n):
        row = _draw_row(rng)
        margin = (150.0 - row["thalach"]) / 30.0 + row["oldpeak"] - 1.0
        # resample rows inside the margin band to keep the classes separated
        while abs(margin) < 0.4:
            row["thalach"] = _clipped_normal(rng, 149.6, 22.9, 71, 202)
            row["oldpeak"] = float(round(min(6.2, max(0.0, rng.gamma(1.2, 0.9))), 1))
            margin = (150.0 - row["thalach"]) / 30.0 + row["oldpeak"] - 1.0
        num = 1.0 if margin > 0 else 0.0
        values = [row[a.name] for a in CLEVELAND_SCHEMA[:-1]] + [num]
        records.append(Record(tuple(values)))
    return Dataset(CLEVELAND_SCHEMA, tuple(records), name)
