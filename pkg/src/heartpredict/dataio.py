"""Tabular clinical data handling: parsing, imputation, deduplication,
stratification, normalization and stratified k-fold splitting.

The canonical schema is the 14-attribute heart-disease table (13 predictors
plus the ``num`` diagnosis label). Missing cells are marked ``?`` or left
empty in the CSV and carried as ``None`` in memory. All operations are pure:
they return new ``Dataset`` values and never mutate their inputs.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"

MISSING_TOKENS = ("?", "")

# Attributes used to locate imputation neighbors.
NEIGHBOR_KEYS = ("age", "chol", "trestbps")


class DataError(ValueError):
    """Raised for malformed input files or contract violations on datasets."""


@dataclass(frozen=True)
class Attribute:
    """One column of the table: a name, a kind and (for categoricals) the
    enumerated domain. ``lower`` is an optional hard lower bound for
    numeric attributes (vitals cannot be negative)."""

    name: str
    kind: str
    domain: tuple[float, ...] | None = None
    lower: float | None = None

    def in_domain(self, value: float) -> bool:
        if self.kind == CATEGORICAL:
            return self.domain is not None and value in self.domain
        if self.lower is not None and value < self.lower:
            return False
        return True


CLEVELAND_SCHEMA: tuple[Attribute, ...] = (
    Attribute("age", NUMERIC, lower=0.0),
    Attribute("sex", CATEGORICAL, (0.0, 1.0)),
    Attribute("cp", CATEGORICAL, (1.0, 2.0, 3.0, 4.0)),
    Attribute("trestbps", NUMERIC, lower=0.0),
    Attribute("chol", NUMERIC, lower=0.0),
    Attribute("fbs", CATEGORICAL, (0.0, 1.0)),
    Attribute("restecg", CATEGORICAL, (0.0, 1.0, 2.0)),
    Attribute("thalach", NUMERIC, lower=0.0),
    Attribute("exang", CATEGORICAL, (0.0, 1.0)),
    Attribute("oldpeak", NUMERIC, lower=0.0),
    Attribute("slope", CATEGORICAL, (1.0, 2.0, 3.0)),
    Attribute("ca", CATEGORICAL, (0.0, 1.0, 2.0, 3.0)),
    Attribute("thal", CATEGORICAL, (3.0, 6.0, 7.0)),
    Attribute("num", CATEGORICAL, (0.0, 1.0, 2.0, 3.0, 4.0)),
)


@dataclass(frozen=True)
class Record:
    """One row, aligned with a dataset schema; ``None`` marks a missing cell.

    The label (last value) is never missing."""

    values: tuple[float | None, ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Dataset:
    schema: tuple[Attribute, ...]
    records: tuple[Record, ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.records)

    @property
    def predictors(self) -> tuple[Attribute, ...]:
        return self.schema[:-1]

    @property
    def label(self) -> Attribute:
        return self.schema[-1]

    def attribute_index(self, name: str) -> int:
        for i, attr in enumerate(self.schema):
            if attr.name == name:
                return i
        raise DataError(f"attribute {name!r} not in schema")

    def column(self, name: str) -> list[float | None]:
        i = self.attribute_index(name)
        return [r.values[i] for r in self.records]

    def missing_count(self) -> int:
        return sum(v is None for r in self.records for v in r.values)


def binarize_label(num: float) -> int:
    """Collapse the 0..4 diagnosis grade to absence (0) / presence (1)."""
    if num not in (0, 1, 2, 3, 4):
        raise DataError(f"diagnosis value {num!r} outside 0..4")
    return 0 if num == 0 else 1


def _parse_token(token: str, attr: Attribute, line_no: int) -> float | None:
    token = token.strip()
    if token in MISSING_TOKENS:
        return None
    try:
        value = float(token)
    except ValueError:
        raise DataError(
            f"line {line_no}: non-numeric token {token!r} for attribute {attr.name}"
        ) from None
    if not attr.in_domain(value):
        raise DataError(
            f"line {line_no}: value {token} out of domain for attribute {attr.name}"
        )
    return value


def _looks_like_header(row: list[str]) -> bool:
    first = row[0].strip()
    if first in MISSING_TOKENS:
        return False
    try:
        float(first)
    except ValueError:
        return True
    return False


def parse_csv(
    path: str,
    schema: tuple[Attribute, ...] = CLEVELAND_SCHEMA,
    name: str | None = None,
) -> Dataset:
    """Read a comma-separated file into a Dataset.

    Cells marked ``?`` or empty become missing (``None``); an optional header
    row is detected by a non-numeric first field. Raises :class:`DataError`
    naming the offending line for wrong arity, non-numeric tokens,
    out-of-domain categorical values, or a missing label.
    """
    with open(path, newline="") as fh:
        return _parse_rows(csv.reader(fh), schema, name or path)


def parse_csv_text(
    text: str,
    schema: tuple[Attribute, ...] = CLEVELAND_SCHEMA,
    name: str = "<string>",
) -> Dataset:
    return _parse_rows(csv.reader(io.StringIO(text)), schema, name)


def _parse_rows(rows: Iterable[list[str]], schema, name: str) -> Dataset:
    records: list[Record] = []
    for line_no, row in enumerate(rows, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if line_no == 1 and _looks_like_header(row):
            continue
        if len(row) != len(schema):
            raise DataError(
                f"line {line_no}: expected {len(schema)} fields, got {len(row)}"
            )
        values = tuple(
            _parse_token(tok, attr, line_no) for tok, attr in zip(row, schema)
        )
        if values[-1] is None:
            raise DataError(f"line {line_no}: missing label ({schema[-1].name})")
        records.append(Record(values))
    return Dataset(schema=tuple(schema), records=tuple(records), name=name)


def format_value(value: float | None) -> str:
    if value is None:
        return "?"
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def write_csv(ds: Dataset, path: str, header: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(serialize_csv(ds, header=header))


def serialize_csv(ds: Dataset, header: bool = False) -> str:
    lines = []
    if header:
        lines.append(",".join(a.name for a in ds.schema))
    for rec in ds.records:
        lines.append(",".join(format_value(v) for v in rec.values))
    return "\n".join(lines) + ("\n" if lines else "")


def _neighbor_scales(ds: Dataset) -> dict[str, tuple[float, float]]:
    scales = {}
    for key in NEIGHBOR_KEYS:
        try:
            col = [v for v in ds.column(key) if v is not None]
        except DataError:
            continue
        if col:
            scales[key] = (min(col), max(col))
    return scales


def _neighbor_distance(
    a: Record, b: Record, ds: Dataset, scales: Mapping[str, tuple[float, float]]
) -> float:
    total = 0.0
    shared = 0
    for key, (lo, hi) in scales.items():
        i = ds.attribute_index(key)
        va, vb = a.values[i], b.values[i]
        if va is None or vb is None:
            continue
        span = hi - lo
        d = 0.0 if span == 0 else (va - vb) / span
        total += d * d
        shared += 1
    if shared == 0:
        return float("inf")
    return total ** 0.5


def impute_missing(ds: Dataset, k: int = 5) -> Dataset:
    """Fill every missing cell from the k nearest records (normalized
    age/cholesterol/blood-pressure distance) that have the attribute present:
    mode for categoricals, median for numerics.

    Distance ties break toward the lower row index, and all neighbors are
    drawn from the original dataset, so the operation is deterministic and
    idempotent. Raises :class:`DataError` if an attribute is missing in
    every record.
    """
    if k < 1:
        raise DataError("neighbor count k must be >= 1")
    if ds.missing_count() == 0:
        return ds

    scales = _neighbor_scales(ds)
    filled: list[Record] = []
    for rec in ds.records:
        if all(v is not None for v in rec.values):
            filled.append(rec)
            continue
        new_values = list(rec.values)
        for j, attr in enumerate(ds.schema):
            if new_values[j] is not None:
                continue
            donors = [
                (idx, other)
                for idx, other in enumerate(ds.records)
                if other.values[j] is not None
            ]
            if not donors:
                raise DataError(f"attribute {attr.name} missing in every record")
            ranked = sorted(
                donors,
                key=lambda item: (_neighbor_distance(rec, item[1], ds, scales), item[0]),
            )
            neighbor_values = [other.values[j] for _, other in ranked[:k]]
            if attr.kind == CATEGORICAL:
                counts: dict[float, int] = {}
                for v in neighbor_values:
                    counts[v] = counts.get(v, 0) + 1
                top = max(counts.values())
                # earliest-seen value among the tied modes
                new_values[j] = next(v for v in neighbor_values if counts[v] == top)
            else:
                new_values[j] = float(statistics.median(neighbor_values))
        filled.append(Record(tuple(new_values)))
    return Dataset(ds.schema, tuple(filled), ds.name)


@dataclass(frozen=True)
class RedundancyReport:
    duplicate_rows: tuple[int, ...]
    constant_attributes: tuple[str, ...]

    def lines(self) -> list[str]:
        return [
            f"duplicates_dropped={len(self.duplicate_rows)}",
            f"constant_attributes_dropped={len(self.constant_attributes)}"
            + (
                " (" + ",".join(self.constant_attributes) + ")"
                if self.constant_attributes
                else ""
            ),
        ]


def remove_redundancy(ds: Dataset) -> tuple[Dataset, RedundancyReport]:
    """Drop exact-duplicate rows (first occurrence kept) and predictors that
    are constant across all remaining records. The label is never dropped."""
    seen: set[tuple] = set()
    kept: list[Record] = []
    dup_rows: list[int] = []
    for idx, rec in enumerate(ds.records):
        key = rec.values
        if key in seen:
            dup_rows.append(idx)
            continue
        seen.add(key)
        kept.append(rec)

    constant: list[int] = []
    if kept:
        for j, attr in enumerate(ds.schema[:-1]):
            distinct = {rec.values[j] for rec in kept}
            if len(distinct) == 1:
                constant.append(j)

    keep_idx = [j for j in range(len(ds.schema)) if j not in constant]
    schema = tuple(ds.schema[j] for j in keep_idx)
    records = tuple(Record(tuple(r.values[j] for j in keep_idx)) for r in kept)
    report = RedundancyReport(
        duplicate_rows=tuple(dup_rows),
        constant_attributes=tuple(ds.schema[j].name for j in constant),
    )
    return Dataset(schema, records, ds.name), report


def stratify_by_chest_pain(ds: Dataset) -> dict[int, Dataset]:
    """Partition records by chest-pain type 1..4; all four keys are always
    present, possibly with empty partitions."""
    i = ds.attribute_index("cp")
    buckets: dict[int, list[Record]] = {1: [], 2: [], 3: [], 4: []}
    for rec in ds.records:
        cp = rec.values[i]
        if cp is None:
            raise DataError("cp is missing; impute before stratifying")
        buckets[int(cp)].append(rec)
    return {
        cp: Dataset(ds.schema, tuple(recs), f"{ds.name}[cp={cp}]")
        for cp, recs in buckets.items()
    }


NormalizationTable = dict[str, tuple[float, float]]


def normalize_value(value: float, bounds: tuple[float, float]) -> float:
    """Map a raw value into [0, 1] with the stored (lo, hi) pair, clamping
    values outside the training range."""
    lo, hi = bounds
    if hi == lo:
        return 0.0
    return min(1.0, max(0.0, (value - lo) / (hi - lo)))


def normalize_minmax(ds: Dataset) -> tuple[Dataset, NormalizationTable]:
    """Scale every predictor into [0, 1]: numerics by (x - min)/(max - min),
    categoricals by value / max(domain). Returns the normalized dataset and
    the per-attribute (lo, hi) table needed to score unseen records. The
    label column is left untouched; a constant attribute maps to 0."""
    if ds.missing_count() > 0:
        raise DataError("dataset must be complete before normalization")
    table: NormalizationTable = {}
    for attr in ds.predictors:
        col = ds.column(attr.name)
        if attr.kind == CATEGORICAL:
            table[attr.name] = (0.0, float(max(attr.domain or (0.0,))))
        else:
            lo = float(min(col)) if col else 0.0
            hi = float(max(col)) if col else 0.0
            table[attr.name] = (lo, hi)

    new_schema = tuple(
        Attribute(a.name, NUMERIC, None, 0.0) for a in ds.predictors
    ) + (ds.label,)
    records = []
    for rec in ds.records:
        vals = [
            normalize_value(v, table[attr.name])
            for v, attr in zip(rec.values[:-1], ds.predictors)
        ]
        vals.append(rec.values[-1])
        records.append(Record(tuple(vals)))
    return Dataset(new_schema, tuple(records), ds.name), table


def apply_normalization(ds: Dataset, table: NormalizationTable) -> Dataset:
    """Normalize predictors with a previously fitted (lo, hi) table, clamping
    values that fall outside the stored range. Used to score held-out or
    unseen records with a model's training-time table."""
    if ds.missing_count() > 0:
        raise DataError("dataset must be complete before normalization")
    for attr in ds.predictors:
        if attr.name not in table:
            raise DataError(f"attribute {attr.name} absent from normalization table")
    new_schema = tuple(
        Attribute(a.name, NUMERIC, None, 0.0) for a in ds.predictors
    ) + (ds.label,)
    records = []
    for rec in ds.records:
        vals = [
            normalize_value(v, table[attr.name])
            for v, attr in zip(rec.values[:-1], ds.predictors)
        ]
        vals.append(rec.values[-1])
        records.append(Record(tuple(vals)))
    return Dataset(new_schema, tuple(records), ds.name)


def kfold_split(
    ds: Dataset, k: int, seed: int
) -> list[tuple[Dataset, Dataset]]:
    """Stratified (by binary label) k-fold split: disjoint test folds whose
    union is the dataset, sizes differing by at most one, deterministic for
    a given seed."""
    if k < 2:
        raise DataError("fold count k must be >= 2")
    if len(ds) < k:
        raise DataError(f"cannot split {len(ds)} records into {k} folds")

    rng = np.random.default_rng(seed)
    label_idx = len(ds.schema) - 1
    by_class: dict[int, list[int]] = {}
    for i, rec in enumerate(ds.records):
        label = binarize_label(rec.values[label_idx])
        by_class.setdefault(label, []).append(i)

    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for label in sorted(by_class):
        idx = np.array(by_class[label])
        rng.shuffle(idx)
        for i in idx:
            folds[cursor % k].append(int(i))
            cursor += 1

    pairs = []
    for f, test_idx in enumerate(folds):
        test_set = set(test_idx)
        train = tuple(r for i, r in enumerate(ds.records) if i not in test_set)
        test = tuple(ds.records[i] for i in sorted(test_idx))
        pairs.append(
            (
                Dataset(ds.schema, train, f"{ds.name}[fold{f}-train]"),
                Dataset(ds.schema, test, f"{ds.name}[fold{f}-test]"),
            )
        )
    return pairs


def feature_matrix(ds: Dataset) -> np.ndarray:
    """Predictor values as a float matrix (n_records x n_predictors)."""
    if ds.missing_count() > 0:
        raise DataError("dataset has missing cells")
    return np.array(
        [[float(v) for v in rec.values[:-1]] for rec in ds.records], dtype=float
    ).reshape(len(ds), len(ds.predictors))


def label_vector(ds: Dataset) -> np.ndarray:
    """Binarized labels as a float vector."""
    label_idx = len(ds.schema) - 1
    return np.array(
        [binarize_label(rec.values[label_idx]) for rec in ds.records], dtype=float
    )
