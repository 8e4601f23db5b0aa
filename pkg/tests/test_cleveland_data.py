"""Checks that only make sense against the real 303-record public file.

The file is not redistributed with this package; drop it at
``data/cleveland.csv`` or point ``CLEVELAND_CSV`` at it and these tests
activate. Without it they skip.
"""

import pytest

from heartpredict import dataio
from heartpredict.dataio import (
    impute_missing,
    normalize_minmax,
    remove_redundancy,
    stratify_by_chest_pain,
)

from conftest import cleveland_path, requires_cleveland

pytestmark = requires_cleveland


@pytest.fixture(scope="module")
def cleveland():
    return dataio.parse_csv(cleveland_path(), name="cleveland")


def test_parses_all_303_records(cleveland):
    assert len(cleveland) == 303


def test_six_missing_cells_in_ca_and_thal(cleveland):
    assert cleveland.missing_count() == 6
    missing_by_attr = {
        attr.name: sum(v is None for v in cleveland.column(attr.name))
        for attr in cleveland.schema
    }
    assert missing_by_attr["ca"] + missing_by_attr["thal"] == 6


def test_imputation_completes_all_records(cleveland):
    imputed = impute_missing(cleveland, 5)
    assert len(imputed) == 303
    assert imputed.missing_count() == 0


def test_no_duplicates_no_constant_columns(cleveland):
    clean, report = remove_redundancy(impute_missing(cleveland, 5))
    assert len(clean) == 303
    assert len(clean.predictors) == 13
    assert report.duplicate_rows == ()
    assert report.constant_attributes == ()


def test_chest_pain_partitions(cleveland):
    parts = stratify_by_chest_pain(cleveland)
    assert sum(len(p) for p in parts.values()) == 303
    assert all(len(parts[cp]) > 0 for cp in (1, 2, 3, 4))


def test_oldpeak_normalizes_into_unit_interval(cleveland):
    clean, _ = remove_redundancy(impute_missing(cleveland, 5))
    normalized, _ = normalize_minmax(clean)
    col = normalized.column("oldpeak")
    assert min(col) == 0.0
    assert max(col) == 1.0
