"""Binary-classification evaluation: confusion counts, the derived clinical
measures (accuracy, prevalence, predictive values, sensitivity, specificity,
F1) and plain-text report rendering.

Measures are kept as fractions in [0, 1] internally; the report boundary
formats them as percentages. A zero denominator yields ``None``
(UNDEFINED) for that measure only, never a silent zero.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Sequence

UNDEFINED_MARK = "—"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with positive = abnormal = 1: tp/tn are correct calls,
    fp/fn the two error kinds."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float | None
    prevalence: float | None
    ppv: float | None
    npv: float | None
    sensitivity: float | None
    specificity: float | None
    f1: float | None
    error: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def confusion(
    predictions: Sequence[int], truths: Sequence[int]
) -> ConfusionMatrix:
    """Tally predicted vs true binary labels."""
    if len(predictions) != len(truths):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions, {len(truths)} truths"
        )
    if not predictions:
        raise ValueError("cannot tally an empty prediction list")
    tp = tn = fp = fn = 0
    for p, t in zip(predictions, truths):
        if p not in (0, 1) or t not in (0, 1):
            raise ValueError(f"labels must be 0 or 1, got ({p!r}, {t!r})")
        if p == 1 and t == 1:
            tp += 1
        elif p == 0 and t == 0:
            tn += 1
        elif p == 1 and t == 0:
            fp += 1
        else:
            fn += 1
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """All derived measures from the four counts; any zero-denominator
    measure comes back as None."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    accuracy = _ratio(cm.tp + cm.tn, cm.total)
    prevalence = _ratio(cm.tp + cm.fn, cm.total)
    ppv = _ratio(cm.tp, cm.tp + cm.fp)
    npv = _ratio(cm.tn, cm.tn + cm.fn)
    sensitivity = _ratio(cm.tp, cm.tp + cm.fn)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    if ppv is None or sensitivity is None or (ppv + sensitivity) == 0:
        f1 = None
    else:
        f1 = 2.0 * ppv * sensitivity / (ppv + sensitivity)
    error = None if accuracy is None else 1.0 - accuracy
    return MetricsReport(
        accuracy=accuracy,
        prevalence=prevalence,
        ppv=ppv,
        npv=npv,
        sensitivity=sensitivity,
        specificity=specificity,
        f1=f1,
        error=error,
    )


REPORT_COLUMNS = (
    ("ACC", "accuracy"),
    ("Error", "error"),
    ("Precision", "ppv"),
    ("F1", "f1"),
    ("Recall", "sensitivity"),
    ("Specificity", "specificity"),
)


def _format_pct(value: float | None) -> str:
    return UNDEFINED_MARK if value is None else f"{100.0 * value:.1f}"


def report_table(rows: Sequence[tuple[str, MetricsReport]]) -> str:
    """Aligned columnar text, percentages to one decimal, UNDEFINED as a
    dash. Column order: ACC, Error, Precision, F1, Recall, Specificity."""
    if not rows:
        raise ValueError("report needs at least one row")
    header = ["Model"] + [title for title, _ in REPORT_COLUMNS]
    body = [
        [label] + [_format_pct(getattr(rep, attr)) for _, attr in REPORT_COLUMNS]
        for label, rep in rows
    ]
    widths = [
        max(len(header[c]), *(len(line[c]) for line in body))
        for c in range(len(header))
    ]
    def fmt(line: list[str]) -> str:
        first = line[0].ljust(widths[0])
        rest = [cell.rjust(w) for cell, w in zip(line[1:], widths[1:])]
        return "  ".join([first] + rest)

    return "\n".join([fmt(header)] + [fmt(line) for line in body]) + "\n"


def metrics_lines(label: str, report: MetricsReport) -> list[str]:
    """Machine-readable key=value lines (fractions, full precision)."""
    out = []
    for key, value in report.as_dict().items():
        text = "undefined" if value is None else repr(value)
        out.append(f"{label}.{key}={text}")
    return out


def prevalence_sweep(
    rates: tuple[float, float], prevalences: Sequence[float]
) -> list[tuple[float, float, float]]:
    """Analytic (prevalence, PPV, NPV) triples for a fixed sensitivity and
    specificity, via the Bayes identities. Degenerate prevalences 0 and 1
    are rejected."""
    sens, spec = rates
    if not (0.0 < sens <= 1.0 and 0.0 < spec <= 1.0):
        raise ValueError("sensitivity and specificity must lie in (0, 1]")
    out = []
    for p in prevalences:
        if not 0.0 < p < 1.0:
            raise ValueError(f"prevalence {p!r} must lie strictly in (0, 1)")
        ppv = p * sens / (p * sens + (1.0 - p) * (1.0 - spec))
        npv = (1.0 - p) * spec / ((1.0 - p) * spec + p * (1.0 - sens))
        out.append((p, ppv, npv))
    return out
