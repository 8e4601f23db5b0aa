"""Benchmark objectives for exercising the two optimizers outside the
clinical pipeline. Continuous functions are stated as maximization problems
(negated classics with optimum 0 at the origin or at the known minimizer);
the planted-subset objective scores feature masks directly.
"""

from __future__ import annotations

import numpy as np

from .cuttlefish import FeatureMask


def sphere(x: np.ndarray) -> float:
    """-sum(x^2); maximum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return float(-np.sum(x * x))


def rastrigin(x: np.ndarray) -> float:
    """Negated Rastrigin; maximum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return float(-(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x))))


def rosenbrock(x: np.ndarray) -> float:
    """Negated Rosenbrock; maximum 0 at the all-ones point."""
    x = np.asarray(x, dtype=float)
    return float(
        -np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2)
    )


CONTINUOUS = {
    "sphere": sphere,
    "rastrigin": rastrigin,
    "rosenbrock": rosenbrock,
}


def planted_subset_objective(planted: tuple[int, ...], dim: int):
    """Mask objective rewarding the planted indices and penalizing noise:
    +1 per planted feature selected, -0.1 per extra. Unique maximum at
    exactly the planted subset."""
    planted_set = set(planted)
    if not planted_set or max(planted_set) >= dim:
        raise ValueError("planted indices must be non-empty and inside dim")

    def objective(mask: FeatureMask) -> float:
        hits = sum(1 for i in mask.indices if i in planted_set)
        extras = mask.count - hits
        return hits - 0.1 * extras

    return objective
