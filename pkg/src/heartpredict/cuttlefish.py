"""Chaotic cuttlefish search for wrapper feature selection.

Candidate solutions are continuous point vectors in a box; a threshold
decodes each vector to a boolean feature mask. The population is split into
four categories that combine a reflection term and a visibility term (the
fourth category reinitializes uniformly at random), and the two per-step
coefficients Cr and Br are driven by logistic chaos maps instead of plain
uniform draws.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

Bounds = tuple[float, float]

# Values whose logistic orbit is degenerate at delta=4 (fixed points and
# their preimages); initial map states avoid them.
DEGENERATE_STATES = (0.0, 0.25, 0.5, 0.75, 1.0)


def logistic_step(x, delta: float = 4.0):
    """One logistic-map step x' = delta * x * (1 - x); works elementwise on
    arrays. Stays inside [0, 1] for any 0 < delta <= 4 and x in [0, 1]."""
    return delta * x * (1.0 - x)


@dataclass(frozen=True)
class ChaosMap:
    """Paired logistic-map states producing the (Cr, Br) coefficient stream."""

    cr: float
    br: float
    delta: float = 4.0

    def __post_init__(self) -> None:
        if not 0.0 < self.delta <= 4.0:
            raise ValueError(f"delta must be in (0, 4], got {self.delta}")
        if not (0.0 <= self.cr <= 1.0 and 0.0 <= self.br <= 1.0):
            raise ValueError("chaos states must lie in [0, 1]")

    def step(self) -> tuple["ChaosMap", float, float]:
        cr = logistic_step(self.cr, self.delta)
        br = logistic_step(self.br, self.delta)
        return replace(self, cr=cr, br=br), cr, br


def seed_chaos(rng: np.random.Generator, delta: float = 4.0) -> ChaosMap:
    """Draw initial Cr/Br states uniformly from (0, 1), avoiding the
    degenerate orbits."""

    def draw() -> float:
        while True:
            u = float(rng.uniform(0.0, 1.0))
            if u not in DEGENERATE_STATES:
                return u

    return ChaosMap(cr=draw(), br=draw(), delta=delta)


@dataclass(frozen=True)
class FeatureMask:
    """Boolean subset of predictor indices; never empty."""

    selected: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not any(self.selected):
            raise ValueError("feature mask must select at least one predictor")

    @property
    def count(self) -> int:
        return sum(self.selected)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i, on in enumerate(self.selected) if on)

    def __len__(self) -> int:
        return len(self.selected)


def decode_mask(points: np.ndarray, threshold: float) -> FeatureMask:
    """Select feature j iff points[j] > threshold; when nothing clears the
    threshold the single largest coordinate is selected instead."""
    pts = np.asarray(points, dtype=float)
    chosen = pts > threshold
    if not chosen.any():
        chosen = np.zeros(pts.shape, dtype=bool)
        chosen[int(np.argmax(pts))] = True
    return FeatureMask(tuple(bool(b) for b in chosen))


@dataclass
class Cell:
    points: np.ndarray
    fitness: float = float("nan")


@dataclass
class Population:
    """Four category groups plus the running best cell and the scalar mean
    of its coordinates (used by the category-3 visibility term)."""

    groups: list[list[Cell]]
    bounds: Bounds
    best: Cell | None = None
    avb: float = float("nan")

    def cells(self):
        return itertools.chain.from_iterable(self.groups)

    def consider_best(self, cell: Cell) -> None:
        if self.best is None or cell.fitness > self.best.fitness:
            self.best = Cell(cell.points.copy(), cell.fitness)
            self.avb = float(np.mean(self.best.points))


def reflection_visibility(
    category: int,
    cr: float,
    br: float,
    cell_point: float,
    best_point: float,
    avb: float,
) -> float:
    """One coordinate of a category 1-3 candidate: the sum of the
    reflection and visibility terms."""
    if category == 1:
        return cr * cell_point + br * (best_point - cell_point)
    if category == 2:
        return cr * best_point + br * (best_point - cell_point)
    if category == 3:
        return cr * cell_point + br * (best_point - avb)
    raise ValueError(f"category must be 1, 2 or 3 for this rule, got {category}")


def generate_candidate(
    pop: Population,
    category: int,
    index: int,
    cmap: ChaosMap,
    rng: np.random.Generator,
) -> tuple[Cell, ChaosMap]:
    """Produce a new candidate for the given cell. Categories 1-3 draw a
    fresh (Cr, Br) pair per coordinate; category 4 resamples the whole point
    uniformly inside the bounds. The result is clamped to the bounds."""
    if category not in (1, 2, 3, 4):
        raise ValueError(f"category must be in 1..4, got {category}")
    group = pop.groups[category - 1]
    if not 0 <= index < len(group):
        raise ValueError(f"cell index {index} out of range for category {category}")
    lo, hi = pop.bounds
    cell = group[index]
    if pop.best is None:
        raise ValueError("population best is unset; evaluate before generating")

    if category == 4:
        pts = rng.random(cell.points.shape[0]) * (hi - lo) + lo
    else:
        pts = np.empty_like(cell.points)
        for j in range(pts.shape[0]):
            cmap, cr, br = cmap.step()
            pts[j] = reflection_visibility(
                category, cr, br, cell.points[j], pop.best.points[j], pop.avb
            )
    np.clip(pts, lo, hi, out=pts)
    return Cell(pts), cmap


def init_population_chaotic(
    n: int,
    dim: int,
    bounds: Bounds,
    cmap: ChaosMap,
    evaluate: Callable[[np.ndarray], float] | None = None,
) -> tuple[Population, ChaosMap]:
    """Build n cells whose coordinates come from successive chaos-map steps,
    affinely mapped into the bounds, assigned round-robin to the four
    categories. When an evaluator is given, every cell is scored and the
    best is recorded."""
    if n < 4:
        raise ValueError("population size must be >= 4 (one cell per category)")
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    lo, hi = bounds
    groups: list[list[Cell]] = [[], [], [], []]
    for i in range(n):
        pts = np.empty(dim)
        for j in range(dim):
            cmap, cr, _ = cmap.step()
            pts[j] = cr * (hi - lo) + lo
        groups[i % 4].append(Cell(pts))
    pop = Population(groups=groups, bounds=bounds)
    if evaluate is not None:
        for cell in pop.cells():
            cell.fitness = evaluate(cell.points)
            pop.consider_best(cell)
    return pop, cmap


@dataclass(frozen=True)
class CuttlefishConfig:
    population: int = 20
    generations: int = 50
    delta: float = 4.0
    threshold: float = 0.5
    subset_penalty: float = 0.01
    bounds: Bounds = (0.0, 1.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population < 4:
            raise ValueError("population must be >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        lo, hi = self.bounds
        if not lo < self.threshold < hi:
            raise ValueError("threshold must lie strictly inside the bounds")


def run_cuttlefish(
    fitness: Callable[[FeatureMask], float],
    dim: int,
    config: CuttlefishConfig,
) -> tuple[FeatureMask, list[float]]:
    """Search for the fittest feature mask.

    Each generation regenerates every cell, keeps the fitter of parent and
    candidate, and tracks the best cell ever seen. Returns the decoded best
    mask and the per-generation best-fitness history (non-decreasing).
    Mask fitness values are memoized, so the objective must be
    deterministic. A non-finite fitness raises ValueError naming the mask.
    """
    rng = np.random.default_rng(config.seed)
    cmap = seed_chaos(rng, config.delta)
    cache: dict[FeatureMask, float] = {}

    def evaluate(points: np.ndarray) -> float:
        mask = decode_mask(points, config.threshold)
        if mask in cache:
            return cache[mask]
        value = float(fitness(mask))
        if not np.isfinite(value):
            raise ValueError(
                f"fitness returned non-finite value {value!r} for mask {mask.indices}"
            )
        cache[mask] = value
        return value

    pop, cmap = init_population_chaotic(
        config.population, dim, config.bounds, cmap, evaluate
    )
    history: list[float] = []
    for _ in range(config.generations):
        for category in (1, 2, 3, 4):
            group = pop.groups[category - 1]
            for i in range(len(group)):
                candidate, cmap = generate_candidate(pop, category, i, cmap, rng)
                candidate.fitness = evaluate(candidate.points)
                if candidate.fitness > group[i].fitness:
                    group[i] = candidate
                pop.consider_best(candidate)
        assert pop.best is not None
        history.append(pop.best.fitness)
    return decode_mask(pop.best.points, config.threshold), history
