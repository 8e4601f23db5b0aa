"""Elephant-herd search over continuous vectors, used here to optimize
flattened network weights.

The population is split into clans led by their fittest member (the
matriarch). Per generation each clan sorts by fitness, moves every member
toward the matriarch, proposes beta times the clan center for the matriarch
itself, applies two-point crossover between consecutive members and a
retry-capped mutation, and finally resamples its worst members inside the
bounds. Candidate acceptance is greedy by default (a member is only
replaced by a fitter candidate); unconditional replacement is available
behind a flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

Bounds = tuple[float, float]

MUTATION_RETRIES = 5


@dataclass
class Elephant:
    position: np.ndarray
    fitness: float = float("nan")


@dataclass
class Clan:
    members: list[Elephant]

    @property
    def matriarch_index(self) -> int:
        best = 0
        for i, e in enumerate(self.members):
            if e.fitness > self.members[best].fitness:
                best = i
        return best

    def sort_by_fitness(self) -> None:
        self.members.sort(key=lambda e: e.fitness, reverse=True)


@dataclass(frozen=True)
class HerdConfig:
    alpha: float = 0.5
    beta: float = 0.1
    clans: int = 3
    clan_size: int = 10
    max_generations: int = 50
    bounds: Bounds = (-5.0, 5.0)
    worst_count: int = 1
    mutation_rate: float = 0.1
    seed: int = 0
    greedy: bool = True
    crossover: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.clans < 1:
            raise ValueError("need at least one clan")
        if self.clan_size < 2:
            raise ValueError("clans need at least two members")
        if self.max_generations < 1:
            raise ValueError("need at least one generation")
        if not 0 <= self.worst_count < self.clan_size:
            raise ValueError("worst_count must be < clan_size")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")


def _clamp(position: np.ndarray, bounds: Bounds) -> np.ndarray:
    return np.clip(position, bounds[0], bounds[1])


def clan_update(
    position: np.ndarray,
    matriarch_position: np.ndarray,
    alpha: float,
    rd: float,
    bounds: Bounds,
) -> np.ndarray:
    """Move a member toward the matriarch: new = old + alpha*(best - old)*rd,
    clamped to the bounds."""
    position = np.asarray(position, dtype=float)
    matriarch_position = np.asarray(matriarch_position, dtype=float)
    if position.shape != matriarch_position.shape:
        raise ValueError("position vectors must share a length")
    return _clamp(position + alpha * (matriarch_position - position) * rd, bounds)


def clan_center(clan: Clan) -> np.ndarray:
    return np.mean([e.position for e in clan.members], axis=0)


def matriarch_update(clan: Clan, beta: float, bounds: Bounds) -> np.ndarray:
    """Candidate position for the matriarch: beta times the coordinatewise
    clan center, clamped. Whether it replaces the matriarch is decided by
    the caller's acceptance rule."""
    if not clan.members:
        raise ValueError("clan is empty")
    return _clamp(beta * clan_center(clan), bounds)


def separation_reinit(
    clan: Clan, worst_count: int, bounds: Bounds, rng: np.random.Generator
) -> Clan:
    """Fresh uniform positions for the worst_count lowest-fitness members
    (ties toward the lower index); fitness of the replaced members is reset
    to NaN for re-evaluation. Other members are untouched."""
    if worst_count >= len(clan.members):
        raise ValueError("worst_count must be smaller than the clan")
    if worst_count == 0:
        return Clan(list(clan.members))
    lo, hi = bounds
    order = sorted(range(len(clan.members)), key=lambda i: (clan.members[i].fitness, i))
    worst = set(order[:worst_count])
    members = []
    for i, e in enumerate(clan.members):
        if i in worst:
            fresh = lo + (hi - lo) * rng.random(e.position.shape[0])
            members.append(Elephant(fresh, float("nan")))
        else:
            members.append(e)
    return Clan(members)


def two_point_crossover(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Swap the gene segment [n//3, n//3 + n//2) between two parents."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("parents must share a length")
    n = a.shape[0]
    if n < 3:
        raise ValueError("crossover needs vectors of length >= 3")
    x1 = n // 3
    x2 = x1 + n // 2
    child1, child2 = a.copy(), b.copy()
    child1[x1:x2] = b[x1:x2]
    child2[x1:x2] = a[x1:x2]
    return child1, child2


def mutate(
    position: np.ndarray, rate: float, bounds: Bounds, rng: np.random.Generator
) -> np.ndarray:
    """Resample ceil(rate * n) distinct coordinates uniformly inside the
    bounds."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError("mutation rate must lie in [0, 1]")
    position = np.asarray(position, dtype=float)
    n = position.shape[0]
    count = math.ceil(rate * n)
    if count == 0:
        return position.copy()
    lo, hi = bounds
    idx = rng.choice(n, size=count, replace=False)
    out = position.copy()
    out[idx] = lo + (hi - lo) * rng.random(count)
    return out


def run_elephant_herd(
    fitness: Callable[[np.ndarray], float],
    dim: int,
    config: HerdConfig,
) -> tuple[np.ndarray, list[float]]:
    """Maximize a fitness function over [lo, hi]^dim.

    Returns the best position ever evaluated and the per-generation
    best-fitness history (non-decreasing). The fitness function must be
    deterministic; a non-finite value raises ValueError.
    """
    rng = np.random.default_rng(config.seed)
    lo, hi = config.bounds

    def evaluate(position: np.ndarray) -> float:
        value = float(fitness(position))
        if not np.isfinite(value):
            raise ValueError(f"fitness returned non-finite value {value!r}")
        return value

    best_position: np.ndarray | None = None
    best_fitness = -np.inf

    def track(e: Elephant) -> None:
        nonlocal best_position, best_fitness
        if e.fitness > best_fitness:
            best_fitness = e.fitness
            best_position = e.position.copy()

    clans = []
    for _ in range(config.clans):
        members = []
        for _ in range(config.clan_size):
            pos = lo + (hi - lo) * rng.random(dim)
            e = Elephant(pos, evaluate(pos))
            track(e)
            members.append(e)
        clans.append(Clan(members))

    def consider(e: Elephant, candidate: np.ndarray) -> None:
        f = evaluate(candidate)
        if not config.greedy or f > e.fitness:
            e.position, e.fitness = candidate, f
        track(Elephant(candidate, f))

    history: list[float] = []
    for _ in range(config.max_generations):
        for clan in clans:
            clan.sort_by_fitness()
            matriarch = clan.members[0]
            for e in clan.members[1:]:
                candidate = clan_update(
                    e.position, matriarch.position, config.alpha, rng.random(),
                    config.bounds,
                )
                consider(e, candidate)
            consider(matriarch, matriarch_update(clan, config.beta, config.bounds))

            if config.crossover and dim >= 3:
                for i in range(0, len(clan.members) - 1, 2):
                    first, second = clan.members[i], clan.members[i + 1]
                    child1, child2 = two_point_crossover(
                        first.position, second.position
                    )
                    consider(first, child1)
                    consider(second, child2)

            if config.mutation_rate > 0.0:
                for e in clan.members:
                    for _ in range(MUTATION_RETRIES):
                        candidate = mutate(
                            e.position, config.mutation_rate, config.bounds, rng
                        )
                        f = evaluate(candidate)
                        track(Elephant(candidate, f))
                        if f > e.fitness:
                            e.position, e.fitness = candidate, f
                            break

            if config.worst_count > 0:
                refreshed = separation_reinit(
                    clan, config.worst_count, config.bounds, rng
                )
                for old, new in zip(clan.members, refreshed.members):
                    if math.isnan(new.fitness):
                        consider(old, new.position)
        history.append(best_fitness)

    assert best_position is not None
    return best_position, history
