"""Genetic algorithm for placing activities on a 2-D grid.

A layout is an integer array ``genes`` of pool indices: activity ``k`` sits
at ``pool.positions[genes[k]]``. Gene 0 is pinned to the pool anchor and
never moved by any operator. Fitness rewards heavy flows between nearby
activities: the sum of ``W[i, j] / dist(i, j)`` over all ordered pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from footfall.transition import WeightMatrix

Layout = np.ndarray


@dataclass(frozen=True, eq=False)
class PositionPool:
    positions: np.ndarray
    anchor: int = 0

    def __post_init__(self):
        pos = np.asarray(self.positions)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (m, 2), got {pos.shape}")
        if len({tuple(p) for p in pos.tolist()}) != len(pos):
            raise ValueError("pool positions must be distinct")
        if not 0 <= self.anchor < len(pos):
            raise ValueError(f"anchor index {self.anchor} out of range")
        object.__setattr__(self, "positions", pos)

    @classmethod
    def from_points(cls, points, anchor=None) -> PositionPool:
        points = [tuple(p) for p in points]
        idx = 0 if anchor is None else points.index(tuple(anchor))
        return cls(np.asarray(points), idx)

    def __len__(self) -> int:
        return len(self.positions)

    def index_of(self, point) -> int:
        hits = np.flatnonzero((self.positions == np.asarray(point)).all(axis=1))
        if not hits.size:
            raise KeyError(f"{tuple(point)} is not in the pool")
        return int(hits[0])

    def scaled(self, factor: float) -> PositionPool:
        return PositionPool(self.positions * factor, self.anchor)


def grid_pool(n_activities: int, side: int | None = None) -> PositionPool:
    """Square grid in row-major order, anchor at (0, 0).

    The default side ``ceil(sqrt(2 n))`` leaves free cells for the
    replace-with-unused mutation.
    """
    if side is None:
        side = math.ceil(math.sqrt(2 * n_activities))
    if side * side < n_activities:
        raise ValueError(f"a {side}x{side} grid cannot hold {n_activities} activities")
    points = [(x, y) for y in range(side) for x in range(side)]
    return PositionPool(np.asarray(points, dtype=np.int64), 0)


def layout_positions(layout: Layout, pool: PositionPool) -> np.ndarray:
    return pool.positions[np.asarray(layout)]


def is_valid_layout(layout: Layout, pool: PositionPool) -> bool:
    genes = np.asarray(layout)
    return (
        genes.ndim == 1
        and genes.size > 0
        and int(genes[0]) == pool.anchor
        and genes.min() >= 0
        and genes.max() < len(pool)
        and len(set(genes.tolist())) == genes.size
    )


def _edges(W: WeightMatrix | np.ndarray):
    counts = W.counts if isinstance(W, WeightMatrix) else np.asarray(W)
    mask = counts > 0
    np.fill_diagonal(mask, False)
    i, j = np.nonzero(mask)
    return i, j, counts[i, j].astype(np.float64)


def fitness(positions, W: WeightMatrix | np.ndarray) -> float:
    """Flow-over-distance fitness of activities placed at ``positions``."""
    pos = np.asarray(positions, dtype=np.float64)
    if len({tuple(p) for p in pos.tolist()}) != len(pos):
        raise ValueError("layout contains duplicate positions")
    i, j, w = _edges(W)
    if i.size and pos.shape[0] <= max(i.max(), j.max()):
        raise ValueError(f"layout has {pos.shape[0]} genes but W has flows up to activity {max(i.max(), j.max())}")
    d = np.hypot(*(pos[i] - pos[j]).T)
    return float((w / d).sum())


class FitnessEvaluator:
    """Vectorized fitness over a batch of layouts sharing one pool."""

    def __init__(self, W: WeightMatrix | np.ndarray, pool: PositionPool):
        self.i, self.j, self.w = _edges(W)
        self.coords = pool.positions.astype(np.float64)

    def __call__(self, population: np.ndarray) -> np.ndarray:
        pop = np.atleast_2d(population)
        if not self.i.size:
            return np.zeros(pop.shape[0])
        a = self.coords[pop[:, self.i]]
        b = self.coords[pop[:, self.j]]
        d = np.hypot(a[..., 0] - b[..., 0], a[..., 1] - b[..., 1])
        return (self.w / d).sum(axis=1)


@dataclass(frozen=True)
class GAParams:
    population_size: int = 100
    generations: int = 100
    crossover_chance: float = 0.1
    mutation_chance: float = 0.4
    elite_count: int = 2
    tournament_size: int = 3
    seed: int | None = 0

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError(f"population_size must be >= 1, got {self.population_size}")
        if self.generations < 0:
            raise ValueError(f"generations must be >= 0, got {self.generations}")
        if not 0.0 <= self.crossover_chance <= 1.0:
            raise ValueError(f"crossover_chance must be in [0, 1], got {self.crossover_chance}")
        if not 0.0 <= self.mutation_chance <= 0.5:
            raise ValueError(f"mutation_chance must be in [0, 0.5], got {self.mutation_chance}")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError(
                f"elite_count must be in [0, population_size), got {self.elite_count}"
            )
        if self.tournament_size < 1:
            raise ValueError(f"tournament_size must be >= 1, got {self.tournament_size}")


@dataclass
class RunTrace:
    best_fitness_per_generation: list[float]
    best_layout: Layout
    best_fitness: float = field(default=float("nan"))

    def __post_init__(self):
        if math.isnan(self.best_fitness) and self.best_fitness_per_generation:
            self.best_fitness = max(self.best_fitness_per_generation)


def random_layout(n_activities: int, pool: PositionPool, rng: np.random.Generator) -> Layout:
    if n_activities > len(pool):
        raise ValueError(f"pool of {len(pool)} positions cannot hold {n_activities} activities")
    free = np.delete(np.arange(len(pool)), pool.anchor)
    rest = rng.choice(free, size=n_activities - 1, replace=False)
    return np.concatenate(([pool.anchor], rest)).astype(np.int64)


def random_population(n_activities: int, pool: PositionPool, size: int,
                      rng: np.random.Generator) -> np.ndarray:
    return np.stack([random_layout(n_activities, pool, rng) for _ in range(size)])


def repair(child: Layout, pool_size: int) -> Layout:
    """Replace later duplicates with the first pool positions the child lacks."""
    child = np.asarray(child).copy()
    used = set(child.tolist())
    free = (p for p in range(pool_size) if p not in used)
    seen = set()
    for k, g in enumerate(child.tolist()):
        if g in seen:
            g = next(free)
            child[k] = g
        seen.add(g)
    return child


def crossover_at(parent_a: Layout, parent_b: Layout, start: int, stop: int,
                 pool_size: int) -> tuple[Layout, Layout]:
    """Swap genes ``[start, stop)`` between the parents, then repair."""
    if start < 1:
        raise ValueError("crossover points cannot touch the anchored first gene")
    pa, pb = np.asarray(parent_a), np.asarray(parent_b)
    a, b = pa.copy(), pb.copy()
    a[start:stop], b[start:stop] = pb[start:stop], pa[start:stop]
    return repair(a, pool_size), repair(b, pool_size)


def crossover(parent_a: Layout, parent_b: Layout, pool: PositionPool | int,
              rng: np.random.Generator) -> tuple[Layout, Layout]:
    """Two-point crossover with cut points drawn from 1 <= start < stop <= n."""
    pool_size = pool if isinstance(pool, int) else len(pool)
    n = len(parent_a)
    if n < 2:
        return np.array(parent_a, copy=True), np.array(parent_b, copy=True)
    start, stop = np.sort(rng.choice(np.arange(1, n + 1), size=2, replace=False))
    return crossover_at(parent_a, parent_b, int(start), int(stop), pool_size)


def swap_genes(layout: Layout, rng: np.random.Generator) -> Layout:
    out = np.array(layout, copy=True)
    if len(out) < 3:
        return out
    i, j = rng.choice(np.arange(1, len(out)), size=2, replace=False)
    out[i], out[j] = out[j], out[i]
    return out


def replace_with_unused(layout: Layout, pool_size: int, rng: np.random.Generator) -> Layout:
    out = np.array(layout, copy=True)
    if len(out) < 2 or pool_size <= len(out):
        return out
    unused = np.setdiff1d(np.arange(pool_size), out, assume_unique=True)
    k = int(rng.integers(1, len(out)))
    out[k] = unused[int(rng.integers(len(unused)))]
    return out


def mutate(layout: Layout, pool: PositionPool | int, mutation_chance: float,
           rng: np.random.Generator) -> Layout:
    """With probability ``mutation_chance`` apply one of two operators, 50/50.

    Either two genes swap places, or one gene moves to a free pool position.
    The free-position move falls back to a swap when the pool is full, and
    vice versa when the layout has a single movable gene.
    """
    pool_size = pool if isinstance(pool, int) else len(pool)
    if rng.random() >= mutation_chance:
        return layout
    n = len(layout)
    use_swap = rng.random() < 0.5
    can_swap = n >= 3
    can_replace = n >= 2 and pool_size > n
    if use_swap and not can_swap:
        use_swap = False
    elif not use_swap and not can_replace:
        use_swap = can_swap
    if use_swap:
        return swap_genes(layout, rng)
    return replace_with_unused(layout, pool_size, rng)


def tournament_index(fitnesses: np.ndarray, tournament_size: int, rng: np.random.Generator) -> int:
    n = len(fitnesses)
    if tournament_size <= n:
        contenders = rng.choice(n, size=tournament_size, replace=False)
    else:
        contenders = rng.integers(0, n, size=tournament_size)
    return int(contenders[np.argmax(fitnesses[contenders])])


def select(population, fitnesses, tournament_size: int, rng: np.random.Generator):
    """Tournament selection; returns the fittest of ``tournament_size`` random picks.

    Contenders are distinct unless the tournament is larger than the
    population, so a full-size tournament always finds the best individual.
    """
    if len(population) == 0:
        raise ValueError("cannot select from an empty population")
    return population[tournament_index(np.asarray(fitnesses), tournament_size, rng)]


def evolve(W: WeightMatrix | np.ndarray, pool: PositionPool, params: GAParams,
           initial_population: np.ndarray | None = None) -> RunTrace:
    """Run the GA and return per-generation best fitness plus the best layout seen.

    Each generation copies the elites, then fills the population with
    tournament-selected parents that are crossed over (with
    ``crossover_chance``) and mutated.
    """
    counts = W.counts if isinstance(W, WeightMatrix) else np.asarray(W)
    n = counts.shape[0]
    if len(pool) < n:
        raise ValueError(f"pool of {len(pool)} positions cannot hold {n} activities")
    rng = np.random.default_rng(params.seed)
    evaluate = FitnessEvaluator(counts, pool)
    m = len(pool)

    if initial_population is None:
        pop = random_population(n, pool, params.population_size, rng)
    else:
        pop = np.array(initial_population, dtype=np.int64, copy=True)
        if pop.shape != (params.population_size, n):
            raise ValueError(f"initial population must have shape {(params.population_size, n)}")
    fit = evaluate(pop)
    top = int(np.argmax(fit))
    best_layout, best_fit = pop[top].copy(), float(fit[top])
    trace = [best_fit]

    for _ in range(params.generations):
        order = np.argsort(-fit, kind="stable")
        nxt = [pop[k] for k in order[:params.elite_count]]
        while len(nxt) < params.population_size:
            a = pop[tournament_index(fit, params.tournament_size, rng)]
            b = pop[tournament_index(fit, params.tournament_size, rng)]
            if rng.random() < params.crossover_chance:
                a, b = crossover(a, b, m, rng)
            nxt.append(mutate(a, m, params.mutation_chance, rng))
            if len(nxt) < params.population_size:
                nxt.append(mutate(b, m, params.mutation_chance, rng))
        pop = np.stack(nxt)
        fit = evaluate(pop)
        top = int(np.argmax(fit))
        if fit[top] > best_fit:
            best_layout, best_fit = pop[top].copy(), float(fit[top])
        trace.append(float(fit[top]))

    return RunTrace(trace, best_layout, best_fit)


def random_baseline(W: WeightMatrix | np.ndarray, pool: PositionPool, initial: Layout,
                    generations: int, rng: np.random.Generator) -> RunTrace:
    """Unconditional random swaps from ``initial``; the trace is the running best."""
    evaluate = FitnessEvaluator(W, pool)
    current = np.array(initial, dtype=np.int64, copy=True)
    best_layout = current.copy()
    best_fit = float(evaluate(current)[0])
    trace = [best_fit]
    for _ in range(generations):
        current = swap_genes(current, rng)
        f = float(evaluate(current)[0])
        if f > best_fit:
            best_layout, best_fit = current.copy(), f
        trace.append(best_fit)
    return RunTrace(trace, best_layout, best_fit)
