"""Parameter sweeps and paired comparisons, exported as CSV grids."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from footfall.layout_ga import (
    FitnessEvaluator,
    GAParams,
    PositionPool,
    RunTrace,
    evolve,
    random_baseline,
    random_population,
)
from footfall.patterns import split_pattern
from footfall.recommender import evaluate, evaluate_bounded, exact_match_rate, reconstruct
from footfall.storage import atomic_write_text
from footfall.transition import TransitionModel, WeightMatrix

DEFAULT_CROSSOVER = (0.05, 0.1, 0.2, 0.4, 0.8)
DEFAULT_MUTATION = (0.1, 0.2, 0.3, 0.4, 0.5)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Stable 63-bit seed for one cell/repeat of an experiment."""
    ss = np.random.SeedSequence([int(master_seed), *map(int, indices)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


@dataclass
class ExperimentGrid:
    row_name: str
    col_name: str
    row_labels: list
    col_labels: list
    cells: np.ndarray
    stddev: np.ndarray
    counts: np.ndarray
    extras: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.row_labels), len(self.col_labels))
        for name, arr in [("cells", self.cells), ("stddev", self.stddev), ("counts", self.counts),
                          *self.extras.items()]:
            if np.shape(arr) != shape:
                raise ValueError(f"{name} has shape {np.shape(arr)}, expected {shape}")

    def best_cell(self) -> tuple:
        if not self.cells.size:
            return None
        r, c = np.unravel_index(np.nanargmax(self.cells), self.cells.shape)
        return self.row_labels[r], self.col_labels[c], float(self.cells[r, c])

    def summary(self) -> dict:
        best = self.best_cell()
        return {
            "rows": {"name": self.row_name, "labels": list(self.row_labels)},
            "cols": {"name": self.col_name, "labels": list(self.col_labels)},
            "best_cell": None if best is None else {
                self.row_name: best[0], self.col_name: best[1], "mean": best[2]},
            "means": self.cells.tolist(),
            "stddevs": self.stddev.tolist(),
            "counts": self.counts.tolist(),
            **{name: arr.tolist() for name, arr in self.extras.items()},
        }


def _mean_std(values) -> tuple[float, float]:
    if not len(values):
        return math.nan, math.nan
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())


@dataclass(frozen=True)
class SweepSpec:
    crossover_values: tuple[float, ...] = DEFAULT_CROSSOVER
    mutation_values: tuple[float, ...] = DEFAULT_MUTATION
    repeats: int = 3
    base: GAParams = field(default_factory=GAParams)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        for c in self.crossover_values:
            if not 0.0 <= c <= 1.0:
                raise ValueError(f"crossover value {c} outside [0, 1]")
        for m in self.mutation_values:
            if not 0.0 <= m <= 0.5:
                raise ValueError(f"mutation value {m} outside [0, 0.5]")


def run_ga_sweep(spec: SweepSpec, W: WeightMatrix, pool: PositionPool, threads: int = 1) -> ExperimentGrid:
    """Mean final best fitness for every (crossover, mutation) pair."""
    master = spec.base.seed or 0
    jobs = [(r, c, k) for r in range(len(spec.crossover_values))
            for c in range(len(spec.mutation_values)) for k in range(spec.repeats)]

    def run(job):
        r, c, k = job
        params = replace(spec.base, crossover_chance=spec.crossover_values[r],
                         mutation_chance=spec.mutation_values[c], seed=derive_seed(master, r, c, k))
        return evolve(W, pool, params).best_fitness

    results = dict(zip(jobs, _pmap(run, jobs, threads)))
    shape = (len(spec.crossover_values), len(spec.mutation_values))
    cells, std = np.full(shape, np.nan), np.full(shape, np.nan)
    for r in range(shape[0]):
        for c in range(shape[1]):
            cells[r, c], std[r, c] = _mean_std([results[r, c, k] for k in range(spec.repeats)])
    return ExperimentGrid("crossover", "mutation", list(spec.crossover_values),
                          list(spec.mutation_values), cells, std, np.full(shape, spec.repeats))


@dataclass
class PairedTrace:
    seed: int
    ga: RunTrace
    random: RunTrace


def run_ga_vs_random(W: WeightMatrix, pool: PositionPool, params: GAParams, repeats: int,
                     threads: int = 1) -> list[PairedTrace]:
    """GA and random-swap baseline from a shared initial population.

    The baseline starts from the best individual of the GA's initial
    population, so both traces share their generation-0 value.
    """
    counts = W.counts if isinstance(W, WeightMatrix) else np.asarray(W)
    n = counts.shape[0]
    master = params.seed or 0
    evaluator = FitnessEvaluator(counts, pool)

    def run(k):
        seed = derive_seed(master, k)
        init_ss, ga_ss, rand_ss = np.random.SeedSequence(seed).spawn(3)
        pop = random_population(n, pool, params.population_size, np.random.default_rng(init_ss))
        start = pop[int(np.argmax(evaluator(pop)))]
        ga_seed = int(ga_ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
        ga = evolve(counts, pool, replace(params, seed=ga_seed), initial_population=pop)
        rnd = random_baseline(counts, pool, start, params.generations, np.random.default_rng(rand_ss))
        return PairedTrace(seed, ga, rnd)

    return _pmap(run, list(range(repeats)), threads)


def run_recommendation_grid(patterns: Sequence[Sequence[int]], model: TransitionModel,
                            cut_values: Sequence[int], window_values: Sequence[int],
                            ratio: float = 2.0, threads: int = 1) -> ExperimentGrid:
    """Mean bounded evaluation of reconstructed tails per (cut, window) cell.

    Patterns too short for a cut are skipped and counted in the
    ``skipped`` extra. ``exact_match`` and ``raw`` (the unbounded metric)
    are recorded alongside.
    """
    patterns = [list(p) for p in patterns]
    shape = (len(cut_values), len(window_values))
    cells = [(r, c) for r in range(shape[0]) for c in range(shape[1])]

    def run(cell):
        r, c = cell
        cut, window = cut_values[r], window_values[c]
        bounded, raw, exact = [], [], []
        skipped = 0
        for p in patterns:
            if len(p) <= cut:
                skipped += 1
                continue
            history, targets = split_pattern(p, cut, window)
            rec = reconstruct(model, history, cut, window, ratio)
            bounded.append(evaluate_bounded(targets, rec))
            raw.append(evaluate(targets, rec))
            exact.append(exact_match_rate(targets, rec))
        return bounded, raw, exact, skipped

    out = dict(zip(cells, _pmap(run, cells, threads)))
    mean, std = np.full(shape, np.nan), np.full(shape, np.nan)
    raw, exact = np.full(shape, np.nan), np.full(shape, np.nan)
    counts, skipped = np.zeros(shape, dtype=np.int64), np.zeros(shape, dtype=np.int64)
    for (r, c), (b, p, e, s) in out.items():
        mean[r, c], std[r, c] = _mean_std(b)
        raw[r, c] = _mean_std(p)[0]
        exact[r, c] = _mean_std(e)[0]
        counts[r, c], skipped[r, c] = len(b), s
    return ExperimentGrid("cut", "window", list(cut_values), list(window_values), mean, std, counts,
                          {"exact_match": exact, "raw": raw, "skipped": skipped})


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _fmt_label(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def grid_to_csv(grid: ExperimentGrid, field_name: str = "cells") -> str:
    values = {"cells": grid.cells, "stddev": grid.stddev, "counts": grid.counts,
              **grid.extras}[field_name]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{grid.row_name}\\{grid.col_name}", *map(_fmt_label, grid.col_labels)])
    for label, row in zip(grid.row_labels, values):
        w.writerow([_fmt_label(label), *map(_fmt, row)])
    return buf.getvalue()


def export_grid(grid: ExperimentGrid, path, field_name: str = "cells") -> None:
    """Write one grid field as CSV: corner cell, column labels, then labelled rows."""
    try:
        atomic_write_text(path, grid_to_csv(grid, field_name))
    except OSError as exc:
        raise OSError(f"cannot write grid to {path}: {exc}") from exc


def _parse(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def read_grid(path) -> ExperimentGrid:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    corner, *cols = rows[0]
    row_name, _, col_name = corner.partition("\\")
    labels = [_parse(r[0]) for r in rows[1:]]
    cells = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=np.float64)
    cells = cells.reshape(len(labels), len(cols))
    return ExperimentGrid(row_name, col_name, labels, [_parse(c) for c in cols], cells,
                          np.full(cells.shape, np.nan), np.zeros(cells.shape, dtype=np.int64))


def write_trace_csv(trace: RunTrace, path) -> None:
    lines = ["generation,best_fitness"]
    lines += [f"{g},{_fmt(v)}" for g, v in enumerate(trace.best_fitness_per_generation)]
    atomic_write_text(path, "\n".join(lines) + "\n")
