"""Synthetic visitor trajectories.

A hidden ground-truth graph with a few strong out-edges per activity drives
a weighted random walk for every visitor; a noise factor then sprinkles
spurious visits into each walk.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

VisitorPattern = list[int]


@dataclass(frozen=True, eq=False)
class GroundTruthGraph:
    n_activities: int
    edge_weights: np.ndarray
    seed: int | None = None

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.edge_weights, axis=1)


@dataclass(frozen=True)
class CorpusConfig:
    n_activities: int
    n_visitors: int
    walk_length_min: int = 4
    walk_length_max: int = 12
    noise_factor: float = 0.1
    seed: int = 0
    out_degree: int = 3

    def __post_init__(self):
        if self.n_activities < 2:
            raise ValueError(f"n_activities must be >= 2, got {self.n_activities}")
        if self.n_visitors < 0:
            raise ValueError(f"n_visitors must be >= 0, got {self.n_visitors}")
        if not 1 <= self.walk_length_min <= self.walk_length_max:
            raise ValueError(
                "walk lengths must satisfy 1 <= walk_length_min <= walk_length_max, "
                f"got [{self.walk_length_min}, {self.walk_length_max}]"
            )
        if not 0.0 <= self.noise_factor <= 1.0:
            raise ValueError(f"noise_factor must be in [0, 1], got {self.noise_factor}")
        if self.out_degree < 1:
            raise ValueError(f"out_degree must be >= 1, got {self.out_degree}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> CorpusConfig:
        return cls(**data)


@dataclass
class PatternCorpus:
    patterns: list[VisitorPattern]
    config: CorpusConfig
    metadata: dict = field(default_factory=dict)

    @property
    def n_activities(self) -> int:
        return self.config.n_activities

    @property
    def total_visits(self) -> int:
        return sum(len(p) for p in self.patterns)

    def ground_truth(self) -> GroundTruthGraph:
        return generate_ground_truth(
            self.config.n_activities, self.config.seed, self.config.out_degree
        )

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)


def generate_ground_truth(n_activities: int, seed: int | None = None, out_degree: int = 3) -> GroundTruthGraph:
    """Random sparse row-stochastic digraph without self-loops.

    Each activity gets ``min(out_degree, n_activities - 1)`` successors with
    weights drawn uniformly from (0, 1] and normalized per row.
    """
    if n_activities < 2:
        raise ValueError(f"n_activities must be >= 2, got {n_activities}")
    if out_degree < 1:
        raise ValueError(f"out_degree must be >= 1, got {out_degree}")
    rng = np.random.default_rng(seed)
    k = min(out_degree, n_activities - 1)
    weights = np.zeros((n_activities, n_activities))
    for i in range(n_activities):
        others = np.delete(np.arange(n_activities), i)
        targets = rng.choice(others, size=k, replace=False)
        w = 1.0 - rng.random(k)
        weights[i, targets] = w / w.sum()
    return GroundTruthGraph(n_activities, weights, seed)


def noise_count(length: int, noise_factor: float) -> int:
    # the epsilon keeps products such as 0.3 * 10 from flooring to 2
    return int(math.floor(noise_factor * length + 1e-9))


def generate_pattern(
    graph: GroundTruthGraph,
    start: int,
    length: int,
    noise_factor: float,
    rng: np.random.Generator,
) -> VisitorPattern:
    n = graph.n_activities
    if not 0 <= start < n:
        raise ValueError(f"start activity {start} out of range [0, {n})")
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")

    cum = graph.cumulative
    visits = [int(start)]
    current = int(start)
    for u in rng.random(length - 1):
        row = cum[current]
        nxt = int(np.searchsorted(row, u * row[-1], side="right"))
        current = min(nxt, n - 1)
        visits.append(current)

    for _ in range(noise_count(length, noise_factor)):
        pos = int(rng.integers(0, len(visits) + 1))
        visits.insert(pos, int(rng.integers(0, n)))
    return visits


def _visitor_rng(seed: int, index: int) -> np.random.Generator:
    # spawn_key keeps visitor streams independent of the graph stream and of each other
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _generate_range(graph: GroundTruthGraph, config: CorpusConfig, lo: int, hi: int) -> list[VisitorPattern]:
    out = []
    for idx in range(lo, hi):
        rng = _visitor_rng(config.seed, idx)
        length = int(rng.integers(config.walk_length_min, config.walk_length_max + 1))
        start = idx % config.n_activities
        out.append(generate_pattern(graph, start, length, config.noise_factor, rng))
    return out


def generate_corpus(config: CorpusConfig, threads: int = 1) -> PatternCorpus:
    """Generate ``config.n_visitors`` patterns with round-robin start activities.

    Every visitor draws from its own stream derived from ``(seed, index)``,
    so the output does not depend on ``threads``.
    """
    graph = generate_ground_truth(config.n_activities, config.seed, config.out_degree)
    n = config.n_visitors
    threads = max(1, int(threads))
    if threads == 1 or n < 2 * threads:
        patterns = _generate_range(graph, config, 0, n)
    else:
        bounds = np.linspace(0, n, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = pool.map(
                lambda b: _generate_range(graph, config, int(b[0]), int(b[1])),
                zip(bounds[:-1], bounds[1:]),
            )
            patterns = [p for chunk in chunks for p in chunk]
    return PatternCorpus(patterns, config)


def expected_pattern_length(walk_length_min: int, walk_length_max: int, noise_factor: float) -> float:
    lengths = range(walk_length_min, walk_length_max + 1)
    return sum(L + noise_count(L, noise_factor) for L in lengths) / len(lengths)


def visitors_for_total_visits(total_visits: int, walk_length_min: int = 4, walk_length_max: int = 12,
                              noise_factor: float = 0.1) -> int:
    """Number of visitors whose expected pattern lengths add up to ``total_visits``."""
    mean = expected_pattern_length(walk_length_min, walk_length_max, noise_factor)
    return max(1, round(total_visits / mean))


def split_pattern(pattern: Sequence[int], cut: int, history_size: int) -> tuple[list[int], list[int]]:
    """Split off the last ``cut`` visits as targets.

    The history is the (at most) ``history_size`` visits right before them.
    """
    if cut < 1:
        raise ValueError(f"cut must be >= 1, got {cut}")
    if history_size < 0:
        raise ValueError(f"history_size must be >= 0, got {history_size}")
    if cut >= len(pattern):
        raise ValueError(f"cut={cut} must be smaller than the pattern length {len(pattern)}")
    boundary = len(pattern) - cut
    history = list(pattern[max(0, boundary - history_size):boundary])
    return history, list(pattern[boundary:])


def train_test_split(corpus: PatternCorpus, test_fraction: float = 0.2,
                     seed: int | None = None) -> tuple[PatternCorpus, PatternCorpus]:
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(corpus.patterns))
    n_test = int(round(test_fraction * len(order)))
    test_idx = set(order[:n_test].tolist())
    train = [p for i, p in enumerate(corpus.patterns) if i not in test_idx]
    test = [p for i, p in enumerate(corpus.patterns) if i in test_idx]
    return PatternCorpus(train, corpus.config), PatternCorpus(test, corpus.config)
