"""Transition counts, smoothed conditional probabilities and priors.

``W[i, j]`` counts observed moves from activity ``i`` to activity ``j``.
``P[i, k]`` estimates P(previous = i | next = k): add one to every count,
then normalize each column. Priors are add-one smoothed visit frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from footfall.patterns import PatternCorpus

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {c.shape}")
        if (c < 0).any():
            raise ValueError("weight matrix entries must be non-negative")

    @property
    def n(self) -> int:
        return self.counts.shape[0]


@dataclass(frozen=True, eq=False)
class ProbMatrix:
    probs: np.ndarray

    @property
    def n(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True, eq=False)
class PriorVector:
    priors: np.ndarray

    @property
    def n(self) -> int:
        return self.priors.shape[0]


def _patterns_and_n(corpus, n: int | None) -> tuple[Sequence[Sequence[int]], int]:
    if isinstance(corpus, PatternCorpus):
        return corpus.patterns, corpus.n_activities if n is None else n
    patterns = list(corpus)
    if n is None:
        n = 1 + max((max(p) for p in patterns if len(p)), default=-1)
    return patterns, n


def _check_ids(patterns, n):
    for p in patterns:
        for a in p:
            if not 0 <= a < n:
                raise ValueError(f"activity id {a} out of range [0, {n})")


def build_weight_matrix(corpus: PatternCorpus | Iterable[Sequence[int]], n: int | None = None) -> WeightMatrix:
    """Count adjacent (previous, next) pairs over every pattern.

    ``corpus`` may be a :class:`PatternCorpus` or a plain iterable of
    patterns; in the latter case ``n`` defaults to ``max id + 1``.
    """
    patterns, n = _patterns_and_n(corpus, n)
    _check_ids(patterns, n)
    counts = np.zeros((n, n), dtype=np.int64)
    src = [a for p in patterns for a in p[:-1]]
    dst = [b for p in patterns for b in p[1:]]
    if src:
        np.add.at(counts, (np.asarray(src), np.asarray(dst)), 1)
    return WeightMatrix(counts)


def normalize(W: WeightMatrix) -> ProbMatrix:
    smoothed = W.counts.astype(np.float64) + 1.0
    return ProbMatrix(smoothed / smoothed.sum(axis=0, keepdims=True))


def visit_counts(corpus: PatternCorpus | Iterable[Sequence[int]], n: int | None = None) -> np.ndarray:
    patterns, n = _patterns_and_n(corpus, n)
    _check_ids(patterns, n)
    flat = [a for p in patterns for a in p]
    return np.bincount(np.asarray(flat, dtype=np.int64), minlength=n)


def priors_from_counts(counts: np.ndarray) -> PriorVector:
    counts = np.asarray(counts, dtype=np.float64)
    return PriorVector((counts + 1.0) / (counts.sum() + counts.shape[0]))


def build_priors(corpus: PatternCorpus | Iterable[Sequence[int]], n: int | None = None) -> PriorVector:
    counts = visit_counts(corpus, n)
    if counts.sum() == 0:
        raise ValueError("corpus contains no visits")
    return priors_from_counts(counts)


@dataclass(frozen=True, eq=False)
class TransitionModel:
    """Everything the recommender and the layout GA read from a corpus."""

    W: WeightMatrix
    P: ProbMatrix
    priors: PriorVector

    @property
    def n(self) -> int:
        return self.W.n

    @cached_property
    def log_P(self) -> np.ndarray:
        return np.log2(self.P.probs)

    @cached_property
    def log_priors(self) -> np.ndarray:
        return np.log2(self.priors.priors)

    @classmethod
    def from_counts(cls, counts: np.ndarray, visits: np.ndarray) -> TransitionModel:
        W = WeightMatrix(np.asarray(counts, dtype=np.int64))
        return cls(W, normalize(W), priors_from_counts(visits))

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "n": self.n,
            "W": self.W.counts.tolist(),
            "P": self.P.probs.tolist(),
            "priors": self.priors.priors.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> TransitionModel:
        W = WeightMatrix(np.asarray(data["W"], dtype=np.int64))
        P = ProbMatrix(np.asarray(data["P"], dtype=np.float64))
        priors = PriorVector(np.asarray(data["priors"], dtype=np.float64))
        n = int(data.get("n", W.n))
        if not (W.n == P.n == priors.n == n) or P.probs.shape != (n, n):
            raise ValueError(f"inconsistent model dimensions (n={n})")
        return cls(W, P, priors)


def train(corpus: PatternCorpus | Iterable[Sequence[int]], n: int | None = None) -> TransitionModel:
    patterns, n = _patterns_and_n(corpus, n)
    W = build_weight_matrix(patterns, n)
    return TransitionModel(W, normalize(W), build_priors(patterns, n))
