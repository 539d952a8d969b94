"""Naive Bayes next-activity recommendation.

Candidates are scored in log2 space::

    R_k = log2 prior[k] + sum_i alpha_i * log2 P[h_i, k]

where the most recent history entry has weight 1 and every older one half
the weight of its successor.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from footfall.transition import TransitionModel

# scores closer than this (in bits) count as tied; lowest index wins
TIE_TOLERANCE = 1e-9


def recency_weights(n: int, ratio: float = 2.0) -> np.ndarray:
    """Weights for a history of length ``n``, oldest first, newest = 1."""
    if ratio <= 0:
        raise ValueError(f"ratio must be positive, got {ratio}")
    return ratio ** -np.arange(n - 1, -1, -1, dtype=np.float64)


def _check_history(model: TransitionModel, history: Sequence[int]) -> np.ndarray:
    h = np.asarray(history, dtype=np.int64).reshape(-1)
    if h.size and (h.min() < 0 or h.max() >= model.n):
        bad = next(int(a) for a in h if not 0 <= a < model.n)
        raise ValueError(f"activity id {bad} out of range [0, {model.n})")
    return h


def score(model: TransitionModel, history: Sequence[int], ratio: float = 2.0) -> np.ndarray:
    """Log2 score of every candidate next activity.

    ``ratio=1`` gives the unweighted Naive Bayes product.
    """
    h = _check_history(model, history)
    scores = model.log_priors.copy()
    if h.size:
        scores += recency_weights(h.size, ratio) @ model.log_P[h]
    return scores


def _argmax(scores: np.ndarray) -> int:
    best = scores.max()
    return int(np.flatnonzero(scores >= best - TIE_TOLERANCE)[0])


def recommend(model: TransitionModel, history: Sequence[int], ratio: float = 2.0,
              exclude_visited: bool = False) -> int:
    s = score(model, history, ratio)
    if exclude_visited and len(history):
        s = s.copy()
        s[np.asarray(history, dtype=np.int64)] = -np.inf
        if np.isneginf(s).all():
            raise ValueError("every activity is already in the history")
    return _argmax(s)


def reconstruct(model: TransitionModel, history: Sequence[int], cut: int, window: int,
                ratio: float = 2.0, exclude_visited: bool = False) -> list[int]:
    """Recommend ``cut`` visits in a row.

    Each recommendation is appended to the running history, and every step
    conditions on the last ``window`` entries of it.
    """
    if cut < 1:
        raise ValueError(f"cut must be >= 1, got {cut}")
    if window < 0:
        raise ValueError(f"window must be >= 0, got {window}")
    running = list(history)
    out = []
    for _ in range(cut):
        context = running[-window:] if window else []
        nxt = recommend(model, context, ratio, exclude_visited)
        out.append(nxt)
        running.append(nxt)
    return out


def _one_based(original: Sequence[int], recommended: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    if len(original) != len(recommended):
        raise ValueError(f"length mismatch: {len(original)} original vs {len(recommended)} recommended")
    if len(original) == 0:
        raise ValueError("cannot evaluate empty sequences")
    a = np.asarray(original, dtype=np.float64) + 1.0
    b = np.asarray(recommended, dtype=np.float64) + 1.0
    if a.min() < 1 or b.min() < 1:
        raise ValueError("activity ids must be non-negative")
    return a, b


def evaluate(original: Sequence[int], recommended: Sequence[int]) -> float:
    """sum(a*b) / sum(min(a, b)**2) over 1-based activity indices.

    Always >= 1, equal to 1 for a perfect reconstruction.
    """
    a, b = _one_based(original, recommended)
    return float((a * b).sum() / (np.minimum(a, b) ** 2).sum())


def evaluate_bounded(original: Sequence[int], recommended: Sequence[int]) -> float:
    """Reciprocal of :func:`evaluate`, in (0, 1]."""
    a, b = _one_based(original, recommended)
    return float((np.minimum(a, b) ** 2).sum() / (a * b).sum())


def exact_match_rate(original: Sequence[int], recommended: Sequence[int]) -> float:
    _one_based(original, recommended)
    return float(np.mean(np.asarray(original) == np.asarray(recommended)))
