"""Agreement between two score vectors over the same points."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError


def _pair(x, y):
    a = np.asarray(x, dtype=float).reshape(-1)
    b = np.asarray(y, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise ConfigError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise ConfigError("need at least two items")
    return a, b


def _tie_pairs(v):
    _, counts = np.unique(v, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def kendall_tau_b(x, y) -> float:
    """Tie-corrected Kendall rank correlation.

    ``tau_b = (c - d) / sqrt((N - t_x)(N - t_y))`` with ``N = C(n, 2)`` and
    ``t_x``, ``t_y`` the numbers of pairs tied in each input.
    """
    a, b = _pair(x, y)
    iu = np.triu_indices(a.size, 1)
    s = np.sign((a[:, None] - a[None, :])[iu]) * np.sign((b[:, None] - b[None, :])[iu])
    N = math.comb(a.size, 2)
    den = math.sqrt((N - _tie_pairs(a)) * (N - _tie_pairs(b)))
    if den == 0:
        raise NumericError("kendall tau undefined for a constant vector")
    return float(np.sum(s) / den)


def rankdata(v) -> np.ndarray:
    """1-based ranks with ties given their average rank."""
    v = np.asarray(v, dtype=float).reshape(-1)
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    ranks = np.empty(v.size)
    start = 0
    for end in range(1, v.size + 1):
        if end == v.size or sv[end] != sv[start]:
            ranks[order[start:end]] = 0.5 * (start + end - 1) + 1.0
            start = end
    return ranks


def pearson(x, y) -> float:
    """Pearson correlation with population (1/n) moments."""
    a, b = _pair(x, y)
    da, db = a - a.mean(), b - b.mean()
    va, vb = float(da @ da), float(db @ db)
    if va == 0 or vb == 0:
        raise NumericError("correlation undefined for a constant vector")
    return float(np.clip((da @ db) / math.sqrt(va * vb), -1.0, 1.0))


def spearman(x, y) -> float:
    """Pearson correlation of mid-ranks."""
    a, b = _pair(x, y)
    return pearson(rankdata(a), rankdata(b))


def top_k(scores, k: int) -> np.ndarray:
    """Indices of the ``k`` highest scores; equal scores go to the lower index."""
    s = np.asarray(scores, dtype=float).reshape(-1)
    return np.lexsort((np.arange(s.size), -s))[:k]


def top_k_stability(x, y, k: int) -> dict:
    """``overlap = |A n B| / k`` and ``jaccard = |A n B| / (2k - |A n B|)`` of top-k sets."""
    a, b = _pair(x, y)
    if not 1 <= k <= a.size:
        raise ConfigError(f"k={k} outside 1..{a.size}")
    inter = np.intersect1d(top_k(a, k), top_k(b, k)).size
    return {"overlap": inter / k, "jaccard": inter / (2 * k - inter)}


@dataclass(frozen=True)
class RankingComparison:
    kendall_tau_b: float
    spearman: float
    pearson: float
    n: int
    ties_x: int
    ties_y: int


def compare(x, y) -> RankingComparison:
    a, b = _pair(x, y)
    return RankingComparison(kendall_tau_b(a, b), spearman(a, b), pearson(a, b), a.size,
                             _tie_pairs(a), _tie_pairs(b))
