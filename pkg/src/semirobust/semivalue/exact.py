"""Semivalues by full enumeration of coalitions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NumericError
from .weights import SemivalueWeights

DEFAULT_EXACT_CAP = 20


@dataclass(frozen=True)
class ScoreMatrix:
    """Semivalue scores, one row per point and one column per base utility.

    ``n_permutations`` is ``None`` for exact scores.
    """

    scores: np.ndarray
    weights_label: str
    utility_names: tuple
    n_permutations: int | None = None
    point_ids: tuple = field(default=())

    def __post_init__(self):
        s = np.array(self.scores, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if not np.all(np.isfinite(s)):
            raise NumericError(f"non-finite {self.weights_label} scores")
        if s.shape[1] != len(self.utility_names):
            raise ConfigError("score columns and utility names disagree")
        s.setflags(write=False)
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "utility_names", tuple(self.utility_names))
        ids = tuple(int(i) for i in self.point_ids) or tuple(range(s.shape[0]))
        if len(ids) != s.shape[0]:
            raise ConfigError("point_ids length does not match the number of rows")
        object.__setattr__(self, "point_ids", ids)

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    def column(self, name_or_index) -> np.ndarray:
        k = name_or_index if isinstance(name_or_index, int) else \
            self.utility_names.index(name_or_index)
        return self.scores[:, k]


def exact_marginals(game, cap: int = DEFAULT_EXACT_CAP) -> np.ndarray:
    """Average marginal contributions by size, shape ``(n, n, K)``.

    Entry ``[i, j - 1, k]`` averages ``u_k(S + i) - u_k(S)`` over all
    ``C(n - 1, j - 1)`` coalitions ``S`` of size ``j - 1`` without ``i``.
    Each coalition is evaluated once.
    """
    n = game.n_players
    if n > cap:
        raise ConfigError(f"exact enumeration is capped at n={cap}, got n={n}")
    table = np.asarray(game.table(), dtype=float)
    if table.ndim == 1:
        table = table[:, None]
    masks = np.arange(1 << n)
    size = np.zeros(1 << n, dtype=int)
    for b in range(n):
        size += (masks >> b) & 1
    counts = np.array([math.comb(n - 1, s) for s in range(n)], dtype=float)
    K = table.shape[1]
    out = np.empty((n, n, K))
    for i in range(n):
        without = masks[(masks >> i) & 1 == 0]
        diff = table[without | (1 << i)] - table[without]
        s = size[without]
        for k in range(K):
            out[i, :, k] = np.bincount(s, weights=diff[:, k], minlength=n) / counts
    return out


def scores_from_marginals(marginals: np.ndarray, weights: SemivalueWeights) -> np.ndarray:
    """``phi_ik = sum_j omega_j * Delta_j(i; u_k)``."""
    if weights.n != marginals.shape[1]:
        raise ConfigError(f"weights are for n={weights.n}, marginals for n={marginals.shape[1]}")
    return np.einsum("j,ijk->ik", weights.omega, marginals)


def exact_semivalues(game, weights, cap: int = DEFAULT_EXACT_CAP):
    """Exact scores for one weight vector or a list of them.

    Returns a :class:`ScoreMatrix`, or a list in the order of ``weights``.
    """
    single = isinstance(weights, SemivalueWeights)
    wlist = [weights] if single else list(weights)
    marg = exact_marginals(game, cap)
    out = [ScoreMatrix(scores_from_marginals(marg, w), w.label, game.utility_names)
           for w in wlist]
    return out[0] if single else out
