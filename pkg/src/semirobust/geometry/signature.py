"""Embedding of data points by their scores under the base utilities."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NumericError


@dataclass(frozen=True)
class SpatialSignature:
    """Row ``i`` is ``(phi(z_i; u_1), ..., phi(z_i; u_K))``.

    Since semivalues are linear in the utility, the score of point ``i``
    under ``sum_k alpha_k u_k`` is ``points[i] @ alpha``.
    """

    points: np.ndarray
    utility_names: tuple = ()
    point_ids: tuple = field(default=())

    def __post_init__(self):
        P = np.array(self.points, dtype=float)
        if P.ndim != 2:
            raise ConfigError("signature must be a 2-D array")
        n, K = P.shape
        if n < 2 or K < 2:
            raise ConfigError(f"signature needs n >= 2 points and K >= 2 utilities, got {P.shape}")
        if not np.all(np.isfinite(P)):
            raise NumericError("signature has non-finite entries")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        names = tuple(self.utility_names) or tuple(f"u{k + 1}" for k in range(K))
        if len(names) != K:
            raise ConfigError("utility_names length does not match K")
        object.__setattr__(self, "utility_names", names)
        ids = tuple(int(i) for i in self.point_ids) or tuple(range(n))
        object.__setattr__(self, "point_ids", ids)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def K(self) -> int:
        return self.points.shape[1]

    def project(self, alpha) -> np.ndarray:
        a = np.asarray(alpha, dtype=float).reshape(-1)
        if a.size != self.K:
            raise ConfigError(f"alpha has {a.size} entries, signature has K={self.K}")
        return self.points @ a

    def ranking(self, alpha) -> np.ndarray:
        """Point indices by descending projected score, ties by ascending index."""
        s = self.project(alpha)
        return np.lexsort((np.arange(self.n), -s))

    def pair_differences(self):
        """``(pairs, v)`` with ``v[t] = points[i] - points[j]`` for ``pairs[t] = (i, j)``, ``i < j``."""
        pairs = np.array(list(itertools.combinations(range(self.n), 2)), dtype=int)
        return pairs, self.points[pairs[:, 0]] - self.points[pairs[:, 1]]

    def tied_pairs(self) -> list:
        pairs, v = self.pair_differences()
        tied = np.all(v == 0, axis=1)
        return [tuple(int(x) for x in p) for p in pairs[tied]]

    def to_csv_rows(self):
        yield ["point_id", *self.utility_names]
        for pid, row in zip(self.point_ids, self.points):
            yield [pid, *(repr(float(x)) for x in row)]


def build_signature(scores) -> SpatialSignature:
    """Signature from a ScoreMatrix (or an ``(n, K)`` array)."""
    if hasattr(scores, "scores"):
        return SpatialSignature(scores.scores, scores.utility_names, scores.point_ids)
    return SpatialSignature(np.asarray(scores, dtype=float))
