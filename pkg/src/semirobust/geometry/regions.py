"""Counting the ranking regions cut out by the pair hyperplanes (K=2)."""

from __future__ import annotations

import math

import numpy as np

from .arcs import TWO_PI, cut_partition
from .signature import SpatialSignature

ANGLE_TOL = 1e-9


def distinct_angles(angles, tol: float = ANGLE_TOL) -> int:
    """Number of distinct angles on the circle, merging neighbours closer than ``tol``."""
    a = np.sort(np.mod(np.asarray(angles, dtype=float), TWO_PI))
    if a.size == 0:
        return 0
    gaps = np.diff(np.append(a, a[0] + TWO_PI))
    return max(1, int(np.count_nonzero(gaps > tol)))


def general_position_regions(n_pairs: int, K: int = 2) -> int:
    """Regions of ``n_pairs`` central hyperplanes in general position in ``R^K``."""
    return 2 * sum(math.comb(n_pairs - 1, k) for k in range(K))


def ranking_regions(signature: SpatialSignature, tol: float = ANGLE_TOL) -> dict:
    """Empirical region count against the general-position prediction.

    On the circle every distinct cut angle starts one region, so the two
    counts coincide.
    """
    part = cut_partition(signature)
    distinct = distinct_angles(part.cut_angles, tol)
    n_pairs = math.comb(signature.n, 2)
    return {
        "distinct_cut_count": distinct,
        "region_count": distinct,
        "general_position_prediction": general_position_regions(n_pairs, 2),
        "collinear": distinct == 2,
    }
