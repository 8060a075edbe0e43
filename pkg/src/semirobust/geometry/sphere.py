"""Swap-distance estimates for any number of base utilities.

No closed form exists beyond two utilities, so the mean of the ``p``-th
smallest pair distance ``arcsin|<alpha, v_ij/|v_ij|>|`` is estimated by
sampling ``alpha`` uniformly on the sphere. The distance lies in
``[0, pi/2]``, so by Hoeffding ``m >= pi^2/(8 eps^2) ln(2/delta)`` samples
bring the estimate within ``eps`` with probability ``1 - delta``.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError, DegenerateSignatureError
from .signature import SpatialSignature


def hoeffding_samples(epsilon: float, delta: float) -> int:
    """Smallest sample count meeting the Hoeffding bound.

    >>> hoeffding_samples(0.02, 0.05)
    11378
    """
    if not (epsilon > 0 and 0 < delta < 1):
        raise ConfigError("need epsilon > 0 and 0 < delta < 1")
    return math.ceil(math.pi ** 2 / (8.0 * epsilon ** 2) * math.log(2.0 / delta))


def unit_differences(signature: SpatialSignature) -> np.ndarray:
    """Normalized ``psi_i - psi_j`` over pairs that are not tied."""
    _, v = signature.pair_differences()
    norms = np.linalg.norm(v, axis=1)
    live = norms > 0
    if not np.any(live):
        raise DegenerateSignatureError("signature fully degenerate: all points coincide",
                                       signature.tied_pairs())
    return v[live] / norms[live, None]


def _pth_distance(directions, units, p, chunk_elems=1 << 22):
    out = np.empty(directions.shape[0])
    step = max(1, chunk_elems // units.shape[0])
    for s in range(0, directions.shape[0], step):
        dots = np.abs(directions[s:s + step] @ units.T)
        d = np.arcsin(np.clip(dots, 0.0, 1.0))
        out[s:s + step] = np.partition(d, p - 1, axis=1)[:, p - 1]
    return out


def sphere_mc(signature: SpatialSignature, p: int, n_samples: int | None = None,
              epsilon: float = 0.02, delta: float = 0.05, seed: int = 0) -> tuple[float, int]:
    """Monte Carlo mean of the ``p``-th smallest pair distance.

    Returns
    -------
    estimate : float
    m : int
        Number of directions drawn; ``hoeffding_samples(epsilon, delta)``
        unless ``n_samples`` is given.
    """
    units = unit_differences(signature)
    if not 1 <= p <= units.shape[0]:
        raise ConfigError(f"p={p} outside 1..{units.shape[0]}")
    m = int(n_samples) if n_samples is not None else hoeffding_samples(epsilon, delta)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((m, signature.K))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return float(np.mean(_pth_distance(g, units, p))), m


def sphere_grid_reference(signature: SpatialSignature, p: int, n_theta: int = 600,
                          n_phi: int = 1200) -> float:
    """Dense spherical-coordinate quadrature of the same mean, for K=3.

    Midpoint rule in polar angle ``theta`` and azimuth ``phi``, weighted by
    ``sin(theta)``.
    """
    if signature.K != 3:
        raise ConfigError("the two-angle grid reference needs K=3")
    units = unit_differences(signature)
    if not 1 <= p <= units.shape[0]:
        raise ConfigError(f"p={p} outside 1..{units.shape[0]}")
    theta = (np.arange(n_theta) + 0.5) * (math.pi / n_theta)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * math.pi / n_phi)
    T, P = np.meshgrid(theta, phi, indexing="ij")
    dirs = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1)
    vals = _pth_distance(dirs.reshape(-1, 3), units, p).reshape(n_theta, n_phi)
    w = np.sin(theta)[:, None]
    return float(np.sum(vals * w) / (np.sum(w) * n_phi))
