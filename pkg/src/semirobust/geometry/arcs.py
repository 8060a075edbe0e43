"""Cuts, arcs and the swap distance for two base utilities.

Utility directions live on the unit circle. Points ``i`` and ``j`` swap
order where ``<alpha, psi_i - psi_j> = 0``, which happens at two antipodal
angles per pair. Sorting all cut angles splits the circle into arcs; on an
arc the ranking is fixed.

From a direction inside arc ``k`` at offset ``t`` past its starting cut,
the ``p``-th cut counter-clockwise lies at ``S+ - t`` with
``S+ = lam_k + ... + lam_{k+p-1}``, and the ``p``-th cut clockwise at
``S- + t`` with ``S- = lam_{k-1} + ... + lam_{k-p+1}``. The swap distance
``rho_p`` is the smaller of the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DegenerateSignatureError
from .signature import SpatialSignature

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ArcPartition:
    """Sorted cut angles in ``[0, 2 pi)`` with multiplicity.

    ``arc_lengths[k]`` runs from ``cut_angles[k]`` to the next cut
    counter-clockwise; coincident cuts produce zero-length arcs.
    ``cut_pairs[k]`` is the point pair behind cut ``k``.
    """

    cut_angles: np.ndarray
    arc_lengths: np.ndarray
    cut_pairs: np.ndarray
    tied_pairs: tuple = field(default=())

    @property
    def n_cuts(self) -> int:
        return self.cut_angles.size

    @property
    def n_swappable_pairs(self) -> int:
        return self.cut_angles.size // 2

    def check_p(self, p: int) -> int:
        p = int(p)
        if p < 1 or p > self.n_swappable_pairs:
            raise ConfigError(
                f"p={p} outside 1..{self.n_swappable_pairs} (number of pairs that can swap)")
        return p


def cut_angle(v) -> np.ndarray:
    """Angle in ``[0, pi)`` of the direction orthogonal to each row of ``v``."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    return np.mod(np.arctan2(v[:, 1], v[:, 0]) + 0.5 * math.pi, math.pi)


def cut_partition(signature: SpatialSignature) -> ArcPartition:
    """Build the arc structure of a two-utility signature.

    Pairs with identical embeddings never swap and produce no cut; they are
    listed in ``tied_pairs``.
    """
    if signature.K != 2:
        raise ConfigError(f"cut partition needs K=2, got K={signature.K}")
    pairs, v = signature.pair_differences()
    live = np.any(v != 0, axis=1)
    tied = tuple(tuple(int(x) for x in p) for p in pairs[~live])
    if not np.any(live):
        raise DegenerateSignatureError("signature fully degenerate: all points coincide", tied)
    base = cut_angle(v[live])
    angles = np.concatenate([base, base + math.pi])
    owners = np.concatenate([pairs[live], pairs[live]])
    order = np.argsort(angles, kind="stable")
    angles = angles[order]
    lengths = np.diff(np.append(angles, angles[0] + TWO_PI))
    for a in (angles, lengths, owners):
        a.setflags(write=False)
    return ArcPartition(angles, lengths, owners[order], tied)


def _arc_sums(lengths: np.ndarray, p: int):
    """Cyclic ``S+`` (p arcs from k on) and ``S-`` (p - 1 arcs before k) for every k."""
    L = lengths.size
    q = -(-p // L)
    csum = np.concatenate([[0.0], np.cumsum(np.tile(lengths, 2 * q + 2))])
    k = np.arange(L) + q * L
    s_plus = csum[k + p] - csum[k]
    s_minus = csum[k] - csum[k - (p - 1)]
    return s_plus, s_minus


def _locate(partition: ArcPartition, phi):
    """Arc index and offset of each angle; on-cut angles join the arc that starts there."""
    th = partition.cut_angles
    phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
    k = np.searchsorted(th, phi, side="right") - 1
    wrap = k < 0
    k = np.where(wrap, th.size - 1, k)
    t = phi - th[k] + np.where(wrap, TWO_PI, 0.0)
    return k, t


def rho_p_at(partition: ArcPartition, phi0, p: int):
    """Angular distance from ``phi0`` to the nearest direction where ``p`` pairs have swapped."""
    p = partition.check_p(p)
    s_plus, s_minus = _arc_sums(partition.arc_lengths, p)
    k, t = _locate(partition, phi0)
    rho = np.minimum(s_plus[k] - t, s_minus[k] + t)
    return float(rho) if np.ndim(rho) == 0 else rho


def expected_rho_closed_form(partition: ArcPartition, p: int) -> float:
    """Mean of ``rho_p`` over a uniform direction, integrated arc by arc.

    On arc ``k`` of length ``L`` the integrand is ``min(S+ - t, S- + t)``,
    which switches branch at ``t* = (S+ - S-) / 2``.
    """
    p = partition.check_p(p)
    L = partition.arc_lengths
    sp, sm = _arc_sums(L, p)
    ts = 0.5 * (sp - sm)
    left = ts <= 0
    right = ts >= L
    mid = ~(left | right)
    I = np.empty_like(L)
    I[left] = sp[left] * L[left] - 0.5 * L[left] ** 2
    I[right] = sm[right] * L[right] + 0.5 * L[right] ** 2
    a, b, c, ll = sm[mid], sp[mid], ts[mid], L[mid]
    I[mid] = a * c + 0.5 * c ** 2 + b * (ll - c) - 0.5 * (ll ** 2 - c ** 2)
    return float(np.sum(I) / TWO_PI)


def expected_rho_grid(partition: ArcPartition, p: int, resolution: int = 1_000_000,
                      chunk: int = 1 << 18) -> float:
    """Midpoint-rule average of ``rho_p`` over ``resolution`` equally spaced angles."""
    p = partition.check_p(p)
    G = int(resolution)
    if G < 1000:
        raise ConfigError("grid resolution must be >= 1000")
    s_plus, s_minus = _arc_sums(partition.arc_lengths, p)
    total = 0.0
    for start in range(0, G, chunk):
        g = np.arange(start, min(start + chunk, G))
        k, t = _locate(partition, (g + 0.5) * (TWO_PI / G))
        total += float(np.sum(np.minimum(s_plus[k] - t, s_minus[k] + t)))
    return total / G


def sorted_distance_grid(signature: SpatialSignature, p: int, resolution: int = 100_000) -> float:
    """Grid mean of the ``p``-th smallest pair distance ``arcsin|<alpha, v_ij/|v_ij|>|`` (K=2).

    This is the per-direction quantity the sphere sampler averages. It can
    exceed the arc-walk ``rho_p`` when the ``p`` nearest cuts lie on both
    sides of ``alpha``.
    """
    if signature.K != 2:
        raise ConfigError("sorted_distance_grid needs K=2")
    _, v = signature.pair_differences()
    norms = np.linalg.norm(v, axis=1)
    u = v[norms > 0] / norms[norms > 0, None]
    if not 1 <= p <= u.shape[0]:
        raise ConfigError(f"p={p} outside 1..{u.shape[0]}")
    G = int(resolution)
    phi = (np.arange(G) + 0.5) * (TWO_PI / G)
    total = 0.0
    step = max(1, (1 << 22) // u.shape[0])
    for s in range(0, G, step):
        a = np.stack([np.cos(phi[s:s + step]), np.sin(phi[s:s + step])], axis=1)
        d = np.arcsin(np.clip(np.abs(a @ u.T), 0.0, 1.0))
        total += float(np.sum(np.partition(d, p - 1, axis=1)[:, p - 1]))
    return total / G
