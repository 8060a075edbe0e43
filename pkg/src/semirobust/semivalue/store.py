"""Running statistics of sampled marginal contributions."""

from __future__ import annotations

import hashlib

import numpy as np

from ..errors import ConfigError, NumericError
from .weights import SemivalueWeights


class MarginalStore:
    """Per-point, per-size, per-utility Welford statistics.

    One permutation adds exactly one sample for every point, at the size of
    the coalition that preceded it. All utilities are updated from the same
    permutation, so the store is aligned by construction.

    Samples are also pooled per chain (ignoring size) for the Gelman-Rubin
    diagnostic; permutation ``t`` belongs to chain ``t % n_chains``.

    Attributes
    ----------
    count : ndarray of int, shape (n, n)
        ``count[i, j - 1]`` samples of point ``i`` at coalition size ``j - 1``.
    mean, m2 : ndarray, shape (n, n, K)
    chain_count : ndarray of int, shape (C,)
    chain_mean, chain_m2 : ndarray, shape (C, n, K)
    """

    def __init__(self, n: int, utility_names, n_chains: int = 2):
        if n < 1:
            raise ConfigError("store needs n >= 1")
        if n_chains < 1:
            raise ConfigError("store needs n_chains >= 1")
        self.n = int(n)
        self.utility_names = tuple(utility_names)
        K = len(self.utility_names)
        self.n_chains = int(n_chains)
        self.count = np.zeros((n, n), dtype=np.int64)
        self.mean = np.zeros((n, n, K))
        self.m2 = np.zeros((n, n, K))
        self.chain_count = np.zeros(n_chains, dtype=np.int64)
        self.chain_mean = np.zeros((n_chains, n, K))
        self.chain_m2 = np.zeros((n_chains, n, K))
        self.n_permutations = 0
        self._digest = hashlib.sha256()
        self._points = np.arange(n)

    @property
    def n_utilities(self) -> int:
        return len(self.utility_names)

    @property
    def permutation_digest(self) -> str:
        """SHA-256 over the permutations added so far, in order."""
        return self._digest.hexdigest()

    def add_permutation(self, permutation, marginals) -> None:
        """Record one permutation.

        Parameters
        ----------
        permutation : array of int, shape (n,)
            Player order.
        marginals : ndarray, shape (n, K)
            ``marginals[t]`` is the contribution of ``permutation[t]`` when
            it joined the first ``t`` players.
        """
        perm = np.asarray(permutation, dtype=np.int64)
        x = np.asarray(marginals, dtype=float)
        if perm.shape != (self.n,) or x.shape != (self.n, self.n_utilities):
            raise ConfigError("permutation or marginal block has the wrong shape")
        sizes = np.arange(self.n)
        self.count[perm, sizes] += 1
        c = self.count[perm, sizes][:, None]
        delta = x - self.mean[perm, sizes]
        self.mean[perm, sizes] += delta / c
        self.m2[perm, sizes] += delta * (x - self.mean[perm, sizes])

        ch = self.n_permutations % self.n_chains
        self.chain_count[ch] += 1
        # reorder to point order for the size-agnostic chain statistics
        xp = np.empty_like(x)
        xp[perm] = x
        d = xp - self.chain_mean[ch]
        self.chain_mean[ch] += d / self.chain_count[ch]
        self.chain_m2[ch] += d * (xp - self.chain_mean[ch])

        self.n_permutations += 1
        self._digest.update(perm.tobytes())

    def variance(self) -> np.ndarray:
        """Sample variance per (point, size, utility); NaN where count < 2."""
        c = self.count[:, :, None].astype(float)
        out = np.full_like(self.m2, np.nan)
        np.divide(self.m2, c - 1, out=out, where=c > 1)
        return out

    def mean_marginals(self) -> np.ndarray:
        """Per-size means ``Delta_hat``, shape ``(n, n, K)``.

        A size with no samples for a point borrows the mean of the nearest
        sampled size (the smaller one on a tie).
        """
        out = self.mean.copy()
        for i in range(self.n):
            sampled = np.flatnonzero(self.count[i] > 0)
            if sampled.size == 0:
                raise NumericError(f"point {i} has no samples")
            if sampled.size == self.n:
                continue
            for j in np.flatnonzero(self.count[i] == 0):
                near = sampled[np.argmin(np.abs(sampled - j))]
                out[i, j] = self.mean[i, near]
        return out

    def scores(self, weights: SemivalueWeights) -> np.ndarray:
        if weights.n != self.n:
            raise ConfigError(f"weights are for n={weights.n}, store for n={self.n}")
        return np.einsum("j,ijk->ik", weights.omega, self.mean_marginals())

    def gelman_rubin(self) -> np.ndarray:
        """Potential scale reduction per (point, utility), shape ``(n, K)``."""
        s = int(self.chain_count.min())
        if self.n_chains < 2 or s < 2 or np.any(self.chain_count != s):
            raise NumericError("Gelman-Rubin needs >= 2 chains of equal length >= 2")
        C = self.n_chains
        W = np.mean(self.chain_m2 / (s - 1), axis=0)
        grand = self.chain_mean.mean(axis=0)
        B = s / (C - 1) * np.sum((self.chain_mean - grand) ** 2, axis=0)
        return _psrf(W, B, s)

    @classmethod
    def from_means(cls, means, utility_names=None, count: int = 1) -> "MarginalStore":
        """A store whose per-size means are given, e.g. for synthetic diagnostics."""
        m = np.asarray(means, dtype=float)
        if m.ndim == 2:
            m = m[:, :, None]
        n, n2, K = m.shape
        if n != n2:
            raise ConfigError("means must have shape (n, n, K)")
        store = cls(n, utility_names or [f"u{k + 1}" for k in range(K)])
        store.mean[:] = m
        store.count[:] = count
        return store

    def to_dict(self) -> dict:
        return {
            "n_points": self.n,
            "utilities": list(self.utility_names),
            "n_permutations": self.n_permutations,
            "n_chains": self.n_chains,
            "permutation_digest": self.permutation_digest,
            "count": self.count.tolist(),
            "mean": self.mean.tolist(),
            "m2": self.m2.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MarginalStore":
        store = cls(int(d["n_points"]), d["utilities"], int(d.get("n_chains", 2)))
        store.count[:] = np.asarray(d["count"], dtype=np.int64)
        store.mean[:] = np.asarray(d["mean"], dtype=float)
        store.m2[:] = np.asarray(d["m2"], dtype=float)
        store.n_permutations = int(d.get("n_permutations", 0))
        return store


def _psrf(W, B, s):
    W = np.asarray(W, dtype=float)
    B = np.asarray(B, dtype=float)
    R = np.empty(np.broadcast(W, B).shape)
    R[...] = np.inf
    pos = W > 0
    Wb, Bb = np.broadcast_arrays(W, B)
    R[pos] = np.sqrt((s - 1) / s + Bb[pos] / (Wb[pos] * s))
    R[(~pos) & (Bb == 0)] = 1.0
    return R


def gelman_rubin(chains) -> float:
    """Potential scale reduction factor of equal-length chains.

    ``R = sqrt((s - 1)/s + B/(W s))`` with ``W`` the mean within-chain
    sample variance and ``B = s/(C - 1) * sum_c (mean_c - grand mean)^2``.
    Returns 1.0 when every chain is constant at the same value and
    ``inf`` when chains are constant at different values.

    Examples
    --------
    >>> round(gelman_rubin([[0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]]), 3)
    inf
    """
    arr = np.asarray(chains, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] < 2:
        raise ConfigError("need >= 2 chains of equal length >= 2")
    C, s = arr.shape
    W = np.mean(np.var(arr, axis=1, ddof=1))
    B = s / (C - 1) * np.sum((arr.mean(axis=1) - arr.mean()) ** 2)
    return float(_psrf(W, B, s))
