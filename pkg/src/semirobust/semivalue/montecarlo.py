"""Permutation-sampling estimator for semivalues of several utilities at once.

One pool of random permutations is shared by every base utility and every
weight vector. Walking a permutation trains one model per prefix, evaluates
all utilities on its predictions and records each point's marginal at its
realized coalition size. Sampling stops once the Gelman-Rubin statistic of
every (point, utility) pair falls below the threshold, or at ``max_perms``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from .exact import ScoreMatrix
from .store import MarginalStore
from .weights import SemivalueWeights


@dataclass(frozen=True)
class McConfig:
    min_perms: int = 100
    max_perms: int = 5000
    gr_threshold: float = 1.05
    gr_check_every: int = 100
    n_chains: int = 2
    trunc_tol: float = 1e-8
    trunc_window: int = 10
    truncate: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.min_perms < 1 or self.min_perms > self.max_perms:
            raise ConfigError("need 1 <= min_perms <= max_perms")
        if not self.gr_threshold > 1:
            raise ConfigError("gr_threshold must exceed 1")
        if self.n_chains < 2:
            raise ConfigError("n_chains must be >= 2")
        if self.gr_check_every < 1 or self.gr_check_every % self.n_chains:
            raise ConfigError("gr_check_every must be a positive multiple of n_chains")
        if self.trunc_window < 1 or self.trunc_tol < 0:
            raise ConfigError("trunc_window must be >= 1 and trunc_tol >= 0")


@dataclass
class McResult:
    scores: list
    store: MarginalStore
    n_permutations: int
    converged: bool
    gr_history: list = field(default_factory=list)
    truncation_points: list = field(default_factory=list)

    def by_label(self) -> dict:
        return {s.weights_label: s for s in self.scores}


def _below(prev, nxt, tol):
    # relative change, or absolute change where the reference is zero
    diff = np.abs(np.asarray(nxt, dtype=float) - prev)
    ref = np.abs(np.asarray(prev, dtype=float))
    rel = np.divide(diff, ref, out=np.array(diff, dtype=float), where=ref != 0)
    return rel < tol


def truncation_index(trace, tol: float = 1e-8, window: int = 10) -> int:
    """Prefix length after which a permutation walk may stop.

    ``trace[l - 1]`` is the utility of the first ``l`` players. With
    ``V_l = |u_{l+1} - u_l| / |u_l|`` (absolute change when ``u_l = 0``),
    returns the smallest ``j`` such that at least ``window`` of
    ``V_1, ..., V_j`` are below ``tol``, or ``len(trace)`` if none is.

    Examples
    --------
    >>> truncation_index([0.5] * 20, window=10)
    10
    """
    u = np.asarray(trace, dtype=float).reshape(-1)
    n = u.size
    hits = 0
    for l in range(1, n):
        if _below(u[l - 1], u[l], tol):
            hits += 1
            if hits >= window:
                return l
    return n


def walk_permutation(game, perm, empty_value, config: McConfig):
    """Marginals of one permutation, shape ``(n, K)``, and the cut-off ``j*``.

    The walk stops once every utility has met the truncation rule; the
    common cut-off is the largest per-utility ``j*``. Players after it get
    a zero marginal.
    """
    n = perm.size
    K = empty_value.size
    out = np.zeros((n, K))
    prev = empty_value
    hits = np.zeros(K, dtype=int)
    uprev = None
    for t in range(n):
        u = game(perm[:t + 1])
        out[t] = u - prev
        if config.truncate and uprev is not None:
            # t >= 1 here: compares u_{t+1} with u_t in 1-based prefix terms
            hits += _below(uprev, u, config.trunc_tol)
            if np.all(hits >= config.trunc_window):
                # j* = t; the player just evaluated sits at position t + 1
                out[t] = 0.0
                return out, t
        uprev = u
        prev = u
    return out, n


def mc_semivalues(game, weights, config: McConfig = McConfig(), threads: int = 1,
                  progress=None) -> McResult:
    """Estimate semivalues of every utility of ``game`` for every weight vector.

    Parameters
    ----------
    game : Game
        Returns all base utilities for a coalition in one call.
    weights : SemivalueWeights or sequence of them
    config : McConfig
    threads : int
        Permutations of a batch are walked concurrently and merged in
        permutation order, so the result does not depend on this value.
    progress : callable, optional
        Called as ``progress(n_permutations, max_R)`` after each check.
    """
    wlist = [weights] if isinstance(weights, SemivalueWeights) else list(weights)
    if not wlist:
        raise ConfigError("at least one weight vector is required")
    n = game.n_players
    for w in wlist:
        if w.n != n:
            raise ConfigError(f"weights for n={w.n} but the game has {n} players")
    rng = np.random.default_rng(config.seed)
    store = MarginalStore(n, game.utility_names, config.n_chains)
    empty = game([])
    gr_history, cutoffs = [], []
    converged = False
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while store.n_permutations < config.max_perms:
            batch = min(config.gr_check_every, config.max_perms - store.n_permutations)
            perms = [rng.permutation(n) for _ in range(batch)]
            if pool is None:
                walks = [walk_permutation(game, p, empty, config) for p in perms]
            else:
                walks = list(pool.map(lambda p: walk_permutation(game, p, empty, config), perms))
            for p, (marg, jstar) in zip(perms, walks):
                store.add_permutation(p, marg)
                cutoffs.append(int(jstar))
            m = store.n_permutations
            if m >= config.min_perms and m % config.gr_check_every == 0:
                r_max = float(np.max(store.gelman_rubin()))
                gr_history.append((m, r_max))
                if progress is not None:
                    progress(m, r_max)
                if r_max < config.gr_threshold:
                    converged = True
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    marg = store.mean_marginals()
    scores = [ScoreMatrix(np.einsum("j,ijk->ik", w.omega, marg), w.label, game.utility_names,
                          store.n_permutations) for w in wlist]
    return McResult(scores, store, store.n_permutations, converged, gr_history, cutoffs)
