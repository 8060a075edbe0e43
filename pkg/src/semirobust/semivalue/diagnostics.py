"""How much of the correlation between two score vectors is explained size by size.

With ``M_a[i, j] = Delta_j(i; u_a)`` the per-size mean marginals, the scores
are ``phi_a = M_a @ omega``. Writing ``Sigma_jk = Cov_i(M_a[:, j], M_b[:, k])``
(population moments over points), the covariance of the scores is
``omega^T Sigma omega``. Dropping the off-diagonal terms leaves
``sum_j omega_j^2 r_j`` with ``r_j = Sigma_jj``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, NumericError
from .store import MarginalStore
from .weights import SemivalueWeights


@dataclass(frozen=True)
class AlignmentReport:
    r: np.ndarray
    corr: float
    corr_diag: float
    epsilon: float
    delta: float
    cross_cov: np.ndarray

    def to_dict(self) -> dict:
        return {"r_j": self.r.tolist(), "corr": self.corr, "corr_diag": self.corr_diag,
                "epsilon_hat": self.epsilon, "delta_hat": self.delta}


def _utility_index(names, u):
    if isinstance(u, (int, np.integer)):
        return int(u)
    try:
        return list(names).index(u)
    except ValueError:
        raise ConfigError(f"unknown utility {u!r}") from None


def alignment_factors(store, a, b, weights: SemivalueWeights) -> AlignmentReport:
    """Size-wise alignment of utilities ``a`` and ``b`` under ``weights``.

    Parameters
    ----------
    store : MarginalStore or ndarray of shape (n, n, K)
    a, b : int or str
        Utility index or name.
    weights : SemivalueWeights

    Returns
    -------
    AlignmentReport
        ``r`` (the diagonal of the cross-size covariance), the Pearson
        correlation of the two score vectors, its diagonal-only
        approximation, ``epsilon`` (largest row ratio of off-diagonal mass to
        the diagonal entry, over rows with a nonzero diagonal) and
        ``delta = |corr - corr_diag| / |corr|``.
    """
    if isinstance(store, MarginalStore):
        marg, names = store.mean_marginals(), store.utility_names
    else:
        marg = np.asarray(store, dtype=float)
        names = [f"u{k + 1}" for k in range(marg.shape[2])]
    ia, ib = _utility_index(names, a), _utility_index(names, b)
    n = marg.shape[0]
    if n < 2:
        raise ConfigError("need at least two points")
    if weights.n != marg.shape[1]:
        raise ConfigError("weights and store sizes differ")
    Ma = marg[:, :, ia] - marg[:, :, ia].mean(axis=0)
    Mb = marg[:, :, ib] - marg[:, :, ib].mean(axis=0)
    sigma = Ma.T @ Mb / n
    w = weights.omega
    phi_a, phi_b = Ma @ w, Mb @ w
    var_a, var_b = float(phi_a @ phi_a) / n, float(phi_b @ phi_b) / n
    if var_a == 0 or var_b == 0:
        raise NumericError("a score vector has zero variance; correlation undefined")
    corr = float(phi_a @ phi_b) / n / np.sqrt(var_a * var_b)
    w2 = w ** 2
    va = np.sum(Ma ** 2, axis=0) / n
    vb = np.sum(Mb ** 2, axis=0) / n
    den = np.sqrt(float(w2 @ va) * float(w2 @ vb))
    r = np.diag(sigma).copy()
    corr_diag = float(w2 @ r) / den if den > 0 else float("nan")
    diag_abs = np.abs(r)
    off = np.sum(np.abs(sigma), axis=1) - diag_abs
    rows = diag_abs > 0
    epsilon = float(np.max(off[rows] / diag_abs[rows])) if np.any(rows) else float("inf")
    delta = abs(corr - corr_diag) / abs(corr) if corr != 0 else float("inf")
    return AlignmentReport(r, corr, corr_diag, epsilon, delta, sigma)
