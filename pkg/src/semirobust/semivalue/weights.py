"""Semivalue weight vectors over coalition sizes.

``omega[j - 1]`` is the weight given to the average marginal contribution
to coalitions of size ``j - 1`` (that is, of the point entering as the
``j``-th member). All three families sum to one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


class WeightKind(str, enum.Enum):
    SHAPLEY = "shapley"
    BANZHAF = "banzhaf"
    BETA = "beta"


@dataclass(frozen=True)
class SemivalueWeights:
    kind: WeightKind
    omega: np.ndarray
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "kind", WeightKind(self.kind))

    @property
    def n(self) -> int:
        return self.omega.size

    @property
    def label(self) -> str:
        if self.kind is WeightKind.BETA:
            return f"beta({self.alpha:g},{self.beta:g})"
        return self.kind.value


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def make_weights(kind, n: int, alpha: float | None = None, beta: float | None = None
                 ) -> SemivalueWeights:
    """Build the weight vector of a semivalue over ``n`` players.

    Parameters
    ----------
    kind : {"shapley", "banzhaf", "beta"}
    n : int
    alpha, beta : float
        Beta parameters; ``beta(1, 1)`` is Shapley and ``beta(4, 1)``
        favours small coalitions.

    Notes
    -----
    Banzhaf and Beta weights are evaluated in log space, which keeps them
    accurate for large ``n`` where the binomial coefficients overflow.
    """
    kind = WeightKind(kind)
    n = int(n)
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    j = np.arange(1, n + 1)
    if kind is WeightKind.SHAPLEY:
        return SemivalueWeights(kind, np.full(n, 1.0 / n))
    if kind is WeightKind.BANZHAF:
        logs = [_log_comb(n - 1, jj - 1) - (n - 1) * math.log(2.0) for jj in j]
        return SemivalueWeights(kind, np.exp(logs))
    if alpha is None or beta is None or not (alpha > 0 and beta > 0):
        raise ConfigError(f"beta weights need alpha > 0 and beta > 0, got ({alpha}, {beta})")
    lb = _log_beta(alpha, beta)
    logs = [_log_comb(n - 1, jj - 1) + _log_beta(jj + beta - 1, n - jj + alpha) - lb for jj in j]
    return SemivalueWeights(kind, np.exp(logs), float(alpha), float(beta))


def parse_weight_spec(spec) -> tuple:
    """Turn ``"shapley"``, ``"banzhaf"``, ``"beta(4,1)"`` or a dict into ``(kind, alpha, beta)``."""
    if isinstance(spec, dict):
        kind = WeightKind(spec.get("kind", "")) if spec.get("kind") in {k.value for k in WeightKind} \
            else None
        if kind is None:
            raise ConfigError(f"unknown semivalue kind in {spec!r}")
        if kind is WeightKind.BETA:
            if "alpha" not in spec or "beta" not in spec:
                raise ConfigError("beta semivalue needs alpha and beta")
            return kind, float(spec["alpha"]), float(spec["beta"])
        return kind, None, None
    s = str(spec).strip().lower().replace(" ", "")
    if s in ("shapley", "banzhaf"):
        return WeightKind(s), None, None
    if s.startswith("beta(") and s.endswith(")"):
        try:
            a, b = (float(t) for t in s[5:-1].split(","))
        except ValueError:
            raise ConfigError(f"cannot parse semivalue {spec!r}") from None
        if not (a > 0 and b > 0):
            raise ConfigError(f"beta parameters must be positive in {spec!r}")
        return WeightKind.BETA, a, b
    raise ConfigError(f"unknown semivalue {spec!r}")


def weights_from_spec(spec, n: int) -> SemivalueWeights:
    kind, a, b = parse_weight_spec(spec)
    return make_weights(kind, n, a, b)
