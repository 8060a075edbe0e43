"""The normalized robustness score ``R_p = E[rho_p] / (pi/4)``."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass, field

from ..errors import ConfigError
from .arcs import cut_partition, expected_rho_closed_form, expected_rho_grid, sorted_distance_grid
from .signature import SpatialSignature
from .sphere import sphere_mc

QUARTER_PI = math.pi / 4.0


class RhoMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    GRID = "grid"
    SPHERE_MC = "sphere_mc"


@dataclass(frozen=True)
class RobustnessReport:
    """Result of one ``R_p`` evaluation.

    ``r_p`` is not clipped: for ``p > 1`` spread-out cuts can push
    ``E[rho_p]`` above ``pi/4``. ``sorted_distance`` (K=2 only) is the mean
    of the ``p``-th smallest pair distance, the quantity the sphere sampler
    estimates.
    """

    p: int
    expected_rho: float
    r_p: float
    method: RhoMethod
    mc_samples: int | None = None
    epsilon: float | None = None
    delta: float | None = None
    grid_resolution: int | None = None
    sorted_distance: float | None = None
    tied_pairs: tuple = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        d["tied_pairs"] = [list(t) for t in self.tied_pairs]
        return {k: v for k, v in d.items() if v is not None}


def robustness_rp(signature: SpatialSignature, p: int, method="closed_form", *,
                  grid_resolution: int = 1_000_000, epsilon: float = 0.02, delta: float = 0.05,
                  n_samples: int | None = None, seed: int = 0,
                  sorted_resolution: int | None = None) -> RobustnessReport:
    """Compute ``E[rho_p]`` with the chosen method and normalize it.

    Parameters
    ----------
    signature : SpatialSignature
    p : int
        Number of pairwise swaps.
    method : {"closed_form", "grid", "sphere_mc"}
        The first two need K=2.
    sorted_resolution : int, optional
        For K=2, also report the grid mean of the ``p``-th smallest pair
        distance at this resolution.
    """
    method = RhoMethod(method)
    tied = tuple(signature.tied_pairs())
    if tied:
        warnings.warn(f"{len(tied)} tied point pairs can never swap: {list(tied)[:10]}",
                      RuntimeWarning, stacklevel=2)
    extra = {}
    if method is RhoMethod.SPHERE_MC:
        value, m = sphere_mc(signature, p, n_samples, epsilon, delta, seed)
        extra = {"mc_samples": m, "epsilon": epsilon if n_samples is None else None,
                 "delta": delta if n_samples is None else None}
    else:
        if signature.K != 2:
            raise ConfigError(f"method {method.value} needs K=2; use sphere_mc for K={signature.K}")
        part = cut_partition(signature)
        if method is RhoMethod.CLOSED_FORM:
            value = expected_rho_closed_form(part, p)
        else:
            value = expected_rho_grid(part, p, grid_resolution)
            extra = {"grid_resolution": int(grid_resolution)}
    if sorted_resolution and signature.K == 2:
        extra["sorted_distance"] = sorted_distance_grid(signature, p, sorted_resolution)
    return RobustnessReport(int(p), value, value / QUARTER_PI, method, tied_pairs=tied, **extra)
