import math

import numpy as np
import pytest

from semirobust.errors import ConfigError, DegenerateSignatureError
from semirobust.geometry import (SpatialSignature, cut_partition, expected_rho_closed_form,
                                 hoeffding_samples, sorted_distance_grid, sphere_grid_reference,
                                 sphere_mc, unit_differences)


def test_hoeffding_count():
    assert hoeffding_samples(0.02, 0.05) == 11378
    # exact bound before rounding up
    assert hoeffding_samples(0.1, 0.1) == math.ceil(math.pi ** 2 / 0.08 * math.log(20))
    with pytest.raises(ConfigError):
        hoeffding_samples(0, 0.05)


def test_unit_differences_skip_ties():
    sig = SpatialSignature([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 3.0, 4.0]])
    u = unit_differences(sig)
    assert u.shape == (2, 3)
    np.testing.assert_allclose(np.linalg.norm(u, axis=1), 1.0)
    with pytest.raises(DegenerateSignatureError):
        unit_differences(SpatialSignature([[1.0, 1.0, 1.0]] * 2))


@pytest.mark.parametrize("seed", range(3))
def test_k2_p1_matches_closed_form(seed):
    sig = SpatialSignature(np.random.default_rng(seed).normal(size=(6, 2)))
    est, m = sphere_mc(sig, 1, seed=seed)
    assert m == 11378
    assert est == pytest.approx(expected_rho_closed_form(cut_partition(sig), 1), abs=0.02)


def test_k2_higher_p_matches_sorted_grid():
    sig = SpatialSignature(np.random.default_rng(5).normal(size=(6, 2)))
    est, _ = sphere_mc(sig, 4, seed=1)
    assert est == pytest.approx(sorted_distance_grid(sig, 4, 100_000), abs=0.02)


def test_k3_grid_reference_single_pair():
    # one pair along e3: distance arcsin|cos theta| has mean 1 - pi/2 + ... computed as
    # integral over the sphere of (pi/2 - theta) for theta < pi/2, which is pi/2 - 1
    sig = SpatialSignature([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    assert sphere_grid_reference(sig, 1, 2000, 8) == pytest.approx(math.pi / 2 - 1, abs=1e-6)
    est, _ = sphere_mc(sig, 1, seed=3)
    assert est == pytest.approx(math.pi / 2 - 1, abs=0.02)


def test_scale_and_rotation_invariance():
    rng = np.random.default_rng(8)
    P = rng.normal(size=(5, 3))
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    a = sphere_grid_reference(SpatialSignature(P), 2, 200, 400)
    b = sphere_grid_reference(SpatialSignature(7.5 * P @ Q.T), 2, 200, 400)
    assert a == pytest.approx(b, abs=5e-4)


def test_deterministic_seed():
    sig = SpatialSignature(np.random.default_rng(0).normal(size=(5, 3)))
    assert sphere_mc(sig, 2, seed=4) == sphere_mc(sig, 2, seed=4)
    assert sphere_mc(sig, 2, n_samples=500, seed=4)[1] == 500


def test_p_range():
    sig = SpatialSignature(np.random.default_rng(0).normal(size=(3, 3)))
    with pytest.raises(ConfigError):
        sphere_mc(sig, 4)
