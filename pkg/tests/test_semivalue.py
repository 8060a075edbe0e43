import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semirobust.errors import ConfigError, NumericError
from semirobust.semivalue import (AdditiveGame, FunctionGame, MarginalStore, McConfig,
                                  SaturatingGame, TableGame, alignment_factors, exact_semivalues,
                                  gelman_rubin, make_weights, mc_semivalues, truncation_index,
                                  weights_from_spec)


def brute_semivalue(n, u, omega):
    """Direct subset-sum definition, independent of the bitmask implementation."""
    phi = np.zeros(n)
    for i in range(n):
        others = [k for k in range(n) if k != i]
        for j in range(1, n + 1):
            subs = list(itertools.combinations(others, j - 1))
            phi[i] += omega[j - 1] * sum(u(set(s) | {i}) - u(set(s)) for s in subs) / len(subs)
    return phi


def random_monotone_table(n, rng):
    """u(S) = max over members of a random level plus a small additive part; u(empty)=0."""
    level = rng.uniform(0, 1, n)
    add = rng.uniform(0, 0.2, n)
    t = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        t[mask] = level[members].max() + add[members].sum()
    return t


class TestWeights:
    def test_shapley(self):
        np.testing.assert_allclose(make_weights("shapley", 3).omega, [1 / 3] * 3)

    def test_banzhaf(self):
        np.testing.assert_allclose(make_weights("banzhaf", 3).omega, [0.25, 0.5, 0.25], rtol=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 7, 30, 64])
    def test_beta11_is_shapley(self, n):
        np.testing.assert_allclose(make_weights("beta", n, 1, 1).omega, 1 / n, atol=1e-12)

    def test_beta41_exact_rational(self):
        # omega_j = C(n-1, j-1) B(j, n-j+4) / B(4, 1) with B(4,1) = 1/4
        n = 6
        def B(a, b):
            return Fraction(math.factorial(a - 1) * math.factorial(b - 1), math.factorial(a + b - 1))
        want = [math.comb(n - 1, j - 1) * B(j, n - j + 4) / B(4, 1) for j in range(1, n + 1)]
        assert sum(want) == 1
        np.testing.assert_allclose(make_weights("beta", n, 4, 1).omega, [float(w) for w in want],
                                   rtol=1e-12)

    def test_beta41_favours_small_coalitions(self):
        w = make_weights("beta", 10, 4, 1).omega
        assert np.all(np.diff(w) < 0)

    @pytest.mark.parametrize("spec", ["shapley", "banzhaf", "beta(4,1)", "beta(1,1)",
                                      "beta(0.5,2)", "beta(16,1)"])
    @pytest.mark.parametrize("n", [2, 5, 20, 64, 200])
    def test_normalised_and_nonnegative(self, spec, n):
        w = weights_from_spec(spec, n).omega
        assert abs(w.sum() - 1) < 1e-12
        assert np.all(w >= 0)

    @pytest.mark.parametrize("a, b", [(0, 1), (1, -1), (None, 1)])
    def test_bad_beta(self, a, b):
        with pytest.raises(ConfigError):
            make_weights("beta", 4, a, b)

    def test_bad_spec(self):
        with pytest.raises(ConfigError):
            weights_from_spec("owen", 3)

    def test_labels(self):
        assert weights_from_spec("beta(4,1)", 3).label == "beta(4,1)"
        assert weights_from_spec({"kind": "beta", "alpha": 4, "beta": 1}, 3).label == "beta(4,1)"


class TestExact:
    @pytest.mark.parametrize("spec", ["shapley", "banzhaf", "beta(4,1)"])
    def test_additive_game_recovers_values(self, spec):
        g = AdditiveGame([1.0, 2.0, 3.0])
        s = exact_semivalues(g, weights_from_spec(spec, 3))
        np.testing.assert_allclose(s.scores[:, 0], [1, 2, 3], atol=1e-12)

    def test_majority_game_against_permutations(self):
        def u(S):
            return float(len(S) >= 2)
        # Shapley by enumerating all 6 orders
        ref = np.zeros(3)
        for order in itertools.permutations(range(3)):
            for pos, i in enumerate(order):
                ref[i] += u(set(order[:pos + 1])) - u(set(order[:pos]))
        ref /= 6
        g = FunctionGame(3, lambda idx: [u(set(idx))], ["maj"])
        np.testing.assert_allclose(exact_semivalues(g, make_weights("shapley", 3)).scores[:, 0], ref)
        np.testing.assert_allclose(ref, 1 / 3)

    def test_cardinality_game(self):
        g = FunctionGame(5, lambda idx: [float(len(idx))], ["size"])
        for spec in ["shapley", "banzhaf", "beta(4,1)"]:
            np.testing.assert_allclose(exact_semivalues(g, weights_from_spec(spec, 5)).scores, 1.0,
                                       atol=1e-12)

    @pytest.mark.parametrize("spec", ["shapley", "banzhaf", "beta(4,1)", "beta(2,3)"])
    def test_matches_direct_definition(self, spec, rng):
        n = 5
        t = random_monotone_table(n, rng)
        w = weights_from_spec(spec, n)
        got = exact_semivalues(TableGame(t), w).scores[:, 0]
        ref = brute_semivalue(n, lambda S: t[sum(1 << i for i in S)], w.omega)
        np.testing.assert_allclose(got, ref, atol=1e-13)

    def test_each_coalition_evaluated_once(self):
        g = FunctionGame(6, lambda idx: [float(np.sum(idx))], ["s"])
        exact_semivalues(g, [make_weights("shapley", 6), make_weights("banzhaf", 6)])
        assert g.n_evaluations == 2 ** 6

    def test_cap(self):
        with pytest.raises(ConfigError):
            exact_semivalues(AdditiveGame(np.ones(6)), make_weights("shapley", 6), cap=5)

    def test_shapley_efficiency_random(self, rng):
        t = random_monotone_table(7, rng)
        phi = exact_semivalues(TableGame(t), make_weights("shapley", 7)).scores[:, 0]
        assert abs(phi.sum() - (t[-1] - t[0])) < 1e-12


class TestGelmanRubin:
    def test_hand_example(self):
        # means 0 and 1, sample variances 1 and 1 (s = 4)
        a = np.array([-1, 1, -1, 1]) * math.sqrt(3) / 2
        chains = [a, a + 1]
        assert np.var(a, ddof=1) == pytest.approx(1.0)
        assert gelman_rubin(chains) == pytest.approx(math.sqrt(1.25), abs=1e-12)

    def test_identical_chains(self):
        c = [0.3, 1.2, -0.5, 2.0, 0.1]
        assert gelman_rubin([c, c]) == pytest.approx(math.sqrt(4 / 5))

    def test_constant_chains(self):
        assert gelman_rubin([[2.0] * 4, [2.0] * 4]) == 1.0
        assert gelman_rubin([[2.0] * 4, [3.0] * 4]) == math.inf

    def test_bad_input(self):
        with pytest.raises(ConfigError):
            gelman_rubin([[1.0, 2.0]])

    def test_store_chains_match_scalar_formula(self, rng):
        n, K, C = 4, 2, 3
        store = MarginalStore(n, ["a", "b"], n_chains=C)
        samples = []
        for _ in range(3 * 7):
            perm = rng.permutation(n)
            x = rng.normal(size=(n, K))
            store.add_permutation(perm, x)
            y = np.empty_like(x)
            y[perm] = x
            samples.append(y)
        samples = np.array(samples)
        R = store.gelman_rubin()
        for i in range(n):
            for k in range(K):
                chains = [samples[c::C, i, k] for c in range(C)]
                assert R[i, k] == pytest.approx(gelman_rubin(chains), rel=1e-10)


class TestTruncation:
    def test_constant_trace(self):
        assert truncation_index([0.7] * 20, 1e-8, 10) == 10

    def test_oscillating(self):
        assert truncation_index([1.0, 2.0] * 10, 1e-8, 10) == 20

    def test_settles_after_sixth_value(self):
        trace = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] + [0.6] * 14
        assert truncation_index(trace, 1e-8, 10) == 15

    def test_zero_reference_uses_absolute_change(self):
        assert truncation_index([0.0] * 12, 1e-8, 10) == 10
        assert truncation_index([0.0, 1e-3] * 6, 1e-8, 3) == 12

    def test_non_consecutive_hits_count(self):
        trace = [1, 1, 2, 2, 3, 3, 4, 4]
        # V_1, V_3, V_5, V_7 vanish
        assert truncation_index(trace, 1e-8, 3) == 5


class TestStore:
    def test_welford_matches_batch(self, rng):
        n = 5
        store = MarginalStore(n, ["u"])
        raw = {}
        for _ in range(200):
            perm = rng.permutation(n)
            x = rng.normal(size=(n, 1))
            store.add_permutation(perm, x)
            for t, i in enumerate(perm):
                raw.setdefault((i, t), []).append(x[t, 0])
        var = store.variance()
        for (i, t), vals in raw.items():
            assert store.count[i, t] == len(vals)
            assert store.mean[i, t, 0] == pytest.approx(np.mean(vals))
            if len(vals) > 1:
                assert var[i, t, 0] == pytest.approx(np.var(vals, ddof=1))

    def test_imputation_from_nearest_size(self):
        store = MarginalStore(3, ["u"])
        store.add_permutation([0, 1, 2], [[1.0], [2.0], [3.0]])
        m = store.mean_marginals()
        np.testing.assert_array_equal(m[0, :, 0], [1, 1, 1])
        np.testing.assert_array_equal(m[1, :, 0], [2, 2, 2])

    def test_digest_tracks_permutations(self):
        a, b = MarginalStore(3, ["u"]), MarginalStore(3, ["u"])
        a.add_permutation([0, 1, 2], np.zeros((3, 1)))
        b.add_permutation([1, 0, 2], np.zeros((3, 1)))
        assert a.permutation_digest != b.permutation_digest

    def test_roundtrip_dict(self, rng):
        s = MarginalStore(3, ["u", "v"])
        for _ in range(5):
            s.add_permutation(rng.permutation(3), rng.normal(size=(3, 2)))
        t = MarginalStore.from_dict(s.to_dict())
        np.testing.assert_array_equal(t.mean, s.mean)
        np.testing.assert_array_equal(t.count, s.count)


class TestMonteCarlo:
    def _game(self, n=8, seed=0):
        v = np.random.default_rng(seed).uniform(0, 1, n)
        return AdditiveGame(v), v

    def test_additive_within_tolerance(self):
        g, v = self._game()
        res = mc_semivalues(g, [make_weights(k, 8) for k in ("shapley", "banzhaf")],
                            McConfig(seed=1))
        for s in res.scores:
            assert np.max(np.abs(s.scores[:, 0] - v)) < 0.05

    def test_aligned_linearity_is_bit_exact(self):
        base = SaturatingGame(np.random.default_rng(3).uniform(0, 0.4, 9))
        g = FunctionGame(9, lambda idx: np.r_[base(idx), 2 * base(idx)], ["u", "2u"])
        res = mc_semivalues(g, [make_weights("beta", 9, 4, 1)], McConfig(seed=5))
        s = res.scores[0].scores
        assert np.array_equal(s[:, 1], 2 * s[:, 0])

    def test_deterministic_and_thread_independent(self):
        g = SaturatingGame(np.random.default_rng(4).uniform(0, 0.4, (7, 2)))
        w = [make_weights("shapley", 7)]
        a = mc_semivalues(g, w, McConfig(seed=9))
        b = mc_semivalues(g, w, McConfig(seed=9), threads=3)
        assert a.scores[0].scores.tobytes() == b.scores[0].scores.tobytes()
        assert a.store.permutation_digest == b.store.permutation_digest

    def test_scores_reproducible_from_store(self):
        g = SaturatingGame(np.random.default_rng(4).uniform(0, 0.4, (6, 2)))
        w = make_weights("banzhaf", 6)
        res = mc_semivalues(g, w, McConfig(seed=2))
        np.testing.assert_array_equal(res.scores[0].scores, res.store.scores(w))

    def test_gr_stops_or_hits_cap(self):
        g, _ = self._game()
        res = mc_semivalues(g, [make_weights("shapley", 8)],
                            McConfig(min_perms=20, max_perms=60, gr_check_every=20, seed=0))
        assert res.n_permutations <= 60
        if res.converged:
            assert res.gr_history[-1][1] < 1.05
        else:
            assert res.n_permutations == 60

    def test_truncation_zeroes_tail(self):
        # utility saturates after any 2 points; walks stop early
        g = FunctionGame(30, lambda idx: [float(min(len(idx), 2))], ["u"])
        res = mc_semivalues(g, [make_weights("shapley", 30)],
                            McConfig(min_perms=10, max_perms=10, gr_check_every=10, trunc_window=5,
                                     seed=0))
        assert max(res.truncation_points) == 6
        assert np.all(res.store.mean[:, 7:, 0] == 0)

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            McConfig(min_perms=10, max_perms=5)
        with pytest.raises(ConfigError):
            McConfig(gr_threshold=1.0)
        with pytest.raises(ConfigError):
            McConfig(n_chains=1)
        with pytest.raises(ConfigError):
            McConfig(gr_check_every=101, n_chains=2)

    def test_weights_size_mismatch(self):
        g, _ = self._game()
        with pytest.raises(ConfigError):
            mc_semivalues(g, [make_weights("shapley", 5)])


class TestAlignment:
    def test_perfect_alignment(self, rng):
        n = 12
        Ma = rng.normal(size=(n, n))
        store = MarginalStore.from_means(np.stack([Ma, 2 * Ma], axis=2))
        rep = alignment_factors(store, 0, 1, make_weights("banzhaf", n))
        assert rep.corr == pytest.approx(1.0)
        # diagonal-only correlation need not be 1, but r_j = 2 Var_j
        np.testing.assert_allclose(rep.r, 2 * np.var(Ma, axis=0))

    def test_no_cross_size_covariance(self):
        # orthogonal columns: Hadamard rows centred over points
        H = np.array([[1]])
        for _ in range(4):
            H = np.block([[H, H], [H, -H]])
        M = H[:, 1:]  # 16 points, 15 zero-mean orthogonal size columns
        n = 16
        means = np.zeros((n, n, 2))
        means[:, 1:, 0] = M
        means[:, 1:, 1] = M * np.arange(1, 16)
        rep = alignment_factors(means, 0, 1, make_weights("shapley", n))
        assert rep.epsilon == 0.0
        assert rep.delta == pytest.approx(0.0, abs=1e-12)

    def test_independent_sizes_diag_close(self):
        rng = np.random.default_rng(7)
        n = 400
        a = rng.normal(size=(n, n))
        b = 0.6 * a + 0.8 * rng.normal(size=(n, n))
        rep = alignment_factors(np.stack([a, b], axis=2), 0, 1, make_weights("banzhaf", n))
        assert rep.delta < 0.1
        assert rep.corr == pytest.approx(0.6, abs=0.1)

    def test_constant_scores(self):
        with pytest.raises(NumericError):
            alignment_factors(np.ones((4, 4, 2)), 0, 1, make_weights("shapley", 4))

    def test_names(self):
        rng = np.random.default_rng(0)
        store = MarginalStore.from_means(rng.normal(size=(5, 5, 2)), ["lam", "gam"])
        rep = alignment_factors(store, "lam", "gam", make_weights("shapley", 5))
        assert -1 <= rep.corr <= 1
        with pytest.raises(ConfigError):
            alignment_factors(store, "lam", "zzz", make_weights("shapley", 5))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000))
def test_symmetry_of_exchangeable_players(n, seed):
    # players 0 and 1 are interchangeable by construction
    rng = np.random.default_rng(seed)
    level = rng.uniform(0, 1, n)
    level[1] = level[0]
    t = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        t[mask] = max(level[i] for i in range(n) if mask >> i & 1) ** 2
    for spec in ["shapley", "banzhaf", "beta(4,1)"]:
        s = exact_semivalues(TableGame(t), weights_from_spec(spec, n)).scores[:, 0]
        assert abs(s[0] - s[1]) < 1e-12
