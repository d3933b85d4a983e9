import math

import numpy as np
import pytest

from cloudchan.dual import (
    SolverSettings,
    achievable_error_exponent,
    converse_error_exponent,
    correct_decoding_exponent_dual,
    gallager_e0,
    gallager_random_coding_exponent,
    r_min_jump,
    single_min_form,
    tilted_joint,
)
from cloudchan.probability import (
    Channel,
    Distribution,
    divergence_joint,
    functional_A,
    functional_B,
)

BSC = Channel.bsc(0.2)
UNIF = Distribution.uniform(2)


def random_channel(rng, nx=2, ny=2):
    return Channel(rng.dirichlet(np.ones(ny), size=nx))


class TestE0:
    def test_zero_at_origin(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            w = random_channel(rng)
            p = Distribution(rng.dirichlet(np.ones(2)))
            assert gallager_e0(0.0, 0.0, p, w) == pytest.approx(0.0, abs=1e-14)

    def test_bsc_hand_value(self):
        # inner term 0.5(sqrt(0.8)+sqrt(0.2)), squared and doubled gives 0.9
        assert gallager_e0(1.0, 0.0, UNIF, BSC) == pytest.approx(-math.log(0.9), abs=1e-12)

    def test_diagonal_reduces_to_rho_ln2(self):
        # at eta = rho the inner exponent is 1, output is uniform
        for rho in (0.2, 0.5, 1.0):
            assert gallager_e0(rho, rho, UNIF, BSC) == pytest.approx(rho * math.log(2), abs=1e-12)

    def test_rejects_rho_at_minus_one(self):
        with pytest.raises(ValueError):
            gallager_e0(-1.0, 0.0, UNIF, BSC)

    def test_zero_probability_inputs_are_fine(self):
        p = Distribution(np.array([1.0, 0.0]))
        v = gallager_e0(0.7, 0.3, p, BSC)
        assert np.isfinite(v)

    def test_monotone_in_rho_at_eta_zero(self):
        vals = [gallager_e0(r, 0.0, UNIF, BSC) for r in np.linspace(0, 1, 11)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


class TestTiltedJoint:
    def test_lagrangian_recovers_e0(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            w = random_channel(rng)
            p = Distribution(rng.dirichlet(np.ones(2)))
            rho = rng.uniform(0, 1)
            eta = rng.uniform(0, rho)
            q = tilted_joint(rho, eta, p, w)
            lagr = (
                divergence_joint(q, p, w)
                + rho * functional_A(q, p)
                + eta * functional_B(q, w)
            )
            assert lagr == pytest.approx(gallager_e0(rho, eta, p, w), abs=1e-9)

    def test_y_marginal_formula(self):
        # T_hat(y) proportional to [sum_x P W^s]^(1+rho)
        rng = np.random.default_rng(2)
        for _ in range(30):
            w = random_channel(rng)
            p = Distribution(rng.dirichlet(np.ones(2)))
            rho = rng.uniform(0, 1)
            eta = rng.uniform(0, rho)
            s = (1 + eta) / (1 + rho)
            bracket = (p.probs[:, None] * w.matrix**s).sum(axis=0) ** (1 + rho)
            expected = bracket / bracket.sum()
            got = tilted_joint(rho, eta, p, w).y_marginal()
            assert got == pytest.approx(expected, abs=1e-10)

    def test_reduces_to_pw_at_origin(self):
        q = tilted_joint(0.0, 0.0, UNIF, BSC)
        pw = (BSC.matrix * UNIF.probs[:, None]).T
        assert q.probs == pytest.approx(pw, abs=1e-14)


class TestAchievable:
    def test_zero_above_capacity(self):
        wit = achievable_error_exponent(UNIF, BSC, 0.25, 1.0)
        assert wit.value == 0.0
        assert wit.rho == 0.0 and wit.eta == 0.0

    def test_known_value_at_low_rate(self):
        # K=1 does not bind at R=0.05: value is E0(1,0) - R with rho*=1
        wit = achievable_error_exponent(UNIF, BSC, 0.05, 1.0)
        assert wit.value == pytest.approx(-math.log(0.9) - 0.05, abs=1e-9)
        assert wit.eta == pytest.approx(0.0, abs=1e-9)

    def test_large_k_matches_gallager(self):
        for r in (0.02, 0.1, 0.18):
            a = achievable_error_exponent(UNIF, BSC, r, 10.0).value
            g = gallager_random_coding_exponent(UNIF, BSC, r).value
            assert a == pytest.approx(g, abs=1e-9)

    def test_monotone_decreasing_in_r_and_k(self):
        v1 = achievable_error_exponent(UNIF, BSC, 0.05, 0.4).value
        v2 = achievable_error_exponent(UNIF, BSC, 0.10, 0.4).value
        v3 = achievable_error_exponent(UNIF, BSC, 0.05, 0.6).value
        assert v2 <= v1 + 1e-12
        assert v3 <= v1 + 1e-12

    def test_witness_feasible(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            w = random_channel(rng)
            p = Distribution(rng.dirichlet(np.ones(2)))
            wit = achievable_error_exponent(p, w, rng.uniform(0.02, 0.4), rng.uniform(0.1, 1.5))
            assert 0 <= wit.eta <= wit.rho <= 1
            assert wit.tilted is not None

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            achievable_error_exponent(UNIF, BSC, 0.0, 1.0)
        with pytest.raises(ValueError):
            achievable_error_exponent(UNIF, BSC, 0.1, -1.0)


class TestCorrectDecoding:
    def test_zero_below_crossing(self):
        assert correct_decoding_exponent_dual(UNIF, BSC, 0.1, 1.0) == 0.0

    def test_noiseless_at_capacity(self):
        ident = Channel(np.eye(2))
        assert correct_decoding_exponent_dual(UNIF, ident, math.log(2), 1.0) == pytest.approx(
            0.0, abs=1e-9
        )

    def test_positive_and_increasing_above_crossing(self):
        vals = [correct_decoding_exponent_dual(UNIF, BSC, r, 0.6) for r in (0.3, 0.5, 0.7)]
        assert vals[0] > 0
        assert vals[0] < vals[1] < vals[2]

    def test_linear_regime_slope_one(self):
        # far above capacity the exponent grows with slope 1 in R
        v1 = correct_decoding_exponent_dual(UNIF, BSC, 1.0, 0.6)
        v2 = correct_decoding_exponent_dual(UNIF, BSC, 1.2, 0.6)
        assert (v2 - v1) / 0.2 == pytest.approx(1.0, abs=1e-6)


class TestConverse:
    def test_upper_bounds_achievable(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            r = rng.uniform(0.03, 0.15)
            k = rng.uniform(0.9, 1.5)
            ach = achievable_error_exponent(UNIF, BSC, r, k).value
            con = converse_error_exponent(BSC, r, k).value
            assert con >= ach - 1e-6

    def test_infinite_below_jump(self):
        wit = converse_error_exponent(BSC, 0.001, 0.85)
        assert wit.value == math.inf

    def test_finite_above_jump(self):
        wit = converse_error_exponent(BSC, 0.05, 0.85)
        assert np.isfinite(wit.value)

    def test_zero_above_capacity(self):
        assert converse_error_exponent(BSC, 0.25, 1.0).value == 0.0


class TestRMinJump:
    def closed_form(self, K, p=0.2):
        betas = np.linspace(1e-6, 1.0, 20001)
        vals = -np.log(0.5 * (1 - p) ** betas + 0.5 * p**betas) - betas * K
        return max(0.0, float(vals.max()))

    def test_matches_bsc_closed_form(self):
        for k in (0.5, 0.7, 0.85, 0.9):
            assert r_min_jump(BSC, k) == pytest.approx(self.closed_form(k), abs=1e-6)

    def test_no_jump_above_threshold(self):
        # threshold -0.5*ln(0.16) for BSC(0.2)
        for k in (0.92, 1.0, 1.1, 1.2):
            assert r_min_jump(BSC, k) == 0.0

    def test_jump_below_threshold(self):
        assert r_min_jump(BSC, 0.85) > 0


class TestSingleMinForm:
    def test_matches_dual_on_bsc(self):
        for r, k in ((0.05, 1.0), (0.1, 0.6), (0.15, 1.2)):
            direct = achievable_error_exponent(UNIF, BSC, r, k).value
            unified = single_min_form(UNIF, BSC, r, k, resolution=200)
            assert unified == pytest.approx(direct, abs=2e-3)


def test_solver_settings_validation():
    with pytest.raises(ValueError):
        SolverSettings(grid_points=2)
    with pytest.raises(ValueError):
        SolverSettings(rho_cap=0.5)
    with pytest.raises(ValueError):
        SolverSettings(tol=0.0)
