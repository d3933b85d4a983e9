import math

import numpy as np
import pytest

from cloudchan.dual import (
    achievable_error_exponent,
    correct_decoding_exponent_dual,
    r_min_jump,
)
from cloudchan.primal import (
    JointLattice,
    SimplexGrid,
    primal_achievable,
    primal_converse,
    primal_correct_decoding,
    primal_rmin,
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
GRID = SimplexGrid(120, 4)


class TestSimplexGrid:
    def test_point_count_matches_formula(self):
        g = SimplexGrid(10, 3)
        assert g.num_points() == math.comb(12, 2)
        assert g.counts().shape == (g.num_points(), 3)

    def test_counts_sum_to_resolution(self):
        g = SimplexGrid(7, 4)
        c = g.counts()
        assert np.all(c.sum(axis=1) == 7)
        assert np.all(c >= 0)
        # all points distinct
        assert len(np.unique(c, axis=0)) == g.num_points()

    def test_rejects_oversize(self):
        with pytest.raises(ValueError):
            SimplexGrid(3000, 4)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            SimplexGrid(1, 4)


class TestLatticeFunctionals:
    def test_agree_with_reference_implementation(self):
        # spot-check the vectorized lattice columns against probability.py
        lat = JointLattice.get(40, 2, 2)
        rng = np.random.default_rng(9)
        d = lat.divergence(UNIF, BSC)
        a = lat.functional_a(UNIF)
        b = lat.functional_b(BSC)
        for idx in rng.integers(0, lat.n_points, size=40):
            q = lat.joint_at(int(idx))
            assert d[idx] == pytest.approx(divergence_joint(q, UNIF, BSC), abs=1e-5)
            assert a[idx] == pytest.approx(functional_A(q, UNIF), abs=1e-5)
            assert b[idx] == pytest.approx(functional_B(q, BSC), abs=1e-5)

    def test_cache_reuse(self):
        assert JointLattice.get(40, 2, 2) is JointLattice.get(40, 2, 2)

    def test_sentinel_excludes_unsupported_cells(self):
        z = Channel(np.array([[1.0, 0.0], [0.5, 0.5]]))
        lat = JointLattice.get(40, 2, 2)
        b = lat.functional_b(z)
        mass_on_zero = lat.counts_f[:, 2] > 0  # flat cell (y=1, x=0) has W = 0
        assert np.all(b[mass_on_zero] > lat.INF_CUT)


class TestPrimalDualAgreement:
    def test_achievable_bsc(self):
        for r, k in ((0.05, 1.0), (0.1, 0.5), (0.15, 1.2)):
            dual = achievable_error_exponent(UNIF, BSC, r, k).value
            prim, q = primal_achievable(UNIF, BSC, r, k, GRID)
            assert prim == pytest.approx(dual, abs=5e-3)
            assert q.probs.shape == (2, 2)

    def test_achievable_random_channels(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            w = Channel(rng.dirichlet(np.ones(2), size=2))
            p = Distribution(rng.dirichlet(np.ones(2)))
            r, k = rng.uniform(0.02, 0.5), rng.uniform(0.1, 1.4)
            dual = achievable_error_exponent(p, w, r, k).value
            prim, _ = primal_achievable(p, w, r, k, GRID)
            assert prim == pytest.approx(dual, abs=5e-3)

    def test_correct_decoding_bsc(self):
        for r, k in ((0.3, 0.6), (0.5, 0.6), (0.4, 1.0)):
            dual = correct_decoding_exponent_dual(UNIF, BSC, r, k)
            prim, _ = primal_correct_decoding(UNIF, BSC, r, k, GRID)
            assert prim == pytest.approx(dual, abs=5e-3)

    def test_small_rate_achievable_is_zero_trivially(self):
        # q = PW gives objective 0 when R exceeds the zero-crossing
        prim, _ = primal_achievable(UNIF, BSC, 0.4, 1.0, GRID)
        assert prim == pytest.approx(0.0, abs=1e-9)

    def test_correct_decoding_zero_below_crossing(self):
        prim, _ = primal_correct_decoding(UNIF, BSC, 0.01, 1.0, GRID)
        assert prim == pytest.approx(0.0, abs=1e-9)


class TestPrimalConverse:
    def test_infinite_below_jump(self):
        assert primal_converse(BSC, 0.001, 0.85, SimplexGrid(60, 4)) == math.inf

    def test_finite_and_above_achievable(self):
        g = SimplexGrid(60, 4)
        v = primal_converse(BSC, 0.1, 1.0, g)
        assert np.isfinite(v)
        ach = achievable_error_exponent(UNIF, BSC, 0.1, 1.0).value
        assert v >= ach - 5e-3


class TestPrimalRmin:
    def test_agrees_with_dual_rmin(self):
        # lattice discretization biases the inner minimum upward; the tight
        # 2e-3 agreement at m=400 is exercised by the acceptance battery
        g = SimplexGrid(150, 4)
        for k in (0.7, 0.85):
            assert primal_rmin(BSC, k, g) == pytest.approx(r_min_jump(BSC, k), abs=4e-3)

    def test_rejects_larger_alphabets(self):
        w = Channel(np.full((3, 2), 0.5))
        with pytest.raises(NotImplementedError):
            primal_rmin(w, 1.0, SimplexGrid(30, 6))
