"""Self-check suites behind the `validate` CLI subcommand.

Each check returns a dict with name / passed / observed / expected / tol so
the CLI can emit a machine-readable report.
"""

from __future__ import annotations

import math
from typing import List

import numpy as np

from .dual import (
    SolverSettings,
    achievable_error_exponent,
    correct_decoding_exponent_dual,
    gallager_e0,
    gallager_random_coding_exponent,
    tilted_joint,
)
from .input_opt import ensemble_capacity, minimize_correct_decoding_over_p
from .primal import SimplexGrid, primal_achievable, primal_correct_decoding
from .probability import Channel, Distribution, divergence_joint, functional_A, functional_B
from .simulate import SimConfig, competition_probability, estimate_error_probability


def _check(name, observed, expected, tol):
    return {
        "name": name,
        "passed": bool(observed <= expected + tol) if tol is not None else bool(observed),
        "observed": float(observed) if not isinstance(observed, bool) else observed,
        "expected": expected,
        "tol": tol,
    }


def random_channel_2x2(rng: np.random.Generator) -> Channel:
    a, b = rng.uniform(0.05, 0.95, size=2)
    return Channel(np.array([[a, 1 - a], [b, 1 - b]]))


def primal_dual_checks(num_channels: int, points_per_channel: int, m: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    grid = SimplexGrid(m, 4)
    worst = 0.0
    for _ in range(num_channels):
        w = random_channel_2x2(rng)
        p1 = rng.uniform(0.2, 0.8)
        p = Distribution(np.array([1 - p1, p1]))
        for _ in range(points_per_channel):
            r = rng.uniform(0.02, 0.6)
            k = rng.uniform(0.1, 1.5)
            dual = achievable_error_exponent(p, w, r, k).value
            prim, _ = primal_achievable(p, w, r, k, grid)
            worst = max(worst, abs(dual - prim))
    return _check("primal_dual_achievable_max_gap", worst, 0.0, 5e-3)


def correct_decoding_checks(num_channels: int, points_per_channel: int, m: int, seed: int = 11):
    rng = np.random.default_rng(seed)
    grid = SimplexGrid(m, 4)
    worst = 0.0
    for _ in range(num_channels):
        w = random_channel_2x2(rng)
        p1 = rng.uniform(0.2, 0.8)
        p = Distribution(np.array([1 - p1, p1]))
        for _ in range(points_per_channel):
            r = rng.uniform(0.02, 1.0)
            k = rng.uniform(0.1, 1.5)
            dual = correct_decoding_exponent_dual(p, w, r, k)
            prim, _ = primal_correct_decoding(p, w, r, k, grid)
            worst = max(worst, abs(dual - prim))
    return _check("primal_dual_correct_decoding_max_gap", worst, 0.0, 5e-3)


def gallager_limit_check():
    w = Channel.bsc(0.2)
    p = Distribution.uniform(2)
    worst = 0.0
    for r in np.arange(0.02, 0.1801, 0.02):
        a = achievable_error_exponent(p, w, float(r), 10.0).value
        g = gallager_random_coding_exponent(p, w, float(r)).value
        worst = max(worst, abs(a - g))
    return _check("gallager_limit_max_gap", worst, 0.0, 1e-6)


def lemma_bound_check(ms=(100,)):
    bound = 0.5 * (1.0 - 1.0 / math.sqrt(2 * math.pi))
    worst = 1.0
    for m in ms:
        for alpha in list(np.arange(0.05, 0.81, 0.05)) + [1.0]:
            worst = min(worst, competition_probability(m, float(alpha)))
    return _check("two_competing_clouds_min_probability", bound - 0.01 - worst, 0.0, 0.0)


def zero_crossing_check(ks=(0.3, 0.6, 1.0)):
    w = Channel.bsc(0.2)
    p = Distribution.uniform(2)
    worst = 0.0
    for k in ks:
        cap = ensemble_capacity(w, k)

        def ach_zero(r):
            return achievable_error_exponent(p, w, r, k).value < 1e-6

        lo, hi = 1e-3, 1.2
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if ach_zero(mid):
                hi = mid
            else:
                lo = mid
        worst = max(worst, abs(hi - cap))

        def cd_zero(r):
            return minimize_correct_decoding_over_p(w, r, k)[0] < 1e-6

        lo, hi = 1e-3, 1.2
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if cd_zero(mid):
                lo = mid
            else:
                hi = mid
        worst = max(worst, abs(lo - cap))
    return _check("zero_crossing_max_gap", worst, 0.0, 1e-3)


def tilted_self_test(count: int = 20, seed: int = 3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        w = random_channel_2x2(rng)
        p1 = rng.uniform(0.1, 0.9)
        p = Distribution(np.array([1 - p1, p1]))
        rho = rng.uniform(0.0, 1.0)
        eta = rng.uniform(0.0, rho)
        q = tilted_joint(rho, eta, p, w)
        lagr = (
            divergence_joint(q, p, w)
            + rho * functional_A(q, p)
            + eta * functional_B(q, w)
        )
        worst = max(worst, abs(lagr - gallager_e0(rho, eta, p, w)))
    return _check("tilted_lagrangian_max_gap", worst, 0.0, 1e-9)


def simulation_trend_check(trials: int = 2000, seed: int = 12345):
    w = Channel.bsc(0.2)
    p = Distribution.uniform(2)
    r, k = 0.05, 1.0
    target = achievable_error_exponent(p, w, r, k).value
    rates = []
    for n in (6, 8, 10):
        cfg = SimConfig(n, r, k, p, w, num_instances=trials // 100, seed=seed)
        est, _, _ = estimate_error_probability(cfg)
        rates.append(-math.log(max(est, 1e-12)) / n)
    ok = all(v > 0 for v in rates) and 0.3 * target <= rates[-1] <= 1.7 * target
    return {
        "name": "simulation_trend",
        "passed": bool(ok),
        "observed": rates,
        "expected": [0.3 * target, 1.7 * target],
        "tol": None,
    }


def run_validation(level: str = "quick") -> List[dict]:
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    checks = [
        primal_dual_checks(5, 3, m=150),
        lemma_bound_check(),
        tilted_self_test(),
    ]
    if level == "full":
        checks += [
            primal_dual_checks(20, 10, m=400),
            correct_decoding_checks(10, 10, m=400),
            gallager_limit_check(),
            zero_crossing_check(),
            simulation_trend_check(trials=10_000),
        ]
    return checks
