"""Closed-form dual (Gallager-style) evaluation of the cloud-channel exponents.

Everything is driven by the two-parameter function

    E0(rho, eta, P) = -ln sum_y [ sum_x P(x) W(y|x)^((1+eta)/(1+rho)) ]^(1+rho)

whose Legendre-type transforms give the achievable error exponent, the
correct-decoding exponent, the converse error exponent and the jump point
R_min(K).  All evaluations are done in log-space with log-sum-exp so that
large |rho| does not underflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linprog
from scipy.special import logsumexp

from .probability import Channel, Distribution, JointDistribution

RHO_EDGE = 1e-6  # correct-decoding sup runs over [0, 1 - RHO_EDGE]


@dataclass(frozen=True)
class SolverSettings:
    """Grid/refinement settings for the dual optimizers.

    tol doubles as the slope threshold of the divergence test at rho_cap:
    if the converse objective still climbs faster than tol per unit rho at
    the cap, the sup is reported as +inf.
    """

    grid_points: int = 64
    refine_iters: int = 3
    rho_cap: float = 64.0
    tol: float = 1e-3

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")
        if self.rho_cap < 1:
            raise ValueError("rho_cap must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class DualWitness:
    rho: float
    eta: float
    value: float
    tilted: Optional[JointDistribution] = None


def _log_probs(p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(p)


def gallager_e0(rho: float, eta: float, P: Distribution, W: Channel) -> float:
    """E0(rho, eta, P) in nats.  Requires 1 + rho > 0 and 1 + eta >= 0."""
    return float(gallager_e0_batch(rho, eta, P.probs[None, :], W)[0])


def gallager_e0_batch(rho: float, eta: float, P_rows: np.ndarray, W: Channel) -> np.ndarray:
    """E0(rho, eta, .) evaluated for every row of P_rows at once."""
    if 1.0 + rho <= 0:
        raise ValueError("rho must be > -1")
    if 1.0 + eta < 0:
        raise ValueError("eta must be >= -1")
    s = (1.0 + eta) / (1.0 + rho)
    log_p = _log_probs(np.asarray(P_rows, dtype=float))  # (k, |X|)
    log_w = _log_probs(W.matrix)                         # (|X|, |Y|)
    with np.errstate(invalid="ignore"):
        inner = logsumexp(log_p[:, :, None] + s * log_w[None, :, :], axis=1)
    # outputs unreachable under P contribute bracket = 0
    return -logsumexp((1.0 + rho) * inner, axis=1)


def _e0_eta_batch(rho: float, etas: np.ndarray, log_p: np.ndarray, log_w: np.ndarray) -> np.ndarray:
    """E0(rho, eta, P) for a vector of etas at fixed rho and fixed P."""
    s = (1.0 + etas) / (1.0 + rho)  # (k,)
    with np.errstate(invalid="ignore"):
        inner = logsumexp(log_p[:, None, None] + s[None, :, None] * log_w[:, None, :], axis=0)
    return -logsumexp((1.0 + rho) * inner, axis=1)


def tilted_joint(rho: float, eta: float, P: Distribution, W: Channel) -> JointDistribution:
    """The exponent-minimizing joint distribution induced by (rho, eta) and P.

    q(y, x) proportional to P(x) W(y|x)^s [sum_x' P(x') W(y|x')^s]^rho with
    s = (1+eta)/(1+rho); the log-normalizer equals -E0(rho, eta, P).
    """
    if 1.0 + rho <= 0:
        raise ValueError("rho must be > -1")
    s = (1.0 + eta) / (1.0 + rho)
    log_p = _log_probs(P.probs)
    log_w = _log_probs(W.matrix)
    with np.errstate(invalid="ignore"):
        inner = logsumexp(log_p[:, None] + s * log_w, axis=0)  # (|Y|,)
        log_c = logsumexp((1.0 + rho) * inner)
        log_q = log_p[None, :] + s * log_w.T + rho * inner[:, None] - log_c
    q = np.exp(log_q)
    q[~np.isfinite(log_q)] = 0.0
    return JointDistribution(q / q.sum())


def _golden_max(f: Callable[[float], float], lo: float, hi: float, iters: int = 80):
    """Golden-section maximization; also evaluates both endpoints.

    Returns (argmax, max) over all evaluated points.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    best_x, best_v = lo, f(lo)
    v_hi = f(hi)
    if v_hi > best_v:
        best_x, best_v = hi, v_hi
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
            if fc > best_v:
                best_x, best_v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
            if fd > best_v:
                best_x, best_v = d, fd
        if b - a < 1e-13 * max(1.0, abs(hi)):
            break
    return best_x, best_v


def achievable_error_exponent(
    P: Distribution, W: Channel, R: float, K: float, s: SolverSettings = SolverSettings()
) -> DualWitness:
    """sup over 0 <= eta <= rho <= 1 of E0(rho, eta, P) - rho R - eta K.

    Grid over the feasible triangle (parametrized as eta = t*rho) followed
    by coordinate-wise golden-section refinement; ties resolved toward the
    lexicographically smallest (rho, eta).
    """
    if R <= 0 or K <= 0:
        raise ValueError("R and K must be positive")
    log_p = _log_probs(P.probs)
    log_w = _log_probs(W.matrix)
    g = s.grid_points
    rhos = np.linspace(0.0, 1.0, g)
    ts = np.linspace(0.0, 1.0, g)

    def objective(rho: float, t: float) -> float:
        eta = t * rho
        e0 = float(_e0_eta_batch(rho, np.array([eta]), log_p, log_w)[0])
        return e0 - rho * R - eta * K

    vals = np.empty((g, g))
    for i, rho in enumerate(rhos):
        etas = ts * rho
        vals[i] = _e0_eta_batch(rho, etas, log_p, log_w) - rho * R - etas * K
    flat = int(np.argmax(vals))  # first occurrence = smallest (rho, eta)
    rho_b, t_b = rhos[flat // g], ts[flat % g]
    val_b = float(vals.flat[flat])

    for _ in range(s.refine_iters):
        r_new, v_new = _golden_max(lambda r: objective(r, t_b), 0.0, 1.0)
        if v_new >= val_b:
            rho_b, val_b = r_new, v_new
        if rho_b > 0:
            t_new, v_new = _golden_max(lambda t: objective(rho_b, t), 0.0, 1.0)
            if v_new >= val_b:
                t_b, val_b = t_new, v_new

    eta_b = t_b * rho_b
    if val_b <= 0.0:
        rho_b, eta_b, val_b = 0.0, 0.0, 0.0
    return DualWitness(rho_b, eta_b, val_b, tilted_joint(rho_b, eta_b, P, W))


def gallager_random_coding_exponent(
    P: Distribution, W: Channel, R: float, s: SolverSettings = SolverSettings()
) -> DualWitness:
    """Classic random-coding exponent sup over rho in [0,1] of E0(rho,0,P) - rho R.

    This is the large-K limit of the cloud-ensemble achievable exponent.
    """
    log_p = _log_probs(P.probs)
    log_w = _log_probs(W.matrix)

    def f(rho: float) -> float:
        return float(_e0_eta_batch(rho, np.array([0.0]), log_p, log_w)[0]) - rho * R

    rho_b, val_b = _golden_max(f, 0.0, 1.0)
    if val_b <= 0.0:
        rho_b, val_b = 0.0, 0.0
    return DualWitness(rho_b, 0.0, val_b)


def correct_decoding_exponent_dual(
    P: Distribution, W: Channel, R: float, K: float, s: SolverSettings = SolverSettings()
) -> float:
    """min of sup_rho {E0(-rho,0,P) + rho R} and sup_rho {E0(-rho,-rho,P) + rho(R+K)}.

    Both sups run over rho in [0, 1); the bracket power 1-rho -> 0 is handled
    in log-space.
    """
    if R <= 0 or K <= 0:
        raise ValueError("R and K must be positive")
    log_p = _log_probs(P.probs)
    log_w = _log_probs(W.matrix)
    hi = 1.0 - RHO_EDGE

    def branch(slope: float, tilt_eta: bool) -> float:
        def f(rho: float) -> float:
            eta = -rho if tilt_eta else 0.0
            e0 = float(_e0_eta_batch(-rho, np.array([eta]), log_p, log_w)[0])
            return e0 + rho * slope

        rhos = np.linspace(0.0, hi, s.grid_points)
        vals = np.array([f(r) for r in rhos])
        i = int(np.argmax(vals))
        lo = rhos[max(i - 1, 0)]
        up = rhos[min(i + 1, len(rhos) - 1)]
        _, v = _golden_max(f, lo, up)
        return max(v, float(vals[i]))

    value = min(branch(R, False), branch(R + K, True))
    return max(value, 0.0)


def converse_error_exponent(
    W: Channel, R: float, K: float, s: SolverSettings = SolverSettings()
) -> DualWitness:
    """max_P sup over the wedge 0 <= eta <= rho of E0(rho, eta, P) - rho R - eta K.

    The unbounded sup is truncated at rho_cap; if the objective still climbs
    at the cap (slope above s.tol) the value is +inf: R lies below the jump
    point R_min(K).
    """
    if R <= 0 or K <= 0:
        raise ValueError("R and K must be positive")
    from .input_opt import maximize_e0_over_p  # late import, avoids a cycle

    # Scanning uses a dense input-distribution grid so that the inner max
    # over P costs one batched E0 evaluation per (rho, eta); the winner is
    # polished with the exact inner maximizer at the end.
    nx = W.input_alphabet_size
    if nx == 2:
        p1s = np.linspace(0.0, 1.0, 129)
        p_rows = np.column_stack([1.0 - p1s, p1s])
    else:
        rng = np.random.default_rng(0)
        extra = rng.dirichlet(np.ones(nx), size=256)
        p_rows = np.vstack([np.full((1, nx), 1.0 / nx), np.eye(nx), extra])

    def g(rho: float, t: float) -> float:
        eta = t * rho
        val = float(np.max(gallager_e0_batch(rho, eta, p_rows, W)))
        return val - rho * R - eta * K

    def g_exact(rho: float, t: float) -> float:
        eta = t * rho
        val, _ = maximize_e0_over_p(rho, eta, W, tol=1e-8)
        return val - rho * R - eta * K

    nt = max(9, s.grid_points // 4)
    ts = np.linspace(0.0, 1.0, nt)

    def best_over_t(rho: float) -> float:
        return max(g(rho, t) for t in ts)

    cap = s.rho_cap
    slope = (best_over_t(cap) - best_over_t(0.9 * cap)) / (0.1 * cap)
    if slope > s.tol:
        return DualWitness(cap, cap, float("inf"))

    half = max(8, s.grid_points // 2)
    rhos = np.unique(np.concatenate([np.linspace(0.0, 1.0, half), np.geomspace(1.0, cap, half)]))
    best = (0.0, 0.0, 0.0)  # value at (rho, eta) = (0, 0) is always 0
    for rho in rhos:
        for t in ts:
            v = g(rho, t)
            if v > best[2]:
                best = (rho, t, v)
    rho_b, t_b, val_b = best
    for _ in range(s.refine_iters):
        r_new, v_new = _golden_max(lambda r: g(r, t_b), 0.0, cap, iters=60)
        if v_new >= val_b:
            rho_b, val_b = r_new, v_new
        if rho_b > 0:
            t_new, v_new = _golden_max(lambda t: g(rho_b, t), 0.0, 1.0, iters=60)
            if v_new >= val_b:
                t_b, val_b = t_new, v_new
    val_b = max(val_b, g_exact(rho_b, t_b))
    if val_b <= 1e-12:  # rounding noise from the batched scan at (0, 0)
        rho_b, t_b, val_b = 0.0, 0.0, 0.0
    return DualWitness(rho_b, t_b * rho_b, val_b)


def _min_max_row(W_beta: np.ndarray) -> float:
    """min over P of max_y sum_x P(x) W_beta(x, y), solved as a small LP."""
    nx, ny = W_beta.shape
    c = np.zeros(nx + 1)
    c[-1] = 1.0
    a_ub = np.hstack([W_beta.T, -np.ones((ny, 1))])
    b_ub = np.zeros(ny)
    a_eq = np.zeros((1, nx + 1))
    a_eq[0, :nx] = 1.0
    bounds = [(0, None)] * nx + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"LP for the jump point failed: {res.message}")
    return float(res.x[-1])


def r_min_jump(W: Channel, K: float, s: SolverSettings = SolverSettings()) -> float:
    """Rate below which the converse error exponent jumps to +inf.

    max_P sup over beta in (0, 1] of -ln max_y sum_x P(x) W(y|x)^beta - beta K,
    clamped at 0 when no jump exists in the achievable rate region.
    """
    if K <= 0:
        raise ValueError("K must be positive")
    log_w = _log_probs(W.matrix)

    def value(beta: float) -> float:
        with np.errstate(invalid="ignore"):
            w_beta = np.exp(beta * log_w)
        w_beta[W.matrix == 0] = 0.0
        return -np.log(_min_max_row(w_beta)) - beta * K

    betas = np.linspace(1e-4, 1.0, 8 * s.grid_points)
    vals = np.array([value(b) for b in betas])
    i = int(np.argmax(vals))
    lo = betas[max(i - 1, 0)]
    hi = betas[min(i + 1, len(betas) - 1)]
    _, v = _golden_max(value, lo, hi, iters=60)
    return max(v, float(vals[i]), 0.0)


def single_min_form(
    P: Distribution,
    W: Channel,
    R: float,
    K: float,
    s: SolverSettings = SolverSettings(),
    resolution: int = 400,
) -> float:
    """Unified single-minimum form of the achievable exponent at epsilon = 0.

    Evaluated by brute force on the joint simplex lattice through the
    decomposition -H_T + A + B + |A + B + |K - B|^+ - K - R|^+, which must
    agree with the dual achievable exponent up to the lattice gap.
    """
    from .primal import JointLattice  # late import, avoids a cycle

    lat = JointLattice.get(resolution, W.output_alphabet_size, W.input_alphabet_size)
    a = lat.functional_a(P)
    b = lat.functional_b(W)
    neg_h_t = lat.t_log_t
    obj = neg_h_t + a + b + np.maximum(a + b + np.maximum(K - b, 0.0) - K - R, 0.0)
    v = float(np.min(obj))
    return v if v < lat.INF_CUT else float("inf")
