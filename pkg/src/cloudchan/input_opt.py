"""Optimization over the channel input distribution P.

Shannon capacity via Blahut-Arimoto, the maximal output entropy H_max(W),
the cloud-ensemble capacity max{C(W), H_max(W) - K}, the maximizer of
E0(rho, eta, .) with its Arimoto-style KKT certificate, and the minimizer
of the correct-decoding exponent over P.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .dual import SolverSettings, _golden_max, _log_probs, gallager_e0_batch
from .probability import Channel, Distribution, entropy_vector

MAX_ITERS = 200_000


def shannon_capacity(W: Channel, tol: float = 1e-10) -> Tuple[float, Distribution]:
    """Blahut-Arimoto fixed point; stops when the capacity bracket is < tol."""
    w = W.matrix
    nx = W.input_alphabet_size
    p = np.full(nx, 1.0 / nx)
    with np.errstate(divide="ignore", invalid="ignore"):
        wlw = np.where(w > 0, w * np.log(w), 0.0).sum(axis=1)
    for _ in range(MAX_ITERS):
        t = p @ w
        with np.errstate(divide="ignore"):
            log_t = np.where(t > 0, np.log(t), 0.0)
        d = wlw - w @ log_t  # KL(W(.|x) || T) per x
        lower = float(p @ d)
        upper = float(np.max(d))
        if upper - lower < tol:
            return lower, Distribution(p / p.sum())
        p = p * np.exp(d - upper)
        p /= p.sum()
    raise RuntimeError(f"Blahut-Arimoto did not converge to tol={tol}")


def h_max(W: Channel, tol: float = 1e-10) -> Tuple[float, Distribution]:
    """Maximize the output entropy H(PW) over the input simplex."""
    w = W.matrix
    nx = W.input_alphabet_size

    def neg_h(p: np.ndarray) -> float:
        return -entropy_vector(p @ w)

    if nx == 1:
        return entropy_vector(w[0]), Distribution(np.array([1.0]))
    if nx == 2:
        p1, v = _golden_max(lambda a: -neg_h(np.array([1.0 - a, a])), 0.0, 1.0)
        return v, Distribution(np.array([1.0 - p1, p1]))

    def jac(p: np.ndarray) -> np.ndarray:
        t = p @ w
        with np.errstate(divide="ignore"):
            log_t = np.where(t > 0, np.log(t), 0.0)
        return w @ (log_t + 1.0)

    res = minimize(
        neg_h,
        np.full(nx, 1.0 / nx),
        jac=jac,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * nx,
        constraints=[{"type": "eq", "fun": lambda p: p.sum() - 1.0}],
        options={"maxiter": 1000, "ftol": min(tol, 1e-12)},
    )
    if not res.success:
        raise RuntimeError(f"output-entropy maximization failed: {res.message}")
    p = np.clip(res.x, 0.0, None)
    return -neg_h(p / p.sum()), Distribution(p / p.sum())


def ensemble_capacity(W: Channel, K: float, tol: float = 1e-10) -> float:
    """C(W, K) = max{C(W), H_max(W) - K}."""
    if K <= 0:
        raise ValueError("K must be positive")
    c, _ = shannon_capacity(W, tol)
    h, _ = h_max(W, tol)
    return max(c, h - K)


def _e0_of_p1(rho: float, eta: float, W: Channel):
    def f(p1: float) -> float:
        return float(gallager_e0_batch(rho, eta, np.array([[1.0 - p1, p1]]), W)[0])

    return f


def e0_kkt_residual(rho: float, eta: float, P: Distribution, W: Channel) -> float:
    """Violation of the Arimoto optimality condition at P.

    The per-letter normalizers c(x) must equal their P-average on the
    support of P and must not fall below it off the support; returns the
    largest violation (0 at an exact maximizer of E0 over P).
    """
    s = (1.0 + eta) / (1.0 + rho)
    log_p = _log_probs(P.probs)
    log_w = _log_probs(W.matrix)
    with np.errstate(invalid="ignore"):
        inner = logsumexp(log_p[:, None] + s * log_w, axis=0)  # (|Y|,)
        log_c_x = logsumexp(s * log_w + rho * inner[None, :], axis=1)
        log_c = logsumexp((1.0 + rho) * inner)
    ratio = np.exp(log_c_x - log_c)  # c(x)/c, should be 1 on support, >= 1 off
    on = P.probs > 1e-12
    res = float(np.max(np.abs(ratio[on] - 1.0))) if on.any() else 0.0
    off = ~on
    if off.any():
        res = max(res, float(np.max(np.maximum(1.0 - ratio[off], 0.0))))
    return res


def maximize_e0_over_p(
    rho: float, eta: float, W: Channel, tol: float = 1e-8
) -> Tuple[float, Distribution]:
    """max_P E0(rho, eta, P) for rho >= 0, with a KKT certificate.

    For |X| = 2 a dense grid plus golden refinement is authoritative;
    larger alphabets minimize the convex inner sum with SLSQP.
    """
    if rho < 0:
        raise ValueError("maximize_e0_over_p requires rho >= 0")
    nx = W.input_alphabet_size
    if nx == 1:
        p = Distribution(np.array([1.0]))
        return float(gallager_e0_batch(rho, eta, p.probs[None, :], W)[0]), p
    if rho == 0.0 and eta == 0.0:
        return 0.0, Distribution.uniform(nx)  # E0 vanishes identically

    if nx == 2:
        p1s = np.linspace(0.0, 1.0, 129)
        vals = gallager_e0_batch(rho, eta, np.column_stack([1.0 - p1s, p1s]), W)
        i = int(np.argmax(vals))
        lo, hi = p1s[max(i - 1, 0)], p1s[min(i + 1, len(p1s) - 1)]
        p1, v = _golden_max(_e0_of_p1(rho, eta, W), lo, hi, iters=60)
        if vals[i] > v:
            p1, v = p1s[i], float(vals[i])
        p_best = Distribution(np.array([1.0 - p1, p1]))
    else:
        def neg_e0(p: np.ndarray) -> float:
            q = np.clip(p, 0.0, None)
            q = q / q.sum()
            return -float(gallager_e0_batch(rho, eta, q[None, :], W)[0])

        res = minimize(
            neg_e0,
            np.full(nx, 1.0 / nx),
            method="SLSQP",
            bounds=[(0.0, 1.0)] * nx,
            constraints=[{"type": "eq", "fun": lambda p: p.sum() - 1.0}],
            options={"maxiter": 2000, "ftol": 1e-14},
        )
        if not res.success:
            raise RuntimeError(f"E0 maximization failed: {res.message}")
        q = np.clip(res.x, 0.0, None)
        p_best = Distribution(q / q.sum())
        v = -neg_e0(res.x)
    return float(v), p_best


class _CorrectDecodingTable:
    """Cached E0(-rho, 0, P) and E0(-rho, -rho, P) over (rho, P1) grids.

    The tables do not depend on (R, K), so rate sweeps and bisection reuse
    them; only the linear terms rho*R and rho*(R+K) change per query.
    """

    _cache: Dict[Tuple[bytes, int, int], "_CorrectDecodingTable"] = {}

    def __init__(self, W: Channel, n_rho: int = 512, n_p: int = 1001):
        self.rhos = np.linspace(0.0, 1.0 - 1e-6, n_rho)
        self.p1s = np.linspace(0.0, 1.0, n_p)
        p_rows = np.column_stack([1.0 - self.p1s, self.p1s])
        e0a = np.empty((n_rho, n_p))
        e0b = np.empty((n_rho, n_p))
        for i, r in enumerate(self.rhos):
            e0a[i] = gallager_e0_batch(-r, 0.0, p_rows, W)
            e0b[i] = gallager_e0_batch(-r, -r, p_rows, W)
        self.e0a, self.e0b = e0a, e0b

    @classmethod
    def get(cls, W: Channel, n_rho: int = 512, n_p: int = 1001):
        key = (W.matrix.tobytes(), n_rho, n_p)
        if key not in cls._cache:
            cls._cache[key] = cls(W, n_rho, n_p)
        return cls._cache[key]


def minimize_correct_decoding_over_p(
    W: Channel, R: float, K: float, tol: float = 1e-6
) -> Tuple[float, Distribution]:
    """min_P of the dual correct-decoding exponent.

    Dense P grid for |X| = 2 (authoritative, the objective need not be
    convex in P); larger alphabets are out of certified scope.
    """
    if R <= 0 or K <= 0:
        raise ValueError("R and K must be positive")
    from .dual import correct_decoding_exponent_dual

    nx = W.input_alphabet_size
    if nx == 1:
        p = Distribution(np.array([1.0]))
        return correct_decoding_exponent_dual(p, W, R, K), p
    if nx != 2:
        raise NotImplementedError("dense-grid minimization is restricted to |X| = 2")

    tab = _CorrectDecodingTable.get(W)
    rho = tab.rhos[:, None]
    sup_a = np.max(tab.e0a + rho * R, axis=0)
    sup_b = np.max(tab.e0b + rho * (R + K), axis=0)
    e_c = np.minimum(sup_a, sup_b)
    j = int(np.argmin(e_c))
    p = Distribution(np.array([1.0 - tab.p1s[j], tab.p1s[j]]))
    # re-solve the two 1-D sups with refinement at the winning P
    value = correct_decoding_exponent_dual(p, W, R, K)
    return value, p
