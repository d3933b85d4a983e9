"""Brute-force minimizers over joint distributions on a simplex lattice.

Ground-truth oracle for the dual solvers: every joint distribution with
probabilities in multiples of 1/m is enumerated and the exponent objectives
are evaluated exactly on that lattice.  Deliberately independent of the
log-sum-exp machinery in dual.py.

Cells where the reference measure vanishes (P(x)W(y|x) = 0, W = 0, or
P(x) = 0, depending on the functional) are handled with a large negative
log sentinel, which drives the objective above INF_CUT and so excludes any
lattice point putting mass there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Dict, Tuple

import numpy as np

from .probability import Channel, Distribution, JointDistribution

LOG_SENTINEL = -1e30


@dataclass(frozen=True)
class SimplexGrid:
    """Lattice of all probability vectors with denominator `resolution`."""

    resolution: int
    dimension: int

    MAX_POINTS: ClassVar[int] = 40_000_000

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.num_points() > self.MAX_POINTS:
            raise ValueError(
                f"lattice with {self.num_points()} points exceeds the cap "
                f"of {self.MAX_POINTS}; lower the resolution"
            )

    def num_points(self) -> int:
        from math import comb

        return comb(self.resolution + self.dimension - 1, self.dimension - 1)

    def counts(self) -> np.ndarray:
        """All integer count vectors of length `dimension` summing to resolution."""
        m, k = self.resolution, self.dimension
        pts = np.zeros((1, 0), dtype=np.int32)
        sums = np.zeros(1, dtype=np.int32)
        for _ in range(k - 1):
            room = m - sums + 1
            idx = np.repeat(np.arange(len(sums), dtype=np.int64), room)
            # value 0..room-1 within each block
            offs = np.arange(idx.size, dtype=np.int64) - np.repeat(
                np.cumsum(room) - room, room
            )
            pts = np.hstack([pts[idx], offs[:, None].astype(np.int32)])
            sums = sums[idx] + offs.astype(np.int32)
        last = (m - sums).astype(np.int32)
        return np.hstack([pts, last[:, None]])


def _safe_log(p: np.ndarray) -> np.ndarray:
    out = np.full_like(p, LOG_SENTINEL, dtype=float)
    pos = p > 0
    out[pos] = np.log(p[pos])
    return out


class JointLattice:
    """Cached per-(resolution, |Y|, |X|) lattice with precomputed functionals.

    Cell layout is the flattened |Y| x |X| joint (y-major), matching
    JointDistribution.probs.ravel().
    """

    INF_CUT = 1e20
    _cache: Dict[Tuple[int, int, int], "JointLattice"] = {}

    def __init__(self, resolution: int, ny: int, nx: int):
        self.m = resolution
        self.ny = ny
        self.nx = nx
        grid = SimplexGrid(resolution, ny * nx)
        counts = grid.counts()
        self.n_points = counts.shape[0]
        self.counts_f = counts.astype(np.float32)
        m = float(resolution)

        q = counts.astype(np.float64) / m
        with np.errstate(divide="ignore", invalid="ignore"):
            ql = q * np.log(q)
        ql[q == 0] = 0.0
        self.q_log_q = ql.sum(axis=1)

        t = q.reshape(-1, ny, nx).sum(axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            tl = t * np.log(t)
        tl[t == 0] = 0.0
        self.t_log_t = tl.sum(axis=1)  # equals -H(T) per lattice point

        px = q.reshape(-1, ny, nx).sum(axis=1)
        self.x_marginal_f = px.astype(np.float32)
        with np.errstate(divide="ignore", invalid="ignore"):
            pl = px * np.log(px)
        pl[px == 0] = 0.0
        self.px_log_px = pl.sum(axis=1)

        self._x_group = None  # lazily built grouping by x-marginal

    @classmethod
    def get(cls, resolution: int, ny: int, nx: int) -> "JointLattice":
        key = (resolution, ny, nx)
        if key not in cls._cache:
            cls._cache[key] = cls(resolution, ny, nx)
        return cls._cache[key]

    # -- per-query functionals, one float64 vector per lattice point --------

    def divergence(self, P: Distribution, W: Channel) -> np.ndarray:
        """D(q || PW) per lattice point (huge where q is not << PW)."""
        pw = (W.matrix.T * P.probs[None, :]).ravel()
        log_pw = _safe_log(pw).astype(np.float32)
        return self.q_log_q - (self.counts_f @ log_pw).astype(np.float64) / self.m

    def functional_a(self, P: Distribution) -> np.ndarray:
        """A = D(V || P | T) per lattice point (for the given, fixed P)."""
        log_p = _safe_log(P.probs).astype(np.float32)
        qlp = (self.x_marginal_f @ log_p).astype(np.float64)
        return self.q_log_q - self.t_log_t - qlp

    def functional_b(self, W: Channel) -> np.ndarray:
        """B = E_q[-ln W] per lattice point (huge where q hits W = 0)."""
        log_w = _safe_log(W.matrix.T.ravel()).astype(np.float32)
        return -(self.counts_f @ log_w).astype(np.float64) / self.m

    def mutual_information(self) -> np.ndarray:
        """I(q) with respect to q's own marginals."""
        return self.q_log_q - self.t_log_t - self.px_log_px

    def cond_divergence_from_channel(self, W: Channel) -> np.ndarray:
        """D(U || W | P) where P, U are q's own x-marginal and conditional."""
        return self.q_log_q - self.px_log_px + self.functional_b(W)

    def joint_at(self, index: int) -> JointDistribution:
        q = self.counts_f[index].astype(np.float64) / self.m
        return JointDistribution((q / q.sum()).reshape(self.ny, self.nx))

    def x_marginal_groups(self):
        """(group id per point, group count array of shape (G, |X|))."""
        if self._x_group is None:
            cnt = np.rint(self.x_marginal_f * self.m).astype(np.int32)
            uniq, inv = np.unique(cnt, axis=0, return_inverse=True)
            self._x_group = (inv, uniq)
        return self._x_group


def _finite_or_inf(v: float) -> float:
    return v if v < JointLattice.INF_CUT else float("inf")


def primal_achievable(
    P: Distribution, W: Channel, R: float, K: float, g: SimplexGrid
) -> Tuple[float, JointDistribution]:
    """Lattice minimum of D(TV||PW) + |A - R + |B - K|^+|^+ with its minimizer."""
    lat = JointLattice.get(g.resolution, W.output_alphabet_size, W.input_alphabet_size)
    d = lat.divergence(P, W)
    a = lat.functional_a(P)
    b = lat.functional_b(W)
    obj = d + np.maximum(a - R + np.maximum(b - K, 0.0), 0.0)
    i = int(np.argmin(obj))
    # float32 accumulation can leave the exponent a hair below zero
    return _finite_or_inf(max(float(obj[i]), 0.0)), lat.joint_at(i)


def primal_correct_decoding(
    P: Distribution, W: Channel, R: float, K: float, g: SimplexGrid
) -> Tuple[float, JointDistribution]:
    """Lattice minimum of D(TV||PW) + |R - A - |B - K|^+|^+ with its minimizer."""
    lat = JointLattice.get(g.resolution, W.output_alphabet_size, W.input_alphabet_size)
    d = lat.divergence(P, W)
    a = lat.functional_a(P)
    b = lat.functional_b(W)
    obj = d + np.maximum(R - a - np.maximum(b - K, 0.0), 0.0)
    i = int(np.argmin(obj))
    return _finite_or_inf(max(float(obj[i]), 0.0)), lat.joint_at(i)


def primal_converse(W: Channel, R: float, K: float, g: SimplexGrid) -> float:
    """max over lattice input laws P of min over joints with x-marginal P of
    D(U||W|P), subject to I + |B - K|^+ <= R; +inf as soon as some P has an
    empty constraint set."""
    lat = JointLattice.get(g.resolution, W.output_alphabet_size, W.input_alphabet_size)
    i_q = lat.mutual_information()
    b = lat.functional_b(W)
    d_u = lat.cond_divergence_from_channel(W)
    feasible = i_q + np.maximum(b - K, 0.0) <= R
    group, uniq = lat.x_marginal_groups()
    per_p = np.full(uniq.shape[0], np.inf)
    if feasible.any():
        np.minimum.at(per_p, group[feasible], d_u[feasible])
    best = float(np.max(per_p))
    return _finite_or_inf(best) if np.isfinite(best) else float("inf")


def primal_rmin(
    W: Channel, K: float, g: SimplexGrid, p_grid_points: int = 81
) -> float:
    """Lattice evaluation of max_P min_TV {D(V||P|T) + |B - K|^+}.

    Outer max over P: dense 1-D grid plus local refinement for |X| = 2,
    dense Dirichlet-free coarse grid otherwise is out of scope.
    """
    if W.input_alphabet_size != 2:
        raise NotImplementedError("primal_rmin grid oracle is restricted to |X| = 2")
    lat = JointLattice.get(g.resolution, W.output_alphabet_size, W.input_alphabet_size)
    base = lat.q_log_q - lat.t_log_t
    relu_b = np.maximum(lat.functional_b(W) - K, 0.0)

    def inner(p1: float) -> float:
        p = Distribution(np.array([1.0 - p1, p1]))
        log_p = _safe_log(p.probs).astype(np.float32)
        a = base - (lat.x_marginal_f @ log_p).astype(np.float64)
        return float(np.min(a + relu_b))

    p1s = np.linspace(0.0, 1.0, p_grid_points)
    vals = np.array([inner(v) for v in p1s])
    i = int(np.argmax(vals))
    lo, hi = p1s[max(i - 1, 0)], p1s[min(i + 1, len(p1s) - 1)]
    from .dual import _golden_max

    _, v = _golden_max(inner, lo, hi, iters=40)
    return max(float(vals[i]), v)
