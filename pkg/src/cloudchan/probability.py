"""Finite-alphabet probability primitives.

Distributions, channels (row-stochastic matrices), joint distributions over
Y x X, and the information functionals that the exponent formulas are built
from.  Everything is in nats and follows the conventions 0*ln(0) = 0 and
t*ln(t/0) = +inf for t > 0.  NaN is never returned: an operation either
yields a finite float or float('inf').
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12


class DimensionMismatchError(ValueError):
    """Alphabet sizes of the operands do not agree."""


def _check_finite(a: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or infinite entries")


@dataclass(frozen=True)
class Distribution:
    """Probability vector over a finite alphabet.

    Entries must be nonnegative and sum to 1 within NORM_TOL.  Inputs
    outside tolerance are rejected, not renormalized.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        _check_finite(p, "probs")
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probs must be a nonempty 1-D vector")
        if np.any(p < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def size(self) -> int:
        return self.probs.size

    @staticmethod
    def uniform(k: int) -> "Distribution":
        return Distribution(np.full(k, 1.0 / k))


@dataclass(frozen=True)
class Channel:
    """Row-stochastic |X| x |Y| matrix; row x is W(.|x)."""

    matrix: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.matrix, dtype=float)
        _check_finite(w, "matrix")
        if w.ndim != 2 or 0 in w.shape:
            raise ValueError("channel matrix must be a nonempty 2-D array")
        if np.any(w < 0) or np.any(w > 1):
            raise ValueError("channel entries must lie in [0, 1]")
        sums = w.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > NORM_TOL)[0]
        if bad.size:
            raise ValueError(
                f"channel row {bad[0]} sums to {sums[bad[0]]!r}, not 1"
            )
        w.flags.writeable = False
        object.__setattr__(self, "matrix", w)

    @property
    def input_alphabet_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_alphabet_size(self) -> int:
        return self.matrix.shape[1]

    @staticmethod
    def bsc(p: float) -> "Channel":
        return Channel(np.array([[1 - p, p], [p, 1 - p]]))

    def output_distribution(self, P: Distribution) -> Distribution:
        """T(y) = sum_x P(x) W(y|x)."""
        if P.size != self.input_alphabet_size:
            raise DimensionMismatchError("input distribution size != |X|")
        return Distribution(P.probs @ self.matrix)


@dataclass(frozen=True)
class JointDistribution:
    """Joint probabilities q(y, x) as a |Y| x |X| matrix.

    Marginal and conditional accessors realize the two factorizations
    T(y)V(x|y) and P(x)U(y|x).  Conditionals are defined only on symbols
    with positive marginal; rows/columns with zero marginal come back as
    all-zero.
    """

    probs: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.probs, dtype=float)
        _check_finite(q, "probs")
        if q.ndim != 2 or 0 in q.shape:
            raise ValueError("joint probabilities must be a nonempty 2-D array")
        if np.any(q < 0):
            raise ValueError("joint probabilities must be nonnegative")
        if abs(q.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"joint probabilities sum to {q.sum()!r}, not 1")
        q.flags.writeable = False
        object.__setattr__(self, "probs", q)

    @property
    def output_alphabet_size(self) -> int:
        return self.probs.shape[0]

    @property
    def input_alphabet_size(self) -> int:
        return self.probs.shape[1]

    def y_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def x_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def conditional_x_given_y(self) -> np.ndarray:
        """V(x|y); rows with T(y) = 0 are left all-zero."""
        t = self.y_marginal()
        v = np.zeros_like(self.probs)
        pos = t > 0
        v[pos] = self.probs[pos] / t[pos, None]
        return v

    def conditional_y_given_x(self) -> np.ndarray:
        """U(y|x); columns with P(x) = 0 are left all-zero."""
        p = self.x_marginal()
        u = np.zeros_like(self.probs)
        pos = p > 0
        u[:, pos] = self.probs[:, pos] / p[None, pos]
        return u

    @staticmethod
    def from_input_and_channel(P: Distribution, W: Channel) -> "JointDistribution":
        """The joint PW with q(y, x) = P(x) W(y|x)."""
        if P.size != W.input_alphabet_size:
            raise DimensionMismatchError("input distribution size != |X|")
        return JointDistribution((W.matrix * P.probs[:, None]).T)


def _xlogx(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def _rel_entropy_sum(p: np.ndarray, r: np.ndarray) -> float:
    """sum p*ln(p/r) with 0*ln0 = 0; +inf where p > 0 and r = 0."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    pos = p > 0
    if np.any(r[pos] <= 0):
        return float("inf")
    return float(np.sum(p[pos] * np.log(p[pos] / r[pos])))


def divergence_joint(q: JointDistribution, P: Distribution, W: Channel) -> float:
    """D(q || PW) in nats; +inf if q is not absolutely continuous wrt PW."""
    if q.input_alphabet_size != P.size or q.probs.shape != W.matrix.T.shape:
        raise DimensionMismatchError("joint/input/channel sizes do not agree")
    pw = W.matrix.T * P.probs[None, :]
    return _rel_entropy_sum(q.probs, pw)


def functional_A(q: JointDistribution, P: Distribution) -> float:
    """A = D(V || P | T) = sum_y T(y) sum_x V(x|y) ln(V(x|y)/P(x)).

    Equivalently D(q || T x P), which is how it is computed here.
    """
    if q.input_alphabet_size != P.size:
        raise DimensionMismatchError("joint X-alphabet size != |P|")
    t = q.y_marginal()
    return _rel_entropy_sum(q.probs, t[:, None] * P.probs[None, :])


def functional_B(q: JointDistribution, W: Channel) -> float:
    """B = E_q[-ln W(Y|X)]; +inf if q puts mass where W = 0."""
    if q.probs.shape != W.matrix.T.shape:
        raise DimensionMismatchError("joint/channel sizes do not agree")
    wt = W.matrix.T
    pos = q.probs > 0
    if np.any(wt[pos] <= 0):
        return float("inf")
    return float(-np.sum(q.probs[pos] * np.log(wt[pos])))


def functional_H(T: Distribution) -> float:
    """Shannon entropy of T in nats."""
    return float(-np.sum(_xlogx(T.probs)))


def entropy_vector(p: np.ndarray) -> float:
    """Entropy of a bare probability vector (no validation)."""
    return float(-np.sum(_xlogx(np.asarray(p, dtype=float))))


def mutual_information(P: Distribution, W: Channel) -> float:
    """I(P, W) = A evaluated at the joint PW."""
    return functional_A(JointDistribution.from_input_and_channel(P, W), P)
