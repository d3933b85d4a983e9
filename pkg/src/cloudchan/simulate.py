"""Monte Carlo simulation of the cloud-channel ensemble.

A channel instance is, per message, a multiset of floor(e^{nK}) output
sequences drawn memorylessly from W given the codeword; the channel action
picks one cloud member uniformly.  The replica-counting ML decoder and the
suboptimal single-replica decoder are both implemented, together with the
exact two-competing-clouds probability.

RNG contract: Philox (counter-based, 4x64) keyed as seed * 2^64 +
instance_index, so per-instance substreams are reproducible and
order-independent.  Identical SimConfig => bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import binom

from .probability import Channel, Distribution

MEMORY_BUDGET_BYTES = 2 << 30
WILSON_Z = 1.959963984540054  # 95%


@dataclass(frozen=True)
class SimConfig:
    n: int
    R: float
    K: float
    P: Distribution
    W: Channel
    num_instances: int
    num_transmissions_per_instance: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("block length must be >= 1")
        if self.R <= 0 or self.K <= 0:
            raise ValueError("R and K must be positive")
        if self.P.size != self.W.input_alphabet_size:
            raise ValueError("input distribution size != |X|")
        if self.cloud_size < 1:
            raise ValueError("cloud size floor(e^{nK}) must be >= 1")
        est = self.num_messages * self.cloud_size * 8 + self.num_messages * self.n
        if est > MEMORY_BUDGET_BYTES:
            raise ValueError(
                f"instance needs ~{est} bytes "
                f"(floor(e^(n*R)) * floor(e^(n*K)) * 8 = "
                f"{self.num_messages} * {self.cloud_size} * 8), "
                f"over the {MEMORY_BUDGET_BYTES} byte budget"
            )

    @property
    def num_messages(self) -> int:
        # floor(e^{nR}), but never fewer than two messages so that a
        # decoding error is possible at all
        return max(2, math.floor(math.exp(self.n * self.R)))

    @property
    def cloud_size(self) -> int:
        return math.floor(math.exp(self.n * self.K))


@dataclass(frozen=True)
class ChannelInstance:
    """Per message: sorted array of base-|Y| packed cloud members."""

    clouds: Tuple[np.ndarray, ...]
    n: int
    ny: int

    def replica_counts(self, packed: int) -> np.ndarray:
        lo = np.array([np.searchsorted(c, packed, "left") for c in self.clouds])
        hi = np.array([np.searchsorted(c, packed, "right") for c in self.clouds])
        return (hi - lo).astype(np.int64)


@dataclass(frozen=True)
class DecodeOutcome:
    sent: int
    decoded: int
    tie_broken: bool
    replica_counts: np.ndarray


def pack_sequences(seqs: np.ndarray, ny: int) -> np.ndarray:
    """Base-ny packing of integer sequences (..., n) -> (...,) int64."""
    n = seqs.shape[-1]
    pows = ny ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return seqs.astype(np.int64) @ pows


def instance_rng(seed: int, instance_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + instance_index))


def _draw_from_rows(cum_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling; cum_rows (n, ny) per-position CDFs, u (..., n)."""
    return (u[..., None] > cum_rows[None, :, :]).sum(axis=-1)


def generate_instance(cfg: SimConfig, rng: np.random.Generator):
    """Draw a codebook and one channel instance; deterministic given rng state."""
    m_count, l_count = cfg.num_messages, cfg.cloud_size
    cum_p = np.cumsum(cfg.P.probs)
    codebook = (rng.random((m_count, cfg.n))[:, :, None] > cum_p[None, None, :-1]).sum(
        axis=-1
    )
    cum_w = np.cumsum(cfg.W.matrix, axis=1)
    ny = cfg.W.output_alphabet_size
    clouds: List[np.ndarray] = []
    for m in range(m_count):
        rows = cum_w[codebook[m]]  # (n, ny)
        y = _draw_from_rows(rows[:, :-1], rng.random((l_count, cfg.n)))
        clouds.append(np.sort(pack_sequences(y, ny)))
    return codebook, ChannelInstance(tuple(clouds), cfg.n, ny)


def _break_tie(candidates: np.ndarray, rng: np.random.Generator) -> int:
    return int(candidates[rng.integers(len(candidates))])


def ml_decode(
    instance: ChannelInstance,
    received_packed: int,
    rng: np.random.Generator,
    sent: int = -1,
) -> DecodeOutcome:
    """Pick the message with the most replicas of the received block.

    Ties (including the all-zero-count case) are broken uniformly at random
    from the seeded stream and flagged.
    """
    counts = instance.replica_counts(received_packed)
    if counts.max() == 0:
        return DecodeOutcome(sent, _break_tie(np.arange(len(counts)), rng), True, counts)
    tied = np.flatnonzero(counts == counts.max())
    if len(tied) > 1:
        return DecodeOutcome(sent, _break_tie(tied, rng), True, counts)
    return DecodeOutcome(sent, int(tied[0]), False, counts)


def suboptimal_decode(
    instance: ChannelInstance,
    codebook: np.ndarray,
    received: np.ndarray,
    W: Channel,
    K: float,
    rng: np.random.Generator,
    sent: int = -1,
) -> DecodeOutcome:
    """Replica-oblivious decoder: among messages holding at least one replica
    of the received block, maximize max{-K, -B} where B is the empirical
    per-letter -ln W(y|x) of (received, codeword)."""
    packed = int(pack_sequences(received, instance.ny))
    counts = instance.replica_counts(packed)
    candidates = np.flatnonzero(counts > 0)
    if candidates.size == 0:
        return DecodeOutcome(sent, _break_tie(np.arange(len(counts)), rng), True, counts)
    with np.errstate(divide="ignore"):
        log_w = np.log(W.matrix)
    scores = np.empty(candidates.size)
    for i, m in enumerate(candidates):
        b = -log_w[codebook[m], received].mean()
        scores[i] = max(-K, -b)
    tied = candidates[np.flatnonzero(scores == scores.max())]
    if len(tied) > 1:
        return DecodeOutcome(sent, _break_tie(tied, rng), True, counts)
    return DecodeOutcome(sent, int(tied[0]), False, counts)


def _wilson_halfwidth(err: int, total: int) -> float:
    if total == 0:
        return 1.0
    z2 = WILSON_Z**2
    phat = err / total
    return float(WILSON_Z * math.sqrt(phat * (1 - phat) / total + z2 / (4 * total**2)) / (1 + z2 / total))


def estimate_error_probability(
    cfg: SimConfig,
    decoder: str = "ml",
    record_sink=None,
):
    """Ensemble-average error estimate with a Wilson 95% half-width.

    decoder: "ml" or "suboptimal".  record_sink, if given, receives one
    "instance trial sent decoded tied" line per trial.
    """
    if decoder not in ("ml", "suboptimal"):
        raise ValueError("decoder must be 'ml' or 'suboptimal'")
    errors = ties = total = 0
    pows = cfg.W.output_alphabet_size ** np.arange(cfg.n - 1, -1, -1, dtype=np.int64)
    for inst_idx in range(cfg.num_instances):
        rng = instance_rng(cfg.seed, inst_idx)
        codebook, instance = generate_instance(cfg, rng)
        sent = rng.integers(cfg.num_messages, size=cfg.num_transmissions_per_instance)
        member = rng.integers(cfg.cloud_size, size=cfg.num_transmissions_per_instance)
        for trial, (m, j) in enumerate(zip(sent, member)):
            packed = int(instance.clouds[m][j])
            if decoder == "ml":
                out = ml_decode(instance, packed, rng, sent=int(m))
            else:
                received = _unpack(packed, cfg.n, cfg.W.output_alphabet_size)
                out = suboptimal_decode(
                    instance, codebook, received, cfg.W, cfg.K, rng, sent=int(m)
                )
            errors += out.decoded != out.sent
            ties += out.tie_broken
            total += 1
            if record_sink is not None:
                record_sink.write(
                    f"{inst_idx} {trial} {out.sent} {out.decoded} {int(out.tie_broken)}\n"
                )
    estimate = errors / total
    return estimate, _wilson_halfwidth(errors, total), {
        "errors": errors,
        "ties": ties,
        "trials": total,
    }


def paired_decoder_comparison(cfg: SimConfig):
    """Run ML and the suboptimal decoder on identical instances and trials.

    Returns ((ml_rate, ml_ci), (sub_rate, sub_ci)).  Tie-break draws come
    from decoder-specific substreams so the paired trials stay aligned.
    """
    ml_err = sub_err = total = 0
    for inst_idx in range(cfg.num_instances):
        rng = instance_rng(cfg.seed, inst_idx)
        codebook, instance = generate_instance(cfg, rng)
        sent = rng.integers(cfg.num_messages, size=cfg.num_transmissions_per_instance)
        member = rng.integers(cfg.cloud_size, size=cfg.num_transmissions_per_instance)
        tie_rng_ml = instance_rng(cfg.seed ^ 0x6D6C, inst_idx)
        tie_rng_sub = instance_rng(cfg.seed ^ 0x7375, inst_idx)
        for m, j in zip(sent, member):
            packed = int(instance.clouds[m][j])
            received = _unpack(packed, cfg.n, cfg.W.output_alphabet_size)
            out_ml = ml_decode(instance, packed, tie_rng_ml, sent=int(m))
            out_sub = suboptimal_decode(
                instance, codebook, received, cfg.W, cfg.K, tie_rng_sub, sent=int(m)
            )
            ml_err += out_ml.decoded != out_ml.sent
            sub_err += out_sub.decoded != out_sub.sent
            total += 1
    return (
        (ml_err / total, _wilson_halfwidth(ml_err, total)),
        (sub_err / total, _wilson_halfwidth(sub_err, total)),
    )


def _unpack(packed: int, n: int, ny: int) -> np.ndarray:
    out = np.empty(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[i] = packed % ny
        packed //= ny
    return out


def competition_probability(M: int, alpha: float) -> float:
    """Pr{N >= N1 + 1 | N >= 1} for N ~ B(M, alpha), N1 ~ B(M-1, alpha).

    Exact summation of binomial terms (no sampling); equals 1 at alpha = 1.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must be in (0, 1]")
    if alpha == 1.0:
        return 1.0
    k = np.arange(1, M + 1)
    numer = float(np.sum(binom.pmf(k, M, alpha) * binom.cdf(k - 1, M - 1, alpha)))
    denom = float(-np.expm1(M * math.log1p(-alpha)))  # Pr{N >= 1}
    return numer / denom
