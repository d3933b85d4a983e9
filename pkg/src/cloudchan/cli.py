"""Command-line front end.

Subcommands: exponent, capacity, rmin, sweep, simulate, validate.
Rates are in nats unless --bits is given, which converts on input and
output by ln 2.  Exit codes: 0 success, 1 validation failure, 2 usage
error.  CLOUDCHAN_THREADS controls sweep-row parallelism.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from .dual import (
    SolverSettings,
    achievable_error_exponent,
    converse_error_exponent,
    correct_decoding_exponent_dual,
    r_min_jump,
)
from .input_opt import ensemble_capacity, h_max, shannon_capacity
from .probability import Channel, Distribution
from .simulate import SimConfig, estimate_error_probability
from .validation import run_validation

LN2 = math.log(2.0)


class UsageError(Exception):
    pass


def parse_channel_file(path) -> Channel:
    """Plain text channel format: '#' comments, one row of probabilities per
    input symbol.  Row-stochasticity validated to 1e-9; parsed values stored
    exactly."""
    rows = []
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            rows.append([float(tok) for tok in body.split()])
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: malformed probability: {exc}") from exc
    if not rows:
        raise UsageError(f"{path}: no channel rows found")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise UsageError(f"{path}: rows have inconsistent lengths {sorted(widths)}")
    mat = np.array(rows)
    sums = mat.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > 1e-9)[0]
    if bad.size:
        raise UsageError(f"{path}: row {bad[0]} sums to {sums[bad[0]]:.12g}, not 1")
    mat = mat / sums[:, None]  # remove float-parse drift below 1e-9
    return Channel(mat)


def parse_input_dist(text: str, W: Channel) -> Optional[Distribution]:
    """Comma-separated probabilities, or 'optimize' for None (solver picks P)."""
    if text.strip().lower() == "optimize":
        return None
    vals = np.array([float(t) for t in text.split(",")])
    if abs(vals.sum() - 1.0) > 1e-9:
        raise UsageError(f"input distribution sums to {vals.sum():.12g}, not 1")
    if vals.size != W.input_alphabet_size:
        raise UsageError("input distribution size does not match the channel")
    return Distribution(vals / vals.sum())


@dataclass
class ExperimentSpec:
    channel_path: str
    input_dist: str = "optimize"
    k_values: List[float] = field(default_factory=list)
    r_start: float = 0.0
    r_stop: float = 0.0
    r_step: float = 0.0
    quantities: List[str] = field(default_factory=list)
    out: Optional[str] = None
    seed: int = 0
    settings: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        if not self.quantities:
            raise UsageError("at least one quantity must be requested")
        needs_sweep = any(q != "capacity" for q in self.quantities)
        if needs_sweep and self.r_step <= 0:
            raise UsageError("sweep step must be positive")

    def r_values(self) -> List[float]:
        if self.r_step <= 0 or self.r_stop < self.r_start:
            return []
        count = int(math.floor((self.r_stop - self.r_start) / self.r_step + 1e-9)) + 1
        return [self.r_start + i * self.r_step for i in range(count)]


_SPEC_KEYS = {
    "channel", "input_dist", "k", "r_start", "r_stop", "r_step",
    "quantity", "out", "seed", "grid_points", "refine_iters", "rho_cap", "tol",
}
_QUANTITIES = {"achievable", "converse", "correct", "capacity", "rmin", "simulate"}


def parse_spec_file(path) -> ExperimentSpec:
    """Flat key = value format; repeated keys (k, quantity) accumulate."""
    pairs = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (part.strip() for part in body.split("=", 1))
        if key not in _SPEC_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        pairs.append((key, val))
    kv = dict(pairs)
    ks = [float(v) for k, v in pairs if k == "k"]
    quantities = [v for k, v in pairs if k == "quantity"]
    for q in quantities:
        if q not in _QUANTITIES:
            raise UsageError(f"unknown quantity {q!r}")
    if "channel" not in kv:
        raise UsageError(f"{path}: missing 'channel'")
    settings = SolverSettings(
        grid_points=int(kv.get("grid_points", 64)),
        refine_iters=int(kv.get("refine_iters", 3)),
        rho_cap=float(kv.get("rho_cap", 64.0)),
        tol=float(kv.get("tol", 1e-3)),
    )
    return ExperimentSpec(
        channel_path=kv["channel"],
        input_dist=kv.get("input_dist", "optimize"),
        k_values=ks,
        r_start=float(kv.get("r_start", 0.0)),
        r_stop=float(kv.get("r_stop", 0.0)),
        r_step=float(kv.get("r_step", 0.0)),
        quantities=quantities,
        out=kv.get("out"),
        seed=int(kv.get("seed", 0)),
        settings=settings,
    )


def _fmt(v: float, bits: bool) -> str:
    if v is None:
        return ""
    if math.isinf(v):
        return "inf"
    return f"{(v / LN2 if bits else v):.9g}"


def _sweep_row(W, P, spec: ExperimentSpec, k: float, r: float):
    row = {"K": k, "R": r, "achievable": None, "converse": None,
           "correct_decoding": None, "rho_star": None, "eta_star": None, "error": ""}
    try:
        if "achievable" in spec.quantities:
            if P is None:
                raise UsageError("achievable sweep needs an explicit input distribution")
            wit = achievable_error_exponent(P, W, r, k, spec.settings)
            row["achievable"], row["rho_star"], row["eta_star"] = wit.value, wit.rho, wit.eta
        if "converse" in spec.quantities:
            row["converse"] = converse_error_exponent(W, r, k, spec.settings).value
        if "correct" in spec.quantities:
            if P is None:
                from .input_opt import minimize_correct_decoding_over_p

                row["correct_decoding"] = minimize_correct_decoding_over_p(W, r, k)[0]
            else:
                row["correct_decoding"] = correct_decoding_exponent_dual(P, W, r, k, spec.settings)
    except Exception as exc:  # per-row failure lands in the error column
        row["error"] = str(exc)
    return row


def run_sweep(spec: ExperimentSpec, bits: bool = False, stream=None) -> int:
    """Write one CSV row per (K, R); returns the number of failed rows."""
    W = parse_channel_file(spec.channel_path)
    P = parse_input_dist(spec.input_dist, W)
    out = open(spec.out, "w", newline="") if spec.out else (stream or sys.stdout)
    writer = csv.writer(out, lineterminator="\n")
    failures = 0
    try:
        if spec.quantities == ["capacity"]:
            writer.writerow(["K", "capacity"])
            for k in spec.k_values:
                writer.writerow([_fmt(k, bits), _fmt(ensemble_capacity(W, k), bits)])
            return 0
        writer.writerow(["K", "R", "achievable", "converse", "correct_decoding",
                        "rho_star", "eta_star", "error"])
        tasks = [(k, r) for k in spec.k_values for r in spec.r_values()]
        workers = max(1, int(os.environ.get("CLOUDCHAN_THREADS", "1")))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda kr: _sweep_row(W, P, spec, *kr), tasks))
        for row in rows:  # deterministic (K, R) order
            failures += bool(row["error"])
            writer.writerow([
                _fmt(row["K"], bits), _fmt(row["R"], bits),
                _fmt(row["achievable"], bits), _fmt(row["converse"], bits),
                _fmt(row["correct_decoding"], bits),
                "" if row["rho_star"] is None else f"{row['rho_star']:.9g}",
                "" if row["eta_star"] is None else f"{row['eta_star']:.9g}",
                row["error"],
            ])
    finally:
        if spec.out:
            out.close()
    return failures


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cloudchan", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--channel", required=True)
        p.add_argument("--bits", action="store_true")

    p = sub.add_parser("exponent", help="single exponent query")
    common(p)
    p.add_argument("--input-dist", default="optimize")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--cloud-k", type=float, required=True)
    p.add_argument("--quantity", choices=["achievable", "converse", "correct"],
                   default="achievable")

    p = sub.add_parser("capacity", help="Shannon and ensemble capacity")
    common(p)
    p.add_argument("--cloud-k", type=float, required=True)

    p = sub.add_parser("rmin", help="jump point R_min(K)")
    common(p)
    p.add_argument("--cloud-k", type=float, required=True)

    p = sub.add_parser("sweep", help="curve sweep to CSV")
    p.add_argument("--settings", required=True, help="experiment spec file")
    p.add_argument("--out")
    p.add_argument("--bits", action="store_true")

    p = sub.add_parser("simulate", help="Monte Carlo ensemble simulation")
    common(p)
    p.add_argument("--input-dist", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--cloud-k", type=float, required=True)
    p.add_argument("--blocklength", type=int, required=True)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--transmissions", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decoder", choices=["ml", "suboptimal"], default="ml")
    p.add_argument("--records", help="write per-trial records to this path")

    p = sub.add_parser("validate", help="run the self-check suite")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    bits = getattr(args, "bits", False)
    scale = LN2 if bits else 1.0  # input rates arrive in bits under --bits
    try:
        if args.command == "exponent":
            W = parse_channel_file(args.channel)
            P = parse_input_dist(args.input_dist, W)
            r, k = args.rate * scale, args.cloud_k * scale
            if args.quantity == "achievable":
                if P is None:
                    raise UsageError("achievable needs --input-dist with probabilities")
                wit = achievable_error_exponent(P, W, r, k)
                print(f"achievable {_fmt(wit.value, bits)} rho_star {wit.rho:.9g} "
                      f"eta_star {wit.eta:.9g}")
            elif args.quantity == "converse":
                wit = converse_error_exponent(W, r, k)
                print(f"converse {_fmt(wit.value, bits)}")
            else:
                if P is None:
                    from .input_opt import minimize_correct_decoding_over_p

                    val, pbest = minimize_correct_decoding_over_p(W, r, k)
                    print(f"correct_decoding {_fmt(val, bits)} "
                          f"input_dist {','.join(f'{x:.6g}' for x in pbest.probs)}")
                else:
                    val = correct_decoding_exponent_dual(P, W, r, k)
                    print(f"correct_decoding {_fmt(val, bits)}")
        elif args.command == "capacity":
            W = parse_channel_file(args.channel)
            k = args.cloud_k * scale
            c, p = shannon_capacity(W)
            h, _ = h_max(W)
            print(f"shannon_capacity {_fmt(c, bits)}")
            print(f"h_max {_fmt(h, bits)}")
            print(f"ensemble_capacity {_fmt(ensemble_capacity(W, k), bits)}")
        elif args.command == "rmin":
            W = parse_channel_file(args.channel)
            print(f"r_min {_fmt(r_min_jump(W, args.cloud_k * scale), bits)}")
        elif args.command == "sweep":
            spec = parse_spec_file(args.settings)
            if args.out:
                spec.out = args.out
            failures = run_sweep(spec, bits=bits)
            return 1 if failures else 0
        elif args.command == "simulate":
            W = parse_channel_file(args.channel)
            P = parse_input_dist(args.input_dist, W)
            if P is None:
                raise UsageError("simulate needs --input-dist with probabilities")
            cfg = SimConfig(
                n=args.blocklength, R=args.rate * scale, K=args.cloud_k * scale,
                P=P, W=W, num_instances=args.instances,
                num_transmissions_per_instance=args.transmissions, seed=args.seed,
            )
            sink = open(args.records, "w") if args.records else None
            try:
                est, ci, counts = estimate_error_probability(
                    cfg, decoder=args.decoder, record_sink=sink
                )
            finally:
                if sink:
                    sink.close()
            print(f"error_probability {est:.9g} ci95 {ci:.9g} "
                  f"errors {counts['errors']} ties {counts['ties']} trials {counts['trials']}")
        elif args.command == "validate":
            checks = run_validation(args.level)
            print(json.dumps(checks, indent=2))
            return 0 if all(c["passed"] for c in checks) else 1
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
