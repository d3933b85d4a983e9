"""Turn sweep CSVs into exponent / capacity figures.

Exponent CSVs carry one row per (K, R) with lower-bound (achievable),
upper-bound (converse) and correct-decoding columns; "inf" cells mark the
divergence region of the upper bound and are drawn as a vertical dashed
asymptote at the last finite rate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

EXPONENT_COLUMNS = ("K", "R", "achievable", "converse", "correct_decoding")
CAPACITY_COLUMNS = ("K", "capacity")


class RenderError(Exception):
    pass


@dataclass
class PlotSpec:
    csv_path: str
    kind: str  # "exponents" | "capacity"
    out_path: str
    k_values: Optional[List[float]] = None  # None = every K in the file
    x_label: str = "R [nats]"
    y_label: str = "exponent [nats]"
    title: str = ""

    def __post_init__(self):
        if self.kind not in ("exponents", "capacity"):
            raise RenderError(f"unknown figure kind {self.kind!r}")


@dataclass
class RenderSummary:
    """What ended up in the figure; handy for structural tests."""

    lower_curves: int = 0
    upper_curves: int = 0
    correct_curves: int = 0
    asymptotes: int = 0
    capacity_points: int = 0
    k_values: List[float] = field(default_factory=list)


def _read_csv(path: str, required: tuple) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RenderError(f"{path}: empty CSV")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise RenderError(f"{path}: missing columns {missing}")
        rows = list(reader)
    if not rows:
        raise RenderError(f"{path}: no data rows")
    return rows


def _parse(cell: str) -> float:
    cell = cell.strip()
    if not cell:
        return math.nan
    if cell == "inf":
        return math.inf
    return float(cell)


def _plot_quantity(ax, r, v, label, style, summary, counter):
    finite = np.isfinite(v) & ~np.isnan(v)
    if not finite.any():
        return
    ax.plot(r[finite], v[finite], style, label=label)
    setattr(summary, counter, getattr(summary, counter) + 1)
    if np.isinf(v).any():
        # divergence region at low rates: asymptote at the boundary, i.e. the
        # first finite rate after the infinite cells
        above = r[finite][r[finite] > r[np.isinf(v)].max()]
        edge = above.min() if above.size else r[finite].max()
        ax.axvline(float(edge), linestyle="--", color="gray", linewidth=1)
        summary.asymptotes += 1


def render(spec: PlotSpec) -> RenderSummary:
    """Draw the figure and write it to spec.out_path; returns a summary."""
    if spec.kind == "capacity":
        rows = _read_csv(spec.csv_path, CAPACITY_COLUMNS)
        k = np.array([_parse(r["K"]) for r in rows])
        c = np.array([_parse(r["capacity"]) for r in rows])
        order = np.argsort(k)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(k[order], c[order], "-")
        ax.set_xlabel("K [nats]")
        ax.set_ylabel("C(W, K) [nats]")
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        fig.savefig(spec.out_path)
        plt.close(fig)
        return RenderSummary(capacity_points=len(rows), k_values=sorted(set(k.tolist())))

    rows = _read_csv(spec.csv_path, EXPONENT_COLUMNS)
    ks = sorted({_parse(r["K"]) for r in rows})
    if spec.k_values is not None:
        ks = [k for k in ks if any(abs(k - want) < 1e-9 for want in spec.k_values)]
        if not ks:
            raise RenderError("none of the requested K values appear in the CSV")

    summary = RenderSummary(k_values=ks)
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for k in ks:
        sub = [r for r in rows if abs(_parse(r["K"]) - k) < 1e-9]
        r_vals = np.array([_parse(r["R"]) for r in sub])
        order = np.argsort(r_vals)
        r_vals = r_vals[order]
        for col, style, counter in (
            ("achievable", "-", "lower_curves"),
            ("converse", ":", "upper_curves"),
            ("correct_decoding", "-.", "correct_curves"),
        ):
            v = np.array([_parse(row[col]) for row in sub])[order]
            _plot_quantity(ax, r_vals, v, f"{col} K={k:g}", style, summary, counter)
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    Path(spec.out_path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_path)
    plt.close(fig)
    return summary
