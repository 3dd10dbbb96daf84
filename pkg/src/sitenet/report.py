"""Per-unit connectivity report: delimited output plus chart rendering.

One report row summarizes one landscape unit.  Fields that are undefined
for the unit (median area or functional indices when no subnet exists)
stay empty in the CSV.  The gap column is the protected-cover fraction
minus the area-weighted connectivity index: how far realized
connectivity falls short of designated cover.

Figures are rendered headlessly to PNG next to the CSV; identical
reports produce byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from sitenet.errors import InputDataError
from sitenet.grids import format_number
from sitenet.indices import FunctionalIndices
from sitenet.morphology import StructuralShares
from sitenet.subnets import PatternStats

REPORT_COLUMNS = [
    "unit", "n_sites", "n_subnets", "median_area_km2", "share_simple",
    "share_complex", "rpc", "rapc", "isolated_share", "cover_fraction", "gap",
]


@dataclass(frozen=True)
class UnitReport:
    unit: str
    pattern: PatternStats
    shares: StructuralShares | None
    functional: FunctionalIndices | None

    @property
    def gap(self) -> float | None:
        if self.functional is None:
            return None
        return self.pattern.cover_fraction - self.functional.rpc


def _cell(value) -> str:
    return "" if value is None else format_number(value)


def write_report(reports: list[UnitReport], path) -> None:
    """Write one CSV row per unit, sorted by unit name."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REPORT_COLUMNS)
        for rep in sorted(reports, key=lambda r: r.unit):
            p, s, f = rep.pattern, rep.shares, rep.functional
            median_km2 = None if p.median_subnet_area is None else p.median_subnet_area / 1e6
            w.writerow([
                rep.unit,
                p.n_sites,
                p.n_subnets,
                _cell(median_km2),
                _cell(s.share_simple if s else None),
                _cell(s.share_complex if s else None),
                _cell(f.rpc if f else None),
                _cell(f.rapc if f else None),
                _cell(f.isolated_share if f else None),
                _cell(p.cover_fraction),
                _cell(rep.gap),
            ])


def read_report(path) -> list[dict[str, str]]:
    rows = list(csv.reader(Path(path).open()))
    if not rows or rows[0] != REPORT_COLUMNS:
        raise InputDataError(f"{path}: not a connectivity report")
    return [dict(zip(REPORT_COLUMNS, r)) for r in rows[1:] if r]


def render_report_figures(reports: list[UnitReport], out_dir) -> list[Path]:
    """Render the index-overview and cover-vs-connectivity charts.

    Units without functional indices are left out; no figure is written
    when nothing remains to plot.
    """
    out_dir = Path(out_dir)
    plotted = [r for r in sorted(reports, key=lambda r: r.unit) if r.functional is not None]
    if not plotted:
        return []
    written = []

    units = [r.unit for r in plotted]
    x = range(len(plotted))

    fig, ax = plt.subplots(figsize=(max(4.0, 1.8 * len(plotted) + 2.0), 3.6), dpi=150)
    width = 0.2
    series = [
        ("RPC", [r.functional.rpc for r in plotted]),
        ("RAPC", [r.functional.rapc for r in plotted]),
        ("isolated share", [r.functional.isolated_share for r in plotted]),
        ("complex share", [r.shares.share_complex if r.shares else 0.0 for r in plotted]),
    ]
    for s, (label, values) in enumerate(series):
        ax.bar([i + (s - 1.5) * width for i in x], values, width=width, label=label)
    ax.set_xticks(list(x))
    ax.set_xticklabels(units)
    ax.set_ylim(0, 1)
    ax.set_ylabel("index value")
    ax.set_title("Connectivity indices by unit")
    ax.legend(fontsize=8)
    fig.tight_layout()
    p = out_dir / "indices_overview.png"
    fig.savefig(p)
    plt.close(fig)
    written.append(p)

    fig, ax = plt.subplots(figsize=(max(4.0, 1.8 * len(plotted) + 2.0), 3.6), dpi=150)
    cover = [r.pattern.cover_fraction for r in plotted]
    rpc_vals = [r.functional.rpc for r in plotted]
    ax.bar([i - 0.2 for i in x], cover, width=0.4, label="protected cover")
    ax.bar([i + 0.2 for i in x], rpc_vals, width=0.4, label="RPC")
    for i, r in enumerate(plotted):
        ax.annotate(f"gap {r.gap:.3f}", (i, max(cover[i], rpc_vals[i])),
                    ha="center", va="bottom", fontsize=8)
    ax.set_xticks(list(x))
    ax.set_xticklabels(units)
    ax.set_ylabel("fraction of landscape")
    ax.set_title("Cover vs. area-weighted connectivity")
    ax.legend(fontsize=8)
    fig.tight_layout()
    p = out_dir / "connectivity_gap.png"
    fig.savefig(p)
    plt.close(fig)
    written.append(p)

    return written
