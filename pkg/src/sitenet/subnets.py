"""Subnet components and network-pattern statistics.

A subnet is a connected component of the rasterized site cells:
physically overlapping or adjacent sites fuse into one unit.  Labeling
uses two-pass union-find under 8-connectivity by default (4 available
for sensitivity runs) and assigns ids 1..n in row-major order of first
appearance, so output is deterministic.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sitenet.errors import InputDataError, InvariantError
from sitenet.grids import CategoricalGrid, format_number, require_aligned

_NEIGHBORS_SCANNED = {
    4: ((-1, 0), (0, -1)),
    8: ((-1, -1), (-1, 0), (-1, 1), (0, -1)),
}


@dataclass(frozen=True)
class SubnetRecord:
    subnet_id: int
    cell_count: int
    area_m2: float
    member_site_ids: tuple[int, ...]


@dataclass(frozen=True)
class SubnetLabeling:
    """Per-cell subnet ids (0 = background) plus the subnet table."""

    labels: CategoricalGrid
    subnets: tuple[SubnetRecord, ...]

    @property
    def n(self) -> int:
        return len(self.subnets)

    def areas(self) -> list[float]:
        return [s.area_m2 for s in self.subnets]

    def site_ids(self) -> set[int]:
        return {sid for s in self.subnets for sid in s.member_site_ids}


class _UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        root = x
        while self.parent.setdefault(root, root) != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def label_subnets(
    sites: CategoricalGrid,
    overlaps: dict[tuple[int, int], tuple[int, ...]] | None = None,
    connectivity: int = 8,
) -> SubnetLabeling:
    """Group site cells (code > 0) into connected components.

    Overlap cells already sit in both claiming sites' footprints, so the
    spatial components fuse them automatically; the side table only
    feeds the member-site bookkeeping.
    """
    if connectivity not in _NEIGHBORS_SCANNED:
        raise InputDataError(f"connectivity must be 4 or 8, got {connectivity}")
    overlaps = overlaps or {}
    nrows, ncols = sites.header.shape
    vals = sites.values
    uf = _UnionFind()
    offsets = _NEIGHBORS_SCANNED[connectivity]

    for i in range(nrows):
        for j in range(ncols):
            if vals[i, j] <= 0:
                continue
            idx = i * ncols + j
            uf.find(idx)
            for di, dj in offsets:
                ni, nj = i + di, j + dj
                if 0 <= ni < nrows and 0 <= nj < ncols and vals[ni, nj] > 0:
                    uf.union(idx, ni * ncols + nj)

    labels = np.zeros((nrows, ncols), dtype=np.int64)
    ids: dict[int, int] = {}
    counts: dict[int, int] = {}
    members: dict[int, set[int]] = {}
    for i in range(nrows):
        for j in range(ncols):
            if vals[i, j] <= 0:
                continue
            root = uf.find(i * ncols + j)
            if root not in ids:
                ids[root] = len(ids) + 1
                counts[ids[root]] = 0
                members[ids[root]] = set()
            k = ids[root]
            labels[i, j] = k
            counts[k] += 1
            members[k].add(int(vals[i, j]))
            for sid in overlaps.get((i, j), ()):
                members[k].add(sid)

    area = sites.header.cell_area
    records = tuple(
        SubnetRecord(k, counts[k], counts[k] * area, tuple(sorted(members[k])))
        for k in sorted(counts)
    )
    return SubnetLabeling(CategoricalGrid(sites.header, labels), records)


@dataclass(frozen=True)
class PatternStats:
    """Size-and-number summary of the site network in one landscape unit."""

    n_sites: int
    n_subnets: int
    median_subnet_area: float | None  # m2; None when there are no subnets
    total_site_area: float  # m2
    landscape_area: float  # m2
    cover_fraction: float


def pattern_from_records(
    records: tuple[SubnetRecord, ...] | list[SubnetRecord],
    landscape_mask: CategoricalGrid,
) -> PatternStats:
    """Pattern statistics from a subnet table plus the landscape mask.

    The landscape area is the count of non-nodata mask cells times the
    cell area; the protected-cover fraction is site area over that.
    """
    in_unit = int(np.count_nonzero(~landscape_mask.nodata_mask))
    if in_unit == 0:
        raise InputDataError("landscape mask has no in-unit cells")
    landscape_area = in_unit * landscape_mask.header.cell_area
    total = float(sum(s.area_m2 for s in records))
    n_sites = len({sid for s in records for sid in s.member_site_ids})
    n_subnets = len(records)
    if n_subnets > n_sites:
        raise InvariantError(
            f"{n_subnets} subnets from {n_sites} sites: a site footprint is disconnected"
        )
    median = statistics.median(s.area_m2 for s in records) if n_subnets else None
    return PatternStats(
        n_sites=n_sites,
        n_subnets=n_subnets,
        median_subnet_area=median,
        total_site_area=total,
        landscape_area=landscape_area,
        cover_fraction=total / landscape_area,
    )


def pattern_stats(labeling: SubnetLabeling, landscape_mask: CategoricalGrid) -> PatternStats:
    """Summarize a labeling against an aligned landscape mask."""
    require_aligned(labeling.labels, landscape_mask)
    return pattern_from_records(labeling.subnets, landscape_mask)


def labeling_from_labels(labels: CategoricalGrid) -> SubnetLabeling:
    """Rebuild a labeling from a label grid alone.

    Used by pipeline stages that exchange label grids on disk; member
    site ids are unknown at this point and come back empty.
    """
    vals = labels.values
    present = [int(v) for v in np.unique(vals[vals > 0])]
    if present and present != list(range(1, len(present) + 1)):
        raise InputDataError(f"subnet ids must be contiguous 1..n, got {present}")
    area = labels.header.cell_area
    records = tuple(
        SubnetRecord(k, int(np.count_nonzero(vals == k)),
                     float(np.count_nonzero(vals == k)) * area, ())
        for k in present
    )
    return SubnetLabeling(labels, records)


def write_subnet_table(labeling: SubnetLabeling, path) -> None:
    """Export the subnet table as CSV."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["subnet_id", "cell_count", "area_m2", "site_ids"])
        for s in labeling.subnets:
            w.writerow([
                s.subnet_id,
                s.cell_count,
                format_number(s.area_m2),
                ";".join(str(i) for i in s.member_site_ids),
            ])


def read_subnet_table(path) -> list[SubnetRecord]:
    rows = list(csv.reader(Path(path).open()))
    if not rows or rows[0] != ["subnet_id", "cell_count", "area_m2", "site_ids"]:
        raise InputDataError(f"{path}: not a subnet table")
    return [
        SubnetRecord(int(r[0]), int(r[1]), float(r[2]),
                     tuple(int(t) for t in r[3].split(";")) if r[3] else ())
        for r in rows[1:] if r
    ]
