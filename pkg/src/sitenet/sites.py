"""Site polygons and their conversion to a coded raster.

Sites are planar polygons (one or more rings, even-odd interior rule) in
the same meter-based reference frame as the target grid.  A cell carries
a site's id when its center lies inside the site.  Cell centers claimed
by several sites resolve to the lowest id, and the full membership is
kept in an overlap side table so that downstream component labeling
still sees the physical contact.

On-edge centers follow a half-open convention: an edge crossing counts
for the scan ray only while ``min(y) <= y < max(y)``, which makes
bottom/left boundaries inside and top/right boundaries outside.  The
rule is arbitrary but deterministic; results for borderline cells are
convention-dependent.

File format: a JSON array of ``{"id": <int>, "rings": [[[x, y], ...]]}``
objects; every ring closes (first vertex equals last).
"""

from __future__ import annotations

import json
import logging
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sitenet.errors import GeometryError, InputDataError
from sitenet.grids import CategoricalGrid, GridHeader

log = logging.getLogger(__name__)

Ring = list[tuple[float, float]]


@dataclass(frozen=True)
class SitePolygon:
    site_id: int
    rings: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self):
        if self.site_id < 1:
            raise GeometryError(f"site ids must be positive, got {self.site_id}")
        if not self.rings:
            raise GeometryError(f"site {self.site_id} has no rings")
        for ring in self.rings:
            if len(ring) < 4 or ring[0] != ring[-1]:
                raise GeometryError(
                    f"site {self.site_id}: rings must close (first vertex = last) "
                    f"and hold at least 3 distinct vertices"
                )
            if len(set(ring[:-1])) < 3:
                raise GeometryError(
                    f"site {self.site_id}: ring with fewer than 3 distinct vertices"
                )

    def bounds(self) -> tuple[float, float, float, float]:
        xs = [x for ring in self.rings for x, _ in ring]
        ys = [y for ring in self.rings for _, y in ring]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class SitePolygonSet:
    sites: tuple[SitePolygon, ...]

    def __post_init__(self):
        ids = [s.site_id for s in self.sites]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise GeometryError(f"duplicate site ids: {dupes}")

    def __iter__(self):
        return iter(self.sites)

    def __len__(self):
        return len(self.sites)


def make_sites(raw: list[tuple[int, list[Ring]]]) -> SitePolygonSet:
    """Build a polygon set from (site_id, rings) pairs."""
    sites = tuple(
        SitePolygon(site_id, tuple(tuple((float(x), float(y)) for x, y in ring) for ring in rings))
        for site_id, rings in raw
    )
    return SitePolygonSet(sites)


def load_sites(path) -> SitePolygonSet:
    """Read site polygons from their JSON file."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise InputDataError(f"{path}: expected a JSON array of site objects")
    raw = []
    for entry in doc:
        if not isinstance(entry, dict) or "id" not in entry or "rings" not in entry:
            raise InputDataError(f"{path}: each site needs 'id' and 'rings'")
        if not isinstance(entry["id"], int):
            raise InputDataError(f"{path}: site id must be an integer, got {entry['id']!r}")
        raw.append((entry["id"], entry["rings"]))
    return make_sites(raw)


def save_sites(sites: SitePolygonSet, path) -> None:
    doc = [
        {"id": s.site_id, "rings": [[[x, y] for x, y in ring] for ring in s.rings]}
        for s in sites
    ]
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


@dataclass(frozen=True)
class RasterizedSites:
    """Coded site raster plus the multi-membership side table.

    grid cells hold 0 for background, otherwise the lowest claiming
    site id; overlaps maps (row, col) to the ascending tuple of all
    claiming site ids wherever that tuple has length >= 2.
    """

    grid: CategoricalGrid
    overlaps: dict[tuple[int, int], tuple[int, ...]]


def _row_crossings(rings, y: float) -> list[float]:
    """X positions where a horizontal scan line crosses ring edges,
    counting each edge over the half-open interval [min(y), max(y))."""
    xs: list[float] = []
    for ring in rings:
        for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
            if y1 == y2:
                continue
            if (y1 <= y < y2) or (y2 <= y < y1):
                xs.append(x1 + (y - y1) * (x2 - x1) / (y2 - y1))
    xs.sort()
    return xs


def point_in_site(site: SitePolygon, x: float, y: float) -> bool:
    """Even-odd containment of a single point, half-open edge rule."""
    crossings = _row_crossings(site.rings, y)
    return (len(crossings) - bisect_right(crossings, x)) % 2 == 1


def rasterize_sites(polygons: SitePolygonSet, template: GridHeader) -> RasterizedSites:
    """Burn site polygons into a grid using the cell-center rule.

    Every polygon is tested independently, so the result does not depend
    on input order: overlapping claims resolve to the lowest site id and
    are recorded in the overlap table.
    """
    nrows, ncols = template.shape
    cs = template.cellsize
    centers_x = [template.xllcorner + (j + 0.5) * cs for j in range(ncols)]
    codes = np.zeros((nrows, ncols), dtype=np.int64)
    members: dict[tuple[int, int], list[int]] = {}

    for site in sorted(polygons, key=lambda s: s.site_id):
        minx, miny, maxx, maxy = site.bounds()
        burned = 0
        for i in range(nrows):
            y = template.yllcorner + (nrows - i - 0.5) * cs
            if y < miny or y > maxy:
                continue
            crossings = _row_crossings(site.rings, y)
            if not crossings:
                continue
            for j in range(ncols):
                x = centers_x[j]
                if x < minx or x > maxx:
                    continue
                if (len(crossings) - bisect_right(crossings, x)) % 2 == 1:
                    burned += 1
                    members.setdefault((i, j), []).append(site.site_id)
        if burned == 0:
            log.warning("site %d: no cell centers inside the grid, zero cells burned",
                        site.site_id)

    overlaps: dict[tuple[int, int], tuple[int, ...]] = {}
    for cell, ids in members.items():
        codes[cell] = min(ids)
        if len(ids) > 1:
            overlaps[cell] = tuple(sorted(ids))

    grid = CategoricalGrid(template, codes)
    return RasterizedSites(grid, dict(sorted(overlaps.items())))


def write_overlaps(overlaps: dict[tuple[int, int], tuple[int, ...]], path) -> None:
    lines = ["row,col,site_ids"]
    for (r, c), ids in sorted(overlaps.items()):
        lines.append(f"{r},{c},{';'.join(str(i) for i in ids)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_overlaps(path) -> dict[tuple[int, int], tuple[int, ...]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "row,col,site_ids":
        raise InputDataError(f"{path}: expected header 'row,col,site_ids'")
    overlaps: dict[tuple[int, int], tuple[int, ...]] = {}
    for line in lines[1:]:
        if not line:
            continue
        r, c, ids = line.split(",")
        overlaps[(int(r), int(c))] = tuple(int(t) for t in ids.split(";"))
    return overlaps
