"""Synthetic scenes shared by the unit and acceptance tests."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from sitenet.friction import FrictionTable, build_friction
from sitenet.grids import CategoricalGrid, GridHeader, NumericGrid, write_grid
from sitenet.sites import SitePolygonSet, make_sites, rasterize_sites, save_sites
from sitenet.subnets import SubnetLabeling, label_subnets


def header(ncols, nrows, cellsize=100.0, xll=0.0, yll=0.0) -> GridHeader:
    return GridHeader(ncols, nrows, xll, yll, cellsize)


def rect(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]


def uniform(hdr: GridHeader, code: int) -> CategoricalGrid:
    return CategoricalGrid(hdr, np.full(hdr.shape, code, dtype=np.int64))


def five_site_polygons(dx=0.0, dy=0.0) -> SitePolygonSet:
    """Five sites on a 30x20 grid: two overlapping pairs plus one apart,
    which label into exactly three subnets."""
    return make_sites([
        (1, [rect(200 + dx, 1200 + dy, 800 + dx, 1800 + dy)]),
        (2, [rect(600 + dx, 800 + dy, 1200 + dx, 1400 + dy)]),
        (3, [rect(1600 + dx, 1400 + dy, 2000 + dx, 1800 + dy)]),
        (4, [rect(1900 + dx, 1000 + dy, 2300 + dx, 1500 + dy)]),
        (5, [rect(400 + dx, 200 + dy, 900 + dx, 600 + dy)]),
    ])


def five_site_header(dx=0.0, dy=0.0) -> GridHeader:
    return GridHeader(30, 20, dx, dy, 100.0)


def write_five_site_inputs(directory: Path, with_roads=True) -> Path:
    """Full input tree plus config for the five-site pipeline scenario.

    A vertical road with one crossing separates the two western subnets
    from the eastern one.  Returns the config path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    hdr = five_site_header()
    save_sites(five_site_polygons(), directory / "sites.json")

    landcover = np.ones(hdr.shape, dtype=np.int64)
    landcover[15:, 20:] = 3  # an agricultural corner
    write_grid(CategoricalGrid(hdr, landcover), directory / "landcover.asc")
    write_grid(uniform(hdr, 1), directory / "mask.asc")

    config = {
        "unit": "demo",
        "sites": "sites.json",
        "landcover": "landcover.asc",
        "landscape_mask": "mask.asc",
        "output_dir": "out",
        "connectivity": 8,
        "edge_width": 1,
        "dist50": 500.0,
        "p_iso": 0.05,
    }
    if with_roads:
        roads = np.zeros(hdr.shape, dtype=np.int64)
        roads[:, 13] = 1
        crossings = np.zeros(hdr.shape, dtype=np.int64)
        crossings[6, 13] = 1
        write_grid(CategoricalGrid(hdr, roads), directory / "roads.asc")
        write_grid(CategoricalGrid(hdr, crossings), directory / "crossings.asc")
        config["roads"] = "roads.asc"
        config["crossings"] = "crossings.asc"
    config_path = directory / "config.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    return config_path


def two_subnet_gap_polygons() -> SitePolygonSet:
    """Two blocks whose nearest cell centers sit five cardinal steps
    apart: the least-cost distance at friction 1 is exactly 500 m."""
    return make_sites([
        (1, [rect(0, 0, 200, 300)]),
        (2, [rect(600, 0, 900, 300)]),
    ])


def two_subnet_gap_header() -> GridHeader:
    return GridHeader(9, 3, 0.0, 0.0, 100.0)


def two_subnet_scene() -> tuple[SubnetLabeling, NumericGrid, CategoricalGrid]:
    """In-memory labeling, friction-1 surface, and mask for the 500 m scene."""
    hdr = two_subnet_gap_header()
    rasterized = rasterize_sites(two_subnet_gap_polygons(), hdr)
    labeling = label_subnets(rasterized.grid, rasterized.overlaps)
    friction = build_friction(uniform(hdr, 1), sites=labeling, table=FrictionTable())
    return labeling, friction, uniform(hdr, 1)


def write_two_subnet_inputs(directory: Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    hdr = two_subnet_gap_header()
    save_sites(two_subnet_gap_polygons(), directory / "sites.json")
    write_grid(uniform(hdr, 1), directory / "landcover.asc")
    write_grid(uniform(hdr, 1), directory / "mask.asc")
    config = {
        "unit": "gap500",
        "sites": "sites.json",
        "landcover": "landcover.asc",
        "landscape_mask": "mask.asc",
        "output_dir": "out",
    }
    config_path = directory / "config.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    return config_path


def wall_scene(with_crossing: bool) -> tuple[SubnetLabeling, NumericGrid]:
    """Two subnets split by a full-height road wall with one crossing cell.

    The wall sits at column 4 (friction 10); the crossing, when present,
    replaces cell (2, 4) with friction 2.
    """
    hdr = GridHeader(9, 5, 0.0, 0.0, 100.0)
    rasterized = rasterize_sites(make_sites([
        (1, [rect(0, 0, 200, 500)]),
        (2, [rect(700, 0, 900, 500)]),
    ]), hdr)
    labeling = label_subnets(rasterized.grid, rasterized.overlaps)
    roads = np.zeros(hdr.shape, dtype=np.int64)
    roads[:, 4] = 1
    crossings = np.zeros(hdr.shape, dtype=np.int64)
    if with_crossing:
        crossings[2, 4] = 1
    friction = build_friction(
        uniform(hdr, 1),
        CategoricalGrid(hdr, roads),
        CategoricalGrid(hdr, crossings),
        labeling,
        FrictionTable(),
    )
    return labeling, friction


def dumbbell_mask() -> np.ndarray:
    """Two 5x5 blobs joined by a 1-cell-wide, 6-cell-long bridge."""
    mask = np.zeros((7, 18), dtype=bool)
    mask[1:6, 1:6] = True
    mask[1:6, 12:17] = True
    mask[3, 6:12] = True
    return mask


def ring_mask() -> np.ndarray:
    """A 1-cell-wide square ring: no erodible core."""
    mask = np.zeros((7, 7), dtype=bool)
    mask[1:6, 1:6] = True
    mask[2:5, 2:5] = False
    return mask
