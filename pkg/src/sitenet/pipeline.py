"""End-to-end analysis pipeline for one landscape unit.

Runs rasterize -> label -> classify -> friction -> cost matrix ->
indices -> report, writing every intermediate grid, table, map, and
figure into the output directory.  Outputs are byte-identical across
runs with identical inputs and configuration.  Stage results are
re-validated at stage boundaries; failures carry the stage name, and
artifacts written before a failure stay on disk for inspection.
"""

from __future__ import annotations

import json
import logging
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sitenet import costdist, indices as indices_mod
from sitenet.errors import ConfigError, InputDataError, InvariantError, SitenetError
from sitenet.friction import FrictionTable, build_friction, read_friction_table, write_friction_table
from sitenet.grids import CategoricalGrid, read_grid, write_grid
from sitenet.morphology import MorphologyParams, classify_subnet, structural_shares, write_structure_table
from sitenet.render import render_map
from sitenet.report import UnitReport, render_report_figures, write_report
from sitenet.sites import load_sites, rasterize_sites, write_overlaps
from sitenet.subnets import label_subnets, pattern_stats, write_subnet_table

log = logging.getLogger(__name__)

_CONFIG_PATH_KEYS = ("sites", "landcover", "landscape_mask", "roads", "crossings",
                     "friction_table", "output_dir")
_CONFIG_KEYS = _CONFIG_PATH_KEYS + ("unit", "cellsize", "connectivity", "edge_width",
                                    "dist50", "p_iso")


@dataclass(frozen=True)
class PipelineConfig:
    sites: str
    landcover: str
    landscape_mask: str
    output_dir: str
    roads: str | None = None
    crossings: str | None = None
    friction_table: str | None = None
    unit: str = "unit"
    cellsize: float | None = None
    connectivity: int = 8
    edge_width: int = 1
    dist50: float = indices_mod.DEFAULT_DIST50
    p_iso: float = indices_mod.DEFAULT_P_ISO

    def __post_init__(self):
        if self.connectivity not in (4, 8):
            raise ConfigError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if not isinstance(self.edge_width, int) or self.edge_width < 1:
            raise ConfigError(f"edge_width must be a positive integer, got {self.edge_width}")
        if not self.dist50 > 0:
            raise ConfigError(f"dist50 must be positive, got {self.dist50}")
        if not 0 < self.p_iso < 1:
            raise ConfigError(f"p_iso must lie in (0, 1), got {self.p_iso}")
        if self.cellsize is not None and not self.cellsize > 0:
            raise ConfigError(f"cellsize must be positive, got {self.cellsize}")


def load_config(path) -> PipelineConfig:
    """Parse the flat JSON configuration; relative paths resolve against
    the config file's directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = sorted(set(doc) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {unknown}")
    for key in ("sites", "landcover", "landscape_mask", "output_dir"):
        if key not in doc:
            raise ConfigError(f"{path}: missing required key '{key}'")

    base = path.parent

    def _resolve(key):
        value = doc.get(key)
        if value is None:
            return None
        if not isinstance(value, str):
            raise ConfigError(f"{path}: '{key}' must be a path string")
        return str((base / value).resolve())

    try:
        return PipelineConfig(
            sites=_resolve("sites"),
            landcover=_resolve("landcover"),
            landscape_mask=_resolve("landscape_mask"),
            output_dir=_resolve("output_dir"),
            roads=_resolve("roads"),
            crossings=_resolve("crossings"),
            friction_table=_resolve("friction_table"),
            unit=doc.get("unit", "unit"),
            cellsize=doc.get("cellsize"),
            connectivity=doc.get("connectivity", 8),
            edge_width=doc.get("edge_width", 1),
            dist50=doc.get("dist50", indices_mod.DEFAULT_DIST50),
            p_iso=doc.get("p_iso", indices_mod.DEFAULT_P_ISO),
        )
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def config_to_json(config: PipelineConfig) -> str:
    doc = {k: getattr(config, k) for k in _CONFIG_KEYS if getattr(config, k) is not None}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_config(config: PipelineConfig, path) -> None:
    Path(path).write_text(config_to_json(config))


@contextmanager
def _stage(name: str):
    log.info("stage %s", name)
    try:
        yield
    except SitenetError as exc:
        exc.args = (f"[stage {name}] {exc}",)
        raise
    except ValueError as exc:
        raise InputDataError(f"[stage {name}] {exc}") from exc


def _require_categorical(grid, what: str) -> CategoricalGrid:
    if not isinstance(grid, CategoricalGrid):
        raise InputDataError(f"{what} must be a categorical (integer) grid")
    return grid


def _check_fraction(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvariantError(f"{name} = {value} outside [0, 1]")


def run_pipeline(config: PipelineConfig) -> UnitReport:
    """Execute the full workflow and write all artifacts.

    Returns the unit's report record.
    """
    for key in _CONFIG_PATH_KEYS:
        value = getattr(config, key)
        if key != "output_dir" and value is not None and not Path(value).exists():
            raise ConfigError(f"input file for '{key}' does not exist: {value}")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    with _stage("load"):
        mask = read_grid(config.landscape_mask)
        landcover = _require_categorical(read_grid(config.landcover), "land cover")
        roads = crossing = None
        if config.roads:
            roads = _require_categorical(read_grid(config.roads), "roads")
        if config.crossings:
            crossing = _require_categorical(read_grid(config.crossings), "crossings")
        polygons = load_sites(config.sites)
        table = read_friction_table(config.friction_table) if config.friction_table else FrictionTable()
        if config.cellsize is not None and mask.header.cellsize != config.cellsize:
            raise ConfigError(
                f"configured cellsize {config.cellsize} does not match the landscape "
                f"mask's {mask.header.cellsize}"
            )
        for layer, what in ((landcover, "land cover"), (roads, "roads"), (crossing, "crossings")):
            if layer is not None and not mask.header.aligned_with(layer.header):
                raise InputDataError(f"{what} grid is not aligned with the landscape mask")

    with _stage("rasterize"):
        rasterized = rasterize_sites(polygons, mask.header)
        write_grid(rasterized.grid, out / "sites.asc")
        write_overlaps(rasterized.overlaps, out / "overlaps.csv")

    with _stage("label"):
        labeling = label_subnets(rasterized.grid, rasterized.overlaps, config.connectivity)
        site_cells = int(np.count_nonzero(rasterized.grid.values > 0))
        if sum(s.cell_count for s in labeling.subnets) != site_cells:
            raise InvariantError("subnet cell counts do not partition the site cells")
        if not np.array_equal(labeling.labels.values > 0, rasterized.grid.values > 0):
            raise InvariantError("labeled footprint differs from the site footprint")
        write_grid(labeling.labels, out / "subnet_labels.asc")
        write_subnet_table(labeling, out / "subnets.csv")

    with _stage("pattern"):
        pattern = pattern_stats(labeling, mask)
        _check_fraction("cover_fraction", pattern.cover_fraction)

    with _stage("classify"):
        params = MorphologyParams(edge_width=config.edge_width, connectivity=config.connectivity)
        structures = [
            classify_subnet(labeling.labels.values == s.subnet_id, params, s.subnet_id)
            for s in labeling.subnets
        ]
        shares = structural_shares(structures) if structures else None
        if shares is not None and abs(shares.share_simple + shares.share_complex - 1.0) > 1e-12:
            raise InvariantError("structural shares do not sum to 1")
        write_structure_table(structures, out / "structure.csv")

    with _stage("friction"):
        friction_grid = build_friction(landcover, roads, crossing, labeling, table)
        valid = ~friction_grid.nodata_mask
        if not (friction_grid.values[valid] >= 0).all():
            raise InvariantError("friction surface has negative cells")
        write_grid(friction_grid, out / "friction.asc")
        write_friction_table(table, out / "friction_table.csv")

    functional = None
    costs = None
    if labeling.n >= 1:
        with _stage("costmatrix"):
            def _save_surface(sid, grid):
                write_grid(grid, out / f"cost_from_{sid:03d}.asc")

            costs = costdist.cost_matrix(labeling, friction_grid, on_surface=_save_surface)
            if not np.array_equal(costs.costs, costs.costs.T):
                raise InvariantError("cost matrix is not symmetric")
            if not (np.diag(costs.costs) == 0).all():
                raise InvariantError("cost matrix diagonal is not zero")
            if not (costs.costs[np.isfinite(costs.costs)] >= 0).all():
                raise InvariantError("cost matrix has negative entries")
            costdist.write_cost_matrix(costs, out / "costmatrix.csv")

        with _stage("indices"):
            disp = indices_mod.dispersal_k(config.dist50)
            probs = indices_mod.probability_matrix(costs, disp)
            if not ((probs.probs >= 0) & (probs.probs <= 1)).all():
                raise InvariantError("connection probabilities outside [0, 1]")
            indices_mod.write_probability_matrix(probs, out / "probmatrix.csv")
            functional = indices_mod.FunctionalIndices(
                rpc=indices_mod.rpc(labeling.areas(), probs, pattern.landscape_area),
                rapc=indices_mod.rapc(probs),
                isolated_share=indices_mod.isolated_share(probs, config.p_iso),
                dist50=disp.dist50,
                k=disp.k,
                p_iso=config.p_iso,
            )
            for name in ("rpc", "rapc", "isolated_share"):
                _check_fraction(name, getattr(functional, name))

    with _stage("report"):
        rep = UnitReport(config.unit, pattern, shares, functional)
        write_report([rep], out / "report.csv")
        _write_params(config, table, mask.header.cellsize, out / "params.json")
        render_map(labeling.labels, "labels", out / "subnets.ppm",
                   png_path=out / "subnets.png")
        render_map(friction_grid, "heat", out / "friction.ppm",
                   png_path=out / "friction.png")
        render_report_figures([rep], out)

    log.info("run complete: %d sites, %d subnets", pattern.n_sites, pattern.n_subnets)
    return rep


def _write_params(config: PipelineConfig, table: FrictionTable, cellsize: float, path) -> None:
    """Self-describing parameter block, including the friction table used."""
    doc = {
        "unit": config.unit,
        "cellsize": cellsize,
        "connectivity": config.connectivity,
        "edge_width": config.edge_width,
        "dist50": config.dist50,
        "k": indices_mod.dispersal_k(config.dist50).k,
        "p_iso": config.p_iso,
        "friction_table": {
            "entries": {str(c): v for c, v in sorted(table.entries.items())},
            "road": table.road_friction,
            "crossing": table.crossing_friction,
            "site": table.site_friction,
        },
        "inputs": {
            "sites": config.sites,
            "landcover": config.landcover,
            "landscape_mask": config.landscape_mask,
            "roads": config.roads,
            "crossings": config.crossings,
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
