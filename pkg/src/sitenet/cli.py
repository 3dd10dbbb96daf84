"""Command-line interface.

One subcommand per pipeline stage plus ``run`` for the whole workflow;
every stage consumes and produces the documented file formats, so any
step can be exercised or replayed on its own.  Logs go to standard
error, data only to files.

Exit codes: 0 success, 2 configuration error, 3 input-data error,
4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from sitenet import __version__
from sitenet.costdist import cost_matrix, read_cost_matrix, write_cost_matrix
from sitenet.errors import ConfigError, InputDataError, InvariantError, SitenetError
from sitenet.friction import FrictionTable, build_friction, read_friction_table
from sitenet.grids import CategoricalGrid, GridHeader, format_number, read_grid, write_grid
from sitenet.indices import (
    DEFAULT_DIST50,
    DEFAULT_P_ISO,
    compute_indices,
)
from sitenet.morphology import (
    MorphologyParams,
    classify_subnet,
    read_structure_table,
    structural_shares,
    write_structure_table,
)
from sitenet.pipeline import load_config, run_pipeline
from sitenet.render import PALETTES, render_map
from sitenet.report import UnitReport, render_report_figures, write_report
from sitenet.sites import load_sites, rasterize_sites, read_overlaps, write_overlaps
from sitenet.subnets import (
    label_subnets,
    labeling_from_labels,
    pattern_from_records,
    read_subnet_table,
    write_subnet_table,
)

log = logging.getLogger("sitenet")


def _require_categorical(grid, what: str) -> CategoricalGrid:
    if not isinstance(grid, CategoricalGrid):
        raise InputDataError(f"{what} must be a categorical (integer) grid")
    return grid


def _cmd_rasterize(args) -> None:
    polygons = load_sites(args.sites)
    if args.like:
        template = read_grid(args.like).header
    else:
        required = ("ncols", "nrows", "xllcorner", "yllcorner")
        missing = [k for k in required if getattr(args, k) is None]
        if missing:
            raise ConfigError(f"either --like or all of {', '.join('--' + m for m in missing)}")
        template = GridHeader(args.ncols, args.nrows, args.xllcorner,
                              args.yllcorner, args.cellsize, args.nodata)
    result = rasterize_sites(polygons, template)
    write_grid(result.grid, args.out)
    if args.overlaps_out:
        write_overlaps(result.overlaps, args.overlaps_out)
    log.info("rasterized %d sites onto %dx%d cells, %d overlap cells",
             len(polygons), template.nrows, template.ncols, len(result.overlaps))


def _cmd_subnets(args) -> None:
    sites = _require_categorical(read_grid(args.sites), "site raster")
    overlaps = read_overlaps(args.overlaps) if args.overlaps else None
    labeling = label_subnets(sites, overlaps, args.connectivity)
    write_grid(labeling.labels, args.out)
    if args.table:
        write_subnet_table(labeling, args.table)
    log.info("labeled %d subnets", labeling.n)


def _cmd_classify(args) -> None:
    labels = _require_categorical(read_grid(args.labels), "label grid")
    labeling = labeling_from_labels(labels)
    params = MorphologyParams(edge_width=args.edge_width, connectivity=args.connectivity)
    structures = [
        classify_subnet(labels.values == s.subnet_id, params, s.subnet_id)
        for s in labeling.subnets
    ]
    write_structure_table(structures, args.out)
    log.info("classified %d subnets", len(structures))


def _cmd_friction(args) -> None:
    landcover = _require_categorical(read_grid(args.landcover), "land cover")
    roads = _require_categorical(read_grid(args.roads), "roads") if args.roads else None
    crossings = _require_categorical(read_grid(args.crossings), "crossings") if args.crossings else None
    sites = None
    if args.labels:
        sites = labeling_from_labels(_require_categorical(read_grid(args.labels), "label grid"))
    table = read_friction_table(args.friction_table) if args.friction_table else FrictionTable()
    grid = build_friction(landcover, roads, crossings, sites, table)
    write_grid(grid, args.out)
    log.info("friction surface written to %s", args.out)


def _cmd_costmatrix(args) -> None:
    labeling = labeling_from_labels(_require_categorical(read_grid(args.sites), "label grid"))
    friction = read_grid(args.friction)
    matrix = cost_matrix(labeling, friction, opaque_subnets=args.opaque_subnets)
    write_cost_matrix(matrix, args.out)
    log.info("cost matrix for %d subnets written to %s", matrix.n, args.out)


def _cmd_indices(args) -> None:
    costs = read_cost_matrix(args.costmatrix)
    records = read_subnet_table(args.subnets)
    mask = read_grid(args.mask)
    pattern = pattern_from_records(records, mask)
    result = compute_indices(costs, [r.area_m2 for r in records],
                             pattern.landscape_area, args.dist50, args.p_iso)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_subnets", "rpc", "rapc", "isolated_share", "dist50", "k", "p_iso"])
        w.writerow([costs.n] + [format_number(v) for v in
                                (result.rpc, result.rapc, result.isolated_share,
                                 result.dist50, result.k, result.p_iso)])
    log.info("indices written to %s", args.out)


def _cmd_report(args) -> None:
    records = read_subnet_table(args.subnets)
    structures = read_structure_table(args.structure)
    mask = read_grid(args.mask)
    pattern = pattern_from_records(records, mask)
    shares = structural_shares(structures) if structures else None
    functional = None
    if args.costmatrix:
        costs = read_cost_matrix(args.costmatrix)
        functional = compute_indices(costs, [r.area_m2 for r in records],
                                     pattern.landscape_area, args.dist50, args.p_iso)
    report = UnitReport(args.unit, pattern, shares, functional)
    write_report([report], args.out)
    if args.figures_dir:
        Path(args.figures_dir).mkdir(parents=True, exist_ok=True)
        render_report_figures([report], args.figures_dir)
    log.info("report for unit %s written to %s", args.unit, args.out)


def _cmd_render(args) -> None:
    grid = read_grid(args.grid)
    render_map(grid, args.palette, args.out, classes=args.classes, png_path=args.png)
    log.info("map written to %s", args.out)


def _cmd_run(args) -> None:
    config = load_config(args.config)
    report = run_pipeline(config)
    log.info("unit %s: %d subnets, cover %.4f", report.unit,
             report.pattern.n_subnets, report.pattern.cover_fraction)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sitenet",
        description="Raster connectivity analysis for protected-site networks",
    )
    parser.add_argument("--version", action="version", version=f"sitenet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rasterize", help="burn site polygons into a coded grid")
    p.add_argument("--sites", required=True, help="site polygon JSON")
    p.add_argument("--like", help="grid whose header provides the template")
    p.add_argument("--ncols", type=int)
    p.add_argument("--nrows", type=int)
    p.add_argument("--xllcorner", type=float)
    p.add_argument("--yllcorner", type=float)
    p.add_argument("--cellsize", type=float, default=100.0)
    p.add_argument("--nodata", type=float, default=-9999.0)
    p.add_argument("--out", required=True, help="output site raster")
    p.add_argument("--overlaps-out", help="output overlap side table CSV")
    p.set_defaults(func=_cmd_rasterize)

    p = sub.add_parser("subnets", help="label connected subnet components")
    p.add_argument("--sites", required=True, help="site raster")
    p.add_argument("--overlaps", help="overlap side table CSV")
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--out", required=True, help="output label grid")
    p.add_argument("--table", help="output subnet table CSV")
    p.set_defaults(func=_cmd_subnets)

    p = sub.add_parser("classify", help="classify subnets as simple or complex")
    p.add_argument("--labels", required=True, help="subnet label grid")
    p.add_argument("--edge-width", type=int, default=1)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    p.add_argument("--out", required=True, help="output structure CSV")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("friction", help="build the friction surface")
    p.add_argument("--landcover", required=True)
    p.add_argument("--roads")
    p.add_argument("--crossings")
    p.add_argument("--labels", help="subnet label grid for the site override")
    p.add_argument("--friction-table", help="friction table CSV (default table otherwise)")
    p.add_argument("--out", required=True, help="output friction grid")
    p.set_defaults(func=_cmd_friction)

    p = sub.add_parser("costmatrix", help="least-cost distances between subnets")
    p.add_argument("--sites", required=True, help="subnet label grid")
    p.add_argument("--friction", required=True, help="friction grid")
    p.add_argument("--opaque-subnets", action="store_true",
                   help="forbid travel through other subnets")
    p.add_argument("--out", required=True, help="output cost matrix CSV")
    p.set_defaults(func=_cmd_costmatrix)

    p = sub.add_parser("indices", help="functional connectivity indices")
    p.add_argument("--costmatrix", required=True)
    p.add_argument("--subnets", required=True, help="subnet table CSV")
    p.add_argument("--mask", required=True, help="landscape mask grid")
    p.add_argument("--dist50", type=float, default=DEFAULT_DIST50)
    p.add_argument("--p-iso", type=float, default=DEFAULT_P_ISO)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_indices)

    p = sub.add_parser("report", help="assemble the per-unit report")
    p.add_argument("--unit", default="unit")
    p.add_argument("--subnets", required=True, help="subnet table CSV")
    p.add_argument("--structure", required=True, help="structure CSV")
    p.add_argument("--costmatrix", help="cost matrix CSV (omit when no subnets)")
    p.add_argument("--mask", required=True, help="landscape mask grid")
    p.add_argument("--dist50", type=float, default=DEFAULT_DIST50)
    p.add_argument("--p-iso", type=float, default=DEFAULT_P_ISO)
    p.add_argument("--out", required=True)
    p.add_argument("--figures-dir", help="also render report figures here")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("render", help="render a grid to a pixmap")
    p.add_argument("--grid", required=True)
    p.add_argument("--palette", required=True, help=f"one of: {', '.join(sorted(PALETTES))}")
    p.add_argument("--classes", type=int, default=9, help="max bins for numeric grids")
    p.add_argument("--out", required=True, help="output PPM path")
    p.add_argument("--png", help="also write a PNG twin here")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("run", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True, help="flat JSON configuration")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return 2
    except InvariantError as exc:
        log.error("%s", exc)
        return 4
    except (InputDataError, SitenetError, ValueError, FileNotFoundError) as exc:
        log.error("%s", exc)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
