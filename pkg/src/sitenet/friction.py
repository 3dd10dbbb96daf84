"""Friction surface construction.

Friction is a dimensionless multiplier of geometric distance: crossing a
friction-1 cell costs its length in meters, so the dispersal half
distance stays directly interpretable.  Per-cell values come from the
land-cover table, then are overridden in a fixed precedence order:

    land cover < road < crossing < subnet interior

Roads impede but never block; crossing features (tunnels, wildlife
bridges) locally undo most of the road penalty.

No published class-to-friction assignment exists for this model, so the
shipped defaults are an explicit convention: permeable natural land 1,
semi-natural 2, agriculture 5, artificial surfaces 20, water 30, roads
10, crossings 2, subnet interiors 1.  Every pipeline report records the
table it used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sitenet.errors import FrictionTableError
from sitenet.grids import CategoricalGrid, NumericGrid, format_number, require_aligned
from sitenet.subnets import SubnetLabeling

# Land-cover codes of the shipped convention.
NATURAL, SEMI_NATURAL, AGRICULTURE, ARTIFICIAL, WATER = 1, 2, 3, 4, 5

DEFAULT_ENTRIES = {
    NATURAL: 1.0,
    SEMI_NATURAL: 2.0,
    AGRICULTURE: 5.0,
    ARTIFICIAL: 20.0,
    WATER: 30.0,
}


@dataclass(frozen=True)
class FrictionTable:
    """Class-code to friction mapping plus the three layer multipliers."""

    entries: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_ENTRIES))
    road_friction: float = 10.0
    crossing_friction: float = 2.0
    site_friction: float = 1.0

    def __post_init__(self):
        bad = {c: v for c, v in self.entries.items() if not v >= 0}
        if bad:
            raise FrictionTableError(f"negative friction for codes {sorted(bad)}")
        for name in ("road_friction", "crossing_friction", "site_friction"):
            if not getattr(self, name) >= 0:
                raise FrictionTableError(f"{name} must be nonnegative")
        if not any(v == 1.0 for v in self.entries.values()):
            raise FrictionTableError(
                "no calibration class: one land-cover class must have friction exactly 1"
            )
        if self.crossing_friction > self.road_friction:
            raise FrictionTableError(
                f"crossing friction {self.crossing_friction} exceeds road friction "
                f"{self.road_friction}; a crossing never impedes more than its road"
            )


def validate_table(table: FrictionTable, landcover: CategoricalGrid) -> list[int]:
    """Codes present in the grid but absent from the table, ascending."""
    return sorted(set(landcover.codes()) - set(table.entries))


def build_friction(
    landcover: CategoricalGrid,
    roads: CategoricalGrid | None = None,
    crossings: CategoricalGrid | None = None,
    sites: SubnetLabeling | None = None,
    table: FrictionTable | None = None,
) -> NumericGrid:
    """Assemble the friction grid from the stacked categorical layers.

    All layers must be aligned with the land cover.  Nodata in the road
    and crossing layers means "not flagged"; output cells are nodata
    exactly where the land cover is.
    """
    table = table or FrictionTable()
    layers = [landcover]
    if roads is not None:
        layers.append(roads)
    if crossings is not None:
        layers.append(crossings)
    if sites is not None:
        layers.append(sites.labels)
    require_aligned(*layers)

    missing = validate_table(table, landcover)
    if missing:
        raise FrictionTableError(f"land-cover codes missing from friction table: {missing}")

    valid = ~landcover.nodata_mask
    out = np.zeros(landcover.header.shape, dtype=np.float64)
    for code in landcover.codes():
        out[(landcover.values == code) & valid] = table.entries[code]
    if roads is not None:
        out[(roads.values != 0) & ~roads.nodata_mask & valid] = table.road_friction
    if crossings is not None:
        out[(crossings.values != 0) & ~crossings.nodata_mask & valid] = table.crossing_friction
    if sites is not None:
        out[(sites.labels.values > 0) & valid] = table.site_friction
    out[~valid] = landcover.header.nodata_value
    return NumericGrid(landcover.header, out)


def write_friction_table(table: FrictionTable, path) -> None:
    """CSV export: numeric code rows plus reserved ROAD/CROSSING/SITE rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["code", "friction"])
        for code in sorted(table.entries):
            w.writerow([code, format_number(table.entries[code])])
        w.writerow(["ROAD", format_number(table.road_friction)])
        w.writerow(["CROSSING", format_number(table.crossing_friction)])
        w.writerow(["SITE", format_number(table.site_friction)])


def read_friction_table(path) -> FrictionTable:
    rows = list(csv.reader(Path(path).open()))
    if not rows or rows[0] != ["code", "friction"]:
        raise FrictionTableError(f"{path}: expected header 'code,friction'")
    entries: dict[int, float] = {}
    reserved = {"ROAD": None, "CROSSING": None, "SITE": None}
    for r in rows[1:]:
        if not r:
            continue
        key, value = r[0].strip(), float(r[1])
        if key in reserved:
            reserved[key] = value
        else:
            try:
                entries[int(key)] = value
            except ValueError:
                raise FrictionTableError(f"{path}: bad code {key!r}") from None
    absent = [k for k, v in reserved.items() if v is None]
    if absent:
        raise FrictionTableError(f"{path}: missing reserved rows {absent}")
    if not entries:
        raise FrictionTableError(f"{path}: no land-cover entries")
    return FrictionTable(
        entries=entries,
        road_friction=reserved["ROAD"],
        crossing_friction=reserved["CROSSING"],
        site_friction=reserved["SITE"],
    )
