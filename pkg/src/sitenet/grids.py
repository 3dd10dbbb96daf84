"""Grid data model and plain-text raster I/O.

The only raster exchange format is the six-line ASCII grid header
(``ncols``, ``nrows``, ``xllcorner``, ``yllcorner``, ``cellsize``,
``nodata_value``) followed by ``nrows`` body lines of ``ncols``
whitespace-separated values, top row first.  Serialization is canonical
and byte-stable: integral numbers are written without a decimal point,
everything else with the shortest representation that round-trips.

Grids come in two flavors sharing one header model:

  - CategoricalGrid: integer codes (land cover, roads, site ids, labels)
  - NumericGrid: real values (friction, accumulated cost), ``inf`` allowed

Grid values are immutable after construction, so instances can be shared
freely across threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sitenet.errors import GridParseError, GridTruncationError, InputDataError

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")
_INT_TOKEN = re.compile(r"^[+-]?\d+$")


def format_number(value) -> str:
    """Canonical text form of a number: integral values without a decimal
    point, everything else via shortest round-tripping repr."""
    v = float(value)
    if math.isnan(v):
        raise ValueError("NaN has no canonical grid representation")
    if math.isfinite(v) and v == int(v):
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class GridHeader:
    """Georeferencing block shared by all layers of one analysis.

    xllcorner/yllcorner locate the lower-left corner of the lower-left
    cell, in meters.  Default cell size is 100 m.
    """

    ncols: int
    nrows: int
    xllcorner: float
    yllcorner: float
    cellsize: float
    nodata_value: float = -9999.0

    def __post_init__(self):
        if self.ncols < 1 or self.nrows < 1:
            raise InputDataError(
                f"grid must have at least one row and column, got {self.nrows}x{self.ncols}"
            )
        if not self.cellsize > 0:
            raise InputDataError(f"cellsize must be positive, got {self.cellsize}")

    def aligned_with(self, other: "GridHeader") -> bool:
        """True when all fields except nodata_value agree exactly."""
        return (
            self.ncols == other.ncols
            and self.nrows == other.nrows
            and self.xllcorner == other.xllcorner
            and self.yllcorner == other.yllcorner
            and self.cellsize == other.cellsize
        )

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        """Planar coordinates of a cell center; row 0 is the top row."""
        x = self.xllcorner + (col + 0.5) * self.cellsize
        y = self.yllcorner + (self.nrows - row - 0.5) * self.cellsize
        return x, y

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def cell_area(self) -> float:
        return self.cellsize * self.cellsize


class _Grid:
    """Shared header/values plumbing; use the two concrete flavors."""

    _dtype: type

    def __init__(self, header: GridHeader, values):
        arr = np.ascontiguousarray(values, dtype=self._dtype)
        if arr.shape != header.shape:
            raise InputDataError(
                f"values shape {arr.shape} does not match header {header.shape}"
            )
        arr.setflags(write=False)
        self.header = header
        self.values = arr

    @property
    def nodata_mask(self) -> np.ndarray:
        """Boolean array flagging nodata cells."""
        return self.values == self._nodata_cell()

    def _nodata_cell(self):
        raise NotImplementedError

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.header == other.header and np.array_equal(self.values, other.values)

    def __repr__(self):
        h = self.header
        return f"{type(self).__name__}({h.nrows}x{h.ncols}, cellsize={h.cellsize})"


class CategoricalGrid(_Grid):
    """Integer-coded grid; nodata cells hold the header sentinel."""

    _dtype = np.int64

    def _nodata_cell(self) -> int:
        nd = self.header.nodata_value
        # A fractional sentinel can never occur among integer codes.
        return int(nd) if nd == int(nd) else np.iinfo(np.int64).min

    def codes(self) -> list[int]:
        """Sorted distinct non-nodata codes present in the grid."""
        vals = np.unique(self.values[~self.nodata_mask])
        return [int(v) for v in vals]


class NumericGrid(_Grid):
    """Real-valued grid; ``+inf`` marks unreachable cells in cost surfaces."""

    _dtype = np.float64

    def _nodata_cell(self) -> float:
        return float(self.header.nodata_value)


def require_aligned(*grids: _Grid) -> None:
    """Raise unless every grid shares the first one's georeferencing."""
    first = grids[0].header
    for g in grids[1:]:
        if not first.aligned_with(g.header):
            raise InputDataError(
                f"grids are not aligned: {first} vs {g.header}"
            )


def read_grid(path) -> CategoricalGrid | NumericGrid:
    """Read an ASCII grid file.

    The flavor is inferred from the body: a grid whose every value is
    integer-formatted comes back categorical, anything else numeric.
    Cells equal to the nodata sentinel are nodata.
    """
    text = Path(path).read_text()
    lines = text.splitlines()
    if len(lines) < len(_HEADER_KEYS):
        raise GridParseError(f"{path}: file has no complete header")

    raw: dict[str, str] = {}
    for i, key in enumerate(_HEADER_KEYS):
        parts = lines[i].split()
        if len(parts) != 2 or parts[0].lower() != key:
            raise GridParseError(
                f"{path}: header line {i + 1} must be '{key} <value>', got {lines[i]!r}"
            )
        raw[key] = parts[1]

    def _number(key: str) -> float:
        try:
            return float(raw[key])
        except ValueError:
            raise GridParseError(
                f"{path}: header value for '{key}' is not a number: {raw[key]!r}"
            ) from None

    def _integer(key: str) -> int:
        v = _number(key)
        if v != int(v):
            raise GridParseError(f"{path}: header value for '{key}' must be an integer")
        return int(v)

    header = GridHeader(
        ncols=_integer("ncols"),
        nrows=_integer("nrows"),
        xllcorner=_number("xllcorner"),
        yllcorner=_number("yllcorner"),
        cellsize=_number("cellsize"),
        nodata_value=_number("nodata_value"),
    )

    tokens = " ".join(lines[len(_HEADER_KEYS):]).split()
    expected = header.ncols * header.nrows
    if len(tokens) != expected:
        raise GridTruncationError(
            f"{path}: expected {expected} cells, found {len(tokens)}"
        )

    if all(_INT_TOKEN.match(t) for t in tokens):
        cells = np.array([int(t) for t in tokens], dtype=np.int64)
        return CategoricalGrid(header, cells.reshape(header.shape))

    try:
        cells = np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError:
        bad = next(t for t in tokens if not _is_float(t))
        raise GridParseError(f"{path}: cell value {bad!r} is not a number") from None
    if np.isnan(cells).any():
        raise GridParseError(f"{path}: NaN cells are not supported")
    return NumericGrid(header, cells.reshape(header.shape))


def _is_float(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def write_grid(grid: CategoricalGrid | NumericGrid, path) -> None:
    """Write a grid in canonical form; identical grids serialize to
    identical bytes."""
    h = grid.header
    out = [
        f"ncols {h.ncols}",
        f"nrows {h.nrows}",
        f"xllcorner {format_number(h.xllcorner)}",
        f"yllcorner {format_number(h.yllcorner)}",
        f"cellsize {format_number(h.cellsize)}",
        f"nodata_value {format_number(h.nodata_value)}",
    ]
    if isinstance(grid, CategoricalGrid):
        for row in grid.values:
            out.append(" ".join(str(int(v)) for v in row))
    else:
        if np.isnan(grid.values).any():
            raise ValueError("grid contains NaN cells")
        for row in grid.values:
            out.append(" ".join(format_number(v) for v in row))
    Path(path).write_text("\n".join(out) + "\n")
