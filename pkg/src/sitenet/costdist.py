"""Least-cost distances between subnets over a friction surface.

Movement is 8-connected; a step between neighboring cells costs the mean
of their frictions times the step length (cell size, or cell size times
sqrt(2) diagonally).  Accumulated cost from a multi-source Dijkstra
sweep seeded at every cell of the source subnet gives the cost surface;
the subnet-to-subnet distance is the minimum of that surface over the
target's cells, which boundary cells attain (edge-to-edge semantics).

Other subnets stay traversable at their in-grid friction by default, so
paths may run through intermediate protected areas; pass
``opaque_subnets=True`` to forbid that.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sitenet.errors import InputDataError, InvariantError
from sitenet.grids import NumericGrid, format_number, require_aligned
from sitenet.subnets import SubnetLabeling

# Fixed neighbor scan order: N, NE, E, SE, S, SW, W, NW.
SCAN_ORDER = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))

_SYMMETRY_RTOL = 1e-6


def _step_cost(fa: float, fb: float, length: float) -> float:
    # Shared by the sweep and the backtrace so equality checks are exact.
    return (fa + fb) * 0.5 * length


def cost_distance_from(
    labeling: SubnetLabeling,
    friction: NumericGrid,
    source_subnet: int,
    opaque_subnets: bool = False,
) -> NumericGrid:
    """Minimal accumulated cost from any cell of the source subnet.

    Source cells cost 0; nodata friction cells are impassable and, like
    every unreachable cell, come back as +inf.
    """
    require_aligned(labeling.labels, friction)
    nrows, ncols = friction.header.shape
    cellsize = friction.header.cellsize
    lengths = {0: cellsize, 1: cellsize * math.sqrt(2.0)}

    labels = labeling.labels.values
    fric = friction.values
    passable = ~friction.nodata_mask
    if opaque_subnets:
        passable = passable & ((labels == 0) | (labels == source_subnet))

    dist = np.full((nrows, ncols), math.inf, dtype=np.float64)
    heap: list[tuple[float, int, int]] = []
    n_sources = 0
    for i, j in np.argwhere(labels == source_subnet):
        if passable[i, j]:
            dist[i, j] = 0.0
            heap.append((0.0, int(i), int(j)))
            n_sources += 1
    if n_sources == 0:
        raise InputDataError(f"subnet {source_subnet} has no passable source cells")
    heapq.heapify(heap)

    while heap:
        d, r, c = heapq.heappop(heap)
        if d > dist[r, c]:
            continue
        fa = fric[r, c]
        for dr, dc in SCAN_ORDER:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < nrows and 0 <= nc < ncols) or not passable[nr, nc]:
                continue
            nd = d + _step_cost(fa, fric[nr, nc], lengths[abs(dr * dc)])
            if nd < dist[nr, nc]:
                dist[nr, nc] = nd
                heapq.heappush(heap, (nd, nr, nc))

    return NumericGrid(friction.header, dist)


@dataclass(frozen=True)
class CostMatrix:
    """Symmetric subnet-to-subnet least-cost distances, meters-equivalent."""

    subnet_ids: tuple[int, ...]
    costs: np.ndarray  # (n, n), +inf for unreachable pairs

    @property
    def n(self) -> int:
        return len(self.subnet_ids)


def cost_matrix(
    labeling: SubnetLabeling,
    friction: NumericGrid,
    opaque_subnets: bool = False,
    on_surface=None,
) -> CostMatrix:
    """All-pairs least-cost distances between subnets.

    Each direction is computed independently; the two must agree to
    within a 1e-6 relative tolerance (step costs are symmetric, so any
    larger gap is a bug) and are then averaged to make the matrix
    exactly symmetric.  ``on_surface(subnet_id, grid)`` is invoked with
    each source's cost surface so callers can persist them.
    """
    ids = tuple(s.subnet_id for s in labeling.subnets)
    n = len(ids)
    if n == 0:
        raise InputDataError("labeling has no subnets")
    raw = np.zeros((n, n), dtype=np.float64)
    labels = labeling.labels.values
    for a, sid in enumerate(ids):
        surface_grid = cost_distance_from(labeling, friction, sid, opaque_subnets)
        if on_surface is not None:
            on_surface(sid, surface_grid)
        surface = surface_grid.values
        for b, tid in enumerate(ids):
            raw[a, b] = float(np.min(surface[labels == tid]))

    for a in range(n):
        for b in range(a + 1, n):
            x, y = raw[a, b], raw[b, a]
            if math.isinf(x) and math.isinf(y):
                continue
            if not (abs(x - y) <= _SYMMETRY_RTOL * max(1.0, x)):
                raise InvariantError(
                    f"cost asymmetry between subnets {ids[a]} and {ids[b]}: {x} vs {y}"
                )
    sym = (raw + raw.T) / 2.0
    np.fill_diagonal(sym, 0.0)
    return CostMatrix(ids, sym)


@dataclass(frozen=True)
class LeastCostPath:
    """Cell path from a source cell to the target, with the accumulated
    cost surface sampled along it."""

    cells: tuple[tuple[int, int], ...]
    accumulated: tuple[float, ...]

    @property
    def total(self) -> float:
        return self.accumulated[-1]


def trace_path(
    cost_surface: NumericGrid,
    friction: NumericGrid,
    target: tuple[int, int],
) -> LeastCostPath:
    """Backtrace one least-cost path from the target to a zero-cost cell.

    Follows exact cost descents (a neighbor whose value plus the step
    cost reproduces the current value), taking candidates in the fixed
    scan order; depth-first backtracking handles zero-friction plateaus.
    """
    require_aligned(cost_surface, friction)
    nrows, ncols = cost_surface.header.shape
    cellsize = cost_surface.header.cellsize
    lengths = {0: cellsize, 1: cellsize * math.sqrt(2.0)}
    cost = cost_surface.values
    fric = friction.values
    impassable = friction.nodata_mask

    r, c = target
    if not (0 <= r < nrows and 0 <= c < ncols):
        raise InputDataError(f"target {target} outside the grid")
    if math.isinf(cost[r, c]):
        raise InputDataError(f"target {target} is unreachable")

    stack = [(r, c)]
    visited = {(r, c)}
    while stack:
        cr, cc = stack[-1]
        if cost[cr, cc] == 0.0:
            cells = tuple(reversed(stack))
            return LeastCostPath(cells, tuple(float(cost[i, j]) for i, j in cells))
        advanced = False
        for dr, dc in SCAN_ORDER:
            nr, nc = cr + dr, cc + dc
            if not (0 <= nr < nrows and 0 <= nc < ncols) or (nr, nc) in visited:
                continue
            if impassable[nr, nc] or math.isinf(cost[nr, nc]):
                continue
            step = _step_cost(fric[nr, nc], fric[cr, cc], lengths[abs(dr * dc)])
            if cost[nr, nc] + step == cost[cr, cc]:
                stack.append((nr, nc))
                visited.add((nr, nc))
                advanced = True
                break
        if not advanced:
            stack.pop()
    raise InvariantError(f"no cost descent from {target} reaches a source cell")


def write_cost_matrix(matrix: CostMatrix, path) -> None:
    """CSV: header row of subnet ids, then the square matrix; unreachable
    pairs spelled ``inf``."""
    lines = [",".join(str(i) for i in matrix.subnet_ids)]
    for row in matrix.costs:
        lines.append(",".join(format_number(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_cost_matrix(path) -> CostMatrix:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln]
    if not lines:
        raise InputDataError(f"{path}: empty cost matrix")
    ids = tuple(int(t) for t in lines[0].split(","))
    rows = [[float(t) for t in ln.split(",")] for ln in lines[1:]]
    if len(rows) != len(ids) or any(len(r) != len(ids) for r in rows):
        raise InputDataError(f"{path}: matrix is not {len(ids)}x{len(ids)}")
    return CostMatrix(ids, np.array(rows, dtype=np.float64))
