"""Morphological structure of subnet footprints.

Each footprint is reduced to nodes (components of its opening, i.e.
erosion then dilation by the edge width) and links (connector components
of the remainder).  A subnet with two or more nodes is COMPLEX, anything
else SIMPLE, including degenerate footprints too thin to contain a node.

Structuring elements are squares (Chebyshev balls) under 8-connectivity
and diamonds (Manhattan balls) under 4-connectivity; cells beyond the
grid border count as background for erosion.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sitenet.errors import InputDataError

SIMPLE = "SIMPLE"
COMPLEX = "COMPLEX"

_NEIGHBORS = {
    4: ((-1, 0), (0, -1), (0, 1), (1, 0)),
    8: ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}


@dataclass(frozen=True)
class MorphologyParams:
    edge_width: int = 1
    connectivity: int = 8

    def __post_init__(self):
        if self.edge_width < 1:
            raise InputDataError(f"edge_width must be >= 1, got {self.edge_width}")
        if self.connectivity not in (4, 8):
            raise InputDataError(f"connectivity must be 4 or 8, got {self.connectivity}")


@dataclass(frozen=True)
class SubnetStructure:
    subnet_id: int
    n_nodes: int
    n_links: int
    subnet_class: str


@dataclass(frozen=True)
class StructuralShares:
    share_complex: float
    share_simple: float


def _offsets(radius: int, connectivity: int):
    if connectivity == 8:
        return [(di, dj)
                for di in range(-radius, radius + 1)
                for dj in range(-radius, radius + 1)]
    return [(di, dj)
            for di in range(-radius, radius + 1)
            for dj in range(-radius, radius + 1)
            if abs(di) + abs(dj) <= radius]


def _shifted(mask: np.ndarray, di: int, dj: int) -> np.ndarray:
    """mask sampled at (i + di, j + dj), False beyond the border."""
    nrows, ncols = mask.shape
    out = np.zeros_like(mask, dtype=bool)
    if abs(di) >= nrows or abs(dj) >= ncols:
        return out
    src_r = slice(max(di, 0), nrows + min(di, 0))
    dst_r = slice(max(-di, 0), nrows + min(-di, 0))
    src_c = slice(max(dj, 0), ncols + min(dj, 0))
    dst_c = slice(max(-dj, 0), ncols + min(-dj, 0))
    out[dst_r, dst_c] = mask[src_r, src_c]
    return out


def erode(mask: np.ndarray, radius: int, connectivity: int = 8) -> np.ndarray:
    """Cell kept iff every cell within the structuring distance is set."""
    if radius < 1:
        raise InputDataError(f"radius must be >= 1, got {radius}")
    mask = np.asarray(mask, dtype=bool)
    out = mask.copy()
    for di, dj in _offsets(radius, connectivity):
        if di == 0 and dj == 0:
            continue
        out &= _shifted(mask, di, dj)
        if not out.any():
            break
    return out


def dilate(mask: np.ndarray, radius: int, connectivity: int = 8) -> np.ndarray:
    """Cell set iff any set cell lies within the structuring distance."""
    if radius < 1:
        raise InputDataError(f"radius must be >= 1, got {radius}")
    mask = np.asarray(mask, dtype=bool)
    out = mask.copy()
    for di, dj in _offsets(radius, connectivity):
        if di == 0 and dj == 0:
            continue
        out |= _shifted(mask, di, dj)
    return out


def opening(mask: np.ndarray, radius: int, connectivity: int = 8) -> np.ndarray:
    return dilate(erode(mask, radius, connectivity), radius, connectivity)


def _components(mask: np.ndarray, connectivity: int) -> tuple[np.ndarray, int]:
    """Label components 1..n in row-major first-seen order (iterative)."""
    nrows, ncols = mask.shape
    labels = np.zeros((nrows, ncols), dtype=np.int64)
    offsets = _NEIGHBORS[connectivity]
    n = 0
    for i in range(nrows):
        for j in range(ncols):
            if not mask[i, j] or labels[i, j]:
                continue
            n += 1
            stack = [(i, j)]
            labels[i, j] = n
            while stack:
                r, c = stack.pop()
                for dr, dc in offsets:
                    nr, nc = r + dr, c + dc
                    if (0 <= nr < nrows and 0 <= nc < ncols
                            and mask[nr, nc] and not labels[nr, nc]):
                        labels[nr, nc] = n
                        stack.append((nr, nc))
    return labels, n


def classify_subnet(
    footprint: np.ndarray,
    params: MorphologyParams = MorphologyParams(),
    subnet_id: int = 0,
) -> SubnetStructure:
    """Classify one connected footprint as SIMPLE or COMPLEX.

    Connector components of footprint-minus-nodes count as links when
    they bridge two distinct nodes, or when they leave and re-enter a
    single node at two separate contact patches (a loop).
    """
    footprint = np.asarray(footprint, dtype=bool)
    if not footprint.any():
        raise InputDataError("cannot classify an empty footprint")
    _, n_parts = _components(footprint, params.connectivity)
    if n_parts != 1:
        raise InputDataError(f"footprint must be one connected component, got {n_parts}")

    cores = opening(footprint, params.edge_width, params.connectivity)
    node_labels, n_nodes = _components(cores, params.connectivity)

    n_links = 0
    if n_nodes > 0:
        connector_labels, n_connectors = _components(footprint & ~cores, params.connectivity)
        neighbor_offsets = _NEIGHBORS[params.connectivity]
        nrows, ncols = footprint.shape
        for k in range(1, n_connectors + 1):
            cells = np.argwhere(connector_labels == k)
            touched: dict[int, set[tuple[int, int]]] = {}
            for r, c in cells:
                for dr, dc in neighbor_offsets:
                    nr, nc = r + dr, c + dc
                    if 0 <= nr < nrows and 0 <= nc < ncols and node_labels[nr, nc]:
                        touched.setdefault(int(node_labels[nr, nc]), set()).add((nr, nc))
            if len(touched) >= 2:
                n_links += 1
            elif len(touched) == 1:
                contact = next(iter(touched.values()))
                patch = np.zeros((nrows, ncols), dtype=bool)
                for r, c in contact:
                    patch[r, c] = True
                _, n_patches = _components(patch, params.connectivity)
                if n_patches >= 2:
                    n_links += 1

    cls = COMPLEX if n_nodes >= 2 else SIMPLE
    return SubnetStructure(subnet_id, n_nodes, n_links, cls)


def structural_shares(structures: list[SubnetStructure]) -> StructuralShares:
    """Fraction of COMPLEX vs SIMPLE subnets; shares sum to one exactly."""
    if not structures:
        raise InputDataError("no subnet structures to summarize")
    share_complex = sum(1 for s in structures if s.subnet_class == COMPLEX) / len(structures)
    return StructuralShares(share_complex=share_complex, share_simple=1.0 - share_complex)


def write_structure_table(structures: list[SubnetStructure], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["subnet_id", "n_nodes", "n_links", "class"])
        for s in structures:
            w.writerow([s.subnet_id, s.n_nodes, s.n_links, s.subnet_class])


def read_structure_table(path) -> list[SubnetStructure]:
    rows = list(csv.reader(Path(path).open()))
    if not rows or rows[0] != ["subnet_id", "n_nodes", "n_links", "class"]:
        raise InputDataError(f"{path}: not a structure table")
    return [SubnetStructure(int(r[0]), int(r[1]), int(r[2]), r[3]) for r in rows[1:] if r]
