"""Probabilistic connectivity indices.

Connection probability decays exponentially with least-cost distance:
``p = exp(k * cost)`` with ``k = ln(0.5) / dist50``, so a pair of
subnets separated by the half distance (default 500 m) connects with
probability one half, and unreachable pairs with probability zero.

Three indices summarize a landscape unit:

  - rpc: area-weighted root probability of connectivity,
    ``sqrt(sum_ij a_i a_j p_ij) / A_L``; sensitive to subnet sizes and
    bounded above by the protected-cover fraction.
  - rapc: unweighted root average probability,
    ``sqrt(sum_ij p_ij) / n``; sensitive to distances and resistance
    only, bounded below by 1/sqrt(n).
  - isolated_share: fraction of subnets whose best off-diagonal
    connection probability falls below a threshold.

Both double sums run over all pairs including the diagonal (p_ii = 1).
Sums accumulate in plain row-major order so results are reproducible
to the bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sitenet.costdist import CostMatrix
from sitenet.errors import InputDataError
from sitenet.grids import format_number

DEFAULT_DIST50 = 500.0
DEFAULT_P_ISO = 0.05


@dataclass(frozen=True)
class DispersalParams:
    dist50: float  # meters at which connection probability is 0.5
    k: float  # ln(0.5) / dist50, negative, per meter


def dispersal_k(dist50: float = DEFAULT_DIST50) -> DispersalParams:
    if not dist50 > 0:
        raise ValueError(f"dist50 must be positive, got {dist50}")
    return DispersalParams(dist50=float(dist50), k=math.log(0.5) / dist50)


@dataclass(frozen=True)
class ProbabilityMatrix:
    subnet_ids: tuple[int, ...]
    probs: np.ndarray  # (n, n) in [0, 1], symmetric, unit diagonal

    @property
    def n(self) -> int:
        return len(self.subnet_ids)


def probability_matrix(costs: CostMatrix, params: DispersalParams) -> ProbabilityMatrix:
    """exp(k * cost) per pair; infinite cost maps to probability 0."""
    return ProbabilityMatrix(costs.subnet_ids, np.exp(params.k * costs.costs))


def rpc(areas, probs: ProbabilityMatrix, landscape_area: float) -> float:
    """Area-weighted root probability of connectivity."""
    if not landscape_area > 0:
        raise ValueError(f"landscape area must be positive, got {landscape_area}")
    areas = [float(a) for a in areas]
    if len(areas) != probs.n:
        raise InputDataError(f"{len(areas)} areas for a {probs.n}-subnet matrix")
    if any(not a > 0 for a in areas):
        raise ValueError("subnet areas must be positive")
    if sum(areas) > landscape_area:
        raise ValueError("total subnet area exceeds the landscape area")
    p = probs.probs
    total = 0.0
    for i in range(len(areas)):
        for j in range(len(areas)):
            total += areas[i] * areas[j] * p[i, j]
    return math.sqrt(total) / landscape_area


def rapc(probs: ProbabilityMatrix) -> float:
    """Unweighted root average probability of connectivity."""
    n = probs.n
    if n < 1:
        raise ValueError("at least one subnet is required")
    p = probs.probs
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += p[i, j]
    return math.sqrt(total) / n


def isolated_share(probs: ProbabilityMatrix, p_iso: float = DEFAULT_P_ISO) -> float:
    """Fraction of subnets with no partner above the threshold.

    A lone subnet has no partner at all and counts as isolated.
    """
    if not 0 < p_iso < 1:
        raise ValueError(f"isolation threshold must lie in (0, 1), got {p_iso}")
    n = probs.n
    if n < 1:
        raise ValueError("at least one subnet is required")
    if n == 1:
        return 1.0
    p = probs.probs
    isolated = 0
    for i in range(n):
        best = max(p[i, j] for j in range(n) if j != i)
        if best < p_iso:
            isolated += 1
    return isolated / n


@dataclass(frozen=True)
class FunctionalIndices:
    rpc: float
    rapc: float
    isolated_share: float
    dist50: float
    k: float
    p_iso: float


def compute_indices(
    costs: CostMatrix,
    areas,
    landscape_area: float,
    dist50: float = DEFAULT_DIST50,
    p_iso: float = DEFAULT_P_ISO,
) -> FunctionalIndices:
    """Bundle the three functional indices with the parameters used."""
    params = dispersal_k(dist50)
    probs = probability_matrix(costs, params)
    return FunctionalIndices(
        rpc=rpc(areas, probs, landscape_area),
        rapc=rapc(probs),
        isolated_share=isolated_share(probs, p_iso),
        dist50=params.dist50,
        k=params.k,
        p_iso=p_iso,
    )


def write_probability_matrix(probs: ProbabilityMatrix, path) -> None:
    """Same layout as the cost-matrix CSV: id header row, square body."""
    lines = [",".join(str(i) for i in probs.subnet_ids)]
    for row in probs.probs:
        lines.append(",".join(format_number(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_probability_matrix(path) -> ProbabilityMatrix:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln]
    if not lines:
        raise InputDataError(f"{path}: empty probability matrix")
    ids = tuple(int(t) for t in lines[0].split(","))
    rows = [[float(t) for t in ln.split(",")] for ln in lines[1:]]
    if len(rows) != len(ids) or any(len(r) != len(ids) for r in rows):
        raise InputDataError(f"{path}: matrix is not {len(ids)}x{len(ids)}")
    return ProbabilityMatrix(ids, np.array(rows, dtype=np.float64))
