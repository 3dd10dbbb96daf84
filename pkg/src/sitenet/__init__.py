"""Raster-based connectivity analysis for protected-site networks.

The package takes site polygons plus categorical landscape layers and
derives, per landscape unit: subnet components, their morphological
structure (simple vs. complex), a friction surface, least-cost
inter-subnet distances, and probabilistic connectivity indices.
"""

__version__ = "0.1.0"

from sitenet.costdist import (
    CostMatrix,
    LeastCostPath,
    cost_distance_from,
    cost_matrix,
    trace_path,
)
from sitenet.friction import FrictionTable, build_friction, validate_table
from sitenet.grids import (
    CategoricalGrid,
    GridHeader,
    NumericGrid,
    read_grid,
    write_grid,
)
from sitenet.indices import (
    DispersalParams,
    FunctionalIndices,
    ProbabilityMatrix,
    dispersal_k,
    isolated_share,
    probability_matrix,
    rapc,
    rpc,
)
from sitenet.morphology import (
    COMPLEX,
    SIMPLE,
    MorphologyParams,
    StructuralShares,
    SubnetStructure,
    classify_subnet,
    dilate,
    erode,
    opening,
    structural_shares,
)
from sitenet.pipeline import PipelineConfig, load_config, run_pipeline
from sitenet.report import UnitReport, write_report
from sitenet.sites import SitePolygonSet, load_sites, make_sites, rasterize_sites
from sitenet.subnets import (
    PatternStats,
    SubnetLabeling,
    SubnetRecord,
    label_subnets,
    pattern_stats,
)

__all__ = [
    "CategoricalGrid", "CostMatrix", "DispersalParams", "FrictionTable",
    "FunctionalIndices", "GridHeader", "LeastCostPath", "MorphologyParams",
    "NumericGrid", "PatternStats", "PipelineConfig", "ProbabilityMatrix",
    "SitePolygonSet", "StructuralShares", "SubnetLabeling", "SubnetRecord",
    "SubnetStructure", "UnitReport", "COMPLEX", "SIMPLE",
    "build_friction", "classify_subnet", "cost_distance_from", "cost_matrix",
    "dilate", "dispersal_k", "erode", "isolated_share", "label_subnets",
    "load_config", "load_sites", "make_sites", "opening", "pattern_stats",
    "probability_matrix", "rapc", "rasterize_sites", "read_grid", "rpc",
    "run_pipeline", "structural_shares", "trace_path", "validate_table",
    "write_grid", "write_report",
]
