"""Depth-based centrality and ranking for point processes observed up to
their first k events, with seeded simulators, moment estimation, contour
and rank analysis, and a file-based CLI."""

from .analysis import (
    ContourGrid,
    NearBoundarySummary,
    PropertyCheck,
    PropertyReport,
    RankEntry,
    RankTable,
    contour_grid,
    depth_values,
    near_boundary_comparison,
    rank,
    verify_properties,
    weighted_fraction_gap,
)
from .depth import (
    DepthBreakdown,
    DepthParams,
    center_times,
    conditional_depth,
    hpp_conditional_depth,
    mahalanobis_depth,
    marginal_depth_d1,
    marginal_factor,
    omega,
    product_depth,
)
from .errors import DataError
from .estimation import fit_mahalanobis, fit_params
from .io import emit_results, load_csv, load_params_json, save_params_json, save_sample_csv
from .sequences import EventSequence, SampleSet
from .simulate import SimConfig, simulate, simulate_hpp, simulate_state_dependent

__version__ = "0.1.0"

__all__ = [
    "ContourGrid",
    "DataError",
    "DepthBreakdown",
    "DepthParams",
    "EventSequence",
    "NearBoundarySummary",
    "PropertyCheck",
    "PropertyReport",
    "RankEntry",
    "RankTable",
    "SampleSet",
    "SimConfig",
    "center_times",
    "conditional_depth",
    "contour_grid",
    "depth_values",
    "emit_results",
    "fit_mahalanobis",
    "fit_params",
    "hpp_conditional_depth",
    "load_csv",
    "load_params_json",
    "mahalanobis_depth",
    "marginal_depth_d1",
    "marginal_factor",
    "near_boundary_comparison",
    "omega",
    "product_depth",
    "rank",
    "save_params_json",
    "save_sample_csv",
    "simulate",
    "simulate_hpp",
    "simulate_state_dependent",
    "verify_properties",
    "weighted_fraction_gap",
]
