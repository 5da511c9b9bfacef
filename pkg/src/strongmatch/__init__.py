"""k-strong matchings in graphs: exact and greedy solvers, neighbourhood bounds,
random edge weights, inhomogeneous random graphs and reproducible experiments."""

from .errors import StrongMatchError
from .graph import Graph, build_graph, line_graph, graph_power, neighborhood_count, neighborhood_counts
from .io import read_graph, write_graph
from .matching import (
    BoundsReport,
    Matching,
    bounds_report,
    greedy_k_strong,
    is_k_strong,
    max_k_strong_exact,
    nu_lower_bounds,
    nu_upper_bound,
)
from .random_graphs import EdgeProbModel, sample_graph, validate_model
from .weights import (
    BernoulliIndicator,
    Constant,
    Exponential,
    Uniform,
    WeightModel,
    mc_weight_stats,
    min_weight_max_k_strong,
    select_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "BernoulliIndicator", "BoundsReport", "Constant", "EdgeProbModel", "Exponential", "Graph",
    "Matching", "StrongMatchError", "Uniform", "WeightModel", "bounds_report", "build_graph",
    "graph_power", "greedy_k_strong", "is_k_strong", "line_graph", "max_k_strong_exact",
    "mc_weight_stats", "min_weight_max_k_strong", "neighborhood_count", "neighborhood_counts",
    "nu_lower_bounds", "nu_upper_bound", "read_graph", "sample_graph", "select_gamma",
    "validate_model", "write_graph",
]
