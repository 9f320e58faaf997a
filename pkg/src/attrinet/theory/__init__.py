"""Closed-form large-network limits of the attributed attachment models."""

from .bias import bias_limit, bias_limit_details, heavier_tail_condition, thinned_pmf
from .core import (
    TheorySolution,
    chi_phi_gamma0,
    derived_quantities,
    expected_pagerank,
    expected_pagerank_linear,
    expected_pagerank_series,
    homophily_limits,
    pagerank_tail_exponent,
    solve,
    solve_eta,
    spectral_data,
    stationarity_residual,
)
from .fringe import FringeTree, all_classes, all_ordered_trees, fringe_probability
from .laws import DegreeLaw, degree_law
from .sampling import rare_minority, rare_minority_asymptotics, rare_minority_eta, rare_minority_params, sampling_limits

__all__ = [
    "DegreeLaw",
    "FringeTree",
    "TheorySolution",
    "all_classes",
    "all_ordered_trees",
    "bias_limit",
    "bias_limit_details",
    "chi_phi_gamma0",
    "degree_law",
    "derived_quantities",
    "expected_pagerank",
    "expected_pagerank_linear",
    "expected_pagerank_series",
    "fringe_probability",
    "heavier_tail_condition",
    "homophily_limits",
    "pagerank_tail_exponent",
    "rare_minority",
    "rare_minority_asymptotics",
    "rare_minority_eta",
    "rare_minority_params",
    "sampling_limits",
    "solve",
    "solve_eta",
    "spectral_data",
    "stationarity_residual",
    "thinned_pmf",
]
