"""Solvers and instance generators for the Furthest Hyperplane Problem and Maximum Margin Clustering."""
from .approx import ApproxParams, approx_solve, reweight_directions
from .core import (
    DEFAULT_TOL,
    Hyperplane,
    Labeling,
    PointSet,
    Tolerances,
    labeling_of,
    margin_of,
    normalize_instance,
    solve_labeled,
)
from .exact import (
    SampleBudget,
    SolveResult,
    enumerate_feasible_labelings,
    solve_eps_net,
    solve_exact_bfs,
    solve_random_hyperplane,
)
from .mmc import AffineSeparation, solve_mmc

__all__ = [
    "ApproxParams",
    "approx_solve",
    "reweight_directions",
    "DEFAULT_TOL",
    "Hyperplane",
    "Labeling",
    "PointSet",
    "Tolerances",
    "labeling_of",
    "margin_of",
    "normalize_instance",
    "solve_labeled",
    "SampleBudget",
    "SolveResult",
    "enumerate_feasible_labelings",
    "solve_eps_net",
    "solve_exact_bfs",
    "solve_random_hyperplane",
    "AffineSeparation",
    "solve_mmc",
]

__version__ = "0.1.0"
