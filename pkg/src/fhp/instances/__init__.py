"""Instance generators and certificate checkers."""
from .expander import ExpanderGraph, build_expander, certificate, second_eigenvalue
from .generators import gaussian_raw, gen_circle, gen_gaussian
from .sat import (
    CnfFormula,
    SymFormula,
    assignment_to_hyperplane,
    brute_force_sat,
    completeness_margin,
    extend_assignment,
    format_dimacs,
    hyperplane_to_assignment,
    parse_dimacs,
    points_from_sym,
    random_3sat13,
    soundness_report,
    sym_from_3sat,
)
from .studies import GapReport, RandomModelReport, random_margin_study, sdp_gap_demo

__all__ = [
    "CnfFormula",
    "ExpanderGraph",
    "GapReport",
    "RandomModelReport",
    "SymFormula",
    "assignment_to_hyperplane",
    "brute_force_sat",
    "build_expander",
    "certificate",
    "completeness_margin",
    "extend_assignment",
    "format_dimacs",
    "gaussian_raw",
    "gen_circle",
    "gen_gaussian",
    "hyperplane_to_assignment",
    "parse_dimacs",
    "points_from_sym",
    "random_3sat13",
    "random_margin_study",
    "sdp_gap_demo",
    "second_eigenvalue",
    "soundness_report",
    "sym_from_3sat",
]
