"""Polynomial optimization with Lasserre moment relaxations and flat-truncation certificates."""

import json

from ._flatpop import (
    ExtractionError,
    Flavor,
    ParseError,
    Polynomial,
    Problem,
    __version__,
    atomic_tms,
    check_flat_truncation,
    extract_atoms,
    localizing_matrix,
    moment_matrix,
    monomials,
    numerical_rank,
    parse_flavor,
    parse_problem,
    print_problem,
    solve_relaxation,
)
from . import _flatpop


def _flavor(flavor):
    return parse_flavor(flavor) if isinstance(flavor, str) else flavor


def run_hierarchy(problem, flavor="putinar", **options):
    """Run the hierarchy and return the result document as a dict."""
    if isinstance(problem, str):
        problem = parse_problem(problem)
    return json.loads(_flatpop.run_document(problem, _flavor(flavor), **options))


def compare_flavors(problem, flavors, k_lo, k_hi):
    """Bounds per (flavor, k) with the dominance checks, as a dict."""
    if isinstance(problem, str):
        problem = parse_problem(problem)
    return json.loads(_flatpop.compare_document(problem, [_flavor(f) for f in flavors], k_lo, k_hi))


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


__all__ = [
    "ExtractionError",
    "Flavor",
    "ParseError",
    "Polynomial",
    "Problem",
    "__version__",
    "atomic_tms",
    "check_flat_truncation",
    "compare_flavors",
    "extract_atoms",
    "load_problem",
    "localizing_matrix",
    "moment_matrix",
    "monomials",
    "numerical_rank",
    "parse_flavor",
    "parse_problem",
    "print_problem",
    "run_hierarchy",
    "solve_relaxation",
]
