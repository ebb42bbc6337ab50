"""Conditional planning with sensing actions by state-based regression."""

from .model import (
    BOTTOM,
    EMPTY,
    Act,
    AState,
    Case,
    Domain,
    Literals,
    NonSensing,
    Plan,
    Problem,
    PState,
    ResourceLimitError,
    Sensing,
    Seq,
    Vocabulary,
    branching_count,
    extends,
    holds,
    in_extension,
    seq,
)
from .progression import is_progression_solution, progress, progress_plan
from .regression import regress_plan, regress_sensing, regress_nonsensing
from .search import NoSolution, SearchLimitExceeded, SearchOptions, Solution, solve
from .syntax import parse_domain, parse_plan, parse_problem, render_plan

__version__ = "0.1.0"
