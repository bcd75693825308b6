"""Exact best-of-both-worlds fair division of indivisible items."""
from .audit import AuditReport, HalfFairReport
from .baselines import envy_cycle_elimination, uniform_prop1
from .bobw import BobwResult, bobw_allocate
from .errors import (
    BudgetExceeded,
    FairShareError,
    InvalidInstance,
    InvariantViolation,
    LpInfeasible,
    LpUnbounded,
    NegativeValue,
)
from .faithful import SpreadCertificate, faithful_implement
from .lp import LpProblem, LpSolution, Status, basic_feasible_point, solve_lp
from .model import (
    Allocation,
    FractionalAllocation,
    Instance,
    Lottery,
    expected_allocation,
    gen_identical_units,
    gen_not_mms,
    gen_random,
    new_instance,
)
from .shares import BACKEND, mms, proportional_share, tps

__all__ = [
    "AuditReport", "HalfFairReport", "envy_cycle_elimination", "uniform_prop1",
    "BobwResult", "bobw_allocate", "BudgetExceeded", "FairShareError", "InvalidInstance",
    "InvariantViolation", "LpInfeasible", "LpUnbounded", "NegativeValue",
    "SpreadCertificate", "faithful_implement", "LpProblem", "LpSolution", "Status",
    "basic_feasible_point", "solve_lp", "Allocation", "FractionalAllocation", "Instance",
    "Lottery", "expected_allocation", "gen_identical_units", "gen_not_mms", "gen_random",
    "new_instance", "BACKEND", "mms", "proportional_share", "tps",
]
