"""Exact rational linear programming.

``solve_lp`` is a dense two-phase tableau simplex with Bland's rule, so it
terminates without perturbation and always returns a vertex.
``basic_feasible_point`` purifies a feasible point into a vertex without
losing objective value; its output support is a subset of the input support.

All variables are implicitly non-negative.  Callers only ever see their own
variable indices; slack, surplus and artificial columns stay internal.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import HintInfeasible, InvalidParameter, LpUnbounded
from .model import as_fraction

LE, EQ, GE = "<=", "=", ">="
_FLIP = {LE: GE, GE: LE, EQ: EQ}
_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def lhs(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * v for a, v in zip(self.coeffs, x) if a), _ZERO)

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = self.lhs(x)
        if self.relation == LE:
            return lhs <= self.rhs
        if self.relation == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LpProblem:
    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    maximize: bool = True

    def __post_init__(self):
        nv = len(self.objective)
        for k, c in enumerate(self.constraints):
            if len(c.coeffs) != nv:
                raise InvalidParameter(f"constraint {k} has {len(c.coeffs)} coefficients, expected {nv}")
            if c.relation not in _FLIP:
                raise InvalidParameter(f"unknown relation {c.relation!r}")

    @classmethod
    def build(cls, objective: Iterable, constraints: Iterable[tuple[Iterable, str, object]],
              maximize: bool = True) -> "LpProblem":
        obj = tuple(as_fraction(v) for v in objective)
        cons = tuple(
            Constraint(tuple(as_fraction(v) for v in row), rel, as_fraction(rhs))
            for row, rel, rhs in constraints
        )
        return cls(obj, cons, maximize)

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.objective, x) if c), _ZERO)

    def feasible(self, x: Sequence[Fraction]) -> bool:
        return all(v >= 0 for v in x) and all(c.holds(x) for c in self.constraints)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"  # a vertex, not necessarily optimal (basic_feasible_point)
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpSolution:
    status: Status
    values: tuple[Fraction, ...] = ()
    basis: frozenset[int] = frozenset()
    objective_value: Fraction | None = None

    def support(self) -> list[int]:
        return [k for k, v in enumerate(self.values) if v != 0]


# --- simplex ----------------------------------------------------------------

def _pivot(T: list[list[Fraction]], extra: list[list[Fraction]], r: int, c: int) -> None:
    row = T[r]
    piv = row[c]
    if piv != 1:
        row = [v / piv for v in row]
        T[r] = row
    nz = [k for k, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i == r:
            continue
        f = other[c]
        if f:
            for k in nz:
                other[k] -= f * row[k]
    for other in extra:
        f = other[c]
        if f:
            for k in nz:
                other[k] -= f * row[k]


def _run_simplex(T, basis, cost, allowed) -> bool:
    """Maximize ``cost`` over the tableau in place. Returns False if unbounded."""
    rhs = len(cost)
    d = list(cost) + [_ZERO]
    for i, b in enumerate(basis):
        cb = cost[b]
        if cb:
            row = T[i]
            for k, v in enumerate(row):
                if v:
                    d[k] -= cb * v
    while True:
        enter = next((j for j in allowed if d[j] > 0), None)
        if enter is None:
            return True
        leave = None
        best = None
        for i, row in enumerate(T):
            a = row[enter]
            if a > 0:
                ratio = row[rhs] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return False
        _pivot(T, [d], leave, enter)
        basis[leave] = enter


def solve_lp(p: LpProblem) -> LpSolution:
    nv = p.num_vars
    rows = []
    for c in p.constraints:
        a, rel, b = list(c.coeffs), c.relation, c.rhs
        if b < 0:
            a, rel, b = [-v for v in a], _FLIP[rel], -b
        rows.append((a, rel, b))

    n_slack = sum(1 for _, rel, _ in rows if rel != EQ)
    n_art = sum(1 for _, rel, _ in rows if rel != LE)
    ncols = nv + n_slack + n_art
    art_start = nv + n_slack

    T: list[list[Fraction]] = []
    basis: list[int] = []
    s = nv
    art = art_start
    for a, rel, b in rows:
        row = a + [_ZERO] * (n_slack + n_art) + [b]
        if rel == LE:
            row[s] = _ONE
            basis.append(s)
            s += 1
        else:
            if rel == GE:
                row[s] = -_ONE
                s += 1
            row[art] = _ONE
            basis.append(art)
            art += 1
        T.append(row)

    if n_art:
        phase1 = [_ZERO] * art_start + [-_ONE] * n_art
        _run_simplex(T, basis, phase1, range(ncols))
        infeas = sum((T[i][ncols] for i, b in enumerate(basis) if b >= art_start), _ZERO)
        if infeas > 0:
            return LpSolution(Status.INFEASIBLE)
        # drive zero-valued artificials out of the basis; drop redundant rows
        i = 0
        while i < len(T):
            if basis[i] >= art_start:
                j = next((k for k in range(art_start) if T[i][k] != 0), None)
                if j is None:
                    del T[i]
                    del basis[i]
                    continue
                _pivot(T, [], i, j)
                basis[i] = j
            i += 1

    cost = [v if p.maximize else -v for v in p.objective] + [_ZERO] * (ncols - nv)
    if not _run_simplex(T, basis, cost, range(art_start)):
        return LpSolution(Status.UNBOUNDED)

    x = [_ZERO] * nv
    for i, b in enumerate(basis):
        if b < nv:
            x[b] = T[i][ncols]
    return LpSolution(Status.OPTIMAL, tuple(x), frozenset(b for b in basis if b < nv), p.value(x))


# --- purification -----------------------------------------------------------

def basic_feasible_point(p: LpProblem, feasible_hint: Sequence) -> LpSolution:
    """Move a feasible point to a vertex without worsening the objective.

    Columns of the current support are absorbed one at a time into a growing
    independent set.  A dependent column defines a direction in the null
    space of the support; walking along it (in the non-worsening sense) until
    a coordinate hits zero either drops that column or exchanges it into the
    independent set.
    """
    nv = p.num_vars
    hint = [as_fraction(v) for v in feasible_hint]
    if len(hint) != nv:
        raise InvalidParameter(f"hint has {len(hint)} entries, expected {nv}")
    if not p.feasible(hint):
        raise HintInfeasible("hint violates a constraint or non-negativity")

    # standard form: one slack column per inequality row
    cols: list[dict[int, Fraction]] = [dict() for _ in range(nv)]
    x = list(hint)
    cost = [v if p.maximize else -v for v in p.objective]
    for r, c in enumerate(p.constraints):
        for k, a in enumerate(c.coeffs):
            if a:
                cols[k][r] = a
        if c.relation != EQ:
            sign = _ONE if c.relation == LE else -_ONE
            cols.append({r: sign})
            x.append(sign * (c.rhs - c.lhs(hint)))
            cost.append(_ZERO)
    R = len(p.constraints)
    ncols = len(cols)

    E = [[_ONE if i == j else _ZERO for j in range(R)] for i in range(R)]
    row_col: list[int | None] = [None] * R

    def image(k: int) -> list[Fraction]:
        a = cols[k]
        return [sum((Er[r] * v for r, v in a.items() if Er[r]), _ZERO) for Er in E]

    def absorb(r: int, col: list[Fraction], k: int) -> None:
        piv = col[r]
        er = [v / piv for v in E[r]] if piv != 1 else E[r]
        E[r] = er
        nz = [j for j, v in enumerate(er) if v]
        for i in range(R):
            f = col[i]
            if i != r and f:
                Ei = E[i]
                for j in nz:
                    Ei[j] -= f * er[j]
        row_col[r] = k

    for k in range(ncols):
        if x[k] == 0:
            continue
        col = image(k)
        free = next((r for r in range(R) if row_col[r] is None and col[r] != 0), None)
        if free is not None:
            absorb(free, col, k)
            continue
        lam = {row_col[r]: col[r] for r in range(R) if row_col[r] is not None and col[r] != 0}
        gain = cost[k] - sum((v * cost[b] for b, v in lam.items()), _ZERO)
        sign = _ONE if gain > 0 else -_ONE
        direction = {k: sign}
        for b, v in lam.items():
            direction[b] = -sign * v
        steps = [x[v] / -dv for v, dv in direction.items() if dv < 0]
        if not steps:
            raise LpUnbounded("objective improves without bound along the support")
        t = min(steps)
        for v, dv in direction.items():
            x[v] += t * dv
        if x[k] == 0:
            continue
        out = min(b for b in lam if x[b] == 0)
        absorb(next(r for r in range(R) if row_col[r] == out), col, k)

    # extend the independent support to a full basis for reporting
    for k in range(ncols):
        if None not in row_col:
            break
        if k in row_col:
            continue
        col = image(k)
        free = next((r for r in range(R) if row_col[r] is None and col[r] != 0), None)
        if free is not None:
            absorb(free, col, k)

    values = tuple(x[:nv])
    return LpSolution(Status.FEASIBLE, values,
                      frozenset(k for k in row_col if k is not None and k < nv), p.value(values))
