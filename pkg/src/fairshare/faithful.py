"""Faithful implementation of fractional allocations.

Pipeline: clone eating -> Birkhoff-von Neumann peeling -> merge clones back
into agents -> support reduction by a basic feasible solution.  The result
implements the input exactly, every agent's ex-post value stays within one
fractional item of her ex-ante value, and the support has at most f + 1
allocations, f being the number of strictly fractional entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvariantViolation, LpError
from .lp import EQ, LpProblem, basic_feasible_point
from .matching import FractionalMatching, bvn_decompose
from .model import (
    Allocation,
    FractionalAllocation,
    Instance,
    Lottery,
    bundle_value,
    expected_allocation,
)

_ZERO = Fraction(0)


@dataclass(frozen=True)
class CloneMatching:
    owners: tuple[int, ...]  # owners[c] = agent of clone c
    entries: tuple[tuple[int, int, Fraction], ...]  # (clone, item, fraction)
    m: int

    def clones_of(self, agent: int) -> list[int]:
        return [c for c, a in enumerate(self.owners) if a == agent]

    def window(self, clone: int) -> list[int]:
        return [j for c, j, _ in self.entries if c == clone]

    def as_matching(self) -> FractionalMatching:
        return FractionalMatching(len(self.owners), self.m, self.entries)


@dataclass(frozen=True)
class SpreadCertificate:
    min_value: tuple[Fraction, ...]
    max_value: tuple[Fraction, ...]
    bound: tuple[Fraction, ...]  # most valuable strictly fractional item, per agent

    def holds(self) -> bool:
        return all(hi - lo <= b for lo, hi, b in zip(self.min_value, self.max_value, self.bound))


def eating_order(inst: Instance, agent: int, items) -> list[int]:
    row = inst.values[agent]
    return sorted(items, key=lambda j: (-row[j], j))


def clone_eating(fa: FractionalAllocation, inst: Instance) -> CloneMatching:
    """Each agent's clones consume one unit apiece, best items first."""
    owners: list[int] = []
    entries: list[tuple[int, int, Fraction]] = []
    for i in range(fa.n):
        row = fa.x[i]
        clone = None
        cap = _ZERO
        for j in eating_order(inst, i, [j for j in range(fa.m) if row[j] > 0]):
            amount = row[j]
            while amount > 0:
                if cap == 0:
                    clone = len(owners)
                    owners.append(i)
                    cap = Fraction(1)
                take = min(amount, cap)
                entries.append((clone, j, take))
                amount -= take
                cap -= take
        f_i = sum(row, _ZERO)
        if owners.count(i) != math.ceil(f_i):
            raise InvariantViolation(f"agent {i}: clone count does not match ceil({f_i})")
    return CloneMatching(tuple(owners), tuple(entries), fa.m)


def reduce_support(lot: Lottery, preserved: Mapping[tuple[int, int], Fraction]) -> Lottery:
    """Keep only a vertex of {z >= 0 : sum z = 1, E_z[item j to agent i] = target}.

    Starts from the lottery's own probabilities, so the output uses a subset
    of its allocations and has at most ``len(preserved) + 1`` of them.
    """
    allocs = lot.allocations()
    keys = sorted(preserved)
    rows = [([1] * len(allocs), EQ, 1)]
    for i, j in keys:
        rows.append(([1 if j in a.bundles[i] else 0 for a in allocs], EQ, preserved[(i, j)]))
    problem = LpProblem.build([0] * len(allocs), rows)
    try:
        sol = basic_feasible_point(problem, [p for p, _ in lot.support])
    except LpError as exc:
        raise InvariantViolation(f"support reduction failed: {exc}") from exc
    return Lottery(tuple((z, a) for z, a in zip(sol.values, allocs) if z > 0))


def spread_certificate(lot: Lottery, fa: FractionalAllocation, inst: Instance) -> SpreadCertificate:
    lows, highs, bounds = [], [], []
    for i in range(fa.n):
        vals = [bundle_value(inst, i, a.bundles[i]) for a in lot.allocations()]
        lows.append(min(vals))
        highs.append(max(vals))
        frac = [inst.values[i][j] for j in range(fa.m) if 0 < fa.x[i][j] < 1]
        bounds.append(max(frac, default=_ZERO))
    return SpreadCertificate(tuple(lows), tuple(highs), tuple(bounds))


def faithful_implement(fa: FractionalAllocation, inst: Instance) -> tuple[Lottery, SpreadCertificate]:
    n, m = fa.n, fa.m
    if inst.n != n or inst.m != m:
        raise ValueError("fractional allocation and instance disagree on shape")
    fixed = [frozenset(j for j in range(m) if fa.x[i][j] == 1) for i in range(n)]
    frac_pairs = fa.strictly_fractional()

    if not frac_pairs:
        lot = Lottery(((Fraction(1), Allocation(tuple(fixed))),))
    else:
        rest = FractionalAllocation(tuple(
            tuple(q if 0 < q < 1 else _ZERO for q in row) for row in fa.x))
        clones = clone_eating(rest, inst)
        weighted = []
        for coef, pairs in bvn_decompose(clones.as_matching()):
            bundles = [set(b) for b in fixed]
            for c, j in pairs:
                bundles[clones.owners[c]].add(j)
            weighted.append((coef, Allocation.of(bundles)))
        lot = Lottery.merged(weighted)
        lot = reduce_support(lot, {(i, j): fa.x[i][j] for i, j in frac_pairs})

    if expected_allocation(lot, m) != fa:
        raise InvariantViolation("lottery does not implement the fractional allocation")
    if len(lot) > len(frac_pairs) + 1:
        raise InvariantViolation(f"support {len(lot)} exceeds f + 1 = {len(frac_pairs) + 1}")
    cert = spread_certificate(lot, fa, inst)
    if not cert.holds():
        raise InvariantViolation("small-spread property violated")
    for i in range(n):
        ante = fa.value(inst, i)
        b = cert.bound[i]
        if not (ante - b <= cert.min_value[i] and cert.max_value[i] <= ante + b):
            raise InvariantViolation(f"agent {i}: ex-post value strays more than one item from ex-ante")
    return lot, cert
