"""Exact certificate checkers.

Checkers take results as plain data and never rerun a pipeline, so they act
as independent oracles.  Every margin is ``value - threshold`` as a Fraction;
a check passes iff all margins are non-negative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded
from .model import (
    Allocation,
    FractionalAllocation,
    Instance,
    Lottery,
    bundle_value,
    expected_allocation,
    expected_value,
)
from .serialize import q
from .shares import mms, proportional_share, tps

_ZERO = Fraction(0)


@dataclass(frozen=True)
class AuditReport:
    name: str
    passed: bool
    margins: tuple[Fraction, ...] = ()
    witness: dict | None = None  # first failure: {"agent": i, ...}

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "margins": [q(m) for m in self.margins],
            "witness": self.witness,
        }


def _report(name: str, margins, witnesses) -> AuditReport:
    """``witnesses[i]`` describes where agent i's margin was attained."""
    margins = tuple(margins)
    bad = next((i for i, m in enumerate(margins) if m < 0), None)
    witness = None if bad is None else {"agent": bad, **witnesses[bad]}
    return AuditReport(name, bad is None, margins, witness)


def check_ex_ante_proportional(lot: Lottery, inst: Instance) -> AuditReport:
    margins = [expected_value(lot, inst, i) - proportional_share(inst, i) for i in inst.agents]
    return _report("ex_ante_proportional", margins, [{} for _ in inst.agents])


def _worst_over_support(lot: Lottery, inst: Instance, margin_of):
    margins, where = [], []
    for i in inst.agents:
        vals = [margin_of(a, i) for a in lot.allocations()]
        k = min(range(len(vals)), key=vals.__getitem__)
        margins.append(vals[k])
        where.append({"allocation": k})
    return margins, where


def check_ex_post_half_tps(lot: Lottery, inst: Instance) -> AuditReport:
    def margin(a: Allocation, i: int) -> Fraction:
        return bundle_value(inst, i, a.bundles[i]) - tps(inst, i) / 2

    return _report("ex_post_half_tps", *_worst_over_support(lot, inst, margin))


def prop1_margin(alloc: Allocation, inst: Instance, i: int) -> Fraction:
    own = alloc.bundles[i]
    best_other = max((inst.values[i][j] for j in inst.items if j not in own), default=_ZERO)
    return bundle_value(inst, i, own) + best_other - proportional_share(inst, i)


def check_prop1(alloc: Allocation, inst: Instance) -> AuditReport:
    margins = [prop1_margin(alloc, inst, i) for i in inst.agents]
    return _report("prop1", margins, [{} for _ in inst.agents])


def check_ex_post_prop1(lot: Lottery, inst: Instance) -> AuditReport:
    def margin(a: Allocation, i: int) -> Fraction:
        return prop1_margin(a, inst, i)

    return _report("ex_post_prop1", *_worst_over_support(lot, inst, margin))


def _pairwise(alloc: Allocation, inst: Instance, name: str, relief) -> AuditReport:
    """Envy check up to ``relief(i, other_bundle)`` for every ordered pair."""
    margins, where = [], []
    for i in inst.agents:
        own = bundle_value(inst, i, alloc.bundles[i])
        worst, at = None, None
        for k in inst.agents:
            if k == i or not alloc.bundles[k]:
                continue
            other = alloc.bundles[k]
            m = own - bundle_value(inst, i, other) + relief(i, other)
            if worst is None or m < worst:
                worst, at = m, k
        margins.append(_ZERO if worst is None else worst)
        where.append({"envied": at})
    return _report(name, margins, where)


def check_ef1(alloc: Allocation, inst: Instance) -> AuditReport:
    return _pairwise(alloc, inst, "ef1",
                     lambda i, b: max(inst.values[i][g] for g in b))


def check_efx(alloc: Allocation, inst: Instance) -> AuditReport:
    # only items the envier values count; zero-value items would make EFX unreachable
    def relief(i, b):
        positive = [inst.values[i][g] for g in b if inst.values[i][g] > 0]
        return min(positive, default=_ZERO)

    return _pairwise(alloc, inst, "efx", relief)


def check_envy_free(alloc: Allocation, inst: Instance) -> AuditReport:
    return _pairwise(alloc, inst, "envy_free", lambda i, b: _ZERO)


@dataclass(frozen=True)
class HalfFairReport:
    allocation: Allocation
    flags: dict = field(default_factory=dict)  # (i, j) -> bool

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def violations(self) -> list[tuple[int, int]]:
        return sorted(p for p, ok in self.flags.items() if not ok)

    def to_json(self) -> dict:
        return {"name": "half_fair", "passed": self.passed,
                "violations": [list(p) for p in self.violations()]}


def check_half_fair(alloc: Allocation, inst: Instance) -> HalfFairReport:
    flags = {}
    for i in inst.agents:
        own = bundle_value(inst, i, alloc.bundles[i])
        for k in inst.agents:
            if k == i:
                continue
            other = alloc.bundles[k]
            flags[(i, k)] = len(other) <= 1 or 2 * own >= bundle_value(inst, i, other)
    return HalfFairReport(alloc, flags)


def check_implements(lot: Lottery, fa: FractionalAllocation) -> AuditReport:
    got = expected_allocation(lot, fa.m)
    diffs = [(i, j) for i in range(fa.n) for j in range(fa.m) if got.x[i][j] != fa.x[i][j]]
    if not diffs:
        return AuditReport("implements", True)
    i, j = diffs[0]
    return AuditReport("implements", False, (),
                       {"agent": i, "item": j, "expected": q(fa.x[i][j]), "got": q(got.x[i][j])})


def check_complete(lot: Lottery, inst: Instance) -> AuditReport:
    everything = frozenset(inst.items)
    for k, a in enumerate(lot.allocations()):
        if a.allocated() != everything:
            missing = sorted(everything - a.allocated())
            return AuditReport("all_items_allocated", False, (), {"allocation": k, "missing": missing})
    return AuditReport("all_items_allocated", True)


def check_support_size(lot: Lottery, bound: int) -> AuditReport:
    ok = len(lot) <= bound
    return AuditReport("support_size", ok, (Fraction(bound - len(lot)),),
                       None if ok else {"support": len(lot), "bound": bound})


def check_share_chain(inst: Instance, budget: int | None = None) -> AuditReport:
    """PS >= TPS >= MMS >= n/(2n-1) TPS; the margin is the tightest link.

    When the MMS enumeration is over budget only PS >= TPS is checked.
    """
    n = inst.n
    ratio = Fraction(n, 2 * n - 1)
    margins, where = [], []
    for i in inst.agents:
        ps, t = proportional_share(inst, i), tps(inst, i)
        links = {"ps>=tps": ps - t}
        try:
            share = mms(inst, i, budget)
        except BudgetExceeded:
            share = None
        if share is not None:
            links["tps>=mms"] = t - share
            links["mms>=ratio*tps"] = share - ratio * t
        link = min(links, key=links.__getitem__)
        margins.append(links[link])
        where.append({"link": link, "mms": None if share is None else q(share)})
    return _report("share_chain", margins, where)


def audit_lottery(lot: Lottery, inst: Instance, support_bound: int | None = None) -> list[AuditReport]:
    """Every guarantee a best-of-both-worlds lottery must satisfy."""
    reports = [
        check_ex_ante_proportional(lot, inst),
        check_ex_post_half_tps(lot, inst),
        check_ex_post_prop1(lot, inst),
        check_complete(lot, inst),
    ]
    if support_bound is not None:
        reports.append(check_support_size(lot, support_bound))
    return reports
