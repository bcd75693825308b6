"""Proportional, truncated proportional and maximin shares."""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from . import _mms_py
from .errors import BudgetExceeded, IndexOutOfRange
from .model import Instance

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
_INT64_SAFE = 1 << 60

if os.environ.get("FAIRSHARE_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from ._mms_kernel import mms_int as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def default_budget() -> int:
    raw = os.environ.get("FAIRSHARE_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def _row(inst: Instance, i: int):
    if not 0 <= i < inst.n:
        raise IndexOutOfRange(f"agent {i} not in 0..{inst.n - 1}")
    return inst.values[i]


def proportional_share(inst: Instance, i: int) -> Fraction:
    return sum(_row(inst, i), Fraction(0)) / inst.n


def tps_of(values, n: int) -> Fraction:
    """TPS of one valuation vector among ``n`` agents, by recursive removal.

    While the most valuable remaining item is worth more than the current
    proportional share, drop it together with one agent.
    """
    vals = sorted(values, reverse=True)
    total = sum(vals, Fraction(0))
    k = 0
    while n - k > 1 and k < len(vals) and vals[k] * (n - k) > total:
        total -= vals[k]
        k += 1
    return total / (n - k)


def tps_fixed_point(values, n: int) -> Fraction:
    """TPS by scanning the fixed-point equation directly.

    For each count k of truncated top items, the candidate is
    ``(sum of the rest) / (n - k)``; the largest candidate that actually
    solves ``(1/n) * sum(min(v, t)) == t`` wins.  ``t = 0`` always solves it.
    """
    vals = sorted(values, reverse=True)
    best = Fraction(0)
    for k in range(min(len(vals), n - 1) + 1):
        t = sum(vals[k:], Fraction(0)) / (n - k)
        if sum((min(v, t) for v in vals), Fraction(0)) == n * t and t > best:
            best = t
    return best


def tps(inst: Instance, i: int) -> Fraction:
    return tps_of(_row(inst, i), inst.n)


def exceptional_items(inst: Instance, i: int) -> frozenset[int]:
    """Items worth at least the agent's TPS; zero-value items never count."""
    row = _row(inst, i)
    t = tps(inst, i)
    out = frozenset(j for j, v in enumerate(row) if v >= t and v > 0)
    if len(out) >= inst.n:
        log.info("agent %d has %d exceptional items (n = %d)", i, len(out), inst.n)
    return out


def partition_count(m: int, n: int) -> int:
    """Number of ways to split m labelled items into at most n unlabelled bundles."""
    if m == 0:
        return 1
    # row[k] = Stirling number S(items so far, k)
    row = [1] + [0] * n
    for _ in range(m):
        new = [0] * (n + 1)
        for k in range(1, n + 1):
            new[k] = k * row[k] + row[k - 1]
        row = new
    return sum(row[1:])


def mms_of(values, n: int, budget: int | None = None, backend: str | None = None) -> Fraction:
    budget = default_budget() if budget is None else budget
    vals = sorted(values, reverse=True)
    needed = partition_count(len(vals), n)
    if needed > budget:
        raise BudgetExceeded(needed, budget)
    if len(vals) < n:
        return Fraction(0)
    scale = math.lcm(*(v.denominator for v in vals))
    ints = [int(v * scale) for v in vals]
    kernel = _mms_py.mms_int
    use = backend or BACKEND
    if use == "compiled" and _compiled is not None and sum(ints) * n < _INT64_SAFE:
        kernel = _compiled
    return Fraction(kernel(ints, n), scale)


def mms(inst: Instance, i: int, budget: int | None = None) -> Fraction:
    return mms_of(_row(inst, i), inst.n, budget)


@dataclass(frozen=True)
class ShareReport:
    agent: int
    ps: Fraction
    tps: Fraction
    mms: Fraction | None  # None when the enumeration budget was exceeded

    def chain_holds(self, n: int) -> bool:
        if not self.ps >= self.tps:
            return False
        if self.mms is None:
            return True
        return self.tps >= self.mms >= Fraction(n, 2 * n - 1) * self.tps


def share_report(inst: Instance, i: int, budget: int | None = None, with_mms: bool = True) -> ShareReport:
    value = None
    if with_mms:
        try:
            value = mms(inst, i, budget)
        except BudgetExceeded:
            value = None
    return ShareReport(i, proportional_share(inst, i), tps(inst, i), value)
