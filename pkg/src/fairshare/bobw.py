"""Best-of-both-worlds allocation.

A lottery over at most n allocations that is proportional ex-ante, while
every allocation in its support gives each agent half her TPS and is Prop1.

Phase 1 matches every agent to one exceptional item or to a private
auxiliary item worth her TPS (LP1 + faithful rounding).  For each matching,
Phase 2 gives the auxiliary holders real items by a weighted matching and
Phase 3 spreads the remaining items by LP3 + faithful rounding.  Phase 4
shrinks the combined lottery to n allocations with LP4.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .audit import AuditReport, audit_lottery, prop1_margin
from .errors import InvariantViolation
from .faithful import faithful_implement
from .lp import EQ, GE, LE, LpProblem, Status, solve_lp
from .matching import WeightedBipartiteGraph, max_weight_matching
from .model import (
    Allocation,
    FractionalAllocation,
    Instance,
    Lottery,
    bundle_value,
    expected_value,
    new_instance,
)
from .serialize import lottery_to_json, q
from .shares import proportional_share, tps, tps_of

log = logging.getLogger(__name__)

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise InvariantViolation(msg)


# --- Phase 1 ----------------------------------------------------------------

@dataclass(frozen=True)
class ExtendedInstance:
    """The input plus one auxiliary item per agent; item ``m + i`` is agent i's."""
    base: Instance
    ps: tuple[Fraction, ...]
    tps: tuple[Fraction, ...]
    exceptional: tuple[frozenset[int], ...]
    u: Instance  # unit-demand values over the m + n items

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m

    def aux(self, i: int) -> int:
        return self.base.m + i


def build_phase1_instance(inst: Instance) -> ExtendedInstance:
    n, m = inst.n, inst.m
    ps = tuple(proportional_share(inst, i) for i in inst.agents)
    t = tuple(tps(inst, i) for i in inst.agents)
    exc = tuple(frozenset(j for j in inst.items if inst.values[i][j] >= t[i] and inst.values[i][j] > 0)
                for i in inst.agents)
    u = []
    for i in inst.agents:
        row = [inst.values[i][j] if j in exc[i] else _ZERO for j in inst.items]
        row += [t[i] if k == i else _ZERO for k in range(n)]
        u.append(row)
    return ExtendedInstance(inst, ps, t, exc, new_instance(u))


def _lp1_variables(ext: ExtendedInstance, items=None) -> list[tuple[int, int]]:
    out = []
    for i in range(ext.n):
        out += [(i, j) for j in sorted(ext.exceptional[i]) if items is None or j in items]
        out.append((i, ext.aux(i)))
    return out


def _solve_lp1_on(ext: ExtendedInstance, items=None) -> FractionalAllocation:
    """Lexicographic LP1: most welfare, then most real (non-auxiliary) mass.

    The second stage is what makes ties break toward real items.  The
    result is a vertex of the LP restricted to ``items``.
    """
    n, m = ext.n, ext.m
    var = _lp1_variables(ext, items)
    rows = []
    for j in sorted({j for _, j in var if j < m}):
        rows.append(([1 if vj == j else 0 for _, vj in var], LE, 1))
    for i in range(n):
        rows.append(([1 if vi == i else 0 for vi, _ in var], EQ, 1))
    for i in range(n):
        rows.append(([ext.u.values[i][j] if vi == i else 0 for vi, j in var], GE, ext.ps[i]))
    welfare = [ext.u.values[i][j] for i, j in var]

    first = solve_lp(LpProblem.build(welfare, rows))
    _check(first.status is Status.OPTIMAL, f"LP1 not solved: {first.status.value}")
    real = [1 if j < m else 0 for _, j in var]
    second = solve_lp(LpProblem.build(real, rows + [(welfare, EQ, first.objective_value)]))
    _check(second.status is Status.OPTIMAL, f"LP1 tie-break stage not solved: {second.status.value}")

    x = [[_ZERO] * (m + n) for _ in range(n)]
    for (i, j), val in zip(var, second.values):
        x[i][j] = val
    return FractionalAllocation(tuple(tuple(r) for r in x))


def solve_lp1(ext: ExtendedInstance) -> FractionalAllocation:
    return _solve_lp1_on(ext)


def _column_sums(x, m: int) -> list[Fraction]:
    return [sum((row[j] for row in x), _ZERO) for j in range(m)]


def _shift_toward_real(x, ext: ExtendedInstance) -> None:
    """Move auxiliary mass onto real items worth exactly TPS that are not full."""
    for i in range(ext.n):
        a = ext.aux(i)
        for j in sorted(ext.exceptional[i]):
            if x[i][a] == 0:
                break
            if ext.base.values[i][j] != ext.tps[i]:
                continue
            room = 1 - sum(row[j] for row in x)
            d = min(room, x[i][a])
            if d > 0:
                x[i][a] -= d
                x[i][j] += d


def _merge_partial(x, ext: ExtendedInstance) -> None:
    """No agent keeps fractions of two partly allocated items.

    Mass moves toward the item of higher u-value (lower index on ties)
    until that item fills up or the other share reaches zero.  Every step
    removes a positive entry or fills an item, so this terminates.
    """
    m, u = ext.m, ext.u.values
    while True:
        cols = _column_sums(x, m)
        pick = None
        for i in range(ext.n):
            held = [j for j in range(m) if x[i][j] > 0 and cols[j] < 1]
            if len(held) >= 2:
                held.sort(key=lambda j: (-u[i][j], j))
                pick = (i, held[0], held[1])
                break
        if pick is None:
            return
        i, to, frm = pick
        d = min(1 - cols[to], x[i][frm])
        x[i][to] += d
        x[i][frm] -= d


def shift_mass(fa: FractionalAllocation, ext: ExtendedInstance) -> FractionalAllocation:
    """Apply both tie-breaking shifts; LP1 objective and constraints are unchanged."""
    x = [list(r) for r in fa.x]
    _shift_toward_real(x, ext)
    _merge_partial(x, ext)
    return FractionalAllocation(tuple(tuple(r) for r in x))


def allocated_items(fa: FractionalAllocation, m: int) -> list[int]:
    return [j for j, s in enumerate(_column_sums(fa.x, m)) if s > 0]


def consolidate(fa: FractionalAllocation, ext: ExtendedInstance) -> FractionalAllocation:
    """Bring an optimal LP1 solution down to at most 2n - 1 real items.

    After the mass shifts, LP1 is re-solved on the surviving items to get
    back to a vertex (at most 4n - 1 positive entries), then shifted once
    more; the last shifts never create positive entries.
    """
    m = ext.m
    welfare = _welfare(fa, ext)
    out = shift_mass(fa, ext)
    out = shift_mass(_solve_lp1_on(ext, frozenset(allocated_items(out, m))), ext)
    _check(_welfare(out, ext) == welfare, "consolidation changed the LP1 objective")
    for i in range(ext.n):
        _check(sum(out.x[i], _ZERO) == 1, f"agent {i} no longer holds one unit")
        _check(_u_value(out, ext, i) >= ext.ps[i], f"agent {i} fell below PS in LP1")
    count = len(allocated_items(out, m))
    _check(count <= 2 * ext.n - 1, f"{count} items allocated after consolidation")
    return out


def _u_value(fa: FractionalAllocation, ext: ExtendedInstance, i: int) -> Fraction:
    return sum((q_ * v for q_, v in zip(fa.x[i], ext.u.values[i])), _ZERO)


def _welfare(fa: FractionalAllocation, ext: ExtendedInstance) -> Fraction:
    return sum((_u_value(fa, ext, i) for i in range(ext.n)), _ZERO)


@dataclass(frozen=True)
class Phase1Result:
    lottery: Lottery  # over allocations of the m + n extended items
    fractional: FractionalAllocation
    s: tuple[Fraction, ...]


def round_phase1(fa: FractionalAllocation, ext: ExtendedInstance) -> Phase1Result:
    lot, _ = faithful_implement(fa, ext.u)
    n = ext.n
    _check(len(lot) <= 4 * n, f"phase 1 support {len(lot)} exceeds 4n = {4 * n}")
    s = tuple(_u_value(fa, ext, i) for i in range(n))
    got = [_ZERO] * n
    for p, a in lot.support:
        for i, b in enumerate(a.bundles):
            _check(len(b) == 1, f"phase 1 gave agent {i} {len(b)} items")
            (j,) = b
            _check(j == ext.aux(i) or j in ext.exceptional[i], f"agent {i} matched to a non-exceptional item")
            got[i] += p * ext.u.values[i][j]
    _check(tuple(got) == s, "phase 1 lottery does not deliver s in expectation")
    return Phase1Result(lot, fa, s)


# --- Phase 2 ----------------------------------------------------------------

@dataclass
class MatchingState:
    n1: list[int]
    n2: list[int]
    e: list[int | None]  # matched real item per agent
    m2: list[int]
    m3: list[int] = field(default_factory=list)
    b: dict[int, tuple[int, ...]] = field(default_factory=dict)
    w: dict[int, Fraction] = field(default_factory=dict)
    f: dict[int, Fraction] = field(default_factory=dict)
    promoted: list[int] = field(default_factory=list)
    first_item_margin: Fraction | None = None  # min over agents of v(e_i) - max v over M3


def partition_and_promote(matching: Allocation, ext: ExtendedInstance) -> MatchingState:
    n, m = ext.n, ext.m
    e: list[int | None] = [None] * n
    for i, bundle in enumerate(matching.bundles):
        (j,) = bundle
        if j < m:
            e[i] = j
    taken = {j for j in e if j is not None}
    m2 = [j for j in range(m) if j not in taken]
    promoted = []
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if e[i] is not None:
                continue
            j = next((j for j in m2 if j in ext.exceptional[i]), None)
            if j is not None:
                e[i] = j
                m2.remove(j)
                promoted.append(i)
                changed = True
                break
    if promoted:
        log.info("promoted agents %s out of the auxiliary group", promoted)
    n1 = [i for i in range(n) if e[i] is not None]
    n2 = [i for i in range(n) if e[i] is None]
    return MatchingState(n1, n2, e, m2, promoted=promoted)


def complete_matching(state: MatchingState, inst: Instance, ext: ExtendedInstance) -> MatchingState:
    n2, m2, v = state.n2, state.m2, inst.values
    if not n2:
        state.m3 = list(m2)
        _first_item(state, inst)
        return state
    k = len(n2)
    for i in n2:
        # taking away matched agents and their items never lowers TPS
        t2 = tps_of([v[i][j] for j in m2], k)
        _check(t2 >= ext.tps[i], f"agent {i}: TPS dropped from {ext.tps[i]} to {t2} in the reduced instance")
        _check(not any(j in ext.exceptional[i] for j in m2), f"agent {i} still sees an exceptional item")

    total = {i: sum((v[i][j] for j in m2), _ZERO) for i in n2}
    for i in n2:
        b = tuple(sorted(m2, key=lambda j: (-v[i][j], j))[:k])
        state.b[i] = b
        state.w[i] = sum((v[i][j] for j in b), _ZERO)
        _check(total[i] == 0 or state.w[i] < total[i], f"agent {i}: top items hold all her value")

    cols = {j: c for c, j in enumerate(m2)}
    edges = []
    for r, i in enumerate(n2):
        denom = total[i] - state.w[i]
        for j in state.b[i]:
            edges.append((r, cols[j], v[i][j] / denom if total[i] > 0 else _ZERO))
    if len(m2) >= k:
        pairs = max_weight_matching(WeightedBipartiteGraph(k, len(m2), tuple(edges)))
    else:
        # only when every remaining agent values every remaining item at 0
        _check(all(total[i] == 0 for i in n2), "fewer items than agents left for non-degenerate agents")
        pairs = [(r, r) for r in range(len(m2))]
    for r, c in pairs:
        state.e[n2[r]] = m2[c]

    for i in n2:
        if total[i] == 0:
            state.f[i] = _ZERO
        else:
            state.f[i] = (total[i] / k - v[i][state.e[i]]) / (total[i] - state.w[i])
    _check(sum(state.f.values(), _ZERO) <= 1, f"sum of f = {sum(state.f.values(), _ZERO)} exceeds 1")

    matched = {j for j in state.e if j is not None}
    state.m3 = [j for j in range(inst.m) if j not in matched]
    _first_item(state, inst)
    return state


def _first_item(state: MatchingState, inst: Instance) -> None:
    v = inst.values
    margins = []
    for i in range(inst.n):
        top = max((v[i][j] for j in state.m3), default=_ZERO)
        mine = v[i][state.e[i]] if state.e[i] is not None else _ZERO
        _check(mine >= top, f"agent {i}: an unmatched item beats her matched item")
        margins.append(mine - top)
    state.first_item_margin = min(margins)


# --- Phase 3 ----------------------------------------------------------------

def solve_lp3(state: MatchingState, inst: Instance) -> FractionalAllocation:
    n, v = inst.n, inst.values
    m3 = state.m3
    x = [[_ZERO] * inst.m for _ in range(n)]
    if m3:
        var = [(i, j) for i in range(n) for j in m3]
        rows = [([1 if vj == j else 0 for _, vj in var], LE, 1) for j in m3]
        for i in state.n2:
            need = state.f[i] * sum((v[i][j] for j in m3), _ZERO)
            rows.append(([v[i][j] if vi == i else 0 for vi, j in var], GE, need))
        sol = solve_lp(LpProblem.build([v[i][j] for i, j in var], rows))
        _check(sol.status is Status.OPTIMAL, f"LP3 not solved: {sol.status.value}")
        for (i, j), val in zip(var, sol.values):
            x[i][j] = val
    return FractionalAllocation(tuple(tuple(r) for r in x))


def round_phase3(fa: FractionalAllocation, state: MatchingState, inst: Instance) -> Lottery:
    lot, _ = faithful_implement(fa, inst)
    _check(len(lot) <= inst.m + 1, f"phase 3 support {len(lot)} exceeds m + 1")
    v = inst.values
    m3_value = {i: sum((v[i][j] for j in state.m3), _ZERO) for i in state.n2}
    top = {i: max((v[i][j] for j in state.m3), default=_ZERO) for i in state.n2}
    out = []
    for p, a in lot.support:
        bundles = [set(b) for b in a.bundles]
        for i in state.n2:
            _check(fa.value(inst, i) >= state.f[i] * m3_value[i], f"agent {i} below f_i v_i(M3) in LP3")
            got = bundle_value(inst, i, bundles[i])
            _check(got >= fa.value(inst, i) - top[i], f"agent {i} lost more than one item in rounding")
        for i, j in enumerate(state.e):
            if j is not None:
                bundles[i].add(j)
        placed = set().union(*bundles)
        for j in inst.items:
            if j not in placed:
                best = max(inst.agents, key=lambda i: (v[i][j], -i))
                bundles[best].add(j)
        out.append((p, Allocation.of(bundles)))
    return Lottery.merged(out)


# --- Phase 4 ----------------------------------------------------------------

def reduce_to_n(assembled: Lottery, inst: Instance) -> Lottery:
    """Fewest-mass reweighting that keeps every agent at PS, then rescale.

    With the value variables substituted out, LP4 has one row per agent,
    so an optimal vertex has at most n positive weights.
    """
    allocs = assembled.allocations()
    a = [[bundle_value(inst, i, g.bundles[i]) for g in allocs] for i in inst.agents]
    rows = [(a[i], GE, proportional_share(inst, i)) for i in inst.agents]
    sol = solve_lp(LpProblem.build([1] * len(allocs), rows, maximize=False))
    _check(sol.status is Status.OPTIMAL, f"LP4 not solved: {sol.status.value}")
    z_star = sol.objective_value
    _check(z_star <= 1, f"LP4 optimum {z_star} exceeds 1")
    if z_star == 0:
        # every PS is 0; any single allocation will do
        return Lottery(((_ONE, allocs[0]),))
    return Lottery(tuple((z / z_star, g) for z, g in zip(sol.values, allocs) if z > 0))


# --- pipeline ---------------------------------------------------------------

@dataclass(frozen=True)
class AgentCertificate:
    ps: Fraction
    tps: Fraction
    ex_ante: Fraction
    min_ex_post: Fraction
    prop1: tuple[bool, ...]  # per support allocation

    @property
    def half_tps(self) -> Fraction:
        return self.tps / 2

    def to_json(self) -> dict:
        return {"ps": q(self.ps), "tps": q(self.tps), "half_tps": q(self.half_tps),
                "ex_ante": q(self.ex_ante), "min_ex_post": q(self.min_ex_post),
                "prop1": list(self.prop1)}


@dataclass(frozen=True)
class Diagnostics:
    phase1_support: int
    consolidated_items: int
    f_sums: tuple[Fraction, ...]
    phase3_supports: tuple[int, ...]
    assembled_support: int
    promotions: int
    first_item_margins: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"phase1_support": self.phase1_support,
                "consolidated_items": self.consolidated_items,
                "f_sums": [q(f) for f in self.f_sums],
                "phase3_supports": list(self.phase3_supports),
                "assembled_support": self.assembled_support,
                "promotions": self.promotions,
                "first_item_margins": [q(x) for x in self.first_item_margins]}


@dataclass(frozen=True)
class BobwResult:
    lottery: Lottery
    certificates: tuple[AgentCertificate, ...]
    audits: tuple[AuditReport, ...]
    diagnostics: Diagnostics

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.audits)


def certify(lot: Lottery, inst: Instance) -> tuple[tuple[AgentCertificate, ...], tuple[AuditReport, ...]]:
    certs = []
    for i in inst.agents:
        vals = [bundle_value(inst, i, a.bundles[i]) for a in lot.allocations()]
        certs.append(AgentCertificate(
            proportional_share(inst, i), tps(inst, i), expected_value(lot, inst, i), min(vals),
            tuple(prop1_margin(a, inst, i) >= 0 for a in lot.allocations())))
    return tuple(certs), tuple(audit_lottery(lot, inst, support_bound=inst.n))


def bobw_allocate(inst: Instance) -> BobwResult:
    ext = build_phase1_instance(inst)
    a_star = consolidate(solve_lp1(ext), ext)
    phase1 = round_phase1(a_star, ext)

    weighted: list[tuple[Fraction, Allocation]] = []
    f_sums, p3_sizes, margins, promotions = [], [], [], 0
    for p, matching in phase1.lottery.support:
        state = partition_and_promote(matching, ext)
        promotions += len(state.promoted)
        state = complete_matching(state, inst, ext)
        f_sums.append(sum(state.f.values(), _ZERO))
        margins.append(state.first_item_margin)
        c_star = solve_lp3(state, inst)
        completions = round_phase3(c_star, state, inst)
        p3_sizes.append(len(completions))
        weighted += [(p * r, g) for r, g in completions.support]
    assembled = Lottery.merged(weighted)
    final = reduce_to_n(assembled, inst)

    certs, audits = certify(final, inst)
    failed = [r for r in audits if not r.passed]
    if failed:
        raise InvariantViolation(f"result failed audit: {failed[0].name} at {failed[0].witness}")
    diag = Diagnostics(len(phase1.lottery), len(allocated_items(a_star, inst.m)), tuple(f_sums),
                       tuple(p3_sizes), len(assembled), promotions, tuple(margins))
    return BobwResult(final, certs, audits, diag)


def result_to_json(res: BobwResult) -> dict:
    return {
        **lottery_to_json(res.lottery),
        "certificate": {"agents": [c.to_json() for c in res.certificates],
                        "audits": [r.to_json() for r in res.audits],
                        "diagnostics": res.diagnostics.to_json()},
    }
