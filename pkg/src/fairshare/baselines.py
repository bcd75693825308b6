"""Reference mechanisms: uniform Prop1 lottery and envy-cycle elimination."""
from __future__ import annotations

from fractions import Fraction

from .audit import HalfFairReport, check_ef1, check_half_fair
from .errors import InvariantViolation
from .faithful import faithful_implement
from .model import Allocation, FractionalAllocation, Instance, Lottery, bundle_value
from .shares import tps

__all__ = ["HalfFairReport", "uniform_prop1", "envy_cycle_elimination", "envy_graph", "find_cycle"]


def uniform_prop1(inst: Instance) -> Lottery:
    """Faithful rounding of the allocation that gives everyone 1/n of every item."""
    share = Fraction(1, inst.n)
    fa = FractionalAllocation(tuple(tuple(share for _ in inst.items) for _ in inst.agents))
    lot, _ = faithful_implement(fa, inst)
    return lot


def envy_graph(bundles, inst: Instance) -> list[list[int]]:
    """``out[i]`` lists the agents whose bundle i strictly prefers to her own."""
    out = []
    for i in inst.agents:
        own = bundle_value(inst, i, bundles[i])
        out.append([k for k in inst.agents if k != i and bundle_value(inst, i, bundles[k]) > own])
    return out


def find_cycle(graph: list[list[int]]) -> list[int] | None:
    """Some directed cycle, searching from the lowest-index vertex first."""
    state = [0] * len(graph)  # 0 new, 1 on stack, 2 done
    stack: list[int] = []

    def dfs(u: int) -> list[int] | None:
        state[u] = 1
        stack.append(u)
        for w in graph[u]:
            if state[w] == 1:
                return stack[stack.index(w):]
            if state[w] == 0:
                found = dfs(w)
                if found:
                    return found
        stack.pop()
        state[u] = 2
        return None

    for s in range(len(graph)):
        if state[s] == 0:
            found = dfs(s)
            if found:
                return found
    return None


def envy_cycle_elimination(inst: Instance) -> Allocation:
    """EF1 and half-fair allocation by envy-cycle elimination.

    A first round lets agents 0..n-1 take their favourite remaining item in
    turn.  Every later item is worth no more to anyone than her first pick,
    which is what makes the result half-fair and not just EF1.  The rest
    go in descending order of their highest value to any agent, each to the
    lowest-index agent nobody envies; envy cycles are rotated away.
    """
    v = inst.values
    bundles: list[set[int]] = [set() for _ in inst.agents]
    left = set(inst.items)
    for i in inst.agents:
        if not left:
            break
        pick = min(left, key=lambda j: (-v[i][j], j))
        bundles[i].add(pick)
        left.discard(pick)
    _check_acyclic(bundles, inst)

    order = sorted(left, key=lambda j: (-max(v[i][j] for i in inst.agents), j))
    for g in order:
        graph = envy_graph(bundles, inst)
        envied = {k for out in graph for k in out}
        target = next(i for i in inst.agents if i not in envied)
        bundles[target].add(g)
        while True:
            cycle = find_cycle(envy_graph(bundles, inst))
            if cycle is None:
                break
            # each agent on the cycle takes the bundle she envies
            moved = [bundles[cycle[(k + 1) % len(cycle)]] for k in range(len(cycle))]
            for agent, b in zip(cycle, moved):
                bundles[agent] = b
        _check_acyclic(bundles, inst)

    alloc = Allocation.of(bundles)
    _certify(alloc, inst)
    return alloc


def _check_acyclic(bundles, inst: Instance) -> None:
    if find_cycle(envy_graph(bundles, inst)) is not None:
        raise InvariantViolation("envy graph still has a cycle")


def _certify(alloc: Allocation, inst: Instance) -> None:
    if alloc.allocated() != frozenset(inst.items):
        raise InvariantViolation("envy-cycle elimination left items unallocated")
    ef1 = check_ef1(alloc, inst)
    if not ef1.passed:
        raise InvariantViolation(f"allocation is not EF1: {ef1.witness}")
    if not check_half_fair(alloc, inst).passed:
        raise InvariantViolation("allocation is not half-fair")
    ratio = Fraction(inst.n, 2 * inst.n - 1)
    for i in inst.agents:
        if bundle_value(inst, i, alloc.bundles[i]) < ratio * tps(inst, i):
            raise InvariantViolation(f"agent {i} below n/(2n-1) of her TPS")


def half_fair_report(inst: Instance) -> HalfFairReport:
    return check_half_fair(envy_cycle_elimination(inst), inst)
