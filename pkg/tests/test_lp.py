import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairshare.errors import HintInfeasible, InvalidParameter, LpUnbounded
from fairshare.lp import EQ, GE, LE, LpProblem, Status, basic_feasible_point, solve_lp

from helpers import enumerate_vertices, is_vertex, lp_oracle, random_lp

F = Fraction


def test_one_variable():
    sol = solve_lp(LpProblem.build([1], [([1], LE, 1)]))
    assert sol.status is Status.OPTIMAL and sol.values == (1,)


def test_contradiction_is_infeasible():
    sol = solve_lp(LpProblem.build([1], [([1], GE, 2), ([1], LE, 1)]))
    assert sol.status is Status.INFEASIBLE


def test_unbounded():
    assert solve_lp(LpProblem.build([1, 1], [([1, -1], LE, 1)])).status is Status.UNBOUNDED


def test_two_variable_vertex():
    p = LpProblem.build([1, 1], [([3, 2], LE, 6), ([1, 3], LE, 6)])
    sol = solve_lp(p)
    assert sol.values == (F(6, 7), F(12, 7)) and sol.objective_value == F(18, 7)


def test_minimize_with_equalities_and_redundancy():
    rows = [([1, 1, 1], EQ, 3), ([2, 2, 2], EQ, 6), ([1, 0, 0], GE, 1)]
    sol = solve_lp(LpProblem.build([1, 2, 3], rows, maximize=False))
    assert sol.status is Status.OPTIMAL and sol.values == (3, 0, 0)


def test_row_length_checked():
    with pytest.raises(InvalidParameter):
        LpProblem.build([1, 2], [([1], LE, 1)])


def test_deterministic():
    rng = random.Random(5)
    p = random_lp(rng)
    assert solve_lp(p) == solve_lp(p)


@given(st.randoms(use_true_random=False))
def test_matches_vertex_enumeration(rng):
    p = random_lp(rng)
    status, best = lp_oracle(p)
    sol = solve_lp(p)
    assert sol.status is status
    if status is Status.OPTIMAL:
        assert sol.objective_value == best
        assert p.feasible(sol.values)
        assert is_vertex(p, sol.values)
        assert len(sol.support()) <= len(p.constraints)


def test_degenerate_cycling_example():
    # Beale's classic cycling instance; Bland's rule must terminate
    obj = [F(3, 4), -150, F(1, 50), -6]
    rows = [
        ([F(1, 4), -60, F(-1, 25), 9], LE, 0),
        ([F(1, 2), -90, F(-1, 50), 3], LE, 0),
        ([0, 0, 1, 0], LE, 1),
    ]
    sol = solve_lp(LpProblem.build(obj, rows))
    assert sol.status is Status.OPTIMAL and sol.objective_value == F(1, 20)


def test_basic_feasible_point_from_interior():
    p = LpProblem.build([1, 1], [([3, 2], LE, 6), ([1, 3], LE, 6)])
    sol = basic_feasible_point(p, [F(1, 2), F(1, 2)])
    assert sol.status is Status.FEASIBLE
    assert is_vertex(p, sol.values)
    assert p.value(sol.values) >= 1
    assert sol.values in enumerate_vertices(p)


def test_basic_feasible_point_keeps_vertex():
    p = LpProblem.build([0, 0], [([1, 1], LE, 1)])
    assert basic_feasible_point(p, [1, 0]).values == (1, 0)


def test_basic_feasible_point_rejects_bad_hint():
    p = LpProblem.build([0], [([1], LE, 1)])
    with pytest.raises(HintInfeasible):
        basic_feasible_point(p, [2])
    with pytest.raises(HintInfeasible):
        basic_feasible_point(p, [-1])


def test_basic_feasible_point_unbounded_direction():
    p = LpProblem.build([1, 0], [([1, -1], EQ, 0)])
    with pytest.raises(LpUnbounded):
        basic_feasible_point(p, [1, 1])


@given(st.randoms(use_true_random=False))
def test_basic_feasible_point_properties(rng):
    p = random_lp(rng, box=8)
    verts = sorted(enumerate_vertices(p))
    if not verts:
        return
    # a strict convex combination of vertices is a generic feasible hint
    weights = [F(rng.randint(1, 5)) for _ in verts]
    total = sum(weights)
    hint = [sum(w * v[k] for w, v in zip(weights, verts)) / total for k in range(p.num_vars)]
    sol = basic_feasible_point(p, hint)
    better = (lambda a, b: a >= b) if p.maximize else (lambda a, b: a <= b)
    assert sol.values in set(verts)
    assert better(p.value(sol.values), p.value(hint))
    assert set(sol.support()) <= {k for k, v in enumerate(hint) if v}
