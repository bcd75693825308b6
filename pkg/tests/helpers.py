"""Independent oracles and hypothesis strategies shared by the tests."""
import itertools
import os
from fractions import Fraction

from hypothesis import strategies as st

from fairshare.lp import EQ, GE, LE, Constraint, LpProblem, Status
from fairshare.model import FractionalAllocation, new_instance

DATA = os.path.join(os.path.dirname(__file__), "data")


# --- independent oracles ------------------------------------------------------

def brute_mms(values, n):
    """Max over all n**m assignments of the smallest bundle sum."""
    best = Fraction(0)
    for assign in itertools.product(range(n), repeat=len(values)):
        sums = [Fraction(0)] * n
        for j, b in enumerate(assign):
            sums[b] += values[j]
        best = max(best, min(sums))
    return best


def brute_tps(values, n):
    """Largest t solving sum(min(v, t)) == n * t, trying every subset as the untruncated part.

    If U is the set of items worth less than t, then t = v(U) / (n - (m - |U|)),
    so scanning all subsets finds every solution; t = 0 always qualifies.
    """
    m = len(values)
    best = Fraction(0)
    for size in range(m + 1):
        truncated = m - size
        if truncated >= n:
            continue
        for kept in itertools.combinations(range(m), size):
            t = Fraction(sum((values[j] for j in kept), Fraction(0)), n - truncated)
            if sum((min(v, t) for v in values), Fraction(0)) == n * t and t > best:
                best = t
    return best


# --- strategies ---------------------------------------------------------------

small_values = st.integers(min_value=0, max_value=20)


@st.composite
def instances(draw, n_min=1, n_max=4, m_min=0, m_max=8, rational=False):
    n = draw(st.integers(n_min, n_max))
    m = draw(st.integers(m_min, m_max))
    if rational:
        cell = st.builds(Fraction, st.integers(0, 30), st.integers(1, 6))
    else:
        cell = small_values
    return new_instance([[draw(cell) for _ in range(m)] for _ in range(n)])


@st.composite
def fractional_allocations(draw, n_max=4, m_max=6, den_max=12):
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(1, m_max))
    x = [[Fraction(0)] * m for _ in range(n)]
    for j in range(m):
        d = draw(st.integers(1, den_max))
        left = d
        for i in range(n):
            k = draw(st.integers(0, left))
            x[i][j] = Fraction(k, d)
            left -= k
    return FractionalAllocation.of(x)


# --- LP oracle ----------------------------------------------------------------

def solve_square(rows, rhs):
    """Exact Gauss-Jordan on a square system; None if singular."""
    k = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for c in range(k):
        piv = next((r for r in range(c, k) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        for r in range(k):
            if r != c and a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[r][k] / a[r][r] for r in range(k)]


def rank(rows):
    a = [list(map(Fraction, r)) for r in rows]
    rk, cols = 0, len(a[0]) if a else 0
    for c in range(cols):
        piv = next((r for r in range(rk, len(a)) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        for r in range(len(a)):
            if r != rk and a[r][c] != 0:
                f = a[r][c] / a[rk][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rk])]
        rk += 1
    return rk


def hyperplanes(problem):
    """Every constraint and every non-negativity bound as (row, rhs)."""
    nv = problem.num_vars
    planes = [(list(c.coeffs), c.rhs) for c in problem.constraints]
    planes += [([Fraction(int(k == j)) for k in range(nv)], Fraction(0)) for j in range(nv)]
    return planes


def enumerate_vertices(problem):
    """All vertices of {x >= 0 : constraints}, by trying every n-subset of hyperplanes."""
    nv = problem.num_vars
    found = set()
    for subset in itertools.combinations(hyperplanes(problem), nv):
        x = solve_square([r for r, _ in subset], [b for _, b in subset])
        if x is not None and problem.feasible(x):
            found.add(tuple(x))
    return found


def is_vertex(problem, x):
    active = [r for r, b in hyperplanes(problem)
              if sum((a * v for a, v in zip(r, x)), Fraction(0)) == b]
    return rank(active) == problem.num_vars if active else problem.num_vars == 0


def random_lp(rng, max_vars=5, max_rows=5, box=None):
    nv = rng.randint(1, max_vars)
    rows = []
    for _ in range(rng.randint(1, max_rows)):
        rel = rng.choice([LE, LE, GE, EQ])
        rows.append(([rng.randint(-10, 10) for _ in range(nv)], rel, rng.randint(-10, 10)))
    if box is not None:
        rows += [([int(k == j) for k in range(nv)], LE, box) for j in range(nv)]
    obj = [rng.randint(-10, 10) for _ in range(nv)]
    return LpProblem.build(obj, rows, maximize=rng.random() < 0.5)


def lp_oracle(problem):
    """(status, objective) from vertex enumeration, with unboundedness decided by two boxes."""
    verts = enumerate_vertices(problem)
    if not verts:
        return Status.INFEASIBLE, None
    pick = max if problem.maximize else min
    nv = problem.num_vars
    boxed = []
    for b in (10**9, 10**10):
        box = tuple(Constraint(tuple(Fraction(int(k == j)) for k in range(nv)), LE, Fraction(b)) for j in range(nv))
        p = LpProblem(problem.objective, problem.constraints + box, problem.maximize)
        boxed.append(pick(p.value(v) for v in enumerate_vertices(p)))
    if boxed[0] != boxed[1]:
        return Status.UNBOUNDED, None
    return Status.OPTIMAL, pick(problem.value(v) for v in verts)
