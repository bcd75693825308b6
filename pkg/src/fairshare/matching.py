"""Bipartite matching primitives over exact rationals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InvalidParameter, InvariantViolation, MatchingNotFound, NoSaturatingMatching
from .model import as_fraction

_ZERO = Fraction(0)


@dataclass(frozen=True)
class WeightedBipartiteGraph:
    left: int
    right: int
    edges: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        for l, r, w in self.edges:
            if not (0 <= l < self.left and 0 <= r < self.right):
                raise InvalidParameter(f"edge ({l}, {r}) out of range")
            if w < 0:
                raise InvalidParameter(f"edge ({l}, {r}) has negative weight")

    @classmethod
    def from_matrix(cls, weights) -> "WeightedBipartiteGraph":
        """Complete graph from a dense matrix; ``None`` marks a missing edge."""
        rows = [list(r) for r in weights]
        right = len(rows[0]) if rows else 0
        edges = tuple((l, r, as_fraction(w)) for l, row in enumerate(rows)
                      for r, w in enumerate(row) if w is not None)
        return cls(len(rows), right, edges)


@dataclass(frozen=True)
class FractionalMatching:
    left: int
    right: int
    entries: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        rows = [_ZERO] * self.left
        cols = [_ZERO] * self.right
        for l, r, q in self.entries:
            if not (0 <= l < self.left and 0 <= r < self.right):
                raise InvalidParameter(f"entry ({l}, {r}) out of range")
            if not 0 < q <= 1:
                raise InvalidParameter(f"fraction {q} at ({l}, {r}) outside (0, 1]")
            rows[l] += q
            cols[r] += q
        if any(s > 1 for s in rows) or any(s > 1 for s in cols):
            raise InvalidParameter("row or column sum exceeds 1")

    @classmethod
    def from_matrix(cls, matrix) -> "FractionalMatching":
        rows = [[as_fraction(v) for v in r] for r in matrix]
        right = len(rows[0]) if rows else 0
        return cls(len(rows), right, tuple((l, r, q) for l, row in enumerate(rows)
                                           for r, q in enumerate(row) if q))


def matching_weight(g: WeightedBipartiteGraph, pairs: Iterable[tuple[int, int]]) -> Fraction:
    w = _edge_map(g)
    return sum((w[p] for p in pairs), _ZERO)


def _edge_map(g: WeightedBipartiteGraph) -> dict[tuple[int, int], Fraction]:
    w: dict[tuple[int, int], Fraction] = {}
    for l, r, x in g.edges:
        if (l, r) not in w or x > w[(l, r)]:
            w[(l, r)] = x
    return w


def max_weight_matching(g: WeightedBipartiteGraph) -> list[tuple[int, int]]:
    """Maximum-weight matching among those saturating every left vertex.

    Hungarian algorithm with potentials (rectangular form, left <= right)
    on costs ``-w``; missing edges get a finite penalty large enough that no
    optimal assignment uses one unless Hall's condition fails.
    """
    n, m = g.left, g.right
    if n == 0:
        return []
    if n > m:
        raise NoSaturatingMatching(f"{n} left vertices but only {m} right vertices")
    w = _edge_map(g)
    big = 2 * sum(w.values(), _ZERO) + 1
    cost = [[-w[(i, j)] if (i, j) in w else big for j in range(m)] for i in range(n)]

    # 1-indexed potentials; p[j] = left vertex matched to column j
    u = [_ZERO] * (n + 1)
    v = [_ZERO] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [math.inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = math.inf
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, m + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    pairs = sorted((p[j] - 1, j - 1) for j in range(1, m + 1) if p[j])
    if any(pr not in w for pr in pairs):
        raise NoSaturatingMatching("no matching saturates every left vertex")
    return pairs


# --- perfect matchings and Birkhoff-von Neumann -----------------------------

def _kuhn(adj: list[list[int]], rows: Iterable[int], ncols: int) -> dict[int, int] | None:
    """Match every row in ``rows`` along ``adj`` (lowest index first), or None."""
    match_col: list[int | None] = [None] * ncols

    def augment(r: int, seen: list[bool]) -> bool:
        for c in adj[r]:
            if not seen[c]:
                seen[c] = True
                if match_col[c] is None or augment(match_col[c], seen):
                    match_col[c] = r
                    return True
        return False

    for r in rows:
        if not augment(r, [False] * ncols):
            return None
    return {r: c for c, r in enumerate(match_col) if r is not None}


def perfect_matching_on_support(fm: FractionalMatching) -> list[tuple[int, int]]:
    """A matching on positive entries saturating every row of maximum row sum.

    For a (scaled) doubly stochastic input that is every row, i.e. a perfect
    matching, whose existence is the Birkhoff-von Neumann theorem.
    """
    if not fm.entries:
        raise InvalidParameter("empty fractional matching")
    sums = [_ZERO] * fm.left
    adj: list[list[int]] = [[] for _ in range(fm.left)]
    for l, r, q in fm.entries:
        sums[l] += q
        adj[l].append(r)
    for a in adj:
        a.sort()
    top = max(sums)
    rows = [l for l in range(fm.left) if sums[l] == top]
    found = _kuhn(adj, rows, fm.right)
    if found is None:
        raise MatchingNotFound("support has no matching saturating the maximum-sum rows")
    return sorted(found.items())


def bvn_decompose(fm: FractionalMatching) -> list[tuple[Fraction, tuple[tuple[int, int], ...]]]:
    """Decompose a sub-stochastic fractional matching into weighted matchings.

    The L x R input is completed to the doubly stochastic (L+R) x (R+L)
    matrix [[X, diag(1 - row sums)], [diag(1 - col sums), X^T]]; peeling
    perfect matchings off it and dropping dummy edges gives matchings whose
    weighted sum is X exactly and whose weights sum to 1.
    """
    L, R = fm.left, fm.right
    size = L + R
    M: list[dict[int, Fraction]] = [dict() for _ in range(size)]
    rows = [_ZERO] * L
    cols = [_ZERO] * R
    for l, r, q in fm.entries:
        M[l][r] = M[l].get(r, _ZERO) + q
        M[L + r][R + l] = M[L + r].get(R + l, _ZERO) + q
        rows[l] += q
        cols[r] += q
    for l in range(L):
        if rows[l] < 1:
            M[l][R + l] = 1 - rows[l]
    for r in range(R):
        if cols[r] < 1:
            M[L + r][r] = 1 - cols[r]

    terms: list[tuple[Fraction, tuple[tuple[int, int], ...]]] = []
    index: dict[tuple[tuple[int, int], ...], int] = {}
    remaining = Fraction(1)
    while remaining > 0:
        adj = [sorted(row) for row in M]
        found = _kuhn(adj, range(size), size)
        if found is None:
            raise InvariantViolation("completed matrix lost its perfect matching")
        coef = min(M[r][c] for r, c in found.items())
        for r, c in found.items():
            left = M[r][c] - coef
            if left:
                M[r][c] = left
            else:
                del M[r][c]
        remaining -= coef
        real = tuple(sorted((r, c) for r, c in found.items() if r < L and c < R))
        if real in index:
            k = index[real]
            terms[k] = (terms[k][0] + coef, real)
        else:
            index[real] = len(terms)
            terms.append((coef, real))

    if any(M[r] for r in range(size)):
        raise InvariantViolation("peeling left residual mass")
    _check_reconstruction(fm, terms)
    return terms


def _check_reconstruction(fm: FractionalMatching, terms) -> None:
    acc: dict[tuple[int, int], Fraction] = {}
    for coef, pairs in terms:
        for pr in pairs:
            acc[pr] = acc.get(pr, _ZERO) + coef
    want: dict[tuple[int, int], Fraction] = {}
    for l, r, q in fm.entries:
        want[(l, r)] = want.get((l, r), _ZERO) + q
    if acc != want or sum((c for c, _ in terms), _ZERO) != 1:
        raise InvariantViolation("Birkhoff-von Neumann reconstruction mismatch")
