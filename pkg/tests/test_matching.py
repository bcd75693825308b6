import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairshare.errors import InvalidParameter, MatchingNotFound, NoSaturatingMatching
from fairshare.matching import (
    FractionalMatching,
    WeightedBipartiteGraph,
    bvn_decompose,
    matching_weight,
    max_weight_matching,
    perfect_matching_on_support,
)

F = Fraction


def best_injection(weights):
    """Max total weight over left-saturating matchings; None entries are missing edges."""
    left, right = len(weights), len(weights[0])
    best = None
    for cols in itertools.permutations(range(right), left):
        if any(weights[l][c] is None for l, c in enumerate(cols)):
            continue
        w = sum((weights[l][c] for l, c in enumerate(cols)), F(0))
        best = w if best is None or w > best else best
    return best


def test_diagonal():
    g = WeightedBipartiteGraph.from_matrix([[1, 0], [0, 1]])
    pairs = max_weight_matching(g)
    assert pairs == [(0, 0), (1, 1)] and matching_weight(g, pairs) == 2


def test_symmetric_weights():
    g = WeightedBipartiteGraph.from_matrix([[1, 1], [1, 1]])
    pairs = max_weight_matching(g)
    assert sorted(l for l, _ in pairs) == [0, 1] and matching_weight(g, pairs) == 2


def test_missing_edges_respected():
    g = WeightedBipartiteGraph.from_matrix([[5, None, None], [9, 1, None]])
    assert max_weight_matching(g) == [(0, 0), (1, 1)]


def test_hall_violation():
    g = WeightedBipartiteGraph.from_matrix([[1, None], [2, None]])
    with pytest.raises(NoSaturatingMatching):
        max_weight_matching(g)
    with pytest.raises(NoSaturatingMatching):
        max_weight_matching(WeightedBipartiteGraph.from_matrix([[1], [1]]))


def test_negative_weight_rejected():
    with pytest.raises(InvalidParameter):
        WeightedBipartiteGraph(1, 1, ((0, 0, F(-1)),))


@given(st.randoms(use_true_random=False))
def test_max_weight_equals_brute_force(rng):
    left = rng.randint(1, 4)
    right = rng.randint(left, 5)
    weights = [[None if rng.random() < 0.2 else F(rng.randint(0, 12), rng.randint(1, 4))
                for _ in range(right)] for _ in range(left)]
    best = best_injection(weights)
    g = WeightedBipartiteGraph.from_matrix(weights)
    if best is None:
        with pytest.raises(NoSaturatingMatching):
            max_weight_matching(g)
        return
    pairs = max_weight_matching(g)
    assert len({l for l, _ in pairs}) == left and len({r for _, r in pairs}) == left
    assert matching_weight(g, pairs) == best


def test_perfect_matching_examples():
    assert perfect_matching_on_support(FractionalMatching.from_matrix([[1, 0], [0, 1]])) == [(0, 0), (1, 1)]
    pairs = perfect_matching_on_support(FractionalMatching.from_matrix([["1/2", "1/2"], ["1/2", "1/2"]]))
    assert pairs in ([(0, 0), (1, 1)], [(0, 1), (1, 0)])


def test_perfect_matching_missing():
    fm = FractionalMatching.from_matrix([["1/2", 0], ["1/2", 0]])
    with pytest.raises(MatchingNotFound):
        perfect_matching_on_support(fm)
    with pytest.raises(InvalidParameter):
        perfect_matching_on_support(FractionalMatching(2, 2, ()))


def random_doubly_stochastic(rng, size, terms):
    """Convex combination of random permutation matrices."""
    weights = [rng.randint(1, 6) for _ in range(terms)]
    total = sum(weights)
    x = [[F(0)] * size for _ in range(size)]
    for w in weights:
        perm = list(range(size))
        rng.shuffle(perm)
        for r, c in enumerate(perm):
            x[r][c] += F(w, total)
    return x


def test_birkhoff_support_always_has_perfect_matching():
    rng = random.Random(4)
    for _ in range(100):
        x = random_doubly_stochastic(rng, 4, rng.randint(1, 5))
        support = {(r, c) for r in range(4) for c in range(4) if x[r][c]}
        # exhaustive search agrees that some permutation lives on the support
        assert any(all((r, p[r]) in support for r in range(4)) for p in itertools.permutations(range(4)))
        pairs = perfect_matching_on_support(FractionalMatching.from_matrix(x))
        assert len(pairs) == 4 and all(p in support for p in pairs)


def test_bvn_half_half():
    terms = bvn_decompose(FractionalMatching.from_matrix([["1/2", "1/2"], ["1/2", "1/2"]]))
    assert sorted(terms) == [(F(1, 2), ((0, 0), (1, 1))), (F(1, 2), ((0, 1), (1, 0)))]


def test_bvn_two_thirds():
    terms = bvn_decompose(FractionalMatching.from_matrix([["2/3", "1/3"], ["1/3", "2/3"]]))
    assert dict((m, c) for c, m in terms) == {((0, 0), (1, 1)): F(2, 3), ((0, 1), (1, 0)): F(1, 3)}


def test_bvn_permutation_is_itself():
    assert bvn_decompose(FractionalMatching.from_matrix([[0, 1], [1, 0]])) == [(F(1), ((0, 1), (1, 0)))]


def test_bvn_sub_stochastic_uses_empty_matching():
    terms = bvn_decompose(FractionalMatching.from_matrix([["1/3"]]))
    assert sorted(terms) == [(F(1, 3), ((0, 0),)), (F(2, 3), ())]


@given(st.randoms(use_true_random=False))
def test_bvn_reconstructs_exactly(rng):
    left, right = rng.randint(1, 4), rng.randint(1, 5)
    x = [[F(0)] * right for _ in range(left)]
    for c in range(right):
        d = rng.randint(1, 8)
        room = d
        for r in range(left):
            k = rng.randint(0, room)
            x[r][c] = F(k, d)
            room -= k
    for r in range(left):  # squeeze rows back under 1
        s = sum(x[r])
        if s > 1:
            x[r] = [v / s for v in x[r]]
    fm = FractionalMatching.from_matrix(x)
    terms = bvn_decompose(fm)
    assert sum(c for c, _ in terms) == 1 and all(c > 0 for c, _ in terms)
    acc = [[F(0)] * right for _ in range(left)]
    for c, pairs in terms:
        assert len({l for l, _ in pairs}) == len(pairs) == len({r for _, r in pairs})
        for l, r in pairs:
            acc[l][r] += c
    assert acc == x
    positives = sum(1 for row in x for v in row if v) + left + right
    assert len(terms) <= positives + left + right
