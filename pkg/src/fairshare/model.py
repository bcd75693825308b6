"""Domain types and instance generators.

Every quantity is a :class:`fractions.Fraction`; nothing in a value path ever
touches a float.  Agents and items are 0-indexed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    EmptyAgents,
    IndexOutOfRange,
    InvalidInstance,
    InvalidParameter,
    NegativeValue,
)

Rational = Fraction


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: they would silently smuggle rounding into the model.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not valuations")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


@dataclass(frozen=True)
class Instance:
    values: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0]) if self.values else 0

    @property
    def agents(self) -> range:
        return range(self.n)

    @property
    def items(self) -> range:
        return range(self.m)

    def value(self, agent: int, item: int) -> Fraction:
        return self.values[agent][item]

    def total(self, agent: int) -> Fraction:
        return sum(self.values[agent], Fraction(0))


def new_instance(values: Sequence[Sequence]) -> Instance:
    rows = [list(r) for r in values]
    if not rows:
        raise EmptyAgents()
    m = len(rows[0])
    out = []
    for i, row in enumerate(rows):
        if len(row) != m:
            raise InvalidInstance(f"row {i} has {len(row)} entries, expected {m}")
        converted = []
        for j, v in enumerate(row):
            q = as_fraction(v)
            if q < 0:
                raise NegativeValue(i, j)
            converted.append(q)
        out.append(tuple(converted))
    return Instance(tuple(out))


def bundle_value(inst: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    if not 0 <= agent < inst.n:
        raise IndexOutOfRange(f"agent {agent} not in 0..{inst.n - 1}")
    row = inst.values[agent]
    total = Fraction(0)
    for j in bundle:
        if not 0 <= j < inst.m:
            raise IndexOutOfRange(f"item {j} not in 0..{inst.m - 1}")
        total += row[j]
    return total


@dataclass(frozen=True)
class Allocation:
    bundles: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.bundles:
            if seen & b:
                raise InvalidInstance("bundles overlap")
            seen |= b
        if any(j < 0 for j in seen):
            raise InvalidInstance("negative item index")

    @classmethod
    def of(cls, bundles: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def allocated(self) -> frozenset[int]:
        return frozenset().union(*self.bundles) if self.bundles else frozenset()

    def owner(self, item: int) -> int | None:
        for i, b in enumerate(self.bundles):
            if item in b:
                return i
        return None

    def key(self) -> tuple[tuple[int, ...], ...]:
        """Canonical hashable form used to merge duplicates in lotteries."""
        return tuple(tuple(sorted(b)) for b in self.bundles)


def check_allocation_fits(alloc: Allocation, n: int, m: int) -> None:
    if alloc.n != n:
        raise InvalidInstance(f"allocation has {alloc.n} bundles, expected {n}")
    if any(j >= m for b in alloc.bundles for j in b):
        raise InvalidInstance(f"allocation uses an item outside 0..{m - 1}")


@dataclass(frozen=True)
class FractionalAllocation:
    x: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.x:
            raise EmptyAgents()
        m = len(self.x[0])
        for i, row in enumerate(self.x):
            if len(row) != m:
                raise InvalidInstance(f"row {i} has wrong length")
            for j, q in enumerate(row):
                if not 0 <= q <= 1:
                    raise InvalidInstance(f"x[{i}][{j}] = {q} outside [0, 1]")
        for j in range(m):
            if sum(row[j] for row in self.x) > 1:
                raise InvalidInstance(f"item {j} allocated more than once")

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> "FractionalAllocation":
        return cls(tuple(tuple(as_fraction(q) for q in r) for r in rows))

    @classmethod
    def zeros(cls, n: int, m: int) -> "FractionalAllocation":
        return cls(tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def m(self) -> int:
        return len(self.x[0])

    def value(self, inst: Instance, agent: int) -> Fraction:
        return sum((q * v for q, v in zip(self.x[agent], inst.values[agent])), Fraction(0))

    def strictly_fractional(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.x) for j, q in enumerate(row) if 0 < q < 1]


@dataclass(frozen=True)
class Lottery:
    support: tuple[tuple[Fraction, Allocation], ...]

    def __post_init__(self):
        if not self.support:
            raise InvalidInstance("a lottery needs a non-empty support")
        if any(p <= 0 for p, _ in self.support):
            raise InvalidInstance("lottery probabilities must be positive")
        if sum(p for p, _ in self.support) != 1:
            raise InvalidInstance("lottery probabilities must sum to exactly 1")
        n = self.support[0][1].n
        if any(a.n != n for _, a in self.support):
            raise InvalidInstance("allocations in a lottery disagree on the agent count")

    @classmethod
    def merged(cls, weighted: Iterable[tuple[Fraction, Allocation]]) -> "Lottery":
        """Build a lottery, summing the probability of identical allocations.

        First-seen order is kept so the result is deterministic.
        """
        acc: dict = {}
        order: list = []
        for p, a in weighted:
            if p == 0:
                continue
            k = a.key()
            if k not in acc:
                acc[k] = [Fraction(0), a]
                order.append(k)
            acc[k][0] += p
        return cls(tuple((acc[k][0], acc[k][1]) for k in order))

    @property
    def n(self) -> int:
        return self.support[0][1].n

    def __len__(self) -> int:
        return len(self.support)

    def allocations(self) -> list[Allocation]:
        return [a for _, a in self.support]


def expected_allocation(lot: Lottery, m: int) -> FractionalAllocation:
    n = lot.n
    x = [[Fraction(0)] * m for _ in range(n)]
    for p, alloc in lot.support:
        check_allocation_fits(alloc, n, m)
        for i, b in enumerate(alloc.bundles):
            for j in b:
                x[i][j] += p
    return FractionalAllocation(tuple(tuple(r) for r in x))


def expected_value(lot: Lottery, inst: Instance, agent: int) -> Fraction:
    return sum((p * bundle_value(inst, agent, a.bundles[agent]) for p, a in lot.support), Fraction(0))


# --- generators -----------------------------------------------------------

def gen_not_mms(n: int, eps) -> Instance:
    """Items ``s_0..s_{n-1}`` then ``b_0..b_{n-2}``; agent i slightly prefers s_i."""
    eps = as_fraction(eps)
    if n < 2:
        raise InvalidParameter("gen_not_mms needs n >= 2")
    if not 0 < eps < 1:
        raise InvalidParameter("gen_not_mms needs 0 < eps < 1")
    rows = []
    for i in range(n):
        small = [1 + eps if j == i else 1 - eps / (n - 1) for j in range(n)]
        rows.append(small + [Fraction(n)] * (n - 1))
    return new_instance(rows)


def gen_identical_units(n: int) -> Instance:
    if n < 1:
        raise InvalidParameter("gen_identical_units needs n >= 1")
    return new_instance([[1] * (2 * n - 1) for _ in range(n)])


def gen_random(n: int, m: int, max_value: int, seed: int) -> Instance:
    """Uniform integers in ``[0, max_value]``, row-major.

    The stream is Python's ``random.Random(seed)`` (MT19937) drawing
    ``randint(0, max_value)`` for agent 0 items 0..m-1, then agent 1, and so on.
    """
    if n < 1 or m < 0 or max_value < 0:
        raise InvalidParameter("gen_random needs n >= 1, m >= 0, max_value >= 0")
    rng = random.Random(seed)
    return new_instance([[rng.randint(0, max_value) for _ in range(m)] for _ in range(n)])
