import logging
import os
import random
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairshare import _mms_py, shares
from fairshare.errors import BudgetExceeded, IndexOutOfRange
from fairshare.model import gen_identical_units, gen_not_mms, new_instance
from fairshare.shares import (
    exceptional_items,
    mms,
    mms_of,
    partition_count,
    proportional_share,
    share_report,
    tps,
    tps_fixed_point,
    tps_of,
)

from helpers import brute_mms, brute_tps, instances

F = Fraction
EXAMPLE = new_instance([[2, 3, 4, 5, 6]] * 4)

try:
    from fairshare._mms_kernel import mms_int as compiled_kernel
except ImportError:  # extension not built
    compiled_kernel = None

needs_compiled = pytest.mark.skipif(compiled_kernel is None, reason="compiled kernel not built")


def test_proportional_share():
    assert proportional_share(EXAMPLE, 0) == 5
    assert proportional_share(new_instance([[0, 0], [1, 1]]), 0) == 0
    assert proportional_share(gen_not_mms(4, F(1, 100)), 2) == 4


def test_tps_examples():
    assert tps(EXAMPLE, 0) == F(9, 2)
    assert tps(new_instance([[3, 0, 4]]), 0) == 7
    assert tps_of([5, 1], 2) == 1
    for n in range(1, 7):
        assert tps(gen_identical_units(n), 0) == F(2 * n - 1, n)


def test_tps_rejects_bad_agent():
    with pytest.raises(IndexOutOfRange):
        tps(EXAMPLE, 4)


@given(st.lists(st.integers(0, 30), max_size=9), st.integers(1, 6))
def test_tps_three_ways_agree(values, n):
    vals = [F(v) for v in values]
    expected = brute_tps(vals, n)
    assert tps_of(vals, n) == expected
    assert tps_fixed_point(vals, n) == expected


@given(st.lists(st.integers(0, 30), max_size=8), st.integers(1, 5), st.integers(1, 9), st.integers(1, 9))
def test_tps_scale_equivariant(values, n, p, q):
    c = F(p, q)
    assert tps_of([c * v for v in values], n) == c * tps_of(values, n)


def test_exceptional_items():
    assert exceptional_items(EXAMPLE, 0) == {3, 4}
    assert exceptional_items(gen_identical_units(3), 1) == frozenset()
    # TPS 0: the lone positive item still counts, zero-value items do not
    assert exceptional_items(new_instance([[1, 0], [1, 0]]), 0) == {0}


@given(instances(n_min=1, n_max=5, m_max=9))
def test_exceptional_count_bounded(inst):
    for i in inst.agents:
        if tps(inst, i) > 0:
            assert len(exceptional_items(inst, i)) <= inst.n


def test_exceptional_count_logged(caplog):
    with caplog.at_level(logging.INFO, logger="fairshare.shares"):
        exceptional_items(new_instance([[5, 5, 0], [1, 1, 1]]), 0)
    assert "exceptional items" in caplog.text


def test_mms_examples():
    assert mms(gen_not_mms(4, F(1, 100)), 0) == 4
    assert mms(gen_identical_units(2), 1) == 1
    assert mms_of([5, 1], 2) == 1
    assert mms_of([3], 2) == 0
    assert mms_of([], 1) == 0


def test_partition_count():
    # Bell numbers when n >= m
    assert [partition_count(m, m) for m in range(7)] == [1, 1, 2, 5, 15, 52, 203]
    assert partition_count(5, 2) == 16
    assert partition_count(4, 1) == 1


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded) as err:
        mms(gen_identical_units(6), 0, budget=100)
    assert err.value.needed == partition_count(11, 6)
    assert share_report(gen_identical_units(6), 0, budget=100).mms is None


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("FAIRSHARE_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        mms(gen_identical_units(3), 0)
    monkeypatch.setenv("FAIRSHARE_BUDGET", "1000")
    assert mms(gen_identical_units(3), 0) == 1


@given(st.lists(st.integers(0, 20), max_size=7), st.integers(1, 4))
def test_mms_matches_brute_force(values, n):
    vals = [F(v) for v in values]
    assert mms_of(vals, n, backend="python") == brute_mms(vals, n)


@given(st.lists(st.builds(F, st.integers(0, 20), st.integers(1, 5)), max_size=6), st.integers(1, 3))
def test_mms_rational_values(values, n):
    assert mms_of(values, n) == brute_mms(values, n)


@needs_compiled
@given(st.lists(st.integers(0, 10**6), max_size=11), st.integers(1, 5))
def test_kernels_agree(values, n):
    vals = sorted(values, reverse=True)
    assert compiled_kernel(vals, n) == _mms_py.mms_int(vals, n)


@needs_compiled
def test_compiled_kernel_is_default():
    expected = "python" if os.environ.get("FAIRSHARE_PURE_PYTHON") else "compiled"
    assert shares.BACKEND == expected


def test_pure_python_override():
    code = "import fairshare; print(fairshare.BACKEND)"
    env = {**os.environ, "FAIRSHARE_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_huge_values_fall_back_to_python():
    vals = [F(2**62), F(2**62), F(1)]
    assert mms_of(vals, 2) == 2**62


@given(instances(n_min=1, n_max=4, m_max=7))
def test_share_chain(inst):
    n = inst.n
    for i in inst.agents:
        r = share_report(inst, i)
        assert r.chain_holds(n)
        assert r.ps >= r.tps >= r.mms >= F(n, 2 * n - 1) * r.tps


def test_identical_units_chain_is_tight():
    for n in range(2, 6):
        r = share_report(gen_identical_units(n), 0)
        assert r.mms == 1 == F(n, 2 * n - 1) * r.tps


def test_random_kernel_spot_check():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(2, 4)
        vals = sorted((rng.randint(0, 50) for _ in range(rng.randint(0, 8))), reverse=True)
        assert _mms_py.mms_int(vals, n) == brute_mms(vals, n)
