from __future__ import annotations

from fractions import Fraction

import pytest

from overlapq import (
    CapExceeded,
    analyze_essential,
    derived_constants,
    discretize,
    net_measure,
    preset,
    window_table,
)
from tests.conftest import automaton_for


def test_full_interval_has_measure_one():
    auto = automaton_for("cantor")
    table = window_table(auto, depth=10)
    enc = net_measure(auto, (auto.root,), table)
    assert enc.lo <= 1 <= enc.hi
    assert enc.hi - enc.lo < Fraction(1, 10**2)


def test_windows_nest_under_refinement():
    auto = automaton_for("erdos")
    coarse = window_table(auto, depth=6)
    fine = window_table(auto, depth=10)
    for key, enc in fine.items():
        assert enc.within(coarse[key])
        assert 0 <= enc.lo <= enc.hi <= 1


def test_window_widths_shrink_geometrically():
    auto = automaton_for("threefold")
    d8 = window_table(auto, depth=8)
    d12 = window_table(auto, depth=12)
    for key in d8:
        w8 = d8[key].hi - d8[key].lo
        w12 = d12[key].hi - d12[key].lo
        assert w12 <= w8


def test_net_measures_of_siblings_sum_below_parent():
    auto = automaton_for("counterexample")
    table = window_table(auto, depth=12)
    parent = (auto.root,)
    penc = net_measure(auto, parent, table)
    total_lo = Fraction(0)
    total_hi = Fraction(0)
    for child in auto.xi[auto.root]:
        enc = net_measure(auto, (auto.root, child), table)
        total_lo += enc.lo
        total_hi += enc.hi
    # children partition the support up to endpoint mass
    assert total_lo <= penc.hi
    assert total_hi >= penc.lo


@pytest.mark.parametrize("name", ("cantor", "erdos", "lambda-cantor:1"))
def test_discretize_basic_shape(name):
    dm = discretize(preset(name), 6)
    assert sum(dm.masses) == 1
    assert all(m > 0 for m in dm.masses)
    assert list(dm.positions) == sorted(dm.positions)
    assert len(set(dm.positions)) == dm.size


def test_discretize_counts():
    assert discretize(preset("cantor"), 8).size == 2**8
    # golden-ratio collisions merge heavily: Fibonacci-like growth, not 2^n
    assert discretize(preset("erdos"), 8).size < 2**8


def test_discretize_cap_fires():
    with pytest.raises(CapExceeded):
        discretize(preset("cantor"), 12, atom_cap=1000)


def test_derived_constants_cantor_exact():
    auto = automaton_for("cantor")
    ess = analyze_essential(auto)
    table = window_table(auto, depth=12)
    dc = derived_constants(auto, ess, table, 2)
    assert dc.c3_lower == Fraction(1, 2)
    assert dc.eta_lower == Fraction(1, 18)
    assert dc.positive


def test_derived_constants_lebesgue_exact():
    auto = automaton_for("lebesgue")
    ess = analyze_essential(auto)
    table = window_table(auto, depth=12)
    dc = derived_constants(auto, ess, table, 2)
    assert dc.c3_lower == Fraction(1, 2)
    assert dc.eta_lower == Fraction(1, 8)


def test_derived_constants_certified_lower_bounds():
    # deeper tables may only improve the certified constants
    for name in ("threefold", "lambda-cantor:1"):
        auto = automaton_for(name)
        ess = analyze_essential(auto)
        shallow = derived_constants(auto, ess, window_table(auto, depth=8), 2)
        deep = derived_constants(auto, ess, window_table(auto, depth=12), 2)
        assert 0 < shallow.c3_lower <= deep.c3_lower < 1
        assert 0 < shallow.eta_lower <= deep.eta_lower < 1


def test_derived_constants_track_moment_order():
    auto = automaton_for("cantor")
    ess = analyze_essential(auto)
    table = window_table(auto, depth=12)
    r1 = derived_constants(auto, ess, table, 1)
    r2 = derived_constants(auto, ess, table, 2)
    # same mass bound, weaker length factor at higher moment
    assert r1.c3_lower == r2.c3_lower
    assert r1.eta_lower > r2.eta_lower
