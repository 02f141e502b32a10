from __future__ import annotations

from fractions import Fraction

import pytest

from overlapq import (
    FieldElement,
    StructureError,
    net_intervals_brute,
    preset,
)
from tests.conftest import ALL_PRESETS, automaton_for

F = FieldElement.from_rational


def test_root_type_is_whole_interval():
    auto = automaton_for("cantor")
    root = auto.types[auto.root]
    assert root.ell == F(1)
    assert tuple(root.offsets) == (F(0),)
    assert root.pos_index == 1


def test_counterexample_depth1_intervals():
    auto = automaton_for("counterexample")
    golden = [
        (Fraction(0), Fraction(1, 9)),
        (Fraction(1, 9), Fraction(1, 3)),
        (Fraction(1, 3), Fraction(4, 9)),
        (Fraction(2, 3), Fraction(1)),
    ]
    got = [(lo, hi) for lo, hi, _ in auto.intervals_at_depth(1)]
    assert got == [(F(a), F(b)) for a, b in golden]


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_realized_intervals_tile_without_overlap(name):
    auto = automaton_for(name)
    for depth in (1, 2, 3):
        cells = auto.intervals_at_depth(depth)
        for (lo, hi, _), (lo2, _hi2, _) in zip(cells, cells[1:]):
            assert lo < hi
            assert hi <= lo2  # gaps allowed, overlap never


@pytest.mark.parametrize("name", ("cantor", "counterexample", "erdos", "threefold"))
def test_automaton_agrees_with_enumeration(name):
    spec = preset(name)
    auto = automaton_for(name)
    for depth in range(4):
        brute = net_intervals_brute(spec, depth)
        mine = [(lo, hi) for lo, hi, _ in auto.intervals_at_depth(depth)]
        assert mine == brute


def test_type_identity_is_geometric():
    # same characteristic vector means identically scaled local picture,
    # so realized lengths divided by rho^depth match the type length
    auto = automaton_for("erdos")
    rho = auto.spec.rho
    for depth in (1, 2, 3):
        scale = rho**depth
        for lo, hi, tid in auto.intervals_at_depth(depth):
            assert hi - lo == scale * auto.types[tid].ell


def test_paths_realize_consistently():
    auto = automaton_for("counterexample")
    for path in auto.paths_at_depth(3):
        lo, hi = auto.realize(path)
        assert F(0) <= lo < hi <= F(1)
    with pytest.raises(StructureError):
        auto.realize((auto.root, 99))


def test_adjacency_matches_children():
    auto = automaton_for("threefold")
    adj = auto.describe()["adjacency"]
    for i, row in enumerate(adj):
        children = set(auto.xi[i])
        for j, bit in enumerate(row):
            assert bit == (1 if j in children else 0)


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_every_type_is_reachable_and_productive(name):
    auto = automaton_for(name)
    seen = {auto.root}
    frontier = [auto.root]
    while frontier:
        t = frontier.pop()
        for c in auto.xi[t]:
            if c not in seen:
                seen.add(c)
                frontier.append(c)
    assert seen == set(range(auto.card))
    for t in range(auto.card):
        assert auto.xi[t], "a type with no children cannot occur"
