from __future__ import annotations

from fractions import Fraction

import pytest

from overlapq import (
    analyze_essential,
    brute_offset_masses,
    mass_vector,
    positivity_check,
    preset,
    w_matrix,
)
from tests.conftest import ALL_PRESETS, automaton_for


def test_w_entries_are_map_probabilities_or_zero():
    auto = automaton_for("counterexample")
    probs = set(auto.spec.probs) | {Fraction(0)}
    for parent in range(auto.card):
        for slot in range(len(auto.xi[parent])):
            for row in w_matrix(auto, parent, slot):
                for entry in row:
                    # entries are sums of map probabilities; single-map
                    # systems here keep them in the raw set
                    assert entry >= 0
                    assert entry == 0 or entry in probs or entry <= 1


def test_counterexample_self_loop_zero_row():
    auto = automaton_for("counterexample")
    # type 3 self-extension drops its second covering cylinder entirely
    slot = auto.xi[2].index(2)
    w = w_matrix(auto, 2, slot)
    assert all(entry == 0 for entry in w[1])
    assert any(entry != 0 for entry in w[0])


def test_counterexample_first_child_matrix():
    auto = automaton_for("counterexample")
    w = w_matrix(auto, auto.root, 0)
    assert w == ((Fraction(1, 3),),)


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_mass_vectors_match_enumeration(name):
    spec = preset(name)
    auto = automaton_for(name)
    for depth in range(4):
        if spec.n_maps**depth > 4096:
            break
        brute = brute_offset_masses(spec, depth)
        paths = sorted(auto.paths_at_depth(depth), key=lambda p: auto.realize(p)[0])
        assert len(paths) == len(brute)
        for path, (blo, bhi, offs, masses) in zip(paths, brute):
            lo, hi = auto.realize(path)
            assert (lo, hi) == (blo, bhi)
            cv = auto.types[path[-1]]
            assert tuple(cv.offsets) == offs
            assert mass_vector(auto, path) == masses


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_essential_class_is_terminal_and_reachable(name):
    auto = automaton_for(name)
    ess = analyze_essential(auto)
    members = set(ess.states)
    for s in ess.states:
        for c in auto.xi[s]:
            assert c in members
    # mutual reachability inside the class
    for s in ess.states:
        seen = {s}
        frontier = [s]
        while frontier:
            t = frontier.pop()
            for c in auto.xi[t]:
                if c not in seen:
                    seen.add(c)
                    frontier.append(c)
        assert members <= seen


def test_counterexample_essential_is_everything():
    auto = automaton_for("counterexample")
    ess = analyze_essential(auto)
    assert set(ess.states) == set(range(7))
    assert ess.describe()["I0"] == ["2/3", "1"]
    assert ess.n0 == 1


def test_positivity_verdicts():
    failures = positivity_check(
        automaton_for("counterexample"), analyze_essential(automaton_for("counterexample"))
    )
    assert set(failures) == {(2, 2, 1), (2, 6, 0)}
    for name in ("cantor", "lebesgue", "erdos", "threefold", "lambda-cantor:1"):
        auto = automaton_for(name)
        assert positivity_check(auto, analyze_essential(auto)) == []


def test_mass_vector_total_is_at_least_interval_mass():
    # covering cylinders carry at least the measure of the net interval
    auto = automaton_for("erdos")
    for path in auto.paths_at_depth(3):
        masses = mass_vector(auto, path)
        assert all(m > 0 for m in masses)
        assert sum(masses) <= 1
