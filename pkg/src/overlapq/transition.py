"""Measure-hereditary structure on the automaton.

Each subdivision edge carries a small rectangular entry matrix: row j is a
parent window offset, column i a child window offset, and the entry is the
probability of the unique letter that extends a cylinder sitting at offset
j into one sitting at offset i (or 0 when no letter does).  Multiplying a
parent's per-offset cylinder-mass vector by this matrix gives the child's
vector exactly, because window offsets determine E-contact positionally in
an equi-contractive system.

The module also finds the unique terminal strongly connected class of the
type digraph, picks the reference interval I0 inside it, and checks row
positivity of the entry matrices, the hypothesis behind every lower bound
downstream.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapExceeded, StructureError
from .exactfield import FieldElement, format_field
from .ifs import IfsSpec
from .netauto import Automaton, MeetsE, net_intervals_brute

__all__ = [
    "EssentialClass",
    "analyze_essential",
    "brute_offset_masses",
    "mass_vector",
    "positivity_check",
    "w_matrix",
]


def w_matrix(auto: Automaton, parent: int, slot: int) -> tuple[tuple[Fraction, ...], ...]:
    """Entry matrix of the mass recursion for one subdivision edge."""
    spec = auto.spec
    cv = auto.types[parent]
    edge = auto.edges[parent][slot]
    cw = auto.types[edge.child]
    letter_of = {b: h for h, b in enumerate(spec.offsets)}
    rows = []
    for cj in cv.offsets:
        row = []
        for ai in cw.offsets:
            h = letter_of.get(cj + edge.cut - spec.rho * ai)
            row.append(spec.probs[h] if h is not None else Fraction(0))
        if sum(row) > 1:
            raise StructureError("transition row sums a probability above 1")
        rows.append(tuple(row))
    return tuple(rows)


def mass_vector(auto: Automaton, path: Sequence[int]) -> tuple[Fraction, ...]:
    """Exact per-offset cylinder masses of the net interval at ``path``.

    Entry j sums the word probabilities of the order-n cylinders sitting
    at the j-th window offset; the l1 norm is the total covering mass.
    """
    auto.check_path(path)
    masses: tuple[Fraction, ...] = (Fraction(1),)
    for parent, child in zip(path, path[1:]):
        w = w_matrix(auto, parent, auto.slot_of(parent, child))
        masses = tuple(
            sum(m * w[j][i] for j, m in enumerate(masses))
            for i in range(len(w[0]))
        )
    return masses


def brute_offset_masses(
    spec: IfsSpec, depth: int, word_cap: int = 300_000
) -> list[tuple[FieldElement, FieldElement, tuple, tuple]]:
    """Per-offset cylinder masses of every order-``depth`` net interval.

    Direct word enumeration, independent of the automaton: cylinders are
    grouped by left endpoint, and each net interval collects the sorted
    normalized offsets of the cylinders containing it together with their
    summed probabilities.  Entries are (lo, hi, offsets, masses) by lo.
    """
    if spec.n_maps**depth > word_cap:
        raise CapExceeded(f"{spec.n_maps}^{depth} words exceed the oracle cap")
    weights: dict[FieldElement, Fraction] = {FieldElement.from_rational(0): Fraction(1)}
    for _ in range(depth):
        nxt: dict[FieldElement, Fraction] = {}
        for x, m in weights.items():
            for b, p in zip(spec.offsets, spec.probs):
                key = spec.rho * x + b
                nxt[key] = nxt.get(key, Fraction(0)) + m * p
        weights = nxt
    length = spec.cylinder_length(depth)
    meets = MeetsE(spec)
    cells = sorted(weights.items(), key=lambda item: item[0])
    lefts = [c for c, _ in cells]
    out = []
    for lo, hi in net_intervals_brute(spec, depth, meets, word_cap):
        start = bisect.bisect_left(lefts, hi - length)
        cover = []
        for c, m in cells[start:]:
            if c > lo:
                break
            cover.append(((lo - c) / length, m))
        cover.sort(key=lambda item: item[0])
        offsets = tuple(a for a, _ in cover)
        masses = tuple(m for _, m in cover)
        out.append((lo, hi, offsets, masses))
    return out


def _tarjan_components(n: int, succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components, iterative to spare the stack limit."""
    index = [0] * n
    low = [0] * n
    state = [0] * n  # 0 unvisited, 1 on stack, 2 done
    comp_stack: list[int] = []
    components: list[list[int]] = []
    counter = 1
    for root in range(n):
        if state[root]:
            continue
        work = [(root, 0)]
        while work:
            node, pos = work.pop()
            if pos == 0:
                index[node] = low[node] = counter
                counter += 1
                state[node] = 1
                comp_stack.append(node)
            advanced = False
            for k in range(pos, len(succ[node])):
                nxt = succ[node][k]
                if state[nxt] == 0:
                    work.append((node, k + 1))
                    work.append((nxt, 0))
                    advanced = True
                    break
                if state[nxt] == 1:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    member = comp_stack.pop()
                    state[member] = 2
                    comp.append(member)
                    if member == node:
                        break
                components.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return components


@dataclass(frozen=True)
class EssentialClass:
    """The unique terminal class of types, with the chosen base interval."""

    states: tuple[int, ...]
    eta1: int
    n0: int
    left: FieldElement
    right: FieldElement
    path: tuple[int, ...]  # root-anchored, ends at eta1, n0 edges long

    def describe(self) -> dict:
        return {
            "states": [s + 1 for s in self.states],
            "eta1": self.eta1 + 1,
            "n0": self.n0,
            "I0": [format_field(self.left), format_field(self.right)],
            "path": [t + 1 for t in self.path],
        }


def analyze_essential(auto: Automaton) -> EssentialClass:
    """Terminal strongly connected class plus the reference interval I0.

    I0 is the shallowest, then leftmost, net interval of the first-found
    essential type, at order at least 1; both tie-breaks keep re-runs
    byte-identical.
    """
    comps = _tarjan_components(auto.card, auto.xi)
    terminal = []
    for comp in comps:
        members = set(comp)
        if all(child in members for node in comp for child in auto.xi[node]):
            terminal.append(comp)
    if len(terminal) != 1:
        raise StructureError(
            f"expected exactly one terminal class, found {len(terminal)}: {terminal}"
        )
    states = tuple(terminal[0])
    eta1 = states[0]

    # edge distance to eta1, via reverse BFS
    preds: list[list[int]] = [[] for _ in range(auto.card)]
    for node, kids in enumerate(auto.xi):
        for kid in kids:
            preds[kid].append(node)
    dist = [None] * auto.card
    dist[eta1] = 0
    frontier = [eta1]
    while frontier:
        nxt = []
        for node in frontier:
            for p in preds[node]:
                if dist[p] is None:
                    dist[p] = dist[node] + 1
                    nxt.append(p)
        frontier = nxt

    n0 = min(
        (1 + dist[c] for c in auto.xi[auto.root] if dist[c] is not None),
        default=None,
    )
    if n0 is None:
        raise StructureError("essential head state unreachable below the root")

    path: list[int] = [auto.root]

    def descend(tid: int, depth: int) -> bool:
        if depth == n0:
            return tid == eta1
        for child in auto.xi[tid]:
            if dist[child] is not None and dist[child] <= n0 - depth - 1:
                path.append(child)
                if descend(child, depth + 1):
                    return True
                path.pop()
        return False

    if not descend(auto.root, 0):
        raise StructureError("no depth-n0 instance of the essential head state")
    left, right = auto.realize(path)
    return EssentialClass(
        states=states, eta1=eta1, n0=n0, left=left, right=right, path=tuple(path)
    )


def positivity_check(
    auto: Automaton, essential: EssentialClass
) -> list[tuple[int, int, int]]:
    """Rows of essential entry matrices without a positive entry.

    Empty list means every admissible step inside the terminal class hands
    every parent offset some mass; the mass-comparison constant and the
    threshold machinery stay alive exactly in that case.
    """
    failures = []
    members = set(essential.states)
    for alpha in essential.states:
        for slot, child in enumerate(auto.xi[alpha]):
            if child not in members:
                raise StructureError("terminal class is not closed under subdivision")
            w = w_matrix(auto, alpha, slot)
            for j, row in enumerate(w):
                if not any(row):
                    failures.append((alpha, child, j))
    return failures
