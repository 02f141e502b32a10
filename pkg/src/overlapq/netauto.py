"""Net-interval types and the finite automaton that generates them.

Order-n net intervals are the gaps between consecutive order-n cylinder
endpoints that still meet the attractor E.  Each one is summarized by a
finite type: its length rescaled by rho^-n, the rescaled positions of the
net interval inside every cylinder that covers it and whose copy of E
reaches its interior, and a sibling rank separating otherwise identical
children of one parent.  Subdivision acts on types, so a breadth-first
closure from the type of [0, 1] yields a finite automaton exactly when the
system is finite-type; the closure doubles as the constructive check.

A cylinder endpoint is always a point of E (both 0 and 1 are fixed points),
so cylinders whose E-copy misses a net interval's interior cannot deposit
endpoints there either; subdividing with the retained cylinders alone is
therefore complete, not an approximation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import CapExceeded, StructureError
from .exactfield import FieldElement, format_field
from .ifs import IfsSpec

__all__ = [
    "Automaton",
    "CharVector",
    "ChildEdge",
    "MeetsE",
    "build_automaton",
    "children_of",
    "net_intervals_brute",
]

_ZERO = FieldElement.from_rational(0)
_ONE = FieldElement.from_rational(1)


class MeetsE:
    """Exact decision procedure for "does the open window (lo, hi) meet E".

    Windows renormalize to letter pullbacks, giving a dependency graph with
    OR semantics.  A window is accepted when some finite pullback chain
    reaches a window that strictly contains a whole first-level cylinder
    interval; acceptance is propagated backward through the explored graph
    and everything else is rejected.  Rejecting unproductive cycles is
    sound: a point of E interior to a window puts a full cylinder interval
    strictly inside it at finite depth, so accepting chains are finite.
    """

    def __init__(self, spec: IfsSpec, state_cap: int = 100_000):
        self.spec = spec
        self.state_cap = state_cap
        self._memo: dict[tuple[FieldElement, FieldElement], bool] = {}

    def _canonical(self, lo: FieldElement, hi: FieldElement):
        """Fold a raw window onto [0, 1]; bool means decided outright."""
        if not lo < hi:
            return False
        if hi <= _ZERO or lo >= _ONE:
            return False
        if lo < _ZERO or hi > _ONE:
            # 0 or 1 lies inside the window, and both belong to E
            return True
        return (lo, hi)

    def query(self, lo, hi) -> bool:
        entry = self._canonical(FieldElement._coerce(lo), FieldElement._coerce(hi))
        if isinstance(entry, bool):
            return entry
        if entry in self._memo:
            return self._memo[entry]

        rho = self.spec.rho
        succ: dict[tuple, list[tuple]] = {}
        verdict: dict[tuple, bool] = {}
        stack = [entry]
        while stack:
            state = stack.pop()
            if state in succ:
                continue
            succ[state] = []
            if len(self._memo) + len(succ) > self.state_cap:
                raise CapExceeded(
                    f"window exploration exceeded {self.state_cap} states; "
                    "the system is unlikely to be finite-type"
                )
            w_lo, w_hi = state
            if any(w_lo < b and b + rho < w_hi for b in self.spec.offsets):
                verdict[state] = True
                continue
            for b in self.spec.offsets:
                if not (b < w_hi and w_lo < b + rho):
                    continue
                child = self._canonical((w_lo - b) / rho, (w_hi - b) / rho)
                if child is True:
                    verdict[state] = True
                    break
                if child is False:
                    continue
                known = self._memo.get(child)
                if known is True:
                    verdict[state] = True
                    break
                if known is False:
                    continue
                succ[state].append(child)
                stack.append(child)

        preds: dict[tuple, list[tuple]] = {}
        for state, kids in succ.items():
            for kid in kids:
                preds.setdefault(kid, []).append(state)
        work = [s for s, v in verdict.items() if v]
        while work:
            state = work.pop()
            for p in preds.get(state, ()):
                if not verdict.get(p):
                    verdict[p] = True
                    work.append(p)
        for state in succ:
            self._memo[state] = verdict.get(state, False)
        return self._memo[entry]


@dataclass(frozen=True)
class CharVector:
    """Type of a net interval: rescaled length, window offsets, sibling rank.

    ``offsets`` lists, for every covering cylinder whose E-copy meets the
    interval's interior, the rescaled position of the interval's left end
    inside that cylinder.  Distinct cylinders at the same position merge.
    """

    ell: FieldElement
    offsets: tuple[FieldElement, ...]
    pos_index: int

    def __post_init__(self):
        if not (_ZERO < self.ell and self.ell <= _ONE):
            raise StructureError(f"normalized length {self.ell} outside (0, 1]")
        if not self.offsets:
            raise StructureError("a net interval needs at least one window offset")
        bound = _ONE - self.ell
        for i, a in enumerate(self.offsets):
            if a < _ZERO or a > bound:
                raise StructureError(f"offset {a} outside [0, 1 - ell]")
            if i and not self.offsets[i - 1] < a:
                raise StructureError("window offsets must be strictly increasing")
        if self.pos_index < 1:
            raise StructureError("sibling rank starts at 1")

    @property
    def arity(self) -> int:
        return len(self.offsets)

    def describe(self) -> dict:
        return {
            "ell": format_field(self.ell),
            "offsets": [format_field(a) for a in self.offsets],
            "pos_index": self.pos_index,
        }


class ChildEdge(NamedTuple):
    child: int
    cut: FieldElement  # left end of the child cell, in parent-rescaled units


def children_of(
    spec: IfsSpec, meets: MeetsE, parent: CharVector
) -> list[tuple[CharVector, FieldElement]]:
    """Subdivide one net-interval type, left to right.

    Cut points come from endpoints of the one-letter extensions of the
    parent's covering cylinders; between consecutive cuts, each extension
    covering the whole cell contributes a candidate window offset, kept
    when its window meets E.  A cell survives iff it keeps some offset.
    """
    rho = spec.rho
    ell = parent.ell
    cuts: set[FieldElement] = {_ZERO, ell}
    for a in parent.offsets:
        for b in spec.offsets:
            for cut in (b - a, b - a + rho):
                if _ZERO <= cut and cut <= ell:
                    cuts.add(cut)
    grid = sorted(cuts)

    cells: list[tuple[FieldElement, tuple[FieldElement, ...], FieldElement]] = []
    for d0, d1 in zip(grid, grid[1:]):
        child_ell = (d1 - d0) / rho
        seen: set[FieldElement] = set()
        for a in parent.offsets:
            for b in spec.offsets:
                left = b - a
                if left <= d0 and d1 <= left + rho:
                    seen.add((d0 - left) / rho)
        kept = sorted(off for off in seen if meets.query(off, off + child_ell))
        if kept:
            cells.append((child_ell, tuple(kept), d0))

    ranks: dict[tuple, int] = {}
    children = []
    for child_ell, offsets, d0 in cells:
        key = (child_ell, offsets)
        ranks[key] = ranks.get(key, 0) + 1
        children.append((CharVector(child_ell, offsets, ranks[key]), d0))
    return children


@dataclass
class Automaton:
    """Closure of net-interval types under subdivision, with geometry.

    Type ids follow breadth-first discovery from the root type of [0, 1].
    ``xi[i]`` lists the child type ids of type ``i`` in spatial order and
    repeats none of them, so (parent, child) determines the child slot.
    """

    spec: IfsSpec
    types: tuple[CharVector, ...]
    xi: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[ChildEdge, ...], ...]
    meets: MeetsE
    root: int = 0

    @property
    def card(self) -> int:
        return len(self.types)

    def adjacency(self) -> list[list[int]]:
        matrix = [[0] * self.card for _ in range(self.card)]
        for i, kids in enumerate(self.xi):
            for j in kids:
                matrix[i][j] = 1
        return matrix

    def slot_of(self, parent: int, child: int) -> int:
        try:
            return self.xi[parent].index(child)
        except ValueError:
            raise StructureError(
                f"type {child} is not a child of type {parent}"
            ) from None

    def check_path(self, path: Sequence[int]) -> None:
        if not path or path[0] != self.root:
            raise StructureError("a symbolic expression starts at the root type")
        for parent, child in zip(path, path[1:]):
            self.slot_of(parent, child)

    def realize(self, path: Sequence[int]) -> tuple[FieldElement, FieldElement]:
        """Concrete net interval of a root-anchored type path."""
        self.check_path(path)
        left = _ZERO
        scale = _ONE
        for parent, child in zip(path, path[1:]):
            slot = self.slot_of(parent, child)
            left = left + scale * self.edges[parent][slot].cut
            scale = scale * self.spec.rho
        return left, left + scale * self.types[path[-1]].ell

    def intervals_at_depth(self, depth: int):
        """All order-``depth`` net intervals as (lo, hi, type id), sorted."""
        out: list[tuple[FieldElement, FieldElement, int]] = []

        def walk(tid: int, left: FieldElement, scale: FieldElement, d: int) -> None:
            if d == depth:
                out.append((left, left + scale * self.types[tid].ell, tid))
                return
            for edge in self.edges[tid]:
                walk(edge.child, left + scale * edge.cut, scale * self.spec.rho, d + 1)

        walk(self.root, _ZERO, _ONE, 0)
        out.sort(key=lambda item: item[0])
        return out

    def paths_at_depth(self, depth: int) -> list[tuple[int, ...]]:
        """All root-anchored type paths of the given depth, lexicographic."""
        paths: list[tuple[int, ...]] = []

        def walk(tid: int, acc: tuple[int, ...], d: int) -> None:
            if d == depth:
                paths.append(acc)
                return
            for child in self.xi[tid]:
                walk(child, acc + (child,), d + 1)

        walk(self.root, (self.root,), 0)
        return paths

    def describe(self) -> dict:
        return {
            "card": self.card,
            "root": self.root + 1,
            "types": [
                {"id": i + 1, **cv.describe()} for i, cv in enumerate(self.types)
            ],
            "xi": {str(i + 1): [c + 1 for c in kids] for i, kids in enumerate(self.xi)},
            "adjacency": self.adjacency(),
        }


def build_automaton(
    spec: IfsSpec, type_cap: int = 10_000, state_cap: int = 100_000
) -> Automaton:
    """Breadth-first closure of types; saturation certifies finite type."""
    meets = MeetsE(spec, state_cap)
    root = CharVector(_ONE, (_ZERO,), 1)
    ids: dict[CharVector, int] = {root: 0}
    types: list[CharVector] = [root]
    xi: list[tuple[int, ...]] = []
    edges: list[tuple[ChildEdge, ...]] = []
    queue = deque([0])
    while queue:
        tid = queue.popleft()
        kids = children_of(spec, meets, types[tid])
        if not kids:
            raise StructureError(
                f"type {tid} produced no children; a net interval always "
                "contains a point of E and hence a sub-net-interval"
            )
        row: list[ChildEdge] = []
        for cv, cut in kids:
            if cv not in ids:
                if len(types) >= type_cap:
                    raise CapExceeded(
                        f"type closure exceeded {type_cap} types; "
                        "finite type not confirmed within cap"
                    )
                ids[cv] = len(types)
                types.append(cv)
                queue.append(ids[cv])
            row.append(ChildEdge(ids[cv], cut))
        xi.append(tuple(e.child for e in row))
        edges.append(tuple(row))
    return Automaton(
        spec=spec,
        types=tuple(types),
        xi=tuple(xi),
        edges=tuple(edges),
        meets=meets,
    )


def net_intervals_brute(
    spec: IfsSpec, depth: int, meets: MeetsE | None = None, word_cap: int = 300_000
) -> list[tuple[FieldElement, FieldElement]]:
    """Order-n net intervals by direct endpoint enumeration (oracle grade).

    Cost grows like N^n; meant for cross-checking the automaton at small
    depths, not for production traversals.
    """
    if spec.n_maps**depth > word_cap:
        raise CapExceeded(f"{spec.n_maps}^{depth} words exceed the oracle cap")
    meets = meets if meets is not None else MeetsE(spec)
    lefts: set[FieldElement] = {_ZERO}
    for _ in range(depth):
        lefts = {spec.rho * x + b for x in lefts for b in spec.offsets}
    length = spec.cylinder_length(depth)
    points = sorted(lefts | {x + length for x in lefts})
    out = []
    for lo, hi in zip(points, points[1:]):
        if meets.query(lo, hi):
            out.append((lo, hi))
    return out
