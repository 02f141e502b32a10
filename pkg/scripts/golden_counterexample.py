"""Print the full structural card of the three-map counterexample system.

The run shows the seven interval types, the child production table, the
terminal class, and the two zero rows that break subdivision positivity.
"""

from __future__ import annotations

import time

from overlapq import analyze_essential, build_automaton, positivity_check, preset
from overlapq.transition import w_matrix


def main() -> None:
    started = time.monotonic()
    spec = preset("counterexample")
    auto = build_automaton(spec)
    ess = analyze_essential(auto)
    failures = positivity_check(auto, ess)
    elapsed = time.monotonic() - started

    print(f"system: rho={spec.rho}, offsets={[str(b) for b in spec.offsets]}")
    print(f"types ({auto.card}):")
    for i, cv in enumerate(auto.types):
        offs = ", ".join(str(a) for a in cv.offsets)
        print(f"  {i + 1}: ell={cv.ell}  offsets=({offs})  rank={cv.pos_index}")
    print("children:")
    for i in range(auto.card):
        kids = " ".join(str(c + 1) for c in auto.xi[i])
        print(f"  {i + 1} -> {kids}")
    print(f"terminal class: {[s + 1 for s in ess.states]}")
    print(f"reference interval I0 = [{ess.left}, {ess.right}]")
    print("zero rows (parent type, child type, parent cylinder):")
    for a, b, j in failures:
        w = w_matrix(auto, a, auto.xi[a].index(b))
        print(f"  ({a + 1}, {b + 1}, row {j + 1})  matrix={w}")
    print(f"elapsed: {elapsed:.3f}s")


if __name__ == "__main__":
    main()
