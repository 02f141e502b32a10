"""Sweep the moment order and print certified dimension brackets.

Usage: python scripts/dimension_sweep.py [preset ...] [--n DEPTH]

Systems with disjoint cylinders also get the scalar fixed-point value, so
the bracket quality is visible at a glance.
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from overlapq import analyze_essential, build_automaton, osc_dimension_oracle, preset, solve_s_r

R_GRID = (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3), Fraction(5))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("presets", nargs="*", default=["cantor", "lebesgue", "erdos"])
    ap.add_argument("--n", type=int, default=12, help="pressure depth")
    args = ap.parse_args()

    for name in args.presets:
        spec = preset(name)
        auto = build_automaton(spec)
        ess = analyze_essential(auto)
        separated = spec.open_set_separated()
        print(f"== {name} (n={args.n})")
        for r in R_GRID:
            est = solve_s_r(auto, ess, r, tol=0.01, n=args.n)
            tag = "resolved" if est.resolved else "unresolved"
            line = (
                f"  r={str(r):>4s}  s in [{est.s_lo:.4f}, {est.s_hi:.4f}]"
                f"  center {est.s_center:.4f}  {tag}"
            )
            if separated:
                line += f"  scalar {osc_dimension_oracle(spec, r):.6f}"
            print(line)


if __name__ == "__main__":
    main()
