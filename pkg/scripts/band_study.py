"""Study how flat k^(r/s) * e_r(k) is along the dyadic error curve.

Usage: python scripts/band_study.py [--preset NAME] [--depth M] [--kmax K]

A bounded, tightly clustered band at the solved exponent, against a wildly
spread band at a deliberately wrong exponent, is the numerical signature
the package exists to exhibit.
"""

from __future__ import annotations

import argparse

from overlapq import (
    analyze_essential,
    build_automaton,
    coefficient_band,
    discretize,
    error_curve_discrete,
    preset,
    solve_s_r,
)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--preset", default="erdos")
    ap.add_argument("--depth", type=int, default=12, help="discretization depth")
    ap.add_argument("--kmax", type=int, default=64)
    ap.add_argument("--n", type=int, default=12, help="pressure depth")
    args = ap.parse_args()

    spec = preset(args.preset)
    auto = build_automaton(spec)
    ess = analyze_essential(auto)
    est = solve_s_r(auto, ess, 2, tol=0.01, n=args.n)
    s = est.s_center
    print(f"{args.preset}: s_2 in [{est.s_lo:.4f}, {est.s_hi:.4f}], using center {s:.4f}")

    dm = discretize(spec, args.depth)
    print(f"atoms at depth {args.depth}: {dm.size}")
    curve = error_curve_discrete(dm, 2, args.kmax)
    band = coefficient_band(curve, s, 4)
    control = coefficient_band(curve, s / 2, 4)
    print("dyadic scaled coefficients at the solved exponent:")
    for k, v in band.points:
        print(f"  k={k:4d}  {v:.6f}")
    print(f"band ratio {band.ratio:.3f}  (control at s/2: {control.ratio:.3f})")


if __name__ == "__main__":
    main()
