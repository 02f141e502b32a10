"""Optimal one-dimensional quantization of the discretized measure.

In one dimension an optimal k-point code induces nearest-point cells that
are intervals, so the discrete problem is an interval-partition dynamic
program over sorted atoms: best[q][j] = min over i of best[q-1][i-1] +
cost(i..j).  Cell costs use the closed-form minimizer where one exists
(weighted mean for squared error, weighted median for absolute error)
and golden-section search on the convex cost otherwise.  Ties on the
split index always resolve to the smallest, which pins down codebooks.

The r = 2 path evaluates whole DP layers with blocked vector arithmetic
over prefix sums; other exponents run the plain quadratic loop and are
capped to oracle-sized inputs.

Certified bounds for the underlying measure come from the transport
inequality: moving every atom to an arbitrary point of its generating
cylinder changes the r-th root of the error by at most the cylinder
length, so err^{1/r} of the discretization brackets the true value to
within rho^m.

The threshold-antichain machinery descends the essential subtree of the
automaton comparing exact rational enclosures of E_r = measure * length^r
against an exact rational threshold; no floats take part in membership
decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, SpecValidationError, StructureError
from .exactfield import FieldElement, rational_pow_bounds
from .measure import (
    DiscreteMeasure,
    Enclosure,
    MeasureEnclosures,
    derived_constants,
    net_measure,
    window_table,
)
from .netauto import Automaton
from .transition import EssentialClass

__all__ = [
    "CoefficientBand",
    "LambdaSet",
    "QuantizerResult",
    "brute_force_quantizer",
    "coefficient_band",
    "error_curve",
    "lambda_set",
    "optimal_quantizer_1d",
    "ss1_band_check",
]

_F0 = Fraction(0)
_GENERIC_CELL_CAP = 40_000_000  # m*m*k ops for the non-closed-form path


@dataclass(frozen=True)
class QuantizerResult:
    """One point of the discrete error curve with measure-level bounds."""

    k: int
    r: Fraction
    err_r: float
    codebook: tuple[float, ...]
    mu_err_lo: float
    mu_err_hi: float

    def describe(self) -> dict:
        return {
            "k": self.k,
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "err_r": self.err_r,
            "codebook": list(self.codebook),
            "mu_err_lo": self.mu_err_lo,
            "mu_err_hi": self.mu_err_hi,
        }


def _transport_interval(err: float, r: Fraction, radius: float) -> tuple[float, float]:
    root = err ** (1.0 / float(r))
    lo = max(root - radius, 0.0) ** float(r)
    hi = (root + radius) ** float(r)
    return (lo, hi)


def _cell_cost_generic(x, w, r: float, tol_scale: float) -> float:
    """min_c sum w|x-c|^r by golden section on the convex cost."""
    lo, hi = x[0], x[-1]
    if hi <= lo:
        return 0.0

    def cost(c):
        return float(np.dot(w, np.abs(x - c) ** r))

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, f2 = cost(c1), cost(c2)
    # fixed iteration count: the span shrink factor is 0.618 per step, and
    # a relative threshold alone can stall below one ulp of the endpoints
    for _ in range(150):
        if b - a <= 1e-12 * tol_scale or not (a < c1 < c2 < b):
            break
        if f1 <= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1 = cost(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2 = cost(c2)
    return min(f1, f2)


def _cell_center_and_cost(x, w, r: Fraction) -> tuple[float, float]:
    rf = float(r)
    if len(x) == 1:
        return (float(x[0]), 0.0)
    if r == 2:
        wt = w.sum()
        mean = float(np.dot(w, x) / wt)
        return (mean, float(np.dot(w, (x - mean) ** 2)))
    if r == 1:
        cw = np.cumsum(w)
        half = 0.5 * cw[-1]
        mi = int(np.searchsorted(cw, half))
        med = float(x[mi])
        return (med, float(np.dot(w, np.abs(x - med))))
    scale = float(x[-1] - x[0]) or 1.0
    best = _cell_cost_generic(x, w, rf, scale)
    # rerun a short ternary pass to report the center itself
    lo, hi = float(x[0]), float(x[-1])
    for _ in range(90):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if float(np.dot(w, np.abs(x - m1) ** rf)) <= float(
            np.dot(w, np.abs(x - m2) ** rf)
        ):
            hi = m2
        else:
            lo = m1
    return (0.5 * (lo + hi), best)


def _dp_layers_r2(x, w, k_max: int):
    """Blocked vector DP for squared error; returns costs and split tables.

    cost(i..j) = S2 - S1^2/S0 over the segment, from prefix sums.  Layer
    minimization scans candidate split points in blocks, keeping the first
    index on ties.
    """
    m = len(x)
    p0 = np.concatenate(([0.0], np.cumsum(w)))
    p1 = np.concatenate(([0.0], np.cumsum(w * x)))
    p2 = np.concatenate(([0.0], np.cumsum(w * x * x)))

    def seg_cost_row(i_arr, j):
        # cost(i..j) vectorized over i
        s0 = p0[j + 1] - p0[i_arr]
        s1 = p1[j + 1] - p1[i_arr]
        s2 = p2[j + 1] - p2[i_arr]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = s2 - np.where(s0 > 0, s1 * s1 / np.where(s0 > 0, s0, 1.0), 0.0)
        return np.maximum(c, 0.0)

    js = np.arange(m)
    prev = seg_cost_row(np.zeros(m, dtype=np.int64), js)  # one cell 0..j
    layers = [prev]
    splits = []
    block = 128
    for _ in range(2, k_max + 1):
        cur = np.full(m, np.inf)
        arg = np.zeros(m, dtype=np.int64)
        # i is the left end of the last cell; i = 0 would leave the
        # earlier cells empty, so the scan starts at 1
        for istart in range(1, m, block):
            i_arr = np.arange(istart, min(istart + block, m))
            base = prev[i_arr - 1]  # best for 0..i-1 with one cell fewer
            s0 = p0[None, 1:] - p0[i_arr][:, None]
            s1 = p1[None, 1:] - p1[i_arr][:, None]
            s2 = p2[None, 1:] - p2[i_arr][:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                cand = base[:, None] + (s2 - s1 * s1 / s0)
            # j < i means an empty last cell; that region also holds the
            # 0/0 artifacts, so mask it before comparing
            cand[js[None, :] < i_arr[:, None]] = np.inf
            blk_arg = np.argmin(cand, axis=0)
            blk_val = cand[blk_arg, js]
            better = blk_val < cur
            cur[better] = blk_val[better]
            arg[better] = i_arr[blk_arg[better]]
        # a lone atom stays a lone cell whatever the budget
        cur[0] = prev[0]
        arg[0] = 0
        np.maximum(cur, 0.0, out=cur)
        layers.append(cur)
        splits.append(arg)
        prev = cur
    return layers, splits


def _dp_layers_generic(x, w, k_max: int, r: Fraction):
    m = len(x)
    if m * m * max(k_max - 1, 1) > _GENERIC_CELL_CAP:
        raise CapExceeded(
            f"quantizer DP size {m}x{m}x{k_max} beyond the generic-cost cap"
        )
    cell = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            cell[i, j] = _cell_center_and_cost(x[i : j + 1], w[i : j + 1], r)[1]
    prev = cell[0].copy()
    layers = [prev]
    splits = []
    for _ in range(2, k_max + 1):
        cur = np.full(m, np.inf)
        arg = np.zeros(m, dtype=np.int64)
        cur[0] = prev[0]
        for j in range(1, m):
            iidx = np.arange(1, j + 1)
            cand = prev[iidx - 1] + cell[iidx, j]
            i_best = int(np.argmin(cand))
            cur[j] = cand[i_best]
            arg[j] = iidx[i_best]
        layers.append(cur)
        splits.append(arg)
        prev = cur
    return layers, splits


def _extract_codebook(x, w, splits, k: int, r: Fraction) -> tuple[float, ...]:
    m = len(x)
    bounds = []
    j = m - 1
    for q in range(k, 1, -1):
        i = int(splits[q - 2][j])
        bounds.append((i, j))
        j = i - 1
        if j < 0:
            break
    bounds.append((0, j))
    bounds.reverse()
    centers = []
    for i, j in bounds:
        if j < i:
            continue
        centers.append(_cell_center_and_cost(x[i : j + 1], w[i : j + 1], r)[0])
    return tuple(centers)


def optimal_quantizer_1d(dm: DiscreteMeasure, k: int, r) -> QuantizerResult:
    r = Fraction(r)
    if k < 1:
        raise SpecValidationError(f"need k >= 1, got {k}")
    if r <= 0:
        raise SpecValidationError(f"moment order must be positive, got {r}")
    return error_curve_discrete(dm, r, k)[-1]


def error_curve_discrete(dm: DiscreteMeasure, r, k_max: int) -> list[QuantizerResult]:
    """Results for every k = 1..k_max in one DP sweep."""
    r = Fraction(r)
    if k_max < 1:
        raise SpecValidationError(f"need k_max >= 1, got {k_max}")
    x = np.asarray(dm.positions_float())
    w = np.asarray(dm.masses_float())
    m = len(x)
    k_top = min(k_max, m)
    # small instances share the centered per-cell formula with the oracle;
    # the prefix-sum form cancels badly when a cell cost is near zero
    if r == 2 and m > 512:
        layers, splits = _dp_layers_r2(x, w, k_top)
    else:
        layers, splits = _dp_layers_generic(x, w, k_top, r)
    radius = dm.radius_upper_float()
    out = []
    for k in range(1, k_max + 1):
        if k <= k_top:
            err = float(layers[k - 1][m - 1])
            err = max(err, 0.0)
            book = _extract_codebook(x, w, splits, k, r)
        else:
            err = 0.0
            book = tuple(float(v) for v in x[: min(k, m)])
        lo, hi = _transport_interval(err, r, radius)
        out.append(
            QuantizerResult(
                k=k, r=r, err_r=err, codebook=book, mu_err_lo=lo, mu_err_hi=hi
            )
        )
    for a, b in zip(out, out[1:]):
        if b.err_r > a.err_r + 1e-12 * (1 + a.err_r):
            raise StructureError("error curve must be non-increasing in k")
    return out


def brute_force_quantizer(dm: DiscreteMeasure, k: int, r) -> QuantizerResult:
    """Partition-enumeration oracle for small instances."""
    r = Fraction(r)
    m = dm.size
    if m > 12 or k > 4:
        raise CapExceeded(f"oracle limited to 12 atoms and k <= 4, got {m}, {k}")
    if k < 1:
        raise SpecValidationError(f"need k >= 1, got {k}")
    x = np.asarray(dm.positions_float())
    w = np.asarray(dm.masses_float())

    best = (math.inf, ())

    def rec(start: int, cells_left: int, acc: float, centers: tuple):
        nonlocal best
        if start == m:
            if (acc, centers) < best:
                best = (acc, centers)
            return
        if cells_left == 0:
            return
        for end in range(start, m):
            c, cost = _cell_center_and_cost(x[start : end + 1], w[start : end + 1], r)
            rec(end + 1, cells_left - 1, acc + cost, centers + (c,))

    rec(0, k, 0.0, ())
    err = best[0] if best[0] < math.inf else 0.0
    radius = dm.radius_upper_float()
    lo, hi = _transport_interval(err, r, radius)
    return QuantizerResult(
        k=k, r=r, err_r=err, codebook=best[1], mu_err_lo=lo, mu_err_hi=hi
    )


def error_curve(spec, r, depth: int, k_max: int) -> list[QuantizerResult]:
    from .measure import discretize

    dm = discretize(spec, depth)
    return error_curve_discrete(dm, r, k_max)


@dataclass(frozen=True)
class CoefficientBand:
    """Scaled error band k^{r/s} * err over a dyadic k grid."""

    s: float
    r: Fraction
    points: tuple[tuple[int, float], ...]
    band_lo: float
    band_hi: float

    @property
    def ratio(self) -> float:
        if self.band_lo <= 0:
            return math.inf
        return self.band_hi / self.band_lo

    def describe(self) -> dict:
        return {
            "s": self.s,
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "points": [[k, v] for k, v in self.points],
            "band_lo": self.band_lo,
            "band_hi": self.band_hi,
            "ratio": self.ratio,
        }


def coefficient_band(
    curve: list[QuantizerResult], s: float, k_min: int = 4
) -> CoefficientBand:
    if s <= 0:
        raise SpecValidationError(f"need s > 0, got {s}")
    r = curve[0].r
    pts = []
    k = k_min
    by_k = {q.k: q for q in curve}
    while k <= max(by_k):
        q = by_k.get(k)
        if q is not None:
            pts.append((k, k ** (float(r) / s) * q.err_r))
        k *= 2
    if not pts:
        raise SpecValidationError("empty dyadic grid for the band")
    vals = [v for _, v in pts]
    return CoefficientBand(
        s=s, r=r, points=tuple(pts), band_lo=min(vals), band_hi=max(vals)
    )


@dataclass(frozen=True)
class LambdaSet:
    """Threshold antichain below the essential head with its error sum."""

    k: int
    r: Fraction
    words: tuple[tuple[int, ...], ...]
    phi: int
    esum: Enclosure
    unresolved: tuple[tuple[int, ...], ...]
    threshold: Fraction

    @property
    def flagged(self) -> bool:
        return len(self.unresolved) > 0

    def validate(self) -> None:
        seen = set(self.words) | set(self.unresolved)
        if len(seen) != self.phi + len(self.unresolved):
            raise SpecValidationError("duplicate antichain words")
        for wrd in seen:
            for cut in range(1, len(wrd)):
                if wrd[:cut] in seen:
                    raise SpecValidationError("antichain violated by a prefix")

    def describe(self) -> dict:
        return {
            "k": self.k,
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "phi": self.phi,
            "esum": self.esum.describe(),
            "unresolved": len(self.unresolved),
            "threshold": f"{self.threshold.numerator}/{self.threshold.denominator}",
        }


def _pow_bounds_field(x: FieldElement, e: Fraction) -> tuple[Fraction, Fraction]:
    lo, hi = x.rational_bounds(Fraction(1, 10**28))
    if lo <= 0:
        return (_F0, rational_pow_bounds(hi, e)[1] if hi > 0 else _F0)
    return (rational_pow_bounds(lo, e)[0], rational_pow_bounds(hi, e)[1])


def lambda_set(
    auto: Automaton,
    essential: EssentialClass,
    k: int,
    r,
    window_depth: int = 16,
    refine_depths: tuple[int, ...] = (20, 24),
    word_cap: int = 200_000,
) -> LambdaSet:
    """Antichain of essential-subtree words by exact threshold descent.

    A word is emitted when its E_r enclosure falls entirely below the
    threshold, expanded when entirely at or above, and re-evaluated with
    deeper measure windows when the enclosure straddles; words that stay
    straddling at the deepest table are reported unresolved, not guessed.
    """
    r = Fraction(r)
    if k < 1:
        raise SpecValidationError(f"need k >= 1, got {k}")
    calc = MeasureEnclosures(auto.spec)
    tables = {window_depth: window_table(auto, window_depth, calc)}
    consts = derived_constants(auto, essential, tables[window_depth], r)
    if not consts.positive:
        raise SpecValidationError(
            "threshold descent needs a positive comparison constant"
        )
    # threshold eta^k * mu(I0) * |I0|^r, all as certified lower bounds
    head_path = tuple(essential.path)
    mu_i0 = net_measure(auto, head_path, tables[window_depth])
    i0_len = (auto.spec.rho ** (len(head_path) - 1)) * auto.types[head_path[-1]].ell
    i0_pow_lo = _pow_bounds_field(i0_len, r)[0]
    threshold = (consts.eta_lower**k) * mu_i0.lo * i0_pow_lo
    if threshold <= 0:
        raise SpecValidationError("degenerate descent threshold")

    def e_r(path: tuple[int, ...], depth: int) -> Enclosure:
        if depth not in tables:
            tables[depth] = window_table(auto, depth, calc)
        enc = net_measure(auto, path, tables[depth])
        tail = auto.types[path[-1]].ell * (auto.spec.rho ** (len(path) - 1))
        p_lo, p_hi = _pow_bounds_field(tail, r)
        return Enclosure(min(enc.lo * p_lo, Fraction(1)), min(enc.hi * p_hi, Fraction(1)))

    words: list[tuple[int, ...]] = []
    unresolved: list[tuple[int, ...]] = []
    esum_lo, esum_hi = _F0, _F0
    stack = [(s,) for s in reversed(auto.xi[head_path[-1]]) if s in set(essential.states)]
    seen_states = set(essential.states)
    while stack:
        suffix = stack.pop()
        if len(words) + len(unresolved) > word_cap:
            raise CapExceeded(f"antichain beyond {word_cap} words")
        full = head_path + suffix
        verdict = None
        for depth in (window_depth,) + tuple(refine_depths):
            enc = e_r(full, depth)
            if enc.hi < threshold:
                verdict = "emit"
                break
            if enc.lo >= threshold:
                verdict = "descend"
                break
        if verdict == "emit":
            words.append(suffix)
            esum_lo += enc.lo
            esum_hi += enc.hi
        elif verdict == "descend":
            children = [c for c in auto.xi[full[-1]] if c in seen_states]
            for c in reversed(children):
                stack.append(suffix + (c,))
        else:
            unresolved.append(suffix)
            esum_hi += enc.hi
    result = LambdaSet(
        k=k,
        r=r,
        words=tuple(sorted(words)),
        phi=len(words),
        esum=Enclosure(min(esum_lo, Fraction(1)), min(esum_hi, Fraction(1))),
        unresolved=tuple(sorted(unresolved)),
        threshold=threshold,
    )
    result.validate()
    return result


def ss1_band_check(
    auto: Automaton,
    essential: EssentialClass,
    r,
    k_range,
    discretize_depth: int = 12,
    window_depth: int = 16,
) -> dict:
    """Ratio of the conditioned quantization error to the antichain sum.

    For each level k the antichain cardinality phi sets the codebook size;
    the error of the measure conditioned on the essential head instance is
    compared against the antichain's E_r sum.  A bounded max/min ratio
    over k is the checkable finite-band property.
    """
    from .measure import discretize

    r = Fraction(r)
    dm = discretize(auto.spec, discretize_depth)
    left, right = essential.left, essential.right
    restricted, straddle = dm.restrict(left, right)
    ratios = {}
    for k in k_range:
        lam = lambda_set(auto, essential, k, r, window_depth)
        phi = lam.phi
        if phi < 1 or lam.esum.hi <= 0:
            continue
        if phi >= restricted.size:
            # codebook as large as the support quantizes exactly; the
            # ratio carries no information at this discretization depth
            continue
        res = optimal_quantizer_1d(restricted, phi, r)
        mid = (lam.esum.lo + lam.esum.hi) / 2
        if mid == 0:
            continue
        ratios[k] = res.err_r / float(mid)
    vals = list(ratios.values())
    # empty ratios means every level was degenerate at this depth; report
    # that rather than fail, so shallow exploratory runs still complete
    spread = None
    if vals:
        spread = (max(vals) / min(vals)) if min(vals) > 0 else math.inf
    return {
        "r": f"{r.numerator}/{r.denominator}",
        "ratios": {str(k): v for k, v in sorted(ratios.items())},
        "max_over_min": spread,
        "straddle_mass": float(straddle),
    }
