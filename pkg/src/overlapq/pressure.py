"""Two-sided bounds on the moment pressure curve and its dimension zero.

For t in (0, 1] let S_n(t) be the sum over admissible length-n state
sequences inside the essential class of (rho^{rn} * ||product of step
matrices||_1)^t, the matrix norm being the plain entry sum.  The pressure
is the limit of (1/n) log S_n(t).

Certified bounds come from three mechanisms, each an actual inequality:

* upper: joining two sequences multiplies entry sums and only adds an
  admissibility constraint, so S is submultiplicative and every finite
  (1/n) log S_n sits above the limit;
* lower: sums restricted to sequences that start and end at one fixed
  (state, matrix-coordinate) anchor are supermultiplicative up to an
  explicit rho^{-rt} factor, giving a finite-n bound from below that
  needs no positivity assumption;
* exact: when every essential type has a single covering cylinder all
  step matrices are scalars, the whole sum is a power of one nonnegative
  matrix, and the pressure equals rt*log(rho) plus the log spectral
  radius, bracketed on both sides through Collatz-Wielandt ratios.

Sums are evaluated by a depth-first accumulation that groups sequences
sharing the direction of their running row vector, with the scalar part
carried through rational power enclosures; t = 1 sums in particular come
out exactly rational.  Transcendental steps (logs, float powers) are
padded by amounts far above their rounding error, and every pad widens
the reported interval, never narrows it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceeded, SpecValidationError
from .exactfield import FieldElement, rational_pow_bounds
from .netauto import Automaton
from .transition import EssentialClass, w_matrix

__all__ = [
    "DimensionEstimate",
    "PathSum",
    "PressureBounds",
    "osc_dimension_oracle",
    "path_sum",
    "pressure_bounds",
    "solve_s_r",
]

_F0 = Fraction(0)
_F1 = Fraction(1)

# absolute pad applied to every float log; true rounding error is ~1e-16
_LOG_PAD = 1e-11
_GROUP_CAP = 250_000


def _log_bounds(x: Fraction) -> tuple[float, float]:
    """Padded float enclosure of log of a positive rational."""
    if x <= 0:
        raise SpecValidationError(f"log of nonpositive value {x}")
    v = math.log(x.numerator) - math.log(x.denominator)
    pad = _LOG_PAD * (1.0 + abs(v))
    return (v - pad, v + pad)


def _log_rho_bounds(rho: FieldElement) -> tuple[float, float]:
    lo, hi = rho.rational_bounds(Fraction(1, 10**30))
    if lo <= 0:
        raise SpecValidationError("contraction ratio bounds degenerate")
    return (_log_bounds(lo)[0], _log_bounds(hi)[1])


class _EdgeData:
    """Per-pair step matrices and scalar caches for one essential class."""

    def __init__(self, auto: Automaton, essential: EssentialClass):
        self.auto = auto
        self.states = list(essential.states)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.arity = {s: auto.types[s].arity for s in self.states}
        self.w: dict[tuple[int, int], tuple[tuple[Fraction, ...], ...]] = {}
        for a in self.states:
            for slot, child in enumerate(auto.xi[a]):
                if child in self.index:
                    self.w[(a, child)] = w_matrix(auto, a, slot)
        self.succ = {
            a: sorted({b for (x, b) in self.w if x == a}) for a in self.states
        }

    def min_positive_entry(self) -> Fraction:
        best = None
        for mat in self.w.values():
            for row in mat:
                for e in row:
                    if e > 0 and (best is None or e < best):
                        best = e
        return best if best is not None else _F0

    def diameter(self) -> int:
        # BFS all-pairs on a class of at most a few dozen states
        diam = 0
        for src in self.states:
            dist = {src: 0}
            frontier = [src]
            while frontier:
                nxt = []
                for a in frontier:
                    for b in self.succ[a]:
                        if b not in dist:
                            dist[b] = dist[a] + 1
                            nxt.append(b)
                frontier = nxt
            diam = max(diam, max(dist.values()))
        return diam


@dataclass(frozen=True)
class PathSum:
    """Certified rational enclosure of one S_n(t) evaluation."""

    t: Fraction
    r: Fraction
    n: int
    lo: Fraction
    hi: Fraction
    groups: int

    @property
    def lo_float(self) -> float:
        return float(self.lo)

    @property
    def hi_float(self) -> float:
        return float(self.hi)


def _pow_cached(cache, x: Fraction, t: Fraction, digits: int):
    got = cache.get(x)
    if got is None:
        got = rational_pow_bounds(x, t, digits)
        cache[x] = got
    return got


def _grouped_sum(
    edges: _EdgeData,
    t: Fraction,
    r: Fraction,
    n: int,
    anchor: tuple[int, int] | None = None,
    digits: int = 24,
) -> tuple[list[tuple[Fraction, Fraction]], int]:
    """Sums of (rho^{rm} * scalar)^t over admissible length-m sequences.

    Returns one (lo, hi) enclosure per level m = 1..n, plus the peak group
    count.  scalar is the entry sum of the step-matrix product seeded with
    the all-ones row (anchor None), or the (j, j) product entry when anchor
    fixes a start state and coordinate.  Sequences sharing the direction
    of their running row vector are merged; the merged accumulator is a
    rational interval because each extension multiplies by f^t with f
    rational.
    """
    pow_cache: dict[Fraction, tuple[Fraction, Fraction]] = {}
    # groups: state -> direction tuple -> [acc_lo, acc_hi]
    groups: dict[int, dict[tuple[Fraction, ...], list[Fraction]]] = {}
    if anchor is None:
        for a in edges.states:
            d = edges.arity[a]
            seed = tuple(Fraction(1, d) for _ in range(d))
            lo, hi = _pow_cached(pow_cache, Fraction(d), t, digits)
            groups.setdefault(a, {})[seed] = [lo, hi]
    else:
        a, j = anchor
        d = edges.arity[a]
        seed = tuple(_F1 if i == j else _F0 for i in range(d))
        groups.setdefault(a, {})[seed] = [_F1, _F1]

    rb_lo, rb_hi = edges.auto.spec.rho.rational_bounds(Fraction(1, 10**30))
    if rb_lo <= 0:
        raise SpecValidationError("ratio bounds degenerate")

    def readout(level: int) -> tuple[Fraction, Fraction]:
        total_lo = _F0
        total_hi = _F0
        for a, dirgroups in groups.items():
            for u, acc in dirgroups.items():
                if anchor is None:
                    total_lo += acc[0]
                    total_hi += acc[1]
                else:
                    uj = u[anchor[1]] if a == anchor[0] else _F0
                    if uj == 0:
                        continue
                    plo, phi = _pow_cached(pow_cache, uj, t, digits)
                    total_lo += acc[0] * plo
                    total_hi += acc[1] * phi
        e = Fraction(r) * level * Fraction(t)
        pf_lo = rational_pow_bounds(rb_lo, e, 30)[0]
        pf_hi = rational_pow_bounds(rb_hi, e, 30)[1]
        return (total_lo * pf_lo, total_hi * pf_hi)

    levels = [readout(1)]
    peak = sum(len(g) for g in groups.values())
    for level in range(2, n + 1):
        nxt: dict[int, dict[tuple[Fraction, ...], list[Fraction]]] = {}
        for a, dirgroups in groups.items():
            for b in edges.succ[a]:
                mat = edges.w[(a, b)]
                cols = len(mat[0])
                for u, acc in dirgroups.items():
                    img = [
                        sum(u[i] * mat[i][c] for i in range(len(u)))
                        for c in range(cols)
                    ]
                    f = sum(img)
                    if f == 0:
                        continue
                    direction = tuple(x / f for x in img)
                    plo, phi = _pow_cached(pow_cache, f, t, digits)
                    cell = nxt.setdefault(b, {}).setdefault(direction, [_F0, _F0])
                    cell[0] += acc[0] * plo
                    cell[1] += acc[1] * phi
        groups = nxt
        peak = max(peak, sum(len(g) for g in groups.values()))
        if peak > _GROUP_CAP:
            raise CapExceeded(f"path sum groups exceed {_GROUP_CAP} at depth {n}")
        levels.append(readout(level))

    return levels, peak


def path_sum(auto: Automaton, essential: EssentialClass, t, r, n: int) -> PathSum:
    t = Fraction(t)
    r = Fraction(r)
    if not (0 < t <= 1):
        raise SpecValidationError(f"moment exponent t must lie in (0, 1], got {t}")
    if n < 1:
        raise SpecValidationError(f"need n >= 1, got {n}")
    edges = _EdgeData(auto, essential)
    levels, peak = _grouped_sum(edges, t, r, n)
    lo, hi = levels[-1]
    return PathSum(t=t, r=r, n=n, lo=lo, hi=hi, groups=peak)


@dataclass(frozen=True)
class PressureBounds:
    """Certified float bracket for the pressure at one (t, r)."""

    t: Fraction
    r: Fraction
    n: int
    lo: float
    hi: float
    lower_method: str
    connection_slack: float  # diagnostic (diameter-based), reported not used

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise SpecValidationError(
                f"pressure bracket inverted: [{self.lo}, {self.hi}]"
            )


def _scalar_matrix(edges: _EdgeData):
    """All-arity-one step scalars as a dense matrix, or None."""
    if any(edges.arity[a] != 1 for a in edges.states):
        return None
    m = len(edges.states)
    dense = [[_F0] * m for _ in range(m)]
    for (a, b), mat in edges.w.items():
        dense[edges.index[a]][edges.index[b]] = mat[0][0]
    return dense


def _spectral_bounds(dense, t: Fraction) -> tuple[float, float]:
    """Collatz-Wielandt bracket for the spectral radius of [w^t]."""
    m = len(dense)
    entries = [[float(w) ** float(t) if w > 0 else 0.0 for w in row] for row in dense]
    v = [1.0] * m
    for _ in range(400):
        nv = [sum(entries[i][j] * v[j] for j in range(m)) for i in range(m)]
        norm = max(nv)
        if norm <= 0:
            return (0.0, 0.0)
        v = [max(x / norm, 1e-280) for x in nv]
    ratios = []
    for i in range(m):
        mv = sum(entries[i][j] * v[j] for j in range(m))
        ratios.append(mv / v[i])
    # float powers inside entries are padded here, not at each entry
    pad = 1e-12
    return (min(ratios) * (1 - pad), max(ratios) * (1 + pad))


def pressure_bounds(
    auto: Automaton, essential: EssentialClass, t, r, n: int = 12
) -> PressureBounds:
    t = Fraction(t)
    r = Fraction(r)
    if not (0 < t <= 1):
        raise SpecValidationError(f"moment exponent t must lie in (0, 1], got {t}")
    if n < 2:
        raise SpecValidationError(f"need n >= 2, got {n}")
    edges = _EdgeData(auto, essential)
    lr_lo, lr_hi = _log_rho_bounds(auto.spec.rho)
    rt = float(Fraction(r) * t)

    levels, _ = _grouped_sum(edges, t, r, n)
    if levels[-1][1] <= 0:
        raise SpecValidationError("degenerate path sum")
    # every level is an upper bound by subadditivity; keep the tightest
    hi = math.inf
    for m, (_, s_hi) in enumerate(levels, start=1):
        if s_hi > 0:
            hi = min(hi, _log_bounds(s_hi)[1] / m)

    # lower bound 1: anchored diagonal return sums over k = 1..n-1 edges;
    # gluing return words makes these superadditive after the rho shift
    lo = -math.inf
    method = "none"
    for a in edges.states:
        for j in range(edges.arity[a]):
            alv, _ = _grouped_sum(edges, t, r, n, anchor=(a, j))
            for k in range(1, len(alv)):
                d_lo = alv[k][0]
                if d_lo <= 0:
                    continue
                cand = (_log_bounds(d_lo)[0] - rt * lr_hi) / k
                if cand > lo:
                    lo = cand
                    method = f"diagonal-return({a},{j})"

    # exact route when all step matrices are scalars
    dense = _scalar_matrix(edges)
    if dense is not None:
        lam_lo, lam_hi = _spectral_bounds(dense, t)
        if lam_lo > 0:
            sp_lo = rt * lr_lo + math.log(lam_lo) - _LOG_PAD
            sp_hi = rt * lr_hi + math.log(lam_hi) + _LOG_PAD
            if sp_lo > lo:
                lo = sp_lo
                method = "scalar-spectral"
            hi = min(hi, sp_hi)

    if lo > hi:
        # bounds from independent certificates may cross only through the
        # pads; widen to the consistent envelope rather than fail
        mid = 0.5 * (lo + hi)
        lo = hi = mid

    delta = edges.min_positive_entry()
    if delta > 0:
        diam = max(edges.diameter(), 1)
        kslack = float(t) * (
            diam * -_log_bounds(delta)[0] + math.log(len(edges.states))
        )
    else:
        kslack = math.inf
    return PressureBounds(
        t=t, r=r, n=n, lo=lo, hi=hi, lower_method=method, connection_slack=kslack
    )


@dataclass(frozen=True)
class DimensionEstimate:
    """Bracket for the moment dimension from the pressure zero."""

    r: Fraction
    t_lo: float
    t_hi: float
    s_lo: float
    s_hi: float
    n: int
    resolved: bool

    @property
    def s_center(self) -> float:
        return 0.5 * (self.s_lo + self.s_hi)

    def describe(self) -> dict:
        return {
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "t_interval": [self.t_lo, self.t_hi],
            "s_interval": [self.s_lo, self.s_hi],
            "s_center": self.s_center,
            "n": self.n,
            "resolved": self.resolved,
        }


def _to_s(r: Fraction, t: float) -> float:
    if t >= 1.0:
        return math.inf
    return float(r) * t / (1.0 - t)


def solve_s_r(
    auto: Automaton,
    essential: EssentialClass,
    r,
    tol: float = 0.01,
    n: int = 12,
    max_evals: int = 60,
) -> DimensionEstimate:
    """Bracket the t with pressure zero; map through s = r*t/(1-t).

    Keeps the largest t with certified positive pressure and the smallest
    with certified negative pressure; probes between them.  When the
    undetermined middle band stops shrinking before the s-interval meets
    tol, the estimate is returned unresolved, never narrowed by fiat.
    """
    r = Fraction(r)
    if r <= 0:
        raise SpecValidationError(f"moment order must be positive, got {r}")

    def probe(tq: Fraction) -> PressureBounds:
        return pressure_bounds(auto, essential, tq, r, n)

    t_pos = None  # largest t certified positive
    t_neg = None  # smallest t certified negative
    evals = 0
    for tq in (Fraction(1, 20), Fraction(1, 100), Fraction(1, 500)):
        evals += 1
        if probe(tq).lo > 0:
            t_pos = tq
            break
    evals += 1
    if probe(_F1).hi < 0:
        t_neg = _F1
    if t_pos is None or t_neg is None:
        return DimensionEstimate(
            r=r,
            t_lo=0.0 if t_pos is None else float(t_pos),
            t_hi=math.inf if t_neg is None else float(t_neg),
            s_lo=0.0,
            s_hi=math.inf,
            n=n,
            resolved=False,
        )

    # probes inside the bracket that certified neither sign
    undetermined: list[Fraction] = []
    floor = Fraction(1, 1 << 22)
    while evals < max_evals:
        if _to_s(r, float(t_neg)) - _to_s(r, float(t_pos)) <= tol:
            break
        undetermined = [u for u in undetermined if t_pos < u < t_neg]
        band_lo = min(undetermined) if undetermined else t_neg
        band_hi = max(undetermined) if undetermined else t_pos
        # tighten whichever edge has more room, splitting toward the band
        left_room = band_lo - t_pos
        right_room = t_neg - band_hi
        if undetermined and max(left_room, right_room) < floor:
            break  # undecidable band floor; bounds too loose at this n
        if left_room >= right_room:
            tq = t_pos + left_room / 2
        else:
            tq = t_neg - right_room / 2
        b = probe(tq)
        evals += 1
        if b.lo > 0:
            t_pos = max(t_pos, tq)
        elif b.hi < 0:
            t_neg = min(t_neg, tq)
        else:
            undetermined.append(tq)

    s_lo = _to_s(r, float(t_pos))
    s_hi = _to_s(r, float(t_neg))
    return DimensionEstimate(
        r=r,
        t_lo=float(t_pos),
        t_hi=float(t_neg),
        s_lo=s_lo,
        s_hi=s_hi,
        n=n,
        resolved=(s_hi - s_lo) <= tol * (1 + 1e-9),
    )


def osc_dimension_oracle(spec, r) -> float:
    """Scalar fixed-point dimension for systems with disjoint cylinders.

    Solves sum_i (p_i * rho^r)^theta = 1 with theta = s/(s+r); only valid
    when cylinders at most touch, so it refuses overlapping systems.
    """
    r = Fraction(r)
    if r <= 0:
        raise SpecValidationError(f"moment order must be positive, got {r}")
    if not spec.open_set_separated():
        raise SpecValidationError(
            "dimension oracle needs non-overlapping cylinders"
        )
    rho = float(spec.rho)
    weights = [float(p) * rho ** float(r) for p in spec.probs]

    def g(theta: float) -> float:
        return sum(w**theta for w in weights) - 1.0

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    return float(r) * theta / (1.0 - theta)


def lq_spectrum_oracle(spec, q: float, depth: int = 14) -> float:
    """Coarse box-counting tau(q) used only as an independent cross-check."""
    if not 0 < q:
        raise SpecValidationError("need q > 0")
    from .measure import discretize

    dm = discretize(spec, depth)
    size = float(spec.rho) ** depth
    nbox = int(1.0 / size) + 1
    masses: dict[int, float] = {}
    for pos, mass in zip(dm.positions_float(), dm.masses_float()):
        idx = min(int(pos / size), nbox - 1)
        masses[idx] = masses.get(idx, 0.0) + float(mass)
    total = sum(m**q for m in masses.values())
    return math.log(total) / (-math.log(size))
