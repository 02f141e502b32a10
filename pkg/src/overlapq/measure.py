"""Rational enclosures of the invariant measure and derived constants.

The measure of a subinterval expands through the defining identity
mu(I) = sum_h p_h * mu(f_h^{-1}(I)); windows that shrink to all of [0, 1]
score their exact pulled mass, empty ones score zero, and whatever is
still unresolved at the depth limit scores the trivial [0, mass] range.
Everything is a pair of Fractions, so enclosures nest as depth grows and
comparisons made with them are decisions, not estimates.

Atom lists for the quantizer come from the same recursion run forward:
depth-m cylinders dump their mass at their left endpoint, with equal
positions merged exactly; any point of the support is then within rho^m
of an atom, which is the transport radius quoted alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceeded, SpecValidationError
from .exactfield import FieldElement, format_field, rational_pow_bounds
from .ifs import IfsSpec
from .netauto import Automaton
from .transition import EssentialClass, mass_vector, w_matrix

__all__ = [
    "DerivedConstants",
    "DiscreteMeasure",
    "Enclosure",
    "MeasureEnclosures",
    "derived_constants",
    "discretize",
    "net_measure",
    "window_table",
]

_ZERO = FieldElement.from_rational(0)
_ONE = FieldElement.from_rational(1)
_F0 = Fraction(0)
_F1 = Fraction(1)


@dataclass(frozen=True)
class Enclosure:
    """Certified range for a measure-like value in [0, 1]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not (_F0 <= self.lo <= self.hi <= _F1):
            raise SpecValidationError(f"bad enclosure [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    def intersects(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def within(self, other: "Enclosure") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def describe(self) -> dict:
        return {
            "lo": f"{self.lo.numerator}/{self.lo.denominator}",
            "hi": f"{self.hi.numerator}/{self.hi.denominator}",
            "lo_float": float(self.lo),
            "hi_float": float(self.hi),
        }


class MeasureEnclosures:
    """Memoized window-measure recursion for one system."""

    def __init__(self, spec: IfsSpec):
        self.spec = spec
        self._memo: dict[tuple[FieldElement, FieldElement, int], tuple[Fraction, Fraction]] = {}

    def window(self, lo: FieldElement, hi: FieldElement, depth: int) -> Enclosure:
        lo_f, hi_f = self._window(FieldElement._coerce(lo), FieldElement._coerce(hi), depth)
        return Enclosure(lo_f, hi_f)

    def _window(self, lo, hi, depth) -> tuple[Fraction, Fraction]:
        if lo < _ZERO:
            lo = _ZERO
        if hi > _ONE:
            hi = _ONE
        if not lo < hi:
            return (_F0, _F0)
        if lo == _ZERO and hi == _ONE:
            return (_F1, _F1)
        if depth <= 0:
            return (_F0, _F1)
        key = (lo, hi, depth)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        total_lo = _F0
        total_hi = _F0
        rho = self.spec.rho
        for b, p in zip(self.spec.offsets, self.spec.probs):
            part_lo, part_hi = self._window((lo - b) / rho, (hi - b) / rho, depth - 1)
            total_lo += p * part_lo
            total_hi += p * part_hi
        self._memo[key] = (total_lo, total_hi)
        return (total_lo, total_hi)


def window_table(
    auto: Automaton, depth: int = 16, calc: MeasureEnclosures | None = None
) -> dict[tuple[int, int], Enclosure]:
    """Enclosure of mu([a_i, a_i + ell]) for every type and offset index."""
    calc = calc if calc is not None else MeasureEnclosures(auto.spec)
    table = {}
    for tid, cv in enumerate(auto.types):
        for j, a in enumerate(cv.offsets):
            table[(tid, j)] = calc.window(a, a + cv.ell, depth)
    return table


def net_measure(
    auto: Automaton,
    path,
    table: dict[tuple[int, int], Enclosure],
) -> Enclosure:
    """Enclosure of mu of the net interval addressed by a type path.

    Exact identity: each covering cylinder at offset j contributes its mass
    times the measure of the shared window [a_j, a_j + ell]; cylinders at
    dropped offsets contribute nothing because their window interior misses
    the support and endpoints carry no mass.
    """
    masses = mass_vector(auto, path)
    tid = path[-1]
    lo = _F0
    hi = _F0
    for j, m in enumerate(masses):
        enc = table[(tid, j)]
        lo += m * enc.lo
        hi += m * enc.hi
    return Enclosure(lo, min(hi, _F1))


def _pow_lower(x: FieldElement, e: Fraction, digits: int = 30) -> Fraction:
    """Certified rational lower bound of x**e for x > 0, e >= 0."""
    lo = x.rational_bounds(Fraction(1, 10**digits))[0]
    if lo <= 0:
        return _F0
    return rational_pow_bounds(lo, Fraction(e), digits)[0]


@dataclass(frozen=True)
class DerivedConstants:
    """Shortest essential length, mass-comparison bound, and the threshold base.

    ``c3_lower`` underestimates the true one-step measure contraction: along
    any essential subdivision, mu(child) >= c3_lower * mu(parent).  It feeds
    eta_lower = c3_lower * c2^(2r) * rho^r, the per-level decay base of the
    threshold antichains; everything threshold-related is disabled when it
    degenerates to zero.
    """

    r: Fraction
    c2: FieldElement
    c3_lower: Fraction
    eta_lower: Fraction
    positive: bool

    def describe(self) -> dict:
        return {
            "r": f"{self.r.numerator}/{self.r.denominator}",
            "c2": format_field(self.c2),
            "c3_lower": f"{self.c3_lower.numerator}/{self.c3_lower.denominator}",
            "c3_lower_float": float(self.c3_lower),
            "eta_lower": f"{self.eta_lower.numerator}/{self.eta_lower.denominator}",
            "eta_lower_float": float(self.eta_lower),
            "positive": self.positive,
        }


def derived_constants(
    auto: Automaton,
    essential: EssentialClass,
    table: dict[tuple[int, int], Enclosure],
    r,
) -> DerivedConstants:
    r = Fraction(r)
    if r <= 0:
        raise SpecValidationError(f"moment order must be positive, got {r}")
    c2 = min(auto.types[s].ell for s in essential.states)
    c3 = None
    for alpha in essential.states:
        for slot, child in enumerate(auto.xi[alpha]):
            w = w_matrix(auto, alpha, slot)
            for j, row in enumerate(w):
                parent_hi = table[(alpha, j)].hi
                gained = sum(
                    entry * table[(child, i)].lo for i, entry in enumerate(row)
                )
                ratio = gained / parent_hi
                if c3 is None or ratio < c3:
                    c3 = ratio
    c3 = c3 if c3 is not None else _F0
    eta = c3 * _pow_lower(c2, 2 * r) * _pow_lower(auto.spec.rho, r)
    return DerivedConstants(
        r=r, c2=c2, c3_lower=c3, eta_lower=eta, positive=c3 > 0
    )


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms at depth-m cylinder origins; within rho^m of the full measure."""

    positions: tuple[FieldElement, ...]
    masses: tuple[Fraction, ...]
    depth: int
    radius: FieldElement  # rho^depth, exact

    def __post_init__(self):
        if sum(self.masses) != 1:
            raise SpecValidationError("atom masses must sum to 1")

    @property
    def size(self) -> int:
        return len(self.positions)

    def positions_float(self) -> list[float]:
        return [float(p) for p in self.positions]

    def masses_float(self) -> list[float]:
        return [float(m) for m in self.masses]

    def radius_upper_float(self) -> float:
        hi = self.radius.rational_bounds(Fraction(1, 10**25))[1]
        return float(hi) * (1 + 2e-16)

    def restrict(self, lo: FieldElement, hi: FieldElement):
        """Condition on [lo, hi]: keep atoms whose cylinder fits inside.

        Returns the renormalized measure and the straddling-cylinder mass,
        which bounds how much conditioning error the cut introduces.
        """
        inside_pos: list[FieldElement] = []
        inside_mass: list[Fraction] = []
        straddle = _F0
        for pos, mass in zip(self.positions, self.masses):
            right = pos + self.radius
            if lo <= pos and right <= hi:
                inside_pos.append(pos)
                inside_mass.append(mass)
            elif right > lo and pos < hi:
                straddle += mass
        total = sum(inside_mass)
        if total == 0:
            raise SpecValidationError("no atoms inside the conditioning interval")
        return (
            DiscreteMeasure(
                positions=tuple(inside_pos),
                masses=tuple(m / total for m in inside_mass),
                depth=self.depth,
                radius=self.radius,
            ),
            straddle,
        )


def discretize(spec: IfsSpec, depth: int, atom_cap: int = 600_000) -> DiscreteMeasure:
    """Depth-m cylinder-origin atom list with exact position merging."""
    atoms: dict[FieldElement, Fraction] = {_ZERO: _F1}
    scale = _ONE
    for _ in range(depth):
        nxt: dict[FieldElement, Fraction] = {}
        for pos, mass in atoms.items():
            for b, p in zip(spec.offsets, spec.probs):
                key = pos + scale * b
                prev = nxt.get(key)
                nxt[key] = mass * p if prev is None else prev + mass * p
        if len(nxt) > atom_cap:
            raise CapExceeded(f"{len(nxt)} atoms exceed the cap {atom_cap}")
        atoms = nxt
        scale = scale * spec.rho
    order = sorted(atoms)
    return DiscreteMeasure(
        positions=tuple(order),
        masses=tuple(atoms[p] for p in order),
        depth=depth,
        radius=scale,
    )
