"""Exact arithmetic in Q and in real quadratic fields Q(sqrt(d)).

Every geometric quantity in this package (contraction ratio, translation
offsets, net-interval endpoints) lives in a single field Q(sqrt(d)) with
d >= 0 square-free; d = 0 means plain rationals.  Elements are immutable
and hashable so they can serve as memo keys.

Sign determination never touches floats: for a + b*sqrt(d) with a, b of
opposite sign the comparison reduces to a^2 vs b^2*d in integers.
Floating-point output is produced only through :meth:`FieldElement.to_float`,
which returns a certified absolute error bound alongside the value.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "FieldElement",
    "FieldParseError",
    "MixedFieldError",
    "format_field",
    "parse_field",
    "rational_pow_bounds",
    "sqrt_bounds",
]


class MixedFieldError(ValueError):
    """Elements of two distinct quadratic fields met in one operation."""


class FieldParseError(ValueError):
    """Malformed exact-number literal."""


_SQUARE_FREE_OK: set[int] = set()


def _check_square_free(d: int) -> None:
    if d in _SQUARE_FREE_OK:
        return
    if d < 0:
        raise FieldParseError(f"radicand must be non-negative, got {d}")
    if d == 1:
        raise FieldParseError("radicand 1 is not allowed; the element is rational")
    p = 2
    while p * p <= d:
        if d % (p * p) == 0:
            raise FieldParseError(f"radicand {d} is not square-free")
        p += 1
    _SQUARE_FREE_OK.add(d)


def sqrt_bounds(d: int, digits: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of sqrt(d) with width 10**-digits."""
    scale = 10**digits
    n = math.isqrt(d * scale * scale)
    return Fraction(n, scale), Fraction(n + 1, scale)


def _integer_nth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1, in exact integer arithmetic."""
    if n < 0:
        raise ValueError("negative radicand")
    if n in (0, 1) or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def _nth_root_bounds(lo: Fraction, hi: Fraction, k: int, digits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of the k-th root of [lo, hi], 0 <= lo <= hi."""
    scale = 10**digits
    num = lo.numerator * scale**k // lo.denominator
    root_lo = Fraction(_integer_nth_root(num, k), scale)
    num = hi.numerator * scale**k // hi.denominator
    # +2 absorbs both the floor above and the floor inside the root
    root_hi = Fraction(_integer_nth_root(num, k) + 2, scale)
    return root_lo, root_hi


_LN2 = math.log(2.0)


def _float_pow_bounds(x: Fraction, e: Fraction) -> tuple[Fraction, Fraction]:
    """Fallback enclosure of x**e via log/exp with a generous symmetric pad.

    The pad (1e-11 relative, grown with the magnitude of e*log x) exceeds
    worst-case double rounding by several orders of magnitude.
    """
    v = (math.log(x.numerator) - math.log(x.denominator)) * float(e)
    k = math.floor(v / _LN2)
    mid = Fraction(2) ** k * Fraction(math.exp(v - k * _LN2))
    pad = Fraction(1e-11 * (1.0 + abs(v)))
    return mid / (1 + pad), mid * (1 + pad)


def rational_pow_bounds(x: Fraction, e: Fraction, digits: int = 30) -> tuple[Fraction, Fraction]:
    """Certified rational enclosure of x**e for x > 0 and rational e.

    Dyadic exponent denominators are handled by iterated square roots; odd
    root orders go through an exact integer Newton iteration.  Exponents
    whose numerator would force a huge integer power fall back to a padded
    float evaluation (bisection midpoints have denominators like 2**22, and
    their numerators make x**p cost minutes in exact arithmetic).
    """
    x = Fraction(x)
    e = Fraction(e)
    if x <= 0:
        raise ValueError("base must be positive")
    if e == 0:
        return Fraction(1), Fraction(1)
    if e < 0:
        lo, hi = rational_pow_bounds(x, -e, digits)
        return 1 / hi, 1 / lo
    p, q = e.numerator, e.denominator
    q_odd = q
    while q_odd % 2 == 0:
        q_odd //= 2
    xbits = x.numerator.bit_length() + x.denominator.bit_length()
    # second guard: the fixed-point root chain floors values below
    # 10**(-2*digits) to zero, so extreme magnitudes must not enter it
    magbits = abs(x.numerator.bit_length() - x.denominator.bit_length()) + 1
    if q_odd > 64 or p * xbits > 200_000 or (q > 1 and p * magbits > 120):
        return _float_pow_bounds(x, e)
    y = x**p
    if q == 1:
        return y, y
    m = 0
    while q % 2 == 0:
        q //= 2
        m += 1
    lo = hi = y
    if q > 1:
        lo, hi = _nth_root_bounds(lo, hi, q, digits)
    for _ in range(m):
        lo, hi = _nth_root_bounds(lo, hi, 2, digits)
    return lo, hi


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldParseError(f"bad rational literal {value!r}") from exc
    raise TypeError(f"cannot coerce {type(value).__name__} to an exact rational")


@dataclass(frozen=True, slots=True, eq=False)
class FieldElement:
    """a + b*sqrt(d) with rational a, b.  Canonical form: b == 0 implies d == 0."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        a = _as_fraction(self.a)
        b = _as_fraction(self.b)
        d = int(self.d)
        if b == 0:
            d = 0
        if d != 0:
            _check_square_free(d)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, value) -> "FieldElement":
        return cls(_as_fraction(value), Fraction(0), 0)

    @classmethod
    def radical(cls, a, b, d: int) -> "FieldElement":
        return cls(_as_fraction(a), _as_fraction(b), d)

    # -- field bookkeeping --------------------------------------------

    def _join(self, other: "FieldElement") -> int:
        if self.d == 0:
            return other.d
        if other.d == 0 or other.d == self.d:
            return self.d
        raise MixedFieldError(f"cannot combine sqrt({self.d}) with sqrt({other.d})")

    @staticmethod
    def _coerce(value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        return FieldElement.from_rational(value)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def as_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        d = self._join(other)
        return FieldElement(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        d = self._join(other)
        a = self.a * other.a + self.b * other.b * d
        b = self.a * other.b + self.b * other.a
        return FieldElement(a, b, d)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.a == 0 and self.b == 0:
            raise ZeroDivisionError("division by zero field element")
        norm = self.a * self.a - self.b * self.b * self.d
        if norm == 0:
            raise ArithmeticError("square-free invariant violated")
        return FieldElement(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer powers stay inside the field")
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = FieldElement.from_rational(1)
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        # rational elements hash like their Fraction value
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        sa = 1 if a > 0 else -1
        sb = 1 if b > 0 else -1
        if sa == sb:
            return sa
        lhs = a * a
        rhs = b * b * self.d
        if lhs == rhs:
            raise ArithmeticError("square-free invariant violated")
        return sa if lhs > rhs else sb

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __lt__(self, other):
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other):
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other):
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other):
        return (self - self._coerce(other)).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- numeric output -----------------------------------------------

    def rational_bounds(self, eps: Fraction) -> tuple[Fraction, Fraction]:
        """Rational enclosure [lo, hi] with hi - lo <= eps (exact for rationals)."""
        if self.b == 0:
            return self.a, self.a
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        ratio = abs(self.b) / eps
        digits = 1
        while 10**digits < 2 * ratio:
            digits += 1
        s_lo, s_hi = sqrt_bounds(self.d, digits)
        if self.b > 0:
            return self.a + self.b * s_lo, self.a + self.b * s_hi
        return self.a + self.b * s_hi, self.a + self.b * s_lo

    def to_float(self, error_budget=Fraction(1, 10**12)) -> tuple[float, float]:
        """(value, bound) with |value - exact| <= bound <= error_budget."""
        budget = Fraction(error_budget)
        if budget <= 0:
            raise ValueError("error budget must be positive")
        eps = budget / 4
        for _ in range(4):
            lo, hi = self.rational_bounds(eps)
            mid = (lo + hi) / 2
            value = float(mid)
            drift = abs(Fraction(value) - mid)
            bound = (hi - lo) / 2 + drift
            if bound <= budget:
                return value, float(bound) if bound else 0.0
            eps /= 64
        raise ValueError(f"cannot meet error budget {budget} for {self}")

    def __float__(self) -> float:
        lo, hi = self.rational_bounds(Fraction(1, 10**19))
        return float((lo + hi) / 2)

    def __str__(self) -> str:
        return format_field(self)

    def __repr__(self) -> str:
        return f"FieldElement({format_field(self)!r})"


def format_field(x: FieldElement) -> str:
    """Canonical literal: "p/q" for rationals, "(A+B*sqrt(d))/s" otherwise."""
    if x.b == 0:
        if x.a.denominator == 1:
            return str(x.a.numerator)
        return f"{x.a.numerator}/{x.a.denominator}"
    s = math.lcm(x.a.denominator, x.b.denominator)
    big_a = x.a.numerator * (s // x.a.denominator)
    big_b = x.b.numerator * (s // x.b.denominator)
    return f"({big_a}{big_b:+d}*sqrt({x.d}))/{s}"


_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/[1-9]\d*)?$")
_RADICAL_RE = re.compile(
    r"^\(\s*(?P<a>[+-]?\d+)\s*(?P<sign>[+-])\s*(?P<b>\d+)\s*\*\s*"
    r"sqrt\(\s*(?P<d>\d+)\s*\)\s*\)\s*/\s*(?P<s>[1-9]\d*)$"
)


def parse_field(text: str, expect_d: int | None = None) -> FieldElement:
    """Parse the canonical grammar accepted by :func:`format_field`."""
    text = text.strip()
    if _RATIONAL_RE.match(text):
        element = FieldElement.from_rational(Fraction(text))
    else:
        match = _RADICAL_RE.match(text)
        if not match:
            raise FieldParseError(f"cannot parse exact literal {text!r}")
        s = int(match["s"])
        a = Fraction(int(match["a"]), s)
        b_num = int(match["b"])
        if match["sign"] == "-":
            b_num = -b_num
        element = FieldElement(a, Fraction(b_num, s), int(match["d"]))
    if expect_d is not None and element.d not in (0, expect_d):
        raise FieldParseError(f"literal {text!r} lies in sqrt({element.d}), expected sqrt({expect_d})")
    return element
