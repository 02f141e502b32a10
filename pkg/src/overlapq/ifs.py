"""Equi-contractive iterated function systems on [0, 1].

A system is a list of maps x -> rho*x + b_i with one shared ratio rho and
exact offsets 0 = b_1 < ... < b_N = 1 - rho, together with a probability
vector.  The attractor then has convex hull [0, 1] and both endpoints are
fixed points, which the net-interval machinery relies on throughout.

The finite-type probe enumerates, per depth n, the distinct left endpoints
of depth-n cylinders and collects every rescaled gap rho^{-n}|x - y| that
is at most 1.  Two consecutive equal gap sets count as saturation; that is
strong evidence of finite type, not a proof, and the report says which.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapExceeded, SpecValidationError
from .exactfield import FieldElement, format_field, parse_field

__all__ = ["IfsSpec", "FiniteTypeReport"]

_FT_POINT_CAP = 120_000


@dataclass(frozen=True)
class IfsSpec:
    """Validated equi-contractive IFS with selection probabilities."""

    rho: FieldElement
    offsets: tuple[FieldElement, ...]
    probs: tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        rho = FieldElement._coerce(self.rho)
        offsets = tuple(FieldElement._coerce(b) for b in self.offsets)
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "probs", probs)
        self._validate()

    def _validate(self) -> None:
        rho, offsets, probs = self.rho, self.offsets, self.probs
        if not (0 < rho and rho < 1):
            raise SpecValidationError(f"contraction ratio must lie in (0, 1), got {rho}")
        if len(offsets) < 2:
            raise SpecValidationError("need at least two maps")
        if len(probs) != len(offsets):
            raise SpecValidationError(
                f"{len(offsets)} maps but {len(probs)} probabilities"
            )
        if offsets[0] != 0:
            raise SpecValidationError(f"first offset must be 0, got {offsets[0]}")
        one = FieldElement.from_rational(1)
        if offsets[-1] != one - rho:
            raise SpecValidationError(
                f"last offset must be 1 - rho = {one - rho}, got {offsets[-1]}"
            )
        for i in range(len(offsets) - 1):
            if not offsets[i] < offsets[i + 1]:
                raise SpecValidationError(
                    f"offsets must be strictly increasing, violated at index {i}"
                )
        for p in probs:
            if p <= 0:
                raise SpecValidationError(f"probabilities must be positive, got {p}")
        if sum(probs) != 1:
            raise SpecValidationError(f"probabilities sum to {sum(probs)}, not 1")

    @classmethod
    def rescaled(cls, rho, raw_offsets, probs, name: str = "") -> "IfsSpec":
        """Conjugate arbitrary increasing offsets onto the [0, 1] hull.

        The attractor of x -> rho*x + c_i spans [min c/(1-rho), max c/(1-rho)];
        the affine change of variable sending that hull to [0, 1] preserves
        the ratio and moves the offsets into the normalized range.
        """
        rho = FieldElement._coerce(rho)
        raw = [FieldElement._coerce(c) for c in raw_offsets]
        span = raw[-1] - raw[0]
        if not span > 0:
            raise SpecValidationError("offsets must span a nondegenerate hull")
        return cls(
            rho=rho,
            offsets=tuple((c - raw[0]) * (FieldElement.from_rational(1) - rho) / span for c in raw),
            probs=tuple(probs),
            name=name,
        )

    # -- basic geometry -----------------------------------------------

    @property
    def n_maps(self) -> int:
        return len(self.offsets)

    def apply(self, i: int, x: FieldElement) -> FieldElement:
        return self.rho * x + self.offsets[i]

    def cylinder_left(self, word: tuple[int, ...]) -> FieldElement:
        """Left endpoint of the cylinder indexed by ``word`` (image of 0)."""
        x = FieldElement.from_rational(0)
        for i in reversed(word):
            x = self.apply(i, x)
        return x

    def cylinder_length(self, depth: int) -> FieldElement:
        return self.rho**depth

    def open_set_separated(self) -> bool:
        """True when consecutive first-level images have disjoint interiors.

        With hull [0, 1] this is exactly the open set condition with the
        unit interval as the open set, decided without rounding.
        """
        for i in range(self.n_maps - 1):
            if self.offsets[i + 1] - self.offsets[i] < self.rho:
                return False
        return True

    # -- finite type probe --------------------------------------------

    def finite_type_report(
        self, depth_cap: int = 12, point_cap: int = _FT_POINT_CAP
    ) -> "FiniteTypeReport":
        zero = FieldElement.from_rational(0)
        points: set[FieldElement] = {zero}
        length = FieldElement.from_rational(1)
        gamma_by_depth: list[frozenset[FieldElement]] = [frozenset({zero})]
        for depth in range(1, depth_cap + 1):
            points = {p + length * b for p in points for b in self.offsets}
            length = length * self.rho
            if len(points) > point_cap:
                raise CapExceeded(
                    f"FTC not confirmed: {len(points)} cylinder endpoints at "
                    f"depth {depth} exceed the cap {point_cap} before saturation"
                )
            ordered = sorted(points)
            gaps: set[FieldElement] = {zero}
            j = 0
            for i in range(len(ordered)):
                if j < i + 1:
                    j = i + 1
                while j < len(ordered) and ordered[j] - ordered[i] <= length:
                    j += 1
                for k in range(i + 1, j):
                    gaps.add((ordered[k] - ordered[i]) / length)
            gamma_by_depth.append(frozenset(gaps))
            if gamma_by_depth[-1] == gamma_by_depth[-2]:
                return FiniteTypeReport(True, depth, tuple(gamma_by_depth))
        return FiniteTypeReport(False, depth_cap, tuple(gamma_by_depth))

    # -- description --------------------------------------------------

    def describe(self) -> dict:
        return {
            "name": self.name,
            "rho": format_field(self.rho),
            "offsets": [format_field(b) for b in self.offsets],
            "probs": [f"{p.numerator}/{p.denominator}" for p in self.probs],
        }

    @classmethod
    def from_description(cls, data: dict) -> "IfsSpec":
        try:
            rho = parse_field(str(data["rho"]))
            offsets = tuple(parse_field(str(b)) for b in data["offsets"])
            probs = tuple(Fraction(str(p)) for p in data["probs"])
        except KeyError as exc:
            raise SpecValidationError(f"missing field {exc.args[0]!r}") from exc
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, SpecValidationError):
                raise
            raise SpecValidationError(f"bad exact-number literal: {exc}") from exc
        return cls(rho=rho, offsets=offsets, probs=probs, name=str(data.get("name", "")))


@dataclass(frozen=True)
class FiniteTypeReport:
    """Outcome of the rescaled-gap saturation probe."""

    saturated: bool
    depth: int
    gamma_by_depth: tuple[frozenset[FieldElement], ...] = field(repr=False)

    @property
    def gamma(self) -> frozenset[FieldElement]:
        return self.gamma_by_depth[-1]

    @property
    def cardinality(self) -> int:
        return len(self.gamma)

    def gamma_sorted(self) -> list[FieldElement]:
        return sorted(self.gamma)
