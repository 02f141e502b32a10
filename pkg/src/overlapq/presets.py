"""Named example systems used by the test suite and the command line.

Every preset is exact: ratios and offsets are rational or live in a real
quadratic field, probabilities are rational.  Parametric families take an
integer argument after a colon, e.g. ``lambda-cantor:2``.

Systems quoted in the literature with offsets outside [0, 1 - rho] are
stored in hull-rescaled form; the conjugation changes neither the measure
class nor any of the derived exponents.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import SpecValidationError
from .exactfield import FieldElement
from .ifs import IfsSpec

__all__ = ["PRESET_NAMES", "preset", "preset_names"]

_F = Fraction


def _golden_ratio_reciprocal() -> FieldElement:
    # (-1 + sqrt(5)) / 2, the positive root of x^2 + x - 1
    return FieldElement(_F(-1, 2), _F(1, 2), 5)


def _erdos() -> IfsSpec:
    rho = _golden_ratio_reciprocal()
    one = FieldElement.from_rational(1)
    return IfsSpec(
        rho=rho,
        offsets=(FieldElement.from_rational(0), one - rho),
        probs=(_F(1, 2), _F(1, 2)),
        name="erdos",
    )


def _cantor() -> IfsSpec:
    return IfsSpec(
        rho=_F(1, 3),
        offsets=(_F(0), _F(2, 3)),
        probs=(_F(1, 2), _F(1, 2)),
        name="cantor",
    )


def _lebesgue() -> IfsSpec:
    return IfsSpec(
        rho=_F(1, 2),
        offsets=(_F(0), _F(1, 2)),
        probs=(_F(1, 2), _F(1, 2)),
        name="lebesgue",
    )


def _threefold() -> IfsSpec:
    # three-fold self-convolution of the even Cantor measure, hull-rescaled;
    # offsets 2i/9, binomial weights
    return IfsSpec.rescaled(
        rho=_F(1, 3),
        raw_offsets=(_F(0), _F(2, 3), _F(4, 3), _F(2)),
        probs=(_F(1, 8), _F(3, 8), _F(3, 8), _F(1, 8)),
        name="threefold",
    )


def _counterexample() -> IfsSpec:
    # maps x/3, x/3 + 1/9, x/3 + 2/3; probabilities are uniform by default
    return IfsSpec(
        rho=_F(1, 3),
        offsets=(_F(0), _F(1, 9), _F(2, 3)),
        probs=(_F(1, 3), _F(1, 3), _F(1, 3)),
        name="counterexample",
    )


def _lambda_cantor(m: int) -> IfsSpec:
    if m < 1:
        raise SpecValidationError(f"lambda-cantor index must be >= 1, got {m}")
    lam = 1 - _F(1, 3**m)
    return IfsSpec(
        rho=_F(1, 3),
        offsets=(_F(0), lam / 3, _F(2, 3)),
        probs=(_F(1, 3), _F(1, 3), _F(1, 3)),
        name=f"lambda-cantor:{m}",
    )


def _roychowdhury() -> IfsSpec:
    # x/3, x/3 + 1, x/3 + 3 on the hull [0, 9/2], rescaled; coincides with
    # the lambda-cantor family at parameter 1
    return IfsSpec.rescaled(
        rho=_F(1, 3),
        raw_offsets=(_F(0), _F(1), _F(3)),
        probs=(_F(1, 3), _F(1, 3), _F(1, 3)),
        name="roychowdhury",
    )


_BUILDERS = {
    "erdos": _erdos,
    "cantor": _cantor,
    "lebesgue": _lebesgue,
    "threefold": _threefold,
    "counterexample": _counterexample,
    "roychowdhury": _roychowdhury,
}

PRESET_NAMES = tuple(sorted(_BUILDERS)) + ("lambda-cantor:m",)


def preset_names() -> tuple[str, ...]:
    return PRESET_NAMES


def preset(name: str) -> IfsSpec:
    """Build a preset by name; parametric names carry ``:<int>``."""
    key = name.strip().lower()
    if key.startswith("lambda-cantor:"):
        arg = key.split(":", 1)[1]
        try:
            m = int(arg)
        except ValueError:
            raise SpecValidationError(f"bad lambda-cantor parameter {arg!r}") from None
        return _lambda_cantor(m)
    builder = _BUILDERS.get(key)
    if builder is None:
        known = ", ".join(PRESET_NAMES)
        raise SpecValidationError(f"unknown preset {name!r}; known: {known}")
    return builder()
