from __future__ import annotations

from fractions import Fraction

import pytest

from overlapq import FieldElement, IfsSpec, SpecValidationError, preset
from overlapq.presets import PRESET_NAMES

F = FieldElement.from_rational


def test_all_presets_build():
    for name in PRESET_NAMES:
        if name.endswith(":m"):
            continue
        spec = preset(name)
        assert spec.n_maps >= 2
    assert preset("lambda-cantor:2").n_maps == 3


def test_probs_must_sum_to_one():
    with pytest.raises(SpecValidationError):
        IfsSpec(
            rho=F(Fraction(1, 3)),
            offsets=(F(0), F(Fraction(2, 3))),
            probs=(Fraction(1, 2), Fraction(1, 3)),
        )


def test_ratio_must_be_a_contraction():
    with pytest.raises(SpecValidationError):
        IfsSpec(rho=F(1), offsets=(F(0), F(Fraction(1, 2))), probs=(Fraction(1, 2),) * 2)


def test_offsets_must_be_increasing_from_zero():
    with pytest.raises(SpecValidationError):
        IfsSpec(
            rho=F(Fraction(1, 3)),
            offsets=(F(Fraction(2, 3)), F(0)),
            probs=(Fraction(1, 2),) * 2,
        )


def test_hull_is_unit_interval():
    # last offset must equal 1 - rho so the attractor spans [0, 1]
    with pytest.raises(SpecValidationError):
        IfsSpec(
            rho=F(Fraction(1, 3)),
            offsets=(F(0), F(Fraction(1, 3))),
            probs=(Fraction(1, 2),) * 2,
        )


def test_describe_roundtrip():
    for name in ("cantor", "erdos", "lambda-cantor:1"):
        spec = preset(name)
        again = IfsSpec.from_description(spec.describe())
        assert again.rho == spec.rho
        assert again.offsets == spec.offsets
        assert again.probs == spec.probs


def test_from_description_rejects_malformed_numbers():
    good = preset("cantor").describe()
    bad = dict(good, rho="one third")
    with pytest.raises(SpecValidationError):
        IfsSpec.from_description(bad)
    with pytest.raises(SpecValidationError):
        IfsSpec.from_description({k: v for k, v in good.items() if k != "probs"})


def test_separation_classification():
    assert preset("cantor").open_set_separated()
    assert preset("lebesgue").open_set_separated()
    assert not preset("erdos").open_set_separated()
    assert not preset("counterexample").open_set_separated()


def test_finite_type_saturates_on_presets():
    for name in ("cantor", "counterexample", "erdos", "threefold"):
        rep = preset(name).finite_type_report()
        assert rep.saturated
        assert rep.cardinality >= 1


def test_counterexample_cylinders():
    spec = preset("counterexample")
    lo = spec.cylinder_left((1,))
    assert lo == F(Fraction(1, 9))
    assert lo + spec.cylinder_length(1) == F(Fraction(4, 9))
    lo = spec.cylinder_left((0, 1))
    assert lo == F(Fraction(1, 27))
    assert lo + spec.cylinder_length(2) == F(Fraction(4, 27))
