"""Exact net-interval automata, moment dimensions, and quantization bands
for equicontractive self-similar measures on the line."""

from .errors import (
    CapExceeded,
    OracleMismatch,
    SpecValidationError,
    StructureError,
)
from .exactfield import FieldElement, format_field, parse_field, rational_pow_bounds
from .ifs import IfsSpec
from .measure import (
    DerivedConstants,
    DiscreteMeasure,
    Enclosure,
    MeasureEnclosures,
    derived_constants,
    discretize,
    net_measure,
    window_table,
)
from .netauto import Automaton, build_automaton, net_intervals_brute
from .presets import PRESET_NAMES, preset
from .pressure import (
    DimensionEstimate,
    PathSum,
    PressureBounds,
    osc_dimension_oracle,
    path_sum,
    pressure_bounds,
    solve_s_r,
)
from .quantizer import (
    CoefficientBand,
    QuantizerResult,
    brute_force_quantizer,
    coefficient_band,
    error_curve_discrete,
    lambda_set,
    optimal_quantizer_1d,
    ss1_band_check,
)
from .transition import (
    EssentialClass,
    analyze_essential,
    brute_offset_masses,
    mass_vector,
    positivity_check,
    w_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "CapExceeded",
    "CoefficientBand",
    "DerivedConstants",
    "DimensionEstimate",
    "DiscreteMeasure",
    "Enclosure",
    "EssentialClass",
    "FieldElement",
    "IfsSpec",
    "MeasureEnclosures",
    "OracleMismatch",
    "PRESET_NAMES",
    "PathSum",
    "PressureBounds",
    "QuantizerResult",
    "SpecValidationError",
    "StructureError",
    "analyze_essential",
    "brute_force_quantizer",
    "brute_offset_masses",
    "build_automaton",
    "coefficient_band",
    "derived_constants",
    "discretize",
    "error_curve_discrete",
    "format_field",
    "lambda_set",
    "mass_vector",
    "net_intervals_brute",
    "net_measure",
    "optimal_quantizer_1d",
    "osc_dimension_oracle",
    "parse_field",
    "path_sum",
    "positivity_check",
    "preset",
    "pressure_bounds",
    "rational_pow_bounds",
    "solve_s_r",
    "ss1_band_check",
    "w_matrix",
    "window_table",
    "__version__",
]
