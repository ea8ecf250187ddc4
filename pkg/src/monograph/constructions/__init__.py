"""Exact constructions: the five-point refinement scheme, peak sums and
lacunary series."""

from .mzv import (
    MZV_LEVEL_CAP,
    Block,
    MzvLevel,
    ResourceLimitError,
    refinement_checks,
    mzv_approximant,
    mzv_eval,
    mzv_limit_evaluator,
    mzv_refine,
)
from .peaks import (
    MarginNotCertified,
    PeakSumModel,
    check_peak_model,
    peak_build,
    peak_eval,
    peak_margin,
)
from .series import SeriesEvaluator, nomp_eval, nomp_ratio_bound, nomp_witness, takagi_eval

__all__ = [
    "MZV_LEVEL_CAP",
    "Block",
    "MzvLevel",
    "ResourceLimitError",
    "refinement_checks",
    "mzv_approximant",
    "mzv_eval",
    "mzv_limit_evaluator",
    "mzv_refine",
    "MarginNotCertified",
    "PeakSumModel",
    "check_peak_model",
    "peak_build",
    "peak_eval",
    "peak_margin",
    "SeriesEvaluator",
    "nomp_eval",
    "nomp_ratio_bound",
    "nomp_witness",
    "takagi_eval",
]
