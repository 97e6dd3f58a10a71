"""Experiment analytics: questionnaire scoring, cardiac reactivity,
repeated-measures ANOVA, and Latin-square ordering."""

from .anova import AnovaResult, rm_anova
from .fdist import BetaConvergenceError, betainc_reg, f_cdf, f_sf
from .ordering import latin_square_orders, position_counts
from .scoring import (
    PXI_CONSTRUCTS,
    CrResult,
    PanasResponse,
    PxiItem,
    PxiResponse,
    cardiac_reactivity,
    score_panas,
    score_pxi,
)

__all__ = [
    "AnovaResult",
    "rm_anova",
    "BetaConvergenceError",
    "betainc_reg",
    "f_sf",
    "f_cdf",
    "latin_square_orders",
    "position_counts",
    "PXI_CONSTRUCTS",
    "CrResult",
    "PanasResponse",
    "PxiItem",
    "PxiResponse",
    "cardiac_reactivity",
    "score_panas",
    "score_pxi",
]
