from .density import (
    DEProfile,
    DESettings,
    EffectiveChannel,
    ThresholdError,
    ThresholdResult,
    de_converges,
    de_step,
    f_poisson,
    threshold_search,
)
from .stall import (
    SearchBudgetExceeded,
    StallReport,
    StallSearchResult,
    ber_floor,
    brute_force_smin,
    lemma1_strict,
    s_min_lb_wide,
    s_min_w2,
    stall_report,
)

__all__ = [
    "DEProfile",
    "DESettings",
    "EffectiveChannel",
    "ThresholdError",
    "ThresholdResult",
    "de_converges",
    "de_step",
    "f_poisson",
    "threshold_search",
    "SearchBudgetExceeded",
    "StallReport",
    "StallSearchResult",
    "ber_floor",
    "brute_force_smin",
    "lemma1_strict",
    "s_min_lb_wide",
    "s_min_w2",
    "stall_report",
]
