"""Monte Carlo random-coding simulation of the feedback coding schemes."""

from .codebook import KeyRateError, generate_key_coloring
from .exact import ExactSizeError, exact_small_equivocation
from .rates import (
    RateAllocation,
    RateInfeasibleError,
    RateRegionReport,
    corner_rates,
    dmc_rate_check,
    rate_region_check,
)
from .scheme import (
    ConfigError,
    SimConfig,
    SimReport,
    default_aux,
    error_trend,
    median_by_n,
    run_dmc_feedback_sim,
    run_wiretap_feedback_sim,
    write_trend_csv,
)
from .typical import typical_set_test
from .wynerziv import wz_encode_decode_trial, wz_success_rate

__all__ = [
    "ConfigError", "ExactSizeError", "KeyRateError", "RateAllocation", "RateInfeasibleError",
    "RateRegionReport", "SimConfig", "SimReport", "corner_rates", "default_aux", "dmc_rate_check",
    "error_trend", "exact_small_equivocation", "generate_key_coloring", "median_by_n",
    "rate_region_check", "run_dmc_feedback_sim", "run_wiretap_feedback_sim", "typical_set_test",
    "write_trend_csv", "wz_encode_decode_trial", "wz_success_rate",
]
