"""Sum-rate analysis for the Gaussian many-to-one X channel and interference channel.

All rates are in bits per real channel use (base-2 logarithms).
"""

from .channel import (
    RawChannel,
    StandardChannel,
    StrategySpec,
    ValidationReport,
    degraded_at_rx1,
    load_channel,
    to_standard_form,
    validate,
)
from .rates import (
    RateReport,
    best_decoding_order,
    rate_of,
    sic_feasible,
    sum_rate_m1,
    sum_rate_mac_subset,
    sum_rate_mi_k,
    t_vector,
)
from .optimality import (
    Certificate,
    Condition,
    GapReport,
    Recommendation,
    best_strategy,
    check_t1,
    check_t2_t4,
    check_t5,
    check_t6,
    check_t7,
    check_t8,
    recommend,
    rho_for_gap,
    t3_gap,
    t6_gap,
)

__version__ = "0.1.0"

__all__ = [
    "best_decoding_order",
    "best_strategy",
    "Certificate",
    "check_t1",
    "check_t2_t4",
    "check_t5",
    "check_t6",
    "check_t7",
    "check_t8",
    "Condition",
    "degraded_at_rx1",
    "GapReport",
    "load_channel",
    "rate_of",
    "RateReport",
    "RawChannel",
    "recommend",
    "Recommendation",
    "rho_for_gap",
    "sic_feasible",
    "StandardChannel",
    "StrategySpec",
    "sum_rate_m1",
    "sum_rate_mac_subset",
    "sum_rate_mi_k",
    "t3_gap",
    "t6_gap",
    "t_vector",
    "to_standard_form",
    "validate",
    "ValidationReport",
]
