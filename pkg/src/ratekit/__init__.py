"""
ratekit: achievable sum rates of hierarchical cooperation and multihop
routing in dense grid networks.

Submodules
----------
core      grid, pathloss, TDMA reuse, interference budget, TIN rate
mimo      large-array rates of the distributed MIMO hop (QMF, QF, cut-set)
coding    per-stage coding-rate recursion
schemes   single-stage and hierarchical sum rates, stage-count search
multihop  multihop baseline and relay-traffic Monte Carlo
report    figure grids, sweeps, verification suites, CSV output
cli       command-line front end
"""

__version__ = "0.1.0"

from .coding import coding_rate, rate_fixed_point, rate_sequence
from .core import (
    GridNetwork,
    interference_power_bound,
    local_rate,
    optimal_snr_multihop,
    optimal_snr_single_stage,
    reuse_factor,
)
from .exceptions import (
    ConvergenceError,
    InfeasibleConfigurationError,
    InvalidParameterError,
    RatekitError,
)
from .multihop import multihop_sum_rate_avg, multihop_sum_rate_lower, relay_traffic_montecarlo
from .schemes import (
    RateBreakdown,
    SchemeConfig,
    best_sum_rate,
    hier_sum_rate,
    original_hc_baseline,
    single_stage_sum_rate,
)

__all__ = [
    "__version__",
    "coding_rate",
    "rate_fixed_point",
    "rate_sequence",
    "GridNetwork",
    "interference_power_bound",
    "local_rate",
    "optimal_snr_multihop",
    "optimal_snr_single_stage",
    "reuse_factor",
    "ConvergenceError",
    "InfeasibleConfigurationError",
    "InvalidParameterError",
    "RatekitError",
    "multihop_sum_rate_avg",
    "multihop_sum_rate_lower",
    "relay_traffic_montecarlo",
    "RateBreakdown",
    "SchemeConfig",
    "best_sum_rate",
    "hier_sum_rate",
    "original_hc_baseline",
    "single_stage_sum_rate",
]
