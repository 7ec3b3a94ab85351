"""Achievability bounds, Gaussian approximations, and Monte Carlo
validation for noisy permutation channels with strictly positive full-rank
square transition matrices."""

from .approx import (
    MomentConstants,
    MomentReport,
    approx_bec,
    approx_bsc,
    approx_general,
    berry_esseen_bound,
    berry_esseen_interval,
    moment_constants,
    radius_for_target,
    verify_moment_bounds,
)
from .bounds import (
    BoundPoint,
    METHODS,
    NeighborSet,
    achievability_general,
    bec_achievability,
    bsc_achievability,
    decoding_metric,
    dominance_fraction,
    error_event_prob,
    neighbor_set,
    rate_of,
    search_max_m,
    search_max_m_bec,
    search_max_m_bsc,
    search_max_m_general,
)
from .errors import (
    InfeasibleError,
    InputError,
    PermchanError,
    ResourceLimitError,
    SingularMatrixError,
    SupportViolationError,
)
from .packing import (
    BinaryParams,
    ChannelMatrix,
    MessageSet,
    SetKind,
    build_binary_message_set,
    build_binary_message_set_by_size,
    build_dmc_message_set,
    build_dmc_message_set_by_grid,
    grid_simplex,
    marginal_space_contains,
    min_pairwise_kl,
    packing_count_bounds,
    packing_lower_bound_subspace,
    volume_ratio,
)
from .probability import (
    LOG2E,
    Distribution,
    LLRMoments,
    binomial_tail,
    kl_divergence,
    llr_moments,
    std_normal_cdf,
    std_normal_quantile,
    total_variation,
)
from .sim import (
    PermutationCheck,
    SimConfig,
    SimReport,
    input_distribution_for,
    ml_decode,
    permutation_invariance_check,
    run_trials,
)

__version__ = "0.1.0"
