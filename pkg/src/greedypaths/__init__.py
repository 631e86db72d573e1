"""Maximum-weight self-avoiding lattice paths with general i.i.d. vertex weights.

An exact branch-and-bound solver for the best length-n path from the origin,
truncation-coupled Monte Carlo estimators for its linear growth constant, and
exact/statistical verification of the supporting concentration inequalities.
"""

__version__ = "0.1.0"

from .estimation import (
    ErrorDecomposition,
    EstimateRow,
    LimitEstimate,
    TruncatedConstantEstimate,
    TruncationBiasTooLarge,
    error_decomposition,
    estimate_limit,
    estimate_rate,
    estimate_truncated_constant,
    replica_field,
)
from .lattice import (
    NotAdjacent,
    NotSelfAvoiding,
    Path,
    ResourceBound,
    enumerate_saws,
    is_self_avoiding_path,
    neighbors,
    origin,
    path_extend,
    path_weight,
)
from .solver import (
    GreedyPathStats,
    SolverResult,
    admissible_upper_bound,
    beam_search,
    greedy_stats,
    max_weight_path,
    within_exact_budget,
)
from .weights import (
    Bernoulli,
    Constant,
    DistributionSpec,
    EmptyConditioningEvent,
    ExplicitField,
    Gaussian,
    HypothesisReport,
    InfiniteMoment,
    ParetoTail,
    ShiftedExponential,
    TruncationLevel,
    TwoPoint,
    UniformInt,
    Vertex,
    WeightField,
    conditional_overshoot_mean,
    derive_seed,
    hypothesis_report,
    overshoot_mean,
    overshoot_raw_moment,
    overshoot_sampler,
    parse_spec,
    sample_weight,
    spec_token,
    tail_prob,
    tail_prob_strict,
    truncate,
)
from .verify import (
    DegenerateTail,
    InvalidP,
    VerificationReport,
    binomial_factorial_moment,
    check_factorial_moment_bound,
    check_factorial_moment_bound_exact,
    check_floor_count_concentration,
    check_fourth_moment,
    check_fourth_moment_identity,
    check_lower_tail_bound,
    check_negative_tail_integrability,
    check_partial_sum_bound,
    check_stirling_identity,
    concentration_rate,
    disjoint_arm_paths,
    stirling_table,
)

__all__ = [name for name in dir() if not name.startswith("_")]
