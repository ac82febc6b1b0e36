"""Pareto-efficient transmit beamforming over power gain-regions.

A library and CLI for multi-transmitter, multi-receiver MISO interference
networks: every transmitter's efficient beamformers are parameterized by
real simplex weights through the dominant eigenvector of a weighted
Hermitian channel combination, boundary sweeps trace gain- and
utility-regions, and independent characterizations (MRT/ZF combinations,
null-shaping constraints) cross-check the strategies.
"""

__version__ = "0.1.0"

from .linalg import (
    DegenerateEigenspaceWarning,
    EigenSystem,
    dominant_eigpair,
    dominant_eigvec,
    eig_hermitian,
    fix_phase,
    outer_product,
    projector_complement,
    projector_onto,
    unit,
    weighted_combination,
)
from .network import (
    Scenario,
    ScenarioFormatError,
    TransmitterSpec,
    direction_vector,
    effective_miso_channel,
    generate_channels,
    ic_skeleton,
    load_scenario,
    mixed_skeleton,
    mrc_receive_filter,
    reduce_to_miso,
    save_scenario,
    scenario_digest,
    snr_to_noise,
    svd_receive_filter,
)
from .nullshape import (
    NullConstraintSet,
    null_constraints,
    projected_mrt,
    verify_gain_equivalence,
)
from .pareto import (
    ParameterPoint,
    ReceiverRule,
    TransmitStrategy,
    UtilitySpec,
    UtilitySweep,
    alignment_search,
    mrt_beamformer,
    pareto_filter,
    pareto_filter_bruteforce,
    pareto_strategies,
    rate,
    strategy_gain_matrix,
    sweep_utility_region,
    two_user_boundary_vector,
    two_user_combination,
    utilities,
    utilities_at,
    verify_two_user_identity,
    zf_beamformer,
)
from .region import (
    BoundarySample,
    BoundaryStrategy,
    PowerClass,
    boundary_strategy,
    dominates,
    full_power_completion,
    hyperplane_bound,
    needs_power_control,
    power_gain,
    power_rule,
    random_feasible_covariance,
    segment_covariance,
    simplex_grid,
    strategy_gains,
    sweep_boundary,
    weighted_objective,
)

__all__ = [name for name in dir() if not name.startswith("_")]
