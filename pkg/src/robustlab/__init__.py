"""Robustness measures of low-dimensional quantum states: engines for
absolute and global robustness against configurable free sets, empirical
continuity audits, and the planar constructions showing where continuity
fails.
"""

from .config import TOLS, Tolerances
from .errors import (
    ConfigurationError,
    IllConditionedError,
    PositivityError,
    StarConvexityViolationError,
    ValidationError,
)
from .qstates import (
    BellDiagonalParams,
    BlochTwoQubit,
    DensityMatrix,
    bell_diagonal,
    bell_states,
    bloch_compose,
    bloch_decompose,
    maximally_mixed,
    random_bell_diagonal,
    random_density,
    random_unitary,
    state_from_json,
    state_inversion,
    state_to_json,
    trace_distance,
    werner,
)
from .free_sets import (
    FreeSetOracle,
    StarConvexityReport,
    bds_params_of,
    discord_defect,
    gurvits_ball_contains,
    has_zero_discord,
    is_ppt,
    is_unfaithful,
    oracle_by_name,
    sample_trace_ball,
    separable_ball_radius,
    singlet_fraction,
    star_convexity_probe,
    teleportation_ball_radius,
)
from .engines import (
    LipschitzConstant,
    RobustnessResult,
    bound_from_kappa_ball,
    discord_levelset_grid,
    discord_robustness_axis_opt,
    discord_robustness_bds,
    discord_robustness_bounds,
    lipschitz_from_kappa_ball,
    lipschitz_full_rank,
    lipschitz_separable,
    lipschitz_teleport,
    min_scaling_robustness,
    robustness_along_ray,
    teleport_robustness_bound,
)
from .geometry2d import (
    PlanarFreeSet,
    PlanarScene,
    absolute_robustness_2d,
    counterexample1_exact,
    counterexample1_point,
    counterexample2_exact,
    counterexample2_point,
    global_robustness_2d,
    planar_star_probe,
    scene_counterexample1,
    scene_counterexample2,
)
from .audit import (
    AuditConfig,
    ConvexityReport,
    FaithfulnessReport,
    LipschitzReport,
    MonotonicityReport,
    audit_convexity,
    audit_faithfulness,
    audit_lipschitz,
    audit_monotonicity,
    channel_depolarizing,
    channel_local_unitary,
    channel_measure_prepare_b,
    default_channels,
    discord_axis_endpoint_pairs,
    discord_filtered_measure,
    lipschitz_pairs,
    ray_measure,
)

__version__ = "0.1.0"
