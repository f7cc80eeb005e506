"""Finite-population random-access delay simulator and tail analysis toolkit.

Two engines (continuous-time unslotted with variable packet lengths, and
slot-synchronous with a random user count), exact evaluators for the
matching closed-form delay bounds and slope formulas, tail-slope
inference, throughput-stability classification, and a reproducible
experiment harness with CSV/JSON outputs.
"""
from ._core import BACKEND
from .bounds import (
    BoundKind,
    asymptotic_slope,
    bound_ccdf,
    bound_curve,
    ccdf_collision_mixture,
    exact_T_asymptote,
    laplace_uniform_asymptotic,
)
from .distributions import (
    ConstantPackets,
    ExponentialPackets,
    FixedUsers,
    GammaPackets,
    GeometricUsers,
    PacketDistribution,
    TruncatedExponentialPackets,
    TruncatedGeometricUsers,
    UserCountDistribution,
    packet_from_config,
    users_from_config,
)
from .errors import (
    AlohaError,
    ConfigError,
    NumericError,
    QuadratureError,
    SimulationOverflow,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    load_config,
    parse_config,
    preset_configs,
    reproduce,
    run_experiment,
)
from .finite import (
    DelayTrace,
    FiniteModelParams,
    Instrument,
    extract_per_user,
    measure_min_residual,
    measure_nf,
    sample_first_delays,
    sample_first_user_retx,
    simulate_finite,
)
from .rng import RandomStream, make_stream, replicate_stream, stream_id_for
from .slotted import (
    SlottedModelParams,
    SlottedSample,
    ccdf_slotted,
    collision_prob,
    sample_conditional_geometric,
    sample_conditional_many,
    simulate_slotted,
    success_prob,
)
from .stability import (
    StabilityVerdict,
    Verdict,
    classify_finite,
    classify_slotted,
    empirical_throughput,
)
from .tailfit import (
    CcdfPoints,
    HillEstimate,
    TailFit,
    empirical_ccdf,
    fit_loglog_slope,
    hill_estimator,
)

__version__ = "1.0.0"
