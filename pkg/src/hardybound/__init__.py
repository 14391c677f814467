"""Dependence-free survival bounds for sums via running-average quantiles."""
from .bounds import (
    BoundReport,
    convexity_equivalence_check,
    corollary_exp_bound,
    corollary_power_bound,
    iid_bound,
    moment_bound_check,
    naive_union_bound,
    power_factor,
    power_geometric_mean,
    theorem1_bound,
)
from .distributions import (
    Discrete,
    Distribution,
    Exponential,
    Pareto,
    PiecewiseLinearCDF,
    Uniform,
    bernoulli,
    dirac,
    distribution_from_json,
    moment_of_curve,
)
from .errors import ArgumentError, CapabilityError, DomainError, HardyBoundError, PreconditionError
from .hardy import HardyProfile, delta, hardy_of, hardy_transform, jump_points, limiting_survival
from .kernels import BACKEND
from .monotone import (
    Interval,
    MonotoneCurve,
    Piece,
    curve_leq,
    integrate,
    interval_leq,
    invert,
    make_exp,
    make_id_pow,
    make_incr,
    pointwise_sum,
    scale,
)
from .oracle import TransportInstance, max_tail_two, random_coupling_probe
from .worst_case import (
    SimulationResult,
    SlotSystem,
    build_slot_system,
    marginal_check,
    sample_coupling,
    simulate_profile,
    slot_means,
    slot_quantile,
)

__version__ = "0.1.0"
