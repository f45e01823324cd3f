"""Optimal-growth toolkit for a host country receiving FDI, with a
fixed-cost R&D technology, takeoff-threshold analysis, value function
iteration, trajectory simulation, and regime classification."""

from ._backend import active_backend, set_backend, using_numba
from .bellman import GridSpec, Policy, ValueFunction, euler_residual, vfi
from .errors import ConfigError, DomainError, NumericalError, PreconditionError
from .model import (
    DerivedConstants,
    Parameters,
    derived_constants,
    g,
    marginal_utility,
    mne_factor_demands,
    utility,
    validate,
    wage,
)
from .oracle import OracleReport, brute_force_dp, brute_force_G, compare_static
from .simulate import (
    Trajectory,
    certify_escape,
    detect_rd_takeoff,
    simulate,
    verify_path_properties,
)
from .technology import (
    Allocation,
    GTable,
    TechEval,
    allocate,
    asymptotic_shares,
    eval_F,
    eval_G,
    eval_G0,
    eval_G1,
    eval_G_value,
    F_prime,
    find_S_star,
    gamma_bound,
    numeric_dini,
    rd_lower_bound_check,
    tabulate_G,
    x2_level,
)
from .thresholds import (
    SteadyStateReport,
    classify_regime,
    compute_report,
    fixed_point_xstar,
    steady_autarky,
    steady_fdi_no_rd,
)

__version__ = "0.1.0"
