"""Capacity outer-bound toolkit for the interference channel with unilateral source cooperation."""

from .boundset import BOUND_IDS, RATE_COEFFS, BoundEntry, BoundSet
from .errors import (
    BoundednessError,
    CapboundError,
    DomainError,
    NumericsError,
    PreconditionError,
    RegimeNotCovered,
)
from .gaussian_engine import (
    GAUSS_VARS,
    GaussianParams,
    JointCovariance,
    closed_form_bounds,
    covariance,
    eval_bounds_at_rho,
    gaussian_cond_entropy,
    max_over_rho,
    rho_grid_values,
)
from .gdof_analyzer import (
    GdofParams,
    RegimeLabel,
    active_constraints,
    classical_ic_gdof,
    gdof_coefficient,
    gdof_region,
    regime_map,
    slope_check,
)
from .isd_channel import (
    IsdChannelSpec,
    ValidationReport,
    Violation,
    eval_bounds,
    eval_feedback_bound,
    inputs_from_mass,
    joint_distribution,
    ldc_instance,
    load_channel_spec,
    maximize_bound,
    point_mass_inputs,
    uniform_inputs,
    validate,
)
from .prob_core import (
    ProbTable,
    conditional_entropy,
    entropy,
    marginalize,
    mutual_information,
)
from .region_geometry import (
    HalfspaceSet,
    RatePolytope,
    RedundancyReport,
    area,
    contains,
    equals,
    from_bound_set,
    redundant_constraints,
    vertices,
)

__version__ = "0.1.0"
