"""Global one-parameter group and semigroup actions on functions, computed through
parametric representations of their graphs."""
from .actions import (
    BUILTIN_ACTIONS,
    GroupAction,
    GroupElement,
    SmoothEndomorphism,
    act,
    alpha_map,
    classical_act,
    compose,
    is_projectable,
    projectable_act,
    semigroup_act,
)
from .analysis import (
    RelationVerdict,
    Witness,
    check_commutes,
    equivalent,
    is_parametrization_of,
    refines_with_witness,
    try_deparametrize,
)
from .errors import *  # noqa: F401,F403
from .expr import differentiate, evaluate, parse, substitute, to_source
from .functions import ParametricFunction, ScalarFunction, canonical_parametrize, parametric_derivative
from .geometry import OpenBox, PointCloud, sample, symmetric_distance
from .inversion import InvertibilityReport, Verdict

__version__ = "0.1.0"
