"""Exact finite metric spaces, isometry groups and their realizations."""

from .errors import (
    InputError,
    IsoforgeError,
    PreconditionError,
    ResourceLimit,
    VerificationFailed,
)
from .freespace import Molecule, ae_norm, linear_ball_symmetries
from .groups import PermutationGroup, abstract_isomorphic, isometries
from .metric import (
    FiniteMetricSpace,
    amalgamate,
    extend_by_katetov,
    KatetovMap,
    power,
    scale,
    snowflake,
    validate,
)
from .realization import certify_gadget, group_to_space, realize, verify_realization
from .rigidity import RigidSpec, rigid_metric, rigid_metric_path

__version__ = "0.1.0"

__all__ = [
    "FiniteMetricSpace",
    "InputError",
    "IsoforgeError",
    "KatetovMap",
    "Molecule",
    "PermutationGroup",
    "PreconditionError",
    "ResourceLimit",
    "RigidSpec",
    "VerificationFailed",
    "abstract_isomorphic",
    "ae_norm",
    "amalgamate",
    "certify_gadget",
    "extend_by_katetov",
    "group_to_space",
    "isometries",
    "linear_ball_symmetries",
    "power",
    "realize",
    "rigid_metric",
    "rigid_metric_path",
    "scale",
    "snowflake",
    "validate",
    "verify_realization",
]
