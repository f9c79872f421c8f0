"""Kinematic analysis of the symmetrical planar 3-RRR parallel manipulator."""

from .errors import (
    BoxMismatchError,
    ConfigError,
    DegenerateLinearSystemError,
    KinematicError,
    ModeMismatchError,
    OctreeError,
    OutOfBoxError,
    ParallelSingularError,
    SerialBoundaryError,
    SerialSingularError,
    UnreachableError,
    UnreachableSampleError,
)
from .geometry import (
    EPS_SING,
    FullConfiguration,
    GeometryConfig,
    Pose,
    WorkingMode,
    parse_mode,
    platform_points,
    wrap_angle,
)
from .jacobians import (
    E,
    JacobianPair,
    SingularityReport,
    forward_velocity,
    inverse_velocity,
    jacobians,
    singularity_report,
    working_mode_of,
)
from .kinematics import forward_kinematics, inverse_kinematics, inverse_kinematics_all

__version__ = "0.1.0"

__all__ = [
    "BoxMismatchError",
    "ConfigError",
    "DegenerateLinearSystemError",
    "E",
    "EPS_SING",
    "FullConfiguration",
    "GeometryConfig",
    "JacobianPair",
    "KinematicError",
    "ModeMismatchError",
    "OctreeError",
    "OutOfBoxError",
    "ParallelSingularError",
    "Pose",
    "SerialBoundaryError",
    "SerialSingularError",
    "SingularityReport",
    "UnreachableError",
    "UnreachableSampleError",
    "WorkingMode",
    "forward_kinematics",
    "forward_velocity",
    "inverse_kinematics",
    "inverse_kinematics_all",
    "inverse_velocity",
    "jacobians",
    "parse_mode",
    "platform_points",
    "singularity_report",
    "working_mode_of",
    "__version__",
]
