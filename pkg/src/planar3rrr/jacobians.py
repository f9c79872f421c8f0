"""Velocity model: the direct- and inverse-kinematics matrices and their use.

Differentiating the loop closures and projecting out the passive joint rates
gives A t = B q_dot, with t = (x_dot, y_dot, theta_dot) the platform twist
and q_dot the actuated rates. Row i of A is
[(c_i - b_i)^T, -(c_i - b_i)^T E (p - c_i)] and B is diagonal with
B_ii = (c_i - b_i)^T E (b_i - a_i), where E rotates by +90 degrees.
det(A) = 0 is a parallel singularity (distal lines concurrent or all
parallel); B_ii = 0 is a serial singularity (leg i stretched or folded).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParallelSingularError, SerialSingularError
from .geometry import EPS_SING, FullConfiguration, GeometryConfig, WorkingMode

#: 90-degree rotation matrix used throughout the velocity relations.
E = np.array([[0.0, -1.0], [1.0, 0.0]])


def det3(mat: np.ndarray) -> float:
    """Determinant of a 3x3 matrix by direct cofactor expansion."""
    return float(
        mat[0, 0] * (mat[1, 1] * mat[2, 2] - mat[1, 2] * mat[2, 1])
        - mat[0, 1] * (mat[1, 0] * mat[2, 2] - mat[1, 2] * mat[2, 0])
        + mat[0, 2] * (mat[1, 0] * mat[2, 1] - mat[1, 1] * mat[2, 0])
    )


@dataclass(frozen=True)
class JacobianPair:
    """The 3x3 direct-kinematics matrix A, the diagonal of B, and det(A)."""

    a_mat: np.ndarray
    b_diag: tuple[float, float, float]
    det_a: float

    @property
    def b_mat(self) -> np.ndarray:
        return np.diag(self.b_diag)

    @property
    def row_norm_scale(self) -> float:
        """Product of the row norms of A; scales det(A) dimensionless."""
        rows = np.linalg.norm(self.a_mat, axis=1)
        return float(rows[0] * rows[1] * rows[2])


@dataclass(frozen=True)
class SingularityReport:
    serial_margins: tuple[float, float, float]
    parallel_margin: float
    scale: float
    eps: float
    is_serial_singular: bool
    is_parallel_singular: bool


def jacobians(geom: GeometryConfig, config: FullConfiguration) -> JacobianPair:
    """Build the matrix pair at a configuration."""
    a = geom.base_points
    b = config.b
    c = config.c
    px, py = config.pose.x, config.pose.y
    a_mat = np.empty((3, 3))
    b_diag = []
    for i in range(3):
        ex = c[i, 0] - b[i, 0]
        ey = c[i, 1] - b[i, 1]
        a_mat[i, 0] = ex
        a_mat[i, 1] = ey
        # -(c-b)^T E (p-c) written out as a 2D cross product.
        a_mat[i, 2] = (py - c[i, 1]) * ex - (px - c[i, 0]) * ey
        b_diag.append((b[i, 0] - a[i, 0]) * ey - (b[i, 1] - a[i, 1]) * ex)
    a_mat.setflags(write=False)
    return JacobianPair(a_mat=a_mat, b_diag=tuple(b_diag), det_a=det3(a_mat))


def working_mode_of(pair: JacobianPair, eps: float = EPS_SING) -> WorkingMode:
    """Classify the branch from the signs of B_ii; singular entries are an error."""
    for i, v in enumerate(pair.b_diag):
        if abs(v) < eps:
            raise SerialSingularError(i + 1, v)
    return WorkingMode.from_signs(tuple(1 if v > 0 else -1 for v in pair.b_diag))


def singularity_report(pair: JacobianPair, eps: float = EPS_SING) -> SingularityReport:
    scale = pair.row_norm_scale
    serial = min(abs(v) for v in pair.b_diag) < eps
    parallel = abs(pair.det_a) < eps * scale
    return SingularityReport(
        serial_margins=pair.b_diag,
        parallel_margin=pair.det_a,
        scale=scale,
        eps=eps,
        is_serial_singular=serial,
        is_parallel_singular=parallel,
    )


def forward_velocity(pair: JacobianPair, alpha_dot, eps: float = EPS_SING) -> np.ndarray:
    """Platform twist (x_dot, y_dot, theta_dot) from actuated rates."""
    scale = pair.row_norm_scale
    if abs(pair.det_a) < eps * scale:
        raise ParallelSingularError(pair.det_a, scale)
    rhs = np.asarray(pair.b_diag) * np.asarray(alpha_dot, dtype=float)
    return np.linalg.solve(pair.a_mat, rhs)


def inverse_velocity(pair: JacobianPair, twist, eps: float = EPS_SING) -> np.ndarray:
    """Actuated rates from the platform twist."""
    for i, v in enumerate(pair.b_diag):
        if abs(v) < eps:
            raise SerialSingularError(i + 1, v)
    lhs = pair.a_mat @ np.asarray(twist, dtype=float)
    return lhs / np.asarray(pair.b_diag)


def velocity_residual(pair: JacobianPair, twist, alpha_dot) -> float:
    """Max-norm of A t - B q_dot, for verification."""
    r = pair.a_mat @ np.asarray(twist, dtype=float) - np.asarray(pair.b_diag) * np.asarray(
        alpha_dot, dtype=float
    )
    return float(np.max(np.abs(r)))


def serial_alignment(geom: GeometryConfig, config: FullConfiguration, leg: int) -> float:
    """(b-a)^T (c-b) for one leg (1-based); equals +-l*m when A, B, C align."""
    i = leg - 1
    a = geom.base_points
    b = config.b
    c = config.c
    return float(
        (b[i, 0] - a[i, 0]) * (c[i, 0] - b[i, 0]) + (b[i, 1] - a[i, 1]) * (c[i, 1] - b[i, 1])
    )
