"""Geometry and configuration types for the planar 3-RRR manipulator.

The fixed base carries three actuated revolute joints A_i on a circle of
radius ``r`` around the origin O. The moving platform carries three passive
joints C_i on a circle of radius ``s`` around the operation point P. Leg i is
the two-bar chain A_i -> B_i -> C_i with bar lengths ``l`` (actuated,
absolute angle alpha_i) and ``m`` (passive, absolute angle beta_i), so

    b_i = a_i + l * (cos alpha_i, sin alpha_i)
    c_i = b_i + m * (cos beta_i,  sin beta_i)
    c_i = p + s * (cos(theta + platform_phase_i), sin(theta + platform_phase_i))

All angles are radians and counter-clockwise positive; degrees appear only at
the CLI and file boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi

#: Default singularity tolerance (dimensionless after scaling).
EPS_SING = 1e-8

#: Vertex phases of an equilateral triangle with one vertex pointing up.
DEFAULT_PHASES = (0.5 * math.pi, 0.5 * math.pi + TWO_PI / 3.0, 0.5 * math.pi + 2.0 * TWO_PI / 3.0)

#: Vertex phases used by the bundled reference fixtures (legs numbered so that
#: leg 1 sits at 210 degrees; see README, "Placement convention").
REFERENCE_PHASES = (math.radians(210.0), math.radians(330.0), math.radians(90.0))


def wrap_angle(theta: float) -> float:
    """Fold an angle into (-pi, pi]."""
    t = theta % TWO_PI
    if t > math.pi:
        t -= TWO_PI
    return t


def angle_difference(a: float, b: float) -> float:
    """Shortest signed angular difference a - b, in (-pi, pi]."""
    return wrap_angle(a - b)


@dataclass(frozen=True)
class GeometryConfig:
    """Link lengths and triangle placements of the manipulator.

    ``base_phase[i]`` places A_i on the base circle; ``platform_phase[i]``
    places C_i on the platform circle at theta = 0.
    """

    l: float = 6.0
    m: float = 6.0
    r: float = 10.0
    s: float = 5.0
    base_phase: tuple[float, float, float] = DEFAULT_PHASES
    platform_phase: tuple[float, float, float] = DEFAULT_PHASES

    def __post_init__(self):
        for name in ("l", "m", "r", "s"):
            v = float(getattr(self, name))
            if not (v > 0.0) or not math.isfinite(v):
                raise ValueError(f"{name} must be strictly positive, got {v}")
            object.__setattr__(self, name, v)
        for name in ("base_phase", "platform_phase"):
            phases = tuple(float(v) for v in getattr(self, name))
            if len(phases) != 3:
                raise ValueError(f"{name} must contain three angles")
            for i in range(3):
                for j in range(i + 1, 3):
                    d = abs(wrap_angle(phases[i] - phases[j]))
                    if d < 1e-9:
                        raise ValueError(f"{name} angles {i} and {j} coincide mod 2pi")
            object.__setattr__(self, name, phases)

    @cached_property
    def base_points(self) -> np.ndarray:
        """Positions a_i of the base joints, shape (3, 2)."""
        pts = np.array(
            [[self.r * math.cos(p), self.r * math.sin(p)] for p in self.base_phase]
        )
        pts.setflags(write=False)
        return pts

    @property
    def reach_min(self) -> float:
        return abs(self.l - self.m)

    @property
    def reach_max(self) -> float:
        return self.l + self.m

    @classmethod
    def reference(cls) -> "GeometryConfig":
        """Geometry matching the bundled benchmark fixtures."""
        return cls(base_phase=REFERENCE_PHASES, platform_phase=REFERENCE_PHASES)

    @classmethod
    def from_dict(cls, data: dict) -> "GeometryConfig":
        """Build from a config mapping; phase angles are given in degrees."""
        allowed = {"l", "m", "r", "s", "base_phase_deg", "platform_phase_deg"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown geometry keys: {sorted(unknown)}")
        kwargs = {k: float(data[k]) for k in ("l", "m", "r", "s") if k in data}
        if "base_phase_deg" in data:
            kwargs["base_phase"] = tuple(math.radians(float(v)) for v in data["base_phase_deg"])
        if "platform_phase_deg" in data:
            kwargs["platform_phase"] = tuple(
                math.radians(float(v)) for v in data["platform_phase_deg"]
            )
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "m": self.m,
            "r": self.r,
            "s": self.s,
            "base_phase_deg": [math.degrees(p) for p in self.base_phase],
            "platform_phase_deg": [math.degrees(p) for p in self.platform_phase],
        }


@dataclass(frozen=True)
class Pose:
    """Platform position (x, y) and orientation theta, normalized to (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def distance(self, other: "Pose") -> float:
        """Chebyshev distance with wrapped orientation difference."""
        return max(
            abs(self.x - other.x),
            abs(self.y - other.y),
            abs(angle_difference(self.theta, other.theta)),
        )


def platform_points(geom: GeometryConfig, pose: Pose) -> tuple[np.ndarray, np.ndarray]:
    """Platform joint positions c_i (3, 2) and the operation point p (2,)."""
    p = np.array([pose.x, pose.y])
    c = np.array(
        [
            [
                pose.x + geom.s * math.cos(pose.theta + psi),
                pose.y + geom.s * math.sin(pose.theta + psi),
            ]
            for psi in geom.platform_phase
        ]
    )
    return c, p


class WorkingMode(Enum):
    """Inverse-kinematic branch, identified by the sign triple of B_11, B_22, B_33."""

    A = (1, 1, 1)
    B = (1, -1, 1)
    C = (1, 1, -1)
    D = (1, -1, -1)
    E = (-1, -1, 1)
    F = (-1, 1, 1)
    G = (-1, -1, -1)
    H = (-1, 1, -1)

    @property
    def signs(self) -> tuple[int, int, int]:
        return self.value

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def sign_string(self) -> str:
        return "".join("P" if s > 0 else "N" for s in self.value)

    @classmethod
    def from_signs(cls, signs) -> "WorkingMode":
        key = tuple(1 if s > 0 else -1 for s in signs)
        for mode in cls:
            if mode.value == key:
                return mode
        raise ValueError(f"invalid sign triple {signs!r}")

    @classmethod
    def from_label(cls, label: str) -> "WorkingMode":
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown working mode label {label!r}") from None


def parse_mode(text: str) -> WorkingMode:
    """Parse a working mode from a letter a-h or a sign string like 'NNP' or '+-+'."""
    t = text.strip()
    if len(t) == 1:
        return WorkingMode.from_label(t)
    if len(t) == 3 and all(ch in "PNpn+-" for ch in t):
        return WorkingMode.from_signs(tuple(1 if ch in "Pp+" else -1 for ch in t))
    raise ValueError(f"cannot parse working mode from {text!r}")


@dataclass(frozen=True)
class FullConfiguration:
    """A pose together with all joint angles, fixing every link of the mechanism."""

    geom: GeometryConfig
    pose: Pose
    alpha: tuple[float, float, float]
    beta: tuple[float, float, float]

    _LOOP_TOL = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(v) for v in self.alpha))
        object.__setattr__(self, "beta", tuple(float(v) for v in self.beta))
        if len(self.alpha) != 3 or len(self.beta) != 3:
            raise ValueError("alpha and beta must each contain three angles")
        b = self.b
        c = self.c
        for i in range(3):
            gap = abs(math.hypot(c[i, 0] - b[i, 0], c[i, 1] - b[i, 1]) - self.geom.m)
            if gap > self._LOOP_TOL:
                raise ValueError(f"leg {i + 1} violates loop closure by {gap:.3g}")
            ex = b[i, 0] + self.geom.m * math.cos(self.beta[i]) - c[i, 0]
            ey = b[i, 1] + self.geom.m * math.sin(self.beta[i]) - c[i, 1]
            if math.hypot(ex, ey) > self._LOOP_TOL:
                raise ValueError(f"leg {i + 1} passive angle inconsistent with its endpoints")

    @property
    def b(self) -> np.ndarray:
        """Elbow positions b_i = a_i + l * u(alpha_i), shape (3, 2)."""
        a = self.geom.base_points
        return a + self.geom.l * np.array(
            [[math.cos(t), math.sin(t)] for t in self.alpha]
        )

    @property
    def c(self) -> np.ndarray:
        """Platform joint positions, derived from the pose."""
        return platform_points(self.geom, self.pose)[0]

    @property
    def p(self) -> np.ndarray:
        return self.pose.position
