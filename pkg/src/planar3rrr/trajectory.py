"""Pose-space paths, singularity-margin monitoring and mode-change evidence."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aspects import AspectAtlas, same_aspect
from .errors import KinematicError, ModeMismatchError, UnreachableSampleError
from .geometry import (
    EPS_SING,
    GeometryConfig,
    Pose,
    WorkingMode,
    angle_difference,
    wrap_angle,
)
from .jacobians import jacobians
from .kinematics import inverse_kinematics

VERDICT_NON_SINGULAR = "NonSingular"
VERDICT_SINGULAR = "Singular"
VERDICT_CHANGE = "ChangeDemonstrated"
VERDICT_NO_CHANGE = "NotDemonstrated"

#: CSV header of the profile export (9-significant-digit %.9g cells).
PROFILE_HEADER = "t,x,y,theta_deg,alpha1,alpha2,alpha3,detA,B11,B22,B33,detA_n,B11_n,B22_n,B33_n"


@dataclass(frozen=True)
class PathSpec:
    """Piecewise-linear pose path: linear x, y and shortest-arc theta."""

    waypoints: tuple[Pose, ...]
    mode: WorkingMode
    samples_per_segment: int = 500

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if len(self.waypoints) < 2:
            raise ValueError("a path needs at least two waypoints")
        if self.samples_per_segment < 2:
            raise ValueError("samples_per_segment must be at least 2")


@dataclass(frozen=True)
class SampleRecord:
    t: float
    pose: Pose
    alpha: tuple[float, float, float]
    det_a: float
    b11: float
    b22: float
    b33: float
    det_a_n: float
    b11_n: float
    b22_n: float
    b33_n: float


@dataclass(frozen=True)
class MonitorResult:
    records: tuple[SampleRecord, ...]
    verdict: str
    offending_t: float | None
    min_abs_det_scaled: float
    min_abs_b: float
    det_sign: int


def _segment_samples(spec: PathSpec):
    """Global parameters and poses; waypoints are reproduced bit-exactly."""
    nseg = len(spec.waypoints) - 1
    spp = spec.samples_per_segment
    ts = []
    poses = []
    for j in range(nseg):
        a = spec.waypoints[j]
        b = spec.waypoints[j + 1]
        dth = angle_difference(b.theta, a.theta)
        for k in range(spp):
            if j > 0 and k == 0:
                continue  # shared with the previous segment's endpoint
            u = k / (spp - 1)
            ts.append((j + u) / nseg)
            if k == 0:
                poses.append(a)
            elif k == spp - 1:
                poses.append(b)
            else:
                poses.append(
                    Pose(
                        a.x + u * (b.x - a.x),
                        a.y + u * (b.y - a.y),
                        wrap_angle(a.theta + u * dth),
                    )
                )
    return ts, poses


def interpolate(spec: PathSpec) -> list[Pose]:
    """Sampled poses of the path."""
    return _segment_samples(spec)[1]


def monitor(geom: GeometryConfig, spec: PathSpec, eps: float = EPS_SING) -> MonitorResult:
    """Track det(A) and B_ii along the path in the path's working mode.

    The verdict is NonSingular when every sign stays constant and the scaled
    margins stay above ``eps`` at all samples. An unreachable sample aborts
    with UnreachableSampleError.
    """
    ts, poses = _segment_samples(spec)
    raw = []
    for t, pose in zip(ts, poses):
        try:
            config = inverse_kinematics(geom, pose, spec.mode, eps)
        except KinematicError as exc:
            raise UnreachableSampleError(t, exc) from exc
        pair = jacobians(geom, config)
        raw.append((t, pose, config.alpha, pair.det_a, *pair.b_diag, pair.row_norm_scale))

    max_det = max(abs(r[3]) for r in raw)
    max_b = [max(abs(r[4 + i]) for r in raw) for i in range(3)]

    def norm(v: float, mx: float) -> float:
        return v / mx if mx > 0.0 else 0.0

    records = tuple(
        SampleRecord(
            t=t,
            pose=pose,
            alpha=alpha,
            det_a=det,
            b11=b1,
            b22=b2,
            b33=b3,
            det_a_n=norm(det, max_det),
            b11_n=norm(b1, max_b[0]),
            b22_n=norm(b2, max_b[1]),
            b33_n=norm(b3, max_b[2]),
        )
        for (t, pose, alpha, det, b1, b2, b3, _) in raw
    )

    verdict = VERDICT_NON_SINGULAR
    offending = None
    det0 = raw[0][3]
    b0 = raw[0][4:7]
    min_det_scaled = min(abs(r[3]) / r[7] for r in raw)
    min_b = min(min(abs(r[4 + i]) for i in range(3)) for r in raw)
    for r in raw:
        t = r[0]
        flip = (r[3] < 0.0) != (det0 < 0.0) or any(
            (r[4 + i] < 0.0) != (b0[i] < 0.0) for i in range(3)
        )
        weak = abs(r[3]) / r[7] <= eps or any(abs(r[4 + i]) <= eps for i in range(3))
        if flip or weak:
            verdict = VERDICT_SINGULAR
            offending = t
            break
    return MonitorResult(
        records=records,
        verdict=verdict,
        offending_t=offending,
        min_abs_det_scaled=min_det_scaled,
        min_abs_b=min_b,
        det_sign=1 if det0 > 0.0 else -1,
    )


def write_profile(result: MonitorResult, path) -> None:
    """CSV export of the monitored profile."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(PROFILE_HEADER + "\n")
        for r in result.records:
            cells = (
                r.t,
                r.pose.x,
                r.pose.y,
                math.degrees(r.pose.theta),
                r.alpha[0],
                r.alpha[1],
                r.alpha[2],
                r.det_a,
                r.b11,
                r.b22,
                r.b33,
                r.det_a_n,
                r.b11_n,
                r.b22_n,
                r.b33_n,
            )
            fh.write(",".join("%.9g" % v for v in cells) + "\n")


@dataclass(frozen=True)
class ChangeEvidence:
    """Outcome of the three assembly-mode-change checks."""

    verdict: str
    shared_alpha: bool
    alpha_gap: float
    alpha: tuple[float, float, float]
    in_same_aspect: bool
    aspect_note: str
    monitor_verdict: str
    min_abs_det_scaled: float
    min_abs_b: float
    det_sign: int


def verify_assembly_mode_change(
    geom: GeometryConfig,
    atlas: AspectAtlas,
    pose_a: Pose,
    pose_b: Pose,
    mode: WorkingMode,
    via: Pose | None = None,
    samples_per_segment: int = 500,
    eps: float = EPS_SING,
    alpha_tol: float = 1e-4,
) -> ChangeEvidence:
    """Demonstrate a non-singular assembly-mode change between two poses.

    All three checks must hold: the poses share the actuated input within
    ``alpha_tol``; they lie in the same aspect component; the piecewise path
    through ``via`` is monitored NonSingular.
    """
    if pose_a.distance(pose_b) < 1e-12:
        raise ValueError("pose_a and pose_b must differ")
    cfg_a = inverse_kinematics(geom, pose_a, mode, eps)
    cfg_b = inverse_kinematics(geom, pose_b, mode, eps)
    alpha_gap = max(
        abs(angle_difference(x, y)) for x, y in zip(cfg_a.alpha, cfg_b.alpha)
    )
    shared = alpha_gap <= alpha_tol

    try:
        in_same = same_aspect(atlas, cfg_a, cfg_b, eps)
        note = "" if in_same else "different components"
    except ModeMismatchError as exc:
        in_same = False
        note = str(exc)

    waypoints = (pose_a, via, pose_b) if via is not None else (pose_a, pose_b)
    result = monitor(geom, PathSpec(waypoints=waypoints, mode=mode,
                                    samples_per_segment=samples_per_segment), eps)

    ok = shared and in_same and result.verdict == VERDICT_NON_SINGULAR
    return ChangeEvidence(
        verdict=VERDICT_CHANGE if ok else VERDICT_NO_CHANGE,
        shared_alpha=shared,
        alpha_gap=alpha_gap,
        alpha=cfg_a.alpha,
        in_same_aspect=in_same,
        aspect_note=note,
        monitor_verdict=result.verdict,
        min_abs_det_scaled=result.min_abs_det_scaled,
        min_abs_b=result.min_abs_b,
        det_sign=result.det_sign,
    )
