import math

import numpy as np
import pytest

from planar3rrr import batch
from planar3rrr.geometry import Pose, WorkingMode, angle_difference
from planar3rrr.jacobians import jacobians
from planar3rrr.kinematics import forward_kinematics, inverse_kinematics, inverse_kinematics_all


def test_strict_reach_matches_leg_distances(ref_geom, rng):
    xs = rng.uniform(-14, 14, 200)
    ys = rng.uniform(-14, 14, 200)
    ts = rng.uniform(0, 2 * math.pi, 200)
    got = batch.strict_reach(ref_geom, xs, ys, ts)
    for k in range(200):
        expect = len(inverse_kinematics_all(ref_geom, Pose(xs[k], ys[k], ts[k]))) == 8
        assert bool(got[k]) == expect


def test_mode_determinants_match_scalar(ref_geom, rng):
    xs = rng.uniform(-4, 4, 60)
    ys = rng.uniform(-4, 4, 60)
    ts = rng.uniform(0, 2 * math.pi, 60)
    reach, dets = batch.mode_determinants(ref_geom, xs, ys, ts)
    for k in range(60):
        if not reach[k]:
            continue
        for mi, mode in enumerate(batch.MODE_ORDER):
            cfg = inverse_kinematics(ref_geom, Pose(xs[k], ys[k], ts[k]), mode)
            pair = jacobians(ref_geom, cfg)
            assert dets[mi][k] == pytest.approx(pair.det_a, rel=1e-9, abs=1e-9)


def test_ik_alpha_matches_scalar(ref_geom, rng):
    xs = rng.uniform(-3, 3, 40)
    ys = rng.uniform(-3, 3, 40)
    ts = rng.uniform(-math.pi, math.pi, 40)
    for mode in (WorkingMode.A, WorkingMode.E, WorkingMode.H):
        al = batch.ik_alpha(ref_geom, xs, ys, ts, mode)
        for k in range(40):
            try:
                cfg = inverse_kinematics(ref_geom, Pose(xs[k], ys[k], ts[k]), mode)
            except Exception:
                assert not np.isfinite(al[:, k]).all()
                continue
            for leg in range(3):
                assert abs(angle_difference(float(al[leg, k]), cfg.alpha[leg])) < 1e-9


def test_fk_roots_match_scalar_solver(ref_geom, rng):
    alphas = rng.uniform(0, 2 * math.pi, (40, 3))
    idx, x, y, th = batch.fk_roots(ref_geom, alphas, samples=1024)
    for k in range(40):
        scalar = forward_kinematics(ref_geom, alphas[k])
        sel = idx == k
        got = sorted(
            (Pose(float(a), float(b), float(c)) for a, b, c in zip(x[sel], y[sel], th[sel])),
            key=lambda p: (p.theta, p.x),
        )
        dedup = []
        for p in got:
            if all(p.distance(q) > 1e-8 for q in dedup):
                dedup.append(p)
        assert len(dedup) == len(scalar)
        for p, q in zip(dedup, scalar):
            assert p.distance(q) < 1e-8


def test_solution_signs_match_jacobians(ref_geom, rng):
    alphas = rng.uniform(0, 2 * math.pi, (20, 3))
    idx, x, y, th = batch.fk_roots(ref_geom, alphas, samples=1024)
    sgn, det = batch.solution_signs(ref_geom, alphas[idx], x, y, th)
    for r in range(len(idx)):
        pose = Pose(float(x[r]), float(y[r]), float(th[r]))
        cfgs = inverse_kinematics_all(ref_geom, pose)
        cfg = min(
            cfgs.values(),
            key=lambda c: max(
                abs(angle_difference(a, b)) for a, b in zip(c.alpha, alphas[idx[r]])
            ),
        )
        pair = jacobians(ref_geom, cfg)
        assert tuple(sgn[r]) == tuple(np.sign(pair.b_diag).astype(int))
        assert det[r] == pytest.approx(pair.det_a, rel=1e-6)


def test_joint_in_matches_direct_classification(ref_geom, rng):
    alphas = rng.uniform(0, 2 * math.pi, (30, 3))
    mode = WorkingMode.C
    flags = batch.joint_in(ref_geom, alphas[:, 0], alphas[:, 1], alphas[:, 2], mode, 1)
    for k in range(30):
        expect = False
        for pose in forward_kinematics(ref_geom, alphas[k]):
            cfgs = inverse_kinematics_all(ref_geom, pose)
            if mode not in cfgs:
                continue
            cfg = cfgs[mode]
            if max(
                abs(angle_difference(a, b)) for a, b in zip(cfg.alpha, alphas[k])
            ) < 1e-6:
                pair = jacobians(ref_geom, cfg)
                if pair.det_a > 0:
                    expect = True
        assert bool(flags[k]) == expect
