"""Vectorized kinematic kernels.

Array-oriented versions of the leg reach test, branch selection, det(A)
evaluation and direct-kinematics root isolation. These back the octree cell
predicates and the bulk property checks; the scalar operators in
``kinematics``/``jacobians`` remain the reference implementations.

Shapes follow numpy broadcasting; x, y, theta (or the three actuated angles)
must broadcast against each other.
"""

from __future__ import annotations

import numpy as np

from .geometry import TWO_PI, GeometryConfig, WorkingMode

#: Enum order used whenever modes are indexed 0..7.
MODE_ORDER = tuple(WorkingMode)



def _leg_data(geom: GeometryConfig):
    a = geom.base_points
    psi = np.asarray(geom.platform_phase)
    return a, psi


def strict_reach(geom: GeometryConfig, x, y, theta) -> np.ndarray:
    """True where every leg target lies strictly inside its reach annulus."""
    a, psi = _leg_data(geom)
    lo2 = (geom.l - geom.m) ** 2
    hi2 = (geom.l + geom.m) ** 2
    out = None
    for i in range(3):
        cx = x + geom.s * np.cos(theta + psi[i])
        cy = y + geom.s * np.sin(theta + psi[i])
        d2 = (cx - a[i, 0]) ** 2 + (cy - a[i, 1]) ** 2
        ok = (d2 > lo2) & (d2 < hi2)
        out = ok if out is None else (out & ok)
    return out


def _branch_rows(geom: GeometryConfig, x, y, theta):
    """Per-leg, per-branch rows of A plus the strict reach mask.

    Returns (reach, rows) with rows[leg][branch_idx] = (ex, ey, w); branch
    index 0 is the positive elbow sign. Row entries are NaN outside reach.
    """
    a, psi = _leg_data(geom)
    l, m, s = geom.l, geom.m, geom.s
    lo2 = (geom.l - geom.m) ** 2
    hi2 = (geom.l + geom.m) ** 2
    reach = None
    rows = []
    with np.errstate(invalid="ignore", divide="ignore"):
        for i in range(3):
            cx = x + s * np.cos(theta + psi[i])
            cy = y + s * np.sin(theta + psi[i])
            dx = cx - a[i, 0]
            dy = cy - a[i, 1]
            d2 = dx * dx + dy * dy
            ok = (d2 > lo2) & (d2 < hi2)
            reach = ok if reach is None else (reach & ok)
            d = np.sqrt(d2)
            inv = 1.0 / d
            cos_d = (d2 - l * l - m * m) / (2.0 * l * m)
            sin_d = np.sqrt(np.maximum(0.0, 1.0 - cos_d * cos_d))
            cphi = (l + m * cos_d) * inv
            sphi = (m * sin_d) * inv
            dhx = dx * inv
            dhy = dy * inv
            per_branch = []
            for sign in (1.0, -1.0):
                sp = sign * sphi
                # u(alpha) = R(-phi_signed) applied to the unit target vector.
                uax = dhx * cphi + dhy * sp
                uay = -dhx * sp + dhy * cphi
                bx = a[i, 0] + l * uax
                by = a[i, 1] + l * uay
                ex = cx - bx
                ey = cy - by
                w = (y - cy) * ex - (x - cx) * ey
                per_branch.append((ex, ey, w))
            rows.append(per_branch)
    return reach, rows


def mode_determinants(geom: GeometryConfig, x, y, theta):
    """(reach, dets) with dets[k] = det(A) for MODE_ORDER[k]; NaN off reach."""
    reach, rows = _branch_rows(geom, x, y, theta)
    # Cross products of rows 2 and 3 for the four branch combinations.
    cross = {}
    for j2 in range(2):
        for j3 in range(2):
            r2 = rows[1][j2]
            r3 = rows[2][j3]
            cross[(j2, j3)] = (
                r2[1] * r3[2] - r2[2] * r3[1],
                r2[2] * r3[0] - r2[0] * r3[2],
                r2[0] * r3[1] - r2[1] * r3[0],
            )
    dets = []
    for mode in MODE_ORDER:
        j1, j2, j3 = (0 if sg > 0 else 1 for sg in mode.signs)
        r1 = rows[0][j1]
        cx_, cy_, cz_ = cross[(j2, j3)]
        dets.append(r1[0] * cx_ + r1[1] * cy_ + r1[2] * cz_)
    return reach, dets


def workspace_in(geom: GeometryConfig, x, y, theta, mode: WorkingMode, det_sign: int):
    """Strictly reachable in ``mode`` with matching sign of det(A)."""
    reach, dets = mode_determinants(geom, x, y, theta)
    det = dets[MODE_ORDER.index(mode)]
    if det_sign > 0:
        return reach & (det > 0.0)
    return reach & (det < 0.0)


def ik_alpha(geom: GeometryConfig, x, y, theta, mode: WorkingMode):
    """Actuated angles of the mode's branch; NaN where a leg is out of reach.

    Returns an array of shape (3,) + broadcast shape.
    """
    a, psi = _leg_data(geom)
    l, m, s = geom.l, geom.m, geom.s
    lo2 = (geom.l - geom.m) ** 2
    hi2 = (geom.l + geom.m) ** 2
    out = []
    with np.errstate(invalid="ignore", divide="ignore"):
        for i in range(3):
            cx = x + s * np.cos(theta + psi[i])
            cy = y + s * np.sin(theta + psi[i])
            dx = cx - a[i, 0]
            dy = cy - a[i, 1]
            d2 = dx * dx + dy * dy
            ok = (d2 > lo2) & (d2 < hi2)
            cos_d = np.clip((d2 - l * l - m * m) / (2.0 * l * m), -1.0, 1.0)
            sin_d = mode.signs[i] * np.sqrt(np.maximum(0.0, 1.0 - cos_d * cos_d))
            al = np.arctan2(dy, dx) - np.arctan2(m * sin_d, l + m * cos_d)
            out.append(np.where(ok, al, np.nan))
    return np.stack(out)


def _fk_system_pieces(geom: GeometryConfig, bx, by, theta):
    """Difference-system parts for elbow points (K, 3) against theta arrays."""
    s, m = geom.s, geom.m
    psi = np.asarray(geom.platform_phase)
    ex = []
    ey = []
    h = []
    for i in range(3):
        shape = bx[:, i].shape + (1,) * (theta.ndim - 1)
        exi = s * np.cos(theta + psi[i]) - bx[:, i].reshape(shape)
        eyi = s * np.sin(theta + psi[i]) - by[:, i].reshape(shape)
        ex.append(exi)
        ey.append(eyi)
        h.append(exi * exi + eyi * eyi - m * m)
    m11 = 2.0 * (ex[1] - ex[0])
    m12 = 2.0 * (ey[1] - ey[0])
    m21 = 2.0 * (ex[2] - ex[0])
    m22 = 2.0 * (ey[2] - ey[0])
    det = m11 * m22 - m12 * m21
    r1 = h[0] - h[1]
    r2 = h[0] - h[2]
    return (m11, m12, m21, m22), (r1, r2), det, ex[0], ey[0], h[0]


def _fk_scan(geom: GeometryConfig, bx, by, theta):
    """Pole-free scan function N = f * det(M)^2 (a trig polynomial in theta)."""
    mm, rr, det, e0x, e0y, h0 = _fk_system_pieces(geom, bx, by, theta)
    m11, m12, m21, m22 = mm
    r1, r2 = rr
    arx = r1 * m22 - r2 * m12
    ary = m11 * r2 - m21 * r1
    return arx * arx + ary * ary + 2.0 * det * (arx * e0x + ary * e0y) + det * det * h0


def _positions_batch(geom: GeometryConfig, bx, by, theta):
    """Candidate platform positions at scan-function roots.

    (K,) inputs; returns (rows, x, y) with one Cramer candidate per
    well-conditioned row and two rank-1 line candidates otherwise.
    """
    mm, rr, det, e0x, e0y, h0 = _fk_system_pieces(geom, bx, by, theta[:, None])
    m11, m12, m21, m22 = (v[:, 0] for v in mm)
    r1, r2 = (v[:, 0] for v in rr)
    det = det[:, 0]
    e0x = e0x[:, 0]
    e0y = e0y[:, 0]
    h0 = h0[:, 0]
    scale = np.sqrt((m11 * m11 + m12 * m12) * (m21 * m21 + m22 * m22))
    big = np.abs(det) > 1e-4 * np.maximum(scale, 1e-300)
    rows_list = []
    xs_list = []
    ys_list = []
    bi = np.flatnonzero(big)
    if bi.size:
        rows_list.append(bi)
        xs_list.append((r1[bi] * m22[bi] - r2[bi] * m12[bi]) / det[bi])
        ys_list.append((m11[bi] * r2[bi] - m21[bi] * r1[bi]) / det[bi])
    si = np.flatnonzero(~big)
    if si.size:
        n1 = np.hypot(m11[si], m12[si])
        n2 = np.hypot(m21[si], m22[si])
        use1 = n1 >= n2
        nv = np.maximum(np.where(use1, n1, n2), 1e-300)
        vx = np.where(use1, m11[si], m21[si])
        vy = np.where(use1, m12[si], m22[si])
        rv = np.where(use1, r1[si], r2[si])
        px = rv * vx / (nv * nv)
        py = rv * vy / (nv * nv)
        nx = -vy / nv
        ny = vx / nv
        bq = 2.0 * (nx * (px + e0x[si]) + ny * (py + e0y[si]))
        cq = px * px + py * py + 2.0 * (px * e0x[si] + py * e0y[si]) + h0[si]
        disc = bq * bq - 4.0 * cq
        okd = np.isfinite(disc) & (disc >= 0.0)
        if okd.any():
            sq = np.sqrt(disc[okd])
            base = si[okd]
            for t in (0.5 * (-bq[okd] + sq), 0.5 * (-bq[okd] - sq)):
                rows_list.append(base)
                xs_list.append(px[okd] + t * nx[okd])
                ys_list.append(py[okd] + t * ny[okd])
    if not rows_list:
        return np.empty(0, dtype=int), np.empty(0), np.empty(0)
    return np.concatenate(rows_list), np.concatenate(xs_list), np.concatenate(ys_list)


def _full_system(geom: GeometryConfig, bx, by, x, y, theta):
    """Closure values and Jacobian of the full system; all inputs (K, ...)."""
    s, m = geom.s, geom.m
    psi = np.asarray(geom.platform_phase)
    g = np.empty((len(x), 3))
    jac = np.empty((len(x), 3, 3))
    for i in range(3):
        ux = np.cos(theta + psi[i])
        uy = np.sin(theta + psi[i])
        wx = x + s * ux - bx[:, i]
        wy = y + s * uy - by[:, i]
        g[:, i] = wx * wx + wy * wy - m * m
        jac[:, i, 0] = 2.0 * wx
        jac[:, i, 1] = 2.0 * wy
        jac[:, i, 2] = 2.0 * s * (wy * ux - wx * uy)
    return g, jac


def _newton_full_batch(geom: GeometryConfig, bx, by, x, y, theta, iters: int = 30):
    """Vectorized Newton on the full closure system from (K,) seeds."""
    x = x.copy()
    y = y.copy()
    theta = theta.copy()
    for _ in range(iters):
        g, jac = _full_system(geom, bx, by, x, y, theta)
        try:
            step = np.linalg.solve(jac, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            dets = np.linalg.det(jac)
            sing = np.abs(dets) < 1e-300
            jac[sing] = np.eye(3)
            step = np.linalg.solve(jac, g[..., None])[..., 0]
            step[sing] = 0.0
        norm = np.max(np.abs(step), axis=1)
        shrink = np.where(norm > 1.0, norm, 1.0)
        step = step / shrink[:, None]
        x -= step[:, 0]
        y -= step[:, 1]
        theta -= step[:, 2]
        if float(np.max(norm, initial=0.0)) < 1e-13:
            break
    return x, y, theta


def _closure_error(geom: GeometryConfig, bx, by, x, y, theta):
    s, m = geom.s, geom.m
    psi = np.asarray(geom.platform_phase)
    worst = None
    for i in range(3):
        cx = x + s * np.cos(theta + psi[i])
        cy = y + s * np.sin(theta + psi[i])
        gap = np.abs(np.hypot(cx - bx[:, i], cy - by[:, i]) - m)
        worst = gap if worst is None else np.maximum(worst, gap)
    return worst


#: Trigonometric degree of the scan polynomial N.
SCAN_DEGREE = 6


def scan_coefficients(geom: GeometryConfig, bx, by, samples: int = 64):
    """Complex Fourier coefficients gamma_0..gamma_6 of N per input row.

    N has trigonometric degree six, so any sample count above 2*6+1 recovers
    the coefficients exactly through the DFT.
    """
    samples = max(int(samples), 2 * SCAN_DEGREE + 4)
    grid = np.arange(samples) * (TWO_PI / samples)
    f = _fk_scan(geom, bx, by, grid[None, :])
    return np.fft.rfft(f, axis=1)[:, : SCAN_DEGREE + 1] / samples


def scan_roots(gamma):
    """All real orientation roots of N from its Fourier coefficients.

    Substituting z = exp(i theta) turns N into a degree-12 polynomial whose
    unit-circle roots are the orientations sought; they are read off the
    eigenvalues of the companion matrix. Returns (rows, theta).
    """
    k = gamma.shape[0]
    deg = SCAN_DEGREE
    coeffs = np.empty((k, 2 * deg + 1), dtype=complex)
    coeffs[:, deg:] = gamma
    coeffs[:, :deg] = np.conj(gamma[:, :0:-1])
    mag = np.max(np.abs(coeffs), axis=1)
    lead = np.abs(coeffs[:, -1])
    good = (mag > 0.0) & (lead > 1e-13 * mag)
    rows_out = []
    theta_out = []
    gi = np.flatnonzero(good)
    if gi.size:
        n = 2 * deg
        monic = coeffs[gi] / coeffs[gi, -1:]
        comp = np.zeros((gi.size, n, n), dtype=complex)
        comp[:, np.arange(1, n), np.arange(0, n - 1)] = 1.0
        comp[:, :, -1] = -monic[:, :n]
        z = np.linalg.eigvals(comp)
        near_unit = np.abs(np.abs(z) - 1.0) < 1e-4
        ri, rj = np.nonzero(near_unit)
        rows_out.append(gi[ri])
        theta_out.append(np.angle(z[ri, rj]) % TWO_PI)
    for i in np.flatnonzero(~good):
        if mag[i] == 0.0:
            continue
        z = np.roots(coeffs[i, ::-1])
        z = z[np.abs(np.abs(z) - 1.0) < 1e-4]
        if z.size:
            rows_out.append(np.full(z.size, i))
            theta_out.append(np.angle(z) % TWO_PI)
    if not rows_out:
        return np.empty(0, dtype=int), np.empty(0)
    return np.concatenate(rows_out), np.concatenate(theta_out)


def fk_roots(
    geom: GeometryConfig,
    alphas: np.ndarray,
    samples: int = 64,
    chunk: int = 8192,
    residual_tol: float = 1e-9,
):
    """Direct-kinematics roots for a batch of actuated-angle triples.

    The scan polynomial's roots are isolated algebraically (see scan_roots),
    then positions are recovered and everything is polished on the full
    closure system. Returns (idx, x, y, theta): flat arrays of validated
    assembly poses, ``idx`` pointing into ``alphas`` (sorted by idx). Roots
    recovered twice (e.g. at tangencies) appear as near-duplicate records.
    """
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    n = alphas.shape[0]
    a = geom.base_points
    out_idx = []
    out_x = []
    out_y = []
    out_t = []
    for start in range(0, n, chunk):
        al = alphas[start : start + chunk]
        bx = a[:, 0][None, :] + geom.l * np.cos(al)
        by = a[:, 1][None, :] + geom.l * np.sin(al)
        gamma = scan_coefficients(geom, bx, by, samples)
        ci, theta = scan_roots(gamma)
        if ci.size == 0:
            continue
        bxr = bx[ci]
        byr = by[ci]
        # Newton on N sharpens the eigenvalue orientations.
        h = 1e-7
        for _ in range(3):
            fm = _fk_scan(geom, bxr, byr, np.stack([theta - h, theta, theta + h], axis=1))
            d1 = (fm[:, 2] - fm[:, 0]) / (2.0 * h)
            ok = np.isfinite(d1) & (d1 != 0.0)
            theta = theta - np.where(ok, fm[:, 1] / np.where(ok, d1, 1.0), 0.0)
        rows, px, py = _positions_batch(geom, bxr, byr, theta)
        if rows.size == 0:
            continue
        bxr = bxr[rows]
        byr = byr[rows]
        root = theta[rows]
        # Full-system polish repairs the conditioning of the 2x2 recovery
        # near singular orientations of the reduction.
        px2, py2, root2 = _newton_full_batch(geom, bxr, byr, px, py, root, iters=10)
        err1 = _closure_error(geom, bxr, byr, px, py, root)
        err2 = _closure_error(geom, bxr, byr, px2, py2, root2)
        err1 = np.where(np.isfinite(err1), err1, np.inf)
        err2 = np.where(np.isfinite(err2), err2, np.inf)
        use2 = err2 <= err1
        px = np.where(use2, px2, px)
        py = np.where(use2, py2, py)
        root = np.where(use2, root2, root)
        err = np.minimum(err1, err2)
        keep = err < residual_tol
        out_idx.append(ci[rows[keep]] + start)
        out_x.append(px[keep])
        out_y.append(py[keep])
        out_t.append(root[keep] % TWO_PI)
    if not out_idx:
        empty = np.empty(0)
        return np.empty(0, dtype=int), empty, empty, empty
    idx_all = np.concatenate(out_idx)
    x_all = np.concatenate(out_x)
    y_all = np.concatenate(out_y)
    t_all = np.concatenate(out_t)
    order = np.argsort(idx_all, kind="stable")
    return idx_all[order], x_all[order], y_all[order], t_all[order]


def solution_signs(geom: GeometryConfig, alphas: np.ndarray, x, y, theta):
    """Branch signs and det(A) of assembly poses with known actuated angles.

    ``alphas`` has shape (R, 3) aligned with the pose arrays.
    """
    a = geom.base_points
    s = geom.s
    psi = np.asarray(geom.platform_phase)
    bx = a[:, 0][None, :] + geom.l * np.cos(alphas)
    by = a[:, 1][None, :] + geom.l * np.sin(alphas)
    b_signs = []
    rows = []
    for i in range(3):
        cx = x + s * np.cos(theta + psi[i])
        cy = y + s * np.sin(theta + psi[i])
        ex = cx - bx[:, i]
        ey = cy - by[:, i]
        bii = (bx[:, i] - a[i, 0]) * ey - (by[:, i] - a[i, 1]) * ex
        b_signs.append(np.sign(bii).astype(int))
        w = (y - cy) * ex - (x - cx) * ey
        rows.append((ex, ey, w))
    det = (
        rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
    )
    return np.stack(b_signs, axis=1), det


def joint_in(
    geom: GeometryConfig,
    a1,
    a2,
    a3,
    mode: WorkingMode,
    det_sign: int,
    samples: int = 64,
) -> np.ndarray:
    """True where some assembly pose of (a1, a2, a3) realizes (mode, det sign)."""
    a1, a2, a3 = np.broadcast_arrays(a1, a2, a3)
    shape = a1.shape
    alphas = np.stack([a1.ravel(), a2.ravel(), a3.ravel()], axis=1)
    idx, x, y, theta = fk_roots(geom, alphas, samples=samples)
    flags = np.zeros(alphas.shape[0], dtype=bool)
    if idx.size:
        signs, det = solution_signs(geom, alphas[idx], x, y, theta)
        want = np.array(mode.signs)
        match = (signs == want[None, :]).all(axis=1)
        match &= (det > 0.0) if det_sign > 0 else (det < 0.0)
        flags[idx[match]] = True
    return flags.reshape(shape)
