"""Generalized aspects: singularity-free domains per working mode and det sign.

For a fixed working mode the inverse problem is a function of the pose, so
the workspace octree components for one (mode, det sign) pair are faithful
images of the maximal singularity-free domains of the pose x joint product
space; connectivity conclusions are drawn from the workspace trees. The
joint-space projections are built alongside from the direct problem.

Aspect cells are classified conservatively: a cell is IN only when the
predicate holds at its center and at all eight corners. Aspects are open
regions separated by det(A) = 0 walls; center-only sampling bridges two
aspects wherever the wall dips below one cell and cuts hairline slivers into
droplet components, and no fixed margin repairs both. Corner agreement keeps
wall-straddling cells OUT at any wall thickness. The census additionally
reports only solid components, those containing at least one cell whose full
3x3x3 cell neighborhood is IN; thinner debris is below the resolution of the
subdivision and is labeled but not counted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import batch
from .errors import ModeMismatchError, ParallelSingularError
from .geometry import EPS_SING, FullConfiguration, GeometryConfig, WorkingMode
from .jacobians import jacobians, working_mode_of
from .octree import (
    Box3,
    Octree,
    _components_from_grid,
    _grid_to_tree,
    _rasterize,
    joint_box,
    locate,
    morton_encode,
    workspace_box,
)

_SIGN_TAG = {1: "pos", -1: "neg"}


@dataclass(frozen=True)
class AspectEntry:
    """Workspace and joint-space projections for one (mode, det sign) pair.

    ``n_components`` counts solid components; every IN leaf still carries a
    component id (droplets included), so ids may exceed the solid count.
    """

    mode: WorkingMode
    det_sign: int
    workspace: Octree
    n_components: int
    solid_component_ids: tuple[int, ...]
    n_components_raw: int
    component_leaf_counts: tuple[int, ...]
    component_volumes: tuple[float, ...]
    joint: Octree | None = None
    n_joint_components: int = 0


@dataclass(frozen=True)
class AspectAtlas:
    geom: GeometryConfig
    depth: int
    joint_depth: int | None
    box: Box3
    jbox: Box3 | None
    entries: dict[tuple[WorkingMode, int], AspectEntry]

    def counts(self, det_sign: int) -> dict[WorkingMode, int]:
        return {
            mode: entry.n_components
            for (mode, sign), entry in self.entries.items()
            if sign == det_sign
        }

    def total(self, det_sign: int) -> int:
        return sum(self.counts(det_sign).values())

    @property
    def grand_total(self) -> int:
        return sum(e.n_components for e in self.entries.values())


def _sign_grids(geom: GeometryConfig, box: Box3, depth: int, corners: bool):
    """Reach mask and per-mode det(A) signs at cell centers or cell corners.

    Corner grids have n+1 samples along non-wrapping axes and n along
    wrapping ones (corner n coincides with corner 0).
    """
    n = 1 << depth
    offset = 0.0 if corners else 0.5
    counts = []
    coords = []
    for axis in range(3):
        cnt = n if (not corners or box.wraps(axis)) else n + 1
        w = (box.hi[axis] - box.lo[axis]) / n
        coords.append(box.lo[axis] + (np.arange(cnt) + offset) * w)
        counts.append(cnt)
    reach = np.empty(tuple(counts), dtype=bool)
    signs = np.empty((8, *counts), dtype=np.int8)
    slab = max(1, (1 << 20) // (counts[0] * counts[1]))
    for z0 in range(0, counts[2], slab):
        th = coords[2][z0 : z0 + slab]
        rch, dets = batch.mode_determinants(
            geom, coords[0][:, None, None], coords[1][None, :, None], th[None, None, :]
        )
        sl = slice(z0, z0 + len(th))
        reach[:, :, sl] = rch
        for k in range(8):
            with np.errstate(invalid="ignore"):
                signs[k, :, :, sl] = np.where(rch, np.sign(dets[k]), 0.0).astype(np.int8)
    return reach, signs


def _corner_expand(vals: np.ndarray, box: Box3, depth: int) -> np.ndarray:
    """AND of the 8 corner samples per cell; vals is a corner-grid boolean."""
    n = 1 << depth
    v = vals
    for axis in range(3):
        if box.wraps(axis):
            idx = np.arange(n + 1) % n
            v = np.take(v, idx, axis=axis)
    return (
        v[:-1, :-1, :-1] & v[1:, :-1, :-1] & v[:-1, 1:, :-1] & v[1:, 1:, :-1]
        & v[:-1, :-1, 1:] & v[1:, :-1, 1:] & v[:-1, 1:, 1:] & v[1:, 1:, 1:]
    )


def _erode_box_cells(grid: np.ndarray, wrap: tuple[bool, bool, bool]) -> np.ndarray:
    """One-cell erosion with a full 3x3x3 box (separable), wrap-aware."""
    out = grid
    for axis in range(3):
        plus = np.roll(out, 1, axis=axis)
        minus = np.roll(out, -1, axis=axis)
        if not wrap[axis]:
            sl = [slice(None)] * 3
            sl[axis] = 0
            plus[tuple(sl)] = False
            sl[axis] = -1
            minus[tuple(sl)] = False
        out = out & plus & minus
    return out


def _joint_flag_grids(geom: GeometryConfig, jbox: Box3, depth: int, samples: int):
    """Boolean grids flags[mode_idx][sign_idx] from one direct-kinematics sweep."""
    n = 1 << depth
    a1 = jbox.centers(0, depth)[:, None, None]
    a2 = jbox.centers(1, depth)[None, :, None]
    a3 = jbox.centers(2, depth)[None, None, :]
    g1, g2, g3 = np.broadcast_arrays(a1, a2, a3)
    alphas = np.stack([g1.ravel(), g2.ravel(), g3.ravel()], axis=1)
    idx, x, y, th = batch.fk_roots(geom, alphas, samples=samples)
    flags = np.zeros((8, 2, alphas.shape[0]), dtype=bool)
    if idx.size:
        sgn, det = batch.solution_signs(geom, alphas[idx], x, y, th)
        ok = (sgn != 0).all(axis=1) & (det != 0.0)
        mode_lookup = {mode.signs: k for k, mode in enumerate(batch.MODE_ORDER)}
        mode_idx = np.array([mode_lookup[tuple(s)] for s in sgn[ok]], dtype=np.int64)
        sign_idx = (det[ok] < 0.0).astype(np.int64)  # 0 -> positive, 1 -> negative
        flags[mode_idx, sign_idx, idx[ok]] = True
    return flags.reshape(8, 2, n, n, n)


def enumerate_aspects(
    geom: GeometryConfig,
    depth: int = 8,
    box: Box3 | None = None,
    joint_depth: int | None = None,
    jbox: Box3 | None = None,
    modes=None,
    det_signs=(1, -1),
    build_joint: bool = True,
    joint_fk_samples: int = 64,
    conservative: bool = True,
) -> AspectAtlas:
    """Build the aspect atlas: per (mode, sign) workspace and joint octrees.

    ``joint_depth`` defaults to min(depth, 5): every joint cell needs a full
    direct-kinematics solve, far costlier than the workspace test. Joint
    cells are classified at centers only. ``conservative=False`` drops the
    corner test (center-only labeling, no solid filtering).
    """
    if not 4 <= depth <= 10:
        raise ValueError("depth must be in [4, 10]")
    box = box or workspace_box()
    modes = list(modes) if modes is not None else list(WorkingMode)
    wrap = tuple(box.wraps(axis) for axis in range(3))
    c_reach, c_signs = _sign_grids(geom, box, depth, corners=False)
    if conservative:
        v_reach, v_signs = _sign_grids(geom, box, depth, corners=True)

    joint_flags = None
    if build_joint:
        jbox = jbox or joint_box()
        joint_depth = min(depth, 5) if joint_depth is None else joint_depth
        joint_flags = _joint_flag_grids(geom, jbox, joint_depth, joint_fk_samples)
    else:
        jbox = None
        joint_depth = None

    entries: dict[tuple[WorkingMode, int], AspectEntry] = {}
    for mode in modes:
        k = batch.MODE_ORDER.index(mode)
        for sign in det_signs:
            grid_in = c_reach & (c_signs[k] == sign)
            if conservative:
                grid_in = grid_in & _corner_expand(v_reach & (v_signs[k] == sign), box, depth)
            tree = _grid_to_tree(grid_in, box, depth)
            tree, count_raw, lab, rank = _components_from_grid(tree, grid_in)
            if conservative and count_raw:
                eroded = _erode_box_cells(grid_in, wrap)
                survivors = np.unique(lab[eroded])
                solid = tuple(sorted(int(rank[r]) for r in survivors if r > 0))
            else:
                solid = tuple(range(count_raw))
            in_mask = tree.label
            comp_in = tree.comp[in_mask]
            leaf_counts = (
                np.bincount(comp_in, minlength=count_raw) if count_raw else np.empty(0, int)
            )
            vols = (
                np.bincount(comp_in, weights=tree.leaf_volumes()[in_mask], minlength=count_raw)
                if count_raw
                else np.empty(0)
            )
            joint_tree = None
            n_joint = 0
            if joint_flags is not None:
                jgrid = joint_flags[k, 0 if sign > 0 else 1]
                joint_tree = _grid_to_tree(jgrid, jbox, joint_depth)
                joint_tree, n_joint, _, _ = _components_from_grid(joint_tree, jgrid)
            entries[(mode, sign)] = AspectEntry(
                mode=mode,
                det_sign=sign,
                workspace=tree,
                n_components=len(solid),
                solid_component_ids=solid,
                n_components_raw=count_raw,
                component_leaf_counts=tuple(int(v) for v in leaf_counts),
                component_volumes=tuple(float(v) for v in vols),
                joint=joint_tree,
                n_joint_components=n_joint,
            )
    return AspectAtlas(
        geom=geom, depth=depth, joint_depth=joint_depth, box=box, jbox=jbox, entries=entries
    )


def _classify(config: FullConfiguration, eps: float):
    pair = jacobians(config.geom, config)
    mode = working_mode_of(pair, eps)
    scale = pair.row_norm_scale
    if abs(pair.det_a) < eps * scale:
        raise ParallelSingularError(pair.det_a, scale)
    return mode, (1 if pair.det_a > 0 else -1)


def same_aspect(
    atlas: AspectAtlas,
    config1: FullConfiguration,
    config2: FullConfiguration,
    eps: float = EPS_SING,
) -> bool:
    """True when both configurations sit in the same workspace component.

    Both must be non-singular and share working mode and det(A) sign;
    otherwise ModeMismatchError is raised.
    """
    k1 = _classify(config1, eps)
    k2 = _classify(config2, eps)
    if k1 != k2:
        raise ModeMismatchError(
            f"configurations differ: mode {k1[0].label}/sign {k1[1]:+d} vs "
            f"mode {k2[0].label}/sign {k2[1]:+d}"
        )
    entry = atlas.entries.get(k1)
    if entry is None:
        raise KeyError(f"atlas has no entry for mode {k1[0].label}, sign {k1[1]:+d}")
    la = locate(entry.workspace, config1.pose.as_tuple())
    lb = locate(entry.workspace, config2.pose.as_tuple())
    return la.comp is not None and la.comp >= 0 and la.comp == lb.comp


@dataclass(frozen=True)
class CharacteristicSurface:
    """Interior image of an aspect's singular boundary under the direct problem."""

    mode: WorkingMode
    det_sign: int
    component_id: int
    marked_leaves: np.ndarray
    boundary_leaves: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.marked_leaves.size == 0


def _voxel_to_leaf(tree: Octree, ix, iy, iz) -> np.ndarray:
    code = morton_encode(
        np.asarray(ix, dtype=np.uint64),
        np.asarray(iy, dtype=np.uint64),
        np.asarray(iz, dtype=np.uint64),
    )
    return np.searchsorted(tree.starts, code, side="right") - 1


def characteristic_surface(
    geom: GeometryConfig,
    atlas: AspectAtlas,
    mode: WorkingMode,
    det_sign: int,
    component_id: int,
    fk_samples: int = 64,
) -> CharacteristicSurface:
    """Mark the component leaves hit by assembly poses of its singular boundary.

    Boundary cells are component leaves face-adjacent to OUT leaves that are
    still reachable at their center (cells rejected by the det sign, not by
    reach). Each boundary center is mapped through inverse kinematics in
    ``mode``; every other assembly pose of those actuated angles realizing
    (mode, det sign) inside the same component marks its containing leaf.
    """
    entry = atlas.entries[(mode, det_sign)]
    tree = entry.workspace
    if tree.comp is None:
        raise ValueError("atlas workspace tree lacks component labels")
    if component_id < 0 or component_id >= entry.n_components_raw:
        raise ValueError(f"component {component_id} does not exist")
    n = 1 << tree.max_depth
    comp_grid = _rasterize(tree, tree.comp, np.int64(-1))
    grid_in = comp_grid >= 0
    sel = comp_grid == component_id

    pair_in = []
    pair_out = []
    for axis in range(3):
        wrapped = tree.box.wraps(axis)
        for step in (1, -1):
            neigh_out = ~np.roll(grid_in, -step, axis=axis)
            mask = sel & neigh_out
            if not wrapped:
                edge = [slice(None)] * 3
                edge[axis] = -1 if step == 1 else 0
                mask[tuple(edge)] = False
            iv = np.nonzero(mask)
            if iv[0].size == 0:
                continue
            ov = list(iv)
            ov[axis] = (iv[axis] + step) % n
            pair_in.append(np.stack(iv, axis=1))
            pair_out.append(np.stack(ov, axis=1))
    if not pair_in:
        empty = np.empty(0, dtype=np.int64)
        return CharacteristicSurface(mode, det_sign, component_id, empty, empty)
    vin = np.concatenate(pair_in)
    vout = np.concatenate(pair_out)
    leaf_in = _voxel_to_leaf(tree, vin[:, 0], vin[:, 1], vin[:, 2])
    leaf_out = _voxel_to_leaf(tree, vout[:, 0], vout[:, 1], vout[:, 2])

    out_ids = np.unique(leaf_out)
    centers = tree.leaf_centers()[out_ids]
    reach = batch.strict_reach(geom, centers[:, 0], centers[:, 1], centers[:, 2])
    sign_only = set(out_ids[reach].tolist())

    keep = np.array([lo in sign_only for lo in leaf_out], dtype=bool)
    boundary = np.unique(leaf_in[keep])
    if boundary.size == 0:
        empty = np.empty(0, dtype=np.int64)
        return CharacteristicSurface(mode, det_sign, component_id, empty, empty)

    bc = tree.leaf_centers()[boundary]
    alphas = batch.ik_alpha(geom, bc[:, 0], bc[:, 1], bc[:, 2], mode)
    alphas = np.stack(alphas, axis=1)
    finite = np.isfinite(alphas).all(axis=1)
    alphas = alphas[finite]
    bc = bc[finite]
    idx, x, y, th = batch.fk_roots(geom, alphas, samples=fk_samples)
    marked: set[int] = set()
    if idx.size:
        sgn, det = batch.solution_signs(geom, alphas[idx], x, y, th)
        want = np.array(mode.signs)
        match = (sgn == want[None, :]).all(axis=1)
        match &= (det > 0.0) if det_sign > 0 else (det < 0.0)
        # Drop the identity image of each boundary center itself.
        src = bc[idx]
        dth = np.abs((th - src[:, 2] + math.pi) % (2.0 * math.pi) - math.pi)
        same = (np.abs(x - src[:, 0]) < 1e-6) & (np.abs(y - src[:, 1]) < 1e-6) & (dth < 1e-6)
        match &= ~same
        for xi, yi, ti in zip(x[match], y[match], th[match]):
            try:
                rec = locate(tree, (float(xi), float(yi), float(ti)))
            except Exception:
                continue
            if rec.comp == component_id:
                marked.add(rec.index)
    return CharacteristicSurface(
        mode,
        det_sign,
        component_id,
        np.array(sorted(marked), dtype=np.int64),
        boundary.astype(np.int64),
    )


def write_manifest(atlas: AspectAtlas, outdir, export_trees: bool = True) -> Path:
    """Write octree dumps plus the JSON manifest; returns the manifest path."""
    from .octree import export

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    items = []
    for (mode, sign), entry in sorted(
        atlas.entries.items(), key=lambda kv: (kv[0][0].label, -kv[0][1])
    ):
        tag = _SIGN_TAG[sign]
        wname = f"aspect_w_{mode.label}_{tag}.oct"
        jname = f"aspect_q_{mode.label}_{tag}.oct" if entry.joint is not None else None
        if export_trees:
            export(entry.workspace, outdir / wname)
            if entry.joint is not None:
                export(entry.joint, outdir / jname)
        items.append(
            {
                "mode": mode.label,
                "sign": "+" if sign > 0 else "-",
                "components": entry.n_components,
                "component_ids": list(entry.solid_component_ids),
                "component_leaf_counts": [
                    entry.component_leaf_counts[i] for i in entry.solid_component_ids
                ],
                "component_volumes": [
                    entry.component_volumes[i] for i in entry.solid_component_ids
                ],
                "raw_components": entry.n_components_raw,
                "workspace_dump": wname,
                "joint_dump": jname,
                "joint_components": entry.n_joint_components,
            }
        )
    manifest = {
        "box": {"lo": list(atlas.box.lo), "hi": list(atlas.box.hi), "axes": list(atlas.box.axes)},
        "depth": atlas.depth,
        "joint_depth": atlas.joint_depth,
        "entries": items,
        "total_positive": atlas.total(1),
        "total_negative": atlas.total(-1),
        "grand_total": atlas.grand_total,
    }
    path = outdir / "aspects_manifest.json"
    with open(path, "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
