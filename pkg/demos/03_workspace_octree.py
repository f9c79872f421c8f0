"""Octree decomposition of the pose space (x, y, theta).

Cells are classified by the kinematic model at their centers, merged into
the canonical linear octree, and analyzed for face connectivity with the
orientation axis wrapping at 2 pi.
"""

from planar3rrr import GeometryConfig, WorkingMode
from planar3rrr.octree import (
    CellPredicate,
    build_octree,
    connected_components,
    dumps,
    locate,
    volume,
    workspace_box,
)


def main():
    geom = GeometryConfig.reference()
    box = workspace_box()
    depth = 6
    pred = CellPredicate(mode=WorkingMode.C, det_sign=1, space="workspace")
    tree = build_octree(geom, pred, box, depth)
    tree, count = connected_components(tree)
    print(f"mode c, det(A) > 0, depth {depth}:")
    print(f"  {tree.n_leaves} leaves tile {box.volume:.3f} units^3 of pose space")
    print(f"  region volume {volume(tree):.3f}, {count} face-connected component(s)")
    edges = box.cell_edges(depth)
    print(f"  cell size {edges[0]:.5f} x {edges[1]:.5f} length units x {edges[2]:.5f} rad")

    rec = locate(tree, (1.102292, 1.956300, 1.003615))
    print(f"  benchmark pose sits in leaf {rec.index} (IN={rec.label}, component {rec.comp})")

    head = "\n".join(dumps(tree).splitlines()[:4])
    print("\ndump head:\n" + head)


if __name__ == "__main__":
    main()
