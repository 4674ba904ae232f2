"""Generate centroidal Voronoi meshes of the unit square as JSON mesh files.

Seeds are drawn with a fixed RNG seed, relaxed by Lloyd iterations and
clipped to the square by reflecting them across its four sides. Edges
shorter than ``--min-edge`` times the mean edge are collapsed so that the
result passes ``mesh_validate`` at rho = 0.05.

    python tools/make_voronoi_fixture.py 64 tests/fixtures/voronoi_64.json
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy.spatial import Voronoi

from curvem.geometry import Edge, Element, Mesh, mesh_validate, mesh_write, polygon_area, \
    polygon_centroid


def _reflect(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return np.concatenate([points,
                           np.column_stack([-x, y]), np.column_stack([2 - x, y]),
                           np.column_stack([x, -y]), np.column_stack([x, 2 - y])])


def _cells(points: np.ndarray) -> tuple[np.ndarray, list[list[int]]]:
    vor = Voronoi(_reflect(points))
    cells = [vor.regions[vor.point_region[i]] for i in range(len(points))]
    verts = np.clip(vor.vertices, 0.0, 1.0)
    verts[np.abs(verts) < 1e-10] = 0.0
    verts[np.abs(verts - 1.0) < 1e-10] = 1.0
    return verts, cells


def lloyd(points: np.ndarray, iterations: int) -> np.ndarray:
    for _ in range(iterations):
        verts, cells = _cells(points)
        points = np.array([polygon_centroid(_ccw(verts[c])) for c in cells])
    return points


def _ccw(poly: np.ndarray) -> np.ndarray:
    c = poly.mean(axis=0)
    order = np.argsort(np.arctan2(poly[:, 1] - c[1], poly[:, 0] - c[0]))
    return poly[order]


def build_mesh(points: np.ndarray, min_edge: float) -> Mesh:
    verts, cells = _cells(points)
    # merge coincident vertices, then collapse short edges onto one endpoint
    key = {}
    remap = np.empty(len(verts), dtype=int)
    uniq = []
    for i, v in enumerate(np.round(verts, 12)):
        t = (v[0], v[1])
        if t not in key:
            key[t] = len(uniq)
            uniq.append(verts[i])
        remap[i] = key[t]
    uniq = np.array(uniq)
    polys = [[int(remap[v]) for v in c] for c in cells]
    polys = [list(dict.fromkeys(p)) for p in polys]

    lengths = [np.linalg.norm(uniq[p[i]] - uniq[p[(i + 1) % len(p)]])
               for p in polys for i in range(len(p))]
    threshold = min_edge * float(np.mean(lengths))
    parent = list(range(len(uniq)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def on_side(v):
        x, y = uniq[v]
        return {s for s, hit in (("x0", x == 0), ("x1", x == 1), ("y0", y == 0), ("y1", y == 1))
                if hit}

    for p in polys:
        for i in range(len(p)):
            a, b = find(p[i]), find(p[(i + 1) % len(p)])
            if a == b or np.linalg.norm(uniq[a] - uniq[b]) >= threshold:
                continue
            sa, sb = on_side(a), on_side(b)
            # keep corners and boundary nodes where they are
            if len(sb) > len(sa) or (sb and not sa):
                a, b = b, a
                sa, sb = sb, sa
            if sb - sa:
                continue
            parent[b] = a
    polys = [list(dict.fromkeys(find(v) for v in p)) for p in polys]

    used = sorted({v for p in polys for v in p})
    new_id = {v: i for i, v in enumerate(used)}
    vertices = uniq[used]
    edges: list[Edge] = []
    index: dict[frozenset, int] = {}
    elements = []
    for p in polys:
        p = [new_id[v] for v in p]
        if polygon_area(vertices[p]) < 0:
            p = p[::-1]
        refs = []
        for i in range(len(p)):
            a, b = p[i], p[(i + 1) % len(p)]
            k = frozenset((a, b))
            if k not in index:
                index[k] = len(edges)
                edges.append(Edge((a, b)))
            e = index[k]
            refs.append(e + 1 if edges[e].v == (a, b) else -(e + 1))
        elements.append(Element(tuple(refs)))
    return Mesh(vertices, edges, elements, {})


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("cells", type=int)
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--lloyd", type=int, default=60)
    ap.add_argument("--min-edge", type=float, default=0.25)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    points = lloyd(rng.random((args.cells, 2)), args.lloyd)
    mesh = build_mesh(points, args.min_edge)
    mesh.check_topology()
    report = mesh_validate(mesh, rho=0.05)
    if not report.passed:
        print(report.summary(), file=sys.stderr)
        return 1
    mesh_write(mesh, args.out)
    print(f"{args.out}: {mesh.n_elements} cells, {mesh.n_edges} edges, "
          f"min edge ratio {report.min_edge_ratio:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
