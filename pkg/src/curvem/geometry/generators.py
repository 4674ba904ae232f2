"""Mesh families for the disk and sine-bounded test domains."""

from __future__ import annotations

import numpy as np

from .curves import CircleArc, SineGraph
from .mesh import Edge, Element, Mesh

# y = g1(x) bottom and y = g2(x) top boundaries of the sine domain
G1 = SineGraph(amplitude=1.0 / 20.0, frequency=1.0, offset=0.0)
G2 = SineGraph(amplitude=1.0 / 20.0, frequency=3.0, offset=1.0)

INNER_KAPPA = 1.0
OUTER_KAPPA = 5.0


class _Builder:
    """Accumulates vertices and deduplicated edges while elements are added."""

    def __init__(self):
        self.vertices: list[tuple[float, float]] = []
        self.edges: list[Edge] = []
        self.elements: list[Element] = []
        self._edge_index: dict[frozenset, int] = {}

    def vertex(self, x: float, y: float) -> int:
        self.vertices.append((float(x), float(y)))
        return len(self.vertices) - 1

    def edge(self, a: int, b: int, curve=None, t=None) -> int:
        """Signed 1-based reference for the traversal a -> b."""
        key = frozenset((a, b))
        if key in self._edge_index:
            e = self._edge_index[key]
            return e + 1 if self.edges[e].v == (a, b) else -(e + 1)
        self.edges.append(Edge((a, b), curve, None if t is None else (float(t[0]), float(t[1]))))
        self._edge_index[key] = len(self.edges) - 1
        return len(self.edges)

    def element(self, refs, kappa=1.0):
        self.elements.append(Element(tuple(refs), float(kappa)))

    def build(self, curves) -> Mesh:
        return Mesh(self.vertices, self.edges, self.elements, curves)


def map_to_sine_domain(xs, ys):
    """Map unit-square nodes onto the domain ``g1(x) < y < g2(x)``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    lower = ys + G1.height(xs) * (1.0 - 2.0 * ys)
    upper = 1.0 - ys + G2.height(xs) * (2.0 * ys - 1.0)
    return xs, np.where(ys <= 0.5, lower, upper)


def gen_mapped_square_mesh(n: int | None = None, square_mesh: Mesh | None = None) -> Mesh:
    """Sine-domain mesh from an ``n x n`` quad grid or from a unit-square mesh.

    Edges lying on ``y = 0`` or ``y = 1`` of the square are bound to the bottom
    and top sine curves with parameter ``x``; all other edges stay straight.
    """
    if square_mesh is None:
        if n is None or n < 1:
            raise ValueError("n must be a positive integer")
        square_mesh = unit_square_quads(n)
    sq = square_mesh.vertices
    xs, ys = map_to_sine_domain(sq[:, 0], sq[:, 1])
    # snap side and corner nodes exactly onto the curves
    ys = np.where(sq[:, 1] == 0.0, G1.height(xs), ys)
    ys = np.where(sq[:, 1] == 1.0, G2.height(xs), ys)
    vertices = np.column_stack([xs, ys])
    edges = []
    for edge in square_mesh.edges:
        a, b = edge.v
        on = [name for name, level in (("g1", 0.0), ("g2", 1.0))
              if sq[a, 1] == level and sq[b, 1] == level]
        if on:
            edges.append(Edge((a, b), on[0], (float(sq[a, 0]), float(sq[b, 0]))))
        else:
            edges.append(Edge((a, b)))
    return Mesh(vertices, edges, square_mesh.elements, {"g1": G1, "g2": G2})


def unit_square_quads(n: int) -> Mesh:
    b = _Builder()
    ids = [[b.vertex(i / n, j / n) for j in range(n + 1)] for i in range(n + 1)]
    for j in range(n):
        for i in range(n):
            a, c = ids[i][j], ids[i + 1][j]
            d, e = ids[i + 1][j + 1], ids[i][j + 1]
            b.element([b.edge(a, c), b.edge(c, d), b.edge(d, e), b.edge(e, a)])
    return b.build({})


def _sector_counts(rings: int, sectors: int) -> list[int]:
    """Sectors per ring, halving inwards while elements stay roughly square."""
    counts = [sectors]
    for j in range(rings - 1, 0, -1):
        n = counts[0]
        radius = j / rings
        if n % 2 == 0 and n // 2 >= 4 and 2 * np.pi * radius / (n // 2) <= 1.5 / rings:
            n //= 2
        counts.insert(0, n)
    return counts


def gen_polar_disk_mesh(rings: int, sectors: int, interface_at_half: bool = False) -> Mesh:
    """Unit-disk mesh of annular sectors around a fan of central triangles.

    Ring ``j`` spans radii ``[(j-1)/rings, j/rings]``. The sector count is
    ``sectors`` in the outer ring and halves towards the center where the
    elements would otherwise become thin, which leaves hanging vertices on the
    finer side. Only edges on ``r = 1`` (and on ``r = 1/2`` with
    ``interface_at_half``) are curved. With the interface flag, elements inside
    ``r < 1/2`` get ``kappa = 1`` and the others ``kappa = 5``.
    """
    if rings < 1 or sectors < 3:
        raise ValueError("need rings >= 1 and sectors >= 3")
    if interface_at_half and rings % 2:
        raise ValueError("an interface at r = 1/2 needs an even number of rings")
    counts = _sector_counts(rings, sectors)
    circle_counts = [max(counts[j], counts[min(j + 1, rings - 1)]) for j in range(rings)]
    half = rings // 2 if interface_at_half else None

    curves = {"boundary": CircleArc((0.0, 0.0), 1.0, 0.0, 2 * np.pi)}
    if interface_at_half:
        curves["interface"] = CircleArc((0.0, 0.0), 0.5, 0.0, 2 * np.pi)

    b = _Builder()
    origin = b.vertex(0.0, 0.0)
    circle_ids = []  # circle j (radius (j+1)/rings) -> vertex ids
    for j, m in enumerate(circle_counts):
        r = (j + 1) / rings
        theta = 2 * np.pi * np.arange(m) / m
        circle_ids.append([b.vertex(r * np.cos(a), r * np.sin(a)) for a in theta])

    def circle_curve(j):
        if j == rings - 1:
            return "boundary"
        if half is not None and j + 1 == half:
            return "interface"
        return None

    def arc(j, i0, i1):
        """Vertex chain on circle j covering sector [i0/n, i1/n] of that circle."""
        m = circle_counts[j]
        return [(i % m) for i in range(i0, i1 + 1)]

    def arc_refs(j, chain, forward):
        m = circle_counts[j]
        curve = circle_curve(j)
        refs = []
        steps = list(zip(chain[:-1], chain[1:]))
        for a, c in steps:
            va, vc = circle_ids[j][a], circle_ids[j][c]
            t = None
            if curve is not None:
                ta = 2 * np.pi * a / m
                tc = 2 * np.pi * c / m
                if tc <= ta:
                    tc += 2 * np.pi
                t = (ta, tc)
            ref = b.edge(va, vc, curve, t)
            refs.append(ref)
        if not forward:
            refs = [-r for r in reversed(refs)]
        return refs

    for j in range(rings):
        n = counts[j]
        m_out = circle_counts[j]
        step_out = m_out // n
        kappa = 1.0
        if half is not None:
            kappa = INNER_KAPPA if j < half else OUTER_KAPPA
        for i in range(n):
            chain = arc(j, i * step_out, (i + 1) * step_out)
            if j == 0:
                v_start = circle_ids[0][chain[0]]
                v_end = circle_ids[0][chain[-1]]
                refs = ([b.edge(origin, v_start)] + arc_refs(0, chain, forward=True)
                        + [b.edge(v_end, origin)])
            else:
                m_in = circle_counts[j - 1]
                step_in = m_in // n
                inner_chain = arc(j - 1, i * step_in, (i + 1) * step_in)
                in_start = circle_ids[j - 1][inner_chain[0]]
                in_end = circle_ids[j - 1][inner_chain[-1]]
                out_start = circle_ids[j][chain[0]]
                out_end = circle_ids[j][chain[-1]]
                refs = ([b.edge(in_start, out_start)] + arc_refs(j, chain, forward=True)
                        + [b.edge(out_end, in_end)]
                        + arc_refs(j - 1, inner_chain, forward=False))
            b.element(refs, kappa)
    return b.build(curves)
