"""Polygonal mesh with optionally curved edges.

Elements are stored as cycles of signed, 1-based edge references: ``+(e+1)``
traverses edge ``e`` from ``v0`` to ``v1``, ``-(e+1)`` from ``v1`` to ``v0``.
Each edge owns a single canonical parametrization shared by both incident
elements. Straight edges use the affine map on ``[0, 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .curves import Curve


class MeshError(ValueError):
    """Structural defect in a mesh (open cycle, dangling edge, bad reference)."""

    def __init__(self, message: str, offenders=()):
        self.offenders = list(offenders)
        if self.offenders:
            message = f"{message}: {self.offenders}"
        super().__init__(message)


@dataclass(frozen=True)
class Edge:
    v: tuple[int, int]
    curve: str | None = None
    t: tuple[float, float] | None = None

    @property
    def curved(self) -> bool:
        return self.curve is not None


@dataclass(frozen=True)
class Element:
    edges: tuple[int, ...]
    kappa: float = 1.0


class Mesh:
    """Immutable polygonal mesh; see the module docstring for conventions."""

    def __init__(self, vertices, edges, elements, curves: dict[str, Curve] | None = None):
        self.vertices = np.array(vertices, dtype=float).reshape(-1, 2)
        self.vertices.setflags(write=False)
        self.edges: tuple[Edge, ...] = tuple(
            e if isinstance(e, Edge) else Edge(tuple(e)) for e in edges)
        self.elements: tuple[Element, ...] = tuple(
            el if isinstance(el, Element) else Element(tuple(el)) for el in elements)
        self.curves: dict[str, Curve] = dict(curves or {})
        self._check_references()

    def _check_references(self):
        nv, ne = len(self.vertices), len(self.edges)
        bad = [i for i, e in enumerate(self.edges)
               if len(e.v) != 2 or not all(0 <= v < nv for v in e.v) or e.v[0] == e.v[1]]
        if bad:
            raise MeshError("edges with invalid vertex references", bad)
        bad = [i for i, e in enumerate(self.edges)
               if e.curved and (e.curve not in self.curves or e.t is None)]
        if bad:
            raise MeshError("edges bound to unknown curves", bad)
        bad = [K for K, el in enumerate(self.elements)
               if len(el.edges) < 2 or any(s == 0 or abs(s) > ne for s in el.edges)]
        if bad:
            raise MeshError("elements with invalid edge references", bad)

    # -- sizes ---------------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    # -- topology ------------------------------------------------------------
    def element_edges(self, K: int) -> list[tuple[int, int]]:
        """``(edge_id, sign)`` pairs in counterclockwise traversal order."""
        return [(abs(s) - 1, 1 if s > 0 else -1) for s in self.elements[K].edges]

    def oriented_vertices(self, e: int, sign: int) -> tuple[int, int]:
        a, b = self.edges[e].v
        return (a, b) if sign > 0 else (b, a)

    def element_vertices(self, K: int) -> list[int]:
        return [self.oriented_vertices(e, s)[0] for e, s in self.element_edges(K)]

    @cached_property
    def edge_uses(self) -> list[list[tuple[int, int]]]:
        """For every edge, the list of ``(element, sign)`` referencing it."""
        uses: list[list[tuple[int, int]]] = [[] for _ in self.edges]
        for K in range(self.n_elements):
            for e, s in self.element_edges(K):
                uses[e].append((K, s))
        return uses

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.array([len(u) == 1 for u in self.edge_uses], dtype=bool)
        mask.setflags(write=False)
        return mask

    @property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero(self.boundary_mask)

    def check_topology(self) -> None:
        """Raise :class:`MeshError` on open cycles, dangling or over-used edges."""
        open_cycles, repeated = [], []
        for K in range(self.n_elements):
            ee = self.element_edges(K)
            verts = [self.oriented_vertices(e, s) for e, s in ee]
            if any(verts[i][1] != verts[(i + 1) % len(verts)][0] for i in range(len(verts))):
                open_cycles.append(K)
            starts = [v[0] for v in verts]
            if len(set(starts)) != len(starts) or len({e for e, _ in ee}) != len(ee):
                repeated.append(K)
        if open_cycles:
            raise MeshError("elements with open edge cycles", open_cycles)
        if repeated:
            raise MeshError("elements with repeated vertices or edges", repeated)
        dangling = [e for e, u in enumerate(self.edge_uses) if not u]
        if dangling:
            raise MeshError("dangling edges referenced by no element", dangling)
        overused = [e for e, u in enumerate(self.edge_uses)
                    if len(u) > 2 or (len(u) == 2 and u[0][1] == u[1][1])]
        if overused:
            raise MeshError("edges not shared by exactly two oppositely oriented elements",
                            overused)
        for e, edge in enumerate(self.edges):
            if edge.curved:
                pts, _ = self.curves[edge.curve].evaluate(np.asarray(edge.t, dtype=float))
                gap = np.max(np.abs(pts - self.vertices[list(edge.v)]))
                if gap > 1e-12 * max(1.0, np.abs(self.vertices).max()):
                    raise MeshError("curve endpoints do not match edge vertices", [e])

    # -- geometry ------------------------------------------------------------
    def edge_interval(self, e: int) -> tuple[float, float]:
        edge = self.edges[e]
        return (float(edge.t[0]), float(edge.t[1])) if edge.curved else (0.0, 1.0)

    def edge_eval(self, e: int, t) -> tuple[np.ndarray, np.ndarray]:
        """Canonical parametrization of edge ``e``: points and derivatives at ``t``."""
        edge = self.edges[e]
        t = np.asarray(t, dtype=float)
        if edge.curved:
            return self.curves[edge.curve].evaluate(t)
        a = self.vertices[edge.v[0]]
        d = self.vertices[edge.v[1]] - a
        pts = a + t[..., None] * d
        return pts, np.broadcast_to(d, pts.shape).copy()

    def chord_length(self, e: int) -> float:
        a, b = self.edges[e].v
        return float(np.linalg.norm(self.vertices[b] - self.vertices[a]))

    def chord_polygon(self, K: int) -> np.ndarray:
        return self.vertices[self.element_vertices(K)]

    def kappa(self) -> np.ndarray:
        return np.array([el.kappa for el in self.elements])

    def straightened(self) -> "Mesh":
        """Copy with every curve binding dropped, so each edge becomes its chord."""
        edges = [Edge(e.v) for e in self.edges]
        return Mesh(self.vertices, edges, self.elements, {})

    def with_kappa(self, kappa) -> "Mesh":
        kappa = np.broadcast_to(np.asarray(kappa, dtype=float), (self.n_elements,))
        elements = [Element(el.edges, float(k)) for el, k in zip(self.elements, kappa)]
        return Mesh(self.vertices, self.edges, elements, self.curves)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return (np.array_equal(self.vertices, other.vertices)
                and self.edges == other.edges
                and self.elements == other.elements
                and self.curves == other.curves)

    __hash__ = None

    def __repr__(self) -> str:
        nc = sum(e.curved for e in self.edges)
        return (f"Mesh({self.n_vertices} vertices, {self.n_edges} edges "
                f"({nc} curved), {self.n_elements} elements)")


def polygon_area(points: np.ndarray) -> float:
    """Signed shoelace area (positive for counterclockwise order)."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    if abs(a) < 1e-300:
        return points.mean(axis=0)
    return np.array([((x + xn) * cross).sum(), ((y + yn) * cross).sum()]) / (6.0 * a)
