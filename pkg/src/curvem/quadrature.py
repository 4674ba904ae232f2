"""Edge and element quadrature on (possibly curved) polygons.

Edge integrals are pulled back to the parameter interval of the edge and use
Gauss-Legendre nodes weighted by the speed ``|gamma'(t)|``. Monomial moments
over an element follow from the divergence theorem, which only needs edge
quadrature. General integrands over an element use a fan of (curved)
triangles around a star point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .basis import dim2, exponents
from .geometry.mesh import Mesh, polygon_centroid
from .geometry.validate import element_diameter, kernel_ball


class QuadratureError(RuntimeError):
    pass


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """``n``-point Gauss-Legendre rule on ``[min(a,b), max(a,b)]`` (positive weights)."""
    if n < 1:
        raise ValueError("need at least one quadrature point")
    lo, hi = min(a, b), max(a, b)
    x, w = _leggauss(n)
    return lo + 0.5 * (x + 1.0) * (hi - lo), 0.5 * (hi - lo) * w


@dataclass(frozen=True)
class QuadratureOrders:
    """Numbers of Gauss points: per straight edge, per curved edge, and radially."""

    straight: int
    curved: int
    radial: int

    @classmethod
    def for_order(cls, k: int) -> "QuadratureOrders":
        return cls(straight=k + 4, curved=k + 8, radial=k + 3)

    @classmethod
    def from_straight(cls, n: int) -> "QuadratureOrders":
        return cls(straight=n, curved=n + 4, radial=max(n - 1, 1))

    def scaled(self, factor: float) -> "QuadratureOrders":
        return QuadratureOrders(*(max(1, int(round(factor * v)))
                                  for v in (self.straight, self.curved, self.radial)))

    def edge_points(self, curved: bool) -> int:
        return self.curved if curved else self.straight


@dataclass(frozen=True)
class EdgeRule:
    """Gauss rule on one edge as seen by an element traversing it with ``sign``.

    ``normals`` are unit outward normals for that traversal; ``ds`` holds the
    arc-length weights ``w_q |gamma'(t_q)|``.
    """

    edge: int
    sign: int
    curved: bool
    t0: float
    t1: float
    t: np.ndarray
    w: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    speed: np.ndarray
    normals: np.ndarray

    @property
    def ds(self) -> np.ndarray:
        return self.w * self.speed

    @property
    def length(self) -> float:
        return float(self.ds.sum())

    def integrate(self, values) -> float:
        return float(np.dot(self.ds, values))


def edge_rule(mesh: Mesh, e: int, npts: int, sign: int = 1) -> EdgeRule:
    t0, t1 = mesh.edge_interval(e)
    t, w = gauss_legendre(npts, t0, t1)
    points, tangents = mesh.edge_eval(e, t)
    speed = np.linalg.norm(tangents, axis=1)
    # +1 when the element walks the edge towards increasing t
    direction = sign * (1 if t1 > t0 else -1)
    normals = direction * np.column_stack([tangents[:, 1], -tangents[:, 0]]) / speed[:, None]
    return EdgeRule(e, sign, mesh.edges[e].curved, t0, t1, t, w, points, tangents, speed,
                    normals)


def edge_integral(mesh: Mesh, e: int, p: int, f) -> float:
    """``int_e f ds`` with a ``p``-point rule in the edge parameter."""
    rule = edge_rule(mesh, e, p)
    return rule.integrate(f(rule.points))


def element_edge_rules(mesh: Mesh, K: int, orders: QuadratureOrders) -> list[EdgeRule]:
    return [edge_rule(mesh, e, orders.edge_points(mesh.edges[e].curved), s)
            for e, s in mesh.element_edges(K)]


def raw_moments(rules: list[EdgeRule], center, scale: float, n: int) -> np.ndarray:
    """``int_K ((x - center) / scale) ** a dK`` for all ``|a| <= n`` (graded order).

    Uses ``int_K X^a Y^b dx = scale / (a + 1) * oint X^(a+1) Y^b n_x ds``.
    """
    exps = exponents(n)
    mu = np.zeros(dim2(n))
    center = np.asarray(center, dtype=float)
    for r in rules:
        z = (r.points - center) / scale
        X, Y = z[:, 0], z[:, 1]
        wx = r.ds * r.normals[:, 0]
        px = X[:, None] ** np.arange(n + 2)
        py = Y[:, None] ** np.arange(n + 1)
        a, b = exps[:, 0], exps[:, 1]
        mu += scale * (wx @ (px[:, a + 1] * py[:, b])) / (a + 1)
    return mu


def monomial_moments(mesh: Mesh, K: int, n: int, center=None, h=None,
                     orders: QuadratureOrders | None = None,
                     rules: list[EdgeRule] | None = None) -> np.ndarray:
    """Moments ``int_K m_a dK`` of the scaled monomials of element ``K``.

    ``center``/``h`` default to the element centroid and diameter.
    """
    if rules is None:
        rules = element_edge_rules(mesh, K, orders or QuadratureOrders.for_order(n))
    if center is None or h is None:
        c, hk, _ = element_frame(mesh, K, rules)
        center = c if center is None else center
        h = hk if h is None else h
    return raw_moments(rules, center, h, n)


def element_frame(mesh: Mesh, K: int, rules: list[EdgeRule]) -> tuple[np.ndarray, float, float]:
    """Centroid, diameter and area of the (curved) element."""
    ref = polygon_centroid(mesh.chord_polygon(K))
    hK = element_diameter(mesh, K)
    mu = raw_moments(rules, ref, hK, 1)
    area = mu[0]
    if area <= 0:
        raise QuadratureError(f"element {K} has non-positive area {area}")
    centroid = ref + hK * mu[1:3] / mu[0]
    return centroid, hK, area


@dataclass(frozen=True)
class BulkRule:
    points: np.ndarray
    weights: np.ndarray
    star: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _fan(rules: list[EdgeRule], star: np.ndarray, s: np.ndarray, ws: np.ndarray):
    pts, wts = [], []
    for r in rules:
        # (gamma - star) x gamma' with the orientation of the traversal
        height = np.einsum("ij,ij->i", r.points - star, r.normals) * r.speed
        if np.any(height <= 0):
            return None
        pts.append((1 - s)[:, None, None] * r.points[None] + s[:, None, None] * star)
        wts.append(np.outer(ws * (1 - s), r.w * height))
    return np.concatenate([p.reshape(-1, 2) for p in pts]), np.concatenate(
        [w.ravel() for w in wts])


def bulk_rule(mesh: Mesh, K: int, orders: QuadratureOrders,
              rules: list[EdgeRule] | None = None) -> BulkRule:
    """Fan rule ``(t, s) -> (1 - s) gamma(t) + s x_c`` over every edge of ``K``.

    The star point ``x_c`` is the centroid of the chord polygon, or the center
    of the largest disk in the polygon kernel if the centroid does not see
    every boundary node.
    """
    if rules is None:
        rules = element_edge_rules(mesh, K, orders)
    s, ws = gauss_legendre(orders.radial, 0.0, 1.0)
    poly = mesh.chord_polygon(K)
    star = polygon_centroid(poly)
    fan = _fan(rules, star, s, ws)
    if fan is None:
        star, radius = kernel_ball(poly)
        fan = _fan(rules, star, s, ws) if radius > 0 else None
    if fan is None:
        raise QuadratureError(f"element {K} is not star-shaped with respect to its "
                              "chord centroid or kernel center")
    return BulkRule(fan[0], fan[1], star)


def bulk_integral(rule: BulkRule, f) -> float:
    """``int_K f dK`` for a vectorized ``f(points)``."""
    return rule.integrate(f(rule.points))
