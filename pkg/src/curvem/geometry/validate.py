"""Shape-regularity checks on meshes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .mesh import Mesh, polygon_area


def kernel_ball(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Largest disk inside the kernel of a counterclockwise polygon.

    The kernel is the intersection of the inner half-planes of all edges, so
    the disk follows from a small linear program. Returns ``(center, radius)``;
    a non-positive radius means the polygon is not star-shaped.
    """
    d = np.roll(points, -1, axis=0) - points
    lengths = np.linalg.norm(d, axis=1)
    keep = lengths > 1e-14 * lengths.max()
    d, p, lengths = d[keep], points[keep], lengths[keep]
    # outward normal (dy, -dx); constraint n.x + r*|n| <= n.p
    normals = np.column_stack([d[:, 1], -d[:, 0]])
    A = np.column_stack([normals, lengths])
    b = np.einsum("ij,ij->i", normals, p)
    res = linprog(c=[0.0, 0.0, -1.0], A_ub=A, b_ub=b,
                  bounds=[(None, None), (None, None), (None, None)], method="highs")
    if res.status != 0:
        return points.mean(axis=0), -np.inf
    return np.asarray(res.x[:2]), float(res.x[2])


def element_diameter(mesh: Mesh, K: int, samples: int = 8) -> float:
    """Diameter estimated from vertices plus interior samples of curved edges."""
    pts = [mesh.chord_polygon(K)]
    t = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    for e, _ in mesh.element_edges(K):
        if mesh.edges[e].curved:
            t0, t1 = mesh.edge_interval(e)
            pts.append(mesh.edge_eval(e, t0 + t * (t1 - t0))[0])
    pts = np.vstack(pts)
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1).max()))


@dataclass
class ElementReport:
    element: int
    diameter: float
    min_edge_ratio: float
    kernel_ratio: float
    signed_area: float

    def passed(self, rho: float) -> bool:
        return (self.signed_area > 0 and self.min_edge_ratio >= rho
                and self.kernel_ratio >= rho)


@dataclass
class ValidationReport:
    rho: float
    elements: list[ElementReport] = field(default_factory=list)

    @property
    def failures(self) -> list[int]:
        return [r.element for r in self.elements if not r.passed(self.rho)]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def min_edge_ratio(self) -> float:
        return min(r.min_edge_ratio for r in self.elements)

    @property
    def min_kernel_ratio(self) -> float:
        return min(r.kernel_ratio for r in self.elements)

    def summary(self) -> str:
        status = "pass" if self.passed else f"FAIL on {len(self.failures)} elements"
        return (f"rho={self.rho}: {status}; min h_e/h_K={self.min_edge_ratio:.3f}, "
                f"min kernel radius/h_K={self.min_kernel_ratio:.3f}")


def mesh_validate(mesh: Mesh, rho: float = 0.05) -> ValidationReport:
    """Check edge-length and star-shapedness regularity of every element.

    Topology defects raise :class:`~curvem.geometry.mesh.MeshError`; geometric
    shortfalls are only reported. Star-shapedness is checked on the polygon
    of chord vertices.
    """
    mesh.check_topology()
    report = ValidationReport(rho)
    for K in range(mesh.n_elements):
        poly = mesh.chord_polygon(K)
        hK = element_diameter(mesh, K)
        ratios = [mesh.chord_length(e) / hK for e, _ in mesh.element_edges(K)]
        area = polygon_area(poly)
        radius = kernel_ball(poly)[1] if area > 0 else -np.inf
        report.elements.append(ElementReport(K, hK, min(ratios), radius / hK, area))
    return report
