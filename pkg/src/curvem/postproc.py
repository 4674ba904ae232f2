"""Computable errors, DoF interpolation and convergence rates."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import GlobalDofMap, build_dof_map
from .element import LocalElement
from .geometry.mesh import Mesh
from .quadrature import QuadratureOrders


@dataclass
class ErrorPair:
    """Errors of the Ritz-Galerkin projection of the discrete solution.

    ``EH1``/``EL2`` are relative to ``|u|_1`` and ``||u||_0``; when a
    denominator vanishes the absolute error is reported and ``relative`` is
    False for that norm.
    """

    EH1: float
    EL2: float
    h: float
    ndofs: int
    abs_H1: float = 0.0
    abs_L2: float = 0.0
    relative: tuple[bool, bool] = (True, True)


def _elements(mesh: Mesh, k: int, orders, elements):
    if elements is not None:
        return elements
    return [LocalElement(mesh, K, k, orders) for K in range(mesh.n_elements)]


def compute_errors(mesh: Mesh, k: int, dofs: np.ndarray, u_exact, grad_u_exact,
                   orders: QuadratureOrders | None = None,
                   elements: list[LocalElement] | None = None) -> ErrorPair:
    """Relative H1-seminorm and L2 errors of ``u - Pi^nabla u_h`` summed over elements."""
    orders = orders or QuadratureOrders.for_order(k)
    dofmap = build_dof_map(mesh, k)
    num_h1 = num_l2 = den_h1 = den_l2 = 0.0
    h = 0.0
    for le in _elements(mesh, k, orders, elements):
        idx, sgn = dofmap.local_map(mesh, le.K)
        coeffs = le.ritz_galerkin @ (sgn * dofs[idx])
        pts, w = le.bulk.points, le.bulk.weights
        u = u_exact(pts)
        du = grad_u_exact(pts)
        uh = le.basis.eval(pts) @ coeffs
        duh = np.einsum("qjd,j->qd", le.basis.grad(pts), coeffs)
        num_h1 += w @ ((du - duh) ** 2).sum(-1)
        num_l2 += w @ (u - uh) ** 2
        den_h1 += w @ (du ** 2).sum(-1)
        den_l2 += w @ u ** 2
        h = max(h, le.h)
    abs_h1, abs_l2 = math.sqrt(num_h1), math.sqrt(num_l2)
    rel = (den_h1 > 0, den_l2 > 0)
    eh1 = abs_h1 / math.sqrt(den_h1) if rel[0] else abs_h1
    el2 = abs_l2 / math.sqrt(den_l2) if rel[1] else abs_l2
    return ErrorPair(eh1, el2, h, int(len(dofs)), abs_h1, abs_l2, rel)


def interpolate_dofs(mesh: Mesh, k: int, v, orders: QuadratureOrders | None = None,
                     elements: list[LocalElement] | None = None,
                     dofmap: GlobalDofMap | None = None) -> np.ndarray:
    """Global DoF interpolant of ``v``: edge and bulk moments by quadrature.

    Each edge block is written by every incident element; the values agree
    exactly because both read the same canonical quadrature.
    """
    orders = orders or QuadratureOrders.for_order(k)
    dofmap = dofmap or build_dof_map(mesh, k)
    out = np.zeros(dofmap.size)
    for le in _elements(mesh, k, orders, elements):
        idx, sgn = dofmap.local_map(mesh, le.K)
        out[idx] = sgn * le.interpolate(v)
    return out


def fit_rates(h, errors) -> tuple[float, list[float]]:
    """Least-squares slope of ``log E`` against ``log h`` and the pairwise slopes."""
    h = np.asarray(h, dtype=float)
    e = np.asarray(errors, dtype=float)
    if len(h) < 2:
        raise ValueError("need at least two refinement levels to fit a rate")
    lh, le = np.log(h), np.log(e)
    slope = float(np.polyfit(lh, le, 1)[0])
    steps = [float((le[i] - le[i + 1]) / (lh[i] - lh[i + 1])) for i in range(len(h) - 1)]
    return slope, steps


@dataclass
class ConvergenceReport:
    k: int
    family: str
    levels: list[ErrorPair] = field(default_factory=list)

    def slopes(self) -> dict[str, float]:
        h = [p.h for p in self.levels]
        return {"H1": fit_rates(h, [p.EH1 for p in self.levels])[0],
                "L2": fit_rates(h, [p.EL2 for p in self.levels])[0]}

    def rows(self) -> list[dict]:
        h = [p.h for p in self.levels]
        s1 = [math.nan] + (fit_rates(h, [p.EH1 for p in self.levels])[1]
                           if len(h) > 1 else [])
        s2 = [math.nan] + (fit_rates(h, [p.EL2 for p in self.levels])[1]
                           if len(h) > 1 else [])
        return [{"k": self.k, "mesh_family": self.family, "level": i, "h": p.h,
                 "ndofs": p.ndofs, "EH1": p.EH1, "EL2": p.EL2,
                 "slope_H1": s1[i], "slope_L2": s2[i]} for i, p in enumerate(self.levels)]


CSV_COLUMNS = ["k", "mesh_family", "level", "h", "ndofs", "EH1", "EL2", "slope_H1", "slope_L2"]


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else format(v, ".17g")
    return str(v)


def write_report_csv(reports: list[ConvergenceReport], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        for row in rep.rows():
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def write_solution_csv(dofs: np.ndarray, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["dof_id", "value"])
    for i, v in enumerate(dofs):
        writer.writerow([i, format(float(v), ".17g")])
