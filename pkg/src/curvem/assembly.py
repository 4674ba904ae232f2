"""Global numbering, weak Dirichlet data, assembly and linear solve.

Global unknowns are ``k`` edge moments per mesh edge, taken in the edge's
canonical orientation, followed by ``dim P_{k-2}`` bulk moments per element.
Sharing one block per edge between its two elements is what makes the
discrete space nonconforming of order ``k``. Boundary edge moments are fixed
by the Dirichlet data and eliminated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import MappedEdgeBasis, dim2
from .element import LocalElement
from .geometry.mesh import Mesh
from .quadrature import QuadratureOrders, edge_rule

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    def __init__(self, message: str, residuals=()):
        self.residuals = list(residuals)
        super().__init__(message)


@dataclass(frozen=True)
class GlobalDofMap:
    k: int
    n_edges: int
    n_elements: int
    constrained: np.ndarray

    @classmethod
    def build(cls, mesh: Mesh, k: int) -> "GlobalDofMap":
        constrained = np.zeros(k * mesh.n_edges + dim2(k - 2) * mesh.n_elements, dtype=bool)
        for e in mesh.boundary_edges:
            constrained[k * e:k * (e + 1)] = True
        return cls(k, mesh.n_edges, mesh.n_elements, constrained)

    @property
    def size(self) -> int:
        return len(self.constrained)

    @property
    def n_bulk(self) -> int:
        return dim2(self.k - 2)

    @property
    def free(self) -> np.ndarray:
        return np.flatnonzero(~self.constrained)

    def edge_dofs(self, e: int) -> np.ndarray:
        return np.arange(self.k * e, self.k * (e + 1))

    def bulk_dofs(self, K: int) -> np.ndarray:
        start = self.k * self.n_edges + self.n_bulk * K
        return np.arange(start, start + self.n_bulk)

    def local_map(self, mesh: Mesh, K: int) -> tuple[np.ndarray, np.ndarray]:
        """Global indices and signs so that ``local = signs * global[indices]``."""
        idx, sgn = [], []
        parity = (-1.0) ** np.arange(self.k)
        for e, s in mesh.element_edges(K):
            idx.append(self.edge_dofs(e))
            sgn.append(np.ones(self.k) if s > 0 else parity)
        idx.append(self.bulk_dofs(K))
        sgn.append(np.ones(self.n_bulk))
        return np.concatenate(idx), np.concatenate(sgn)


def build_dof_map(mesh: Mesh, k: int) -> GlobalDofMap:
    return GlobalDofMap.build(mesh, k)


def dirichlet_moments(mesh: Mesh, dofmap: GlobalDofMap, g,
                      orders: QuadratureOrders | None = None,
                      edge_length: str = "arc") -> np.ndarray:
    """Full-length vector holding ``|e|^-1 int_e g m_i ds`` on boundary edge blocks."""
    k = dofmap.k
    orders = orders or QuadratureOrders.for_order(k)
    values = np.zeros(dofmap.size)
    for e in mesh.boundary_edges:
        r = edge_rule(mesh, e, orders.edge_points(mesh.edges[e].curved))
        length = r.length if edge_length == "arc" else mesh.chord_length(e)
        mt = MappedEdgeBasis(r.t0, r.t1, k - 1).eval(r.t)
        values[dofmap.edge_dofs(e)] = (r.ds * g(r.points)) @ mt / length
    return values


@dataclass
class GlobalSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    dofmap: GlobalDofMap
    fixed_values: np.ndarray
    elements: list[LocalElement] = field(repr=False, default_factory=list)
    full_matrix: sp.csr_matrix | None = field(repr=False, default=None)
    diagnostics: dict = field(default_factory=dict)

    def expand(self, free_values: np.ndarray) -> np.ndarray:
        u = self.fixed_values.copy()
        u[self.dofmap.free] = free_values
        return u


def assemble(mesh: Mesh, k: int, f, g, orders: QuadratureOrders | None = None,
             edge_length: str = "arc", keep_elements: bool = True,
             stabilization="diagonal", load: str = "auto") -> GlobalSystem:
    """Assemble the reduced SPD system for ``-div(kappa grad u) = f``, ``u = g`` weakly.

    ``stabilization`` and ``load`` select the variants documented on
    :class:`~curvem.element.LocalElement`.

    Elements are processed in index order and scattered with a fixed pattern,
    so the result does not depend on anything but the inputs.
    """
    orders = orders or QuadratureOrders.for_order(k)
    dofmap = build_dof_map(mesh, k)
    rows, cols, vals = [], [], []
    rhs = np.zeros(dofmap.size)
    elements = []
    for K in range(mesh.n_elements):
        le = LocalElement(mesh, K, k, orders, edge_length, stabilization)
        idx, sgn = dofmap.local_map(mesh, K)
        A = le.stiffness * np.outer(sgn, sgn)
        rows.append(np.repeat(idx, len(idx)))
        cols.append(np.tile(idx, len(idx)))
        vals.append(A.ravel())
        np.add.at(rhs, idx, sgn * le.load(f, load))
        if keep_elements:
            elements.append(le)
    full = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(dofmap.size, dofmap.size))
    fixed = dirichlet_moments(mesh, dofmap, g, orders, edge_length)
    free = dofmap.free
    cons = np.flatnonzero(dofmap.constrained)
    A_ff = full[free][:, free].tocsr()
    b = rhs[free] - full[free][:, cons] @ fixed[cons]
    return GlobalSystem(A_ff, b, dofmap, fixed, elements, full)


def conjugate_gradient(A, b, tol: float = 1e-12, maxiter: int | None = None):
    """Jacobi-preconditioned CG; stops at ``|b - A x| <= tol * |b|``.

    Returns ``(x, residual_history)``.
    """
    n = len(b)
    maxiter = maxiter or max(10 * n, 100)
    bnorm = np.linalg.norm(b)
    x = np.zeros(n)
    if bnorm == 0.0:
        return x, [0.0]
    inv_diag = 1.0 / A.diagonal()
    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    history = [1.0]
    for _ in range(maxiter):
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        rel = np.linalg.norm(r) / bnorm
        history.append(rel)
        if rel <= tol:
            # guard against drift of the recursive residual
            true_rel = np.linalg.norm(b - A @ x) / bnorm
            if true_rel <= tol:
                return x, history
            r = b - A @ x
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverError(f"CG did not reach relative residual {tol} in {maxiter} iterations "
                      f"(last {history[-1]:.3e})", history)


def backward_error(A, x: np.ndarray, b: np.ndarray) -> float:
    """Normwise backward error ``|b - A x| / (|A| |x| + |b|)`` in the infinity norm."""
    anorm = float(abs(A).sum(axis=1).max()) if A.shape[0] else 0.0
    denom = anorm * np.abs(x).max(initial=0.0) + np.abs(b).max(initial=0.0)
    return float(np.abs(b - A @ x).max(initial=0.0) / denom) if denom else 0.0


def solve(system: GlobalSystem, method: str = "direct", tol: float = 1e-12) -> np.ndarray:
    """Solve the reduced system and return the full global DoF vector.

    ``diagnostics`` receives ``residual`` (``|b - A x| / |b|``) and
    ``backward_error``. CG stops on the relative residual; the direct path
    is backward stable and refines iteratively while that still pays off.
    """
    if method not in ("cg", "direct"):
        raise ValueError(f"unknown solver {method!r}")
    A, b = system.matrix, system.rhs
    if A.shape[0] == 0:
        system.diagnostics.update(method=method, iterations=0, residual=0.0,
                                  backward_error=0.0)
        return system.expand(np.zeros(0))
    bnorm = np.linalg.norm(b)
    if method == "cg":
        x, history = conjugate_gradient(A, b, tol)
        system.diagnostics.update(method="cg", iterations=len(history) - 1,
                                  residual_history=history)
    else:
        lu = spla.splu(A.tocsc())
        x = lu.solve(b)
        r = b - A @ x
        steps = 0
        while steps < 3 and np.linalg.norm(r) > tol * bnorm:
            x_new = x + lu.solve(r)
            r_new = b - A @ x_new
            if np.linalg.norm(r_new) >= 0.5 * np.linalg.norm(r):
                break
            x, r = x_new, r_new
            steps += 1
        system.diagnostics.update(method="direct", iterations=1 + steps)
    res = np.linalg.norm(b - A @ x) / bnorm if bnorm else np.linalg.norm(A @ x)
    system.diagnostics["residual"] = float(res)
    system.diagnostics["backward_error"] = backward_error(A, x, b)
    log.debug("solve %s: n=%d residual=%.3e", method, len(b), res)
    return system.expand(x)
