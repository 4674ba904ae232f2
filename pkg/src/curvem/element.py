"""Local virtual element matrices on a (possibly curved) polygon.

Local DoF vector layout for order ``k`` on an element with ``N_e`` edges:

* ``k`` edge moments per edge, in traversal order, against the mapped edge
  monomials of degree ``< k`` oriented along the element's traversal;
* ``dim P_{k-2}`` bulk moments against the scaled monomials of ``M_{k-2}(K)``.

Edge moments are scaled by the edge length ``|e|`` (arc length by default)
and bulk moments by the area ``|K|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from .basis import (MAX_ORDER, MappedEdgeBasis, ScaledMonomials2D, dim2, exponents,
                    grad_dot_grad, index2, product_expand)
from .geometry.mesh import Mesh
from .quadrature import (BulkRule, EdgeRule, QuadratureOrders, bulk_rule,
                         element_edge_rules, element_frame, raw_moments)

RCOND_MIN = 1e-13
EDGE_LENGTHS = ("arc", "chord")


class ConditioningError(RuntimeError):
    """A local solve is numerically singular; usually a degenerate element."""


@dataclass(frozen=True)
class DofLayout:
    k: int
    n_edges: int

    @property
    def n_bulk(self) -> int:
        return dim2(self.k - 2)

    @property
    def size(self) -> int:
        return self.k * self.n_edges + self.n_bulk

    def edge_slice(self, j: int) -> slice:
        return slice(self.k * j, self.k * (j + 1))

    @property
    def bulk_slice(self) -> slice:
        return slice(self.k * self.n_edges, self.size)


@lru_cache(maxsize=None)
def _stiffness_pattern(k: int):
    """Index/coefficient lists turning moments into ``int grad m_i . grad m_j`` (h = 1)."""
    exps = exponents(k)
    rows, cols, idx, coef = [], [], [], []
    for i, a in enumerate(exps):
        for j, b in enumerate(exps):
            for c, m in grad_dot_grad(tuple(a), tuple(b), 1.0):
                rows.append(i)
                cols.append(j)
                idx.append(index2(*m))
                coef.append(c)
    return (np.array(rows, dtype=int), np.array(cols, dtype=int),
            np.array(idx, dtype=int), np.array(coef))


@lru_cache(maxsize=None)
def _mass_pattern(n_rows: int, n_cols: int) -> np.ndarray:
    """``index(a_i + a_j)`` for the mass matrix between ``M_{n_rows}`` and ``M_{n_cols}``."""
    er, ec = exponents(max(n_rows, 0)), exponents(max(n_cols, 0))
    out = np.zeros((dim2(n_rows), dim2(n_cols)), dtype=int)
    for i in range(dim2(n_rows)):
        for j in range(dim2(n_cols)):
            out[i, j] = index2(*product_expand(tuple(er[i]), tuple(ec[j])))
    return out


def identity_stabilization(element: "LocalElement") -> np.ndarray:
    """dofi-dofi stabilization: the Euclidean product of local DoF vectors."""
    return np.eye(element.layout.size)


def diagonal_stabilization(element: "LocalElement") -> np.ndarray:
    """dofi-dofi weighted by ``max(1, diag(P^T G P))``.

    Higher edge and bulk moments of scaled monomials are small numbers, so
    the plain identity under-weights them against the consistency term by
    orders of magnitude at k >= 2. Scaling each DoF by its consistency
    diagonal keeps both terms comparable without changing the kernel.
    """
    P = element.ritz_galerkin
    consistency = np.einsum("ai,ab,bi->i", P, element.stiffness_monomials, P)
    return np.diag(np.maximum(1.0, consistency))


STABILIZATIONS = {"dofi": identity_stabilization, "diagonal": diagonal_stabilization}


class LocalElement:
    """Projectors, stiffness and load of order ``k`` on mesh element ``K``.

    All matrices with a monomial index use the graded ordering of
    :mod:`curvem.basis`; all matrices with a DoF index use :class:`DofLayout`.
    """

    def __init__(self, mesh: Mesh, K: int, k: int, orders: QuadratureOrders | None = None,
                 edge_length: str = "arc",
                 stabilization: str | Callable[["LocalElement"], np.ndarray] = "diagonal"):
        if not 1 <= k <= MAX_ORDER:
            raise ValueError(f"order k must lie in [1, {MAX_ORDER}]")
        if edge_length not in EDGE_LENGTHS:
            raise ValueError(f"edge_length must be one of {EDGE_LENGTHS}")
        self.mesh, self.K, self.k = mesh, K, k
        self.kappa = mesh.elements[K].kappa
        self.orders = orders or QuadratureOrders.for_order(k)
        if isinstance(stabilization, str):
            if stabilization not in STABILIZATIONS:
                raise ValueError(f"stabilization must be one of {sorted(STABILIZATIONS)}")
            stabilization = STABILIZATIONS[stabilization]
        self.stabilization = stabilization
        self.rules: list[EdgeRule] = element_edge_rules(mesh, K, self.orders)
        self.centroid, self.h, self.area = element_frame(mesh, K, self.rules)
        self.layout = DofLayout(k, len(self.rules))
        self.basis = ScaledMonomials2D(self.centroid, self.h, k)
        self.moments = raw_moments(self.rules, self.centroid, self.h, max(2 * k - 2, 0))
        self.edge_bases = [MappedEdgeBasis(r.t0, r.t1, k - 1, r.sign) for r in self.rules]
        if edge_length == "arc":
            self.edge_lengths = np.array([r.length for r in self.rules])
        else:
            self.edge_lengths = np.array([mesh.chord_length(r.edge) for r in self.rules])

    def __repr__(self) -> str:
        return f"LocalElement(K={self.K}, k={self.k}, edges={self.layout.n_edges})"

    # -- helpers -------------------------------------------------------------
    def _solve(self, A: np.ndarray, B: np.ndarray, what: str) -> np.ndarray:
        if A.size and 1.0 / np.linalg.cond(A) < RCOND_MIN:
            raise ConditioningError(f"element {self.K}: {what} matrix is singular to "
                                    f"working precision (k={self.k})")
        return np.linalg.solve(A, B)

    def _edge_tables(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Edge monomial values at the nodes and arc-length weights of edge ``j``."""
        r = self.rules[j]
        return self.edge_bases[j].eval(r.t), r.ds

    @cached_property
    def bulk(self) -> BulkRule:
        return bulk_rule(self.mesh, self.K, self.orders, self.rules)

    # -- monomial matrices ---------------------------------------------------
    @cached_property
    def stiffness_monomials(self) -> np.ndarray:
        """``G[i, j] = int_K grad m_i . grad m_j`` over ``M_k(K)``."""
        rows, cols, idx, coef = _stiffness_pattern(self.k)
        n = dim2(self.k)
        G = np.zeros((n, n))
        np.add.at(G, (rows, cols), coef * self.moments[idx] / self.h ** 2)
        return G

    def mass_monomials(self, n_rows: int, n_cols: int | None = None) -> np.ndarray:
        """``H[i, j] = int_K m_i m_j`` between ``M_{n_rows}(K)`` and ``M_{n_cols}(K)``."""
        n_cols = n_rows if n_cols is None else n_cols
        if dim2(n_rows) == 0 or dim2(n_cols) == 0:
            return np.zeros((dim2(n_rows), dim2(n_cols)))
        return self.moments[_mass_pattern(n_rows, n_cols)]

    def edge_mass(self, j: int) -> np.ndarray:
        """``int_{I_e} m_i m_l |gamma'| dt`` for the mapped monomials of edge ``j``."""
        mt, ds = self._edge_tables(j)
        return mt.T @ (ds[:, None] * mt)

    # -- projectors ----------------------------------------------------------
    def edge_projection_matrix(self, j: int) -> np.ndarray:
        """DoFs -> coefficients of the edge L2 projection onto mapped degree ``k-1``."""
        E = np.zeros((self.k, self.layout.size))
        E[:, self.layout.edge_slice(j)] = self.edge_lengths[j] * np.eye(self.k)
        return self._solve(self.edge_mass(j), E, f"edge {j} mass")

    @cached_property
    def ritz_galerkin(self) -> np.ndarray:
        """DoFs -> coefficients in ``M_k(K)`` of the Ritz-Galerkin projection.

        Normal derivatives of the monomials are first L2-projected onto each
        edge's mapped polynomials; the result then pairs exactly with the
        edge DoFs. The constant is fixed by the boundary average (k = 1) or
        the volume average (k >= 2).
        """
        k, lay = self.k, self.layout
        nk = dim2(k)
        B = np.zeros((nk, lay.size))
        for j, r in enumerate(self.rules):
            mt, ds = self._edge_tables(j)
            flux = self.basis.grad_dot_normal(r.points, r.normals)
            rhs = (ds[:, None] * mt).T @ flux
            coeffs = self._solve(self.edge_mass(j), rhs, f"edge {j} mass").T
            B[:, lay.edge_slice(j)] += self.edge_lengths[j] * coeffs
        B[:, lay.bulk_slice] -= self.area * self.basis.laplacian_table()

        Gt = self.stiffness_monomials.copy()
        B[0] = 0.0
        if k == 1:
            perimeter = sum(r.length for r in self.rules)
            Gt[0] = sum((r.ds[:, None] * self.basis.eval(r.points)).sum(0)
                        for r in self.rules) / perimeter
            for j in range(lay.n_edges):
                B[0, lay.edge_slice(j).start] = self.edge_lengths[j] / perimeter
        else:
            Gt[0] = self.moments[:nk] / self.area
            B[0, lay.bulk_slice.start] = 1.0
        return self._solve(Gt, B, "Ritz-Galerkin")

    @cached_property
    def l2_projection(self) -> np.ndarray:
        """DoFs -> coefficients in ``M_{k-2}(K)`` of the bulk L2 projection."""
        nb = self.layout.n_bulk
        R = np.zeros((nb, self.layout.size))
        R[:, self.layout.bulk_slice] = self.area * np.eye(nb)
        if nb == 0:
            return R
        return self._solve(self.mass_monomials(self.k - 2), R, "bulk mass")

    @cached_property
    def dof_matrix(self) -> np.ndarray:
        """Column ``j`` holds the local DoFs of the monomial ``m_j`` of ``M_k(K)``."""
        lay = self.layout
        D = np.zeros((lay.size, dim2(self.k)))
        for j, r in enumerate(self.rules):
            mt, ds = self._edge_tables(j)
            vals = self.basis.eval(r.points)
            D[lay.edge_slice(j)] = (ds[:, None] * mt).T @ vals / self.edge_lengths[j]
        D[lay.bulk_slice] = self.mass_monomials(self.k - 2, self.k) / self.area
        return D

    # -- bilinear form and load ----------------------------------------------
    @cached_property
    def stabilization_matrix(self) -> np.ndarray:
        return self.stabilization(self)

    @cached_property
    def stiffness(self) -> np.ndarray:
        """``kappa_K * (P^T G P + (I - D P)^T S (I - D P))`` with ``P`` the Ritz-Galerkin matrix."""
        P = self.ritz_galerkin
        G = self.stiffness_monomials
        R = np.eye(self.layout.size) - self.dof_matrix @ P
        A = P.T @ G @ P + R.T @ self.stabilization_matrix @ R
        return self.kappa * 0.5 * (A + A.T)

    @cached_property
    def corrected_test_projection(self) -> np.ndarray:
        """DoFs -> ``M_k`` coefficients of ``P0 v + (I - P0) Pi v``.

        ``P0`` is the bulk L2 projection onto degree ``k-2`` and ``Pi`` the
        Ritz-Galerkin projection. The second term is L2-orthogonal to
        ``P_{k-2}``, so it only adds higher moments of the test function.
        """
        nk, nb = dim2(self.k), self.layout.n_bulk
        P0_of_poly = self._solve(self.mass_monomials(self.k - 2),
                                 self.mass_monomials(self.k - 2, self.k), "bulk mass")
        embed = np.zeros((nk, nb))
        embed[:nb] = np.eye(nb)
        return embed @ self.l2_projection + (np.eye(nk) - embed @ P0_of_poly) @ self.ritz_galerkin

    def load(self, f, variant: str = "auto") -> np.ndarray:
        """Local right-hand side for a vectorized source ``f(points)``.

        ``variant``: ``"edge-average"`` tests the element mean of ``f`` with
        the average of the edge means (k = 1 only); ``"projected"`` tests
        ``f`` with the degree ``k-2`` L2 projection (k >= 2); ``"corrected"``
        uses :attr:`corrected_test_projection` (k >= 2). ``"auto"`` picks
        edge-average for k = 1, corrected for k = 2 and projected otherwise.
        """
        if variant == "auto":
            variant = {1: "edge-average", 2: "corrected"}.get(self.k, "projected")
        b = np.zeros(self.layout.size)
        fq = np.asarray(f(self.bulk.points), dtype=float) * self.bulk.weights
        if variant == "edge-average":
            if self.k != 1:
                raise ValueError("the edge-average load is defined for k = 1 only")
            share = fq.sum() / self.layout.n_edges
            for j in range(self.layout.n_edges):
                b[self.layout.edge_slice(j).start] = share
            return b
        if self.k < 2:
            raise ValueError(f"load variant {variant!r} needs k >= 2")
        if variant == "projected":
            mb = ScaledMonomials2D(self.centroid, self.h, self.k - 2).eval(self.bulk.points)
            return self.l2_projection.T @ (fq @ mb)
        if variant == "corrected":
            return self.corrected_test_projection.T @ (fq @ self.basis.eval(self.bulk.points))
        raise ValueError(f"unknown load variant {variant!r}")

    def interpolate(self, v) -> np.ndarray:
        """Local DoFs of a vectorized function ``v(points)`` by quadrature."""
        lay = self.layout
        out = np.zeros(lay.size)
        for j, r in enumerate(self.rules):
            mt, ds = self._edge_tables(j)
            out[lay.edge_slice(j)] = (ds * v(r.points)) @ mt / self.edge_lengths[j]
        if lay.n_bulk:
            mb = ScaledMonomials2D(self.centroid, self.h, self.k - 2).eval(self.bulk.points)
            out[lay.bulk_slice] = (self.bulk.weights * v(self.bulk.points)) @ mb / self.area
        return out

    def edge_signs(self) -> list[np.ndarray]:
        """Per-edge diagonal mapping canonical edge DoFs to this element's orientation."""
        return [np.ones(self.k) if r.sign > 0 else eb.parity()
                for r, eb in zip(self.rules, self.edge_bases)]
