"""Scaled and shifted monomial bases.

Two-dimensional monomials ``m_a(x) = ((x - x_K) / h_K) ** a`` are ordered
graded-lexicographically: degree by degree, and within a degree by
decreasing power of x, i.e. (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
Every matrix indexed by monomials in this package uses that ordering.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_ORDER = 6
# products of two degree-MAX_ORDER monomials
MAX_DEGREE = 2 * MAX_ORDER


class DegreeError(ValueError):
    pass


def dim2(n: int) -> int:
    """Dimension of P_n in two variables (0 for n < 0)."""
    return (n + 1) * (n + 2) // 2 if n >= 0 else 0


def index2(a: int, b: int) -> int:
    d = a + b
    return dim2(d - 1) + b


@lru_cache(maxsize=None)
def exponents(n: int) -> np.ndarray:
    """Multi-indices of degree ``<= n`` in graded lexicographic order, shape (dim, 2)."""
    out = [(d - b, b) for d in range(n + 1) for b in range(d + 1)]
    arr = np.array(out, dtype=int).reshape(-1, 2)
    arr.setflags(write=False)
    return arr


def product_expand(alpha, beta, max_degree: int = MAX_DEGREE) -> tuple[int, int]:
    """Multi-index of ``m_alpha * m_beta`` (scaled monomials multiply exactly)."""
    a = (alpha[0] + beta[0], alpha[1] + beta[1])
    if a[0] < 0 or a[1] < 0:
        raise DegreeError(f"negative multi-index {a}")
    if sum(a) > max_degree:
        raise DegreeError(f"degree {sum(a)} exceeds the supported maximum {max_degree}")
    return a


def grad_dot_grad(alpha, beta, h: float, max_degree: int = MAX_DEGREE):
    """Expansion of ``grad m_alpha . grad m_beta`` as ``[(coef, multi_index), ...]``."""
    terms = []
    for axis in (0, 1):
        c = alpha[axis] * beta[axis]
        if c:
            shift = (-1, 0) if axis == 0 else (0, -1)
            terms.append((c / h ** 2, product_expand(product_expand(alpha, shift, max_degree),
                                                      product_expand(beta, shift, max_degree),
                                                      max_degree)))
    return terms


def _powers(z: np.ndarray, n: int) -> np.ndarray:
    """``z ** p`` for ``p = 0..n`` stacked on a new last axis."""
    out = np.ones(z.shape + (n + 1,))
    for p in range(1, n + 1):
        out[..., p] = out[..., p - 1] * z
    return out


class ScaledMonomials2D:
    """Basis ``M_n(K)`` attached to a center ``x_K`` and a scale ``h_K``."""

    def __init__(self, center, h: float, degree: int):
        if degree > MAX_DEGREE:
            raise DegreeError(f"degree {degree} exceeds the supported maximum {MAX_DEGREE}")
        self.center = np.asarray(center, dtype=float)
        self.h = float(h)
        self.degree = int(degree)
        self.exps = exponents(self.degree)

    def __len__(self) -> int:
        return dim2(self.degree)

    def scaled(self, points) -> tuple[np.ndarray, np.ndarray]:
        z = (np.asarray(points, dtype=float) - self.center) / self.h
        return z[..., 0], z[..., 1]

    def eval(self, points) -> np.ndarray:
        """Values of all monomials, shape ``points.shape[:-1] + (dim,)``."""
        X, Y = self.scaled(points)
        px, py = _powers(X, self.degree), _powers(Y, self.degree)
        return px[..., self.exps[:, 0]] * py[..., self.exps[:, 1]]

    def grad(self, points) -> np.ndarray:
        """Gradients, shape ``points.shape[:-1] + (dim, 2)``."""
        X, Y = self.scaled(points)
        n = self.degree
        px = np.concatenate([np.zeros(X.shape + (1,)), _powers(X, n)], axis=-1)
        py = np.concatenate([np.zeros(Y.shape + (1,)), _powers(Y, n)], axis=-1)
        a, b = self.exps[:, 0], self.exps[:, 1]
        # px[..., p + 1] holds X**p, px[..., 0] is a zero used for p = -1
        gx = a * px[..., a] * py[..., b + 1] / self.h
        gy = b * px[..., a + 1] * py[..., b] / self.h
        return np.stack([gx, gy], axis=-1)

    def grad_dot_normal(self, points, normals) -> np.ndarray:
        return np.einsum("...ij,...j->...i", self.grad(points), np.asarray(normals, dtype=float))

    def laplacian_table(self) -> np.ndarray:
        """Matrix ``L`` with ``Lap m_a = sum_c L[a, c] m_c`` over ``M_{n-2}(K)``."""
        n = self.degree
        L = np.zeros((dim2(n), dim2(n - 2)))
        for i, (a, b) in enumerate(self.exps):
            if a >= 2:
                L[i, index2(a - 2, b)] += a * (a - 1) / self.h ** 2
            if b >= 2:
                L[i, index2(a, b - 2)] += b * (b - 1) / self.h ** 2
        return L


class ScaledMonomials1D:
    """Basis ``M_n(I)`` of ``((t - mid) / h) ** i`` on a parameter interval."""

    def __init__(self, mid: float, h: float, degree: int):
        self.mid = float(mid)
        self.h = float(h)
        self.degree = int(degree)

    def __len__(self) -> int:
        return self.degree + 1

    def eval(self, t) -> np.ndarray:
        return _powers((np.asarray(t, dtype=float) - self.mid) / self.h, self.degree)


class MappedEdgeBasis(ScaledMonomials1D):
    """Edge monomials composed with the inverse edge parametrization.

    Values are always requested at parameters ``t`` in ``[t0, t1]``, never at
    physical points. The scaled variable runs from -1/2 at the start of the
    traversal to +1/2 at its end, so reversing the traversal (``sign = -1``)
    multiplies the i-th monomial by ``(-1) ** i``.
    """

    def __init__(self, t0: float, t1: float, degree: int, sign: int = 1):
        super().__init__(0.5 * (t0 + t1), sign * (t1 - t0), degree)
        self.t0, self.t1, self.sign = float(t0), float(t1), int(sign)

    def parity(self) -> np.ndarray:
        """Diagonal mapping coefficients in this orientation to the reversed one."""
        return (-1.0) ** np.arange(self.degree + 1)
