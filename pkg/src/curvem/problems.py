"""Exact solutions and data of the benchmark problems.

Each problem provides vectorized callables on arrays of points with shape
``(..., 2)``: the solution ``u``, its gradient, the source ``f`` and the
Dirichlet data ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
import sympy as sp

Field = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Problem:
    name: str
    u: Field
    grad: Field
    f: Field
    g: Field


def _xy(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0], p[..., 1]


def constant(c: float = 1.0) -> Problem:
    def u(p):
        return np.full(np.shape(p)[:-1], float(c))

    def grad(p):
        return np.zeros(np.shape(p))

    def f(p):
        return np.zeros(np.shape(p)[:-1])

    return Problem("constant", u, grad, f, u)


def polynomial(coeffs: dict[tuple[int, int], float], name: str = "polynomial") -> Problem:
    """``u = sum c_ab x^a y^b``; Poisson data with unit coefficient."""
    x, y = sp.symbols("x y")
    expr = sum(sp.Float(c) * x ** a * y ** b for (a, b), c in coeffs.items())
    return _from_sympy(name, expr, x, y)


def _from_sympy(name, expr, x, y) -> Problem:
    fu = sp.lambdify((x, y), expr, "numpy")
    fx = sp.lambdify((x, y), sp.diff(expr, x), "numpy")
    fy = sp.lambdify((x, y), sp.diff(expr, y), "numpy")
    ff = sp.lambdify((x, y), -sp.diff(expr, x, 2) - sp.diff(expr, y, 2), "numpy")

    def wrap(fn):
        def call(p):
            X, Y = _xy(p)
            return np.broadcast_to(fn(X, Y), X.shape).astype(float)
        return call

    u, dx, dy, f = wrap(fu), wrap(fx), wrap(fy), wrap(ff)

    def grad(p):
        return np.stack([dx(p), dy(p)], axis=-1)

    return Problem(name, u, grad, f, u)


def disk_u1() -> Problem:
    """``u1 = sin(pi x) cos(pi y)`` on the unit disk, inhomogeneous Dirichlet data."""
    pi = np.pi

    def u(p):
        x, y = _xy(p)
        return np.sin(pi * x) * np.cos(pi * y)

    def grad(p):
        x, y = _xy(p)
        return np.stack([pi * np.cos(pi * x) * np.cos(pi * y),
                         -pi * np.sin(pi * x) * np.sin(pi * y)], axis=-1)

    def f(p):
        return 2 * pi ** 2 * u(p)

    return Problem("disk-u1", u, grad, f, u)


@lru_cache(maxsize=None)
def sine_u2() -> Problem:
    """Solution vanishing on the sine-bounded domain between y = g1(x) and y = g2(x)."""
    x, y = sp.symbols("x y")
    g1 = sp.sin(sp.pi * x) / 20
    g2 = 1 + sp.sin(3 * sp.pi * x) / 20
    expr = -(y - g1) * (y - g2) * (1 - x) * x * (3 + sp.sin(5 * x) * sp.sin(7 * y))
    return _from_sympy("sine-u2", expr, x, y)


INNER_SOURCE = 5.0
OUTER_SOURCE = 1.0


def interface_u3() -> Problem:
    """Radial solution of ``-div(kappa grad u) = f`` with an interface at r = 1/2.

    Inside ``r <= 1/2``: ``kappa = 1``, ``f = 5``; outside: ``kappa = 5``,
    ``f = 1``; ``u = 0`` on the unit circle. Points with ``r = 1/2`` use the
    inner branch.
    """
    c_in = 7.0 / 20.0 + np.log(2.0) / 10.0

    def u(p):
        x, y = _xy(p)
        r2 = x * x + y * y
        inner = r2 <= 0.25
        with np.errstate(divide="ignore"):
            outer = -r2 / 20.0 - np.log(r2) / 20.0 + 1.0 / 20.0
        return np.where(inner, -1.25 * r2 + c_in, outer)

    def grad(p):
        x, y = _xy(p)
        r2 = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            # u'(r) / r for each branch
            outer = -1.0 / 10.0 - 1.0 / (10.0 * r2)
        factor = np.where(r2 <= 0.25, -2.5, outer)
        return np.stack([factor * x, factor * y], axis=-1)

    def f(p):
        x, y = _xy(p)
        return np.where(x * x + y * y <= 0.25, INNER_SOURCE, OUTER_SOURCE)

    return Problem("interface-u3", u, grad, f, u)


def straight_u2() -> Problem:
    """u2 data with homogeneous Dirichlet conditions forced on a straightened boundary."""
    base = sine_u2()

    def zero(p):
        return np.zeros(np.shape(p)[:-1])

    return Problem("straight-approx-u2", base.u, base.grad, base.f, zero)


PROBLEMS = {
    "disk-u1": disk_u1,
    "sine-u2": sine_u2,
    "interface-u3": interface_u3,
    "straight-approx-u2": straight_u2,
    "constant": constant,
}
