"""Parametrized curves carrying curved mesh edges.

Every curve maps a parameter interval ``[t_lo, t_hi]`` into the plane and
returns positions and first derivatives for arrays of parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class CurveDomainError(ValueError):
    """Raised when a curve is evaluated outside its parameter domain."""


@dataclass(frozen=True)
class Curve:
    kind = "abstract"

    @property
    def domain(self) -> tuple[float, float]:
        raise NotImplementedError

    def _eval(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def evaluate(self, t, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(points, tangents)``, each of shape ``t.shape + (2,)``."""
        t = np.asarray(t, dtype=float)
        if check:
            lo, hi = self.domain
            tol = 1e-12 * max(1.0, abs(lo), abs(hi))
            if np.any(t < lo - tol) or np.any(t > hi + tol):
                raise CurveDomainError(
                    f"{self.kind} curve evaluated outside [{lo}, {hi}]")
        return self._eval(t)

    def __call__(self, t):
        return self.evaluate(t)[0]

    def speed(self, t) -> np.ndarray:
        return np.linalg.norm(self.evaluate(t)[1], axis=-1)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class CircleArc(Curve):
    """``t -> center + radius * (cos t, sin t)`` for ``t`` in ``[angle0, angle1]``."""

    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    angle0: float = 0.0
    angle1: float = 2.0 * np.pi
    kind = "circle-arc"

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def domain(self):
        return (min(self.angle0, self.angle1), max(self.angle0, self.angle1))

    def _eval(self, t):
        c, s = np.cos(t), np.sin(t)
        pts = np.stack([self.center[0] + self.radius * c,
                        self.center[1] + self.radius * s], axis=-1)
        der = np.stack([-self.radius * s, self.radius * c], axis=-1)
        return pts, der

    def to_dict(self):
        return {"kind": self.kind, "center": list(self.center), "radius": self.radius,
                "angle0": self.angle0, "angle1": self.angle1}


@dataclass(frozen=True)
class SineGraph(Curve):
    """Graph ``y = offset + amplitude * sin(frequency * pi * x)``, parametrized by ``x``."""

    amplitude: float = 0.05
    frequency: float = 1.0
    offset: float = 0.0
    x0: float = 0.0
    x1: float = 1.0
    kind = "sine-graph"

    @property
    def domain(self):
        return (self.x0, self.x1)

    def height(self, x):
        return self.offset + self.amplitude * np.sin(self.frequency * np.pi * np.asarray(x))

    def _eval(self, t):
        w = self.frequency * np.pi
        pts = np.stack([t, self.offset + self.amplitude * np.sin(w * t)], axis=-1)
        der = np.stack([np.ones_like(t), self.amplitude * w * np.cos(w * t)], axis=-1)
        return pts, der

    def to_dict(self):
        return {"kind": self.kind, "amplitude": self.amplitude, "frequency": self.frequency,
                "offset": self.offset, "x0": self.x0, "x1": self.x1}


@dataclass(frozen=True)
class PolylineSegment(Curve):
    """Affine segment ``start + t * (end - start)`` on ``[0, 1]``."""

    start: tuple[float, float] = (0.0, 0.0)
    end: tuple[float, float] = (1.0, 0.0)
    kind = "polyline-segment"

    @property
    def domain(self):
        return (0.0, 1.0)

    def _eval(self, t):
        a = np.asarray(self.start, dtype=float)
        d = np.asarray(self.end, dtype=float) - a
        pts = a + t[..., None] * d
        der = np.broadcast_to(d, pts.shape).copy()
        return pts, der

    def to_dict(self):
        return {"kind": self.kind, "start": list(self.start), "end": list(self.end)}


_KINDS = {cls.kind: cls for cls in (CircleArc, SineGraph, PolylineSegment)}


def curve_from_dict(data: dict) -> Curve:
    data = dict(data)
    data.pop("id", None)
    kind = data.pop("kind", None)
    if kind not in _KINDS:
        raise ValueError(f"unknown curve kind {kind!r}")
    for key in ("center", "start", "end"):
        if key in data:
            data[key] = tuple(float(v) for v in data[key])
    return _KINDS[kind](**data)


def curve_eval(curve: Curve, t: float) -> tuple[np.ndarray, np.ndarray, float]:
    """Point, tangent and speed ``|gamma'(t)|`` at a single parameter."""
    p, d = curve.evaluate(np.asarray(float(t)))
    return p, d, float(np.hypot(d[0], d[1]))
