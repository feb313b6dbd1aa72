"""Lengths of segments and areas of rectangles pushed forward by a planar map.

Areas use the change-of-variables integral of |det Jac_F| (F is a
diffeomorphism, so no folding) and lengths the integral of ||Jac_F s'||, both
with midpoint rules and centered-difference Jacobians.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ArgumentError, EvaluationError


@dataclass(frozen=True)
class Rect:
    center: tuple
    half_widths: tuple
    orientation: float = 0.0

    def __post_init__(self):
        a, b = self.half_widths
        if not (a > 0 and b > 0):
            raise ArgumentError("rectangle half-widths must be positive")

    def axes(self):
        c, s = np.cos(self.orientation), np.sin(self.orientation)
        return np.array([c, s]), np.array([-s, c])

    def rotated(self, phi):
        """Image under the rotation by ``phi`` about the origin."""
        c, s = np.cos(phi), np.sin(phi)
        x, y = self.center
        return Rect((c * x - s * y, s * x + c * y), self.half_widths, self.orientation + phi)

    def corners(self):
        e1, e2 = self.axes()
        a, b = self.half_widths
        c = np.asarray(self.center, dtype=float)
        return [c - a * e1 - b * e2, c + a * e1 - b * e2, c + a * e1 + b * e2, c - a * e1 + b * e2]

    def edges(self):
        k = self.corners()
        return [Segment(tuple(k[i]), tuple(k[(i + 1) % 4])) for i in range(4)]

    @property
    def area(self):
        return 4.0 * self.half_widths[0] * self.half_widths[1]

    def to_dict(self):
        return {"center": list(map(float, self.center)),
                "halfwidths": list(map(float, self.half_widths)),
                "orientation": float(self.orientation)}


@dataclass(frozen=True)
class Segment:
    p0: tuple
    p1: tuple

    def __post_init__(self):
        if np.allclose(self.p0, self.p1, rtol=0, atol=0):
            raise ArgumentError("segment endpoints must be distinct")

    def rotated(self, phi):
        c, s = np.cos(phi), np.sin(phi)
        rot = lambda p: (c * p[0] - s * p[1], s * p[0] + c * p[1])
        return Segment(rot(self.p0), rot(self.p1))

    @property
    def length(self):
        return float(np.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1]))

    def to_dict(self):
        return {"p0": list(map(float, self.p0)), "p1": list(map(float, self.p1))}


@dataclass(frozen=True)
class PlanarMap:
    """Cartesian view F(x, y) = (X, Y) of a deformation."""

    forward: Callable
    name: str = "F"
    linear: Optional[np.ndarray] = None

    @classmethod
    def from_polar(cls, pm):
        return cls(pm.cartesian, pm.name, pm.linear)

    def __call__(self, x, y):
        return self.forward(x, y)


def _as_planar(F):
    return F if isinstance(F, PlanarMap) else PlanarMap.from_polar(F)


def jacobian_det(F, x, y, step):
    F = _as_planar(F)
    Xp, Yp = F(x + step, y)
    Xm, Ym = F(x - step, y)
    Xq, Yq = F(x, y + step)
    Xn, Yn = F(x, y - step)
    inv = 0.5 / step
    det = ((Xp - Xm) * (Yq - Yn) - (Xq - Xn) * (Yp - Ym)) * inv * inv
    bad = ~np.isfinite(det)
    if np.any(bad):
        k = np.argmax(bad.ravel())
        where = (float(np.ravel(x)[k]), float(np.ravel(y)[k]))
        raise EvaluationError(f"Jacobian not finite at {where}", where=where)
    return det


def rect_midpoints(E, n):
    """Midpoints of the n x n subdivision of E, as arrays (x, y) of shape (n, n)."""
    a, b = E.half_widths
    u = -a + (np.arange(n) + 0.5) * (2 * a / n)
    v = -b + (np.arange(n) + 0.5) * (2 * b / n)
    e1, e2 = E.axes()
    vv, uu = np.meshgrid(v, u, indexing="ij")
    x = E.center[0] + uu * e1[0] + vv * e2[0]
    y = E.center[1] + uu * e1[1] + vv * e2[1]
    return x, y


def pushforward_area(F, E, n=128):
    """Area of F(E) by the midpoint rule on |det Jac_F| over an n x n subdivision."""
    if n < 2:
        raise ArgumentError("n must be at least 2")
    a, b = E.half_widths
    x, y = rect_midpoints(E, n)
    step = min(a, b) / (100.0 * n)
    det = jacobian_det(F, x, y, step)
    return float(np.sum(np.abs(det)) * (2 * a / n) * (2 * b / n))


def pushforward_length(F, s, n=128):
    """Length of F(s) by the composite midpoint rule with n panels."""
    if n < 2:
        raise ArgumentError("n must be at least 2")
    F = _as_planar(F)
    p0 = np.asarray(s.p0, dtype=float)
    d = np.asarray(s.p1, dtype=float) - p0
    L = float(np.hypot(*d))
    u = d / L
    t = (np.arange(n) + 0.5) / n
    x = p0[0] + t * d[0]
    y = p0[1] + t * d[1]
    h = L / (100.0 * n)
    Xp, Yp = F(x + h * u[0], y + h * u[1])
    Xm, Ym = F(x - h * u[0], y - h * u[1])
    speed = np.hypot(Xp - Xm, Yp - Ym) / (2 * h)
    bad = ~np.isfinite(speed)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise EvaluationError(f"Jacobian not finite at {(x[k], y[k])}", where=(x[k], y[k]))
    return float(np.sum(speed) * L / n)


def frontier_length(F, E, n=128):
    """Length of the boundary of F(E): the four pushed-forward edges."""
    return sum(pushforward_length(F, e, n) for e in E.edges())


def measure(F, E, n=128):
    if isinstance(E, Rect):
        return pushforward_area(F, E, n)
    if isinstance(E, Segment):
        return pushforward_length(F, E, n)
    raise ArgumentError(f"unsupported shape {type(E).__name__}")


def seeded_rotations(count=8, seed=0):
    """``count`` rotation angles in [0, 2pi) from a fixed-seed generator."""
    return np.random.default_rng(seed).uniform(0.0, 2 * np.pi, count).tolist()


def rotation_invariance_report(F, E, rotations, n=128, tol_rel=5e-3, transform_id=None):
    """Measure l_i(F(phi(E))) for phi = 0 and each rotation; pass iff relative spread <= tol_rel."""
    rotations = [float(p) for p in rotations]
    if not rotations:
        raise ArgumentError("need at least one rotation")
    phis = [0.0] + rotations
    values = [measure(F, E.rotated(p), n) for p in phis]
    v = np.asarray(values)
    spread = float((v.max() - v.min()) / np.mean(np.abs(v)))
    return {
        "shape": {"rect": E.to_dict()} if isinstance(E, Rect) else {"segment": E.to_dict()},
        "transform-id": transform_id or getattr(F, "name", "F"),
        "rotations": phis,
        "values": values,
        "rel_spread": spread,
        "pass": bool(spread <= tol_rel),
    }
