"""Radial profiles (f, g, h): determinant and squared column norms of a polar Jacobian.

A profile is either a closed-form family from :data:`REGISTRY` or a sampled
table interpolated with monotone cubics.  Text format::

    profile v1
    r_max 2.0                       (optional, closed forms only)
    closed-form <name> <params...>

or::

    profile v1
    table
    <r> <f> <g> <h>
    ...
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import PchipInterpolator

from .errors import ArgumentError, FormatError

ANALYTIC_TOL = 1e-9
SAMPLED_TOL = 1e-5


@dataclass(frozen=True)
class RadialProfile:
    """Radius-dependent triple (f, g, h) with ``h0 = h(0)`` and validity radius ``r_max``.

    ``dh`` is the analytic derivative of ``h``; when absent, :meth:`dh_at`
    falls back to centered differences with step ``1e-6 * r_max``.
    """

    f: Callable
    g: Callable
    h: Callable
    h0: float = 0.0
    r_max: float = 2.0
    dh: Optional[Callable] = None
    # closed form of g*h - f^2, avoiding cancellation when it is small
    gap: Optional[Callable] = None
    sampled: bool = False
    source: tuple = field(default=(), compare=False)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.f(r), self.g(r), self.h(r)

    def gap_at(self, r):
        r = np.asarray(r, dtype=float)
        if self.gap is not None:
            return np.asarray(self.gap(r), dtype=float) + 0.0 * r
        f, g, h = self(r)
        return g * h - f * f

    def dh_at(self, r):
        r = np.asarray(r, dtype=float)
        if self.dh is not None:
            return np.asarray(self.dh(r), dtype=float) + 0.0 * r
        step = 1e-6 * self.r_max
        lo = np.maximum(r - step, 0.0)
        hi = r + step
        return (self.h(hi) - self.h(lo)) / (hi - lo)

    @property
    def default_tol(self):
        if self.sampled or self.dh is None:
            return SAMPLED_TOL
        return ANALYTIC_TOL

    @property
    def name(self):
        return self.source[1] if self.source and self.source[0] == "closed-form" else "table"


def _orientation(value):
    o = int(value)
    if o not in (-1, 1):
        raise ArgumentError(f"orientation must be +1 or -1, got {value}")
    return o


def identity(orientation=1, r_max=2.0):
    """Profile of the identity map (f = r, g = 1, h = r^2), or of a reflection if ``orientation=-1``."""
    o = _orientation(orientation)
    return RadialProfile(
        f=lambda r: o * np.asarray(r, dtype=float),
        g=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        h=lambda r: np.asarray(r, dtype=float) ** 2,
        dh=lambda r: 2.0 * np.asarray(r, dtype=float),
        gap=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        r_max=r_max,
        source=("closed-form", "identity", (o,)),
    )


def unit_pitch_spiral(orientation=1, r_max=2.0):
    """f = r, g = 1 + r^2, h = r^2; the spiral R = r, Theta = theta + r."""
    o = _orientation(orientation)
    return RadialProfile(
        f=lambda r: o * np.asarray(r, dtype=float),
        g=lambda r: 1.0 + np.asarray(r, dtype=float) ** 2,
        h=lambda r: np.asarray(r, dtype=float) ** 2,
        dh=lambda r: 2.0 * np.asarray(r, dtype=float),
        gap=lambda r: np.asarray(r, dtype=float) ** 4,
        r_max=r_max,
        source=("closed-form", "unit-pitch-spiral", (o,)),
    )


def power_law(exponent, pitch, orientation=1, r_max=2.0):
    """R = r**exponent with constant angular pitch: h = r^(2a), gh - f^2 = pitch^2 h^2."""
    a, k, o = float(exponent), float(pitch), _orientation(orientation)
    if a <= 0:
        raise ArgumentError("power-law exponent must be positive")

    def f(r):
        return o * a * np.asarray(r, dtype=float) ** (2 * a - 1)

    def g(r):
        r = np.asarray(r, dtype=float)
        return a * a * r ** (2 * a - 2) + k * k * r ** (2 * a)

    return RadialProfile(
        f=f,
        g=g,
        h=lambda r: np.asarray(r, dtype=float) ** (2 * a),
        dh=lambda r: 2 * a * np.asarray(r, dtype=float) ** (2 * a - 1),
        gap=lambda r: k * k * np.asarray(r, dtype=float) ** (4 * a),
        r_max=r_max,
        source=("closed-form", "power-law", (a, k, o)),
    )


def polynomial(h_coeffs, pitch_coeffs, orientation=1, r_max=2.0):
    """h = r^2 (1 + sum c_k r^k), angular pitch q(r) = sum q_j r^j.

    With non-negative coefficients and ``q(0) > 0`` this is always a valid
    profile: ``f = orientation * h'/2`` and ``g = f^2/h + h q^2`` so that
    ``sqrt(gh - f^2)/h = |q|``.
    """
    c = [float(v) for v in h_coeffs]
    q = [float(v) for v in pitch_coeffs] or [0.0]
    o = _orientation(orientation)
    hp = Polynomial([0.0, 0.0, 1.0] + c)
    dhp = hp.deriv()
    qp = Polynomial(q)

    def f(r):
        return 0.5 * o * dhp(np.asarray(r, dtype=float))

    def g(r):
        r = np.asarray(r, dtype=float)
        hv = hp(r)
        return 0.25 * dhp(r) ** 2 / hv + hv * qp(r) ** 2

    return RadialProfile(
        f=f,
        g=g,
        h=lambda r: hp(np.asarray(r, dtype=float)),
        dh=lambda r: dhp(np.asarray(r, dtype=float)),
        gap=lambda r: (hp(np.asarray(r, dtype=float)) * qp(np.asarray(r, dtype=float))) ** 2,
        r_max=r_max,
        source=("closed-form", "polynomial", (o, tuple(c), tuple(q))),
    )


def from_table(rows, h0=None):
    """Sampled profile from rows ``(r, f, g, h)`` with monotone cubic interpolation."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] < 2:
        raise FormatError("profile table needs at least two rows of 'r f g h'")
    r = arr[:, 0]
    if np.any(np.diff(r) <= 0) or r[0] < 0:
        raise FormatError("profile table radii must be non-negative and strictly increasing")
    fi, gi, hi = (PchipInterpolator(r, arr[:, k], extrapolate=True) for k in (1, 2, 3))
    if h0 is None:
        h0 = float(hi(0.0))
    return RadialProfile(
        f=lambda x: fi(np.asarray(x, dtype=float)),
        g=lambda x: gi(np.asarray(x, dtype=float)),
        h=lambda x: hi(np.asarray(x, dtype=float)),
        h0=float(h0),
        r_max=float(r[-1]),
        sampled=True,
        source=("table", arr),
    )


def _parse_polynomial(params, r_max):
    if not params:
        raise FormatError("polynomial needs an orientation")
    tokens = list(params[1:])
    if "/" in tokens:
        cut = tokens.index("/")
        c, q = tokens[:cut], tokens[cut + 1:]
    else:
        c, q = tokens, []
    return polynomial([float(v) for v in c], [float(v) for v in q], int(params[0]), r_max=r_max)


REGISTRY = {
    "identity": lambda params, r_max: identity(*[int(p) for p in params], r_max=r_max),
    "unit-pitch-spiral": lambda params, r_max: unit_pitch_spiral(*[int(p) for p in params], r_max=r_max),
    "power-law": lambda params, r_max: power_law(
        *[float(p) for p in params[:2]], *[int(p) for p in params[2:3]], r_max=r_max
    ),
    "polynomial": _parse_polynomial,
}


def parse_profile(text):
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0].split() != ["profile", "v1"]:
        raise FormatError("profile file must start with 'profile v1'")
    r_max = 2.0
    body = lines[1:]
    if body and body[0].startswith("r_max"):
        try:
            r_max = float(body[0].split()[1])
        except (IndexError, ValueError) as exc:
            raise FormatError(f"bad r_max line: {body[0]!r}") from exc
        body = body[1:]
    if not body:
        raise FormatError("profile file has no body")
    head = body[0].split()
    if head[0] == "closed-form":
        if len(head) < 2 or head[1] not in REGISTRY:
            raise FormatError(f"unknown closed-form profile {head[1:2]}; known: {sorted(REGISTRY)}")
        try:
            return REGISTRY[head[1]](head[2:], r_max)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad parameters for {head[1]}: {head[2:]}") from exc
    if head == ["table"]:
        try:
            rows = [[float(v) for v in ln.split()] for ln in body[1:]]
        except ValueError as exc:
            raise FormatError("table rows must be numeric 'r f g h'") from exc
        return from_table(rows)
    raise FormatError(f"expected 'closed-form' or 'table', got {body[0]!r}")


def load_profile(path):
    with open(path) as fh:
        return parse_profile(fh.read())


def format_profile(profile):
    """Inverse of :func:`parse_profile` for profiles built by this module."""
    src = profile.source
    if not src:
        raise ArgumentError("profile has no serializable source")
    out = ["profile v1"]
    if src[0] == "closed-form":
        name, params = src[1], src[2]
        out.append(f"r_max {profile.r_max!r}")
        if name == "polynomial":
            o, c, q = params
            tokens = [str(o)] + [repr(v) for v in c] + ["/"] + [repr(v) for v in q]
        else:
            tokens = [repr(p) if isinstance(p, float) else str(p) for p in params]
        out.append(" ".join(["closed-form", name] + tokens))
    else:
        out.append("table")
        out.extend(" ".join(repr(float(v)) for v in row) for row in src[1])
    return "\n".join(out) + "\n"
