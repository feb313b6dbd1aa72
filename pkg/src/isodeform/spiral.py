"""Spiral diffeomorphisms R = sqrt(h(r)), Theta = eps1*theta + theta0 + theta_bar(r).

``theta_bar(r) = eps2 * int_0^r sqrt(g h - f^2) / h``.  The integrand may have an
integrable singularity at 0, so the first stretch ``[0, min(1, r_max)/4]`` is
integrated in the variable ``s = sqrt(r)``.
"""

import json
import os
import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import integrate

from .errors import (ArgumentError, DivergenceError, DomainError, EvaluationError,
                     ValidationError)
from .polarmap import PolarMap, _bcast
from .profiles import RadialProfile, format_profile, load_profile, parse_profile

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class Violation:
    condition: str
    radius: float
    value: float
    tol: float

    def to_dict(self):
        return {"condition": self.condition, "radius": self.radius,
                "value": self.value, "tol": self.tol}


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def conditions(self):
        return [v.condition for v in self.violations]

    def to_dict(self):
        return {"passed": self.passed, "violations": [v.to_dict() for v in self.violations]}


@dataclass(frozen=True)
class SpiralSpec:
    eps1: int
    eps2: int
    theta0: float
    profile: RadialProfile

    def __post_init__(self):
        if self.eps1 not in (-1, 1) or self.eps2 not in (-1, 1):
            raise ArgumentError("eps1 and eps2 must be +1 or -1")

    def to_dict(self):
        return {"eps1": self.eps1, "eps2": self.eps2, "theta0": self.theta0,
                "profile": format_profile(self.profile)}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d, base_dir="."):
        try:
            prof = d["profile"]
            if isinstance(prof, str) and prof.lstrip().startswith("profile"):
                profile = parse_profile(prof)
            elif isinstance(prof, str):
                profile = load_profile(os.path.join(base_dir, prof))
            else:
                raise ArgumentError("profile must be profile text or a profile file path")
            return cls(int(d["eps1"]), int(d["eps2"]), float(d.get("theta0", 0.0)) % (2 * np.pi),
                       profile)
        except KeyError as exc:
            raise ArgumentError(f"spiral spec is missing key {exc}") from exc


def load_spec(path):
    with open(path) as fh:
        return SpiralSpec.from_dict(json.load(fh), base_dir=os.path.dirname(os.path.abspath(path)))


def _finite_or_raise(name, r, values):
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = float(np.asarray(r)[np.argmax(bad)])
        raise EvaluationError(f"{name} is not finite at r={where!r}", where=where)


def validate_profile(profile, r_grid, tol=None):
    """Check the conditions on (f, g, h) under which the spiral solution exists.

    One violation (the first failing radius) is reported per condition.
    """
    r = np.asarray(r_grid, dtype=float)
    if r.size == 0:
        raise ArgumentError("empty radius grid")
    if np.any(np.diff(r) <= 0) or r[0] <= 0 or r[-1] > profile.r_max * (1 + 1e-12):
        raise ArgumentError("radius grid must be strictly increasing within (0, r_max]")
    tol = profile.default_tol if tol is None else float(tol)
    f, g, h = (np.broadcast_to(np.asarray(v, dtype=float), r.shape) for v in profile(r))
    dh = profile.dh_at(r)
    for name, vals in (("f", f), ("g", g), ("h", h), ("h'", dh)):
        _finite_or_raise(name, r, vals)

    report = ValidationReport()

    def first(condition, mask, values):
        if np.any(mask):
            k = int(np.argmax(mask))
            report.violations.append(Violation(condition, float(r[k]), float(values[k]), tol))

    if abs(profile.h0) > tol:
        report.violations.append(Violation("(i) h(0)=0", 0.0, float(profile.h0), tol))
    steps = np.diff(np.concatenate([[profile.h0], h]))
    first("(i) h strictly increasing", steps <= 0, steps)
    first("f non-vanishing", np.abs(f) <= tol, f)
    first("f constant sign", np.sign(f) != np.sign(f[0]), f)
    first("(ii) g>0", g <= 0, g)
    gap = g * h - f * f
    first("(ii) gh>=f^2", gap < -tol, gap)
    defect = np.abs(f) - 0.5 * np.abs(dh)
    first("(ii) |f|=h'/2", np.abs(defect) > tol * np.maximum(1.0, np.abs(f)), defect)
    return report


def check_orientation(spec, r_grid, tol=None):
    """Violations of ``f = eps1 * h'/2`` on the grid (empty list when consistent)."""
    prof = spec.profile
    tol = prof.default_tol if tol is None else tol
    r = np.asarray(r_grid, dtype=float)
    f = np.broadcast_to(prof.f(r), r.shape)
    defect = f - 0.5 * spec.eps1 * prof.dh_at(r)
    bad = np.abs(defect) > tol * np.maximum(1.0, np.abs(f))
    if np.any(bad):
        k = int(np.argmax(bad))
        return [Violation("(ii) f=eps1*h'/2", float(r[k]), float(defect[k]), tol)]
    return []


def _pitch(profile, tol):
    """Integrand sqrt(g h - f^2)/h, vectorized, with domain checks."""

    def q(x):
        x = np.asarray(x, dtype=float)
        h = profile.h(x)
        gap = profile.gap_at(x)
        if np.any(gap < -tol):
            k = np.argmax(np.broadcast_to(gap < -tol, x.shape))
            where = float(np.broadcast_to(x, np.shape(gap)).ravel()[k])
            raise DomainError(f"g*h - f^2 < 0 at r={where!r}")
        return np.sqrt(np.maximum(gap, 0.0)) / h

    return q


def _split_radius(profile):
    return min(1.0, profile.r_max) / 4.0


def _origin_probe(prof, q):
    """Behaviour of the s = sqrt(r) integrand 2 s q(s^2) at 0.

    Returns ``(floor, tail)``: below ``r = floor`` the integral is taken from
    a power law fitted to two probes, ``tail(r)`` (quadrature there would
    underflow).  Raises :class:`DivergenceError` when s * integrand does not
    decay, i.e. the integrand is at least as singular as 1/r.
    """
    S = np.sqrt(_split_radius(prof))
    probe = np.array([1e-6 * S, 1e-12 * S])
    with np.errstate(all="ignore"):
        sub = 2.0 * probe * q(probe * probe)
    where = float(probe[1] ** 2)
    pv = probe * sub
    if not np.all(np.isfinite(pv)):
        raise DivergenceError(f"integrand not finite near r={where!r}", where=where)
    if pv[0] > 0 and pv[1] >= 0.5 * pv[0]:
        raise DivergenceError(f"integrand ~ 1/r near r={where!r}", where=where)
    if sub[1] <= 0:
        return where, lambda r: 0.0 * np.asarray(r, dtype=float)
    k = np.log(sub[0] / sub[1]) / np.log(probe[0] / probe[1]) if sub[0] > 0 else 0.0

    def tail(r):
        s = np.sqrt(np.asarray(r, dtype=float))
        return sub[1] * probe[1] * (s / probe[1]) ** (k + 1) / (k + 1)

    return where, tail


def theta_bar(spec, r, quad_tol=1e-10):
    """Angular offset eps2 * int_0^r sqrt(g h - f^2)/h dr* by adaptive quadrature."""
    prof = spec.profile
    r = float(r)
    if r < 0 or r > prof.r_max * (1 + 1e-12):
        raise DomainError(f"r={r!r} outside [0, r_max={prof.r_max}]")
    if r == 0.0:
        return 0.0
    q = _pitch(prof, prof.default_tol)
    floor, tail = _origin_probe(prof, q)
    if r <= floor:
        return spec.eps2 * float(tail(r))
    a = min(r, _split_radius(prof))
    S = np.sqrt(a)

    def sub(s):
        return 2.0 * s * q(s * s)

    def run(func, lo, hi):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with np.errstate(all="ignore"):
                val, err = integrate.quad(lambda x: float(func(x)), lo, hi,
                                          epsabs=0.5 * quad_tol, epsrel=0.0, limit=500)
        # err is not checked against quad_tol: cancellation in g*h - f^2 near 0
        # inflates QUADPACK's estimate far above the true error
        if not np.isfinite(val) or not np.isfinite(err):
            raise DivergenceError(f"integral diverges on [{lo!r}, {hi!r}]", where=float(lo))
        return val

    total = run(sub, 0.0, S)
    if r > a:
        total += run(q, a, r)
    return spec.eps2 * total


def theta_bar_array(spec, radii):
    """Vectorized theta_bar: cumulative 8-point Gauss-Legendre over sorted radii.

    Used to evaluate built maps on large point sets; agrees with
    :func:`theta_bar` to ~1e-12 for smooth profiles.
    """
    prof = spec.profile
    r = np.asarray(radii, dtype=float)
    flat = r.ravel()
    if flat.size == 0:
        return np.zeros_like(r)
    if np.any(flat < 0) or not np.all(np.isfinite(flat)):
        raise DomainError("radii must be finite and non-negative")
    if prof.sampled and flat.max() > prof.r_max * (1 + 1e-12):
        raise DomainError(f"sampled profile queried beyond r_max={prof.r_max}")
    uniq, inv = np.unique(flat, return_inverse=True)
    r_s = _split_radius(prof)
    q = _pitch(prof, prof.default_tol)
    floor, tail = _origin_probe(prof, q)
    pts = np.union1d(np.concatenate([[floor], uniq[uniq > floor]]), [r_s] if r_s < uniq[-1] else [])
    a, b = pts[:-1], pts[1:]
    sing = b <= r_s
    xa = np.where(sing, np.sqrt(a), a)
    xb = np.where(sing, np.sqrt(b), b)
    width = xb - xa
    hmax = np.where(sing, np.sqrt(r_s) / 64.0, prof.r_max / 256.0)
    npan = np.maximum(np.ceil(width / hmax).astype(int), 1)
    idx = np.repeat(np.arange(a.size), npan)
    j = np.arange(idx.size) - np.repeat(np.cumsum(npan) - npan, npan)
    pw = width[idx] / npan[idx]
    lo = xa[idx] + j * pw
    x = lo[:, None] + 0.5 * pw[:, None] * (_GL_X[None, :] + 1.0)
    rows = sing[idx]
    vals = np.empty_like(x)
    with np.errstate(all="ignore"):
        vals[rows] = 2.0 * x[rows] * q(x[rows] ** 2)
        vals[~rows] = q(x[~rows])
    if not np.all(np.isfinite(vals)):
        k = np.argmax(~np.isfinite(vals).all(axis=1))
        where = float(lo[k] ** 2 if sing[idx][k] else lo[k])
        raise DivergenceError(f"integrand not finite near r={where!r}", where=where)
    pieces = np.bincount(idx, weights=0.5 * pw * (vals @ _GL_W), minlength=a.size)
    cum = float(tail(floor)) + np.concatenate([[0.0], np.cumsum(pieces)])
    small = uniq <= floor
    out = np.where(small, tail(uniq), cum[np.minimum(np.searchsorted(pts, uniq), cum.size - 1)])
    return spec.eps2 * out[inv].reshape(r.shape)


def spec_check_grid(profile, n=256):
    return np.geomspace(1e-3 * profile.r_max, profile.r_max, n)


def build_spiral(spec, r_grid=None):
    """PolarMap of the spiral solution for ``spec``, with analytic partials.

    Raises :class:`ValidationError` when the profile fails validation or
    ``f != eps1 * h'/2``, and :class:`DivergenceError` when theta_bar diverges.
    """
    prof = spec.profile
    grid = spec_check_grid(prof) if r_grid is None else np.asarray(r_grid, dtype=float)
    report = validate_profile(prof, grid)
    report.violations.extend(check_orientation(spec, grid))
    if not report.passed:
        raise ValidationError(f"spiral spec invalid: {', '.join(report.conditions())}", report)
    theta_bar(spec, prof.r_max)
    e1, e2, t0 = spec.eps1, spec.eps2, spec.theta0
    h, dh = prof.h, prof.dh_at
    q = _pitch(prof, prof.default_tol)

    def R(r, t):
        r, _ = _bcast(r, t)
        return np.sqrt(np.broadcast_to(h(r), r.shape))

    def Theta(r, t):
        r, t = _bcast(r, t)
        return e1 * t + t0 + theta_bar_array(spec, r)

    def dR_dr(r, t):
        r, _ = _bcast(r, t)
        return np.broadcast_to(dh(r) / (2.0 * np.sqrt(h(r))), r.shape).copy()

    def dR_dtheta(r, t):
        return np.zeros(_bcast(r, t)[0].shape)

    def dTheta_dr(r, t):
        r, _ = _bcast(r, t)
        return np.broadcast_to(e2 * q(r), r.shape).copy()

    def dTheta_dtheta(r, t):
        return np.full(_bcast(r, t)[0].shape, float(e1))

    name = f"spiral[{prof.name},eps1={e1},eps2={e2},theta0={t0:g}]"
    return PolarMap(R, Theta, prof.r_max, dR_dr, dR_dtheta, dTheta_dr, dTheta_dtheta, name=name)
