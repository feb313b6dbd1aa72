"""Jacobian quantities of polar maps and residuals of the isotropy PDE systems.

For a polar map (R, Theta) the polar-form Jacobian has columns
``d/dr F`` and ``d/dtheta F``; their squared norms and its determinant are

    g = (dR/dr)^2 + (R dTheta/dr)^2
    h = (dR/dtheta)^2 + (R dTheta/dtheta)^2
    f = R (dR/dr dTheta/dtheta - dR/dtheta dTheta/dr)

and a map is a spiral exactly when all three are radial.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (ArgumentError, CapabilityError, ClassificationError,
                     DegenerateInputError)
from .polarmap import TWO_PI, _bcast, winding_numbers

RADIALITY_EPS = 1e-12


def partials(pm, r, theta, scheme="analytic", step=1e-5):
    """(dR/dr, dR/dtheta, dTheta/dr, dTheta/dtheta) at (r, theta).

    ``scheme="central"`` uses second-order central differences with ``step``
    on the unwrapped Theta; in r they become second-order one-sided stencils
    where the centered one would leave ``[pm.r_min, pm.r_max]``.
    """
    r, theta = _bcast(r, theta)
    if scheme == "analytic":
        if not pm.has_partials:
            raise CapabilityError(f"{pm.name} has no analytic partials")
        return (pm.dR_dr(r, theta), pm.dR_dtheta(r, theta),
                pm.dTheta_dr(r, theta), pm.dTheta_dtheta(r, theta))
    if scheme != "central":
        raise ArgumentError(f"unknown scheme {scheme!r}")
    if np.any(r <= step):
        raise ArgumentError(f"central differences need r > step={step}")
    two_h = 2.0 * step
    dR_dr = _radial_diff(pm.R, r, theta, step, pm.r_min, pm.r_max)
    dR_dt = (pm.R(r, theta + step) - pm.R(r, theta - step)) / two_h
    dT_dr = _radial_diff(pm.Theta, r, theta, step, pm.r_min, pm.r_max)
    dT_dt = (pm.Theta(r, theta + step) - pm.Theta(r, theta - step)) / two_h
    return dR_dr, dR_dt, dT_dr, dT_dt


def _radial_diff(func, r, theta, h, lo, hi):
    out = (func(r + h, theta) - func(r - h, theta)) / (2 * h)
    fwd = r - h < lo
    bwd = (r + h > hi) & ~fwd
    if np.any(fwd):
        rf, tf = r[fwd], theta[fwd]
        out[fwd] = (-3 * func(rf, tf) + 4 * func(rf + h, tf) - func(rf + 2 * h, tf)) / (2 * h)
    if np.any(bwd):
        rb, tb = r[bwd], theta[bwd]
        out[bwd] = (3 * func(rb, tb) - 4 * func(rb - h, tb) + func(rb - 2 * h, tb)) / (2 * h)
    return out


def _jacobian_terms(pm, r, theta, scheme, step):
    r, theta = _bcast(r, theta)
    R = pm.R(r, theta)
    dRr, dRt, dTr, dTt = partials(pm, r, theta, scheme, step)
    return R, dRr, dRt, dTr, dTt


def polarform_det(pm, r, theta, scheme="analytic", step=1e-5):
    """Determinant of the polar-form Jacobian, R (dR/dr dTheta/dtheta - dR/dtheta dTheta/dr)."""
    R, dRr, dRt, dTr, dTt = _jacobian_terms(pm, r, theta, scheme, step)
    return R * (dRr * dTt - dRt * dTr)


def _lattice(r, theta):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    return np.meshgrid(r, theta, indexing="ij")


def summarize(residual, rr, tt):
    """Max-abs / RMS summary with the location of the worst point."""
    a = np.abs(np.asarray(residual, dtype=float))
    k = np.unravel_index(int(np.argmax(a)), a.shape)
    return {"max": float(a[k]), "rms": float(np.sqrt(np.mean(a ** 2))),
            "argmax": [float(rr[k]), float(tt[k])]}


def _profile_on(profile, rr):
    f, g, h = (np.broadcast_to(np.asarray(v, dtype=float), rr.shape) for v in profile(rr))
    return f, g, h


def fgh_residuals(pm, profile, r, theta, scheme="analytic", step=1e-5):
    """Residuals of the three equalities f, g, h = polar Jacobian quantities on an (r, theta) lattice."""
    rr, tt = _lattice(r, theta)
    R, dRr, dRt, dTr, dTt = _jacobian_terms(pm, rr, tt, scheme, step)
    f, g, h = _profile_on(profile, rr)
    res = {
        "f": summarize(f - R * dRr * dTt + R * dRt * dTr, rr, tt),
        "g": summarize(g - dRr ** 2 - (R * dTr) ** 2, rr, tt),
        "h": summarize(h - dRt ** 2 - (R * dTt) ** 2, rr, tt),
    }
    res["max"] = max(v["max"] for v in res.values())
    return res


def radiality(values):
    """max over rows of (max - min) / (|mean| + 1e-12), rows being constant-r."""
    v = np.atleast_2d(values)
    spread = v.max(axis=1) - v.min(axis=1)
    return float(np.max(spread / (np.abs(v.mean(axis=1)) + RADIALITY_EPS)))


@dataclass
class FGHEstimate:
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    radiality: dict


def extract_fgh(pm, r, theta, scheme="analytic", step=1e-5):
    """Pointwise f, g, h on an (r, theta) lattice plus their radiality metrics."""
    rr, tt = _lattice(r, theta)
    R, dRr, dRt, dTr, dTt = _jacobian_terms(pm, rr, tt, scheme, step)
    f = R * (dRr * dTt - dRt * dTr)
    g = dRr ** 2 + (R * dTr) ** 2
    h = dRt ** 2 + (R * dTt) ** 2
    return FGHEstimate(f, g, h, {"f": radiality(f), "g": radiality(g), "h": radiality(h)})


def _discriminant(profile, rr, g):
    gap = np.broadcast_to(profile.gap_at(rr), rr.shape)
    tol = profile.default_tol
    if np.any(gap < -tol):
        raise DegenerateInputError("g*h - f^2 < 0 on the grid")
    return np.maximum(gap, 0.0)


@dataclass
class PhiDecomposition:
    phi: np.ndarray
    parity: int
    residuals: float
    defects: list = field(default_factory=list)


def phi_decomposition(pm, profile, r, theta, scheme="analytic", step=1e-5):
    """Angle field Phi and parity p writing the derivatives of (R, Theta) as

        dR/dr        = sqrt(g) cos Phi
        R dTheta/dr  = sqrt(g) sin Phi
        dR/dtheta    = (-1)^p sqrt((gh - f^2)/g) cos Phi - f/sqrt(g) sin Phi
        R dTheta/dth = (-1)^p sqrt((gh - f^2)/g) sin Phi + f/sqrt(g) cos Phi

    The parity is chosen (globally over the inputs) to minimise the defect of
    the last two lines; ``residuals`` is the max defect of all four.
    """
    r, theta = _bcast(r, theta)
    R, dRr, dRt, dTr, dTt = _jacobian_terms(pm, r, theta, scheme, step)
    f, g, h = _profile_on(profile, r)
    if np.any(g <= 0):
        raise DegenerateInputError("sqrt(g) = 0: Phi is undefined")
    sg = np.sqrt(g)
    a = np.sqrt(_discriminant(profile, r, g) / g)
    b = f / sg
    phi = np.arctan2(R * dTr, dRr)
    c, s = np.cos(phi), np.sin(phi)
    d1 = np.abs(dRr - sg * c)
    d2 = np.abs(R * dTr - sg * s)
    best = None
    for p in (0, 1):
        sign = -1.0 if p else 1.0
        d3 = np.abs(dRt - (sign * a * c - b * s))
        d4 = np.abs(R * dTt - (sign * a * s + b * c))
        worst = float(max(d3.max(), d4.max()))
        if best is None or worst < best[0]:
            best = (worst, p, [float(d1.max()), float(d2.max()), float(d3.max()), float(d4.max())])
    _, p, defects = best
    return PhiDecomposition(phi=phi, parity=p, residuals=max(defects), defects=defects)


def hyperbolic_residuals(pm, profile, parity, r, theta, scheme="analytic", step=1e-5):
    """Residuals of the linear transport system with radial coefficients

        dR/dtheta     = alpha dR/dr - beta R dTheta/dr
        R dTheta/dth  = alpha R dTheta/dr + beta dR/dr

    where alpha = (-1)^p sqrt(gh - f^2)/g and beta = f/g.  The sign of beta
    is reported as ``orientation`` (the system holds for either sign).
    """
    rr, tt = _lattice(r, theta)
    R, dRr, dRt, dTr, dTt = _jacobian_terms(pm, rr, tt, scheme, step)
    if np.any(R == 0):
        raise DegenerateInputError("R = 0 on the grid; exclude r = 0")
    f, g, h = _profile_on(profile, rr)
    if np.any(g <= 0):
        raise DegenerateInputError("g must be positive on the grid")
    alpha = (-1.0) ** parity * np.sqrt(_discriminant(profile, rr, g)) / g
    beta = f / g
    signs = np.unique(np.sign(beta))
    if signs.size != 1 or signs[0] == 0:
        raise DegenerateInputError("beta = f/g must keep a constant non-zero sign")
    res = {
        "R": summarize(dRt - alpha * dRr + beta * R * dTr, rr, tt),
        "Theta": summarize(R * dTt - alpha * R * dTr - beta * dRr, rr, tt),
    }
    res["max"] = max(res["R"]["max"], res["Theta"]["max"])
    res["orientation"] = int(signs[0])
    return res


@dataclass
class SpiralVerdict:
    is_spiral: bool
    eps1: int
    theta0: float
    r: np.ndarray
    r_profile: np.ndarray
    theta_bar_profile: np.ndarray
    diagnostics: dict

    def to_dict(self):
        return {
            "is_spiral": self.is_spiral,
            "eps1": self.eps1 if self.is_spiral else None,
            "theta0": self.theta0 if self.is_spiral else None,
            "r": self.r.tolist(),
            "r_profile": self.r_profile.tolist(),
            "theta_bar_profile": self.theta_bar_profile.tolist(),
            "diagnostics": self.diagnostics,
        }


def _spread_ok(values, tol):
    spread = values.max(axis=1) - values.min(axis=1)
    return spread <= tol * (1.0 + np.abs(values.mean(axis=1))), spread


def classify_spiral(pm, r, theta, scheme=None, tol=1e-6, step=1e-5):
    """Decide whether a map is a spiral R = R(r), Theta = eps1*theta + Theta_bar(r).

    ``theta`` must cover the full circle at each radius.  theta0 is the limit
    of Theta_bar at 0, linearly extrapolated from the two smallest radii; for
    maps that can be evaluated anywhere those radii are probes taken far inside
    the grid's first radius.  ``scheme=None`` uses analytic partials when the
    map has them and central differences otherwise.
    """
    if scheme is None:
        scheme = "analytic" if pm.has_partials else "central"
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.size < 3 or theta.max() - theta.min() < TWO_PI * (1 - 2.0 / theta.size):
        raise ArgumentError("theta grid must cover the full circle")
    rr, tt = _lattice(r, theta)
    R = pm.R(rr, tt)
    Th = pm.Theta(rr, tt)
    dTt = partials(pm, rr, tt, scheme, step)[3]
    signs = np.sign(dTt)
    if np.any(signs == 0) or np.unique(signs).size != 1:
        raise ClassificationError("dTheta/dtheta changes sign or vanishes: map is not orientation-consistent")
    eps1 = int(signs.flat[0])
    tbar = Th - eps1 * tt
    ok_R, spread_R = _spread_ok(R, tol)
    ok_T, spread_T = _spread_ok(tbar, tol)
    is_spiral = bool(ok_R.all() and ok_T.all())

    if pm.sampled:
        probe_r = r[:2]
        probe = tbar[:2].mean(axis=1)
    else:
        probe_r = r[0] * np.array([1e-8, 2e-8])
        pr, pt = _lattice(probe_r, theta)
        probe = (pm.Theta(pr, pt) - eps1 * pt).mean(axis=1)
    theta0_raw = probe[0] - probe_r[0] * (probe[1] - probe[0]) / (probe_r[1] - probe_r[0])
    theta0 = float(np.mod(theta0_raw, TWO_PI))
    if TWO_PI - theta0 < 1e-12:
        theta0 = 0.0

    est = extract_fgh(pm, r, theta, scheme, step)
    diagnostics = {
        "R_radiality": radiality(R),
        "R_spread_max": float(spread_R.max()),
        "theta_bar_radiality": radiality(tbar),
        "theta_bar_spread_max": float(spread_T.max()),
        "f_radiality": est.radiality["f"],
        "g_radiality": est.radiality["g"],
        "h_radiality": est.radiality["h"],
        "winding": int(winding_numbers(theta, Th)[0]) if theta.size > 2 else None,
    }
    return SpiralVerdict(is_spiral, eps1, theta0, r, R.mean(axis=1), tbar.mean(axis=1), diagnostics)
