"""Planar deformations in polar form: (r, theta) -> (R(r, theta), Theta(r, theta)).

Theta is always an unwrapped lift, continuous in theta, so that
``Theta(r, theta + 2*pi) = Theta(r, theta) + 2*pi*k`` with a fixed winding k.
Callables are vectorized over broadcastable arrays.

Sampled-map text format::

    polarmap v1 nr <int> ntheta <int>
    <r> <theta> <R> <Theta>        (nr*ntheta rows, r outer)
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import FormatError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PolarMap:
    R: Callable
    Theta: Callable
    r_max: float = 2.0
    dR_dr: Optional[Callable] = None
    dR_dtheta: Optional[Callable] = None
    dTheta_dr: Optional[Callable] = None
    dTheta_dtheta: Optional[Callable] = None
    name: str = "map"
    # sampled maps cannot be probed closer to the origin than their first row
    sampled: bool = False
    # 2x2 matrix when the cartesian map is linear (enables lattice fast paths)
    linear: Optional[np.ndarray] = field(default=None, compare=False)
    # lower end of the radial domain; difference stencils stay inside [r_min, r_max]
    r_min: float = 0.0

    @property
    def has_partials(self):
        return None not in (self.dR_dr, self.dR_dtheta, self.dTheta_dr, self.dTheta_dtheta)

    def cartesian(self, x, y):
        """Forward map F(x, y) = (R cos Theta, R sin Theta)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        th = np.arctan2(y, x)
        R = self.R(r, th)
        T = self.Theta(r, th)
        return R * np.cos(T), R * np.sin(T)


def _bcast(r, theta):
    return np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(theta, dtype=float))


def identity_map(r_max=2.0):
    return PolarMap(
        R=lambda r, t: _bcast(r, t)[0].copy(),
        Theta=lambda r, t: _bcast(r, t)[1].copy(),
        dR_dr=lambda r, t: np.ones(_bcast(r, t)[0].shape),
        dR_dtheta=lambda r, t: np.zeros(_bcast(r, t)[0].shape),
        dTheta_dr=lambda r, t: np.zeros(_bcast(r, t)[0].shape),
        dTheta_dtheta=lambda r, t: np.ones(_bcast(r, t)[0].shape),
        r_max=r_max,
        name="identity",
        linear=np.eye(2),
    )


def linear_map(A, name="linear", r_max=2.0):
    """Polar form of the cartesian linear map p -> A p, with analytic partials.

    The angular lift is taken on the branch through ``arg(A e1)`` at theta = 0,
    which is continuous as long as ``arg(A u) - w*theta`` stays within pi of that
    value (w = sign det A); true for every map used here.
    """
    A = np.array(A, dtype=float)
    if A.shape != (2, 2):
        raise ValueError("A must be 2x2")
    w = 1.0 if np.linalg.det(A) > 0 else -1.0
    delta0 = np.arctan2(A[1, 0], A[0, 0])

    def image(r, t):
        r, t = _bcast(r, t)
        c, s = np.cos(t), np.sin(t)
        return A[0, 0] * c + A[0, 1] * s, A[1, 0] * c + A[1, 1] * s, r, c, s

    def R(r, t):
        ux, uy, r, _, _ = image(r, t)
        return r * np.hypot(ux, uy)

    def Theta(r, t):
        ux, uy, r, _, _ = image(r, t)
        t = np.broadcast_to(np.asarray(t, dtype=float), r.shape)
        d = np.arctan2(uy, ux) - w * t - delta0
        return w * t + delta0 + (d + np.pi) % TWO_PI - np.pi

    def frame(r, t):
        # unit radial/tangential vectors at the image point, and A u, A u_perp
        ux, uy, r, c, s = image(r, t)
        n = np.hypot(ux, uy)
        er = (ux / n, uy / n)
        et = (-er[1], er[0])
        du_t = (-A[0, 0] * s + A[0, 1] * c, -A[1, 0] * s + A[1, 1] * c)
        return r, n, er, et, (ux, uy), du_t

    def dR_dr(r, t):
        _, _, er, _, du, _ = frame(r, t)
        return er[0] * du[0] + er[1] * du[1]

    def dR_dtheta(r, t):
        r, _, er, _, _, dt = frame(r, t)
        return r * (er[0] * dt[0] + er[1] * dt[1])

    def dTheta_dr(r, t):
        _, n, _, et, du, _ = frame(r, t)
        return (et[0] * du[0] + et[1] * du[1]) / n

    def dTheta_dtheta(r, t):
        _, n, _, et, _, dt = frame(r, t)
        return (et[0] * dt[0] + et[1] * dt[1]) / n

    return PolarMap(R, Theta, r_max, dR_dr, dR_dtheta, dTheta_dr, dTheta_dtheta, name=name, linear=A)


def scaling(sx=2.0, sy=1.0, r_max=2.0):
    return linear_map([[sx, 0.0], [0.0, sy]], name=f"scaling({sx:g},{sy:g})", r_max=r_max)


def shear(k=0.3, r_max=2.0):
    return linear_map([[1.0, k], [0.0, 1.0]], name=f"shear({k:g})", r_max=r_max)


def rotation(angle, r_max=2.0):
    c, s = np.cos(angle), np.sin(angle)
    return linear_map([[c, -s], [s, c]], name=f"rotation({angle:g})", r_max=r_max)


BUILTIN_MAPS = {
    "identity": identity_map,
    "scaling": scaling,
    "shear": shear,
    "rotation": rotation,
}


def winding_numbers(theta, Theta_rows):
    """Winding number k of each constant-r row of an unwrapped angle table."""
    theta = np.asarray(theta, dtype=float)
    Theta_rows = np.atleast_2d(Theta_rows)
    span = Theta_rows[:, -1] - Theta_rows[:, 0]
    last = Theta_rows[:, -1] - Theta_rows[:, -2]
    return np.rint((span + last) / TWO_PI).astype(int)


def sampled_map(r, theta, R_tab, Theta_tab, name="sampled"):
    """Spline-backed PolarMap from a full-circle table (uniform theta, r increasing).

    R and Theta - k*theta are interpolated by bicubic splines on a theta axis
    padded periodically; evaluation reduces theta into the table's period.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    R_tab = np.asarray(R_tab, dtype=float)
    Theta_tab = np.asarray(Theta_tab, dtype=float)
    nr, nt = r.size, theta.size
    if R_tab.shape != (nr, nt) or Theta_tab.shape != (nr, nt):
        raise FormatError("table shape does not match the (r, theta) axes")
    if nr < 4 or nt < 8:
        raise FormatError("need at least 4 radii and 8 angles")
    if np.any(np.diff(r) <= 0):
        raise FormatError("radii must be strictly increasing")
    steps = np.diff(theta)
    step = TWO_PI / nt
    if not np.allclose(steps, step, rtol=1e-6, atol=1e-9):
        raise FormatError("angles must be uniform and cover the full circle")
    k_rows = winding_numbers(theta, Theta_tab)
    if np.any(k_rows != k_rows[0]):
        raise FormatError(f"winding number varies across rows: {sorted(set(k_rows.tolist()))}")
    k = int(k_rows[0])
    periodic = Theta_tab - k * theta[None, :]
    pad = 4
    t_ext = np.concatenate([theta[-pad:] - TWO_PI, theta, theta[:pad] + TWO_PI])

    def ext(a):
        return np.concatenate([a[:, -pad:], a, a[:, :pad]], axis=1)

    sR = RectBivariateSpline(r, t_ext, ext(R_tab), kx=3, ky=3)
    sP = RectBivariateSpline(r, t_ext, ext(periodic), kx=3, ky=3)
    t0 = theta[0]

    def ev(spline, rr, tt):
        rr, tt = _bcast(rr, tt)
        tm = t0 + np.mod(tt - t0, TWO_PI)
        return spline.ev(rr.ravel(), tm.ravel()).reshape(rr.shape)

    def Theta(rr, tt):
        rr, tt = _bcast(rr, tt)
        return k * tt + ev(sP, rr, tt)

    return PolarMap(R=lambda rr, tt: ev(sR, rr, tt), Theta=Theta, r_max=float(r[-1]),
                    name=name, sampled=True, r_min=float(r[0]))


def default_grid(r_max, nr=64, ntheta=64, r_min_frac=0.05):
    """Geometric radii from ``r_min_frac * r_max`` to ``r_max`` and uniform angles on [0, 2pi)."""
    r = np.geomspace(r_min_frac * r_max, r_max, nr)
    theta = np.arange(ntheta) * (TWO_PI / ntheta)
    return r, theta


def sample_table(pm, r, theta):
    rr, tt = np.meshgrid(np.asarray(r, float), np.asarray(theta, float), indexing="ij")
    return pm.R(rr, tt), pm.Theta(rr, tt)


def format_polarmap(r, theta, R_tab, Theta_tab):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    lines = [f"polarmap v1 nr {r.size} ntheta {theta.size}"]
    for i, ri in enumerate(r):
        for j, tj in enumerate(theta):
            lines.append(f"{float(ri)!r} {float(tj)!r} {float(R_tab[i, j])!r} {float(Theta_tab[i, j])!r}")
    return "\n".join(lines) + "\n"


def write_polarmap(path, pm, r, theta):
    R_tab, T_tab = sample_table(pm, r, theta)
    with open(path, "w") as fh:
        fh.write(format_polarmap(r, theta, R_tab, T_tab))


def parse_polarmap(text, name="sampled"):
    """Parse a sampled-map file; returns ``(PolarMap, r, theta, R_tab, Theta_tab)``."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty polarmap file")
    head = lines[0].split()
    if len(head) != 6 or head[:2] != ["polarmap", "v1"] or head[2] != "nr" or head[4] != "ntheta":
        raise FormatError("header must be 'polarmap v1 nr <int> ntheta <int>'")
    try:
        nr, nt = int(head[3]), int(head[5])
        data = np.array([[float(v) for v in ln.split()] for ln in lines[1:]])
    except ValueError as exc:
        raise FormatError("non-numeric entry in polarmap file") from exc
    if data.shape != (nr * nt, 4):
        raise FormatError(f"expected {nr * nt} rows of 4 columns, got {data.shape}")
    table = data.reshape(nr, nt, 4)
    r = table[:, 0, 0]
    theta = table[0, :, 1]
    if not (np.allclose(table[:, :, 0], r[:, None]) and np.allclose(table[:, :, 1], theta[None, :])):
        raise FormatError("rows are not a row-major (r outer) lattice")
    R_tab, T_tab = table[:, :, 2], table[:, :, 3]
    return sampled_map(r, theta, R_tab, T_tab, name=name), r, theta, R_tab, T_tab


def read_polarmap(path):
    with open(path) as fh:
        return parse_polarmap(fh.read(), name=str(path))
