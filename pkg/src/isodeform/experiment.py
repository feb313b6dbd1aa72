"""Monte Carlo estimation of mean Euler characteristics of deformed excursion sets.

A replicate draws one field sample X, evaluates X(F(t)) on the m x m pixel
centers of the rotated rectangle phi(T) and thresholds at each level u.
Replicates are keyed by (base_seed, stream, index) and reduced in index
order, so results do not depend on how many workers computed them.
"""

import csv
import io
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .errors import ArgumentError, ConfigurationError
from .euler import BinaryGrid, euler_characteristic
from .field import sample_field
from .geometry import PlanarMap, Rect, frontier_length, pushforward_area, rect_midpoints


@dataclass
class ExcursionDesign:
    """Image points F(t) of the pixel centers of phi(T), precomputed once.

    ``lattice`` holds (origin, step_i, step_j) when F is linear, in which case
    the field is evaluated by the separable fast path.
    """

    m: int
    points: tuple = None
    lattice: tuple = None

    def evaluate(self, sample):
        if self.lattice is not None:
            origin, si, sj = self.lattice
            return sample.on_lattice(origin, si, sj, self.m, self.m)
        return sample.evaluate_fast(*self.points)


def excursion_design(F, T, phi, m):
    if m < 2:
        raise ArgumentError("resolution m must be at least 2")
    Tr = T.rotated(phi)
    x, y = rect_midpoints(Tr, m)
    linear = getattr(F, "linear", None)
    if linear is not None:
        A = np.asarray(linear, dtype=float)
        e1, e2 = Tr.axes()
        a, b = Tr.half_widths
        origin = A @ np.array([x[0, 0], y[0, 0]])
        return ExcursionDesign(m, lattice=(origin, A @ (e1 * 2 * a / m), A @ (e2 * 2 * b / m)))
    forward = F if isinstance(F, PlanarMap) else PlanarMap.from_polar(F)
    X, Y = forward(x, y)
    return ExcursionDesign(m, points=(np.asarray(X, dtype=float), np.asarray(Y, dtype=float)))


def deformed_excursion(sample, F, T, phi, u, m=128):
    """Excursion set {t in phi(T): X(F(t)) >= u} rasterized at m x m pixel centers."""
    values = excursion_design(F, T, phi, m).evaluate(sample)
    Tr = T.rotated(phi)
    a, b = Tr.half_widths
    return BinaryGrid(values >= u, (2 * a / m, 2 * b / m), Tr)


def _chi_chunk(args):
    spec, design, levels, stream, indices = args
    out = np.empty((len(indices), len(levels)), dtype=np.int64)
    lv = np.asarray(levels, dtype=float)[:, None, None]
    for row, idx in enumerate(indices):
        values = design.evaluate(sample_field(spec, idx, stream))
        out[row] = euler_characteristic(values[None, :, :] >= lv)
    return out


def chi_samples(spec, design, levels, replicates, stream=0, workers=1):
    """Euler characteristics, shape (replicates, len(levels)), in replicate order."""
    indices = list(range(int(replicates)))
    if workers <= 1 or replicates < 2:
        return _chi_chunk((spec, design, levels, stream, indices))
    n_chunks = min(len(indices), 4 * int(workers))
    chunks = [c.tolist() for c in np.array_split(indices, n_chunks) if c.size]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=int(workers), mp_context=ctx) as pool:
        parts = list(pool.map(_chi_chunk, [(spec, design, levels, stream, c) for c in chunks]))
    return np.concatenate(parts, axis=0)


@dataclass
class EulerEstimate:
    mean: float
    std_err: float
    replicates: int
    u: float
    rotation: float


def _estimate(chis, u, phi):
    n = chis.size
    mean = float(np.mean(chis))
    se = float(np.std(chis, ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
    return EulerEstimate(mean, se, int(n), float(u), float(phi))


def mean_euler_levels(spec, F, T, phi, levels, replicates, m=128, stream=0, workers=1):
    if replicates < 2:
        raise ArgumentError("need at least 2 replicates")
    design = excursion_design(F, T, phi, m)
    chis = chi_samples(spec, design, levels, replicates, stream, workers)
    return [_estimate(chis[:, k], u, phi) for k, u in enumerate(levels)]


def mean_euler(spec, F, T, phi, u, replicates, m=128, stream=0, workers=1):
    """Sample mean and standard error of chi(A_u(X o F, phi(T))) over replicates."""
    return mean_euler_levels(spec, F, T, phi, [u], replicates, m, stream, workers)[0]


def z_score(est, ref):
    diff = est.mean - ref.mean
    se = np.hypot(est.std_err, ref.std_err)
    if se == 0:
        return 0.0 if diff == 0 else float(np.copysign(np.inf, diff))
    return float(diff / se)


@dataclass
class IsotropyReport:
    rows: List[dict] = field(default_factory=list)
    threshold: float = 3.0

    @property
    def passed(self):
        return all(row["pass"] for row in self.rows)

    @property
    def max_abs_z(self):
        return max(abs(row["z"]) for row in self.rows)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["u", "rotation", "mean_chi", "std_err", "z", "pass"])
        for row in self.rows:
            writer.writerow([repr(row["u"]), repr(row["rotation"]), repr(row["mean_chi"]),
                             repr(row["std_err"]), repr(row["z"]), str(row["pass"]).lower()])
        return buf.getvalue()

    def summary(self):
        return {"pass": self.passed, "max_abs_z": self.max_abs_z, "threshold": self.threshold,
                "n_tests": len(self.rows), "n_fail": sum(not r["pass"] for r in self.rows)}


def weak_isotropy_test(spec, F, T, u_levels, rotations, replicates, m=128, workers=1,
                       threshold=3.0):
    """Compare mean chi over phi(T) with phi = 0 for every level, by z-scores.

    Rotation k uses random stream k, so estimates at different rotations are
    independent; pass iff every |z| <= threshold.
    """
    rotations = [float(p) for p in rotations]
    levels = [float(u) for u in u_levels]
    if len(rotations) < 2 or 0.0 not in rotations:
        raise ArgumentError("need at least two rotations including 0")
    by_rot = [mean_euler_levels(spec, F, T, phi, levels, replicates, m, stream=k, workers=workers)
              for k, phi in enumerate(rotations)]
    ref = by_rot[rotations.index(0.0)]
    report = IsotropyReport(threshold=threshold)
    for j, u in enumerate(levels):
        for k, phi in enumerate(rotations):
            est = by_rot[k][j]
            z = z_score(est, ref[j])
            report.rows.append({"u": u, "rotation": phi, "mean_chi": est.mean,
                                "std_err": est.std_err, "z": z, "pass": bool(abs(z) <= threshold)})
    return report


@dataclass
class AreaLengthFit:
    area_coef: float
    length_coef: float
    intercept: float
    r2: float
    areas: np.ndarray
    lengths: np.ndarray
    means: np.ndarray
    std_errs: np.ndarray


def area_length_fit(spec, F, rects, u, replicates, m=128, workers=1, n_geom=64):
    """Least squares E[chi] ~ a * area(F(T)) + b * len(boundary F(T)) + c over rectangles."""
    rects = list(rects)
    if len(rects) < 4:
        raise ConfigurationError("need at least 4 rectangles")
    areas = np.array([pushforward_area(F, T, n_geom) for T in rects])
    lengths = np.array([frontier_length(F, T, n_geom) for T in rects])
    design = np.column_stack([areas, lengths, np.ones(len(rects))])
    # columns are quadrature outputs, so compare singular values relative to a 1e-8 noise floor
    scaled = design / np.linalg.norm(design, axis=0)
    if np.linalg.matrix_rank(scaled, tol=1e-8) < 3:
        raise ConfigurationError("rectangle family is rank-deficient in (area, boundary length)")
    ests = [mean_euler(spec, F, T, 0.0, u, replicates, m, stream=k, workers=workers)
            for k, T in enumerate(rects)]
    means = np.array([e.mean for e in ests])
    coef, *_ = np.linalg.lstsq(design, means, rcond=None)
    resid = means - design @ coef
    ss_tot = float(np.sum((means - means.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res < 1e-24 else 0.0)
    return AreaLengthFit(float(coef[0]), float(coef[1]), float(coef[2]), r2, areas, lengths,
                         means, np.array([e.std_err for e in ests]))


def default_rect_family():
    """Eight origin-avoiding rectangles with non-proportional (area, perimeter)."""
    sizes = [(0.5, 0.5), (1.0, 0.25), (1.0, 1.0), (1.5, 0.5), (2.0, 0.25), (0.75, 0.75),
             (1.25, 1.0), (2.0, 1.0)]
    return [Rect((3.0, 0.0), hw) for hw in sizes]
