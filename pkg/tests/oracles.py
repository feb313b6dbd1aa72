"""Independent reference computations used as test oracles.

None of these call into the package's numerical kernels.
"""

import itertools

import mpmath
import numpy as np
from scipy import ndimage


def euler_bruteforce(mask):
    """V - E + F by explicit enumeration of the closed unit squares' cells."""
    verts, edges, faces = set(), set(), set()
    for i, j in zip(*np.nonzero(np.asarray(mask, dtype=bool))):
        faces.add((i, j))
        corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
        verts.update(corners)
        edges.update({((i, j), (i, j + 1)), ((i + 1, j), (i + 1, j + 1)),
                      ((i, j), (i + 1, j)), ((i, j + 1), (i + 1, j + 1))})
    return len(verts) - len(edges) + len(faces)


def components_minus_holes(mask):
    """8-connected foreground components minus 4-connected bounded background components."""
    m = np.pad(np.asarray(mask, dtype=bool), 1)
    _, n_fg = ndimage.label(m, structure=np.ones((3, 3)))
    _, n_bg = ndimage.label(~m, structure=ndimage.generate_binary_structure(2, 1))
    return n_fg - (n_bg - 1)


def theta_bar_mp(f, g, h, r, eps2=1, dps=30):
    """eps2 * int_0^r sqrt(g h - f^2)/h with mpmath tanh-sinh quadrature."""
    mpmath.mp.dps = dps
    integrand = lambda x: mpmath.sqrt(max(g(x) * h(x) - f(x) ** 2, 0)) / h(x)
    return eps2 * float(mpmath.quad(integrand, [0, r]))


def polygon_area(x, y):
    """Shoelace area of a closed polygon."""
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def raster_area(forward, rect_corners, inverse, box, n=2000):
    """Area of F(E) by counting n x n grid cells of ``box`` whose centers map back into E."""
    (x0, x1), (y0, y1) = box
    xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
    ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
    X, Y = np.meshgrid(xs, ys)
    u, v = inverse(X, Y)
    (ux0, uy0), (ux1, uy1) = rect_corners
    inside = (u >= ux0) & (u <= ux1) & (v >= uy0) & (v <= uy1)
    return inside.sum() * (x1 - x0) * (y1 - y0) / n ** 2


def image_boundary(forward, corners, k=4000):
    """Densely sampled image of a polygon's boundary under ``forward``."""
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        t = np.linspace(0, 1, k, endpoint=False)
        pts.append(np.outer(1 - t, a) + np.outer(t, b))
    P = np.vstack(pts)
    return forward(P[:, 0], P[:, 1])


def curve_length(forward, p0, p1, k=200001):
    """Polyline length of the image of a segment."""
    t = np.linspace(0, 1, k)
    x = p0[0] + t * (p1[0] - p0[0])
    y = p0[1] + t * (p1[1] - p0[1])
    X, Y = forward(x, y)
    return float(np.sum(np.hypot(np.diff(X), np.diff(Y))))


def all_masks(h, w):
    """Every h x w boolean mask."""
    for bits in itertools.product([False, True], repeat=h * w):
        yield np.array(bits, dtype=bool).reshape(h, w)
