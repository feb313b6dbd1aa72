"""Euler characteristic of binary masks as closed-square cubical complexes.

Each true pixel is a closed unit square; chi = V - E + F after merging shared
vertices and edges.  Squares touching only at a corner are connected, so this
counts 8-connected foreground components minus 4-connected holes.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FormatError


@dataclass
class BinaryGrid:
    mask: np.ndarray
    pixel_size: tuple = (1.0, 1.0)
    anchor: Optional[object] = None


def cell_counts(mask):
    """(V, E, F) of the closed-square complex of ``mask`` (last two axes)."""
    m = np.asarray(mask, dtype=bool)
    pad = [(0, 0)] * (m.ndim - 2) + [(1, 1), (1, 1)]
    p = np.pad(m, pad)
    axes = (-2, -1)
    faces = m.sum(axis=axes)
    verts = (p[..., :-1, :-1] | p[..., :-1, 1:] | p[..., 1:, :-1] | p[..., 1:, 1:]).sum(axis=axes)
    e_h = (p[..., :-1, 1:-1] | p[..., 1:, 1:-1]).sum(axis=axes)
    e_v = (p[..., 1:-1, :-1] | p[..., 1:-1, 1:]).sum(axis=axes)
    return verts, e_h + e_v, faces


def euler_characteristic(grid):
    """chi of a BinaryGrid or boolean array; a stack of masks gives an array of values."""
    mask = grid.mask if isinstance(grid, BinaryGrid) else grid
    v, e, f = cell_counts(mask)
    chi = np.asarray(v - e + f, dtype=np.int64)
    return int(chi) if chi.ndim == 0 else chi


def write_pgm(path, mask):
    m = np.asarray(mask, dtype=bool)
    h, w = m.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.where(m, 255, 0).astype(np.uint8).tobytes())


def read_pgm(path):
    """Binary mask from a P5 PGM; any non-zero pixel is true."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise FormatError("only binary P5 PGM is supported")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval > 255:
        raise FormatError("16-bit PGM not supported")
    raw = np.frombuffer(data[pos + 1:pos + 1 + w * h], dtype=np.uint8)
    if raw.size != w * h:
        raise FormatError("PGM pixel data truncated")
    return raw.reshape(h, w) > 0
