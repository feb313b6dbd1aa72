"""JSON configuration records for the command-line runner.

Maps are given as a builtin name (``"identity"``, ``"scaling"``, ``"shear"``,
``"rotation"``, ``"unit-pitch-spiral"``), as ``{"builtin": name, "params": [...]}``,
as an inline spiral spec ``{"eps1", "eps2", "theta0", "profile"}`` or as
``{"spec": "path/to/spec.json"}``.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, IsodeformError
from .field import SpectralFieldSpec
from .geometry import Rect, Segment, seeded_rotations
from .polarmap import BUILTIN_MAPS
from .profiles import unit_pitch_spiral
from .spiral import SpiralSpec, build_spiral, load_spec


def resolve_map(obj, base_dir="."):
    if isinstance(obj, str):
        obj = {"builtin": obj}
    if not isinstance(obj, dict):
        raise ConfigurationError(f"cannot interpret map {obj!r}")
    if "eps1" in obj:
        return build_spiral(SpiralSpec.from_dict(obj, base_dir))
    if "spec" in obj:
        return build_spiral(load_spec(os.path.join(base_dir, obj["spec"])))
    name = obj.get("builtin")
    params = obj.get("params", [])
    if name == "unit-pitch-spiral":
        return build_spiral(SpiralSpec(1, 1, 0.0, unit_pitch_spiral(r_max=float(obj.get("r_max", 4.0)))))
    if name not in BUILTIN_MAPS:
        raise ConfigurationError(f"unknown map {name!r}; known: {sorted(BUILTIN_MAPS) + ['unit-pitch-spiral']}")
    try:
        return BUILTIN_MAPS[name](*params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for map {name}: {params}") from exc


def parse_rect(d):
    try:
        return Rect(tuple(map(float, d["center"])), tuple(map(float, d["halfwidths"])),
                    float(d.get("orientation", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad rectangle {d!r}") from exc


def parse_segment(d):
    try:
        return Segment(tuple(map(float, d["p0"])), tuple(map(float, d["p1"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad segment {d!r}") from exc


def parse_shape(d):
    if "rect" in d:
        return parse_rect(d["rect"])
    if "segment" in d:
        return parse_segment(d["segment"])
    raise ConfigurationError("shape must have a 'rect' or 'segment' key")


def parse_rotations(obj):
    if isinstance(obj, dict):
        return seeded_rotations(int(obj.get("random", 8)), int(obj.get("seed", 0)))
    return [float(p) for p in obj]


def parse_field(d):
    try:
        return SpectralFieldSpec(d.get("law", "rayleigh"), tuple(float(p) for p in d.get("params", [2.0])),
                                 int(d.get("n_harmonics", 200)), int(d.get("seed", 0)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, IsodeformError):
            raise
        raise ConfigurationError(f"bad field section {d!r}") from exc


def _require(d, key, kind):
    if key not in d:
        raise ConfigurationError(f"{kind} config is missing {key!r}")
    return d[key]


@dataclass
class GeometryConfig:
    map_obj: object
    shapes: list
    rotations: list
    n: int = 128
    tol_rel: float = 5e-3
    transform_id: str = ""


@dataclass
class ExperimentConfig:
    field: SpectralFieldSpec
    map_obj: object
    rect: Rect
    levels: list
    rotations: list
    replicates: int = 2000
    resolution: int = 128
    transform_id: str = ""
    extra: dict = field(default_factory=dict)


def load_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc})") from exc


def _map_id(obj):
    return obj if isinstance(obj, str) else obj.get("builtin") or obj.get("spec") or "spiral-spec"


def geometry_config(d, base_dir="."):
    shapes = d.get("shapes") or [_require(d, "shape", "geometry")]
    map_obj = _require(d, "map", "geometry")
    return GeometryConfig(
        map_obj=resolve_map(map_obj, base_dir),
        shapes=[parse_shape(s) for s in shapes],
        rotations=parse_rotations(d.get("rotations", {"random": 8, "seed": 0})),
        n=int(d.get("n", 128)),
        tol_rel=float(d.get("tol_rel", 5e-3)),
        transform_id=_map_id(map_obj),
    )


def experiment_config(d, base_dir="."):
    map_obj = _require(d, "map", "experiment")
    replicates = int(d.get("replicates", 2000))
    resolution = int(d.get("resolution", 128))
    if replicates < 2 or resolution < 2:
        raise ConfigurationError("replicates and resolution must be >= 2")
    rotations = parse_rotations(d.get("rotations", [0.0, np.pi / 5, np.pi / 2]))
    return ExperimentConfig(
        field=parse_field(d.get("field", {})),
        map_obj=resolve_map(map_obj, base_dir),
        rect=parse_rect(_require(d, "rect", "experiment")),
        levels=[float(u) for u in d.get("levels", [-1.0, 0.0, 1.0])],
        rotations=rotations,
        replicates=replicates,
        resolution=resolution,
        transform_id=_map_id(map_obj),
    )
