"""``isodeform`` command-line runner.

Exit codes: 0 pass, 1 analytic or statistical test failed, 2 input error.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import classify_spiral, fgh_residuals
from .config import experiment_config, geometry_config, load_json
from .errors import IsodeformError, ValidationError
from .euler import euler_characteristic, read_pgm, write_pgm
from .experiment import deformed_excursion, weak_isotropy_test
from .field import sample_field
from .geometry import rotation_invariance_report
from .polarmap import default_grid, read_polarmap, write_polarmap
from .profiles import load_profile
from .spiral import build_spiral, check_orientation, load_spec, spec_check_grid, validate_profile

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

# (flags, kwargs, commands) -- shared by the parser and the manual page
FLAGS = [
    (("--config",), dict(metavar="PATH", help="input file: spec, polarmap or JSON experiment config"),
     "build classify residuals geometry isotropy euler"),
    (("--out",), dict(metavar="PATH", help="output path (polarmap file, report or CSV table)"),
     "build classify residuals geometry isotropy"),
    (("--workers",), dict(type=int, default=1, metavar="N", help="worker processes for replicate fan-out"),
     "isotropy"),
    (("--threshold",), dict(type=float, metavar="X",
                            help="pass threshold: max residual (residuals) or max |z| (isotropy)"),
     "residuals isotropy"),
    (("--format",), dict(choices=["json", "csv"], default=None, help="report format"),
     "geometry isotropy"),
    (("--profile",), dict(metavar="PATH", help="radial profile file"), "residuals"),
    (("--scheme",), dict(choices=["analytic", "central"], default=None,
                         help="derivative scheme (default: analytic when available, else central)"),
     "residuals classify"),
    (("--step",), dict(type=float, default=1e-5, metavar="H", help="finite-difference step"),
     "residuals classify"),
    (("--tol",), dict(type=float, default=1e-6, metavar="X", help="radiality tolerance"), "classify"),
    (("--nr",), dict(type=int, default=64, metavar="N", help="radii in the written polarmap"), "build"),
    (("--ntheta",), dict(type=int, default=64, metavar="N", help="angles in the written polarmap"), "build"),
    (("--report",), dict(metavar="PATH", help="also write the JSON report/summary here"),
     "build isotropy"),
    (("--dump-masks",), dict(metavar="DIR", help="write replicate-0 excursion masks as PGM files"),
     "isotropy"),
    (("-v", "--verbose"), dict(action="count", default=0, help="progress messages on stderr"),
     "build classify residuals geometry isotropy euler"),
]

COMMANDS = {
    "build": "build a spiral from a spec file; write a polarmap file and a validation report",
    "classify": "decide whether a polarmap file is a spiral deformation",
    "residuals": "residuals of the (f, g, h) identities of a polarmap against a profile",
    "geometry": "rotation invariance of pushed-forward areas or lengths",
    "isotropy": "Monte Carlo weak-isotropy test of mean Euler characteristics",
    "euler": "Euler characteristic of a PGM mask",
    "man": "print the manual page",
}


def build_parser():
    parser = argparse.ArgumentParser(prog="isodeform", description="Isotropy-preserving deformations toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        if name == "residuals":
            p.add_argument("input", nargs="?", help="polarmap file")
            p.add_argument("profile_file", nargs="?", help="profile file")
        elif name != "man":
            p.add_argument("input", nargs="?", help="input file (same as --config)")
        for flags, kwargs, commands in FLAGS:
            if name in commands.split():
                p.add_argument(*flags, **kwargs)
    return parser


def manpage():
    lines = [".TH ISODEFORM 1", ".SH NAME", "isodeform \\- isotropy-preserving deformations toolkit",
             ".SH SYNOPSIS", "isodeform COMMAND [INPUT] [OPTIONS]", ".SH COMMANDS"]
    for name, text in COMMANDS.items():
        lines += [".TP", f"\\fB{name}\\fR", text]
    lines.append(".SH OPTIONS")
    for flags, kwargs, commands in FLAGS:
        metavar = kwargs.get("metavar") or ("|".join(kwargs["choices"]) if "choices" in kwargs else "")
        head = ", ".join(f"\\fB{f}\\fR" for f in flags) + (f" {metavar}" if metavar else "")
        lines += [".TP", head, f"{kwargs['help']} (commands: {commands.replace(' ', ', ')})"]
    lines += [".SH EXIT STATUS", "0 pass, 1 test failed, 2 input error."]
    return "\n".join(lines) + "\n"


def _input(args):
    path = getattr(args, "input", None) or args.config
    if not path:
        raise FileNotFoundError("no input file given (positional or --config)")
    return path


def _emit(text, path=None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _log(args, msg):
    if args.verbose:
        print(msg, file=sys.stderr)


def cmd_build(args):
    spec = load_spec(_input(args))
    grid = spec_check_grid(spec.profile)
    report = validate_profile(spec.profile, grid)
    report.violations.extend(check_orientation(spec, grid))
    print(_json(report.to_dict()), end="")
    if args.report:
        _emit(_json(report.to_dict()), args.report)
    if not report.passed:
        return EXIT_INPUT
    pm = build_spiral(spec, grid)
    r, theta = default_grid(spec.profile.r_max, args.nr, args.ntheta)
    out = args.out or os.path.splitext(_input(args))[0] + ".polarmap"
    write_polarmap(out, pm, r, theta)
    _log(args, f"wrote {out}")
    return EXIT_PASS


def cmd_classify(args):
    pm, r, theta, _, _ = read_polarmap(_input(args))
    verdict = classify_spiral(pm, r, theta, scheme=args.scheme, tol=args.tol, step=args.step)
    _emit(_json(verdict.to_dict()), args.out)
    return EXIT_PASS if verdict.is_spiral else EXIT_FAIL


def cmd_residuals(args):
    profile_path = args.profile_file or args.profile
    if not profile_path:
        raise FileNotFoundError("residuals needs a profile file")
    pm, r, theta, _, _ = read_polarmap(_input(args))
    profile = load_profile(profile_path)
    scheme = args.scheme or ("analytic" if pm.has_partials else "central")
    res = fgh_residuals(pm, profile, r, theta, scheme=scheme, step=args.step)
    threshold = 1e-6 if args.threshold is None else args.threshold
    passed = res["max"] <= threshold
    _emit(_json({**res, "threshold": threshold, "pass": bool(passed)}), args.out)
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_geometry(args):
    path = _input(args)
    cfg = geometry_config(load_json(path), os.path.dirname(path))
    reports = [rotation_invariance_report(cfg.map_obj, E, cfg.rotations, cfg.n, cfg.tol_rel, cfg.transform_id)
               for E in cfg.shapes]
    passed = all(rep["pass"] for rep in reports)
    if args.format == "csv":
        rows = ["shape,rotation,value,rel_spread,pass"]
        for k, rep in enumerate(reports):
            rows += [f"{k},{p!r},{v!r},{rep['rel_spread']!r},{str(rep['pass']).lower()}"
                     for p, v in zip(rep["rotations"], rep["values"])]
        _emit("\n".join(rows) + "\n", args.out)
    else:
        _emit(_json(reports[0] if len(reports) == 1 else {"pass": passed, "reports": reports}), args.out)
    return EXIT_PASS if passed else EXIT_FAIL


def _dump_masks(cfg, directory):
    os.makedirs(directory, exist_ok=True)
    sample = sample_field(cfg.field, 0, 0)
    for j, u in enumerate(cfg.levels):
        for k, phi in enumerate(cfg.rotations):
            grid = deformed_excursion(sample, cfg.map_obj, cfg.rect, phi, u, cfg.resolution)
            write_pgm(os.path.join(directory, f"mask_u{j}_rot{k}.pgm"), grid.mask)


def cmd_isotropy(args):
    path = _input(args)
    cfg = experiment_config(load_json(path), os.path.dirname(path))
    threshold = 3.0 if args.threshold is None else args.threshold
    _log(args, f"isotropy: {cfg.transform_id}, {cfg.replicates} replicates, {args.workers} workers")
    report = weak_isotropy_test(cfg.field, cfg.map_obj, cfg.rect, cfg.levels, cfg.rotations,
                                cfg.replicates, cfg.resolution, workers=args.workers, threshold=threshold)
    if args.dump_masks:
        _dump_masks(cfg, args.dump_masks)
    summary = {**report.summary(), "transform-id": cfg.transform_id, "replicates": cfg.replicates,
               "field": cfg.field.to_dict(), "rect": cfg.rect.to_dict()}
    table = _json(report.rows) if args.format == "json" else report.to_csv()
    if args.out:
        _emit(table, args.out)
        print(_json(summary), end="")
    else:
        _emit(table)
    if args.report:
        _emit(_json(summary), args.report)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_euler(args):
    mask = read_pgm(_input(args))
    print(int(euler_characteristic(mask)))
    return EXIT_PASS


HANDLERS = {"build": cmd_build, "classify": cmd_classify, "residuals": cmd_residuals,
            "geometry": cmd_geometry, "isotropy": cmd_isotropy, "euler": cmd_euler}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    if args.command == "man":
        sys.stdout.write(manpage())
        return EXIT_PASS
    try:
        return HANDLERS[args.command](args)
    except ValidationError as exc:
        print(_json(exc.report.to_dict()), end="")
        print(f"isodeform: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IsodeformError, OSError, ValueError) as exc:
        print(f"isodeform: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
