"""Command-line front end: ``helix constants|curve|verify|surface``.

Exit status: 0 when every check passes, 1 when a numerical check fails, 2 for
invalid parameters or usage errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from berger_helix.ambient import BergerParams
from berger_helix.errors import ConfigurationError, HelixError, UsageError
from berger_helix.export import WRITERS, Pole, build_mesh
from berger_helix.helix import PERTURBABLE, constants
from berger_helix.isometry import NAMED_CURVES, commuting_branch
from berger_helix.presets import FAMILIES, PRESETS, RunConfig, preset_config
from berger_helix.verify.curve import curve_metrics
from berger_helix.verify.normal import normal_data
from berger_helix.verify.report import Tolerances, full_report

OUTPUT_DIR_ENV = "HELIX_OUTPUT_DIR"

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


def parse_lambda(text: str) -> int:
    table = {"+1": 1, "1": 1, "timelike": 1, "-1": -1, "spacelike": -1}
    try:
        return table[text.strip().lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"lambda must be +1, -1, spacelike or timelike, got {text!r}") from None


def parse_range(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like a:b, got {text!r}") from None
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise argparse.ArgumentTypeError(f"range needs finite a < b, got {text!r}")
    return a, b


def parse_grid(text: str) -> tuple[int, int]:
    try:
        n, m = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like NxM, got {text!r}") from None
    if n < 0 or m < 0:
        raise argparse.ArgumentTypeError("grid sizes must be non-negative")
    return n, m


def parse_perturb(text: str) -> tuple[str, float]:
    name, sep, rel = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"perturbation must look like NAME=REL, got {text!r}")
    if name not in PERTURBABLE:
        raise argparse.ArgumentTypeError(f"cannot perturb {name!r}; choose from {', '.join(PERTURBABLE)}")
    try:
        return name, float(rel)
    except ValueError:
        raise argparse.ArgumentTypeError(f"relative size must be a number, got {rel!r}") from None


def parse_pole(text: str) -> Pole:
    try:
        return Pole.parse(text)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _params_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("surface parameters")
    g.add_argument("-e", "--epsilon", type=float, help="metric deformation eps > 0")
    g.add_argument("-n", "--nu", type=float, help="constant angle function nu")
    g.add_argument("-l", "--lambda", dest="lam", type=parse_lambda, help="+1|-1|spacelike|timelike")
    g.add_argument("--preset", choices=sorted(PRESETS), help="figure preset")
    g.add_argument("--family", choices=FAMILIES, help="isometry family (default example1)")
    g.add_argument("--xi2", choices=sorted(NAMED_CURVES), help="named curve for xi2 in example1 (default v)")
    return p


def _grid_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("sampling and checks")
    r = g.add_mutually_exclusive_group()
    r.add_argument("--u-range", type=parse_range, help="range of the canonical coordinate u, as a:b")
    r.add_argument("--s-range", type=parse_range, help="arc-length range, converted to u = s/sqrt(a~)")
    g.add_argument("--v-range", type=parse_range, help="range of v, as a:b")
    g.add_argument("--grid", type=parse_grid, default=(64, 64), help="samples NxM (default 64x64)")
    g.add_argument("--random-points", type=int, default=0, help="extra seeded random samples")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--tol", type=float, help="tolerance of the algebraic identities (default 1e-8)")
    g.add_argument("--report", help="write the verification report to this path")
    n = p.add_argument_group("negative controls")
    n.add_argument("--perturb", type=parse_perturb, metavar="NAME=REL", help="scale one constant by 1+REL")
    n.add_argument("--branch", choices=("commuting", "anticommuting"), help="sign choice of the isometry family")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helix", description="Helix surfaces in the Lorentzian Berger sphere.")
    sub = parser.add_subparsers(dest="command", required=True)
    params, grid = _params_parser(), _grid_parser()
    sub.add_parser("constants", parents=[params], help="print the derived constants")
    sub.add_parser("curve", parents=[params], help="print metric invariants of the generating curve")
    sub.add_parser("verify", parents=[params, grid], help="run every check and print the report")
    s = sub.add_parser("surface", parents=[params, grid], help="export a projected mesh and verify it")
    s.add_argument("--pole", type=parse_pole, default=Pole(), help="projection pole such as 4- (default) or 1+")
    s.add_argument("--format", default="obj", help="comma-separated subset of obj,ply,csv (default obj)")
    s.add_argument("--out", help="output path; the extension is replaced per format")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    extra = {}
    if getattr(args, "u_range", None) is not None:
        extra["u_range"] = args.u_range
    if getattr(args, "s_range", None) is not None:
        extra["s_range"] = args.s_range
    if getattr(args, "v_range", None) is not None:
        extra["v_range"] = args.v_range
    if hasattr(args, "grid"):
        extra["resolution"] = args.grid
        extra["random_points"] = args.random_points
        extra["seed"] = args.seed
        if args.tol is not None:
            if not args.tol > 0:
                raise ConfigurationError(f"--tol must be positive, got {args.tol!r}")
            extra["tolerances"] = Tolerances(algebraic=args.tol)
        if args.perturb is not None:
            extra["perturb"] = args.perturb
        if args.branch is not None:
            extra["branch"] = commuting_branch() * (1 if args.branch == "commuting" else -1)
    if hasattr(args, "pole"):
        extra["pole"] = args.pole

    if args.preset:
        p = PRESETS[args.preset]
        conflicts = []
        if args.epsilon is not None and args.epsilon != p.epsilon:
            conflicts.append(f"--epsilon {args.epsilon!r} (preset has {p.epsilon!r})")
        if args.nu is not None and args.nu != p.nu:
            conflicts.append(f"--nu {args.nu!r} (preset has {p.nu!r})")
        if args.lam is not None and args.lam != p.lam and not p.both_lambdas:
            conflicts.append(f"--lambda {args.lam:+d} (preset has {p.lam:+d})")
        if args.family is not None and args.family != p.family:
            conflicts.append(f"--family {args.family} (preset has {p.family})")
        if args.xi2 is not None and (p.family != "example1" or args.xi2 != p.xi2):
            conflicts.append(f"--xi2 {args.xi2} (preset has {p.xi2 if p.family == 'example1' else 'none'})")
        if conflicts:
            raise UsageError(f"--preset {args.preset} conflicts with: " + "; ".join(conflicts))
        return preset_config(args.preset, args.lam, **extra)

    missing = [flag for flag, val in (("-e", args.epsilon), ("-n", args.nu), ("-l", args.lam)) if val is None]
    if missing:
        raise UsageError(f"without --preset the options {', '.join(missing)} are required")
    params = BergerParams(args.epsilon, args.lam, args.nu)
    return RunConfig(params=params, family=args.family or "example1", xi2=args.xi2 or "v", **extra)


def _fmt(x: float) -> str:
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, abs(x)):
        return str(int(r))
    return f"{x:.10f}"


def cmd_constants(config: RunConfig, args, out) -> int:
    c = constants(config.params)
    rows = [
        ("B", c.B),
        ("a_tilde", c.a_tilde),
        ("b_tilde", c.b_tilde),
        ("alpha1", c.alpha1),
        ("alpha2", c.alpha2),
        ("g11", c.g11),
        ("g33", c.g33),
        ("d", c.d),
        ("D", c.D),
        ("E", c.E),
        ("I", c.I),
    ]
    for name, val in rows:
        out.write(f"{name}={_fmt(val)}\n")
    return EXIT_OK


def cmd_curve(config: RunConfig, args, out) -> int:
    p = config.params
    m = curve_metrics(constants(p), p)
    out.write(f"speed_eps={_fmt(m.speed_eps)}\n")
    out.write(f"helix_angle={_fmt(m.helix_angle)}\n")
    out.write(f"kappa_g={_fmt(m.kappa_g)}\n")
    out.write(f"|tau_g|={_fmt(abs(m.tau_g))}\n")
    out.write(f"causal={'timelike' if m.causal < 0 else 'spacelike'}\n")
    tol = Tolerances()
    res = m.residuals
    ok = (
        max(res["speed_eps"], res["helix_angle"], res["kappa_closed_forms"]) <= tol.curve_closed
        and max(res["kappa_frenet"], res["tau_frenet"]) <= tol.frenet
    )
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write {path}: {exc.strerror or exc}") from None


def _output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV) or ".")


def cmd_verify(config: RunConfig, args, out) -> int:
    report = full_report(config.spec(), config.grid(), config.tolerances)
    text = report.to_text()
    if args.report:
        _write_text(Path(args.report), text)
        out.write(text.splitlines()[-1] + "\n")
    else:
        out.write(text)
    for r in report.failures():
        sys.stderr.write(f"FAIL {r.name}: residual {r.residual:.3e} > tolerance {r.tolerance:.1e}\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_surface(config: RunConfig, args, out) -> int:
    formats = [f.strip().lower() for f in args.format.split(",") if f.strip()]
    bad = [f for f in formats if f not in WRITERS]
    if bad or not formats:
        raise ConfigurationError(f"unknown format(s) {bad or formats}; choose from obj, ply, csv")
    n, m = config.resolution
    if n < 2 or m < 2:
        raise ConfigurationError(f"mesh export needs a grid of at least 2x2, got {n}x{m}")
    spec = config.spec()
    grid = config.grid()
    u_axis = np.linspace(*grid.u_range, n)
    v_axis = np.linspace(*grid.v_range, m)
    uu, vv = np.meshgrid(u_axis, v_axis, indexing="ij")
    jet = spec(uu, vv)
    nu = normal_data(jet, spec.params).nu
    mesh = build_mesh(u_axis, v_axis, jet.F, nu, config.pole)

    label = spec.label or spec.family.name
    base = Path(args.out) if args.out else _output_dir() / label
    comment = f"helix surface {label} eps={spec.params.epsilon!r} lambda={spec.params.lam:+d} nu={spec.params.nu!r} pole={config.pole}"
    for fmt in formats:
        path = base.with_suffix("." + fmt)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                WRITERS[fmt](mesh, fh, comment)
        except OSError as exc:
            raise ConfigurationError(f"cannot write {path}: {exc.strerror or exc}") from None
        out.write(f"wrote {path}\n")
    out.write(f"vertices={len(mesh.vertices)} faces={len(mesh.faces)} dropped={mesh.dropped}\n")

    report = full_report(spec, grid, config.tolerances)
    report.meta["dropped_vertices"] = str(mesh.dropped)
    report_path = Path(args.report) if args.report else base.with_suffix(".report.txt")
    _write_text(report_path, report.to_text())
    out.write(f"wrote {report_path}\n")
    out.write(report.to_text().splitlines()[-1] + "\n")
    for r in report.failures():
        sys.stderr.write(f"FAIL {r.name}: residual {r.residual:.3e} > tolerance {r.tolerance:.1e}\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


COMMANDS = {"constants": cmd_constants, "curve": cmd_curve, "verify": cmd_verify, "surface": cmd_surface}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _resolve_config(args)
        return COMMANDS[args.command](config, args, out)
    except HelixError as exc:
        sys.stderr.write(f"helix: error: {exc}\n")
        return EXIT_CONFIG


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
