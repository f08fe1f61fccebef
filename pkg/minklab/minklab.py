#!/usr/bin/env python3

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from datetime import datetime
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import Config, DEFAULT_TOLERANCES, default_config_path
from .errors import ConfigError, GeometryError, SpecError
from .hypersurfaces import load_surface
from .norms import NormSpec, load_spec
from .sampling import plan_from_config
from .tensors import eq23_residual, point_geometry
from .verify import (
    PASS,
    TheoremReport,
    axioms_suite,
    brickell_suite,
    deicke_suite,
    flatness_scan,
    identity_suite,
    parallel_vector_suite,
    run_battery,
    theorem1_suite,
    theorem3_suite,
)

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad command-line input detected after argparse accepted it"""


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--norm", metavar="PATH", help="norm-spec JSON file")
    common.add_argument("--surface", metavar="PATH", help="surface-spec JSON file")
    common.add_argument("--seed", type=int, help="sample plan seed")
    common.add_argument("--count", type=int, help="number of sample points")
    common.add_argument("--rmin", type=float, help="smallest sample radius")
    common.add_argument("--rmax", type=float, help="largest sample radius")
    common.add_argument("--witness", action="append", default=[], metavar="Y",
                        help="extra sample point appended to the plan (repeatable)")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override a named tolerance (repeatable)")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json", dest="fmt")
    common.add_argument("--no-timestamp", action="store_true", help="omit generated_at from reports")
    common.add_argument("--config", metavar="PATH", help=f"configuration file (default {default_config_path()})")
    common.add_argument("--verbose", action="store_true", help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="mlab", description="Minkowski norm geometry toolkit")
    parser.add_argument("--version", action="version", version=f"mlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    sub.add_parser("axioms", parents=[common], help="positivity, homogeneity and strong convexity")
    tensors = sub.add_parser("tensors", parents=[common], help="print the tensors at one point")
    tensors.add_argument("--at", required=True, metavar="Y", help="comma-separated point")
    sub.add_parser("identities", parents=[common], help="pointwise tensor identities")
    sub.add_parser("flatness", parents=[common], help="curvature scan by both routes")
    theorem3 = sub.add_parser("theorem3", parents=[common], help="flatness vs curvature of the level sets")
    theorem3.add_argument("--r", metavar="R", help="comma-separated level-set radii")
    sub.add_parser("deicke", parents=[common], help="mean Cartan torsion vs constant metric")
    sub.add_parser("brickell", parents=[common], help="flat and symmetric vs inner product")
    parallel = sub.add_parser("parallel", parents=[common], help="parallel constant vector field")
    parallel.add_argument("--b", required=True, metavar="B", help="comma-separated vector")
    sub.add_parser("theorem1", parents=[common], help="umbilical hypersurface chain on --surface")
    battery = sub.add_parser("all", parents=[common], help="every applicable suite")
    battery.add_argument("--b", metavar="B", help="vector for the parallel suite (default e1)")
    battery.add_argument("--r", metavar="R", help="comma-separated level-set radii")
    config = sub.add_parser("config", parents=[common], help="print or save the effective configuration")
    config.add_argument("--write", metavar="PATH", help="save the effective configuration to PATH")
    return parser


def parse_vector(text: str, dim: Optional[int], flag: str) -> np.ndarray:
    """Comma-separated decimals, validated against the dimension"""
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if dim is not None and len(values) != dim:
        raise UsageError(f"{flag}: expected {dim} components, got {len(values)}")
    return np.array(values)


def parse_tolerances(items: Sequence[str]) -> Dict[str, float]:
    overrides = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol: expected NAME=VALUE, got {item!r}")
        name = name.strip()
        if name not in DEFAULT_TOLERANCES:
            raise UsageError(f"--tol: unknown tolerance {name!r}")
        try:
            overrides[name] = float(value)
        except ValueError:
            raise UsageError(f"--tol: {name} must be a number") from None
    return overrides


def load_config(args) -> Config:
    """Config file merged with command-line overrides"""
    if args.config and not os.path.exists(args.config):
        raise ConfigError(f"config file not found: {args.config}")
    config = Config(args.config or str(default_config_path()))
    for key in ("seed", "count", "rmin", "rmax"):
        value = getattr(args, key)
        if value is not None:
            config.set(key, value)
    for name, value in parse_tolerances(args.tol).items():
        config.set_tolerance(name, value)
    return config


def _json_value(value, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) == 0:
            return "[]"
        items = [f"{pad}{_json_value(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return format(value, ".17g") if math.isfinite(value) else "null"
    if value is None:
        return "null"
    return json.dumps(str(value))


def to_json(payload) -> str:
    """JSON with every float written to 17 significant digits"""
    return _json_value(payload, 0) + "\n"


def to_csv(reports: List[TheoremReport], dim: int) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["sample_index"] + [f"y{i + 1}" for i in range(dim)] + ["name", "value"])
    prefix = len(reports) > 1
    for report in reports:
        for row in report.samples:
            name = f"{report.suite}.{row['name']}" if prefix else row["name"]
            writer.writerow([row["sample_index"]] + [format(v, ".17g") for v in row["point"]]
                            + [name, format(row["value"], ".17g")])
    return buffer.getvalue()


def to_text(reports: List[TheoremReport]) -> str:
    icons = {"pass": "✅", "fail": "❌", "measured-only": "📏"}
    lines = []
    for report in reports:
        lines.append(f"📋 {report.suite} ({report.spec['family']}, n={report.spec['dim']}): {report.overall.upper()}")
        for check in report.checks:
            tol = "" if check.tolerance is None else f" (tol {check.tolerance:.3g})"
            lines.append(f"   {icons[check.verdict]} {check.name}: {check.residual:.6g}{tol}")
        for note in report.notes:
            lines.append(f"   ℹ️  {note}")
        if report.failures:
            lines.append(f"   ⚠️  {len(report.failures)} sample(s) could not be evaluated")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
        print(f"💾 Report written to {out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _payload(reports: List[TheoremReport], battery: bool, timestamp: bool) -> Dict:
    if battery:
        payload = {
            "reports": [r.to_dict() for r in reports],
            "overall": PASS if all(r.passed for r in reports) else "fail",
        }
    else:
        payload = reports[0].to_dict()
    if timestamp:
        payload["generated_at"] = datetime.now().isoformat(timespec="seconds")
    return payload


def _require_norm(args) -> NormSpec:
    if not args.norm:
        raise UsageError("--norm is required")
    return load_spec(args.norm)


def _radii(args, config: Config) -> List[float]:
    if getattr(args, "r", None):
        radii = [float(r) for r in parse_vector(args.r, None, "--r")]
        if any(not r > 0 for r in radii):
            raise UsageError("--r: radii must be positive")
        return radii
    return [float(r) for r in config.get("theorem3_radii")]


def _run_tensors(args, spec: NormSpec, config: Config) -> int:
    y = parse_vector(args.at, spec.dim, "--at")
    geom = point_geometry(spec, y, order=4)
    residual = eq23_residual(geom)
    tol = config.tolerance("tol_identity")
    data = {
        "point": y,
        "F": geom.F,
        "g": geom.g,
        "C": geom.cartan.C_low,
        "A": geom.cartan.A_mean,
        "gamma": geom.gamma,
        "R": geom.curvature_cartan().R,
        "christoffel_cartan_residual": residual,
    }
    if args.fmt == "json":
        _emit(to_json(data), args.out)
    else:
        with np.printoptions(precision=10, suppress=False):
            lines = [f"📍 y = {y}", f"F(y) = {geom.F:.17g}"]
            for key in ("g", "C", "A", "gamma", "R"):
                lines.append(f"{key} =\n{data[key]}")
            lines.append(f"Christoffel-Cartan residual: {residual:.3e}")
        _emit("\n".join(lines) + "\n", args.out)
    ok = residual < tol
    print(f"{'✅' if ok else '❌'} Christoffel-Cartan residual {residual:.3e} (tol {tol:g})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAILED


def _run_suites(args, spec: NormSpec, config: Config) -> int:
    witnesses = [parse_vector(text, spec.dim, "--witness") for text in args.witness]
    plan = plan_from_config(config, extra_points=witnesses)
    surface = load_surface(args.surface, spec) if args.surface else None
    command = args.command
    if command == "axioms":
        reports = [axioms_suite(spec, plan, config)]
    elif command == "identities":
        reports = [identity_suite(spec, plan, config)]
    elif command == "flatness":
        reports = [flatness_scan(spec, plan, config)]
    elif command == "theorem3":
        reports = [theorem3_suite(spec, _radii(args, config), plan, config)]
    elif command == "deicke":
        reports = [deicke_suite(spec, plan, config)]
    elif command == "brickell":
        reports = [brickell_suite(spec, plan, config)]
    elif command == "parallel":
        reports = [parallel_vector_suite(spec, parse_vector(args.b, spec.dim, "--b"), plan, config)]
    elif command == "theorem1":
        if surface is None:
            raise UsageError("--surface is required for theorem1")
        reports = [theorem1_suite(spec, surface, plan, config)]
    else:
        b = parse_vector(args.b, spec.dim, "--b") if args.b else None
        reports = run_battery(spec, plan, surface, config, b=b, r_list=_radii(args, config))

    if args.fmt == "json":
        text = to_json(_payload(reports, command == "all", not args.no_timestamp))
    elif args.fmt == "csv":
        text = to_csv(reports, spec.dim)
    else:
        text = to_text(reports)
    _emit(text, args.out)

    passed = all(r.passed for r in reports)
    for report in reports:
        icon = "✅" if report.passed else "❌"
        print(f"{icon} {report.suite}: {report.overall}", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAILED


def _run_config(args, config: Config) -> int:
    if args.write:
        path = config.save(args.write)
        print(f"💾 Configuration saved to {path}", file=sys.stderr)
    else:
        sys.stdout.write(to_json(config.config))
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one mlab command and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, format="%(levelname)s %(name)s: %(message)s")

    try:
        config = load_config(args)
        if args.command == "config":
            return _run_config(args, config)
        spec = _require_norm(args)
        if args.command == "tensors":
            return _run_tensors(args, spec, config)
        return _run_suites(args, spec, config)
    except UsageError as e:
        print(f"❌ Usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SpecError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, ValueError) as e:
        print(f"❌ Cannot run {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    """Main entry point for the mlab command."""
    sys.exit(run())


if __name__ == "__main__":
    main()
