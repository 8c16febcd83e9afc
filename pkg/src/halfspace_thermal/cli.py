"""Command-line front end.

Subcommands
    eval       temperature at points and times
    slice      temperature along a line x = const
    grid       temperature on an (x, y) grid
    identity   residuals of the beta-integral identity of the kernel
    validate   compare against the finite-difference solver

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 validation failure.  Set HALFSPACE_THERMAL_LOG to a logging level name
(DEBUG, INFO, ...) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .fd import FdDivergenceError, FdGrid, solve
from .field import QuadratureConfig, evaluate_grid, evaluate_points
from .kernel import HALF_PI, QuadratureFailure, identity_integral
from .model import ConfigError, ProblemSpec
from .time_kernels import InversionError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

CSV_COLUMNS = ("x", "y", "t", "temperature", "error_estimate")

DEFAULT_VALIDATION = {"t": 0.02, "x": [0.05, 0.2], "y_samples": 41, "h": 0.01, "dt": 1e-4, "tol": 0.02}

log = logging.getLogger("halfspace_thermal")


class NumericalFailure(RuntimeError):
    """Raised after output is written when some values could not be computed."""


def fmt(value) -> str:
    """12 significant digits in scientific notation; 'nan' / 'inf' otherwise."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.11e}"


def _json_number(value):
    value = float(value)
    return float(fmt(value)) if math.isfinite(value) else None


# ---------------------------------------------------------------- parsing


def parse_values(text: str, name: str) -> np.ndarray:
    """``a:b:n`` (n evenly spaced values, n >= 1) or a comma-separated list."""
    text = text.strip()
    parts = text.split(":")
    try:
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        elif len(parts) == 1:
            values = np.array([float(v) for v in text.split(",") if v.strip()])
        else:
            raise ValueError
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {text!r}; use a:b:n or a comma list", key=name) from None
    if len(parts) == 3:
        if n < 1:
            raise ConfigError(f"{name}: range {text!r} is empty", key=name)
        if n > 1 and hi < lo:
            raise ConfigError(f"{name}: range {text!r} is empty (end before start)", key=name)
        values = np.linspace(lo, hi, n)
    if values.size == 0:
        raise ConfigError(f"{name}: no values given", key=name)
    if not np.all(np.isfinite(values)):
        raise ConfigError(f"{name}: values must be finite", key=name)
    return values


def bundled_scenarios() -> list[str]:
    folder = resources.files("halfspace_thermal") / "scenarios"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def read_config(ref: str | None) -> dict:
    """Load a problem JSON from a path or a bundled scenario name."""
    if ref is None:
        ref = "step_insulator"
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    else:
        bundled = resources.files("halfspace_thermal") / "scenarios" / f"{ref}.json"
        if not bundled.is_file():
            raise ConfigError(
                f"config {ref!r} is neither a file nor a bundled scenario ({', '.join(bundled_scenarios())})",
                key="config",
            )
        text = bundled.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{ref}: invalid JSON ({exc})", key="config") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{ref}: top level must be a JSON object", key="config")
    return data


def quadrature_config(args) -> QuadratureConfig:
    rel = args.rel_tol
    if rel is None:
        return QuadratureConfig()
    if not (1e-14 <= rel <= 1e-2):
        raise ConfigError("--rel-tol must lie in [1e-14, 1e-2]", key="rel_tol")
    return QuadratureConfig(rel_tol=rel, abs_tol=min(1e-10, rel * 1e-2))


def _workers(args) -> int:
    if args.parallel < 1:
        raise ConfigError("--parallel must be >= 1", key="parallel")
    return args.parallel


# ---------------------------------------------------------------- output


def _rows_to_csv(rows, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _rows_to_json(rows, columns=CSV_COLUMNS) -> str:
    records = [{c: _json_number(v) for c, v in zip(columns, row)} for row in rows]
    return json.dumps(records, indent=1) + "\n"


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        log.info("wrote %s", out)


def _point_rows(xs, ys, times, spec, cfg, workers):
    rows = []
    failed = 0
    for t in times:
        results = evaluate_points(xs, ys, float(t), spec, cfg, workers)
        for x, y, res in zip(xs, ys, results):
            rows.append((x, y, t, res.value, res.error_estimate))
            failed += not math.isfinite(res.value)
    return rows, failed


def _write_rows(args, rows, failed, columns=CSV_COLUMNS):
    text = _rows_to_csv(rows, columns) if args.format == "csv" else _rows_to_json(rows, columns)
    emit(text, args.out)
    if failed:
        raise NumericalFailure(f"{failed} value(s) did not converge and are reported as nan")


# ---------------------------------------------------------------- commands


def cmd_eval(args, data, spec):
    series = data.get("series", {})
    if series:
        try:
            np.asarray(series["points"], dtype=float).reshape(-1, 2)
            float(series["t_range"][0]), float(series["t_range"][1]), int(series["samples"])
        except (TypeError, ValueError, KeyError, IndexError):
            raise ConfigError("series needs points [[x, y], ...], t_range [t0, t1] and samples", key="series") from None
    if args.x is None and args.y is None and series:
        pts = np.asarray(series["points"], dtype=float).reshape(-1, 2)
        xs, ys = pts[:, 0], pts[:, 1]
    else:
        if args.x is None or args.y is None:
            raise ConfigError("eval needs --x and --y", key="x" if args.x is None else "y")
        xs, ys = parse_values(args.x, "x"), parse_values(args.y, "y")
    if args.t is not None:
        times = parse_values(args.t, "t")
    elif series:
        lo, hi = series["t_range"]
        times = np.linspace(lo, hi, int(series["samples"]))
    else:
        raise ConfigError("eval needs --t", key="t")
    if xs.size != ys.size:
        if xs.size == 1:
            xs = np.full(ys.size, xs[0])
        elif ys.size == 1:
            ys = np.full(xs.size, ys[0])
        else:
            raise ConfigError("--x and --y must have equal lengths or length 1", key="x")
    if np.any(xs < 0):
        raise ConfigError("x must be >= 0", key="x")
    rows, failed = _point_rows(xs, ys, times, spec, quadrature_config(args), _workers(args))
    _write_rows(args, rows, failed)


def cmd_slice(args, data, spec):
    x = float(args.x)
    if not (math.isfinite(x) and x >= 0):
        raise ConfigError("--x must be a finite number >= 0", key="x")
    ys = parse_values(args.y, "y")
    t = float(args.t)
    rows, failed = _point_rows(np.full(ys.size, x), ys, [t], spec, quadrature_config(args), _workers(args))
    _write_rows(args, rows, failed)


def cmd_grid(args, data, spec):
    xs = parse_values(args.x, "x")
    ys = parse_values(args.y, "y")
    if xs.size < 2 or ys.size < 2:
        raise ConfigError("grid needs at least 2 values per axis", key="x" if xs.size < 2 else "y")
    if xs[0] < 0:
        raise ConfigError("x must be >= 0", key="x")
    t = float(args.t)
    grid = evaluate_grid((xs[0], xs[-1]), (ys[0], ys[-1]), xs.size, ys.size, t, spec,
                         quadrature_config(args), _workers(args))
    if args.format == "json":
        doc = {
            "t": _json_number(t),
            "axes": {"rows": "y", "columns": "x"},
            "x": [_json_number(v) for v in grid.x],
            "y": [_json_number(v) for v in grid.y],
            "temperature": [[_json_number(v) for v in row] for row in grid.values],
            "error_estimate": [[_json_number(v) for v in row] for row in grid.errors],
        }
        emit(json.dumps(doc, indent=1) + "\n", args.out)
    else:
        rows = [(grid.x[i], grid.y[j], t, grid.values[j, i], grid.errors[j, i])
                for j in range(grid.y.size) for i in range(grid.x.size)]
        emit(_rows_to_csv(rows), args.out)
    n_bad = int(np.count_nonzero(grid.flagged))
    if n_bad:
        raise NumericalFailure(f"{n_bad} grid cell(s) did not converge and are reported as nan")


def cmd_identity(args, data, spec):
    if args.theta is None:
        mags = np.geomspace(1e-3, HALF_PI, 25)
        thetas = np.concatenate([-mags[::-1], mags])
    else:
        thetas = parse_values(args.theta, "theta")
    if np.any(np.abs(thetas) < 1e-3) or np.any(np.abs(thetas) > HALF_PI):
        raise ConfigError("every theta must satisfy 1e-3 <= |theta| <= pi/2", key="theta")
    rows = []
    failed = 0
    for th in thetas:
        expected = 1.0 if th < 0 else 0.0
        try:
            value = identity_integral(float(th))
        except QuadratureFailure as exc:
            log.warning("%s", exc)
            value = math.nan
            failed += 1
        rows.append((th, value, expected, abs(value - expected)))
    _write_rows(args, rows, failed, columns=("theta", "value", "expected", "residual"))


def cmd_validate(args, data, spec):
    block = dict(DEFAULT_VALIDATION)
    block.update(data.get("validation", {}))
    for key, override in (("h", args.h), ("dt", args.dt), ("tol", args.tol)):
        if override is not None:
            block[key] = override
    try:
        t = float(block["t"])
        xs = [float(v) for v in block["x"]]
        n_y = int(block["y_samples"])
        tol = float(block["tol"])
        grid = FdGrid(h=float(block["h"]), dt=float(block["dt"]))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"validation: {exc}", key="validation") from None
    if n_y < 2 or t <= 0 or tol <= 0:
        raise ConfigError("validation needs y_samples >= 2, t > 0 and tol > 0", key="validation")
    ys = np.linspace(-0.5 * grid.width, 0.5 * grid.width, n_y)
    cfg = quadrature_config(args)

    log.info("FD solve h=%g dt=%g to t=%g", grid.h, grid.dt, t)
    fd = solve(spec, grid, t_end=t)
    rows = []
    lines = []
    worst = 0.0
    failed = 0
    for x in xs:
        results = evaluate_points(np.full(n_y, x), ys, t, spec, cfg, _workers(args))
        semi = np.array([r.value for r in results])
        failed += int(np.count_nonzero(~np.isfinite(semi)))
        fd_vals = fd.sample(np.full(n_y, x), ys, t)
        diff = np.abs(semi - fd_vals)
        worst = max(worst, float(np.nanmax(diff)))
        lines.append(f"x={x:g}: max diff {np.nanmax(diff):.3e}, mean diff {np.nanmean(diff):.3e}")
        rows.extend(zip(np.full(n_y, x), ys, np.full(n_y, t), semi, fd_vals, diff))
    passed = failed == 0 and worst <= tol
    lines.append(f"far-boundary deviation of FD field {fd.far_boundary_deviation(t):.3e}")
    lines.append(f"{'PASS' if passed else 'FAIL'}: max |semi-analytical - FD| = {worst:.3e} "
                 f"(tol {tol:g}, h={grid.h:g}, dt={grid.dt:g})")
    sys.stderr.write("\n".join(lines) + "\n")
    if args.out is not None or args.format == "json":
        cols = ("x", "y", "t", "semi_analytical", "fd", "abs_diff")
        emit(_rows_to_csv(rows, cols) if args.format == "csv" else _rows_to_json(rows, cols), args.out)
    if failed:
        raise NumericalFailure(f"{failed} semi-analytical value(s) did not converge")
    return EXIT_OK if passed else EXIT_VALIDATION


COMMANDS = {
    "eval": cmd_eval,
    "slice": cmd_slice,
    "grid": cmd_grid,
    "identity": cmd_identity,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="problem JSON file or bundled scenario name (default step_insulator)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--rel-tol", type=float, dest="rel_tol", help="quadrature relative tolerance")
    common.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes (default 1)")

    parser = argparse.ArgumentParser(prog="halfspace-thermal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="temperature at points")
    p.add_argument("--x", help="x values (list or a:b:n)")
    p.add_argument("--y", help="y values (list or a:b:n)")
    p.add_argument("--t", help="times (list or a:b:n)")

    p = sub.add_parser("slice", parents=[common], help="temperature along x = const")
    p.add_argument("--x", required=True, type=float)
    p.add_argument("--t", required=True, type=float)
    p.add_argument("--y", default="-1:1:41", help="y range a:b:n (default -1:1:41)")

    p = sub.add_parser("grid", parents=[common], help="temperature on an (x, y) grid")
    p.add_argument("--t", required=True, type=float)
    p.add_argument("--x", default="0.01:1:50", help="x range a:b:n (default 0.01:1:50)")
    p.add_argument("--y", default="-1:1:81", help="y range a:b:n (default -1:1:81)")

    p = sub.add_parser("identity", parents=[common], help="kernel identity residuals")
    p.add_argument("--theta", help="angles (list or a:b:n); default 50 values with 1e-3 <= |theta| <= pi/2")

    p = sub.add_parser("validate", parents=[common], help="compare with the finite-difference solver")
    p.add_argument("--h", type=float, help="FD grid spacing override")
    p.add_argument("--dt", type=float, help="FD time step override")
    p.add_argument("--tol", type=float, help="max allowed difference override")
    return parser


def _setup_logging():
    level_name = os.environ.get("HALFSPACE_THERMAL_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


_RANGE_FLAGS = {"--x", "--y", "--t", "--theta"}
_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv):
    # "--y -1:1:41" would otherwise be read as an unknown option
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_FLAGS and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        data = read_config(args.config)
        spec = ProblemSpec.from_dict(data)
        status = COMMANDS[args.command](args, data, spec)
    except ConfigError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        sys.stderr.write(f"configuration error{key}: {exc}\n")
        return EXIT_CONFIG
    except ValueError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except (QuadratureFailure, InversionError, FdDivergenceError, NumericalFailure) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    return EXIT_OK if status is None else status


if __name__ == "__main__":
    sys.exit(main())
