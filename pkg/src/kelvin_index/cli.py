"""Command-line front end.

    kelvin-index kernel --x 0.5,1 --tau 0:5:11 --method all
    kelvin-index transform forward-f --fixture test-function --grid 0:10:41
    kelvin-index transform inverse-g --input Gg.csv --grid 0.25:2:8
    kelvin-index bvp residual --beta 1.5707963 --points 1:0.785
    kelvin-index verify all

Numbers are written with 17 significant digits; tables go to stdout (or
--out), diagnostics to stderr.  Exit codes: 0 success, 1 verification
failure, 2 invalid input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import __version__, bvp, kernel, transforms, verify
from .errors import ConvergenceError, InvalidInputError
from .quadrature import ContourSpec, Tolerance

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NONCONVERGENT = 0, 1, 2, 3

# Defaults for every option that may also come from the JSON config.
DEFAULTS: dict[str, Any] = {
    "x": "0.1,0.5,1,2,10",
    "tau": "0,0.5,1,2,5",
    "method": "all",
    "abscissa": 0.5,
    "abs_tol": None,
    "rel_tol": None,
    "grid": None,
    "fixture": None,
    "rates": "1,2,3",
    "input": None,
    "variant": None,
    "scaling": "quartic",
    "beta": math.pi / 2,
    "r_grid": "0.5,1,2",
    "theta_grid": None,
    "points": None,
    "h_r": None,
    "h_theta": None,
    "seed": 0,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# parsing helpers

def parse_grid(text: str, name: str = "grid") -> np.ndarray:
    """Comma list, or ``start:stop:count`` (linear) or ``log:start:stop:count`` (geometric)."""
    text = str(text).strip()
    try:
        if text.startswith("log:"):
            a, b, n = text[4:].split(":")
            grid = np.geomspace(float(a), float(b), int(n))
        elif ":" in text:
            a, b, n = text.split(":")
            grid = np.linspace(float(a), float(b), int(n))
        else:
            grid = np.array([float(v) for v in text.split(",") if v.strip()], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse {name} {text!r}: {exc}") from None
    if grid.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(grid)):
        raise InvalidInputError(f"{name} has non-finite entries")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError(f"{name} must be strictly increasing")
    return grid


def read_samples(path: str) -> transforms.SampledFunction:
    """Samples from a UTF-8 CSV with header ``grid,value`` and strictly increasing grid."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InvalidInputError(f"{path} is not UTF-8") from None
    if not rows or [c.strip() for c in rows[0]] != ["grid", "value"]:
        raise InvalidInputError(f"{path}: row 1: header must be 'grid,value'")
    grid, values = [], []
    for number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise InvalidInputError(f"{path}: row {number}: expected 2 fields, got {len(row)}")
        try:
            g, v = float(row[0]), float(row[1])
        except ValueError:
            raise InvalidInputError(f"{path}: row {number}: non-numeric field") from None
        if not (math.isfinite(g) and math.isfinite(v)):
            raise InvalidInputError(f"{path}: row {number}: non-finite value")
        if grid and g <= grid[-1]:
            raise InvalidInputError(f"{path}: row {number}: grid not strictly increasing")
        grid.append(g)
        values.append(v)
    if len(grid) < 2:
        raise InvalidInputError(f"{path}: need at least two data rows")
    return transforms.SampledFunction(np.array(grid), np.array(values))


def worker_count() -> int:
    raw = os.environ.get("KELVIN_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError:
        raise InvalidInputError(f"KELVIN_THREADS must be an integer, got {raw!r}") from None
    if count < 1:
        raise InvalidInputError("KELVIN_THREADS must be at least 1")
    return count


def ordered_map(fn: Callable, items: Sequence) -> list:
    """fn over items on a bounded pool; results keep the input order."""
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def format_number(value: float) -> str:
    return f"{float(value):.17g}"


def write_table(out, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else format_number(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# option resolution: flag > config file > default

class Options:
    def __init__(self, args: argparse.Namespace, config: dict[str, Any]) -> None:
        self._args, self._config = args, config

    def __getattr__(self, name: str) -> Any:
        value = getattr(self._args, name, None)
        if value is not None:
            return value
        if name in self._config:
            return self._config[name]
        return DEFAULTS.get(name)

    def tolerance(self, base: Tolerance) -> Tolerance:
        abs_tol = base.abs_tol if self.abs_tol is None else float(self.abs_tol)
        rel_tol = base.rel_tol if self.rel_tol is None else float(self.rel_tol)
        if not (abs_tol > 0 and rel_tol > 0):
            raise InvalidInputError("tolerances must be positive")
        return Tolerance(abs_tol, rel_tol, base.max_subdivisions)


def load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"config {path}: invalid JSON at line {exc.lineno}") from None
    if not isinstance(data, dict):
        raise InvalidInputError("config must be a JSON object")
    data = {str(k).replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise InvalidInputError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _grid_option(value: Any, name: str) -> np.ndarray:
    if isinstance(value, (list, tuple)):
        value = ",".join(str(v) for v in value)
    return parse_grid(value, name)


# ---------------------------------------------------------------------------
# commands

def run_kernel(opts: Options, out) -> int:
    xs = _grid_option(opts.x, "x grid")
    taus = _grid_option(opts.tau, "tau grid")
    if np.any(xs <= 0):
        raise InvalidInputError("x must be positive")
    methods = list(kernel.KernelMethod) if opts.method == "all" else [kernel.KernelMethod(opts.method)]
    spec = ContourSpec(float(opts.abscissa))
    contour_tol = opts.tolerance(kernel.CONTOUR_TOLERANCE)
    cosine_tol = opts.tolerance(kernel.COSINE_TOLERANCE)

    def evaluate(point):
        x, tau, method = point
        if method is kernel.KernelMethod.DEFINITION:
            result = kernel.kernel_definition(x, tau)
        elif method is kernel.KernelMethod.MELLIN_BARNES:
            result = kernel.kernel_mellin_barnes(x, tau, spec, contour_tol)
        else:
            result = kernel.kernel_fourier_cosine(x, tau, cosine_tol)
        return (x, tau, method.value, result.value, result.err_estimate)

    points = [(float(x), float(t), m) for x in xs for t in taus for m in methods]
    write_table(out, ("x", "tau", "method", "value", "err_estimate"), ordered_map(evaluate, points))
    return EXIT_OK


def _fixture(name: str | None, rates: Any):
    if name in (None, "test-function"):
        rate_list = rates if isinstance(rates, (list, tuple)) else [float(v) for v in str(rates).split(",")]
        return transforms.make_test_function(rate_list)
    if name == "bump":
        return transforms.gaussian_bump()
    if name == "reference":
        return transforms.reference_boundary_datum()
    raise InvalidInputError(f"unknown fixture {name!r} (test-function, bump, reference)")


def run_transform(opts: Options, action: str, out) -> int:
    grid = _grid_option(opts.grid, "grid") if opts.grid is not None else None
    if action == "forward-f":
        source = read_samples(opts.input) if opts.input else _fixture(opts.fixture or "test-function", opts.rates)
        grid = grid if grid is not None else parse_grid("0:10:41")
        tol = opts.tolerance(transforms.FORWARD_TOLERANCE)
        result = transforms.forward_f(source, grid, tol)
        write_table(out, ("grid", "value"), zip(grid, result.values))
    elif action == "forward-g":
        source = read_samples(opts.input) if opts.input else _fixture(opts.fixture or "reference", opts.rates)
        if isinstance(source, transforms.TestFunction):
            raise InvalidInputError("forward-g needs a tau profile (bump, reference or --input)")
        grid = grid if grid is not None else parse_grid("log:0.01:100:30")
        tol = opts.tolerance(Tolerance(abs_tol=1e-15, rel_tol=1e-10))
        result = transforms.forward_g(source, grid, tol)
        write_table(out, ("grid", "value"), zip(grid, result.values))
    elif action == "inverse-f":
        grid = grid if grid is not None else parse_grid("0.5:2:9")
        reference = None
        if opts.input:
            data = read_samples(opts.input)
        else:
            source = _fixture(opts.fixture or "test-function", opts.rates)
            if not isinstance(source, transforms.TestFunction):
                raise InvalidInputError("the inverse-f pipeline needs the test-function fixture")
            data = transforms.forward_f(source, parse_grid("0:40:161"))
            reference = source(grid)
        result = transforms.inverse_f(data, grid, variant=opts.variant or "stated", scaling=opts.scaling)
        _write_inverse(out, grid, result.values, reference)
    elif action == "inverse-g":
        grid = grid if grid is not None else parse_grid("0.25:2:8")
        reference = None
        if opts.input:
            data = read_samples(opts.input)
        else:
            source = _fixture(opts.fixture or "bump", opts.rates)
            if isinstance(source, transforms.TestFunction):
                raise InvalidInputError("the inverse-g pipeline needs a tau profile fixture")
            data = transforms.forward_g(source, parse_grid("log:0.01:100:30"))
            reference = source(grid)
        result = transforms.inverse_g(data, grid, variant=opts.variant or "corrected")
        _write_inverse(out, grid, result.values, reference)
    else:
        raise InvalidInputError(f"unknown transform {action!r}")
    return EXIT_OK


def _write_inverse(out, grid, values, reference) -> None:
    if reference is None:
        write_table(out, ("grid", "value"), zip(grid, values))
        return
    write_table(out, ("grid", "value", "reference"), zip(grid, values, reference))
    error = transforms.round_trip_error(reference, values)
    print(f"round-trip relative Linf error: {format_number(error)}", file=sys.stderr)


def _parse_points(text: Any) -> list[tuple[float, float]]:
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    points = []
    for item in items:
        try:
            r, theta = (float(v) for v in (item if isinstance(item, (list, tuple)) else item.split(":")))
        except ValueError:
            raise InvalidInputError(f"point {item!r} must look like r:theta") from None
        points.append((r, theta))
    if not points:
        raise InvalidInputError("no points given")
    return points


def run_bvp(opts: Options, action: str, out) -> int:
    beta = float(opts.beta)
    bvp.WedgeParams(beta)
    g = read_samples(opts.input) if opts.input else _fixture(opts.fixture or "reference", opts.rates)
    if isinstance(g, transforms.TestFunction):
        raise InvalidInputError("the boundary datum must be a tau profile (bump, reference or --input)")
    if action == "solve":
        radii = _grid_option(opts.r_grid, "r grid")
        thetas = _grid_option(opts.theta_grid, "theta grid") if opts.theta_grid is not None \
            else np.linspace(0.0, beta, 5)
        for r in radii:
            bvp.WedgeParams(beta, float(r), float(thetas[0]))
        bvp.WedgeParams(beta, 1.0, float(thetas[-1]))
        field = bvp.WedgeField(g, beta)
        rows = ordered_map(lambda r: field.values([r], thetas)[0], list(radii))
        write_table(out, ("r", "theta", "value"),
                    ((r, t, v) for r, row in zip(radii, rows) for t, v in zip(thetas, row)))
    elif action == "residual":
        points = _parse_points(opts.points) if opts.points is not None else \
            [(r, t) for r in (0.5, 1.0, 2.0) for t in (beta / 4, 3 * beta / 4)]
        field = bvp.WedgeField(g, beta)

        def residual(point):
            w = bvp.WedgeParams(beta, *point)
            h_r = None if opts.h_r is None else float(opts.h_r)
            h_t = None if opts.h_theta is None else float(opts.h_theta)
            return bvp.pde_residual(g, w, h_r, h_t, field)

        reports = ordered_map(residual, points)
        write_table(out, ("r", "theta", "residual", "h_r", "h_theta"),
                    ((*rep.point, rep.residual, *rep.step_sizes) for rep in reports))
    elif action == "trace":
        radii = _grid_option(opts.r_grid, "r grid")
        lower, upper = bvp.boundary_trace(g, bvp.WedgeParams(beta), radii)
        reference = transforms.forward_g(g, radii).values
        write_table(out, ("r", "zero_angle", "opening_angle", "forward_g"),
                    zip(radii, lower.values, upper.values, reference))
    else:
        raise InvalidInputError(f"unknown bvp action {action!r}")
    return EXIT_OK


def run_verify(opts: Options, suite: str, out) -> int:
    try:
        seed = int(opts.seed)
    except (TypeError, ValueError):
        raise InvalidInputError("seed must be an integer") from None
    report = verify.run_suite(suite, verify.VerifyConfig(seed=seed))
    out.write(verify.to_json(report))
    return EXIT_OK if report["status"] == "pass" else EXIT_FAILED


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kelvin-index", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values (flags win)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--abs-tol", type=float, dest="abs_tol")
    common.add_argument("--rel-tol", type=float, dest="rel_tol")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", parents=[common], help="kernel values on an (x, tau) grid")
    k.add_argument("--x", help="x grid (list, a:b:n or log:a:b:n)")
    k.add_argument("--tau", help="tau grid")
    k.add_argument("--method", choices=["all"] + [m.value for m in kernel.KernelMethod])
    k.add_argument("--abscissa", type=float, help="Mellin-Barnes contour abscissa")

    t = sub.add_parser("transform", parents=[common], help="forward and inverse transforms")
    t.add_argument("action", choices=["forward-f", "forward-g", "inverse-f", "inverse-g"])
    t.add_argument("--grid", help="output grid")
    t.add_argument("--input", help="CSV samples with header grid,value")
    t.add_argument("--fixture", choices=["test-function", "bump", "reference"])
    t.add_argument("--rates", help="test-function rates, comma separated")
    t.add_argument("--variant", choices=["stated", "corrected"], help="inversion kernel variant")
    t.add_argument("--scaling", choices=list(transforms.ARGUMENT_SCALINGS), help="inverse-f argument scaling")

    b = sub.add_parser("bvp", parents=[common], help="wedge boundary-value problem")
    b.add_argument("action", choices=["solve", "residual", "trace"])
    b.add_argument("--beta", type=float, help="opening angle in (0, 2 pi)")
    b.add_argument("--r-grid", dest="r_grid")
    b.add_argument("--theta-grid", dest="theta_grid")
    b.add_argument("--points", help="residual points r:theta, comma separated")
    b.add_argument("--h-r", dest="h_r", type=float)
    b.add_argument("--h-theta", dest="h_theta", type=float)
    b.add_argument("--input", help="boundary datum CSV (grid,value over tau)")
    b.add_argument("--fixture", choices=["bump", "reference"])

    v = sub.add_parser("verify", parents=[common], help="run a verification suite, JSON report")
    v.add_argument("suite", choices=list(verify.SUITES) + ["all"])
    v.add_argument("--seed", type=int)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None) -> None:
    print(f"warning: {message}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    warnings.showwarning = _show_warning
    out_path = getattr(args, "out", None)
    try:
        opts = Options(args, load_config(args.config))
        buffer = _Buffer()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", kernel.KernelRangeWarning)
            if args.command == "kernel":
                code = run_kernel(opts, buffer)
            elif args.command == "transform":
                code = run_transform(opts, args.action, buffer)
            elif args.command == "bvp":
                code = run_bvp(opts, args.action, buffer)
            else:
                code = run_verify(opts, args.suite, buffer)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT
    text = buffer.getvalue()
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return code


class _Buffer:
    """Collects output so nothing is written when a command fails midway."""

    def __init__(self) -> None:
        self._parts: list[str] = []

    def write(self, text: str) -> None:
        self._parts.append(text)

    def getvalue(self) -> str:
        return "".join(self._parts)


if __name__ == "__main__":
    sys.exit(main())
