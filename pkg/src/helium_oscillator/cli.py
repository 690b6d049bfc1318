"""Command-line front end: solve, sweep, surfaces, verify.

Exit status: 0 on success, 1 on usage or input errors, 2 when a solve finds
no intersection (solve) or a fixture fails (verify).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product

import numpy as np

from . import fixtures
from .errors import FixtureFormatError, ModelError, NoIntersectionError
from .model import CONSTANTS, QuantumNumbers, validate_quantum_numbers
from .surfaces import SearchDomain, SolveOptions, Solution, solve_intersection, surfaces_array

EXIT_OK, EXIT_USAGE, EXIT_NO_INTERSECTION = 0, 1, 2

SWEEP_HEADER = ("n1", "n2", "n3", "cos_theta", "tan_alpha", "r_bohr", "energy_hartree", "residual", "converged")
SURFACE_HEADER = ("cos_theta", "tan_alpha", "s1", "s2", "s3", "residual")

UNITS_HELP = (
    "au: r in Bohr radii (key r_bohr), E in hartree (key energy_hartree). "
    "ev-angstrom: r in angstrom (key r_angstrom), E in eV (key energy_ev). "
    "Published tables of this model head the r column 'angstrom', but the numbers "
    "there are Bohr radii: the ground state r = 1.0481 is 0.5546 angstrom."
)

log = logging.getLogger("helium_oscillator")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with NoIntersection
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    """Shortest round-trip text for CSV fields; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value != value:  # NaN
        return ""
    return repr(value)


def _write_csv(stream, header, rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _options(args) -> SolveOptions:
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    if args.max_iters < 1:
        raise UsageError("--max-iters must be at least 1")
    if args.refine_grid < 3:
        raise UsageError("--refine-grid must be at least 3")
    return SolveOptions(resolution=args.grid, max_iters=args.max_iters, refine_resolution=args.refine_grid)


def _quantum_numbers(args) -> QuantumNumbers:
    return validate_quantum_numbers(args.n1, args.n2, args.n3)


def solution_record(solution: Solution, units: str = "au") -> dict:
    rec = solution.record()
    if units == "ev-angstrom":
        out = {}
        for key, value in rec.items():
            if key == "r_bohr":
                out["r_angstrom"] = value * CONSTANTS.bohr_radius_angstrom
            elif key == "energy_hartree":
                out["energy_ev"] = value * CONSTANTS.hartree_ev
            else:
                out[key] = value
        rec = out
    return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in rec.items()}


def _emit_solution(solution: Solution, args, stream) -> None:
    rec = solution_record(solution, args.units)
    if args.format == "json":
        stream.write(_json(rec) + "\n")
    elif args.format == "csv":
        _write_csv(stream, list(rec), [list(rec.values())])
    else:
        width = max(len(k) for k in rec)
        for key, value in rec.items():
            text = f"{value:.10g}" if isinstance(value, float) else str(value).lower() if isinstance(value, bool) else str(value)
            stream.write(f"{key:<{width}}  {text}\n")


def cmd_solve(args) -> int:
    n = _quantum_numbers(args)
    try:
        solution = solve_intersection(n, _options(args))
    except NoIntersectionError as exc:
        print(f"NoIntersection: {exc}", file=sys.stderr)
        if exc.solution is not None:
            print("best non-converged point:", file=sys.stderr)
            _emit_solution(exc.solution, args, sys.stderr)
        return EXIT_NO_INTERSECTION
    _emit_solution(solution, args, sys.stdout)
    return EXIT_OK


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` with an inclusive stop."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} is not start:stop:step")
    try:
        start, stop, step = (Fraction(p.strip()) for p in parts)
    except ValueError:
        raise UsageError(f"range {text!r} is not start:stop:step") from None
    if step <= 0 or stop < start:
        raise UsageError(f"range {text!r} needs step > 0 and stop >= start")
    count = int((stop - start) // step) + 1
    values = [float(start + k * step) for k in range(count)]
    for v in values:
        validate_quantum_numbers(v, v, v)
    return values


def _sweep_row(triple, options):
    n = validate_quantum_numbers(*triple)
    try:
        sol = solve_intersection(n, options)
    except NoIntersectionError as exc:
        sol = exc.solution
    except ModelError as exc:
        log.warning("%s: %s", triple, exc)
        sol = None
    if sol is None:
        return [n.n1, n.n2, n.n3, None, None, None, None, None, False]
    return [n.n1, n.n2, n.n3, sol.cos_theta, sol.tan_alpha, sol.r, sol.energy_hartree, sol.residual, sol.converged]


def cmd_sweep(args) -> int:
    values = parse_range(args.range)
    options = _options(args)
    triples = list(product(values, repeat=3))  # lexicographic order
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                # map yields in submission order whatever the completion order
                rows = list(pool.map(_sweep_row, triples, [options] * len(triples)))
        else:
            rows = []
            for k, t in enumerate(triples, 1):
                rows.append(_sweep_row(t, options))
                log.info("solved %d/%d %s", k, len(triples), t)
        _write_csv(out, SWEEP_HEADER, rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_surfaces(args) -> int:
    n = _quantum_numbers(args)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    cs, ts = SearchDomain(resolution=args.grid).axes()
    c, t = np.meshgrid(cs, ts, indexing="ij")
    radii, residual, _ = surfaces_array(c, t, n)
    rows = (
        [c[i, j], t[i, j], *radii[i, j], residual[i, j]]
        for i in range(len(cs))
        for j in range(len(ts))
    )
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        _write_csv(out, SURFACE_HEADER, rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        entries = fixtures.load_fixtures(args.fixtures)
    except OSError as exc:
        raise UsageError(f"cannot read fixtures: {exc}") from None
    results = fixtures.run_fixtures(entries, _options(args))
    if args.report == "json":
        sys.stdout.write(_json([r.record() for r in results]) + "\n")
    else:
        sys.stdout.write(fixtures.format_report(results))
    failed = [r for r in results if not r.passed]
    for r in failed:
        e = r.entry
        print(f"failed: line {e.line} {tuple(e.n)} {e.quantity}", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_NO_INTERSECTION


def _add_solver_flags(p) -> None:
    p.add_argument("--grid", type=int, default=1000, help="coarse grid nodes per axis (default 1000)")
    p.add_argument("--max-iters", type=int, default=15, help="scan cap per refinement track (default 15)")
    p.add_argument("--refine-grid", type=int, default=201, help="nodes per axis in refinement windows (default 201)")


def _add_n_flags(p, required=True) -> None:
    for name in ("--n1", "--n2", "--n3"):
        p.add_argument(name, type=float, required=required, help="quantum number magnitude (k/2, k >= 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="helium-oscillator", description="Four-dimensional oscillator model of helium.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="diagnostics on stderr (-vv for debug)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="locate the surface intersection for one triple")
    _add_n_flags(p)
    _add_solver_flags(p)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--units", choices=("au", "ev-angstrom"), default="au", help=UNITS_HELP)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve every triple of a range, CSV to stdout or --out")
    p.add_argument("--range", default="0.5:5:0.5", help="start:stop:step for each n, stop inclusive (default 0.5:5:0.5)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("surfaces", help="dump the three radius surfaces on a grid as CSV")
    _add_n_flags(p)
    p.add_argument("--grid", type=int, default=200, help="nodes per axis (default 200)")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_surfaces)

    p = sub.add_parser("verify", help="check solves against tabulated fixture values")
    p.add_argument("--fixtures", help="fixture CSV (default: the embedded set)")
    p.add_argument("--report", choices=("text", "json"), default="text")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, FixtureFormatError, ModelError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
