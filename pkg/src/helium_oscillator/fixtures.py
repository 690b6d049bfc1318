"""Regression fixtures: tabulated values checked against fresh solves.

File format is CSV with a header ``n1,n2,n3,quantity,value,tolerance`` and
``#`` comment lines. How ``tolerance`` is applied depends on the quantity:

* cos_theta, tan_alpha: absolute
* r, energy: relative
* residual: the computed residual passes when it is at most
  ``tolerance * value`` (residuals depend on grid phase, so only the order of
  magnitude is meaningful)
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from .errors import FixtureFormatError, ModelError, NoIntersectionError
from .model import QuantumNumbers, validate_quantum_numbers
from .surfaces import SolveOptions, Solution, solve_intersection

QUANTITIES = ("r", "cos_theta", "tan_alpha", "energy", "residual")
HEADER = ("n1", "n2", "n3", "quantity", "value", "tolerance")
_ABSOLUTE = {"cos_theta", "tan_alpha"}


@dataclass(frozen=True)
class FixtureEntry:
    n: QuantumNumbers
    quantity: str
    value: float
    tolerance: float
    line: int = 0

    def computed(self, solution: Solution) -> float:
        return {
            "r": solution.r,
            "cos_theta": solution.cos_theta,
            "tan_alpha": solution.tan_alpha,
            "energy": solution.energy_hartree,
            "residual": solution.residual,
        }[self.quantity]

    def deviation(self, computed: float) -> float:
        """Deviation in the units the tolerance is expressed in."""
        if self.quantity in _ABSOLUTE:
            return abs(computed - self.value)
        if self.quantity == "residual":
            return computed / self.value
        return abs(computed - self.value) / abs(self.value)


@dataclass(frozen=True)
class FixtureResult:
    entry: FixtureEntry
    computed: float | None
    deviation: float | None
    passed: bool
    error: str = ""

    def record(self) -> dict:
        e = self.entry
        return {
            "n1": e.n.n1,
            "n2": e.n.n2,
            "n3": e.n.n3,
            "quantity": e.quantity,
            "expected": e.value,
            "computed": self.computed,
            "deviation": self.deviation,
            "tolerance": e.tolerance,
            "passed": self.passed,
            "error": self.error,
        }


def _float(text: str, what: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FixtureFormatError(f"{what} {text!r} is not a number", line) from None
    if not math.isfinite(value):
        raise FixtureFormatError(f"{what} {text!r} is not finite", line)
    return value


def parse_fixtures(text: str) -> list[FixtureEntry]:
    entries: list[FixtureEntry] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in next(csv.reader([stripped]))]
        if not seen_header:
            if tuple(fields) != HEADER:
                raise FixtureFormatError(f"expected header {','.join(HEADER)}", lineno)
            seen_header = True
            continue
        if len(fields) != len(HEADER):
            raise FixtureFormatError(f"expected {len(HEADER)} fields, got {len(fields)}", lineno)
        n1, n2, n3 = (_float(f, name, lineno) for f, name in zip(fields[:3], HEADER))
        try:
            n = validate_quantum_numbers(n1, n2, n3)
        except ModelError as exc:
            raise FixtureFormatError(str(exc), lineno) from None
        quantity = fields[3]
        if quantity not in QUANTITIES:
            raise FixtureFormatError(f"unknown quantity {quantity!r}", lineno)
        value = _float(fields[4], "value", lineno)
        tolerance = _float(fields[5], "tolerance", lineno)
        if tolerance <= 0:
            raise FixtureFormatError(f"tolerance {tolerance!r} must be positive", lineno)
        if quantity in ("r", "energy", "residual") and value == 0:
            raise FixtureFormatError(f"{quantity} value must be nonzero", lineno)
        entries.append(FixtureEntry(n, quantity, value, tolerance, lineno))
    if not seen_header:
        raise FixtureFormatError("no header row", 1)
    return entries


def embedded_fixtures_text() -> str:
    return resources.files(__package__).joinpath("data/fixtures.csv").read_text(encoding="utf-8")


def load_fixtures(path: str | Path | None = None) -> list[FixtureEntry]:
    if path is None:
        return parse_fixtures(embedded_fixtures_text())
    return parse_fixtures(Path(path).read_text(encoding="utf-8"))


def check_entry(entry: FixtureEntry, solution: Solution | None, error: str = "") -> FixtureResult:
    if solution is None or not solution.converged:
        return FixtureResult(entry, None, None, False, error or "solve did not converge")
    value = entry.computed(solution)
    dev = entry.deviation(value)
    return FixtureResult(entry, value, dev, dev <= entry.tolerance)


def run_fixtures(
    entries: Iterable[FixtureEntry],
    options: SolveOptions | None = None,
    solver: Callable[[QuantumNumbers, SolveOptions | None], Solution] = solve_intersection,
    cache: dict | None = None,
) -> list[FixtureResult]:
    """Check every entry, solving each distinct triple once.

    Pass a dict as ``cache`` to share solves between calls.
    """
    cache = {} if cache is None else cache
    results = []
    for entry in entries:
        key = tuple(entry.n)
        if key not in cache:
            try:
                cache[key] = (solver(entry.n, options), "")
            except NoIntersectionError as exc:
                cache[key] = (exc.solution, str(exc))
            except ModelError as exc:
                cache[key] = (None, f"{type(exc).__name__}: {exc}")
        solution, error = cache[key]
        results.append(check_entry(entry, solution, error))
    return results


def format_report(results: list[FixtureResult]) -> str:
    out = io.StringIO()
    for res in results:
        e = res.entry
        tag = "PASS" if res.passed else "FAIL"
        n = f"({e.n.n1:g}, {e.n.n2:g}, {e.n.n3:g})"
        if res.computed is None:
            out.write(f"{tag} {n} {e.quantity}: expected {e.value!r}, {res.error}\n")
        else:
            out.write(
                f"{tag} {n} {e.quantity}: expected {e.value!r} got {res.computed:.6g}"
                f" (deviation {res.deviation:.3g}, tolerance {e.tolerance:g})\n"
            )
    passed = sum(r.passed for r in results)
    out.write(f"{passed}/{len(results)} fixtures passed\n")
    return out.getvalue()
