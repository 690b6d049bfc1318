"""Radius surfaces and their intersection by coarse-to-fine grid search.

For each mode the quantisation relation r12^3 = 4 c^4 / (N^2 lambda^3 a)
fixes r as a function of the angular configuration. Substituting c = r c_hat
and r12 = rho r gives

    s = rho^3 n^2 |lambda|^3 / (4 c_hat^4)

in Bohr radii. Negative-eigenvalue modes carry an imaginary N, which makes
N^2 lambda^3 positive, so taking magnitudes covers both signs. The physical
state sits where the three surfaces meet.
"""
from __future__ import annotations

import logging
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .energy import energy_closed_form
from .errors import AllUndefinedError, DomainError, ModelError, NoIntersectionError
from .model import AngularConfig, QuantumNumbers, make_config, validate_quantum_numbers
from .spectrum import Mode, ModeSpectrum, mode_spectrum, ordered_modes_array

log = logging.getLogger(__name__)

UNDEFINED_C_HAT = 1e-13
COS_LIMITS = (-0.99999, 0.99999)
TAN_LIMITS = (1.00001, 10.0)
DEFAULT_RESOLUTION = 1000
DEFAULT_MAX_ITERS = 15
DEFAULT_WIDTH_TOL = 1e-6
SHRINK_CELLS = 2
DEFAULT_REFINE_RESOLUTION = 201
CHUNK_NODES = 1 << 17


def residual_tolerance(r: float) -> float:
    return 1e-4 * max(1.0, r)


def radius_surface(mode: Mode, n: float, config: AngularConfig) -> float | None:
    """Radius in Bohr radii at which ``mode`` is quantised with magnitude ``n``.

    Returns None where the surface is undefined (vanishing projection or
    eigenvalue).
    """
    if n < 0.5:
        raise DomainError(f"quantum number {n!r} is below 1/2")
    chat, lam = mode.c_hat, mode.lambda_hat
    if not (math.isfinite(chat) and math.isfinite(lam)) or abs(chat) < UNDEFINED_C_HAT or lam == 0.0:
        return None
    return config.rho**3 * n * n * abs(lam) ** 3 / (4.0 * chat**4)


def spread(radii) -> float:
    s1, s2, s3 = radii
    return abs(s1 - s2) + abs(s1 - s3) + abs(s2 - s3)


@dataclass(frozen=True)
class SurfaceSample:
    config: AngularConfig
    radii: tuple[float | None, float | None, float | None]
    residual: float | None
    tag: str = ""

    @property
    def defined(self) -> bool:
        return self.residual is not None


def sample_surfaces(config: AngularConfig, n: QuantumNumbers) -> SurfaceSample:
    try:
        spectrum = mode_spectrum(config)
    except ModelError as exc:
        return SurfaceSample(config, (None, None, None), None, type(exc).__name__)
    radii = tuple(radius_surface(m, q, config) for m, q in zip(spectrum.modes, n))
    if any(x is None for x in radii):
        return SurfaceSample(config, radii, None, "undefined-radius")
    return SurfaceSample(config, radii, spread(radii))


# ---------------------------------------------------------------------------
# vectorised evaluation


def surfaces_array(cos_theta, tan_alpha, n: QuantumNumbers):
    """Radii (..., 3) and residuals (...) on arrays of configs; NaN = undefined.

    Also returns the number of negative eigenvalues at each node.
    """
    c = np.asarray(cos_theta, dtype=float)
    t = np.asarray(tan_alpha, dtype=float)
    modes = ordered_modes_array(c, t)
    lam, chat = modes["lambda_hat"], modes["c_hat"]
    rho = np.sqrt((t - c) ** 2 + (1.0 - c) * (1.0 + c))[..., None]
    nn = np.array([n.n1, n.n2, n.n3], dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        radii = rho**3 * nn * nn * np.abs(lam) ** 3 / (4.0 * chat**4)
    bad = ~np.isfinite(radii) | (np.abs(chat) < UNDEFINED_C_HAT) | (lam == 0.0)
    radii = np.where(bad, np.nan, radii)
    s1, s2, s3 = radii[..., 0], radii[..., 1], radii[..., 2]
    residual = np.abs(s1 - s2) + np.abs(s1 - s3) + np.abs(s2 - s3)
    negatives = np.sum(lam < 0.0, axis=-1)
    return radii, residual, negatives


@dataclass(frozen=True)
class SearchDomain:
    cos_range: tuple[float, float] = COS_LIMITS
    tan_range: tuple[float, float] = TAN_LIMITS
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self):
        (c0, c1), (t0, t1) = self.cos_range, self.tan_range
        if self.resolution < 2:
            raise DomainError("resolution must be at least 2")
        if not (COS_LIMITS[0] <= c0 <= c1 <= COS_LIMITS[1]):
            raise DomainError(f"cos range {self.cos_range} outside {COS_LIMITS}")
        if not (TAN_LIMITS[0] <= t0 <= t1 <= TAN_LIMITS[1]):
            raise DomainError(f"tan range {self.tan_range} outside {TAN_LIMITS}")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(*self.cos_range, self.resolution),
            np.linspace(*self.tan_range, self.resolution),
        )

    @property
    def widths(self) -> tuple[float, float]:
        return self.cos_range[1] - self.cos_range[0], self.tan_range[1] - self.tan_range[0]


@dataclass(frozen=True)
class GridResult:
    config: AngularConfig
    residual: float
    index: tuple[int, int]
    radii: tuple[float, float, float]
    negative_modes: dict[int, int] = field(default_factory=dict)


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("OSC_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise DomainError(f"OSC_THREADS={env!r} is not a positive integer") from None
        if value < 1:
            raise DomainError(f"OSC_THREADS={env!r} is not a positive integer")
        return value
    return 1


def _scan_rows(cs, ts, rows, n):
    c = cs[rows][:, None]
    _, residual, negatives = surfaces_array(np.broadcast_to(c, (len(rows), len(ts))), ts[None, :], n)
    finite = np.isfinite(residual)
    counts = np.bincount(negatives[finite].ravel(), minlength=4)
    return np.where(finite, residual, np.inf), {k: int(v) for k, v in enumerate(counts) if v}


def scan_residuals(domain: SearchDomain, n: QuantumNumbers, workers: int | None = None):
    """Residual at every node of the domain grid (inf where undefined).

    Also returns a histogram of how many nodes had 0..3 negative eigenvalues.
    Blocks of rows may run on several threads; each block writes its own rows,
    so the result does not depend on the partitioning.
    """
    cs, ts = domain.axes()
    rows_per_block = max(1, CHUNK_NODES // len(ts))
    blocks = [np.arange(k, min(k + rows_per_block, len(cs))) for k in range(0, len(cs), rows_per_block)]
    nworkers = worker_count(workers)
    if nworkers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(lambda rows: _scan_rows(cs, ts, rows, n), blocks))
    else:
        results = [_scan_rows(cs, ts, rows, n) for rows in blocks]
    grid = np.empty((len(cs), len(ts)))
    hist: Counter = Counter()
    for rows, (block, h) in zip(blocks, results):
        grid[rows] = block
        hist.update(h)
    return grid, dict(sorted(hist.items()))


def grid_scan(domain: SearchDomain, n: QuantumNumbers, workers: int | None = None) -> GridResult:
    """Smallest residual on the domain grid, ties to the smallest (i, j)."""
    grid, hist = scan_residuals(domain, n, workers)
    if not np.isfinite(grid).any():
        raise AllUndefinedError(f"no defined residual on {domain}")
    # argmin returns the first minimum in row-major order, i.e. smallest (i, j)
    i, j = divmod(int(np.argmin(grid)), grid.shape[1])
    cs, ts = domain.axes()
    radii, _, _ = surfaces_array(cs[i], ts[j], n)
    return GridResult(
        make_config(cs[i], ts[j]),
        float(grid[i, j]),
        (i, j),
        tuple(float(x) for x in radii),
        hist,
    )


# ---------------------------------------------------------------------------
# solver


@dataclass(frozen=True)
class SolveOptions:
    resolution: int = DEFAULT_RESOLUTION
    max_iters: int = DEFAULT_MAX_ITERS
    width_tol: float = DEFAULT_WIDTH_TOL
    shrink_cells: int = SHRINK_CELLS
    workers: int | None = None
    cos_range: tuple[float, float] = COS_LIMITS
    tan_range: tuple[float, float] = TAN_LIMITS
    refine_resolution: int = DEFAULT_REFINE_RESOLUTION


@dataclass(frozen=True)
class ModeAssignment:
    eigenvalues: tuple[float, float, float]
    gamma2: tuple[float, float, float]
    negative: tuple[bool, bool, bool]

    @classmethod
    def from_spectrum(cls, spectrum: ModeSpectrum) -> "ModeAssignment":
        lam = tuple(m.lambda_hat for m in spectrum.modes)
        return cls(lam, tuple(m.gamma2 for m in spectrum.modes), tuple(x < 0 for x in lam))


@dataclass(frozen=True)
class Solution:
    quantum_numbers: QuantumNumbers
    config: AngularConfig
    r: float
    energy_hartree: float
    residual: float
    iterations: int
    converged: bool
    radii: tuple[float, float, float]
    mode_assignment: ModeAssignment
    negative_modes: dict[int, int] = field(default_factory=dict)

    @property
    def cos_theta(self) -> float:
        return self.config.cos_theta

    @property
    def tan_alpha(self) -> float:
        return self.config.tan_alpha

    @property
    def r_outer(self) -> float:
        return self.r * self.config.tan_alpha

    @property
    def r12(self) -> float:
        return self.r * self.config.rho

    def record(self) -> dict:
        n = self.quantum_numbers
        return {
            "n1": n.n1,
            "n2": n.n2,
            "n3": n.n3,
            "cos_theta": self.config.cos_theta,
            "tan_alpha": self.config.tan_alpha,
            "r_bohr": self.r,
            "energy_hartree": self.energy_hartree,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _at_inner_edge(index, resolution, current, limits) -> bool:
    return (index == 0 and current[0] > limits[0]) or (
        index == resolution - 1 and current[1] < limits[1]
    )


def _next_range(centre, half, limits):
    lo, hi = centre - half, centre + half
    if lo < limits[0]:
        lo, hi = limits[0], min(limits[1], limits[0] + 2.0 * half)
    if hi > limits[1]:
        lo, hi = max(limits[0], limits[1] - 2.0 * half), limits[1]
    return lo, hi


def _on_boundary(value, limits) -> bool:
    return value <= limits[0] or value >= limits[1]


@dataclass
class _Track:
    best: GridResult
    iterations: int
    pinned: bool
    hist: Counter


def _refine(coarse: SearchDomain, best: GridResult, n: QuantumNumbers, opts: SolveOptions) -> _Track:
    limits_c, limits_t = opts.cos_range, opts.tan_range
    domain = coarse
    hist: Counter = Counter(best.negative_modes)
    iterations = 1
    boundary_streak = 0
    while True:
        cfg = best.config
        if _on_boundary(cfg.cos_theta, limits_c) or _on_boundary(cfg.tan_alpha, limits_t):
            boundary_streak += 1
        else:
            boundary_streak = 0
        if boundary_streak >= 2:
            return _Track(best, iterations, True, hist)
        wc, wt = domain.widths
        i, j = best.index
        res = domain.resolution
        # A minimum on an inner window edge means the valley runs on past it.
        # That axis doubles around the new best node and the other keeps its
        # size; shrinking resumes once the minimum is interior on both axes.
        edge_c = _at_inner_edge(i, res, domain.cos_range, limits_c)
        edge_t = _at_inner_edge(j, res, domain.tan_range, limits_t)
        walking = edge_c or edge_t
        if not walking and wc < opts.width_tol and wt < opts.width_tol:
            break
        if iterations >= opts.max_iters:
            break
        shrink = opts.shrink_cells / (res - 1)
        half_c = wc if edge_c else wc / 2.0 if walking else wc * shrink
        half_t = wt if edge_t else wt / 2.0 if walking else wt * shrink
        domain = SearchDomain(
            _next_range(cfg.cos_theta, half_c, limits_c),
            _next_range(cfg.tan_alpha, half_t, limits_t),
            opts.refine_resolution,
        )
        best = grid_scan(domain, n, opts.workers)
        hist.update(best.negative_modes)
        iterations += 1
        log.debug("scan %d%s: residual %.3g at %s", iterations, " (grown)" if walking else "", best.residual, best.config)
    return _Track(best, iterations, False, hist)


def _finish(track: _Track, n: QuantumNumbers) -> Solution:
    cfg = track.best.config
    spectrum = mode_spectrum(cfg)
    radii = tuple(radius_surface(m, q, cfg) for m, q in zip(spectrum.modes, n))
    if any(x is None for x in radii):
        residual, r = math.inf, math.nan
    else:
        residual, r = spread(radii), sum(radii) / 3.0
    return Solution(
        quantum_numbers=n,
        config=cfg,
        r=r,
        energy_hartree=energy_closed_form(r, cfg) if math.isfinite(r) else math.nan,
        residual=residual,
        iterations=track.iterations,
        converged=(not track.pinned) and residual < residual_tolerance(r),
        radii=radii,
        mode_assignment=ModeAssignment.from_spectrum(spectrum),
        negative_modes=dict(sorted(track.hist.items())),
    )


def solve_intersection(n, options: SolveOptions | None = None) -> Solution:
    """Locate the common point of the three radius surfaces for ``n``.

    A full grid scan is followed by rescans of a window of +-``shrink_cells``
    cells around the current best node (at ``refine_resolution`` nodes per
    axis) until both window widths fall below ``width_tol`` or ``max_iters``
    scans have run. A minimum on an inner window edge grows the window along
    that axis instead of shrinking it, which lets the search follow long
    tilted valleys whose floor the grid does not resolve.

    Raises NoIntersectionError (carrying the best non-converged Solution) when
    the final residual is above tolerance or the minimiser sits on the outer
    domain boundary for two consecutive scans.
    """
    if not isinstance(n, QuantumNumbers):
        n = validate_quantum_numbers(*n)
    opts = options or SolveOptions()
    coarse = SearchDomain(opts.cos_range, opts.tan_range, opts.resolution)
    track = _refine(coarse, grid_scan(coarse, n, opts.workers), n, opts)
    solution = _finish(track, n)
    if not solution.converged:
        why = "minimiser pinned to the domain boundary" if track.pinned else f"residual {solution.residual:.3g} above tolerance"
        raise NoIntersectionError(f"no intersection for {tuple(n)}: {why}", solution)
    return solution


def try_solve(n, options: SolveOptions | None = None) -> Solution:
    """Like solve_intersection but returns the non-converged best instead of raising."""
    try:
        return solve_intersection(n, options)
    except NoIntersectionError as exc:
        if exc.solution is None:
            raise
        return exc.solution
