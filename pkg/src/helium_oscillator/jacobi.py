"""Cyclic Jacobi eigensolver for the 4x4 coupling matrix.

This is the independent check on the closed-form spectrum: it never looks at
the cubic, only at the matrix entries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousPairingError, NoConvergenceError, NonSymmetricError
from .spectrum import ModeSpectrum

SYMMETRY_TOL = 1e-12
OFF_TOL = 1e-14
MAX_SWEEPS = 50
PAIRING_MIN_DOT = 0.9
CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class NumericEigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, aligned with eigenvalues
    sweeps: int


def _off(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def symmetric_eigen_4x4(matrix) -> NumericEigenResult:
    a = np.array(matrix, dtype=float)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {a.shape}")
    norm = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL * max(1.0, norm):
        raise NonSymmetricError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(4)
    n = 4
    target = OFF_TOL * norm
    skip = 1e-4 * target

    sweeps = 0
    while _off(a) > target:
        if sweeps == MAX_SWEEPS:
            raise NoConvergenceError(f"no convergence after {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return NumericEigenResult(values[order], v[:, order], sweeps)


@dataclass(frozen=True)
class SpectrumMatch:
    pairs: tuple[tuple[int, int], ...]  # (analytic column, numeric column)
    max_eigenvalue_deviation: float
    max_sin_angle: float


def _clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    order = np.argsort(values)
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(values[i] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return groups


def _subspace_sin(a: np.ndarray, b: np.ndarray) -> float:
    """Sine of the largest principal angle between two column spaces."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    cosines = np.linalg.svd(qa.T @ qb, compute_uv=False)
    smallest = float(np.clip(cosines.min(), 0.0, 1.0))
    return math.sqrt(max(0.0, 1.0 - smallest * smallest))


def match_spectra(analytic: ModeSpectrum, numeric: NumericEigenResult) -> SpectrumMatch:
    """Pair analytic modes (three modes plus the zero mode) with numeric ones.

    Pairing is greedy on the largest |dot product|, so eigenvector signs never
    matter. Eigenvalues that coincide within a cluster tolerance are matched
    as a block and judged by the angle between the spanned subspaces.
    """
    a_vals = np.append(analytic.eigenvalues, 0.0)
    a_vecs = analytic.eigenvectors()
    n_vals = np.asarray(numeric.eigenvalues, dtype=float)
    n_vecs = np.asarray(numeric.eigenvectors, dtype=float)
    scale = max(1.0, float(np.max(np.abs(n_vals))))
    dots = np.abs(a_vecs.T @ n_vecs)

    pairs: dict[int, int] = {}
    sin_max = 0.0
    clusters = _clusters(a_vals, CLUSTER_TOL * scale)
    taken: set[int] = set()
    for group in clusters:
        if len(group) == 1:
            continue
        # numeric partners: the same number of nearest numeric eigenvalues
        mean = float(np.mean(a_vals[group]))
        free = [j for j in np.argsort(np.abs(n_vals - mean)) if j not in taken][: len(group)]
        for i, j in zip(sorted(group, key=lambda k: a_vals[k]), sorted(free, key=lambda k: n_vals[k])):
            pairs[i] = int(j)
            taken.add(int(j))
        sin_max = max(sin_max, _subspace_sin(a_vecs[:, group], n_vecs[:, free]))

    singles = [g[0] for g in clusters if len(g) == 1]
    candidates = sorted(
        ((dots[i, j], i, j) for i in singles for j in range(4) if j not in taken), reverse=True
    )
    for dot, i, j in candidates:
        if i in pairs or j in taken:
            continue
        if dot < PAIRING_MIN_DOT:
            raise AmbiguousPairingError(f"mode {i} pairs with |dot| = {dot:.3g} < {PAIRING_MIN_DOT}")
        pairs[i] = j
        taken.add(j)
        sin_max = max(sin_max, math.sqrt(max(0.0, 1.0 - min(1.0, dot) ** 2)))

    ordered = tuple(sorted(pairs.items()))
    dev = max(abs(a_vals[i] - n_vals[j]) for i, j in ordered)
    return SpectrumMatch(ordered, float(dev), float(sin_max))


def numeric_from_spectrum(spectrum: ModeSpectrum) -> NumericEigenResult:
    """Wrap an analytic spectrum in the numeric result shape (for self-pairing)."""
    values = np.append(spectrum.eigenvalues, 0.0)
    order = np.argsort(values, kind="stable")
    return NumericEigenResult(values[order], spectrum.eigenvectors()[:, order], 0)
