"""Dimensionless coupling matrix and linear vector of the 4-D oscillator.

The physical matrix C^2 is already dimensionless; the physical vector c is
proportional to r, so ``c_vector`` stores c / r.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AngularConfig


@dataclass(frozen=True)
class CouplingSystem:
    config: AngularConfig
    c2_matrix: np.ndarray
    c_vector: np.ndarray

    def zero_mode(self) -> np.ndarray:
        return zero_mode_vector(self.config)


def _second_block(c: float, s: float, t: float) -> np.ndarray:
    d = t - c
    dd, sd, ss = d * d, s * d, s * s
    return np.array(
        [
            [-dd, sd, dd, -sd],
            [sd, -ss, -sd, ss],
            [dd, -sd, -dd, sd],
            [-sd, ss, sd, -ss],
        ]
    )


def build_coupling(config: AngularConfig) -> CouplingSystem:
    c, s, t, rho = config.cos_theta, config.sin_theta, config.tan_alpha, config.rho
    rho3 = rho**3

    diag = np.zeros((4, 4))
    diag[0, 0] = t**-3
    diag[2, 2] = c * c
    diag[2, 3] = diag[3, 2] = c * s
    diag[3, 3] = s * s

    matrix = -4.0 * rho3 * diag - (2.0 / rho**2) * _second_block(c, s, t)
    vector = np.array(
        [
            2.0 * rho3 / t**2 + t - c,
            -s,
            -2.0 * rho3 * c - t + c,
            -2.0 * rho3 * s + s,
        ]
    )
    matrix.setflags(write=False)
    vector.setflags(write=False)
    return CouplingSystem(config, matrix, vector)


def zero_mode_vector(config: AngularConfig) -> np.ndarray:
    """Unit eigenvector of the coupling matrix with eigenvalue zero."""
    c, s, t = config.cos_theta, config.sin_theta, config.tan_alpha
    v = np.array([0.0, 1.0, -s / t, c / t])
    return v / np.sqrt(1.0 + t**-2)


def coupling_row_sums(system: CouplingSystem) -> np.ndarray:
    return system.c2_matrix @ np.ones(4)
