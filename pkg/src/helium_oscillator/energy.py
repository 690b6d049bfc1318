"""Total energy of the oscillator model, in hartree with r in Bohr radii.

2 E0 is one hartree, so the prefactor 2 E0 never appears explicitly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroEigenvalueError
from .model import AngularConfig, make_config
from .spectrum import ModeSpectrum

ZERO_EIGENVALUE_TOL = 1e-13
SMALL_R12 = 1e-9


def _check_r(r: float) -> None:
    if not (r > 0.0 and math.isfinite(r)):
        raise DomainError(f"r={r!r} must be positive")


def energy_closed_form(r: float, config: AngularConfig) -> float:
    """E = (2/r) (-1 - 1/tan(alpha) + 1/(2 rho))."""
    _check_r(r)
    return (2.0 / r) * (-1.0 - 1.0 / config.tan_alpha + 0.5 / config.rho)


def energy_closed_form_array(r, cos_theta, tan_alpha):
    r = np.asarray(r, dtype=float)
    c = np.asarray(cos_theta, dtype=float)
    t = np.asarray(tan_alpha, dtype=float)
    rho = np.sqrt((t - c) ** 2 + (1.0 - c) * (1.0 + c))
    return (2.0 / r) * (-1.0 - 1.0 / t + 0.5 / rho)


def wannier_energy(r: float, cos_theta: float) -> float:
    """Ridge energy (2/r)(-2 + r/(2 r12)) with r12 = 2 r sin(theta/2)."""
    _check_r(r)
    r12 = 2.0 * r * math.sqrt((1.0 - cos_theta) / 2.0)
    if r12 < SMALL_R12:
        warnings.warn(f"r12={r12:.3g} is nearly zero; ridge energy is dominated by 1/r12", RuntimeWarning)
        if r12 == 0.0:
            return math.inf
    return (2.0 / r) * (-2.0 + r / (2.0 * r12))


@dataclass(frozen=True)
class EnergyBreakdown:
    per_mode: tuple[float, float, float]
    total_sum_form: float
    total_closed_form: float

    @property
    def agreement(self) -> float:
        return abs(self.total_sum_form - self.total_closed_form)


def energy_sum_form(r: float, spectrum: ModeSpectrum) -> EnergyBreakdown:
    """Mode sum 2 (a / r12^3) sum_i c_i^2 / lambda_i with c_i = r * c_hat_i."""
    _check_r(r)
    cfg = spectrum.config
    r12 = cfg.rho * r
    terms = []
    for mode in spectrum.modes:
        if abs(mode.lambda_hat) < ZERO_EIGENVALUE_TOL:
            raise ZeroEigenvalueError(f"mode eigenvalue {mode.lambda_hat!r} vanishes")
        c_i = r * mode.c_hat
        terms.append(2.0 * c_i * c_i / (r12**3 * mode.lambda_hat))
    # the total is the plain sum of the listed terms
    total = terms[0] + terms[1] + terms[2]
    return EnergyBreakdown(tuple(terms), total, energy_closed_form(r, cfg))


def energy_quantum_form(spectrum: ModeSpectrum, r: float, quantum_numbers) -> float:
    """sum_i (a/r12)^(3/2) sqrt(lambda_i) N_i with N_i = i n_i for lambda_i < 0.

    Agrees with the other two forms only where every mode satisfies the
    quantisation relation, i.e. at an intersection of the radius surfaces.
    """
    _check_r(r)
    r12 = spectrum.config.rho * r
    total = 0.0
    for mode, n in zip(spectrum.modes, quantum_numbers):
        # sqrt(lambda) N is sqrt(|lambda|) n for either sign of lambda
        root = math.sqrt(abs(mode.lambda_hat)) * n
        total += math.copysign(root, mode.lambda_hat)
    return r12**-1.5 * total


def ridge_config(cos_theta: float) -> AngularConfig:
    return make_config(cos_theta, 1.0)
