"""Four-dimensional harmonic-oscillator model of the helium atom.

Given three oscillator quantum numbers, find the electron geometry where the
three radius surfaces meet and evaluate the energy there::

    >>> from helium_oscillator import solve_intersection
    >>> sol = solve_intersection((1, 1.5, 1.5))
    >>> round(sol.cos_theta, 4), round(sol.tan_alpha, 4), round(sol.energy_hartree, 4)
    (-0.2273, 1.2635, -2.8827)
"""
from .coupling import CouplingSystem, build_coupling, coupling_row_sums, zero_mode_vector
from .energy import EnergyBreakdown, energy_closed_form, energy_quantum_form, energy_sum_form, wannier_energy
from .errors import (
    AllUndefinedError,
    AmbiguousPairingError,
    ComplexRootsError,
    DegenerateCubicError,
    DomainError,
    FixtureFormatError,
    ModelError,
    NoConvergenceError,
    NoIntersectionError,
    NonSymmetricError,
    PoleError,
    QuantumNumberError,
    UnitError,
    ZeroEigenvalueError,
)
from .jacobi import NumericEigenResult, SpectrumMatch, match_spectra, symmetric_eigen_4x4
from .model import CONSTANTS, AngularConfig, PhysicalConstants, QuantumNumbers, convert, make_config, validate_quantum_numbers
from .spectrum import (
    Mode,
    ModeSpectrum,
    RelationReport,
    WannierSpectrum,
    analytic_spectrum,
    check_relations,
    cubic_coefficients,
    eigen_residuals,
    gamma1_of,
    mode_spectrum,
    solve_cubic,
    wannier_spectrum,
)
from .surfaces import (
    SearchDomain,
    Solution,
    SolveOptions,
    grid_scan,
    radius_surface,
    sample_surfaces,
    solve_intersection,
    try_solve,
)

__version__ = "0.1.0"

__all__ = [
    "AllUndefinedError",
    "AmbiguousPairingError",
    "AngularConfig",
    "CONSTANTS",
    "ComplexRootsError",
    "CouplingSystem",
    "DegenerateCubicError",
    "DomainError",
    "EnergyBreakdown",
    "FixtureFormatError",
    "Mode",
    "ModeSpectrum",
    "ModelError",
    "NoConvergenceError",
    "NoIntersectionError",
    "NonSymmetricError",
    "NumericEigenResult",
    "PhysicalConstants",
    "PoleError",
    "QuantumNumberError",
    "QuantumNumbers",
    "RelationReport",
    "SearchDomain",
    "Solution",
    "SolveOptions",
    "SpectrumMatch",
    "UnitError",
    "WannierSpectrum",
    "ZeroEigenvalueError",
    "analytic_spectrum",
    "build_coupling",
    "check_relations",
    "convert",
    "coupling_row_sums",
    "cubic_coefficients",
    "eigen_residuals",
    "energy_closed_form",
    "energy_quantum_form",
    "energy_sum_form",
    "gamma1_of",
    "grid_scan",
    "make_config",
    "match_spectra",
    "mode_spectrum",
    "radius_surface",
    "sample_surfaces",
    "solve_cubic",
    "solve_intersection",
    "symmetric_eigen_4x4",
    "try_solve",
    "validate_quantum_numbers",
    "wannier_energy",
    "wannier_spectrum",
    "zero_mode_vector",
]
