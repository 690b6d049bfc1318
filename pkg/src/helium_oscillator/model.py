"""Constants, units, quantum numbers and the angular configuration.

Lengths are multiples of the Bohr radius ``a`` and energies are in hartree
everywhere inside the package; :func:`convert` is only used at I/O edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, QuantumNumberError, UnitError

HALF_INTEGER_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalConstants:
    bohr_radius_angstrom: float = 0.529177210903
    hartree_ev: float = 27.211386245988
    # E0 = hbar^2 / (2 m a^2) is one rydberg
    e0_hartree: float = 0.5


CONSTANTS = PhysicalConstants()

_UNIT_FACTORS = {
    ("hartree", "ev"): CONSTANTS.hartree_ev,
    ("bohr", "angstrom"): CONSTANTS.bohr_radius_angstrom,
}
_UNIT_ALIASES = {"ha": "hartree", "au": "hartree", "a0": "bohr", "a": "bohr", "aa": "angstrom", "å": "angstrom"}


def _unit(name: str) -> str:
    key = name.strip().lower()
    return _UNIT_ALIASES.get(key, key)


def convert(value: float, from_unit: str, to_unit: str) -> float:
    """Convert between hartree and eV, or between bohr and angstrom."""
    src, dst = _unit(from_unit), _unit(to_unit)
    if src == dst and any(src in pair for pair in _UNIT_FACTORS):
        return value
    if (src, dst) in _UNIT_FACTORS:
        return value * _UNIT_FACTORS[src, dst]
    if (dst, src) in _UNIT_FACTORS:
        return value / _UNIT_FACTORS[dst, src]
    raise UnitError(f"cannot convert {from_unit!r} to {to_unit!r}")


@dataclass(frozen=True)
class QuantumNumbers:
    """Magnitudes of the three oscillator quantum numbers.

    For a mode with a negative eigenvalue the oscillator number is imaginary,
    ``N = i*n``; only the magnitude ``n`` is stored here.
    """

    n1: float
    n2: float
    n3: float

    def __iter__(self):
        return iter((self.n1, self.n2, self.n3))

    def scaled(self, factor: float) -> "QuantumNumbers":
        return validate_quantum_numbers(*(factor * n for n in self))


def _check_half_integer(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise QuantumNumberError(f"{name}={value!r} is not finite")
    if value < 0.5 - HALF_INTEGER_TOL:
        raise QuantumNumberError(f"{name}={value!r} is below 1/2")
    twice = 2.0 * value
    if abs(twice - round(twice)) > HALF_INTEGER_TOL:
        raise QuantumNumberError(f"{name}={value!r} is not an integer or half-integer")


def validate_quantum_numbers(n1: float, n2: float, n3: float) -> QuantumNumbers:
    for name, value in (("n1", n1), ("n2", n2), ("n3", n3)):
        _check_half_integer(name, float(value))
    return QuantumNumbers(n1, n2, n3)


@dataclass(frozen=True)
class AngularConfig:
    """Electron geometry up to overall scale.

    ``tan_alpha`` is r1/r2 (outer over inner distance, r = r2) and
    ``rho`` is r12/r from the law of cosines.
    """

    cos_theta: float
    tan_alpha: float
    rho: float = field(init=False)

    def __post_init__(self):
        c, t = self.cos_theta, self.tan_alpha
        if not (math.isfinite(c) and -1.0 < c < 1.0):
            raise DomainError(f"cos_theta={c!r} must lie in (-1, 1)")
        if not (math.isfinite(t) and t >= 1.0):
            raise DomainError(f"tan_alpha={t!r} must be >= 1")
        # (t - c)^2 + sin^2 equals 1 + t^2 - 2tc without cancellation near c = t = 1
        object.__setattr__(self, "rho", math.sqrt((t - c) ** 2 + (1.0 - c) * (1.0 + c)))

    @property
    def sin_theta(self) -> float:
        # theta in (0, pi)
        return math.sqrt(1.0 - self.cos_theta * self.cos_theta)


def make_config(cos_theta: float, tan_alpha: float) -> AngularConfig:
    return AngularConfig(float(cos_theta), float(tan_alpha))
