import math

import pytest
from hypothesis import given, strategies as st

import oracles
from helium_oscillator import (
    CONSTANTS,
    DomainError,
    QuantumNumberError,
    QuantumNumbers,
    UnitError,
    convert,
    make_config,
    validate_quantum_numbers,
)


def test_ground_state_numbers_accepted():
    n = validate_quantum_numbers(1, 1.5, 1.5)
    assert tuple(n) == (1, 1.5, 1.5)


@pytest.mark.parametrize("bad", [(0.25, 1, 1), (1, 0, 1), (1, 1, -0.5), (1, 1.2, 1), (math.nan, 1, 1), (1, math.inf, 1)])
def test_rejects_non_half_integers(bad):
    with pytest.raises(QuantumNumberError):
        validate_quantum_numbers(*bad)


def test_top_of_table_range():
    assert validate_quantum_numbers(5, 5, 5) == QuantumNumbers(5, 5, 5)


@given(st.integers(1, 400), st.integers(1, 400), st.integers(1, 400))
def test_accepts_every_half_integer(a, b, c):
    n = validate_quantum_numbers(a / 2, b / 2, c / 2)
    assert tuple(n) == (a / 2, b / 2, c / 2)


@given(st.floats(0.5, 200, allow_nan=False))
def test_accepts_only_half_integers(x):
    twice = 2 * x
    ok = abs(twice - round(twice)) <= 1e-12
    if ok:
        validate_quantum_numbers(x, 1, 1)
    else:
        with pytest.raises(QuantumNumberError):
            validate_quantum_numbers(x, 1, 1)


def test_scaled_numbers():
    assert QuantumNumbers(1, 1.5, 1.5).scaled(2) == QuantumNumbers(2, 3, 3)


def test_perpendicular_equal_radii():
    assert make_config(0, 1).rho == pytest.approx(math.sqrt(2), rel=1e-15)


def test_rho_at_ground_state_config():
    cfg = make_config(-0.22725, 1.2635)
    assert cfg.rho == pytest.approx(oracles.RHO_GROUND, rel=1e-15)
    assert cfg.rho == pytest.approx(1.78065, abs=1e-5)


def test_rho_in_degenerate_corner():
    # the corner is where 1 + t^2 - 2tc cancels hardest
    cfg = make_config(0.99999, 1.00001)
    assert cfg.rho == pytest.approx(oracles.RHO_CORNER, rel=1e-12)


@given(st.floats(-0.99999, 0.99999), st.floats(1.0, 10.0))
def test_rho_matches_high_precision(c, t):
    cfg = make_config(c, t)
    assert cfg.rho == pytest.approx(float(oracles.rho_hp(c, t)), rel=1e-13)
    assert cfg.rho**2 - (1 + t * t - 2 * t * c) == pytest.approx(0, abs=1e-13 * (1 + t * t))


@pytest.mark.parametrize("c,t", [(1.0, 2.0), (-1.0, 2.0), (1.5, 2.0), (0.0, 0.999), (math.nan, 2.0)])
def test_config_domain(c, t):
    with pytest.raises(DomainError):
        make_config(c, t)


def test_config_is_immutable():
    cfg = make_config(0.1, 2.0)
    with pytest.raises(AttributeError):
        cfg.cos_theta = 0.2


def test_ground_energy_in_ev():
    assert convert(-2.8827, "hartree", "ev") == pytest.approx(-78.44, abs=0.01)


def test_zero_converts_to_zero():
    assert convert(0.0, "hartree", "ev") == 0.0


def test_bohr_to_angstrom():
    assert convert(1.0, "bohr", "angstrom") == pytest.approx(0.529177, abs=1e-6)
    assert CONSTANTS.bohr_radius_angstrom == 0.529177210903


@given(st.floats(-1e6, 1e6, allow_nan=False), st.sampled_from([("hartree", "ev"), ("bohr", "angstrom")]))
def test_conversion_round_trip(x, pair):
    u, v = pair
    assert convert(convert(x, u, v), v, u) == pytest.approx(x, rel=4e-16, abs=1e-300)


def test_unknown_unit_pair():
    with pytest.raises(UnitError):
        convert(1.0, "hartree", "angstrom")
