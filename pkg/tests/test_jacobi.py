import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from conftest import random_configs
from helium_oscillator import (
    AmbiguousPairingError,
    NonSymmetricError,
    analytic_spectrum,
    build_coupling,
    make_config,
    match_spectra,
    symmetric_eigen_4x4,
    wannier_spectrum,
)
from helium_oscillator.jacobi import NumericEigenResult, numeric_from_spectrum


def reconstruction_error(result, matrix):
    v, lam = result.eigenvectors, result.eigenvalues
    return np.linalg.norm(v @ np.diag(lam) @ v.T - matrix)


def test_diagonal_input():
    res = symmetric_eigen_4x4(np.diag([3.0, 1.0, 4.0, 1.0]))
    assert res.eigenvalues.tolist() == [1.0, 1.0, 3.0, 4.0]
    assert res.sweeps == 0


def test_rejects_non_square():
    with pytest.raises(ValueError):
        symmetric_eigen_4x4(np.eye(3))


def test_rejects_asymmetric():
    m = np.eye(4)
    m[0, 1] = 1e-6
    with pytest.raises(NonSymmetricError):
        symmetric_eigen_4x4(m)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-1e3, 1e3)))
def test_reconstruction_of_random_symmetric(a):
    m = a + a.T
    res = symmetric_eigen_4x4(m)
    norm = max(np.linalg.norm(m), 1e-300)
    assert reconstruction_error(res, m) <= 1e-12 * norm + 1e-300
    assert np.allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(4), atol=1e-12)
    assert np.all(np.diff(res.eigenvalues) >= 0)


def test_matches_lapack_on_coupling_matrix():
    m = build_coupling(make_config(0.3, 2.5)).c2_matrix
    ours = symmetric_eigen_4x4(m).eigenvalues
    ref, _ = oracles.lapack_eigen(m)
    assert np.allclose(ours, ref, rtol=0, atol=1e-12 * np.linalg.norm(m))


def test_is_deterministic():
    m = build_coupling(make_config(-0.4, 3.3)).c2_matrix
    a, b = symmetric_eigen_4x4(m), symmetric_eigen_4x4(m.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_ground_state_has_zero_mode():
    m = build_coupling(make_config(-0.22725, 1.2635)).c2_matrix
    res = symmetric_eigen_4x4(m)
    assert np.min(np.abs(res.eigenvalues)) <= 1e-12 * np.linalg.norm(m)


def test_ground_state_match():
    cfg = make_config(-0.22725, 1.2635)
    match = match_spectra(analytic_spectrum(cfg), symmetric_eigen_4x4(build_coupling(cfg).c2_matrix))
    assert match.max_eigenvalue_deviation <= 1e-9
    assert len(match.pairs) == 4


def test_self_pairing_is_exact():
    spec = analytic_spectrum(make_config(0.1, 4.0))
    match = match_spectra(spec, numeric_from_spectrum(spec))
    assert match.max_eigenvalue_deviation == 0.0
    assert match.max_sin_angle == pytest.approx(0.0, abs=1e-7)


def test_sign_flips_do_not_matter():
    cfg = make_config(-0.6, 1.8)
    spec = analytic_spectrum(cfg)
    num = symmetric_eigen_4x4(build_coupling(cfg).c2_matrix)
    flipped = NumericEigenResult(num.eigenvalues, -num.eigenvectors, num.sweeps)
    assert match_spectra(spec, num).pairs == match_spectra(spec, flipped).pairs


def test_ambiguous_pairing():
    spec = analytic_spectrum(make_config(0.1, 4.0))
    # rotate two numeric vectors 45 degrees into each other with distinct eigenvalues
    base = numeric_from_spectrum(spec)
    vecs = base.eigenvectors.copy()
    a, b = vecs[:, 0].copy(), vecs[:, 1].copy()
    vecs[:, 0], vecs[:, 1] = (a + b) / np.sqrt(2), (a - b) / np.sqrt(2)
    with pytest.raises(AmbiguousPairingError):
        match_spectra(spec, NumericEigenResult(base.eigenvalues, vecs, 0))


def test_ridge_against_numeric():
    for c in np.linspace(-0.99, 0.99, 41):
        w = wannier_spectrum(c)
        num = symmetric_eigen_4x4(build_coupling(w.config).c2_matrix)
        assert match_spectra(w, num).max_eigenvalue_deviation <= 1e-10


def test_random_configs_match(rng):
    for c, t in random_configs(rng, 1000):
        cfg = make_config(c, t)
        m = build_coupling(cfg).c2_matrix
        match = match_spectra(analytic_spectrum(cfg), symmetric_eigen_4x4(m))
        assert match.max_eigenvalue_deviation <= 1e-9 * np.linalg.norm(m)
