"""Closed-form eigen-decomposition of the coupling matrix.

Every nonzero mode is parametrised by two numbers (gamma1, gamma2); gamma2
solves a cubic whose coefficients depend only on (cos theta, tan alpha),
gamma1 follows from a rational expression in gamma2, and the eigenvalue,
eigenvector and projection of the linear vector are explicit in both.
On the Wannier ridge (tan alpha = 1) the cubic degenerates and separate
closed forms are used.

The array functions (``*_array``) broadcast over arrays of configurations
and mark failures with NaN instead of raising; the grid scan is built on
them. The scalar functions wrap them and raise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import build_coupling, zero_mode_vector
from .errors import ComplexRootsError, DegenerateCubicError, PoleError
from .model import AngularConfig, make_config

WANNIER_EPS = 1e-7
DEGENERATE_TOL = 1e-14
COMPLEX_TOL = 1e-10
POLE_TOL = 1e-13


@dataclass(frozen=True)
class Mode:
    gamma1: float
    gamma2: float
    xi: float
    lambda_hat: float
    eigvec: np.ndarray
    c_hat: float


@dataclass(frozen=True)
class ModeSpectrum:
    config: AngularConfig
    modes: tuple[Mode, Mode, Mode]
    zero_mode_eigvec: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([m.lambda_hat for m in self.modes])

    @property
    def c_hats(self) -> np.ndarray:
        return np.array([m.c_hat for m in self.modes])

    def eigenvectors(self) -> np.ndarray:
        """Columns are the three mode eigenvectors followed by the zero mode."""
        return np.column_stack([m.eigvec for m in self.modes] + [self.zero_mode_eigvec])


@dataclass(frozen=True)
class WannierSpectrum(ModeSpectrum):
    beta: float = math.nan
    gamma_plus: float = math.nan
    gamma_minus: float = math.nan

    @property
    def cos_theta(self) -> float:
        return self.config.cos_theta


# ---------------------------------------------------------------------------
# array core


def _trig(c, t):
    c = np.asarray(c, dtype=float)
    t = np.asarray(t, dtype=float)
    s = np.sqrt((1.0 - c) * (1.0 + c))
    rho = np.sqrt((t - c) ** 2 + s * s)
    return c, s, t, rho


def cubic_coefficients_array(c, t):
    """Coefficients (a3, a2, a1, a0) of the cubic in gamma2, term by term."""
    c, s, t, rho = _trig(c, t)
    d = t - c
    u = 1.0 - t**3
    p = 1.0 - t * c
    # the bracket shared by the gamma2 and gamma2^2 terms
    k = -2.0 * rho**5 * t**-4 + d * d / t - s * s / t - s * s * t + t**-4 * p * p
    w = t**-2 + 1.0

    a0 = -s * s * u * t**3 * d * d
    a1 = (s / t * p * p + s * t**5 * d * d) * d - t**3 * s * u * k * d
    a2 = t**3 * s * s * u * w * d * d + t**5 * k * d * d
    a3 = -(t**5) * s * w * d**3
    return a3, a2, a1, a0


def solve_cubic_array(a3, a2, a1, a0, newton_steps: int = 1):
    """Three real roots of a3 x^3 + a2 x^2 + a1 x + a0, last axis of length 3.

    Trigonometric (Viete) roots of the depressed cubic, then Newton polish on
    the original polynomial. Entries whose discriminant says fewer than three
    real roots are NaN.
    """
    a3, a2, a1, a0 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a3, a2, a1, a0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        b, cc, dd = a2 / a3, a1 / a3, a0 / a3
        p = cc - b * b / 3.0
        q = 2.0 * b**3 / 27.0 - b * cc / 3.0 + dd
        disc = -(4.0 * p**3 + 27.0 * q * q)
        scale = 4.0 * np.abs(p) ** 3 + 27.0 * q * q
        real = (disc >= -COMPLEX_TOL * scale) & (p <= 0.0)

        m = 2.0 * np.sqrt(np.maximum(-p / 3.0, 0.0))
        arg = np.where(m > 0.0, 3.0 * q / (p * m), 0.0)
        phi = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
        k = np.arange(3) * (2.0 * np.pi / 3.0)
        roots = m[..., None] * np.cos(phi[..., None] - k) - (b / 3.0)[..., None]

        for _ in range(newton_steps):
            f = ((a3[..., None] * roots + a2[..., None]) * roots + a1[..., None]) * roots + a0[..., None]
            df = (3.0 * a3[..., None] * roots + 2.0 * a2[..., None]) * roots + a1[..., None]
            step = np.where(df != 0.0, f / df, 0.0)
            roots = roots - step
    return np.where(real[..., None], roots, np.nan)


def _gamma1_parts(g2, c, s, t):
    d = t - c
    u = 1.0 - t**3
    p = 1.0 - t * c
    numer = u * p * s
    denom = d * d * t**5 * g2 - t**3 * s * u * d
    return numer, denom, p / (d * t**3)


def gamma1_array(g2, c, t):
    c, s, t, _ = _trig(c, t)
    numer, denom, tail = _gamma1_parts(g2, c, s, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        return numer / denom + tail


def _second_relation(g2, c, s, t, rho):
    """t^3 G(gamma2) / s, which equals -(1 - t cos) * gamma1 at every root."""
    d = t - c
    p = 1.0 - t * c
    k = -2.0 * rho**5 * t**-4 + d * d / t - s * s / t - s * s * t + t**-4 * p * p
    w = t**-2 + 1.0
    terms = (s * d, k * g2, -s * w * d * g2 * g2)
    scale = np.abs(terms[0]) + np.abs(terms[1]) + np.abs(terms[2])
    return t**3 * (terms[0] + terms[1] + terms[2]) / s, t**3 * scale / s


def general_modes_array(c, t):
    """Unordered modes for arrays of configs in the general branch.

    Returns a dict of arrays with a trailing axis of length 3: ``gamma1``,
    ``gamma2``, ``xi``, ``lambda_hat``, ``c_hat`` and ``norm2`` (the squared
    length of the unnormalised eigenvector).

    gamma1 has two exact expressions: the rational one in gamma2, which loses
    all precision when a root approaches its pole, and the second quadratic
    relation solved for gamma1, which loses precision only as 1 - t cos -> 0.
    Each root takes whichever has the smaller first-order rounding estimate.
    xi only needs (1 - t cos) * gamma1 and uses the second relation directly.
    """
    eps = np.finfo(float).eps
    c, s, t, rho = _trig(c, t)
    g2 = solve_cubic_array(*cubic_coefficients_array(c, t))
    c_, s_, t_, rho_ = c[..., None], s[..., None], t[..., None], rho[..., None]
    p = 1.0 - t_ * c_

    tg, tg_scale = _second_relation(g2, c_, s_, t_, rho_)
    numer, denom, tail = _gamma1_parts(g2, c_, s_, t_)
    pole = t_**3 * s_ * (1.0 - t_**3) * (t_ - c_)
    with np.errstate(divide="ignore", invalid="ignore"):
        g1_rational = numer / denom + tail
        g1_relation = -tg / p
        err_rational = np.abs(numer) * eps * (np.abs(denom) + 2.0 * np.abs(pole)) / denom**2
        err_relation = (tg_scale + np.abs(tg)) * eps / np.abs(p)
    use_rational = ~(err_relation < err_rational)
    g1 = np.where(use_rational, g1_rational, g1_relation)

    xi = t_ - c_ - tg - s_ * (t_ + 1.0 / t_) * g2
    norm2 = 1.0 + g1 * g1 + (1.0 + t_**-2) * g2 * g2
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = -(2.0 / rho_**2) * s_ * t_ * xi / g2
        chat = (2.0 * rho_**3 * (t_**-2 - g1) + xi) / np.sqrt(norm2)
    return {"gamma1": g1, "gamma2": g2, "xi": xi, "lambda_hat": lam, "c_hat": chat, "norm2": norm2}


def mode_order_array(lam, g2):
    """Permutation applying the mode-assignment policy along the last axis.

    Slot 0 takes the most negative eigenvalue. Slots 1 and 2 take the other
    two modes by ascending gamma2; this matches the published asymmetric
    entries (n2 and n3 are not interchangeable).
    """
    lam = np.asarray(lam, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    first = np.nanargmin(np.where(np.isnan(lam), np.inf, lam), axis=-1)
    rest = np.where(np.arange(3) == first[..., None], np.inf, g2)
    rest = np.where(np.isnan(rest), np.inf, rest)
    order = np.argsort(rest, axis=-1, kind="stable")
    out = np.empty(lam.shape, dtype=int)
    out[..., 0] = first
    out[..., 1] = order[..., 0]
    out[..., 2] = order[..., 1]
    return out


def ordered_modes_array(c, t):
    modes = general_modes_array(c, t)
    order = mode_order_array(modes["lambda_hat"], modes["gamma2"])
    return {k: np.take_along_axis(v, order, axis=-1) for k, v in modes.items()}


# ---------------------------------------------------------------------------
# scalar API


def cubic_coefficients(config: AngularConfig) -> tuple[float, float, float, float]:
    coeffs = tuple(float(x) for x in cubic_coefficients_array(config.cos_theta, config.tan_alpha))
    if abs(coeffs[0]) < DEGENERATE_TOL * max(abs(x) for x in coeffs):
        raise DegenerateCubicError(f"leading coefficient vanishes at {config}")
    return coeffs


def solve_cubic(coeffs) -> tuple[float, float, float]:
    a3, a2, a1, a0 = (float(x) for x in coeffs)
    if a3 == 0.0:
        raise DegenerateCubicError("leading coefficient is zero")
    roots = solve_cubic_array(a3, a2, a1, a0)
    if np.isnan(roots).any():
        raise ComplexRootsError(f"cubic {coeffs!r} has fewer than three real roots")
    return tuple(float(x) for x in roots)


def gamma1_of(gamma2: float, config: AngularConfig) -> float:
    c, s, t = config.cos_theta, config.sin_theta, config.tan_alpha
    numer, denom, tail = _gamma1_parts(gamma2, c, s, t)
    scale = abs(numer) + abs(d2 := (t - c) ** 2 * t**5 * gamma2) + abs(denom - d2)
    if abs(denom) <= POLE_TOL * scale:
        raise PoleError(f"gamma2={gamma2!r} sits on the gamma1 pole at {config}")
    return numer / denom + tail


def _eigvec(g1: float, g2: float, config: AngularConfig) -> np.ndarray:
    c, s, t = config.cos_theta, config.sin_theta, config.tan_alpha
    v = np.array([1.0, g2 / t, c * g1 + s * g2, s * g1 - c * g2])
    return v / np.linalg.norm(v)


def order_modes(modes) -> tuple[Mode, Mode, Mode]:
    modes = list(modes)
    idx = mode_order_array([m.lambda_hat for m in modes], [m.gamma2 for m in modes])
    return tuple(modes[i] for i in idx)


def analytic_spectrum(config: AngularConfig) -> ModeSpectrum:
    """Closed-form spectrum away from the Wannier ridge."""
    cubic_coefficients(config)
    arrays = general_modes_array(config.cos_theta, config.tan_alpha)
    if np.isnan(arrays["gamma2"]).any():
        raise ComplexRootsError(f"spectral cubic has complex roots at {config}")
    if not np.isfinite(arrays["gamma1"]).all():
        raise PoleError(f"gamma1 is unbounded at {config}")
    modes = []
    for i in range(3):
        g1, g2 = float(arrays["gamma1"][i]), float(arrays["gamma2"][i])
        modes.append(
            Mode(
                g1,
                g2,
                float(arrays["xi"][i]),
                float(arrays["lambda_hat"][i]),
                _eigvec(g1, g2, config),
                float(arrays["c_hat"][i]),
            )
        )
    return ModeSpectrum(config, order_modes(modes), zero_mode_vector(config))


def wannier_beta(cos_theta: float) -> float:
    s = math.sqrt((1.0 - cos_theta) * (1.0 + cos_theta))
    half = math.sqrt((1.0 - cos_theta) / 2.0)
    return (16.0 * half**3 + 2.0 * cos_theta) / -s


def wannier_spectrum(cos_theta: float) -> WannierSpectrum:
    """Spectrum on the ridge r1 = r2.

    Eigenvalues and projections follow the ridge closed forms. Each stored
    eigenvector is the negative of the printed one, so that ``c_hat`` equals
    ``eigvec @ c_vector`` as it does in the general branch.
    """
    config = make_config(cos_theta, 1.0)
    c, s, rho = config.cos_theta, config.sin_theta, config.rho
    beta = wannier_beta(c)
    # (beta/2)(1 + sqrt(1 + 4/beta^2)) is the larger-magnitude root; the
    # other comes from the product -1 to avoid cancellation
    g_plus = beta / 2.0 + math.copysign(math.sqrt(beta * beta / 4.0 + 1.0), beta)
    g_minus = -1.0 / g_plus

    e1 = -np.array([1.0, 0.0, -c, -s]) / math.sqrt(2.0)
    modes = [Mode(-1.0, 0.0, 0.0, -4.0 * rho**3, e1, -2.0 * math.sqrt(2.0) * rho**3)]
    for g in (g_plus, g_minus):
        h = 1.0 - c - s * g
        lam = -4.0 / rho**2 * s * h / g
        chat = -math.sqrt(2.0) * h / math.sqrt(g * g + 1.0)
        vec = -np.array([1.0, g, c + s * g, s - c * g]) / (math.sqrt(2.0) * math.sqrt(g * g + 1.0))
        xi = 2.0 * (1.0 - c) - 2.0 * s * g
        modes.append(Mode(1.0, g, xi, lam, vec, chat))
    return WannierSpectrum(
        config, order_modes(modes), zero_mode_vector(config), beta=beta, gamma_plus=g_plus, gamma_minus=g_minus
    )


def mode_spectrum(config: AngularConfig) -> ModeSpectrum:
    """Spectrum for any config, switching to the ridge forms near tan alpha = 1."""
    if abs(config.tan_alpha - 1.0) < WANNIER_EPS:
        return wannier_spectrum(config.cos_theta)
    return analytic_spectrum(config)


def eigen_residuals(spectrum: ModeSpectrum) -> np.ndarray:
    """||C^2 e - lambda e|| for the three modes and the zero mode."""
    matrix = build_coupling(spectrum.config).c2_matrix
    out = [np.linalg.norm(matrix @ m.eigvec - m.lambda_hat * m.eigvec) for m in spectrum.modes]
    out.append(np.linalg.norm(matrix @ spectrum.zero_mode_eigvec))
    return np.array(out)


# ---------------------------------------------------------------------------
# identities among the gammas


@dataclass(frozen=True)
class RelationReport:
    """Absolute deviations of the mode-sum identities from their stated values.

    ``sums`` holds the nine weighted sums in order, ``targets`` the values they
    should equal, ``deviations`` the absolute differences. ``orthogonality``
    holds the three pairwise orthogonality residuals. ``weight`` records which
    quadratic form was used as the denominator. ``scales`` is the sum of the
    absolute values of the terms in each sum; near rho -> 0 the terms grow
    large and cancel, so deviations are only meaningful relative to it.
    """

    sums: tuple[float, ...]
    targets: tuple[float, ...]
    deviations: tuple[float, ...]
    orthogonality: tuple[float, float, float]
    weight: str
    scales: tuple[float, ...] = ()

    def within(self, tol: float) -> bool:
        ok = all(dev <= tol * max(1.0, sc) for dev, sc in zip(self.deviations, self.scales))
        return ok and all(o <= tol for o in self.orthogonality)

    @property
    def max_deviation(self) -> float:
        return max(self.deviations + self.orthogonality)

    def named(self) -> dict[str, float]:
        names = RELATION_NAMES + ("orth_12", "orth_13", "orth_23")
        return dict(zip(names, self.deviations + self.orthogonality))


RELATION_NAMES = (
    "sum_1",
    "sum_g1",
    "sum_g2",
    "sum_g1g1",
    "sum_g2g2",
    "sum_g1g2",
    "sum_g1g2_over_xi",
    "sum_g2_over_xi",
    "sum_g1g1g2_over_xi",
)


def check_relations(spectrum: ModeSpectrum, weight: str = "inverse") -> RelationReport:
    """Evaluate the mode-sum identities on a general-branch spectrum.

    ``weight="inverse"`` uses 1 + g1^2 + (1 + tan^-2 alpha) g2^2, the squared
    eigenvector length; ``weight="direct"`` uses 1 + g1^2 + (1 + tan^2 alpha) g2^2.
    Only the first makes the identities hold away from the ridge.
    """
    cfg = spectrum.config
    s, t, rho = cfg.sin_theta, cfg.tan_alpha, cfg.rho
    g1 = np.array([m.gamma1 for m in spectrum.modes])
    g2 = np.array([m.gamma2 for m in spectrum.modes])
    xi = np.array([m.xi for m in spectrum.modes])
    if weight == "inverse":
        k = 1.0 + t**-2
    elif weight == "direct":
        k = 1.0 + t**2
    else:
        raise ValueError(f"unknown weight {weight!r}")
    w = 1.0 / (1.0 + g1 * g1 + k * g2 * g2)

    terms = (
        w,
        g1 * w,
        g2 * w,
        g1 * g1 * w,
        g2 * g2 * w,
        g1 * g2 * w,
        g1 * g2 * w / xi,
        g2 * w / xi,
        g1 * g1 * g2 * w / xi,
    )
    sums = tuple(float(np.sum(x)) for x in terms)
    scales = tuple(float(np.sum(np.abs(x))) for x in terms)
    targets = (
        1.0,
        0.0,
        0.0,
        1.0,
        t * t / (1.0 + t * t),
        0.0,
        0.0,
        s * t**4 / (2.0 * rho**5),
        s * t / (2.0 * rho**5),
    )
    kk = 1.0 + t**-2
    orth = tuple(
        float(abs(1.0 + g1[i] * g1[j] + kk * g2[i] * g2[j])) for i, j in ((0, 1), (0, 2), (1, 2))
    )
    deviations = tuple(abs(a - b) for a, b in zip(sums, targets))
    return RelationReport(sums, targets, deviations, orth, weight, scales)
