"""Dimensionless turbulence energy spectrum and temporal correlation model.

The energy spectrum is a C^2 piecewise model: a quartic-to-sextic polynomial
rise below the first transition wavenumber ``kappa1``, the Kolmogorov
``kappa^(-5/3)`` inertial range between ``kappa1`` and ``kappa2``, and a
``kappa^(-7..-9)`` dissipation tail above ``kappa2``.  The transition
wavenumbers are fixed implicitly by two integral constraints,

    integral E(kappa) dkappa = 1,
    integral kappa^2 E(kappa) dkappa = 1 / (2 zeta),

which tie the spectrum to the turbulent kinetic energy and dissipation rate
of a k-epsilon flow description through the dimensionless viscosity
``zeta = eps * nu / k^2``.  All regularity coefficients are exact rationals;
this module keeps them exact and exposes closed-form piecewise
antiderivatives, which downstream sampling relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError

__all__ = [
    "SpectrumCoefficients",
    "SpectrumModel",
    "TemporalModel",
    "reduced_coefficients",
    "critical_zeta",
    "solve_transition_wavenumbers",
    "build_model",
    "constraint_residuals",
    "energy_spectrum",
    "energy_cdf",
    "branch_masses",
    "spectral_density_sw",
    "spectral_cdf_sw",
    "temporal_correlation",
    "temporal_spectral_density",
    "correlation_trace",
    "surrogate_autocovariance",
]

#: Default dimensionless turbulent large-scale time.
T_LARGE_DEFAULT = 0.212


@dataclass(frozen=True)
class SpectrumCoefficients:
    """Exact rational coefficients of the piecewise energy spectrum.

    ``a4 + a5 + a6 = 1`` and ``b7 + b8 + b9 = 1`` force continuity of the
    spectrum at the transition wavenumbers.  The reduced coefficients
    ``a_hat1/a_hat2/b_hat1/b_hat2`` are the moment sums through which the
    integral constraints become the two-equation nonlinear system solved by
    :func:`solve_transition_wavenumbers`.
    """

    a4: Fraction
    a5: Fraction
    a6: Fraction
    b7: Fraction
    b8: Fraction
    b9: Fraction
    c_k: Fraction
    a_hat1: Fraction
    a_hat2: Fraction
    b_hat1: Fraction
    b_hat2: Fraction

    @property
    def low_poly(self) -> tuple[Fraction, Fraction, Fraction]:
        """Polynomial coefficients (kappa^4, kappa^5, kappa^6 terms)."""
        return (self.a4, self.a5, self.a6)

    @property
    def high_poly(self) -> tuple[Fraction, Fraction, Fraction]:
        """Polynomial coefficients (kappa^-7, kappa^-8, kappa^-9 terms)."""
        return (self.b7, self.b8, self.b9)


def reduced_coefficients(
    a: tuple[Fraction, Fraction, Fraction] = (
        Fraction(230, 9),
        Fraction(-391, 9),
        Fraction(170, 9),
    ),
    b: tuple[Fraction, Fraction, Fraction] = (
        Fraction(209, 9),
        Fraction(-352, 9),
        Fraction(152, 9),
    ),
    c_k: Fraction = Fraction(1, 2),
) -> SpectrumCoefficients:
    """Build the coefficient set, deriving the reduced moment sums exactly.

    The reduced coefficients are

        a_hat1 = 3/2 + sum_j a_j / (j + 1),   a_hat2 = 3/4 - sum_j a_j / (j + 3)

    over j = 4..6, and

        b_hat1 = 3/2 - sum_j b_j / (j - 1),   b_hat2 = 3/4 + sum_j b_j / (j - 3)

    over j = 7..9, evaluated in exact rational arithmetic.
    """
    a = tuple(Fraction(x) for x in a)
    b = tuple(Fraction(x) for x in b)
    c_k = Fraction(c_k)
    if sum(a) != 1 or sum(b) != 1:
        raise DomainError(
            f"regularity coefficients must each sum to 1 for continuity, "
            f"got sum(a)={sum(a)}, sum(b)={sum(b)}"
        )
    a_hat1 = Fraction(3, 2) + sum(aj / (j + 1) for j, aj in zip((4, 5, 6), a))
    a_hat2 = Fraction(3, 4) - sum(aj / (j + 3) for j, aj in zip((4, 5, 6), a))
    b_hat1 = Fraction(3, 2) - sum(bj / (j - 1) for j, bj in zip((7, 8, 9), b))
    b_hat2 = Fraction(3, 4) + sum(bj / (j - 3) for j, bj in zip((7, 8, 9), b))
    return SpectrumCoefficients(*a, *b, c_k, a_hat1, a_hat2, b_hat1, b_hat2)


_STANDARD = reduced_coefficients()


def critical_zeta(coeffs: SpectrumCoefficients = _STANDARD) -> float:
    """Upper bound of the admissible viscosity ratio.

    Finite, distinct transition wavenumbers exist exactly for
    ``0 < zeta < zeta_crit`` with

        zeta_crit = 1 / (2 c_k^3 (b_hat2 - a_hat2) (b_hat1 - a_hat1)^2).
    """
    zc = 1 / (
        2
        * coeffs.c_k**3
        * (coeffs.b_hat2 - coeffs.a_hat2)
        * (coeffs.b_hat1 - coeffs.a_hat1) ** 2
    )
    return float(zc)


@dataclass(frozen=True)
class SpectrumModel:
    """A solved spectrum: coefficients, viscosity ratio, transition wavenumbers.

    ``kappa2`` is ``math.inf`` exactly when ``zeta == 0`` (no dissipation
    cutoff); every consumer branches on ``math.isinf(kappa2)`` rather than
    comparing against a large float.
    """

    coeffs: SpectrumCoefficients
    zeta: float
    kappa1: float
    kappa2: float

    def __post_init__(self):
        if not 0.0 <= self.zeta < critical_zeta(self.coeffs):
            raise DomainError(f"zeta={self.zeta} outside [0, zeta_crit)")
        if not 0.0 < self.kappa1 < self.kappa2:
            raise DomainError("transition wavenumbers must satisfy 0 < kappa1 < kappa2")
        if math.isinf(self.kappa2) != (self.zeta == 0.0):
            raise DomainError("kappa2 must be infinite exactly for zeta == 0")


@dataclass(frozen=True)
class TemporalModel:
    """Gaussian decay of the temporal correlations, phi(t) = exp(-t^2/(2 t_large^2))."""

    t_large: float = T_LARGE_DEFAULT

    def __post_init__(self):
        if self.t_large <= 0.0:
            raise DomainError("t_large must be positive")


def solve_transition_wavenumbers(
    zeta: float,
    coeffs: SpectrumCoefficients = _STANDARD,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Solve the two integral constraints for (kappa1, kappa2).

    Substituting ``x = kappa1^(-2/3)`` and ``y = kappa2^(-2/3)`` makes the
    first constraint linear,

        a_hat1 x - b_hat1 y = 1 / c_k,

    leaving a scalar equation in y for the second; that equation is strictly
    monotone on the admissible interval and is solved with a safeguarded
    Newton iteration (bisection fallback) on a guaranteed bracket.

    Parameters
    ----------
    zeta : float
        Dimensionless viscosity ratio, ``0 <= zeta < zeta_crit``.
    tol : float
        Bound on both (relative) residuals of the constraint system.

    Returns
    -------
    (kappa1, kappa2) : tuple of float
        ``kappa2 = math.inf`` for ``zeta = 0``.
    """
    zc = critical_zeta(coeffs)
    if not 0.0 <= zeta < zc:
        raise DomainError(f"zeta={zeta} outside admissible range [0, {zc:.6g})")

    c_k = float(coeffs.c_k)
    a1, a2 = float(coeffs.a_hat1), float(coeffs.a_hat2)
    b1, b2 = float(coeffs.b_hat1), float(coeffs.b_hat2)

    if zeta == 0.0:
        return (c_k * a1) ** 1.5, math.inf

    rhs = 1.0 / (2.0 * c_k * zeta)

    def x_of(y):
        return (1.0 / c_k + b1 * y) / a1

    def g(y):
        return b2 / y**2 - a2 / x_of(y) ** 2 - rhs

    def dg(y):
        return -2.0 * b2 / y**3 + 2.0 * a2 * (b1 / a1) / x_of(y) ** 3

    # Bracket: g is strictly decreasing; at the zeta_crit limit x = y and
    # g < 0, while a_hat2/x^2 <= a_hat2 (c_k a_hat1)^2 gives a y below which
    # g >= 0.
    y_hi = 1.0 / (c_k * (a1 - b1))
    y_lo = math.sqrt(b2 / (rhs + a2 * (c_k * a1) ** 2))
    lo, hi = y_lo, y_hi

    y = 0.5 * (lo + hi)
    converged = False
    for _ in range(max_iter):
        gy = g(y)
        if gy > 0.0:
            lo = y
        else:
            hi = y
        step = gy / dg(y)
        y_next = y - step
        if not lo < y_next < hi:
            y_next = 0.5 * (lo + hi)
        y = y_next
        if abs(g(y)) <= tol * max(1.0, rhs):
            converged = True
            break

    x = x_of(y)
    res1 = abs(a1 * x - b1 * y - 1.0 / c_k)
    res2 = abs(b2 / y**2 - a2 / x**2 - rhs) / max(1.0, rhs)
    if not converged or res1 > tol or res2 > tol:
        raise NumericalError(
            f"transition wavenumber iteration did not reach tol={tol}",
            zeta=zeta,
            residuals=(res1, res2),
        )
    return x ** -1.5, y ** -1.5


def build_model(
    zeta: float,
    coeffs: SpectrumCoefficients = _STANDARD,
    tol: float = 1e-12,
) -> SpectrumModel:
    """Solve the transition wavenumbers and package them as a SpectrumModel."""
    kappa1, kappa2 = solve_transition_wavenumbers(zeta, coeffs, tol=tol)
    return SpectrumModel(coeffs, float(zeta), kappa1, kappa2)


def constraint_residuals(model: SpectrumModel) -> tuple[float, float]:
    """Residuals of the two integral constraints at the model's wavenumbers.

    The second residual is relative to its right-hand side 1/(2 c_k zeta);
    both are zero (to solver tolerance) for a correctly solved model, and
    the second is identically zero at zeta = 0 where kappa2 is infinite.
    """
    c = model.coeffs
    c_k = float(c.c_k)
    a1, a2 = float(c.a_hat1), float(c.a_hat2)
    b1, b2 = float(c.b_hat1), float(c.b_hat2)
    k1, k2 = model.kappa1, model.kappa2
    k2m = 0.0 if math.isinf(k2) else k2 ** (-2.0 / 3.0)
    res1 = abs(a1 * k1 ** (-2.0 / 3.0) - b1 * k2m - 1.0 / c_k)
    if model.zeta == 0.0:
        return res1, 0.0
    rhs = 1.0 / (2.0 * c_k * model.zeta)
    res2 = abs(-a2 * k1 ** (4.0 / 3.0) + b2 * k2 ** (4.0 / 3.0) - rhs) / max(1.0, rhs)
    return res1, res2


def _as_array(kappa):
    arr = np.asarray(kappa, dtype=float)
    return arr, arr.ndim == 0


def energy_spectrum(kappa, model: SpectrumModel):
    """Evaluate the piecewise energy spectrum E(kappa).

    Accepts scalars or arrays; kappa must be nonnegative.
    """
    arr, scalar = _as_array(kappa)
    if np.any(arr < 0.0):
        raise DomainError("energy_spectrum requires kappa >= 0")
    c = model.coeffs
    c_k = float(c.c_k)
    k1, k2 = model.kappa1, model.kappa2
    a4, a5, a6 = (float(v) for v in c.low_poly)
    b7, b8, b9 = (float(v) for v in c.high_poly)

    out = np.empty_like(arr)
    low = arr < k1
    s = arr[low] / k1
    out[low] = c_k * k1 ** (-5.0 / 3.0) * (s**4 * (a4 + s * (a5 + s * a6)))
    if math.isinf(k2):
        mid = ~low
        out[mid] = c_k * arr[mid] ** (-5.0 / 3.0)
    else:
        mid = ~low & (arr <= k2)
        out[mid] = c_k * arr[mid] ** (-5.0 / 3.0)
        high = arr > k2
        r = k2 / arr[high]
        out[high] = c_k * k2 ** (-5.0 / 3.0) * (r**7 * (b7 + r * (b8 + r * b9)))
    return float(out) if scalar else out


def energy_cdf(kappa, model: SpectrumModel):
    """Closed-form mass of E on [0, kappa], using the piecewise antiderivatives."""
    arr, scalar = _as_array(kappa)
    if np.any(arr < 0.0):
        raise DomainError("energy_cdf requires kappa >= 0")
    c = model.coeffs
    c_k = float(c.c_k)
    k1, k2 = model.kappa1, model.kappa2
    m_low, m_mid, _ = branch_masses(model)

    out = np.empty_like(arr)
    low = arr < k1
    s = arr[low] / k1
    a4, a5, a6 = (float(v) for v in c.low_poly)
    out[low] = (
        c_k
        * k1 ** (-2.0 / 3.0)
        * s**5
        * (a4 / 5.0 + s * (a5 / 6.0 + s * a6 / 7.0))
    )
    if math.isinf(k2):
        mid = ~low
        out[mid] = m_low + 1.5 * c_k * (k1 ** (-2.0 / 3.0) - arr[mid] ** (-2.0 / 3.0))
    else:
        mid = ~low & (arr <= k2)
        out[mid] = m_low + 1.5 * c_k * (k1 ** (-2.0 / 3.0) - arr[mid] ** (-2.0 / 3.0))
        high = arr > k2
        r = k2 / arr[high]
        b7, b8, b9 = (float(v) for v in c.high_poly)
        tail = c_k * k2 ** (-2.0 / 3.0) * r**6 * (b7 / 6.0 + r * (b8 / 7.0 + r * b9 / 8.0))
        out[high] = 1.0 - tail
    return float(out) if scalar else out


def branch_masses(model: SpectrumModel) -> tuple[float, float, float]:
    """Exact probability masses of the three spectrum branches (sum to 1)."""
    c = model.coeffs
    c_k = float(c.c_k)
    a1, b1 = float(c.a_hat1), float(c.b_hat1)
    k1, k2 = model.kappa1, model.kappa2
    m_low = c_k * k1 ** (-2.0 / 3.0) * (a1 - 1.5)
    if math.isinf(k2):
        m_high = 0.0
        m_mid = 1.5 * c_k * k1 ** (-2.0 / 3.0)
    else:
        m_high = c_k * k2 ** (-2.0 / 3.0) * (1.5 - b1)
        m_mid = 1.5 * c_k * (k1 ** (-2.0 / 3.0) - k2 ** (-2.0 / 3.0))
    return m_low, m_mid, m_high


def spectral_density_sw(kappa, model: SpectrumModel):
    """Symmetric probability density s_w(kappa) = E(|kappa|) / 2 on the real line."""
    arr, scalar = _as_array(kappa)
    out = 0.5 * energy_spectrum(np.abs(arr), model)
    return float(out) if scalar else out


def spectral_cdf_sw(kappa, model: SpectrumModel):
    """Distribution function of s_w, from the closed-form energy antiderivatives."""
    arr, scalar = _as_array(kappa)
    half = energy_cdf(np.abs(arr), model)
    out = 0.5 + 0.5 * np.sign(arr) * half
    return float(out) if scalar else out


def temporal_correlation(t, tm: TemporalModel = TemporalModel()):
    """Gaussian temporal correlation phi(t) for t >= 0."""
    arr, scalar = _as_array(t)
    if np.any(arr < 0.0):
        raise DomainError("temporal_correlation requires t >= 0; extend by symmetry")
    out = np.exp(-(arr**2) / (2.0 * tm.t_large**2))
    return float(out) if scalar else out


def temporal_spectral_density(omega, tm: TemporalModel = TemporalModel()):
    """Fourier transform of phi; a normal density with std 1/t_large."""
    arr, scalar = _as_array(omega)
    out = tm.t_large / math.sqrt(2.0 * math.pi) * np.exp(-(tm.t_large**2) * arr**2 / 2.0)
    return float(out) if scalar else out


_QUAD_LIMIT = 400


def _quad_checked(func, a, b, rtol, **kw):
    val, err = integrate.quad(func, a, b, epsabs=0.0, epsrel=rtol, limit=_QUAD_LIMIT, **kw)
    if err > 10.0 * rtol * max(1.0, abs(val)):
        raise NumericalError(
            "adaptive quadrature did not converge", interval=(a, b), estimate=val, abserr=err
        )
    return val


def correlation_trace(r, model: SpectrumModel, rtol: float = 1e-8) -> float:
    """Trace of the spatial correlation tensor at separation r (any direction).

    Computes ``2 * integral_0^inf E(kappa) sin(kappa r) / (kappa r) dkappa``
    by oscillatory-weighted adaptive quadrature on the spectrum branches,
    with the infinite inertial tail handled by a Fourier-integral rule when
    ``kappa2`` is infinite.  The limit value at r = 0 is exactly 2.
    """
    r = float(r)
    if r < 0.0:
        raise DomainError("correlation_trace requires r >= 0")
    if r == 0.0:
        return 2.0
    k1, k2 = model.kappa1, model.kappa2

    def over_kappa(kappa):
        if kappa == 0.0:
            return 0.0  # E ~ kappa^4 near zero
        return energy_spectrum(kappa, model) / kappa

    total = _quad_checked(over_kappa, 0.0, k1, rtol, weight="sin", wvar=r)
    if math.isinf(k2):
        c_k = float(model.coeffs.c_k)
        # QAWF rule for integral_k1^inf c_k kappa^(-8/3) sin(r kappa) dkappa
        val, err = integrate.quad(
            lambda kappa: c_k * kappa ** (-8.0 / 3.0),
            k1,
            np.inf,
            weight="sin",
            wvar=r,
            limlst=200,
            limit=_QUAD_LIMIT,
        )
        if err > max(100.0 * rtol, 1e-3 * abs(val)):
            raise NumericalError("Fourier-tail quadrature did not converge", abserr=err)
        total += val
    else:
        total += _quad_checked(over_kappa, k1, k2, rtol, weight="sin", wvar=r)
        val, err = integrate.quad(
            over_kappa, k2, np.inf, weight="sin", wvar=r, limlst=200, limit=_QUAD_LIMIT
        )
        if err > max(100.0 * rtol, 1e-3 * abs(val)):
            raise NumericalError("Fourier-tail quadrature did not converge", abserr=err)
        total += val
    return 2.0 * total / r


def surrogate_autocovariance(lag, model: SpectrumModel, rtol: float = 1e-8) -> float:
    """Autocovariance of the scalar surrogate process at a given lag.

    Equals ``integral_R cos(kappa * lag) s_w(kappa) dkappa
    = integral_0^inf E(kappa) cos(kappa * lag) dkappa``; the oracle for the
    one-component covariance checks of the field sampler.
    """
    lag = abs(float(lag))
    if lag == 0.0:
        return 1.0
    k1, k2 = model.kappa1, model.kappa2

    def dens(kappa):
        return energy_spectrum(kappa, model)

    total = _quad_checked(dens, 0.0, k1, rtol, weight="cos", wvar=lag)
    hi = k2
    if math.isinf(k2):
        hi = np.inf
        val, err = integrate.quad(
            dens, k1, np.inf, weight="cos", wvar=lag, limlst=200, limit=_QUAD_LIMIT
        )
        if err > max(100.0 * rtol, 1e-3 * abs(val)):
            raise NumericalError("Fourier-tail quadrature did not converge", abserr=err)
        total += val
    else:
        total += _quad_checked(dens, k1, k2, rtol, weight="cos", wvar=lag)
        val, err = integrate.quad(
            dens, k2, np.inf, weight="cos", wvar=lag, limlst=200, limit=_QUAD_LIMIT
        )
        if err > max(100.0 * rtol, 1e-3 * abs(val)):
            raise NumericalError("Fourier-tail quadrature did not converge", abserr=err)
        total += val
    return total
