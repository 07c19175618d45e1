"""Normality testing and covariance estimation used to validate the sampler.

Implements the Shapiro-Wilk W test in Royston's approximation (valid for
sample sizes 3..2000) and Royston's multivariate H test, which combines the
per-variate transformed W statistics through an equivalent-degrees-of-freedom
correction for inter-variate correlation.  A jackknife cross-covariance
estimator supports the field-sampler covariance checks, and the
rejection-frequency experiment reproduces the sampler's multivariate
normality table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import chi2

from .errors import DomainError

__all__ = [
    "ShapiroResult",
    "NormalityResult",
    "shapiro_wilk",
    "royston_h",
    "empirical_covariance",
    "rejection_frequency_experiment",
]

_MAX_N = 2000

# Royston (1992) polynomial coefficients (ascending order for polyval below).
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.5440, -0.39978, 0.025054, -0.0006714)          # mu, 4 <= n <= 11
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)          # ln sigma, 4 <= n <= 11
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)         # mu, n >= 12 (in ln n)
_C6 = (-0.4803, -0.082676, 0.0030302)                   # ln sigma, n >= 12
_G = (-2.273, 0.459)                                    # gamma, 4 <= n <= 11


def _poly(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class ShapiroResult:
    statistic: float
    p_value: float


def _w_statistic(x):
    """Shapiro-Wilk W via Royston's approximate order-statistic coefficients."""
    n = x.shape[0]
    xs = np.sort(x)
    if xs[-1] - xs[0] < 1e-300 or np.var(xs) == 0.0:
        raise DomainError("sample has zero variance")

    if n == 3:
        a = np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
    else:
        m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
        mm = float(m @ m)
        c = m / math.sqrt(mm)
        u = 1.0 / math.sqrt(n)
        a = np.empty(n)
        a_n = c[-1] + _poly(_C1, u)
        if n <= 5:
            phi = (mm - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
            a[-1] = a_n
            a[0] = -a_n
        else:
            a_n1 = c[-2] + _poly(_C2, u)
            phi = (mm - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
                1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2
            )
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[-1], a[-2] = a_n, a_n1
            a[0], a[1] = -a_n, -a_n1

    num = float(a @ xs) ** 2
    den = float(np.sum((xs - xs.mean()) ** 2))
    return min(num / den, 1.0)


def _w_statistic_francia(x):
    """Shapiro-Francia W': squared correlation with the expected normal scores."""
    n = x.shape[0]
    xs = np.sort(x)
    if xs[-1] - xs[0] < 1e-300 or np.var(xs) == 0.0:
        raise DomainError("sample has zero variance")
    m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    c = m / math.sqrt(float(m @ m))
    num = float(c @ xs) ** 2
    den = float(np.sum((xs - xs.mean()) ** 2))
    return min(num / den, 1.0)


def _francia_z(w, n):
    """Royston's (1993) normalizing transformation for the Shapiro-Francia W'."""
    nu = math.log(n)
    u = math.log(nu) - nu
    mu = -1.2725 + 1.0521 * u
    sigma = 1.0308 - 0.26758 * (math.log(nu) + 2.0 / nu)
    return (math.log1p(-w) - mu) / sigma


def _w_to_z(w, n):
    """Royston's normalizing transformation of W to an approximate N(0,1) deviate."""
    if n == 3:
        # exact distribution of W at n = 3
        p = max(0.0, min(1.0, 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))))
        if p <= 0.0:
            return math.inf
        if p >= 1.0:
            return -math.inf
        return -ndtri(p)
    if n <= 11:
        gamma = _poly(_G, n)
        arg = gamma - math.log1p(-w)
        if arg <= 0.0:
            return math.inf  # beyond the approximation's reach: certain rejection
        wt = -math.log(arg)
        mu = _poly(_C3, n)
        sigma = math.exp(_poly(_C4, n))
    else:
        ln_n = math.log(n)
        wt = math.log1p(-w)
        mu = _poly(_C5, ln_n)
        sigma = math.exp(_poly(_C6, ln_n))
    return (wt - mu) / sigma


def shapiro_wilk(x) -> ShapiroResult:
    """Shapiro-Wilk normality test for a univariate sample of size 3..2000.

    Returns the W statistic and the p-value from Royston's normalizing
    transformation.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    if not 3 <= n <= _MAX_N:
        raise DomainError(f"sample size {n} outside supported range [3, {_MAX_N}]")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample contains non-finite values")
    w = _w_statistic(x)
    z = _w_to_z(w, n)
    p = float(ndtr(-z)) if math.isfinite(z) else (0.0 if z > 0 else 1.0)
    return ShapiroResult(float(w), p)


@dataclass(frozen=True)
class NormalityResult:
    """Outcome of Royston's multivariate normality test."""

    statistic: float          # H, approximately chi-square
    p_value: float
    w_values: np.ndarray      # per-variate Shapiro-Wilk W
    equiv_dof: float          # equivalent degrees of freedom


def _excess_kurtosis(x):
    centered = x - x.mean()
    m2 = np.mean(centered**2)
    return float(np.mean(centered**4) / m2**2 - 3.0)


def _as_sample_matrix(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DomainError("samples must form an (n, d) matrix")
    if x.shape[0] < 3:
        raise DomainError("need at least 3 observations")
    if not np.all(np.isfinite(x)):
        raise DomainError("samples contain non-finite values")
    return x


def royston_h(samples) -> NormalityResult:
    """Royston's H test for multivariate normality on an (n, d) sample.

    Each variate's W statistic is transformed to a normal deviate z_j and to
    psi_j = [Phi^-1(Phi(-z_j) / 2)]^2; the psi are averaged and rescaled by
    equivalent degrees of freedom computed from the corrected mean pairwise
    correlation.  Following the reference routine, a leptokurtic variate is
    scored with the Shapiro-Francia W' (more powerful against heavy tails),
    a platykurtic one with the Shapiro-Wilk W.  For a platykurtic single
    variate (d = 1) the p-value reduces exactly to shapiro_wilk's.
    """
    x = _as_sample_matrix(samples)
    n, d = x.shape
    if not 3 <= n <= _MAX_N:
        raise DomainError(f"sample size {n} outside supported range [3, {_MAX_N}]")

    w_values = np.empty(d)
    psi = np.empty(d)
    for j in range(d):
        col = x[:, j]
        if n > 3 and _excess_kurtosis(col) > 0.0:
            w = _w_statistic_francia(col)
            z = _francia_z(w, n)
        else:
            w = _w_statistic(col)
            z = _w_to_z(w, n)
        w_values[j] = w
        if not math.isfinite(z):
            psi[j] = math.inf if z > 0 else 0.0
            continue
        tail = float(ndtr(-z))
        tail = min(max(tail, 1e-300), 1.0 - 1e-16)
        psi[j] = float(ndtri(0.5 * tail)) ** 2

    if d == 1:
        equiv = 1.0
    else:
        corr = np.corrcoef(x, rowvar=False)
        if not np.all(np.isfinite(corr)) or np.linalg.matrix_rank(corr) < d:
            raise DomainError("degenerate sample covariance (rank < d)")
        ln_n = math.log(n)
        u = 0.715
        v = 0.21364 + 0.015124 * ln_n**2 - 0.0018034 * ln_n**3
        iu, ju = np.triu_indices(d, k=1)
        c = corr[iu, ju]
        cstar = np.abs(c) ** 5.0 * (1.0 - u * (1.0 - np.abs(c)) ** u / v)
        cbar = float(np.mean(cstar))
        equiv = d / (1.0 + (d - 1) * cbar)

    h = equiv * float(np.mean(psi))
    p = float(chi2.sf(h, equiv))
    return NormalityResult(h, p, w_values, equiv)


def empirical_covariance(a, b=None):
    """Unbiased (cross-)covariance with jackknife standard errors.

    Parameters
    ----------
    a, b : (n,) or (n, p) arrays
        Paired samples; ``b`` defaults to ``a`` (auto-covariance).

    Returns
    -------
    cov, se : (p, q) arrays
        Covariance estimate and leave-one-out jackknife standard errors.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    b = a if b is None else np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    n = a.shape[0]
    if b.shape[0] != n:
        raise DomainError("paired samples must have equal length")
    if n < 2:
        raise DomainError("need at least 2 samples")

    ac = a - a.mean(axis=0)
    bc = b - b.mean(axis=0)
    s = ac.T @ bc
    cov = s / (n - 1)
    if n == 2:
        return cov, np.full_like(cov, np.nan)

    # leave-one-out: cov_(-i) = (S - n/(n-1) * ac_i bc_i^T) / (n - 2)
    outer = ac[:, :, None] * bc[:, None, :]
    loo = (s[None, :, :] - (n / (n - 1)) * outer) / (n - 2)
    loo_mean = loo.mean(axis=0)
    se = np.sqrt((n - 1) / n * np.sum((loo - loo_mean) ** 2, axis=0))
    return cov, se


def rejection_frequency_experiment(
    n_values: Sequence[int],
    d_values: Sequence[int],
    reps: int,
    n_samples: int,
    ps_factory: Callable,
    point_chooser: Callable,
    evaluator: Callable,
    seed: int = 0,
    alpha: float = 0.05,
) -> dict:
    """Rejection frequencies of Royston's test over field realizations.

    For each (superposition count N, variate size d): draws ``reps``
    independent groups of ``n_samples`` parameter sets, evaluates one field
    component at the d space-time points supplied by ``point_chooser(d)``,
    applies the H test at level ``alpha`` and records the rejection fraction.

    Parameters
    ----------
    ps_factory : callable (n_modes, stream) -> ParameterSet
    point_chooser : callable d -> (positions (d, 3), times (d,))
    evaluator : callable (ps, positions, times) -> (d,) field component values

    Returns
    -------
    dict with keys ``n_values``, ``d_values`` and ``frequencies`` ((len(N),
    len(d)) array); empty frequency table when reps == 0.
    """
    n_values = list(n_values)
    d_values = list(d_values)
    freq = np.zeros((len(n_values), len(d_values)))
    if reps > 0:
        for i, n_modes in enumerate(n_values):
            for j, d in enumerate(d_values):
                points, times = point_chooser(d)
                rejections = 0
                for rep in range(reps):
                    rows = []
                    for s in range(n_samples):
                        ps = ps_factory(n_modes, (i, j, rep, s))
                        rows.append(np.atleast_1d(evaluator(ps, points, times)))
                    if royston_h(np.asarray(rows)).p_value < alpha:
                        rejections += 1
                freq[i, j] = rejections / reps
    return {"n_values": n_values, "d_values": d_values, "frequencies": freq}
