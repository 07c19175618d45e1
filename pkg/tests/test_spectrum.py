"""Spectrum model tests against exact rationals and quadrature oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from meltblow import spectrum as sp
from meltblow.errors import DomainError


def quad_energy_moment(model, power, upper=None):
    """Independent adaptive-quadrature oracle for integrals of kappa^p * E."""
    k1, k2 = model.kappa1, model.kappa2
    pieces = []

    def f(k):
        return k**power * sp.energy_spectrum(k, model)

    pieces.append(integrate.quad(f, 0.0, k1, epsabs=0.0, epsrel=1e-11, limit=300))
    if math.isinf(k2):
        hi = upper if upper is not None else np.inf
        pieces.append(integrate.quad(f, k1, hi, epsabs=1e-14, epsrel=1e-11, limit=300))
    else:
        pieces.append(integrate.quad(f, k1, k2, epsabs=0.0, epsrel=1e-11, limit=300))
        pieces.append(integrate.quad(f, k2, np.inf, epsabs=1e-14, epsrel=1e-11, limit=300))
    return sum(v for v, _ in pieces)


class TestCoefficients:
    def test_regularity_sums_are_one(self):
        c = sp.reduced_coefficients()
        assert sum(c.low_poly) == 1
        assert sum(c.high_poly) == 1

    def test_reduced_values_exact(self):
        # independent re-derivation with rational arithmetic
        a = {4: Fraction(230, 9), 5: Fraction(-391, 9), 6: Fraction(170, 9)}
        b = {7: Fraction(209, 9), 8: Fraction(-352, 9), 9: Fraction(152, 9)}
        c = sp.reduced_coefficients()
        assert c.a_hat1 == Fraction(3, 2) + sum(a[j] / (j + 1) for j in a)
        assert c.a_hat2 == Fraction(3, 4) - sum(a[j] / (j + 3) for j in a)
        assert c.b_hat1 == Fraction(3, 2) - sum(b[j] / (j - 1) for j in b)
        assert c.b_hat2 == Fraction(3, 4) + sum(b[j] / (j - 3) for j in b)
        assert c.a_hat1 == Fraction(391, 189)
        assert c.b_hat1 == Fraction(209, 189)
        assert float(c.a_hat1) == pytest.approx(2.068783, abs=5e-7)
        assert float(c.b_hat1) == pytest.approx(1.105820, abs=5e-7)

    def test_bad_sum_rejected(self):
        with pytest.raises(DomainError):
            sp.reduced_coefficients(a=(Fraction(1), Fraction(1), Fraction(1)))


class TestCriticalZeta:
    def test_paper_value(self):
        assert sp.critical_zeta() == pytest.approx(3.86, rel=5e-3)

    def test_cubic_kolmogorov_dependence(self):
        doubled = sp.reduced_coefficients(c_k=Fraction(1))
        assert sp.critical_zeta(doubled) == pytest.approx(sp.critical_zeta() / 8.0, rel=1e-14)

    def test_matches_wavenumber_merge_point(self):
        # bisection on zeta for kappa2 - kappa1 -> 0 must land at zeta_crit
        zc = sp.critical_zeta()
        lo, hi = 1.0, zc * (1 - 1e-13)
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            k1, k2 = sp.solve_transition_wavenumbers(mid)
            if k2 - k1 > 1e-9:
                lo = mid
            else:
                hi = mid
        # kappa2 - kappa1 ~ sqrt(zeta_crit - zeta) near the merge, so a 1e-9
        # gap threshold pins zeta_crit only to ~1e-7 relative
        assert hi == pytest.approx(zc, rel=1e-6)
        # limit value of the merged wavenumber
        c = sp.reduced_coefficients()
        merged = (float(c.c_k) * float(c.a_hat1 - c.b_hat1)) ** 1.5
        k1, k2 = sp.solve_transition_wavenumbers(zc * (1 - 1e-12))
        assert k1 == pytest.approx(merged, rel=1e-5)
        assert k2 == pytest.approx(merged, rel=1e-5)


class TestTransitionSolver:
    def test_zeta_zero_closed_form(self):
        c = sp.reduced_coefficients()
        k1, k2 = sp.solve_transition_wavenumbers(0.0)
        assert math.isinf(k2)
        assert k1 == pytest.approx((float(c.c_k) * float(c.a_hat1)) ** 1.5, rel=1e-13)
        assert k1 == pytest.approx(1.0520, abs=5e-4)

    @pytest.mark.parametrize("zeta", [1e-4, 1e-2, 0.5, 1.0, 3.0])
    def test_integral_constraints_via_quadrature(self, zeta):
        model = sp.build_model(zeta)
        assert abs(quad_energy_moment(model, 0) - 1.0) < 1e-8
        target = 1.0 / (2.0 * zeta)
        assert abs(quad_energy_moment(model, 2) - target) / target < 1e-8

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            sp.solve_transition_wavenumbers(-1e-9)
        with pytest.raises(DomainError):
            sp.solve_transition_wavenumbers(sp.critical_zeta())

    def test_residuals_reported_small(self):
        model = sp.build_model(1e-3)
        res1, res2 = sp.constraint_residuals(model)
        assert res1 < 1e-12 and res2 < 1e-12

    def test_wavenumbers_continuous_in_zeta(self):
        # invariant: kappa_i(zeta) continuous on [0, zeta_crit); kappa2 scales
        # like zeta^(-3/2) near zero, so bound relative jumps on a log mesh
        zc = sp.critical_zeta()
        zetas = np.geomspace(1e-6, zc * 0.999, 100)
        k1s, k2s = zip(*(sp.solve_transition_wavenumbers(z) for z in zetas))
        dlog = math.log(zetas[1] / zetas[0])
        bound = 3.0 * 1.5 * dlog  # slope of the steepest power law, with slack
        assert np.all(np.abs(np.diff(np.log(k1s))) < bound)
        assert np.all(np.abs(np.diff(np.log(k2s))) < bound)


class TestEnergySpectrum:
    def test_zero_at_origin(self):
        model = sp.build_model(0.0)
        assert sp.energy_spectrum(0.0, model) == 0.0

    def test_continuity_at_transitions(self):
        model = sp.build_model(1e-2)
        c_k = float(model.coeffs.c_k)
        for kap in (model.kappa1, model.kappa2):
            left = sp.energy_spectrum(kap * (1 - 1e-12), model)
            right = sp.energy_spectrum(kap * (1 + 1e-12), model)
            assert left == pytest.approx(right, rel=1e-9)
        assert sp.energy_spectrum(model.kappa1, model) == pytest.approx(
            c_k * model.kappa1 ** (-5.0 / 3.0), rel=1e-14
        )

    @pytest.mark.parametrize("which", ["kappa1", "kappa2"])
    def test_c2_regularity_by_finite_differences(self, which):
        # one-sided 1st and 2nd differences from both sides agree to O(h)
        model = sp.build_model(1e-2)
        kap = getattr(model, which)

        def deriv_gap(h, order):
            if order == 1:
                left = (sp.energy_spectrum(kap, model) - sp.energy_spectrum(kap - h, model)) / h
                right = (sp.energy_spectrum(kap + h, model) - sp.energy_spectrum(kap, model)) / h
            else:
                left = (
                    sp.energy_spectrum(kap, model)
                    - 2 * sp.energy_spectrum(kap - h, model)
                    + sp.energy_spectrum(kap - 2 * h, model)
                ) / h**2
                right = (
                    sp.energy_spectrum(kap + 2 * h, model)
                    - 2 * sp.energy_spectrum(kap + h, model)
                    + sp.energy_spectrum(kap, model)
                ) / h**2
            return abs(left - right)

        for order in (1, 2):
            gaps = [deriv_gap(h, order) for h in (1e-3, 2.5e-4)]
            scale = abs(sp.energy_spectrum(kap, model)) / kap**order
            # one-sided mismatch shrinks at least O(h): 4x smaller h -> <= 2x gap
            # (h stays above the roundoff floor of the second difference)
            assert gaps[1] < 0.5 * gaps[0] + 1e-12 * scale
            assert gaps[1] < 0.1 * scale

    def test_negative_kappa_rejected(self):
        model = sp.build_model(0.0)
        with pytest.raises(DomainError):
            sp.energy_spectrum(-0.1, model)

    def test_closed_form_cdf_matches_quadrature(self):
        model = sp.build_model(1e-3)
        for kap in (0.3, model.kappa1, 5.0, model.kappa2 * 2.0):
            oracle, _ = integrate.quad(
                lambda k: sp.energy_spectrum(k, model), 0.0, kap, epsrel=1e-11, limit=300
            )
            assert sp.energy_cdf(kap, model) == pytest.approx(oracle, rel=1e-9, abs=1e-12)


class TestSpectralDensity:
    def test_symmetry(self):
        model = sp.build_model(0.0)
        kappas = np.array([0.2, 1.0, 7.3])
        np.testing.assert_allclose(
            sp.spectral_density_sw(kappas, model), sp.spectral_density_sw(-kappas, model)
        )

    def test_normalization_by_quadrature(self):
        model = sp.build_model(1e-2)
        total = 2.0 * quad_energy_moment(model, 0) / 2.0
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_segment_mass_zeta_zero(self):
        # P(|R| <= kappa1) = (a_hat1 - 3/2) / a_hat1 from the exact antiderivative
        model = sp.build_model(0.0)
        c = model.coeffs
        expected = float((c.a_hat1 - Fraction(3, 2)) / c.a_hat1)
        assert expected == pytest.approx(0.27494, abs=5e-6)
        mass = sp.spectral_cdf_sw(model.kappa1, model) - sp.spectral_cdf_sw(-model.kappa1, model)
        assert mass == pytest.approx(expected, rel=1e-12)


class TestTemporal:
    def test_phi_at_zero_and_t_large(self):
        tm = sp.TemporalModel()
        assert sp.temporal_correlation(0.0, tm) == 1.0
        assert sp.temporal_correlation(tm.t_large, tm) == pytest.approx(math.exp(-0.5), rel=1e-14)
        assert tm.t_large == 0.212

    def test_spectral_density_normalized(self):
        tm = sp.TemporalModel()
        val, _ = integrate.quad(lambda w: sp.temporal_spectral_density(w, tm), -np.inf, np.inf)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            sp.temporal_correlation(-0.1)


class TestCorrelationTrace:
    def test_limit_at_zero(self):
        model = sp.build_model(0.0)
        assert sp.correlation_trace(0.0, model) == 2.0

    def test_bounded_by_two(self):
        model = sp.build_model(1e-3)
        for r in (0.05, 0.3, 1.0, 3.0, 17.0, 120.0):
            assert abs(sp.correlation_trace(r, model)) <= 2.0 + 1e-9

    def test_decay_at_large_separation(self):
        model = sp.build_model(0.0)
        assert abs(sp.correlation_trace(1e2, model)) < 1e-4
        assert abs(sp.correlation_trace(1e3, model)) < 1e-6

    def test_small_r_consistency_with_moments(self):
        # tr gamma(r) ~ 2 - r^2 * (integral kappa^2 E) / 3 for small r
        model = sp.build_model(1e-2)
        second = quad_energy_moment(model, 2)
        r = 1e-3
        expansion = 2.0 - r**2 * second / 3.0
        assert sp.correlation_trace(r, model) == pytest.approx(expansion, abs=1e-8)

    def test_negative_r_rejected(self):
        with pytest.raises(DomainError):
            sp.correlation_trace(-1.0, sp.build_model(0.0))


class TestSurrogateAutocovariance:
    def test_unit_at_zero_lag(self):
        model = sp.build_model(0.0)
        assert sp.surrogate_autocovariance(0.0, model) == 1.0

    def test_matches_direct_quadrature(self):
        model = sp.build_model(1e-2)
        lag = 0.8
        oracle, _ = integrate.quad(
            lambda k: sp.energy_spectrum(k, model) * math.cos(k * lag),
            0.0, 60.0, epsrel=1e-10, limit=400,
        )
        tail, _ = integrate.quad(
            lambda k: sp.energy_spectrum(k, model) * math.cos(k * lag),
            60.0, np.inf, epsabs=1e-13, limit=400,
        )
        assert sp.surrogate_autocovariance(lag, model) == pytest.approx(oracle + tail, abs=1e-7)


class TestModelValidation:
    def test_infinite_kappa2_requires_zeta_zero(self):
        c = sp.reduced_coefficients()
        with pytest.raises(DomainError):
            sp.SpectrumModel(c, 1e-3, 1.0, math.inf)
        with pytest.raises(DomainError):
            sp.SpectrumModel(c, 0.0, 1.0, 5.0)

    def test_ordering_enforced(self):
        c = sp.reduced_coefficients()
        with pytest.raises(DomainError):
            sp.SpectrumModel(c, 1e-3, 2.0, 1.0)
