"""Field sampler tests: distributional oracles, determinism, incompressibility."""

import math

import numpy as np
import pytest
from scipy import integrate, interpolate, stats

from meltblow import fieldsampler as fs
from meltblow import spectrum as sp
from meltblow.errors import DomainError

MODEL0 = sp.build_model(0.0)
MODEL2 = sp.build_model(1e-2)
TM = sp.TemporalModel()


def quadrature_cdf(model, grid):
    """Independent cumulative-quadrature oracle for the s_w distribution."""
    vals = [0.0]
    for a, b in zip(grid[:-1], grid[1:]):
        piece, _ = integrate.quad(
            lambda k: sp.spectral_density_sw(k, model), a, b, epsrel=1e-10, limit=200
        )
        vals.append(vals[-1] + piece)
    total_below = sp.spectral_cdf_sw(grid[0], model)
    return np.asarray(vals) + total_below


class TestSubstream:
    def test_deterministic(self):
        a = fs.substream(42, 3).standard_normal(5)
        b = fs.substream(42, 3).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_distinct_streams(self):
        a = fs.substream(42, 3).standard_normal(5)
        b = fs.substream(42, 4).standard_normal(5)
        assert not np.array_equal(a, b)


class TestSampleSphere:
    def test_unit_norm(self):
        z = fs.sample_sphere(fs.substream(0), 2000)
        np.testing.assert_allclose(np.linalg.norm(z, axis=1), 1.0, rtol=1e-12)

    def test_moments(self):
        n = 200_000
        z = fs.sample_sphere(fs.substream(1), n)
        assert np.all(np.abs(z.mean(axis=0)) < 4.0 / math.sqrt(n))
        second = z.T @ z / n
        # component variance 1/3, SE ~ sqrt(Var(z_i^2)/n); Var(z_i^2) = 4/45
        se = math.sqrt(4.0 / 45.0 / n)
        assert np.all(np.abs(np.diag(second) - 1.0 / 3.0) < 3.0 * se)
        off = second - np.diag(np.diag(second))
        assert np.all(np.abs(off) < 4.0 / math.sqrt(n))

    def test_scalar_draw(self):
        z = fs.sample_sphere(fs.substream(2))
        assert z.shape == (3,)
        assert np.linalg.norm(z) == pytest.approx(1.0, rel=1e-12)


class TestSampleWavenumber:
    def test_segment_mass_zeta_zero(self):
        n = 10**6
        r = fs.sample_wavenumber(MODEL0, fs.substream(7), n)
        frac = np.mean(np.abs(r) <= MODEL0.kappa1)
        expected = 215.0 / 782.0
        se = math.sqrt(expected * (1 - expected) / n)
        assert abs(frac - expected) < 3.0 * se

    @pytest.mark.parametrize("model", [MODEL0, MODEL2], ids=["zeta0", "zeta1e-2"])
    def test_ks_against_quadrature_cdf(self, model):
        n = 10**5
        r = fs.sample_wavenumber(model, fs.substream(8), n)
        hi = 1e5 if math.isinf(model.kappa2) else model.kappa2 * 50
        grid = np.concatenate([
            -np.geomspace(hi, 1e-4, 300), [0.0], np.geomspace(1e-4, hi, 300)
        ])
        cdf_vals = quadrature_cdf(model, grid)
        cdf = interpolate.interp1d(grid, cdf_vals, bounds_error=False, fill_value=(0.0, 1.0))
        ks = stats.kstest(r, cdf).statistic
        assert ks < 1.63 / math.sqrt(n)  # 1% significance level

    def test_sign_symmetry(self):
        n = 10**6
        r = fs.sample_wavenumber(MODEL0, fs.substream(9), n)
        # the mean within 3 sample standard errors (heavy tails make this loose)
        se = r.std(ddof=1) / math.sqrt(n)
        assert abs(r.mean()) < 3.0 * se
        # sign balance is the sharp symmetry check
        assert abs(np.mean(np.sign(r))) < 3.0 / math.sqrt(n)

    def test_scalar_draw(self):
        val = fs.sample_wavenumber(MODEL0, fs.substream(3))
        assert isinstance(val, float)


class TestRejectionSampler:
    def test_matches_composition_sampler(self):
        n = 20_000
        a = fs.sample_wavenumber_rejection(MODEL2, fs.substream(11), n)
        b = fs.sample_wavenumber(MODEL2, fs.substream(12), n)
        res = stats.ks_2samp(a, b)
        assert res.pvalue > 0.01

    def test_refuses_infinite_tail(self):
        with pytest.raises(DomainError):
            fs.sample_wavenumber_rejection(MODEL0, fs.substream(1), 10)


class TestDrawParameterSet:
    def test_bit_identical_for_same_seed(self):
        a = fs.draw_parameter_set(50, MODEL0, 123)
        b = fs.draw_parameter_set(50, MODEL0, 123)
        for name in ("z", "r_xi", "x_xi", "y_xi", "r_psi", "x_psi", "y_psi"):
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))

    def test_default_mode_count_is_fifty(self):
        assert fs.DEFAULT_MODES == 50

    def test_draw_counts(self):
        n = 17
        ps = fs.draw_parameter_set(n, MODEL0, 5)
        assert ps.z.shape == (n, 3)
        assert ps.r_xi.size == 3 * n
        normals = ps.x_xi.size + ps.y_xi.size + ps.r_psi.size + ps.x_psi.size + ps.y_psi.size
        assert normals == 9 * n

    def test_immutable(self):
        ps = fs.draw_parameter_set(4, MODEL0, 5)
        with pytest.raises(ValueError):
            ps.z[0, 0] = 1.0

    def test_invalid_mode_count(self):
        with pytest.raises(DomainError):
            fs.draw_parameter_set(0, MODEL0, 1)


class TestSurrogateW:
    def test_value_at_zero(self):
        ps_re = fs.draw_parameter_set(3, MODEL0, 7, branch="re")
        assert fs.eval_surrogate_w(0.0, 1, 2, ps_re) == ps_re.x_xi[1, 2]
        ps_im = fs.draw_parameter_set(3, MODEL0, 7, branch="im")
        assert fs.eval_surrogate_w(0.0, 1, 2, ps_im) == ps_im.y_xi[1, 2]

    def test_autocovariance_matches_quadrature(self):
        # modes are independent copies: one large set gives the MC ensemble
        n = 150_000
        ps = fs.draw_parameter_set(n, MODEL0, 8)
        lag, base = 0.8, 0.3
        w1 = ps.x_xi[:, 0] * np.cos(ps.r_xi[:, 0] * (base + lag)) \
            - ps.y_xi[:, 0] * np.sin(ps.r_xi[:, 0] * (base + lag))
        w2 = ps.x_xi[:, 0] * np.cos(ps.r_xi[:, 0] * base) \
            - ps.y_xi[:, 0] * np.sin(ps.r_xi[:, 0] * base)
        # spot check the vector math against the public evaluator
        np.testing.assert_allclose(w2[:5], [fs.eval_surrogate_w(base, l, 0, ps) for l in range(5)])
        prods = w1 * w2
        se = prods.std(ddof=1) / math.sqrt(n)
        oracle = sp.surrogate_autocovariance(lag, MODEL0)
        assert abs(prods.mean() - oracle) < 3.0 * se


class TestSpatialField:
    def test_orthogonal_to_direction(self):
        ps = fs.draw_parameter_set(6, MODEL0, 9)
        x = np.array([0.3, -1.2, 0.7])
        for l in range(6):
            xi = fs.eval_spatial_field(x, l, ps)
            assert abs(xi @ ps.z[l]) < 1e-12 * np.linalg.norm(xi)

    def test_divergence_free(self):
        ps = fs.draw_parameter_set(8, MODEL0, 10)
        rng = np.random.default_rng(0)
        h = 1e-5
        for _ in range(100):
            x = rng.uniform(-3, 3, 3)
            l = int(rng.integers(0, 8))
            div = 0.0
            grad_sq = 0.0
            for k in range(3):
                e = np.zeros(3)
                e[k] = h
                g = (fs.eval_spatial_field(x + e, l, ps) - fs.eval_spatial_field(x - e, l, ps)) / (2 * h)
                div += g[k]
                grad_sq += float(g @ g)
            assert abs(div) < 1e-6 * math.sqrt(grad_sq)

    def test_covariance_matches_trace_oracle(self):
        n = 120_000
        ps = fs.draw_parameter_set(n, MODEL0, 11)
        lag_vec = np.array([0.9, -0.4, 0.2])
        base = np.array([0.1, 0.5, -0.3])
        # vectorized across modes (independent copies)
        def field(pts):
            proj = pts @ ps.z.T  # broadcasting over modes handled per-mode below
            return proj
        pa = (base + lag_vec) @ ps.z.T
        pb = base @ ps.z.T
        wa = ps.x_xi * np.cos(ps.r_xi * pa[:, None]) - ps.y_xi * np.sin(ps.r_xi * pa[:, None])
        wb = ps.x_xi * np.cos(ps.r_xi * pb[:, None]) - ps.y_xi * np.sin(ps.r_xi * pb[:, None])
        xa = wa - (np.einsum("nj,nj->n", wa, ps.z))[:, None] * ps.z
        xb = wb - (np.einsum("nj,nj->n", wb, ps.z))[:, None] * ps.z
        np.testing.assert_allclose(xa[4], fs.eval_spatial_field(base + lag_vec, 4, ps), atol=1e-12)
        prods = np.einsum("nj,nj->n", xa, xb)
        se = prods.std(ddof=1) / math.sqrt(n)
        oracle = sp.correlation_trace(float(np.linalg.norm(lag_vec)), MODEL0)
        assert abs(prods.mean() - oracle) < 3.0 * se


class TestTimeProcess:
    def test_value_at_zero(self):
        ps = fs.draw_parameter_set(3, MODEL0, 12, branch="re")
        assert fs.eval_time_process(0.0, 2, ps, TM) == ps.x_psi[2]

    def test_variance_and_lag_covariance(self):
        n = 120_000
        ps = fs.draw_parameter_set(n, MODEL0, 13)
        t0 = 0.4
        p0 = ps.x_psi * np.cos(ps.r_psi * t0 / TM.t_large) - ps.y_psi * np.sin(ps.r_psi * t0 / TM.t_large)
        t1 = t0 + TM.t_large
        p1 = ps.x_psi * np.cos(ps.r_psi * t1 / TM.t_large) - ps.y_psi * np.sin(ps.r_psi * t1 / TM.t_large)
        assert p0[7] == pytest.approx(fs.eval_time_process(t0, 7, ps, TM), rel=1e-12)
        se_var = np.std(p0**2, ddof=1) / math.sqrt(n)
        assert abs(np.mean(p0**2) - 1.0) < 3.0 * se_var
        prods = p0 * p1
        se = prods.std(ddof=1) / math.sqrt(n)
        assert abs(prods.mean() - math.exp(-0.5)) < 3.0 * se


class TestLocalFluctuation:
    frame = fs.LocalFrame(0.0, np.array([0.4, -0.1, 0.2]))

    def test_pure_function_bit_identical(self):
        ps = fs.draw_parameter_set(50, MODEL0, 14)
        x = np.array([0.3, 0.4, -0.2])
        a = fs.eval_local_fluctuation(x, 0.7, ps, self.frame)
        b = fs.eval_local_fluctuation(x, 0.7, ps, self.frame)
        np.testing.assert_array_equal(a, b)

    def test_mean_and_component_variance(self):
        n = 4000
        x = np.array([0.5, -0.4, 1.1])
        vals = np.array([
            fs.eval_local_fluctuation(x, 0.3, fs.draw_parameter_set(50, MODEL0, 15, (i,)), self.frame)
            for i in range(n)
        ])
        var = vals.var(axis=0, ddof=1)
        se = np.sqrt(2.0 / (n - 1)) * var  # normal-theory SE of a variance
        assert np.all(np.abs(vals.mean(axis=0)) < 4.0 * vals.std(ddof=1, axis=0) / math.sqrt(n))
        assert np.all(np.abs(var - 2.0 / 3.0) < 3.5 * se)

    def test_covariance_matches_kernel(self):
        # E(u(x+x1, t+t1) . u(x1, t1)) = tr gamma(x - ubar t) phi(t)
        n = 6000
        x1 = np.array([0.3, 0.5, -0.2])
        t1 = 0.4
        x = np.array([0.8, -0.3, 0.5])
        t = 0.25
        pts = np.vstack([x + x1, x1])
        ts = np.array([t + t1, t1])
        prods = np.empty(n)
        for i in range(n):
            ps = fs.draw_parameter_set(50, MODEL0, 16, (i,))
            both = fs.eval_local_fluctuation(pts, ts, ps, self.frame)
            prods[i] = both[0] @ both[1]
        lag = x - self.frame.mean_velocity * t
        oracle = sp.correlation_trace(float(np.linalg.norm(lag)), MODEL0) * sp.temporal_correlation(t, TM)
        se = prods.std(ddof=1) / math.sqrt(n)
        assert abs(prods.mean() - oracle) < 3.0 * se

    def test_stationarity(self):
        # covariance depends only on argument differences
        n = 4000
        lag_x = np.array([0.6, 0.1, -0.4])
        lag_t = 0.3
        bases = [(np.zeros(3), 0.0), (np.array([1.3, -0.7, 2.0]), 0.9)]
        means = []
        ses = []
        for k, (bx, bt) in enumerate(bases):
            prods = np.empty(n)
            for i in range(n):
                ps = fs.draw_parameter_set(50, MODEL0, 17, (k, i))
                both = fs.eval_local_fluctuation(
                    np.vstack([bx + lag_x, bx]), np.array([bt + lag_t, bt]), ps, self.frame
                )
                prods[i] = both[0] @ both[1]
            means.append(prods.mean())
            ses.append(prods.std(ddof=1) / math.sqrt(n))
        joint = math.hypot(*ses)
        assert abs(means[0] - means[1]) < 3.0 * joint

    def test_smooth_in_time(self):
        # central difference of the realization converges at second order
        ps = fs.draw_parameter_set(50, MODEL0, 18)
        x = np.array([0.2, -0.1, 0.5])
        t = 0.6

        def dd(h):
            f = lambda tt: fs.eval_local_fluctuation(x, tt, ps, self.frame)[0]
            return (f(t + h) - f(t - h)) / (2 * h)

        d1, d2, d4 = dd(1e-3), dd(5e-4), dd(2.5e-4)
        # Richardson: error ratio ~ 4 per halving for a C^3 function
        assert abs(d2 - d4) < 0.4 * abs(d1 - d2) + 1e-12

    def test_vectorized_matches_scalar(self):
        ps = fs.draw_parameter_set(20, MODEL0, 19)
        pts = np.array([[0.1, 0.2, 0.3], [-0.5, 0.0, 1.0]])
        both = fs.eval_local_fluctuation(pts, 0.4, ps, self.frame)
        one = fs.eval_local_fluctuation(pts[1], 0.4, ps, self.frame)
        np.testing.assert_allclose(both[1], one, rtol=1e-14)

    def test_negative_zeta_rejected(self):
        with pytest.raises(DomainError):
            fs.LocalFrame(-0.1, np.zeros(3))
