"""Noise-law unit tests: CGF, scaling, density, survival, sampler, cumulants."""
import math

import numpy as np
import pytest
from scipy import integrate, stats

from sdelab.errors import (
    ParameterError,
    QuadratureConvergenceError,
    UndefinedMomentError,
    UnsupportedParameterizationError,
)
from sdelab.noise import (
    GaussianNoiseParams,
    QuadratureConfig,
    StableNoiseParams,
    cgf_eval,
    cgf_time_scale,
    cumulants,
    density,
    sample,
    survival,
)
from conftest import gof_quantile_grid

# frozen oracle values (mpmath/sympy, see test bodies for the defining oracle)
GAMMA_5_3_OVER_PI = 0.2873527514521644  # (1/pi) * Gamma(1 + 2/3)
SURV_1_959964 = 0.024999999096442404    # 0.5 * erfc(1.959964 / sqrt(2))


class TestParameterDomains:
    def test_rho_must_be_positive(self):
        with pytest.raises(ParameterError):
            GaussianNoiseParams(0.0, 0.0)
        with pytest.raises(ParameterError):
            StableNoiseParams(1.5, 0.0, 0.0, -1.0)

    def test_alpha_beta_domains(self):
        with pytest.raises(ParameterError):
            StableNoiseParams(2.5, 0.0)
        with pytest.raises(ParameterError):
            StableNoiseParams(0.0, 0.0)
        with pytest.raises(ParameterError):
            StableNoiseParams(1.5, 1.2)

    def test_skewed_cauchy_rejected(self):
        with pytest.raises(UnsupportedParameterizationError):
            StableNoiseParams(1.0, 0.5)

    def test_quadrature_config_domains(self):
        with pytest.raises(ParameterError):
            QuadratureConfig(abs_tol=0.0)
        with pytest.raises(ParameterError):
            QuadratureConfig(max_panels=0)


class TestCgf:
    def test_gaussian_unit(self):
        assert cgf_eval(GaussianNoiseParams(0, 1), 1.0) == pytest.approx(-0.5)
        assert cgf_eval(GaussianNoiseParams(0, 1), 1.0).imag == 0.0

    def test_alpha_two_skew_irrelevant(self):
        val = cgf_eval(StableNoiseParams(2, 0.7), 2.0)
        assert val == pytest.approx(-4.0 + 0.0j, abs=1e-14)

    def test_skewed_stable_value(self):
        # sympy oracle: -|q|^1.5 * (1 - i*0.5*sign(q)*tan(3*pi/4)) at q=1
        val = cgf_eval(StableNoiseParams(1.5, 0.5), 1.0)
        assert val == pytest.approx(-1.0 - 0.5j, abs=1e-14)

    def test_normalization_at_zero(self):
        for model in (GaussianNoiseParams(0.3, 2.0), StableNoiseParams(1.3, -0.4)):
            assert cgf_eval(model, 0.0) == 0.0

    def test_real_part_nonpositive_symmetric(self):
        qs = np.linspace(-8, 8, 33)
        for model in (GaussianNoiseParams(0, 1.7), StableNoiseParams(1.5, 0.0)):
            assert all(cgf_eval(model, q).real <= 0 for q in qs)


class TestTimeScaling:
    def test_gaussian_scale(self):
        scaled = cgf_time_scale(GaussianNoiseParams(0, 1), 4.0)
        assert scaled == GaussianNoiseParams(0.0, 2.0)

    def test_identity_at_tau_one(self):
        model = StableNoiseParams(1.8, 0.9)
        assert cgf_time_scale(model, 1.0) == model

    def test_tau_domain(self):
        with pytest.raises(ParameterError):
            cgf_time_scale(GaussianNoiseParams(0, 1), 0.0)

    @pytest.mark.parametrize("model", [
        GaussianNoiseParams(0.4, 1.3),
        StableNoiseParams(1.8, 0.9),
        StableNoiseParams(0.9, -0.5, 0.2, 2.0),
        StableNoiseParams(1.0, 0.0, -0.3, 0.7),
    ])
    @pytest.mark.parametrize("tau", [0.1, 1.0, 2.0, 7.0])
    def test_scaling_identity(self, model, tau):
        scaled = cgf_time_scale(model, tau)
        for q in np.linspace(-5, 5, 20):
            lhs = cgf_eval(scaled, q)
            rhs = tau * cgf_eval(model, q)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


class TestDensity:
    def test_gaussian_closed_form(self):
        assert density(GaussianNoiseParams(0, 1), 0.0) == pytest.approx(
            1.0 / math.sqrt(2 * math.pi), abs=1e-15)

    def test_cauchy_closed_form(self):
        assert density(StableNoiseParams(1, 0), 0.0) == pytest.approx(
            1.0 / math.pi, abs=1e-15)

    def test_stable_one_point_five_origin(self):
        # quadrature oracle: (1/pi) int_0^inf exp(-q^1.5) dq = Gamma(5/3)/pi
        val = density(StableNoiseParams(1.5, 0), 0.0)
        assert val == pytest.approx(GAMMA_5_3_OVER_PI, abs=1e-10)

    @pytest.mark.parametrize("alpha,beta", [(1.8, 0.9), (1.3, -0.7), (0.8, 0.9)])
    def test_against_independent_stable_oracle(self, alpha, beta):
        model = StableNoiseParams(alpha, beta)
        for z in (-6.0, -1.0, 0.0, 2.0, 8.0):
            assert density(model, z) == pytest.approx(
                stats.levy_stable.pdf(z, alpha, beta), abs=1e-9)

    def test_nonnegative_on_grid(self):
        model = StableNoiseParams(1.6, 0.8)
        assert all(density(model, z) >= 0.0 for z in np.linspace(-30, 30, 61))

    def test_alpha_two_collapse(self):
        for beta in (-0.9, 0.0, 0.5):
            stable = StableNoiseParams(2.0, beta, 0.0, 1.3)
            gauss = GaussianNoiseParams(0.0, 1.3 * math.sqrt(2))
            for z in np.linspace(-10, 10, 21):
                assert abs(density(stable, z) - density(gauss, z)) <= 1e-6

    def test_normalization(self):
        cases = [
            (GaussianNoiseParams(0.2, 1.5), 1e-8),
            (StableNoiseParams(2.0, 0.3, 0.0, 0.8), 1e-8),
            (StableNoiseParams(1.0, 0.0, 0.1, 1.2), 1e-8),
            (StableNoiseParams(1.7, 0.6), 1e-4),
            (StableNoiseParams(1.2, -0.8), 1e-4),
        ]
        for model, tol in cases:
            rho = model.rho
            lo, hi = model.nu - 50 * rho, model.nu + 50 * rho
            mass, _ = integrate.quad(lambda z: density(model, z), lo, hi,
                                     limit=400)
            mass += survival(model, hi) + (1.0 - survival(model, lo))
            assert mass == pytest.approx(1.0, abs=tol)

    def test_convergence_error_on_tiny_budget(self):
        tight = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-13, max_panels=1)
        with pytest.raises(QuadratureConvergenceError) as err:
            density(StableNoiseParams(1.5, 0.4), 7.3, tight)
        assert err.value.residual is not None


class TestSurvival:
    def test_gaussian_symmetry(self):
        assert survival(GaussianNoiseParams(0, 1), 0.0) == pytest.approx(0.5)

    def test_stable_symmetry(self):
        assert survival(StableNoiseParams(1.8, 0), 0.0) == pytest.approx(0.5, abs=1e-10)

    def test_gaussian_upper_tail_value(self):
        # high-precision erfc oracle
        assert survival(GaussianNoiseParams(0, 1), 1.959964) == pytest.approx(
            SURV_1_959964, abs=1e-12)

    @pytest.mark.parametrize("alpha,beta", [(1.8, 0.9), (1.5, 0.5), (0.8, 0.9)])
    def test_against_independent_stable_oracle(self, alpha, beta):
        model = StableNoiseParams(alpha, beta)
        for z in (-20.0, -3.0, 0.0, 4.0, 15.0):
            assert survival(model, z) == pytest.approx(
                stats.levy_stable.sf(z, alpha, beta), abs=1e-8)

    def test_monotone_nonincreasing(self):
        model = StableNoiseParams(1.4, 0.6)
        zs = np.linspace(-15, 15, 61)
        vals = [survival(model, z) for z in zs]
        assert all(a >= b - 1e-12 for a, b in zip(vals[:-1], vals[1:]))

    def test_density_is_minus_derivative(self):
        h = 1e-4
        for model in (GaussianNoiseParams(0.1, 1.2), StableNoiseParams(1.6, 0.3)):
            for z in (-4.0, -0.5, 0.0, 1.5, 5.0):
                deriv = (survival(model, z + h) - survival(model, z - h)) / (2 * h)
                assert deriv == pytest.approx(-density(model, z), abs=1e-4)


class TestSampler:
    def test_alpha_two_variance(self):
        rng = np.random.default_rng(42)
        xs = sample(StableNoiseParams(2.0, 0.6), rng, size=100_000)
        se = math.sqrt(2.0 / (xs.size - 1)) * 2.0  # var of sample variance of N(0, sqrt 2)
        assert xs.var() == pytest.approx(2.0, abs=3 * se)

    def test_deterministic_given_seed(self):
        a = sample(GaussianNoiseParams(0, 1), np.random.default_rng(7), size=10)
        b = sample(GaussianNoiseParams(0, 1), np.random.default_rng(7), size=10)
        np.testing.assert_array_equal(a, b)

    def test_skewed_sample_matches_survival(self):
        model = StableNoiseParams(1.5, 0.5)
        xs = sample(model, np.random.default_rng(123), size=100_000)
        ks = _ks_against_survival(xs, model)
        assert ks < 1.628 / math.sqrt(xs.size)  # 1% critical value

    @pytest.mark.parametrize("alpha", [0.8, 1.3, 1.8, 2.0])
    @pytest.mark.parametrize("beta", [-0.9, 0.0, 0.9])
    def test_sampler_law_grid(self, alpha, beta):
        model = StableNoiseParams(alpha, beta)
        xs = sample(model, np.random.default_rng(2_024), size=100_000)
        ks = _ks_against_survival(xs, model)
        assert ks < 1.628 / math.sqrt(xs.size)
        ref = stats.levy_stable.rvs(alpha, beta, size=100_000,
                                    random_state=999)
        two = stats.ks_2samp(xs, ref)
        assert two.pvalue > 0.01


def _ks_against_survival(xs: np.ndarray, model) -> float:
    """One-sample KS statistic against this module's survival function."""
    nodes = gof_quantile_grid(xs)
    cdf_nodes = np.array([1.0 - survival(model, z) for z in nodes])
    xs = np.sort(xs)
    cdf = np.interp(xs, nodes, cdf_nodes)
    n = xs.size
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(0, n) / n
    return max(np.max(np.abs(ecdf_hi - cdf)), np.max(np.abs(cdf - ecdf_lo)))


class TestCumulants:
    def test_gaussian_values(self):
        model = GaussianNoiseParams(3.0, 2.0)
        assert cumulants(model, 1) == 3.0
        assert cumulants(model, 2) == 4.0
        assert cumulants(model, 3) == 0.0

    def test_stable_variance_undefined(self):
        with pytest.raises(UndefinedMomentError):
            cumulants(StableNoiseParams(1.5, 0), 2)
        with pytest.raises(UndefinedMomentError):
            cumulants(StableNoiseParams(0.9, 0), 1)

    def test_order_domain(self):
        with pytest.raises(ParameterError):
            cumulants(GaussianNoiseParams(0, 1), 0)

    def test_finite_difference_oracle(self):
        # moments of exp(K) at p=0 via central differences reproduce c1, c2
        model = GaussianNoiseParams(0.0, 1.0)
        h = 1e-3

        def char(p):
            return np.exp(cgf_eval(model, p))

        m1 = (char(h) - char(-h)) / (2 * h) / 1j
        m2 = -(char(h) - 2 * char(0.0) + char(-h)) / h**2
        c1 = m1.real
        c2 = m2.real - c1**2
        assert c1 == pytest.approx(cumulants(model, 1), abs=1e-6)
        assert c2 == pytest.approx(cumulants(model, 2), abs=1e-6)
