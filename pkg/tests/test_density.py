import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfzeta import density as D
from selfzeta.errors import ConvergenceError, DomainError, NormalizationError
from selfzeta.quadrature import integrate

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_GRID = np.logspace(-3, 3, 121)


def mp_k(nu, a):
    return mpmath.besselk(nu, a)


def mp_cosh_t(x):
    x = mpmath.mpf(x)
    return 2 * mpmath.nsum(lambda n: (-1) ** n * (n + 0.5) * mpmath.exp(-(n + 0.5) ** 2 * mpmath.pi * x),
                           [0, mpmath.inf])


def mp_sinh_z(x):
    x = mpmath.mpf(x)
    pi = mpmath.pi
    return 2 * mpmath.sqrt(x) * mpmath.nsum(
        lambda n: (2 * pi ** 2 * n ** 4 * x - 3 * pi * n ** 2) * mpmath.exp(-pi * n ** 2 * x), [1, mpmath.inf])


FAMILIES = {
    "sinh_z": D.sinh_z(),
    "cosh_h1": D.cosh_h1(),
    "cosh_t": D.cosh_t(),
    "gig_a1": D.gig(1.0),
    "levy_lam1": D.levy(1.0),
    "ggc_a1_half": D.ggc_alpha(1.0, 0.5),
    "custom_exp": D.make_custom_g1(lambda x: np.exp(-x), a=1.0),
}


@pytest.fixture(params=sorted(FAMILIES), scope="module")
def family(request):
    return FAMILIES[request.param]


class TestMixingPdfValues:
    def test_levy_at_one(self):
        assert D.mixing_pdf(D.levy(1.0), 1.0) == pytest.approx(0.5 / math.sqrt(math.pi), rel=1e-15)
        assert D.mixing_pdf(D.levy(1.0), 1.0) == pytest.approx(0.282094792, abs=1e-9)

    def test_cosh_t_at_four(self):
        got = D.mixing_pdf(D.cosh_t(), 4.0)
        assert got == pytest.approx(float(mp_cosh_t(4)), rel=1e-13)
        assert got == pytest.approx(0.043213918, abs=1e-9)

    def test_gig_at_one(self):
        ref = mpmath.exp(-1) / (2 * mp_k(0.25, 1))
        assert D.mixing_pdf(D.gig(1.0), 1.0) == pytest.approx(float(ref), rel=1e-14)

    @pytest.mark.parametrize("x", [0.01, 0.3, 1.0, 2.0, 7.5])
    def test_sinh_z_matches_series_oracle(self, x):
        assert D.mixing_pdf(D.sinh_z(), x) == pytest.approx(float(mp_sinh_z(x)), rel=1e-12)

    @pytest.mark.parametrize("x", [0.02, 0.5, 1.0, 3.0, 40.0])
    def test_cosh_t_matches_series_oracle(self, x):
        assert D.mixing_pdf(D.cosh_t(), x) == pytest.approx(float(mp_cosh_t(x)), rel=1e-12)

    @given(st.floats(0.05, 20.0), st.floats(0.2, 4.0))
    def test_gig_matches_closed_form(self, x, a):
        ref = mpmath.mpf(x) ** -0.75 * mpmath.exp(-a * (x + 1 / mpmath.mpf(x)) / 2) / (2 * mp_k(0.25, a))
        assert D.mixing_pdf(D.gig(a), x) == pytest.approx(float(ref), rel=1e-13)

    def test_rejects_non_positive_x(self):
        with pytest.raises(DomainError):
            D.mixing_pdf(D.gig(1.0), 0.0)
        with pytest.raises(DomainError):
            D.mixing_pdf(D.cosh_t(), np.array([1.0, -1.0]))

    def test_series_cap_raises(self):
        with pytest.raises(ConvergenceError):
            D.mixing_pdf(D.cosh_t(n_max=2), 1.5)

    def test_bad_parameters(self):
        with pytest.raises(DomainError):
            D.gig(0.0)
        with pytest.raises(DomainError):
            D.levy(-1.0)
        with pytest.raises(DomainError):
            D.ggc_alpha(1.0, 1.5)
        with pytest.raises(DomainError):
            D.make_family("gig")


class TestFamilyInvariants:
    def test_non_negative_on_log_grid(self, family):
        assert np.all(family.pdf(LOG_GRID) >= 0.0)

    def test_reciprocal_symmetry(self, family):
        res = D.mixing_symmetry_residual(family, LOG_GRID)
        assert np.max(np.abs(res)) < 1e-10

    def test_symmetry_exact_at_one(self, family):
        assert D.mixing_symmetry_residual(family, 1.0) == 0.0

    def test_unit_mass(self, family):
        assert integrate(family.pdf, 0.0, tol=1e-14) == pytest.approx(1.0, abs=1e-8)

    def test_cf_non_increasing(self, family):
        t = np.linspace(0.0, 5.0, 1000)
        cf = D.density_cf(D.mixture(family), t)
        assert np.all(np.diff(cf) <= 1e-12)

    def test_self_reciprocal(self, family):
        f = D.mixture(family)
        t = np.linspace(0.0, 5.0, 21)
        assert np.max(np.abs(D.density_cf(f, t) - SQRT_2PI * D.mixture_pdf(f, t))) < 1e-8

    def test_mixture_even(self, family):
        f = D.mixture(family)
        x = np.array([0.3, 1.7, 4.0])
        assert np.array_equal(D.mixture_pdf(f, x), D.mixture_pdf(f, -x))


class TestSymmetryResidual:
    def test_levy_identity_to_round_off(self):
        g = D.levy(2.0)
        assert abs(D.mixing_symmetry_residual(g, 5.0)) < 1e-14 * g.pdf(5.0)

    def test_sinh_z_direct_sums(self):
        assert abs(D.mixing_symmetry_residual(D.sinh_z(), 2.0)) < 1e-10

    def test_cosh_h1_inherits_h1_symmetry(self):
        # direct summation cancels badly once y drops well below 1, so stay in [1/3, 3]
        y = np.logspace(-np.log10(3.0), np.log10(3.0), 15)
        h = D.h1_series(y)
        assert np.allclose(h, D.h1_series(1.0 / y) / y, rtol=1e-12, atol=0)
        assert np.all(h > 0)


class TestMixtureDensity:
    def test_gaussian_at_zero(self):
        assert D.mixture_pdf(D.gaussian(), 0.0) == pytest.approx(0.398942280, abs=1e-9)

    def test_gig_at_zero_matches_quadrature_oracle(self):
        g = D.gig(1.0)
        c = 1 / (2 * mp_k(0.25, 1))
        ref = mpmath.quad(lambda y: c * y ** -0.75 * mpmath.exp(-(y + 1 / y) / 2) / mpmath.sqrt(2 * mpmath.pi * y),
                          [0, 1, mpmath.inf])
        assert D.mixture_pdf(D.mixture(g), 0.0) == pytest.approx(float(ref), abs=1e-13)

    @given(st.floats(0.0, 6.0))
    @settings(max_examples=20)
    def test_gig_mixture_pdf_matches_mpmath(self, x):
        c = 1 / (2 * mp_k(0.25, 1))
        ref = mpmath.quad(lambda y: c * y ** -0.75 * mpmath.exp(-(y + 1 / y) / 2 - x * x / (2 * y))
                          / mpmath.sqrt(2 * mpmath.pi * y), [0, 1, mpmath.inf])
        assert D.mixture_pdf(D.mixture(D.gig(1.0)), x) == pytest.approx(float(ref), abs=1e-12)


class TestCharacteristicFunction:
    @pytest.mark.parametrize("f", [D.gaussian(), D.cosh_density(), D.mixture(D.levy(1.0))])
    def test_one_at_zero(self, f):
        assert D.density_cf(f, 0.0) == 1.0

    @given(st.floats(-8.0, 8.0))
    def test_cosh_closed_form(self, t):
        assert D.density_cf(D.cosh_density(), t) == pytest.approx(1 / math.cosh(math.sqrt(math.pi / 2) * t),
                                                                  rel=1e-15)

    def test_gig_bessel_oracle(self):
        ref = mpmath.mpf(0.5) ** (1 / mpmath.mpf(8)) * mp_k(0.25, mpmath.sqrt(2)) / mp_k(0.25, 1)
        assert D.density_cf(D.mixture(D.gig(1.0)), 1.0) == pytest.approx(float(ref), abs=1e-12)

    @given(st.floats(0.0, 6.0), st.floats(0.3, 3.0))
    @settings(max_examples=25)
    def test_gig_laplace_transform(self, t, a):
        # int e^(-y t^2/2) g(y) dy for the p = 1/4 GIG law
        ref = (a / (a + t * t)) ** (1 / mpmath.mpf(8)) * mp_k(0.25, mpmath.sqrt(a * (a + t * t))) / mp_k(0.25, a)
        assert D.density_cf(D.mixture(D.gig(a)), t) == pytest.approx(float(ref), abs=1e-12)

    @given(st.floats(0.0, 5.0))
    @settings(max_examples=20)
    def test_cf_even(self, t):
        f = D.mixture(D.cosh_t())
        assert D.density_cf(f, t) == D.density_cf(f, -t)


class TestNormalization:
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_ggc_half_is_levy_constant(self, lam):
        ref = 0.5 * math.sqrt(lam / math.pi) * math.exp(2 * lam)
        got = D.normalize("ggc_alpha", {"a": lam, "alpha": 0.5})
        assert abs(got - ref) / ref < 1e-10

    def test_gig_closed_form(self):
        ref = 1 / (2 * mp_k(0.25, 1))
        assert D.normalize("gig", {"a": 1.0}) == pytest.approx(float(ref), rel=1e-10)

    def test_constant_h_diverges(self):
        with pytest.raises(NormalizationError):
            D.make_custom_g1(lambda x: np.ones_like(x))
        assert issubclass(NormalizationError, ConvergenceError)

    def test_series_families_have_no_free_constant(self):
        with pytest.raises(DomainError):
            D.normalize("cosh_t")

    @given(st.floats(0.3, 3.0), st.floats(0.2, 1.0))
    @settings(max_examples=15)
    def test_ggc_constant_matches_mpmath(self, a, alpha):
        ref = 1 / mpmath.quad(lambda x: x ** -0.75 * mpmath.exp(-a * (x ** alpha + x ** -alpha)), [0, 1, mpmath.inf])
        assert D.normalize("ggc_alpha", {"a": a, "alpha": alpha}) == pytest.approx(float(ref), rel=1e-10)


class TestCustomG1:
    def test_reproduces_ggc_family_exactly(self):
        a, alpha = 1.3, 0.7
        custom = D.make_custom_g1(lambda x: np.exp(-a * x ** alpha), a=a, alpha=alpha)
        ggc = D.ggc_alpha(a, alpha)
        assert custom.norm_const == ggc.norm_const
        assert np.array_equal(custom.pdf(LOG_GRID), ggc.pdf(LOG_GRID))

    def test_exponential_h_symmetric(self):
        g = D.make_custom_g1(lambda x: np.exp(-x))
        assert abs(D.mixing_symmetry_residual(g, 3.0)) < 1e-12

    def test_increasing_h_rejected(self):
        with pytest.raises(DomainError):
            D.make_custom_g1(lambda x: 1.0 + x)

    def test_negative_h_rejected(self):
        with pytest.raises(DomainError):
            D.make_custom_g1(lambda x: -np.exp(-x))


def test_gig_mean_is_bessel_ratio():
    ref = mp_k(1.25, 1) / mp_k(0.25, 1)
    assert D.gig(1.0).moment(1.0) == pytest.approx(float(ref), rel=1e-12)


def test_specs_are_immutable():
    g = D.gig(1.0)
    with pytest.raises(AttributeError):
        g.norm_const = 2.0
