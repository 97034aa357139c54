import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfzeta import density as D
from selfzeta import mellin as M
from selfzeta import theta as T
from selfzeta.errors import ConvergenceError, DomainError
from selfzeta.specfun import xi_closed_form

import oracles

GAUSS = T.theta_series(D.gaussian())
COSH = T.theta_series(D.cosh_density())
GIG1 = D.gig(1.0)
LEVY1 = D.levy(1.0)


REAL_S = [k / 2 for k in range(-6, 9)]
strip = st.builds(complex, st.floats(-2.0, 3.0), st.floats(-25.0, 25.0))


class TestEtaDirect:
    def test_gaussian_at_two(self):
        assert M.eta_direct(GAUSS, 2) == pytest.approx(math.pi / 12, rel=1e-13)

    def test_cosh_at_two(self):
        ref = 2 / mpmath.pi ** 2 * mpmath.zeta(2) * mpmath.catalan
        assert M.eta_direct(COSH, 2).real == pytest.approx(float(ref), rel=1e-13)
        assert M.eta_direct(COSH, 2).real == pytest.approx(0.305322, abs=1e-6)

    @pytest.mark.parametrize("s", [1, 0.5, -2 + 1j])
    def test_domain(self, s):
        with pytest.raises(DomainError):
            M.eta_direct(GAUSS, s)

    @given(st.builds(complex, st.floats(1.2, 4.0), st.floats(-10.0, 10.0)))
    @settings(max_examples=25)
    def test_gaussian_matches_riemann_closed_form(self, s):
        ref = 0.5 * mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s)
        assert abs(M.eta_direct(GAUSS, s) - complex(ref)) < 1e-10


class TestXiEntire:
    @pytest.mark.parametrize("s", [0, 1])
    def test_limits(self, s):
        assert M.xi_entire(GAUSS, s) == pytest.approx(0.5, abs=1e-14)
        assert M.xi_entire(COSH, s) == pytest.approx(0.5, abs=1e-14)

    def test_first_zero(self):
        s = 0.5 + 14.134725j
        assert abs(M.xi_entire(GAUSS, s) - xi_closed_form(s)) < 1e-8

    @given(strip)
    @settings(max_examples=40)
    def test_gaussian_against_mpmath(self, s):
        assert abs(M.xi_entire(GAUSS, s) - oracles.xi(s)) < 1e-8

    @given(strip)
    @settings(max_examples=40)
    def test_cosh_against_mpmath(self, s):
        assert abs(M.xi_entire(COSH, s) - oracles.xic(s)) < 1e-8

    @given(strip)
    @settings(max_examples=30)
    def test_functional_equation(self, s):
        assert abs(M.xi_entire(COSH, s) - M.xi_entire(COSH, 1 - s)) < 1e-9

    @pytest.mark.parametrize("s", [1.5, 2, 3, 2 + 2j])
    @pytest.mark.parametrize("ts", [GAUSS, COSH], ids=["gaussian", "cosh"])
    def test_consistent_with_direct_transform(self, ts, s):
        s = complex(s)
        assert abs(s * (s - 1) * M.eta_direct(ts, s) - M.xi_entire(ts, s)) < 1e-8

    def test_real_part_guard(self):
        with pytest.raises(ConvergenceError):
            M.xi_entire(GAUSS, 61)


class TestXi1:
    @pytest.mark.parametrize("g", [GIG1, LEVY1, D.cosh_t(), D.sinh_z(), D.ggc_alpha(1.0, 0.5)],
                             ids=lambda g: g.label)
    @pytest.mark.parametrize("s", [0, 1])
    def test_unit_at_limits(self, g, s):
        assert M.xi1_entire(g, s) == pytest.approx(1.0, abs=1e-8)

    def test_sinh_z_is_twice_riemann(self):
        assert M.xi1_entire(D.sinh_z(), 2) == pytest.approx(2 * xi_closed_form(2), abs=1e-10)

    @pytest.mark.parametrize("s", REAL_S)
    def test_gig_bessel_ratio(self, s):
        assert abs(M.xi1_entire(GIG1, s) - oracles.g3(s, 1)) < 1e-8

    @pytest.mark.parametrize("s", REAL_S)
    def test_cosh_t_is_xi4(self, s):
        assert abs(M.xi1_entire(D.cosh_t(), s) - oracles.xi4(s)) < 1e-8

    @pytest.mark.parametrize("s", REAL_S)
    def test_cosh_h1_is_twice_xic(self, s):
        ref = oracles.xic(s)
        assert abs(M.xi1_entire(D.cosh_h1(), s) - 2 * ref) < 1e-6

    @given(strip)
    @settings(max_examples=30)
    def test_symmetric_by_construction(self, s):
        a, b = M.xi1_entire(LEVY1, s), M.xi1_entire(LEVY1, 1 - s)
        assert abs(a - b) <= 1e-14 * max(abs(a), 1.0)


class TestXi2:
    @pytest.mark.parametrize("g", [GIG1, LEVY1, D.cosh_t()], ids=lambda g: g.label)
    @pytest.mark.parametrize("s", [-2, 0.5, 2, 3.5, 2 + 3j, 0.5 + 14.134725j])
    def test_product_matches_psi_pipeline(self, g, s):
        via_psi = M.from_mixing(g)(s)
        assert abs(M.xi2_product(g, s) - via_psi) < 1e-6

    @pytest.mark.parametrize("g", [GIG1, D.sinh_z()], ids=lambda g: g.label)
    def test_limits(self, g):
        assert M.xi2_product(g, 0) == pytest.approx(0.5, abs=1e-8)
        assert M.xi2_product(g, 1) == pytest.approx(0.5, abs=1e-8)

    @pytest.mark.parametrize("s", [-1.5, 0.25, 2.0, 1 + 5j])
    def test_sinh_z_is_twice_xi_squared(self, s):
        assert abs(M.xi2_product(D.sinh_z(), s) - 2 * xi_closed_form(s) ** 2) < 1e-8

    def test_eta_mixture_closed(self):
        s = 2.5 + 1j
        ref = M.xi2_product(GIG1, s) / (s * (s - 1))
        assert abs(M.eta_mixture_closed(GIG1, s) - ref) < 1e-12
        with pytest.raises(DomainError):
            M.eta_mixture_closed(GIG1, 0.5)


class TestClosedForms:
    def test_xi4_anchor_values(self):
        assert M.xi4_closed(1) == pytest.approx(1.0, abs=1e-14)
        assert M.xi4_closed(0) == pytest.approx(1.0, abs=1e-14)
        assert abs(M.xi4_closed(3) - M.xi4_closed(-2)) < 1e-10

    def test_xic_anchor_values(self):
        assert M.xic_closed(1) == 0.5
        assert M.xic_closed(0) == 0.5
        assert M.xic_closed(2).real == pytest.approx(oracles.xic(2).real, rel=1e-13)
        assert M.xic_closed(2).real == pytest.approx(0.610644, abs=1e-6)
        assert abs(M.xic_closed(2) - M.xic_closed(-1)) < 1e-9

    @given(strip)
    @settings(max_examples=40)
    def test_xic_against_mpmath(self, s):
        ref = oracles.xic(s)
        assert abs(M.xic_closed(s) - ref) <= 1e-11 * max(abs(ref), 1.0)

    @given(st.builds(complex, st.floats(0.05, 4.0), st.floats(-25.0, 25.0)))
    @settings(max_examples=40)
    def test_xi4_against_mpmath(self, s):
        ref = oracles.xi4(s)
        assert abs(M.xi4_closed(s) - ref) <= 1e-11 * max(abs(ref), 1.0)

    @given(strip, st.sampled_from([0.5, 1.0, 2.0]))
    @settings(max_examples=30)
    def test_g3_against_mpmath(self, s, a):
        ref = oracles.g3(s, a)
        assert abs(M.xi_g3_closed(s, a) - ref) <= 1e-11 * max(abs(ref), 1.0)

    def test_g3_unit_at_one(self):
        assert M.xi_g3_closed(1, 1.0) == 1.0


class TestComposition:
    def test_product_and_scaling(self):
        f = 2.0 * (M.ClosedRiemann() * M.ClosedXi4())
        s = 0.3 + 2j
        assert f(s) == 2.0 * xi_closed_form(s) * M.xi4_closed(s)
        assert "riemann" in f.label and "xi4" in f.label

    def test_from_mixing_label(self):
        assert M.from_mixing(GIG1).label == "entire[gig(a=1)]"

    @pytest.mark.parametrize("xi", [M.ClosedRiemann(), M.ClosedCosh(), M.ClosedXi4(), M.ClosedG3(0.5),
                                    M.ClosedG3(2.0)], ids=lambda x: x.label)
    def test_half_is_exact_fixed_point(self, xi):
        assert xi(0.5) == xi(1 - 0.5)
