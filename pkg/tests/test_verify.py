import math

import pytest

from selfzeta import mellin as M
from selfzeta import verify as V
from selfzeta.errors import ConfigError
from selfzeta.grids import SGrid, parse_grid, standard_grid


class TestRegistry:
    def test_identities_are_disjoint(self):
        for d in V.REGISTRY.values():
            if d.kind == "identity":
                assert d.disjoint, d.name

    def test_registering_non_disjoint_identity_fails(self):
        with pytest.raises(ValueError):
            V.register(V.CheckDef("bogus", "", lambda t: abs, standard_grid, 1e-6))
        assert "bogus" not in V.REGISTRY

    def test_expected_checks_present(self):
        expected = {"gaussian_psi_xi", "cosh_psi_xi", "sinh_mixing_xi1", "sinh_mixture_xi", "h1_mixing_xi1", "h1_mixture_xi",
                    "cosh_t_mixing_xi1", "cosh_t_mixture_xi", "gig_mixing_xi1", "gig_mixture_xi", "ggc_normalizer", "mixture_factorization",
                    "custom_mixture_factorization", "eta_m", "mellin_consistency", "functional_equation", "self_reciprocal",
                    "theta_modular", "psi_reflection", "poisson_density", "sr_empirical",
                    "subordinated_variance"}
        assert expected <= set(V.REGISTRY)


class TestCheckSpec:
    def test_defaults_resolved(self):
        spec = V.CheckSpec("sinh_mixing_xi1")
        assert spec.tolerance == 1e-6 and len(spec.grid) == 15

    def test_unknown_name(self):
        with pytest.raises(ConfigError, match="nonexistent"):
            V.CheckSpec("nonexistent")

    @pytest.mark.parametrize("tol", [0.0, -1e-3, 0.5])
    def test_tolerance_range(self, tol):
        with pytest.raises(ConfigError):
            V.CheckSpec("gaussian_psi_xi", tolerance=tol)

    def test_grid_string_parsed(self):
        assert V.CheckSpec("gaussian_psi_xi", grid="real:0:1:0.5").grid.points == (0j, 0.5 + 0j, 1 + 0j)

    def test_label(self):
        assert V.CheckSpec("gig_mixing_xi1", "gig:a=2").label == "gig_mixing_xi1[gig:a=2]"


class TestSelectors:
    def test_mixing(self):
        assert V.mixing_family("gig:a=2").params == {"a": 2.0}
        assert V.mixing_family("gig:a=2") is V.mixing_family("gig:a=2")

    @pytest.mark.parametrize("bad", ["nope", "gig:a", "gig:a=x", "custom_exp:b=1"])
    def test_bad_mixing(self, bad):
        with pytest.raises(ConfigError):
            V.mixing_family(bad)

    def test_xi(self):
        assert isinstance(V.xi_function("g3:a=2"), M.ClosedG3)
        assert isinstance(V.xi_function("psi:gig:a=1"), M.FromPsi)
        with pytest.raises(ConfigError):
            V.xi_function("zeta")


class TestReports:
    def test_pass_iff_below_tolerance(self):
        spec = V.CheckSpec("gaussian_psi_xi", grid="1;2", tolerance=1e-8)
        ok = V.VerificationReport(spec, spec.grid.points, (1e-9, 0.0))
        bad = V.VerificationReport(spec, spec.grid.points, (1e-9, 1e-8))
        assert ok.passed and not bad.passed and bad.max_residual == 1e-8

    def test_nan_becomes_inf(self):
        spec = V.CheckSpec("gaussian_psi_xi", grid="1")
        r = V.VerificationReport(spec, spec.grid.points, (math.nan,))
        assert r.residuals == (math.inf,) and not r.passed

    def test_length_mismatch(self):
        spec = V.CheckSpec("gaussian_psi_xi", grid="1")
        with pytest.raises(ValueError):
            V.VerificationReport(spec, spec.grid.points, (0.0, 0.0))

    def test_schema(self):
        r = V.check_functional_equation(M.ClosedRiemann(), parse_grid("2;0.5,3"))
        d = r.to_dict()
        assert set(d) == {"check", "grid", "tolerance", "points", "max_residual", "passed", "wall_ms"}
        assert set(d["points"][0]) == {"s_re", "s_im", "residual"}
        assert r.to_dict(timing=False)["wall_ms"] is None

    def test_point_failure_is_recorded_not_raised(self):
        r = V.check_identity("gaussian_psi_xi", SGrid((2.0, 70.0)), 1e-8)
        assert r.residuals[1] == math.inf and not r.passed
        assert r.errors and r.errors[0][0] == 1
        assert r.residuals[0] < 1e-8


class TestChecks:
    def test_functional_equation_closed_forms(self):
        for xi in (M.ClosedRiemann(), M.ClosedG3(1.0)):
            assert V.check_functional_equation(xi, standard_grid(), 1e-9).passed

    def test_half_residual_is_zero(self):
        r = V.check_functional_equation(M.from_mixing(V.mixing_family("gig:a=1")), SGrid((0.5,)), 1e-30)
        assert r.residuals == (0.0,)

    def test_sinh_mixing_xi1(self):
        assert V.check_identity("sinh_mixing_xi1", parse_grid("real:-3:4:0.5"), 1e-6).passed

    def test_gig_mixing_xi1_trivial_at_one(self):
        r = V.check_identity("gig_mixing_xi1", SGrid((1.0,)), 1e-6)
        assert r.residuals[0] < 1e-12

    def test_factorization_complex_point(self):
        assert V.check_identity("mixture_factorization", SGrid((2 + 3j,)), 1e-6, target="gig:a=1").passed

    def test_self_reciprocal_direct_families_exact(self):
        for name in ("gaussian", "cosh"):
            r = V.check_self_reciprocal(name, [0.0, 0.7, 2.0, 5.0], 1e-15)
            assert r.max_residual <= 4e-16

    def test_self_reciprocal_levy(self):
        assert V.check_self_reciprocal("levy:lam=1", [k / 4 for k in range(21)], 1e-8).passed

    def test_check_identity_rejects_property(self):
        with pytest.raises(ConfigError):
            V.check_identity("functional_equation")


class TestSuite:
    def test_empty(self):
        assert V.run_suite([]) == []
        assert V.run_suite({"checks": []}) == []

    def test_unknown_name(self):
        with pytest.raises(ConfigError, match="nope"):
            V.run_suite(["nope"])

    def test_order_and_forms(self):
        reports = V.run_suite(["theta_modular@cosh", {"name": "ggc_normalizer"},
                               V.CheckSpec("functional_equation", "xi4", "1;2")])
        assert [r.check.name for r in reports] == ["theta_modular", "ggc_normalizer", "functional_equation"]
        assert all(r.passed for r in reports)

    def test_results_independent_of_thread_count(self, monkeypatch):
        cfg = [{"name": "cosh_psi_xi", "grid": "critline:1:20:4"}, "functional_equation@cosh"]
        monkeypatch.setenv("SELFZETA_THREADS", "1")
        one = [r.residuals for r in V.run_suite(cfg)]
        monkeypatch.setenv("SELFZETA_THREADS", "3")
        three = [r.residuals for r in V.run_suite(cfg)]
        assert one == three

    def test_bad_thread_env(self, monkeypatch):
        monkeypatch.setenv("SELFZETA_THREADS", "zero")
        with pytest.raises(ConfigError):
            V.thread_count()

    def test_default_suite_covers_registry(self):
        names = {s.name for s in V.default_suite()}
        assert names == set(V.REGISTRY)
