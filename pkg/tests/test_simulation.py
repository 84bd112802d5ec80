"""Sampling and validation-harness checks: distributional correctness of
the generator against classical bounds, closed-form purity quantities, and
the named validation registry."""

import numpy as np
import pytest
from scipy import integrate, stats

from fdpkit.estimation import dkw_epsilon
from fdpkit.families import UserCdf, make_family
from fdpkit.model import MixtureModel
from fdpkit.simulation import (
    VALIDATION_TARGETS,
    ScenarioConfig,
    generate_sample,
    purity_quantities,
    pvalue_density_two_sided_normal,
    run_validation,
)


class TestScenarioConfig:
    def test_roundtrip(self):
        cfg = ScenarioConfig(m=50, a=0.3, family="two-sided-normal",
                             params={"theta": 2.0}, seed=9)
        assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg

    def test_from_dict_defaults(self):
        cfg = ScenarioConfig.from_dict({"m": 10, "a": 0.0})
        assert cfg.family == "one-sided-normal"
        assert cfg.params == {} and cfg.seed == 0

    def test_validation(self):
        with pytest.raises(ValueError):
            ScenarioConfig(m=0, a=0.5)
        with pytest.raises(ValueError):
            ScenarioConfig(m=10, a=-0.1)
        with pytest.raises(ValueError):
            ScenarioConfig(m=10, a=1.1)

    def test_pure_null_needs_no_family(self):
        model = ScenarioConfig(m=10, a=0.0, family="no-such-family").model()
        assert model.a == 0.0 and model.F is None

    def test_unknown_family_raises_when_mixed(self):
        with pytest.raises(ValueError):
            ScenarioConfig(m=10, a=0.5, family="no-such-family").model()


class TestGenerateSample:
    def test_deterministic_per_rep(self):
        cfg = ScenarioConfig(m=100, a=0.4, params={"theta": 3.0}, seed=5)
        s1 = generate_sample(cfg, 7)
        s2 = generate_sample(cfg, 7)
        assert np.array_equal(s1.pvalues, s2.pvalues)
        assert np.array_equal(s1.labels, s2.labels)
        s3 = generate_sample(cfg, 8)
        assert not np.array_equal(s1.pvalues, s3.pvalues)

    def test_pure_null_is_uniform(self):
        cfg = ScenarioConfig(m=1000, a=0.0, seed=6)
        pooled = np.concatenate([generate_sample(cfg, i).pvalues for i in range(100)])
        assert np.all(generate_sample(cfg, 0).labels == 0)
        assert stats.kstest(pooled, "uniform").pvalue > 0.01

    def test_pure_alternative_matches_family_cdf(self):
        cfg = ScenarioConfig(m=100_000, a=1.0, params={"theta": 3.0}, seed=7)
        s = generate_sample(cfg, 0)
        assert np.all(s.labels == 1)
        F = make_family("one-sided-normal", {"theta": 3.0}).cdf
        grid = np.linspace(1e-6, 1.0, 2001)
        emp = np.searchsorted(np.sort(s.pvalues), grid, side="right") / s.pvalues.size
        assert np.max(np.abs(emp - F(grid))) < dkw_epsilon(s.pvalues.size, 0.001)

    def test_mixture_matches_marginal_cdf(self):
        cfg = ScenarioConfig(m=100_000, a=0.25, params={"theta": 3.0}, seed=8)
        s = generate_sample(cfg, 0)
        model = cfg.model()
        grid = np.linspace(1e-6, 1.0, 2001)
        emp = np.searchsorted(np.sort(s.pvalues), grid, side="right") / s.pvalues.size
        assert np.max(np.abs(emp - model.cdf(grid))) < dkw_epsilon(s.pvalues.size, 0.001)

    def test_label_frequency(self):
        cfg = ScenarioConfig(m=50_000, a=0.3, params={"theta": 3.0}, seed=9)
        lab = generate_sample(cfg, 0).labels
        se = np.sqrt(0.3 * 0.7 / lab.size)
        assert abs(lab.mean() - 0.3) < 5 * se


class TestPurityQuantities:
    def test_square_root_family_split(self):
        model = MixtureModel(0.4, make_family("square-root", {}))
        pur = purity_quantities(model)
        assert pur.zeta == pytest.approx(0.5, abs=1e-9)
        assert pur.a_lower == pytest.approx(0.2, abs=1e-9)
        assert pur.f_lower(0.25) == pytest.approx(2 * 0.5 - 0.25, abs=1e-9)
        ts = np.linspace(0.0, 1.0, 101)
        vals = np.asarray(pur.f_lower(ts))
        assert vals[0] == pytest.approx(0.0, abs=1e-12)
        assert vals[-1] == pytest.approx(1.0, abs=1e-9)
        assert np.all(np.diff(vals) >= -1e-12)

    def test_vanishing_tail_density_keeps_everything(self):
        fam = make_family("one-sided-normal", {"theta": 3.0})
        model = MixtureModel(0.25, fam)
        pur = purity_quantities(model)
        assert pur.zeta == pytest.approx(1.0, abs=1e-9)
        assert pur.a_lower == pytest.approx(0.25, abs=1e-9)
        for t in (0.1, 0.5, 0.9):
            assert pur.f_lower(t) == pytest.approx(float(fam.cdf(t)), abs=1e-9)

    def test_two_sided_pins(self):
        model = MixtureModel(0.25, make_family("two-sided-normal", {"theta": 3.0}))
        pur = purity_quantities(model)
        assert pur.zeta == pytest.approx(1 - np.exp(-4.5), abs=1e-9)
        assert pur.zeta == pytest.approx(0.9888910034617577, abs=1e-9)
        assert pur.a_lower == pytest.approx(0.24722275086543943, abs=1e-9)

    def test_uniform_alternative_has_no_identifiable_part(self):
        model = MixtureModel(0.5, make_family("beta", {"beta": 1.0}))
        pur = purity_quantities(model)
        assert pur.zeta == 0.0
        assert pur.a_lower == 0.0
        assert pur.f_lower is None

    def test_missing_density_is_rejected(self):
        fam = UserCdf(lambda t: np.asarray(t, dtype=float) ** 2)
        with pytest.raises(ValueError, match="density"):
            purity_quantities(MixtureModel(0.5, fam))


class TestPvalueDensity:
    def test_endpoint_value(self):
        # at p = 1 the two-sided density collapses to the pure Gaussian
        # factor exp(-n theta^2 / 2)
        assert pvalue_density_two_sided_normal(3.0, 1, 1.0) == pytest.approx(
            np.exp(-4.5), rel=1e-12)
        assert pvalue_density_two_sided_normal(1.5, 4, 1.0) == pytest.approx(
            np.exp(-0.5 * 4 * 1.5**2), rel=1e-12)

    def test_zero_effect_is_uniform(self):
        ts = np.linspace(0.01, 1.0, 25)
        np.testing.assert_allclose(pvalue_density_two_sided_normal(0.0, 3, ts), 1.0, atol=1e-12)

    def test_integrates_to_one(self):
        val, err = integrate.quad(
            lambda t: pvalue_density_two_sided_normal(2.0, 2, t), 0.0, 1.0, limit=200)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_domain_validation(self):
        for bad in (-0.1, 1.1, np.nan):
            with pytest.raises(ValueError, match="p must lie"):
                pvalue_density_two_sided_normal(2.0, 1, bad)


class TestValidationHarness:
    def test_registry_names(self):
        assert set(VALIDATION_TARGETS) == {
            "fdp-mean", "fnp-mean", "storey-clt", "storey-degenerate",
            "null-floor-coverage", "projection-bound", "lcm-contraction",
            "fdp-kernel", "qhat-kernel", "qinv-kernel-identity",
            "storey-kernel", "plugin-known-a", "plugin-estimated-a",
            "rate-ceiling-known-a", "envelope-coverage",
            "count-envelope-coverage", "label-set-coverage",
            "achievable-oracle",
        }

    def test_unknown_target(self):
        with pytest.raises(ValueError, match="unknown validation target"):
            run_validation({}, "no-such-check")

    def test_deterministic_reports(self):
        cfg = {"reps": 30, "m": 300}
        r1 = run_validation(cfg, "projection-bound")
        r2 = run_validation(cfg, "projection-bound")
        assert r1 == r2

    def test_exact_identity_target(self):
        r = run_validation({}, "qinv-kernel-identity")
        assert r["passed"] is True
        assert r["worst_abs_diff"] < 1e-10

    def test_reduced_scale_targets_pass(self):
        quick = [
            ("fdp-mean", {"reps": 2000, "m": 100}),
            ("projection-bound", {"reps": 30, "m": 300}),
            ("lcm-contraction", {"reps": 30, "m": 300}),
            ("null-floor-coverage", {"reps": 300, "m": 400}),
        ]
        for name, cfg in quick:
            r = run_validation(cfg, name)
            assert r["passed"] is True, (name, r)
            assert r["target"] == name
