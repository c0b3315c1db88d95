import numpy as np
import pytest
from scipy.stats import kendalltau, kurtosis

from depcens import CopulaFamily, EstimationError, InputError, ModelParams
from depcens.estimator import FitConfig
from depcens.simulate import (
    Scenario,
    ScenarioConfig,
    TransformKind,
    TrueModel,
    cubic,
    cubic_inverse,
    generate_dataset,
    generate_scenario2,
    run_monte_carlo,
    scenario_fit_spec,
    scenario_true_model,
    yeo_johnson,
    yeo_johnson_inverse,
)
from depcens.marginals import lambda_hazard


class TestYeoJohnson:
    def test_identity_branch(self):
        z = np.linspace(-5, 5, 21)
        assert np.allclose(yeo_johnson(1.0, z), z, atol=1e-14)

    def test_positive_branch(self):
        assert yeo_johnson(0.5, 3.0) == pytest.approx(2.0, abs=1e-14)

    def test_negative_branch(self):
        assert yeo_johnson(0.5, -3.0) == pytest.approx(-14.0 / 3.0, abs=1e-12)

    def test_log_branches(self):
        assert yeo_johnson(0.0, 2.0) == pytest.approx(np.log(3.0))
        assert yeo_johnson(2.0, -2.0) == pytest.approx(-np.log(3.0))

    def test_anchored_and_increasing(self):
        for alpha in (0.0, 0.5, 1.3, 2.0):
            assert yeo_johnson(alpha, 0.0) == 0.0
            z = np.linspace(-10, 10, 201)
            assert np.all(np.diff(yeo_johnson(alpha, z)) > 0)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 1.7, 2.0])
    def test_roundtrip(self, alpha):
        z = np.linspace(-10, 10, 101)
        back = yeo_johnson_inverse(alpha, yeo_johnson(alpha, z))
        assert np.max(np.abs(back - z)) < 1e-10

    def test_domain(self):
        with pytest.raises(InputError):
            yeo_johnson(2.5, 1.0)


class TestCubic:
    def test_roundtrip(self):
        z = np.linspace(-10, 10, 101)
        assert np.max(np.abs(cubic_inverse(cubic(z)) - z)) < 1e-10

    def test_sign_preserving(self):
        assert cubic_inverse(-8.0) == pytest.approx(-2.0)


class TestGenerateDataset:
    def test_determinism(self, s1_model):
        a, _ = generate_dataset(s1_model, 100, np.random.default_rng(4))
        b, _ = generate_dataset(s1_model, 100, np.random.default_rng(4))
        assert np.array_equal(a.z, b.z) and np.array_equal(a.delta, b.delta)

    def test_censoring_structure(self, s1_model):
        data, truth = generate_dataset(s1_model, 2000, np.random.default_rng(5))
        z = np.minimum(np.minimum(truth["t"], truth["c"]), truth["a"])
        assert np.allclose(data.z, z)
        assert np.all(data.delta + data.xi <= 1)
        assert truth["prop_event"] + truth["prop_depcens"] + truth["prop_admin"] == pytest.approx(1.0)

    @pytest.mark.xfail(
        strict=True,
        reason="the printed simulation design yields roughly 42% dependent and "
               "26% administrative censoring; the documented 35%/15% mix is not "
               "attainable under it (see the decisions ledger)",
    )
    def test_documented_censoring_proportions(self, s1_model):
        _, truth = generate_dataset(s1_model, 5000, np.random.default_rng(6))
        assert truth["prop_depcens"] == pytest.approx(0.35, abs=0.05)
        assert truth["prop_admin"] == pytest.approx(0.15, abs=0.05)

    def test_symmetric_design_balances_indicators(self):
        model = TrueModel(
            params=ModelParams(beta=(0.5, 0.9), eta=(0.5, 0.9), lambda_t=0.7,
                               lambda_c=0.7, r=1e-9),
            transform_kind=TransformKind.YEO_JOHNSON,
            copula=CopulaFamily.FRANK,
            marginal_t=lambda_hazard(0.7),
            marginal_c=lambda_hazard(0.7),
        )
        _, truth = generate_dataset(model, 5000, np.random.default_rng(7))
        assert truth["prop_event"] == pytest.approx(truth["prop_depcens"], abs=0.03)


class TestScenario2:
    def test_heavy_tails(self):
        _, truth = generate_scenario2(8.0, 5000, np.random.default_rng(8))
        assert kurtosis(truth["eps_t"], fisher=False) > 3.0

    def test_copula_invariant_to_margins(self, s1_model):
        _, t_frank = generate_dataset(s1_model, 5000, np.random.default_rng(9))
        _, t_t8 = generate_scenario2(8.0, 5000, np.random.default_rng(9))
        tau1 = kendalltau(t_frank["eps_t"], t_frank["eps_c"]).statistic
        tau2 = kendalltau(t_t8["eps_t"], t_t8["eps_c"]).statistic
        assert tau1 == pytest.approx(0.666, abs=0.03)
        assert tau2 == pytest.approx(0.666, abs=0.03)

    def test_determinism(self):
        a, _ = generate_scenario2(2.0, 50, np.random.default_rng(10))
        b, _ = generate_scenario2(2.0, 50, np.random.default_rng(10))
        assert np.array_equal(a.z, b.z)

    def test_domain(self):
        with pytest.raises(InputError):
            generate_scenario2(-1.0, 50, np.random.default_rng(0))


class TestScenarioWiring:
    def test_fit_specs(self):
        assert scenario_fit_spec(Scenario.S1_H1).copula is CopulaFamily.FRANK
        assert scenario_fit_spec(Scenario.S3_GUMBEL).copula is CopulaFamily.GUMBEL
        assert scenario_fit_spec(Scenario.S3_GAUSSIAN).copula is CopulaFamily.GAUSSIAN

    def test_s1_h2_is_cubic(self):
        model = scenario_true_model(Scenario.S1_H2)
        assert model.transform_kind is TransformKind.CUBIC
        assert model.transform(2.0) == 8.0

    def test_config_validation(self):
        with pytest.raises(InputError):
            ScenarioConfig(Scenario.S1_H1, n=10)
        with pytest.raises(InputError):
            ScenarioConfig(Scenario.S1_H1, runs=0)


class TestRunMonteCarlo:
    def test_small_study_table(self):
        cfg = ScenarioConfig(Scenario.S1_H1, n=120, runs=3, bootstrap_b=0, seed=3)
        summary = run_monte_carlo(cfg, FitConfig(max_outer_iters=120), threads=2)
        assert summary.n_converged >= 2
        names = [row["parameter"] for row in summary.rows()]
        assert names == ["beta1", "beta2", "eta1", "eta2", "lambda_t", "lambda_c", "r", "tau"]
        for row in summary.rows():
            assert np.isfinite(row["bias"]) or np.isnan(row["bias"])

    def test_deterministic(self):
        cfg = ScenarioConfig(Scenario.S1_H1, n=120, runs=2, bootstrap_b=0, seed=4)
        a = run_monte_carlo(cfg, FitConfig(max_outer_iters=80), threads=1)
        b = run_monte_carlo(cfg, FitConfig(max_outer_iters=80), threads=2)
        assert np.array_equal(a.bias, b.bias)
