import numpy as np
import pytest

from cpscores import (
    DataError,
    DataMatrix,
    ScoreMatrix,
    SemModel,
    StructuralError,
    closed_form_regression_determinacy,
    combined_factor_corr,
    cp_transform,
    determinacy_endo,
    determinacy_exo,
    joint_regression_scores,
    regression_score_cov_exo,
    regression_scores_endo,
    regression_scores_exo,
)
from cpscores.determinacy import NORMALIZER_VARIANCE
from cpscores.simulate import SimulationSpec, random_model, simulate_dataset


def simulate(model, n=10_000, seed=7):
    return simulate_dataset(SimulationSpec(model, n, seed))


class TestDeterminacyExo:
    def test_example_reference_values(self, model):
        x_data, y_data, _ = simulate(model, seed=0)
        reg = regression_scores_exo(model, x_data)
        plain = determinacy_exo(reg, x_data, model)
        assert plain.coefficients == pytest.approx([0.97, 0.97, 0.97], abs=0.02)
        proxy = joint_regression_scores(model, x_data, y_data)
        cp = cp_transform(proxy, combined_factor_corr(model))
        cp_rep = determinacy_exo(cp.select(model.xi_labels), x_data, model)
        assert cp_rep.coefficients == pytest.approx([0.97, 0.97, 0.97], abs=0.02)

    def test_matches_closed_form_oracle(self, model):
        x_data, _, _ = simulate(model, seed=5)
        reg = regression_scores_exo(model, x_data)
        observed = determinacy_exo(reg, x_data, model).coefficients
        oracle = closed_form_regression_determinacy(model, "exogenous").coefficients
        assert observed == pytest.approx(oracle, abs=0.02)

    def test_independent_scores_near_zero(self, model, rng):
        x_data, _, _ = simulate(model, seed=9)
        noise = ScoreMatrix(
            rng.standard_normal((x_data.n_cases, 3)), model.xi_labels
        )
        report = determinacy_exo(noise, x_data, model)
        assert np.max(np.abs(report.coefficients)) < 0.03

    def test_scale_invariance(self, model):
        x_data, _, _ = simulate(model, n=500, seed=1)
        reg = regression_scores_exo(model, x_data)
        base = determinacy_exo(reg, x_data, model).coefficients
        rescaled = ScoreMatrix(
            reg.values * np.array([5.0, 0.02, 17.0]), reg.labels, reg.blocks,
            reg.provenance,
        )
        assert determinacy_exo(rescaled, x_data, model).coefficients == pytest.approx(
            base, abs=1e-10
        )

    def test_row_mismatch(self, model):
        x_data, _, _ = simulate(model, n=50, seed=1)
        scores = ScoreMatrix(np.zeros((49, 3)) + np.eye(49, 3), model.xi_labels)
        with pytest.raises(StructuralError, match="rows"):
            determinacy_exo(scores, x_data, model)

    def test_zero_variance_rejected(self, model):
        x_data, _, _ = simulate(model, n=50, seed=1)
        scores = ScoreMatrix(np.ones((50, 3)), model.xi_labels)
        with pytest.raises(DataError, match="variance"):
            determinacy_exo(scores, x_data, model)


class TestDeterminacyEndo:
    def test_example_reference_values(self, model):
        x_data, y_data, _ = simulate(model, seed=0)
        reg = regression_scores_endo(model, y_data)
        plain = determinacy_endo(reg, y_data, model)
        # reference endogenous row (.97, .85); exact regression scores for a
        # factor with near-unit loadings sit at the top of the band
        assert plain.coefficients[0] == pytest.approx(0.97, abs=0.02)
        assert plain.coefficients[1] == pytest.approx(0.85, abs=0.02)
        proxy = joint_regression_scores(model, x_data, y_data)
        cp = cp_transform(proxy, combined_factor_corr(model))
        cp_rep = determinacy_endo(cp.select(model.eta_labels), y_data, model)
        assert cp_rep.coefficients[0] == pytest.approx(0.99, abs=0.02)
        assert cp_rep.coefficients[1] == pytest.approx(0.82, abs=0.02)

    def test_independent_scores_near_zero(self, model, rng):
        _, y_data, _ = simulate(model, seed=3)
        noise = ScoreMatrix(
            rng.standard_normal((y_data.n_cases, 2)), model.eta_labels,
            ("endogenous", "endogenous"),
        )
        assert np.max(np.abs(
            determinacy_endo(noise, y_data, model).coefficients)) < 0.03

    def test_matches_closed_form_oracle(self, model):
        _, y_data, _ = simulate(model, seed=13)
        reg = regression_scores_endo(model, y_data)
        observed = determinacy_endo(reg, y_data, model).coefficients
        oracle = closed_form_regression_determinacy(model, "endogenous").coefficients
        assert observed == pytest.approx(oracle, abs=0.02)

    def test_variance_normalizer_variant(self, model):
        _, y_data, _ = simulate(model, n=2_000, seed=4)
        reg = regression_scores_endo(model, y_data)
        sd_report = determinacy_endo(reg, y_data, model)
        var_report = determinacy_endo(
            reg, y_data, model, normalizer=NORMALIZER_VARIANCE
        )
        assert var_report.variant == "endogenous-variance-normalized"
        # the variance variant divides by an extra factor of the sd
        sds = np.std(reg.values - reg.values.mean(0), axis=0, ddof=1)
        assert var_report.coefficients == pytest.approx(
            sd_report.coefficients / sds, abs=1e-10
        )


class TestClosedForm:
    def test_example_exogenous_row(self, model):
        report = closed_form_regression_determinacy(model, "exogenous")
        assert report.coefficients == pytest.approx([0.97, 0.97, 0.97], abs=0.005)
        assert report.variant == "closed-form"
        # oracle: sqrt of the diagonal of the score covariance
        assert report.coefficients == pytest.approx(
            np.sqrt(np.diag(regression_score_cov_exo(model))), abs=1e-12
        )

    def test_single_indicator_equals_loading(self):
        lam = 0.63
        m = SemModel(
            lambda_x=np.array([[lam]]),
            phi=np.eye(1),
            lambda_y=np.array([[0.6]]),
            gamma=np.array([[0.2]]),
            eta_corr=np.eye(1),
        )
        report = closed_form_regression_determinacy(m, "exogenous")
        assert report.coefficients[0] == pytest.approx(lam, abs=1e-12)

    def test_perfect_indicators_approach_one(self):
        m = SemModel(
            lambda_x=np.array([[0.9999], [0.9999]]),
            phi=np.eye(1),
            lambda_y=np.array([[0.6]]),
            gamma=np.array([[0.2]]),
            eta_corr=np.eye(1),
        )
        report = closed_form_regression_determinacy(m, "exogenous")
        assert report.coefficients[0] > 0.9999

    def test_unknown_block(self, model):
        with pytest.raises(StructuralError):
            closed_form_regression_determinacy(model, "sideways")


def test_regression_determinacy_converges_across_random_models(rng):
    for seed in range(5):
        m = random_model(rng)
        x_data, _, _ = simulate(m, n=10_000, seed=seed)
        reg = regression_scores_exo(m, x_data)
        observed = determinacy_exo(reg, x_data, m).coefficients
        oracle = closed_form_regression_determinacy(m, "exogenous").coefficients
        assert observed == pytest.approx(oracle, abs=0.02)


def test_cp_determinacy_not_above_regression_at_population(rng):
    # population-level: the regression score maximizes determinacy, so the
    # correlation-preserving weights cannot beat it (weight-matrix algebra)
    from cpscores import implied_cov_x, sym_sqrt, sym_inv_sqrt
    from cpscores.scores import regression_weights_exo

    for _ in range(5):
        m = random_model(rng)
        sigma = implied_cov_x(m)
        w_reg = regression_weights_exo(m)
        a = regression_score_cov_exo(m)
        d_inv = np.diag(1.0 / np.sqrt(np.diag(a)))
        r = d_inv @ a @ d_inv
        w_cp = sym_sqrt(m.phi.values) @ sym_inv_sqrt(r) @ d_inv @ w_reg
        # determinacy of a weight matrix w: corr(w x, factor)
        cross = w_cp @ m.lambda_x @ m.phi.values
        var = np.diag(w_cp @ sigma @ w_cp.T)
        det_cp = np.diag(cross) / np.sqrt(var)
        det_reg = np.sqrt(np.diag(a))
        assert np.all(det_cp <= det_reg + 1e-9)
