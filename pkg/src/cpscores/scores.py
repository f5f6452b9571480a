"""Factor score families and the correlation-preserving transformation.

Score construction comes in two routes:

* the data route: take an existing score matrix (typically mean plausible
  values or regression scores), standardize it, and rotate it with
  ``C^{1/2} C_P^{-1/2}`` so its sample correlation becomes the model-implied
  factor correlation C (:func:`cp_transform`);
* the parameter route: build the correlation-preserving scores directly
  from model parameters and raw indicator data, either by substituting the
  regression-score moments into the transformation
  (:func:`cp_scores_from_params`) or by rescaling the orthogonal score
  (:func:`cp_scores_from_orthogonal`).

All functions are pure; score matrices are centered internally where the
construction requires it.
"""

from __future__ import annotations

import numpy as np

from .containers import ENDOGENOUS, EXOGENOUS, FactorCorr, ScoreMatrix, DataMatrix
from .errors import StructuralError
from .linalg import (
    center_columns,
    mean_center,
    row_standardize,
    sample_corr,
    sym_inv_sqrt,
    sym_sqrt,
)
from .model import SemModel, combined_factor_corr, implied_cov_x, implied_cov_y

PROV_REGRESSION = "regression"
PROV_ORTHOGONAL = "orthogonal"
PROV_CP = "correlation-preserving"


def _check_data(data: DataMatrix, expected: int, what: str) -> np.ndarray:
    if data.n_vars != expected:
        raise StructuralError(
            f"{what}: data has {data.n_vars} columns, model expects {expected}"
        )
    return center_columns(data.values)


def _solve_spd(sigma, rhs, what):
    try:
        return np.linalg.solve(sigma, rhs)
    except np.linalg.LinAlgError as exc:
        raise StructuralError(f"{what}: implied covariance is singular") from exc


def regression_weights_exo(model: SemModel) -> np.ndarray:
    """Weight matrix of the best linear predictor of the exogenous factors
    from the x indicators:  phi lambda_x' sigma_x^{-1}."""
    sigma_x = implied_cov_x(model)
    return model.phi.values @ _solve_spd(sigma_x, model.lambda_x, "sigma_x").T


def regression_weights_endo(model: SemModel) -> np.ndarray:
    """Analogue for the endogenous factors from the y indicators."""
    sigma_y = implied_cov_y(model)
    return model.eta_cov() @ _solve_spd(sigma_y, model.lambda_y, "sigma_y").T


def regression_scores_exo(model: SemModel, x_data: DataMatrix) -> ScoreMatrix:
    """Regression factor scores for the exogenous factors."""
    x = _check_data(x_data, model.n_x, "regression_scores_exo")
    return ScoreMatrix(
        x @ regression_weights_exo(model).T,
        model.xi_labels,
        (EXOGENOUS,) * model.n_xi,
        PROV_REGRESSION,
    )


def regression_scores_endo(model: SemModel, y_data: DataMatrix) -> ScoreMatrix:
    """Regression factor scores for the endogenous factors."""
    y = _check_data(y_data, model.n_y, "regression_scores_endo")
    return ScoreMatrix(
        y @ regression_weights_endo(model).T,
        model.eta_labels,
        (ENDOGENOUS,) * model.n_eta,
        PROV_REGRESSION,
    )


def joint_regression_weights(model: SemModel) -> np.ndarray:
    """Weights of the best linear predictor of all factors from all
    indicators jointly: C lambda' sigma^{-1} over the stacked (x, y) block.

    This is the population analogue of a posterior-mean factor score that
    conditions on every observed variable, which is how mean plausible
    values behave; the per-block regression scores above condition on one
    indicator block only.
    """
    c = combined_factor_corr(model).values
    loadings = np.zeros((model.n_x + model.n_y, model.n_xi + model.n_eta))
    loadings[: model.n_x, : model.n_xi] = model.lambda_x
    loadings[model.n_x:, model.n_xi:] = model.lambda_y
    common = loadings @ c @ loadings.T
    sigma = common + np.diag(1.0 - np.diag(common))
    return c @ _solve_spd(sigma, loadings, "joint sigma").T


def joint_regression_scores(
    model: SemModel, x_data: DataMatrix, y_data: DataMatrix
) -> ScoreMatrix:
    """Regression scores for all factors conditioning on x and y jointly."""
    x = _check_data(x_data, model.n_x, "joint_regression_scores")
    y = _check_data(y_data, model.n_y, "joint_regression_scores")
    if x_data.n_cases != y_data.n_cases:
        raise StructuralError(
            f"x has {x_data.n_cases} cases but y has {y_data.n_cases}"
        )
    z = np.hstack([x, y])
    return ScoreMatrix(
        z @ joint_regression_weights(model).T,
        model.factor_labels,
        model.factor_blocks,
        PROV_REGRESSION,
    )


def regression_score_cov_exo(model: SemModel) -> np.ndarray:
    """Population covariance of the exogenous regression scores:
    phi lambda_x' sigma_x^{-1} lambda_x phi (also their covariance with the
    factors)."""
    w = regression_weights_exo(model)
    a = w @ model.lambda_x @ model.phi.values
    return (a + a.T) / 2.0


def regression_score_corr(model: SemModel) -> FactorCorr:
    """Population correlation of the exogenous regression scores.

    The regression score does not preserve phi: its covariance is
    A = phi lambda_x' sigma_x^{-1} lambda_x phi, and this returns
    diag(A)^{-1/2} A diag(A)^{-1/2}.
    """
    a = regression_score_cov_exo(model)
    d = np.diag(a)
    if np.min(d) <= 0.0:
        i = int(np.argmin(d))
        raise StructuralError(
            f"degenerate determinacy: score variance {d[i]:.3e} "
            f"for factor {model.xi_labels[i]}"
        )
    inv = 1.0 / np.sqrt(d)
    r = a * np.outer(inv, inv)
    np.fill_diagonal(r, 1.0)
    return FactorCorr(model.xi_labels, (r + r.T) / 2.0)


# ---------------------------------------------------------------------------
# the correlation-preserving transformation (data route)

def cp_transform(
    p: ScoreMatrix,
    c_target: FactorCorr,
    c_p: FactorCorr | None = None,
    score_variances: np.ndarray | None = None,
) -> ScoreMatrix:
    """Rotate scores so their correlation matrix equals ``c_target``.

    The input is mean-centered and scaled to unit column variances, then
    multiplied by ``c_target^{1/2} c_p^{-1/2}``.  When ``c_p`` is omitted it
    is the sample correlation of ``p``, in which case the sample correlation
    of the result equals ``c_target`` up to floating point.  A supplied
    ``c_p`` (e.g. a model-implied score correlation) is used as-is; pair it
    with the matching ``score_variances`` (population column variances used
    for the standardization step) to stay on model-implied moments
    throughout.
    """
    if c_target.labels != p.labels:
        raise StructuralError(
            f"target correlation is ordered {c_target.labels}, "
            f"scores are ordered {p.labels}"
        )
    centered = mean_center(p)
    if score_variances is None:
        std = row_standardize(centered)
    else:
        score_variances = np.asarray(score_variances, dtype=float)
        if score_variances.shape != (p.n_factors,) or np.any(score_variances <= 0):
            raise StructuralError(
                "score_variances must give one positive variance per factor"
            )
        std = centered.replace_values(centered.values / np.sqrt(score_variances))
    if c_p is None:
        c_p = sample_corr(std)
    elif c_p.labels != p.labels:
        raise StructuralError(
            f"score correlation is ordered {c_p.labels}, "
            f"scores are ordered {p.labels}"
        )
    c_target.require_pd()
    c_p.require_pd()
    t = sym_sqrt(c_target.values) @ sym_inv_sqrt(c_p.values)
    return std.replace_values(std.values @ t.T, PROV_CP)


def cp_transform_exo(
    p_xi: ScoreMatrix,
    phi: FactorCorr,
    c_p_xi: FactorCorr | None = None,
    score_variances: np.ndarray | None = None,
) -> ScoreMatrix:
    """Block-wise variant of :func:`cp_transform` for the exogenous factors
    alone, with the factor correlation phi as the target."""
    for b in p_xi.blocks:
        if b != EXOGENOUS:
            raise StructuralError("cp_transform_exo expects exogenous scores only")
    return cp_transform(p_xi, phi, c_p_xi, score_variances)


# ---------------------------------------------------------------------------
# parameter route

def cp_scores_from_params(model: SemModel, x_data: DataMatrix) -> ScoreMatrix:
    """Correlation-preserving exogenous scores directly from parameters.

    Substitutes the population regression-score moments into the
    transformation: the weight matrix is
    ``phi^{1/2} r^{-1/2} diag(a)^{-1/2} phi lambda_x' sigma_x^{-1}`` with
    ``a`` the regression-score covariance and ``r`` its correlation.  The
    population covariance of the result is phi.
    """
    x = _check_data(x_data, model.n_x, "cp_scores_from_params")
    w_reg = regression_weights_exo(model)
    a = w_reg @ model.lambda_x @ model.phi.values
    d_inv = np.diag(1.0 / np.sqrt(np.diag(a)))
    r = d_inv @ a @ d_inv
    w = sym_sqrt(model.phi.values) @ sym_inv_sqrt((r + r.T) / 2.0) @ d_inv @ w_reg
    return ScoreMatrix(
        x @ w.T, model.xi_labels, (EXOGENOUS,) * model.n_xi, PROV_CP
    )


def orthogonal_scores(model: SemModel, x_data: DataMatrix) -> ScoreMatrix:
    """Orthogonal factor scores (Takeuchi/Anderson-Rubin construction).

    Weights ``(lambda_x' sigma_x^{-1} lambda_x)^{-1/2} lambda_x' sigma_x^{-1}``;
    the population covariance of the scores is the identity.
    """
    x = _check_data(x_data, model.n_x, "orthogonal_scores")
    sigma_inv_l = _solve_spd(implied_cov_x(model), model.lambda_x, "sigma_x")
    m = model.lambda_x.T @ sigma_inv_l
    w = sym_inv_sqrt((m + m.T) / 2.0) @ sigma_inv_l.T
    return ScoreMatrix(
        x @ w.T, model.xi_labels, (EXOGENOUS,) * model.n_xi, PROV_ORTHOGONAL
    )


def cp_scores_from_orthogonal(model: SemModel, x_data: DataMatrix) -> ScoreMatrix:
    """Correlation-preserving exogenous scores as ``phi^{1/2}`` times the
    orthogonal score; population covariance phi."""
    ortho = orthogonal_scores(model, x_data)
    values = ortho.values @ sym_sqrt(model.phi.values).T
    return ortho.replace_values(values, PROV_CP)
