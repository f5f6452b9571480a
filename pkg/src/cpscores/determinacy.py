"""Determinacy coefficients: correlation between a factor score column and
the factor it estimates.

The estimator correlates each centered score column with the best linear
predictor of its factor, using sample cross-moments with divisor (n - 1)
and the model-implied indicator covariance:

    diag( diag(P'P/(n-1))^{-1/2} . P'X/(n-1) . sigma^{-1} lambda C )

It applies to plain and correlation-preserving scores alike.  A closed-form
population value for exact regression scores is provided as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .containers import DataMatrix, ScoreMatrix
from .errors import DataError, StructuralError
from .linalg import center_columns
from .model import SemModel, implied_cov_x, implied_cov_y

NORMALIZER_SD = "sd"
# Divides by score variances instead of standard deviations.  Only useful to
# reproduce legacy endogenous-factor output bit for bit; the coefficients it
# yields are not correlations.
NORMALIZER_VARIANCE = "variance"


@dataclass(frozen=True)
class DeterminacyReport:
    labels: tuple[str, ...]
    coefficients: np.ndarray
    score_provenance: str
    n_cases: int
    variant: str

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if not np.all(np.isfinite(c)):
            raise DataError("non-finite determinacy coefficient")
        object.__setattr__(self, "coefficients", c)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.coefficients))

    def __str__(self) -> str:
        pairs = ", ".join(
            f"{lb}={c:.3f}" for lb, c in zip(self.labels, self.coefficients)
        )
        return f"determinacy[{self.variant}; {self.score_provenance}]: {pairs}"


def _determinacy(scores, data, predictor_map, labels, variant, normalizer):
    if scores.n_cases != data.n_cases:
        raise StructuralError(
            f"scores have {scores.n_cases} rows, data has {data.n_cases}"
        )
    n = scores.n_cases
    if n < 2:
        raise DataError("determinacy needs at least 2 cases")
    if scores.labels != labels:
        raise StructuralError(
            f"scores are ordered {scores.labels}, expected {labels}"
        )
    p = center_columns(scores.values)
    var = np.einsum("ij,ij->j", p, p) / (n - 1)
    if np.any(var <= 0.0):
        bad = scores.labels[int(np.argmin(var))]
        raise DataError(f"zero variance in score column {bad!r}")
    cross = p.T @ center_columns(data.values) / (n - 1)
    scale = var if normalizer == NORMALIZER_VARIANCE else np.sqrt(var)
    coeffs = np.einsum("ij,ji->i", cross / scale[:, None], predictor_map)
    tag = variant if normalizer == NORMALIZER_SD else f"{variant}-variance-normalized"
    return DeterminacyReport(labels, coeffs, scores.provenance, n, tag)


def determinacy_exo(
    scores: ScoreMatrix,
    x_data: DataMatrix,
    model: SemModel,
    normalizer: str = NORMALIZER_SD,
) -> DeterminacyReport:
    """Determinacy of exogenous-factor scores against the x indicators."""
    sigma_x = implied_cov_x(model)
    predictor = np.linalg.solve(sigma_x, model.lambda_x @ model.phi.values)
    return _determinacy(
        scores, x_data, predictor, model.xi_labels, "exogenous", normalizer
    )


def determinacy_endo(
    scores: ScoreMatrix,
    y_data: DataMatrix,
    model: SemModel,
    normalizer: str = NORMALIZER_SD,
) -> DeterminacyReport:
    """Determinacy of endogenous-factor scores against the y indicators."""
    sigma_y = implied_cov_y(model)
    predictor = np.linalg.solve(sigma_y, model.lambda_y @ model.eta_cov())
    return _determinacy(
        scores, y_data, predictor, model.eta_labels, "endogenous", normalizer
    )


def closed_form_regression_determinacy(model: SemModel, block: str) -> DeterminacyReport:
    """Population determinacy of exact regression scores per factor.

    The regression-score covariance equals its covariance with the factors,
    so the determinacy is the square root of its diagonal.
    """
    if block == "exogenous":
        sigma = implied_cov_x(model)
        loadings = model.lambda_x
        corr = model.phi.values
        labels = model.xi_labels
    elif block == "endogenous":
        sigma = implied_cov_y(model)
        loadings = model.lambda_y
        corr = model.eta_cov()
        labels = model.eta_labels
    else:
        raise StructuralError(f"unknown block {block!r}")
    a = corr @ loadings.T @ np.linalg.solve(sigma, loadings) @ corr
    return DeterminacyReport(
        labels, np.sqrt(np.diag(a)), "regression (population)", 0, "closed-form"
    )
