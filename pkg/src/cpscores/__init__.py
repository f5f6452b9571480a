"""Correlation-preserving factor scores for structural equation models.

Transforms factor-score estimates (mean plausible values or regression
scores) so their inter-correlations and standardized path coefficients
match the estimated model exactly, and computes determinacy coefficients
for both score families.
"""

from .containers import (
    ENDOGENOUS,
    EXOGENOUS,
    DataMatrix,
    FactorCorr,
    ScoreMatrix,
)
from .determinacy import (
    DeterminacyReport,
    closed_form_regression_determinacy,
    determinacy_endo,
    determinacy_exo,
)
from .errors import (
    CpscoresError,
    DataError,
    ModelError,
    NearSingularError,
    StructuralError,
)
from .io import (
    model_hash,
    parse_model_file,
    read_data_csv,
    read_scores_csv,
    write_scores_csv,
)
from .linalg import (
    SpectralDecomposition,
    mean_center,
    row_standardize,
    sample_corr,
    spectral,
    sym_inv_sqrt,
    sym_sqrt,
)
from .model import (
    SemModel,
    ValidationReport,
    combined_factor_corr,
    implied_cov_x,
    implied_cov_y,
    psi_from_eta_corr,
    validate_model,
)
from .regression import betas_from_corr, standardized_betas
from .scores import (
    cp_scores_from_orthogonal,
    cp_scores_from_params,
    cp_transform,
    cp_transform_exo,
    joint_regression_scores,
    orthogonal_scores,
    regression_score_corr,
    regression_score_cov_exo,
    regression_scores_endo,
    regression_scores_exo,
)
from .simulate import (
    ExampleReport,
    SimulationSpec,
    example_model,
    random_model,
    run_example,
    simulate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "CpscoresError", "DataError", "DataMatrix", "DeterminacyReport",
    "ENDOGENOUS", "EXOGENOUS", "ExampleReport", "FactorCorr", "ModelError",
    "NearSingularError", "ScoreMatrix", "SemModel", "SimulationSpec",
    "SpectralDecomposition", "StructuralError", "ValidationReport",
    "betas_from_corr", "closed_form_regression_determinacy",
    "combined_factor_corr", "cp_scores_from_orthogonal",
    "cp_scores_from_params", "cp_transform", "cp_transform_exo",
    "determinacy_endo", "determinacy_exo", "example_model", "implied_cov_x",
    "implied_cov_y", "joint_regression_scores", "mean_center", "model_hash",
    "orthogonal_scores", "parse_model_file", "psi_from_eta_corr",
    "random_model", "read_data_csv", "read_scores_csv",
    "regression_score_corr", "regression_score_cov_exo",
    "regression_scores_endo",
    "regression_scores_exo", "row_standardize", "run_example", "sample_corr",
    "simulate_dataset", "spectral", "standardized_betas", "sym_inv_sqrt",
    "sym_sqrt", "validate_model", "write_scores_csv",
]
