"""Structural model parameters and model-implied covariance structures.

A :class:`SemModel` holds the completely standardized parameter estimates of
a latent regression model (endogenous factors regressed on exogenous
factors, each block with its own measurement model).  Unique variances are
always derived from the standardized solution as ``diag(I - L C L')`` rather
than read from input, so they cannot drift out of sync with the loadings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .containers import ENDOGENOUS, EXOGENOUS, PD_RTOL, FactorCorr
from .errors import ModelError, StructuralError

# Residual covariance supplied both ways must agree to this tolerance.
PSI_CONSISTENCY_TOL = 1e-6


def _matrix(values, name):
    a = np.array(values, dtype=float)
    if a.ndim != 2:
        raise StructuralError(f"{name} must be 2-d, got shape {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SemModel:
    """Completely standardized model parameters.

    Parameters
    ----------
    lambda_x : (n_x, n_xi) array
        Loadings of the x indicators on the exogenous factors.
    phi : FactorCorr or (n_xi, n_xi) array
        Correlations of the exogenous factors.
    lambda_y : (n_y, n_eta) array
        Loadings of the y indicators on the endogenous factors.
    gamma : (n_eta, n_xi) array
        Standardized path coefficients, one row per endogenous factor.
    psi : (n_eta, n_eta) array, optional
        Residual covariance of the endogenous factors.
    eta_corr : FactorCorr or array, optional
        Correlations of the endogenous factors; exactly one of ``psi`` /
        ``eta_corr`` is required (both only if consistent).
    """

    lambda_x: np.ndarray
    phi: FactorCorr
    lambda_y: np.ndarray
    gamma: np.ndarray
    psi: np.ndarray | None = None
    eta_corr: FactorCorr | None = None
    xi_labels: tuple[str, ...] = field(default=())
    eta_labels: tuple[str, ...] = field(default=())
    x_labels: tuple[str, ...] = field(default=())
    y_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        lx = _matrix(self.lambda_x, "lambda_x")
        ly = _matrix(self.lambda_y, "lambda_y")
        gamma = _matrix(self.gamma, "gamma")
        object.__setattr__(self, "lambda_x", lx)
        object.__setattr__(self, "lambda_y", ly)
        object.__setattr__(self, "gamma", gamma)

        n_xi = lx.shape[1]
        n_eta = ly.shape[1]
        xi_labels = self.xi_labels or tuple(f"xi{i + 1}" for i in range(n_xi))
        eta_labels = self.eta_labels or tuple(f"eta{i + 1}" for i in range(n_eta))
        x_labels = self.x_labels or tuple(f"x{i + 1}" for i in range(lx.shape[0]))
        y_labels = self.y_labels or tuple(f"y{i + 1}" for i in range(ly.shape[0]))

        phi = self.phi
        if not isinstance(phi, FactorCorr):
            phi = FactorCorr(xi_labels, phi)
        if phi.order != n_xi:
            raise StructuralError(
                f"phi order {phi.order} does not match lambda_x columns {n_xi}"
            )
        if gamma.shape != (n_eta, n_xi):
            raise StructuralError(
                f"gamma shape {gamma.shape} does not match "
                f"({n_eta} endogenous, {n_xi} exogenous)"
            )

        eta_corr = self.eta_corr
        if eta_corr is not None and not isinstance(eta_corr, FactorCorr):
            eta_corr = FactorCorr(eta_labels, eta_corr)
        if eta_corr is not None and eta_corr.order != n_eta:
            raise StructuralError(
                f"eta_corr order {eta_corr.order} does not match "
                f"lambda_y columns {n_eta}"
            )

        implied = gamma @ phi.values @ gamma.T
        psi = self.psi
        if psi is None and eta_corr is None:
            raise StructuralError("one of psi or eta_corr is required")
        if psi is not None:
            psi = _matrix(psi, "psi")
            if psi.shape != (n_eta, n_eta):
                raise StructuralError(f"psi shape {psi.shape}, expected {(n_eta, n_eta)}")
            if eta_corr is not None:
                dev = np.max(np.abs(implied + psi - eta_corr.values))
                if dev > PSI_CONSISTENCY_TOL:
                    raise StructuralError(
                        "psi and eta_corr are inconsistent "
                        f"(max deviation {dev:.2e})"
                    )
        else:
            psi = _matrix(eta_corr.values - implied, "psi")

        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "eta_corr", eta_corr)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "xi_labels", xi_labels)
        object.__setattr__(self, "eta_labels", eta_labels)
        object.__setattr__(self, "x_labels", x_labels)
        object.__setattr__(self, "y_labels", y_labels)

    # -- dimensions ---------------------------------------------------------
    @property
    def n_x(self) -> int:
        return self.lambda_x.shape[0]

    @property
    def n_xi(self) -> int:
        return self.lambda_x.shape[1]

    @property
    def n_y(self) -> int:
        return self.lambda_y.shape[0]

    @property
    def n_eta(self) -> int:
        return self.lambda_y.shape[1]

    @property
    def factor_labels(self) -> tuple[str, ...]:
        return self.xi_labels + self.eta_labels

    @property
    def factor_blocks(self) -> tuple[str, ...]:
        return (EXOGENOUS,) * self.n_xi + (ENDOGENOUS,) * self.n_eta

    def eta_cov(self) -> np.ndarray:
        """Model-implied covariance of the endogenous factors."""
        return self.gamma @ self.phi.values @ self.gamma.T + self.psi


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "model accepted"
        return "model rejected:\n" + "\n".join(f"  - {v}" for v in self.violations)


def _pd_violation(values, what):
    w = np.linalg.eigvalsh(values)
    if w[0] <= PD_RTOL * w[-1]:
        return f"{what} not positive definite (smallest eigenvalue {w[0]:.3e})"
    return None


def validate_model(model: SemModel, loading_tol: float = 1e-6) -> ValidationReport:
    """Check the standardized-solution invariants; structural errors raise.

    Dimension mismatches raise StructuralError at SemModel construction, so
    a SemModel reaching this point is structurally consistent; this reports
    numerical violations (positive definiteness, unit diagonals, loading and
    uniqueness bounds) entry by entry.
    """
    v: list[str] = []

    msg = _pd_violation(model.phi.values, "phi")
    if msg:
        v.append(msg)

    eta_cov = model.eta_cov()
    dev = np.abs(np.diag(eta_cov) - 1.0)
    if np.max(dev) > loading_tol:
        i = int(np.argmax(dev))
        v.append(
            f"diagonal of implied endogenous covariance is {eta_cov[i, i]:.6f} "
            f"for {model.eta_labels[i]}, expected 1"
        )
    msg = _pd_violation(eta_cov, "implied endogenous covariance")
    if msg:
        v.append(msg)

    for name, loadings, labels in (
        ("lambda_x", model.lambda_x, model.x_labels),
        ("lambda_y", model.lambda_y, model.y_labels),
    ):
        mags = np.abs(loadings)
        if np.max(mags) > 1.0 + loading_tol:
            i, j = np.unravel_index(int(np.argmax(mags)), mags.shape)
            v.append(
                f"{name} loading {loadings[i, j]:.4f} for {labels[i]} exceeds 1"
            )

    for name, loadings, corr, labels in (
        ("x", model.lambda_x, model.phi.values, model.x_labels),
        ("y", model.lambda_y, eta_cov, model.y_labels),
    ):
        common = np.einsum("ij,jk,ik->i", loadings, corr, loadings)
        uniq = 1.0 - common
        if np.min(uniq) < -1e-10:
            i = int(np.argmin(uniq))
            v.append(
                f"negative implied uniqueness {uniq[i]:.6f} for indicator {labels[i]}"
            )
        else:
            sigma = loadings @ corr @ loadings.T + np.diag(np.clip(uniq, 0.0, None))
            msg = _pd_violation(sigma, f"implied covariance of the {name} indicators")
            if msg:
                v.append(msg)

    return ValidationReport(tuple(v))


def _implied_cov(loadings, factor_cov, labels):
    common = loadings @ factor_cov @ loadings.T
    uniq = 1.0 - np.diag(common)
    if np.min(uniq) < -1e-10:
        i = int(np.argmin(uniq))
        raise ModelError(
            f"negative implied uniqueness {uniq[i]:.6f} for indicator {labels[i]}"
        )
    sigma = common + np.diag(np.clip(uniq, 0.0, None))
    return (sigma + sigma.T) / 2.0


def implied_cov_x(model: SemModel) -> np.ndarray:
    """Model-implied covariance of the x indicators (unit diagonal)."""
    return _implied_cov(model.lambda_x, model.phi.values, model.x_labels)


def implied_cov_y(model: SemModel) -> np.ndarray:
    """Model-implied covariance of the y indicators (unit diagonal)."""
    return _implied_cov(model.lambda_y, model.eta_cov(), model.y_labels)


def psi_from_eta_corr(model: SemModel) -> np.ndarray:
    """Residual covariance implied by the endogenous factor correlations."""
    if model.eta_corr is None:
        raise StructuralError("model was not supplied with eta_corr")
    psi = model.eta_corr.values - model.gamma @ model.phi.values @ model.gamma.T
    msg = _pd_violation(model.eta_corr.values, "endogenous factor correlation")
    if msg:
        raise ModelError(msg)
    return psi


def combined_factor_corr(model: SemModel) -> FactorCorr:
    """Correlation matrix of all factors, exogenous block first.

    Block layout: [[phi, phi gamma'], [gamma phi, implied endogenous cov]].
    """
    phi = model.phi.values
    cross = model.gamma @ phi
    c = np.block([[phi, cross.T], [cross, model.eta_cov()]])
    c = (c + c.T) / 2.0
    d = np.abs(np.diag(c) - 1.0)
    if np.max(d) > 1e-8:
        raise ModelError(
            "combined factor correlation has a non-unit diagonal; "
            "the model is not completely standardized"
        )
    np.fill_diagonal(c, 1.0)
    corr = FactorCorr(model.factor_labels, c)
    if not corr.is_pd():
        raise ModelError("degenerate model-implied correlation")
    return corr
