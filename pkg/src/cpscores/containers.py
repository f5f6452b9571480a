"""Labeled matrix containers passed between the numerical modules.

All containers are immutable after construction; the wrapped arrays are
copied and write-protected so results can safely be shared across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NearSingularError, StructuralError

EXOGENOUS = "exogenous"
ENDOGENOUS = "endogenous"

# Relative eigenvalue threshold below which a matrix counts as singular.
PD_RTOL = 1e-10


def _as_matrix(values, name: str) -> np.ndarray:
    a = np.array(values, dtype=float)
    if a.ndim != 2:
        raise StructuralError(f"{name} must be a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError(f"{name} contains non-finite entries")
    a.setflags(write=False)
    return a


def _check_labels(labels, count: int, name: str) -> tuple[str, ...]:
    labels = tuple(str(lb) for lb in labels)
    if len(labels) != count:
        raise StructuralError(
            f"{name}: {len(labels)} labels for {count} columns"
        )
    if len(set(labels)) != len(labels):
        raise StructuralError(f"{name}: duplicate labels")
    return labels


@dataclass(frozen=True)
class FactorCorr:
    """Correlation matrix over an ordered list of factors.

    Symmetry and the unit diagonal are enforced on construction (within
    1e-12); positive definiteness is checked where consumers require it,
    via :meth:`require_pd`, because sample correlations from short score
    matrices may legitimately be singular.
    """

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = _as_matrix(self.values, "correlation matrix")
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self, "labels", _check_labels(self.labels, values.shape[0], "FactorCorr")
        )
        n = values.shape[0]
        if values.shape != (n, n):
            raise StructuralError(
                f"correlation matrix must be square, got {values.shape}"
            )
        if np.max(np.abs(values - values.T)) > 1e-12:
            raise StructuralError("correlation matrix is not symmetric")
        if np.max(np.abs(np.diag(values) - 1.0)) > 1e-12:
            raise StructuralError("correlation matrix diagonal differs from 1")

    @property
    def order(self) -> int:
        return self.values.shape[0]

    def require_pd(self, rtol: float = PD_RTOL) -> None:
        """Raise NearSingularError unless all eigenvalues clear rtol * max."""
        w = np.linalg.eigvalsh(self.values)
        if w[0] <= rtol * w[-1]:
            raise NearSingularError(
                f"correlation matrix not positive definite "
                f"(smallest eigenvalue {w[0]:.3e})"
            )

    def is_pd(self, rtol: float = PD_RTOL) -> bool:
        w = np.linalg.eigvalsh(self.values)
        return bool(w[0] > rtol * w[-1])

    def submatrix(self, labels) -> "FactorCorr":
        idx = [self.labels.index(lb) for lb in labels]
        return FactorCorr(tuple(labels), self.values[np.ix_(idx, idx)])


@dataclass(frozen=True)
class DataMatrix:
    """Cases-by-indicators numeric matrix with indicator labels."""

    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        values = _as_matrix(self.values, "data matrix")
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self, "labels", _check_labels(self.labels, values.shape[1], "DataMatrix")
        )

    @property
    def n_cases(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ScoreMatrix:
    """Cases-by-factors score matrix.

    Each factor column carries a block tag (exogenous or endogenous) and the
    whole matrix records how the scores were produced (``provenance``).
    """

    values: np.ndarray
    labels: tuple[str, ...]
    blocks: tuple[str, ...] = field(default=())
    provenance: str = "unspecified"

    def __post_init__(self):
        values = _as_matrix(self.values, "score matrix")
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self, "labels", _check_labels(self.labels, values.shape[1], "ScoreMatrix")
        )
        blocks = tuple(self.blocks) if self.blocks else (EXOGENOUS,) * values.shape[1]
        if len(blocks) != values.shape[1]:
            raise StructuralError("one block tag required per factor column")
        for b in blocks:
            if b not in (EXOGENOUS, ENDOGENOUS):
                raise StructuralError(f"unknown block tag {b!r}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n_cases(self) -> int:
        return self.values.shape[0]

    @property
    def n_factors(self) -> int:
        return self.values.shape[1]

    def replace_values(self, values, provenance: str | None = None) -> "ScoreMatrix":
        return ScoreMatrix(
            values, self.labels, self.blocks,
            self.provenance if provenance is None else provenance,
        )

    def select(self, labels) -> "ScoreMatrix":
        idx = [self.labels.index(lb) for lb in labels]
        return ScoreMatrix(
            self.values[:, idx],
            tuple(self.labels[i] for i in idx),
            tuple(self.blocks[i] for i in idx),
            self.provenance,
        )
