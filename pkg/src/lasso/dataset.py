"""
Inner-problem data: the design matrix X (features as columns) and target y.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.sparse as sp

from src.errors import ConfigError, DimensionError
from src.lasso import kernels

Matrix = Union[np.ndarray, sp.csc_matrix]


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Immutable regression dataset.

    Dense matrices are stored Fortran-ordered and sparse ones as CSC so the
    coordinate-descent kernels read one column at a time. Dense arrays are
    marked read-only; nothing in the package mutates a Dataset after
    construction.
    """

    X: Matrix
    y: np.ndarray
    name: str = "dataset"
    column_norms_sq: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = self.X
        if sp.issparse(X):
            X = sp.csc_matrix(X, dtype=np.float64)
            X.sort_indices()
            values = X.data
        else:
            X = np.asfortranarray(np.asarray(X, dtype=np.float64))
            values = X
        y = np.ascontiguousarray(np.asarray(self.y, dtype=np.float64))

        if X.ndim != 2:
            raise DimensionError("X must be 2D")
        if y.ndim != 1:
            raise DimensionError("y must be 1D")
        n, d = X.shape
        if n < 1 or d < 1:
            raise DimensionError(f"dataset must have n >= 1 and d >= 1, got ({n}, {d})")
        if y.shape[0] != n:
            raise DimensionError(f"X has {n} rows but y has {y.shape[0]} entries", expected=n)
        if not np.all(np.isfinite(values)):
            raise ConfigError("X contains NaN or Inf entries")
        if not np.all(np.isfinite(y)):
            raise ConfigError("y contains NaN or Inf entries")

        if sp.issparse(X):
            norms = kernels.column_norms_sq_sparse(X.data, X.indptr, d)
        else:
            norms = kernels.column_norms_sq_dense(X)
            X.flags.writeable = False
        y.flags.writeable = False
        norms.flags.writeable = False

        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "column_norms_sq", norms)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.X)

    def take_rows(self, rows: np.ndarray, name: str | None = None) -> "Dataset":
        """Sub-dataset restricted to the given row indices (kept in the given order)."""
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(X=self.X[rows], y=self.y[rows], name=name or self.name)

    def matvec(self, beta: np.ndarray) -> np.ndarray:
        return np.asarray(self.X @ beta).ravel()

    def rmatvec(self, r: np.ndarray) -> np.ndarray:
        """X^T r, computed with the same column reductions the solver uses."""
        if self.is_sparse:
            return kernels.xt_r_sparse(self.X.data, self.X.indices, self.X.indptr, r)
        return kernels.xt_r_dense(self.X, r)

    def columns(self, support: np.ndarray) -> np.ndarray:
        """Dense copy of the columns in `support` (rows x |support|)."""
        cols = self.X[:, support]
        return cols.toarray() if sp.issparse(cols) else np.asarray(cols)


def as_penalty(lam, d: int) -> np.ndarray:
    """
    Validate a penalty vector: natural-log scale, one entry per feature,
    so feature j is penalized by exp(lam[j]).
    """
    lam = np.asarray(lam, dtype=np.float64)
    if lam.ndim == 0:
        lam = np.full(d, float(lam))
    if lam.ndim != 1 or lam.shape[0] != d:
        raise DimensionError(f"penalty vector must have length {d}, got shape {lam.shape}", expected=d)
    if not np.all(np.isfinite(lam)):
        raise ConfigError("penalty vector entries must be finite")
    return lam


def as_coef(beta, d: int) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.ndim != 1 or beta.shape[0] != d:
        raise DimensionError(f"coefficient vector must have length {d}, got shape {beta.shape}", expected=d)
    return beta
