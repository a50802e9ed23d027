"""Smooth empirical losses with exact gradients and curvature constants.

Two losses are provided:

* ``LeastSquaresLoss`` -- f(w) = ||X w - y||^2 / (2n); the gradient's
  Lipschitz constant is the top eigenvalue of X^T X / n, estimated by
  power iteration with a trace fallback.
* ``LogisticLoss`` -- f(w) = mean(log(1 + exp(-y_i x_i^T w))) for labels
  in {-1, +1}; the working Lipschitz constant is sum(||x_i||^2) / (4n).

Both accept a dense ndarray or a scipy CSR design matrix and are
immutable after construction, so instances can be shared freely across
concurrent solver runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Dataset",
    "LeastSquaresLoss",
    "LogisticLoss",
    "make_loss",
    "gram_max_eigenvalue",
    "least_squares_strong_convexity",
]


def _is_sparse(X) -> bool:
    return sp.issparse(X)


@dataclass(frozen=True)
class Dataset:
    """Design matrix plus targets.

    ``task`` is "regression" (real targets) or "classification" (labels
    exactly in {-1, +1}).
    """

    X: object  # (n, p) ndarray or scipy sparse matrix
    y: np.ndarray
    task: str

    def __post_init__(self):
        if self.task not in ("regression", "classification"):
            raise ValueError(f"unknown task {self.task!r}")
        X = self.X
        if not _is_sparse(X):
            X = np.asarray(X, dtype=float)
            if X.ndim != 2:
                raise ValueError("design matrix must be 2-dimensional")
            if not np.all(np.isfinite(X)):
                raise ValueError("design matrix has non-finite entries")
            object.__setattr__(self, "X", X)
        else:
            if not np.all(np.isfinite(X.data)):
                raise ValueError("design matrix has non-finite entries")
        y = np.asarray(self.y, dtype=float).ravel()
        object.__setattr__(self, "y", y)
        n, p = self.X.shape
        if n < 1 or p < 1:
            raise ValueError("need n >= 1 and p >= 1")
        if y.shape[0] != n:
            raise ValueError(f"targets have length {y.shape[0]}, expected {n}")
        if not np.all(np.isfinite(y)):
            raise ValueError("targets have non-finite entries")
        if self.task == "classification" and not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("classification labels must be exactly -1 or +1")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def _frobenius_sq(X) -> float:
    if _is_sparse(X):
        return float(np.sum(X.data**2))
    return float(np.sum(X**2))


def gram_max_eigenvalue(X, rel_tol: float = 1e-8, max_steps: int = 500):
    """Power iteration for the top eigenvalue of X^T X / n.

    Returns ``(estimate, converged)``.  The matrix is only touched through
    matvecs, so sparse designs stay sparse.
    """
    n, p = X.shape
    v = np.full(p, 1.0 / np.sqrt(p))
    lam = 0.0
    for _ in range(max_steps):
        mv = X.T @ (X @ v) / n
        mv = np.asarray(mv).ravel()
        norm = np.linalg.norm(mv)
        if norm == 0.0:
            # v is in the null space; restart from a shifted direction
            v = np.zeros(p)
            v[0] = 1.0
            continue
        lam_new = float(v @ mv)
        v = mv / norm
        if abs(lam_new - lam) <= rel_tol * abs(lam_new):
            return lam_new, True
        lam = lam_new
    return lam, False


def least_squares_strong_convexity(data: Dataset, rel_tol: float = 1e-10,
                                   max_steps: int = 2000) -> float:
    """Smallest eigenvalue of X^T X / n by inverse power iteration.

    Certifies the strong-convexity modulus of the least-squares loss.
    Raises if the Gram matrix is singular (rank-deficient design).
    """
    X = data.X
    A = (X.T @ X) / data.n
    if _is_sparse(A):
        A = A.toarray()
    A = np.asarray(A)
    p = A.shape[0]
    try:
        chol = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise ValueError("design is rank deficient; least-squares loss is not strongly convex")
    v = np.full(p, 1.0 / np.sqrt(p))
    lam = np.inf
    for _ in range(max_steps):
        z = np.linalg.solve(chol, v)
        w = np.linalg.solve(chol.T, z)
        nw = np.linalg.norm(w)
        v_new = w / nw
        lam_new = float(v_new @ (A @ v_new))
        if abs(lam_new - lam) <= rel_tol * abs(lam_new):
            return lam_new
        lam, v = lam_new, v_new
    return lam


def _check_dim(w: np.ndarray, p: int) -> np.ndarray:
    w = np.asarray(w, dtype=float).ravel()
    if w.shape[0] != p:
        raise ValueError(f"weight vector has length {w.shape[0]}, expected {p}")
    return w


class LeastSquaresLoss:
    """f(w) = ||X w - y||^2 / (2n) on regression data."""

    kind = "ls"

    def __init__(self, data: Dataset):
        if data.task != "regression":
            raise ValueError("least-squares loss needs regression targets")
        self.data = data

    def value(self, w) -> float:
        w = _check_dim(w, self.data.p)
        r = np.asarray(self.data.X @ w).ravel() - self.data.y
        return float(r @ r) / (2.0 * self.data.n)

    def gradient(self, w) -> np.ndarray:
        w = _check_dim(w, self.data.p)
        r = np.asarray(self.data.X @ w).ravel() - self.data.y
        return np.asarray(self.data.X.T @ r).ravel() / self.data.n

    @cached_property
    def lipschitz(self) -> float:
        X, n = self.data.X, self.data.n
        if _frobenius_sq(X) == 0.0:
            raise ValueError("all-zero design matrix: curvature constant degenerates to 0")
        lam, converged = gram_max_eigenvalue(X)
        if not converged:
            # trace(X^T X)/n always upper-bounds the top eigenvalue
            return _frobenius_sq(X) / n
        return lam


def _softplus(z: np.ndarray) -> np.ndarray:
    """Stable log(1 + exp(z))."""
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticLoss:
    """f(w) = mean(log(1 + exp(-y_i x_i^T w))) on {-1,+1} labels."""

    kind = "logistic"

    def __init__(self, data: Dataset):
        if data.task != "classification":
            raise ValueError("logistic loss needs classification labels")
        self.data = data

    def _margins(self, w: np.ndarray) -> np.ndarray:
        return self.data.y * np.asarray(self.data.X @ w).ravel()

    def value(self, w) -> float:
        w = _check_dim(w, self.data.p)
        return float(np.mean(_softplus(-self._margins(w))))

    def gradient(self, w) -> np.ndarray:
        w = _check_dim(w, self.data.p)
        coef = -self.data.y * _sigmoid(-self._margins(w)) / self.data.n
        return np.asarray(self.data.X.T @ coef).ravel()

    @cached_property
    def lipschitz(self) -> float:
        fro2 = _frobenius_sq(self.data.X)
        if fro2 == 0.0:
            raise ValueError("all-zero design matrix: curvature constant degenerates to 0")
        return fro2 / (4.0 * self.data.n)


_LOSSES = {"ls": LeastSquaresLoss, "logistic": LogisticLoss}


def make_loss(kind: str, data: Dataset):
    """Construct a loss by kind name ('ls' or 'logistic')."""
    try:
        cls = _LOSSES[kind]
    except KeyError:
        raise ValueError(f"unknown loss kind {kind!r}; choose from {sorted(_LOSSES)}")
    return cls(data)
