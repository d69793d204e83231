"""Dense linear algebra for the small systems produced by both solvers."""

import numpy as np
from scipy.linalg import lu_factor, lu_solve as _lu_solve

__all__ = [
    "SingularMatrixError",
    "as_matrix",
    "lu_solve",
    "singular_values",
    "cond2",
    "cond",
    "dump_csv",
]


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a pivot falls below the singularity threshold."""


def as_matrix(A, square=False):
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def lu_solve(A, b, pivot_tol=1e-14, residual_tol=1e-10):
    """Solve Ax = b with partial pivoting; rejects near-zero pivots and checks the residual."""
    A = as_matrix(A, square=True)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"rhs length {b.shape[0]} does not match matrix size {A.shape[0]}")
    norm = np.abs(A).sum(axis=1).max()
    lu, piv = lu_factor(A, check_finite=False)
    smallest = np.abs(np.diag(lu)).min()
    if smallest < pivot_tol * norm:
        raise SingularMatrixError(f"pivot {smallest:.3e} below {pivot_tol:g} * ||A||_inf = {pivot_tol * norm:.3e}")
    x = _lu_solve((lu, piv), b, check_finite=False)
    res = np.abs(A @ x - b).max()
    bound = residual_tol * (norm * np.abs(x).max() + np.abs(b).max())
    if res > bound:
        raise SingularMatrixError(f"residual {res:.3e} exceeds {bound:.3e}")
    return x


def singular_values(A):
    """Singular values in descending order."""
    return np.linalg.svd(as_matrix(A), compute_uv=False)


def cond2(A):
    """2-norm condition number sigma_max / sigma_min."""
    s = singular_values(as_matrix(A, square=True))
    if s[-1] < 1e-300:
        return float("inf")
    return float(s[0] / s[-1])


def cond(A, norm=2):
    """Condition number in the 1-, 2- or infinity-norm."""
    if norm in (2, "2"):
        return cond2(A)
    A = as_matrix(A, square=True)
    order = {1: 1, "1": 1, "inf": np.inf, np.inf: np.inf}.get(norm)
    if order is None:
        raise ValueError(f"unsupported norm {norm!r}")
    return float(np.linalg.norm(A, order) * np.linalg.norm(np.linalg.inv(A), order))


def dump_csv(A, path):
    """Row-major plain-text dump with 17 significant digits."""
    A = as_matrix(A)
    with open(path, "w") as fh:
        for row in A:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
