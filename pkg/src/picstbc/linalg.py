"""Dense real/complex kernels for the small matrices used throughout.

Everything here is sized for dimensions of at most a few hundred, so all
routines are plain dense SVD/least-squares calls with explicit relative
tolerances instead of exact-arithmetic rank logic.
"""

import numpy as np

DEFAULT_TOL = 1e-10


class SingularSystemError(Exception):
    """Solve attempted on a matrix that is rank-deficient at the given tolerance."""


def multiply(a, b):
    """Matrix product a @ b with an explicit inner-dimension check."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("multiply expects two 2-D matrices")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimensions disagree: {a.shape} x {b.shape}")
    return a @ b


def orthonormal_basis(cols, tol=DEFAULT_TOL):
    """Orthonormal basis for the numerical column space of ``cols``.

    Directions whose singular value is <= tol * ||cols||_F are dropped.
    An input with no columns (or all zeros) yields a (rows, 0) result.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cols = np.asarray(cols, dtype=float)
    if cols.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if cols.shape[1] == 0 or not cols.any():
        return np.zeros((cols.shape[0], 0))
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    return u[:, s > tol * np.linalg.norm(cols)]


def complement_projector(basis, ambient_dim):
    """Projector I - Q Q^T onto the orthogonal complement of span(basis).

    ``basis`` must have orthonormal columns of height ``ambient_dim``; an
    empty basis gives the identity, a full basis gives the zero matrix.
    """
    q = np.asarray(basis, dtype=float)
    if q.ndim != 2 or q.shape[0] != ambient_dim:
        raise ValueError(f"basis must be {ambient_dim} tall")
    if q.shape[1]:
        if np.linalg.norm(q.T @ q - np.eye(q.shape[1])) > 1e-8:
            raise ValueError("basis columns are not orthonormal")
    return np.eye(ambient_dim) - q @ q.T


def least_squares_solve(a, y, tol=DEFAULT_TOL):
    """Minimizer of ||y - a x||_2 for a tall matrix of full column rank."""
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    if a.ndim != 2 or a.shape[0] < a.shape[1]:
        raise ValueError("need at least as many rows as columns")
    if numerical_rank(a, tol) < a.shape[1]:
        raise SingularSystemError(
            f"matrix is rank-deficient at relative tolerance {tol:g}")
    x, *_ = np.linalg.lstsq(a, y, rcond=None)
    return x


def numerical_rank(a, tol=DEFAULT_TOL):
    """Number of singular values above tol times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a)
    if a.size == 0 or not a.any():
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.count_nonzero(s > tol * s[0]))
