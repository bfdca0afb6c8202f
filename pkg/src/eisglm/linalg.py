"""Small dense linear algebra used throughout the package.

Everything here operates on plain numpy arrays (real or complex) of modest
size; the matrices arising from method tableaus are at most ~20x20.  Solves
and inverses go through an in-house LU factorization with partial pivoting so
that singularity failures can name the offending pivot.  Eigenvalues are
delegated to LAPACK (Hessenberg reduction plus shifted QR), wrapped behind
this module's error types.

Convention: :func:`vandermonde` puts the *highest* power in the first column,
so "replace the first column" always means replacing the degree-(n-1)
monomial.  The post-processing construction depends on this; the opposite
convention silently produces a wrong filter.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "SingularMatrixError",
    "DegeneratePointsError",
    "EigenNonConvergenceError",
    "check_matrix",
    "lu_factor",
    "lu_solve",
    "inverse",
    "vandermonde",
    "eigenvalues",
    "spectral_radius",
]


class SingularMatrixError(ValueError):
    """Matrix is singular to working precision.

    Attributes
    ----------
    pivot_index : int
        Elimination column at which no acceptable pivot was found.
    """

    def __init__(self, pivot_index: int, scale: float):
        self.pivot_index = pivot_index
        super().__init__(
            f"matrix singular to working precision at pivot {pivot_index} "
            f"(matrix scale {scale:.3e})"
        )


class DegeneratePointsError(ValueError):
    """Vandermonde nodes are not pairwise distinct."""


class EigenNonConvergenceError(RuntimeError):
    """Eigenvalue iteration failed to converge."""

    def __init__(self, message: str, iterations: int = 0):
        self.iterations = iterations
        super().__init__(message)


def check_matrix(a, square: bool = False) -> np.ndarray:
    """Coerce ``a`` to a 2-D numpy array and validate its entries are finite."""
    m = np.asarray(a)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def lu_factor(a) -> tuple[np.ndarray, np.ndarray]:
    """LU factorization with partial pivoting.

    Returns ``(lu, piv)`` where ``lu`` packs L (unit lower) and U, and
    ``piv[k]`` is the row swapped into position ``k`` at step ``k``.
    Raises :class:`SingularMatrixError` when the best available pivot is
    negligible relative to the matrix scale.
    """
    m = check_matrix(a, square=True)
    n = m.shape[0]
    lu = m.astype(np.result_type(m.dtype, np.float64), copy=True)
    piv = np.arange(n)
    scale = float(np.max(np.abs(lu))) if n else 0.0
    tol = max(scale, 1.0) * n * np.finfo(np.float64).eps
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tol:
            raise SingularMatrixError(k, scale)
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[k] = p
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, piv


def lu_solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides.
    """
    lu, piv = lu_factor(a)
    n = lu.shape[0]
    bv = np.asarray(b)
    x = bv.astype(np.result_type(lu.dtype, bv.dtype), copy=True)
    vector = x.ndim == 1
    if vector:
        x = x[:, None]
    if x.shape[0] != n:
        raise ValueError(f"rhs has {x.shape[0]} rows, matrix is {n}x{n}")
    for k in range(n):
        if piv[k] != k:
            x[[k, piv[k]]] = x[[piv[k], k]]
        x[k + 1:] -= np.outer(lu[k + 1:, k], x[k])
    for k in range(n - 1, -1, -1):
        x[k] /= lu[k, k]
        x[:k] -= np.outer(lu[:k, k], x[k])
    return x[:, 0] if vector else x


def inverse(a) -> np.ndarray:
    """Matrix inverse via :func:`lu_solve` against the identity."""
    m = check_matrix(a, square=True)
    return lu_solve(m, np.eye(m.shape[0], dtype=m.dtype))


def vandermonde(points) -> np.ndarray:
    """Square Vandermonde matrix with the highest power in the first column.

    Column ``k`` (0-based) of the result holds ``points**(n-1-k)``, so the
    last column is all ones.  Duplicated nodes raise
    :class:`DegeneratePointsError`.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    if pts.ndim != 1 or pts.size < 1:
        raise ValueError("points must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    n = pts.size
    if len(np.unique(pts)) != n:
        raise DegeneratePointsError(f"points are not pairwise distinct: {pts!r}")
    return np.vander(pts, n, increasing=False)


def eigenvalues(a, tol: float | None = None) -> np.ndarray:
    """All eigenvalues of a small square matrix, as a complex array.

    Backed by LAPACK's Hessenberg-reduction + shifted-QR driver.  When ``tol``
    is given, each eigenvalue is verified through the characteristic residual
    ``|det(a - lam*I)| <= tol * max(norm(a), 1)**n``; a violation raises
    :class:`EigenNonConvergenceError`.
    """
    m = check_matrix(a, square=True)
    try:
        lam = np.linalg.eigvals(m.astype(np.complex128))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenNonConvergenceError(str(exc)) from exc
    if tol is not None:
        n = m.shape[0]
        bound = tol * max(float(np.linalg.norm(m, np.inf)), 1.0) ** n
        eye = np.eye(n)
        for lam_k in lam:
            if abs(np.linalg.det(m - lam_k * eye)) > bound:
                raise EigenNonConvergenceError(
                    f"eigenvalue {lam_k} fails det residual {bound:.3e}"
                )
    return lam


def spectral_radius(a) -> float:
    """max |lambda| over the eigenvalues of ``a``."""
    return float(np.max(np.abs(eigenvalues(a))))
