"""Dense linear-algebra kernel: symmetric eigenvalues, rank decisions,
minimum-norm least squares.

Everything here works on small dense float64 arrays and shares one numerical
rank convention: a value is treated as zero when it does not exceed
``dim * machine_epsilon * scale``, the cutoff LAPACK-based solvers use.
"""

from __future__ import annotations

import numpy as np

_EPS = float(np.finfo(np.float64).eps)


def rank_tolerance(dim: int, scale: float) -> float:
    """Zero cutoff ``dim * eps * scale`` shared by all rank decisions."""
    return dim * _EPS * abs(scale)


def symmetric_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending.

    The input must be square and symmetric to within 1e-12 relative; both
    are checked because silently symmetrizing a lopsided matrix hides bugs
    upstream.
    """
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("matrix contains non-finite entries")
    scale = float(np.abs(s).max()) if s.size else 0.0
    if scale > 0 and float(np.abs(s - s.T).max()) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric to 1e-12 relative")
    return np.linalg.eigvalsh(s)


def min_nonzero(values: np.ndarray, reference_scale: float, dim: int | None = None) -> float:
    """Smallest entry of an ascending spectrum that counts as nonzero.

    ``reference_scale`` is the largest magnitude in the spectrum and ``dim``
    the matrix dimension behind it (defaults to ``len(values)``).  Entries at
    or below ``rank_tolerance(dim, reference_scale)`` are treated as zeros;
    if everything is below the cutoff the input has numerical rank 0 and a
    ValueError is raised.
    """
    vals = np.asarray(values, dtype=float)
    tol = rank_tolerance(dim if dim is not None else vals.size, reference_scale)
    above = vals[vals > tol]
    if above.size == 0:
        raise ValueError("all values are numerically zero (rank 0)")
    return float(above[0])


def min_norm_lstsq(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution ``pinv(a) @ v``.

    Uses the SVD-backed solver with the standard ``max(rows, cols) * eps``
    relative cutoff, matching :func:`min_nonzero`.
    """
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if v.ndim != 1 or v.size != a.shape[0]:
        raise ValueError(f"rhs length {v.shape} does not match {a.shape[0]} rows")
    solution, _, _, _ = np.linalg.lstsq(a, v, rcond=None)
    return solution


def pseudo_inverse(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the shared rank cutoff.

    Equivalent to solving with :func:`min_norm_lstsq` column by column;
    materialized once so repeated block solves become a single matvec.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]))
    u, sigma, vt = np.linalg.svd(a, full_matrices=False)
    tol = rank_tolerance(max(a.shape), float(sigma[0]) if sigma.size else 0.0)
    inv = np.where(sigma > tol, np.divide(1.0, sigma, where=sigma > 0), 0.0)
    return (vt.T * inv) @ u.T
