"""Dense symmetric linear algebra used by the strategy.

Matrices are plain ``numpy`` arrays. ``sym_eig`` wraps LAPACK's symmetric
divide-and-conquer solver (``numpy.linalg.eigh``), which is deterministic
for identical input and accurate to machine precision for the moderate
dimensions used here.
"""
from typing import NamedTuple

import numpy as np

from .errors import DegeneracyError, NumericalError


class EigenDecomp(NamedTuple):
    """Eigenvalues in ascending order and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def symmetrize(S):
    """Return ``(S + S.T) / 2``, absorbing round-off asymmetry."""
    S = np.asarray(S, dtype=float)
    return 0.5 * (S + S.T)


def sym_eig(S) -> EigenDecomp:
    S = symmetrize(S)
    if not np.all(np.isfinite(S)):
        raise NumericalError("non-finite entry in matrix passed to sym_eig")
    vals, vecs = np.linalg.eigh(S)
    return EigenDecomp(vals, vecs)


def _require_positive(e: EigenDecomp):
    if e.eigenvalues[0] <= 0:
        raise DegeneracyError(
            "matrix is not positive definite (min eigenvalue %r)" % e.eigenvalues[0])


def sqrt_pair(e: EigenDecomp):
    """Symmetric square root and its inverse, ``(E L^1/2 E^T, E L^-1/2 E^T)``."""
    _require_positive(e)
    E = e.eigenvectors
    s = np.sqrt(e.eigenvalues)
    sqrtC = symmetrize((E * s) @ E.T)
    inv_sqrtC = symmetrize((E / s) @ E.T)
    return sqrtC, inv_sqrtC


def cond(e: EigenDecomp) -> float:
    """Condition number ``max eigenvalue / min eigenvalue``."""
    _require_positive(e)
    return float(e.eigenvalues[-1] / e.eigenvalues[0])


def min_eigenvalue(S) -> float:
    S = symmetrize(S)
    if not np.all(np.isfinite(S)):
        raise NumericalError("non-finite entry in matrix passed to min_eigenvalue")
    return float(np.linalg.eigvalsh(S)[0])
