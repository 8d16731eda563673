"""Spectral matrix functions for symmetric positive (semi-)definite matrices."""

import numpy as np

from .errors import MatrixError, SingularSourceError

SYM_TOL = 1e-10
PSD_TOL = 1e-10
MAX_CONDITION = 1e12


def as_square(M, name="matrix"):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise MatrixError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise MatrixError(f"{name} has non-finite entries")
    return M


def check_symmetric(M, name="matrix"):
    if np.max(np.abs(M - M.T), initial=0.0) > SYM_TOL:
        raise MatrixError(f"{name} is not symmetric")
    return 0.5 * (M + M.T)


def _eigh_psd(M, name):
    M = check_symmetric(as_square(M, name), name)
    w, V = np.linalg.eigh(M)
    if w.size and w[0] < -PSD_TOL:
        raise MatrixError(f"{name} is not positive semi-definite (eigenvalue {w[0]:.3e})")
    return np.clip(w, 0.0, None), V


def matrix_sqrt(M):
    """Principal square root of a symmetric PSD matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more
    negative, or an asymmetric input, raises :class:`MatrixError`.
    """
    w, V = _eigh_psd(M, "matrix")
    R = (V * np.sqrt(w)) @ V.T
    return 0.5 * (R + R.T)


def matrix_inv_sqrt(M, name="matrix"):
    """``M^{-1/2}`` for a strictly positive-definite, well-conditioned ``M``."""
    w, V = _eigh_psd(M, name)
    if w[0] <= 0.0 or w[-1] / w[0] > MAX_CONDITION:
        raise SingularSourceError(f"{name} is singular or ill-conditioned (eigenvalues {w[0]:.3e}..{w[-1]:.3e})")
    R = (V / np.sqrt(w)) @ V.T
    return 0.5 * (R + R.T)
