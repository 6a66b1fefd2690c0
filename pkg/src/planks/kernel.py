"""Dense real linear algebra: SVD with a fixed sign convention, polar
decomposition, PSD square roots and the nuclear norm.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Every public
function validates its input through :func:`as_matrix` and never mutates it.
"""

from typing import NamedTuple

import numpy as np

from .errors import InvalidDimension, InvalidMatrix, NotPSD

# Absolute thresholds; every matrix in the pipeline has unit-scale diagonal.
SYMMETRY_TOL = 1e-10
EIG_CLAMP = 1e-8


def as_matrix(M, square=True, name="matrix"):
    """Return ``M`` as a finite 2-D float64 array, raising InvalidMatrix otherwise."""
    try:
        arr = np.array(M, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f"{name}: not a real matrix ({exc})") from exc
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidMatrix(f"{name}: expected a non-empty 2-D array, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"{name}: expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name}: entries must be finite")
    return arr


def svd(M):
    """Full SVD ``M = W @ diag(s) @ Vt`` with reproducible column signs.

    Each left singular vector is flipped so that its first nonzero component
    is positive; the matching right singular vector is flipped with it.
    """
    M = as_matrix(M, square=False)
    W, s, Vt = np.linalg.svd(M, full_matrices=True)
    for k in range(W.shape[1]):
        col = W[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size and col[nz[0]] < 0:
            W[:, k] = -col
            if k < Vt.shape[0]:
                Vt[k] = -Vt[k]
    return W, s, Vt


def nuclear_norm(M):
    """Sum of singular values of a square matrix.

    Equals the maximum of ``trace(M @ Q)`` over orthogonal ``Q``.
    """
    M = as_matrix(M)
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


class PolarFactors(NamedTuple):
    """``M = psd_part @ orthogonal_part`` (left polar decomposition)."""

    psd_part: np.ndarray
    orthogonal_part: np.ndarray
    singular_values: np.ndarray


def polar_decompose(M):
    """Left polar decomposition of a square matrix via the SVD.

    With ``M = W S V^T`` the factors are ``P = W S W^T`` (the PSD square root
    of ``M M^T``) and ``Q = W V^T``. For singular ``M`` the orthogonal factor
    pairs the leftover left/right singular vectors in index order; any such
    completion satisfies ``M = P Q``.
    """
    M = as_matrix(M)
    W, s, Vt = svd(M)
    P = (W * s) @ W.T
    P = 0.5 * (P + P.T)
    Q = W @ Vt
    return PolarFactors(P, Q, s)


def psd_sqrt(H):
    """Symmetric PSD square root of a symmetric PSD matrix.

    Eigenvalues in ``[-1e-8, 0)`` are treated as round-off and clamped to
    zero; anything more negative raises NotPSD.
    """
    H = as_matrix(H)
    asym = np.max(np.abs(H - H.T))
    if asym > SYMMETRY_TOL:
        raise NotPSD(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    evals, evecs = np.linalg.eigh(0.5 * (H + H.T))
    if evals[0] < -EIG_CLAMP:
        raise NotPSD(f"matrix is indefinite (min eigenvalue {evals[0]:.3e})")
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    return 0.5 * (root + root.T)


def random_orthogonal(n, seed):
    """Deterministic orthogonal ``n x n`` matrix: the orthogonal polar factor
    of a seeded standard Gaussian matrix."""
    if int(n) != n or n < 1:
        raise InvalidDimension(f"n must be a positive integer, got {n!r}")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((int(n), int(n)))
    return polar_decompose(G).orthogonal_part


def orthogonality_residual(Q):
    Q = as_matrix(Q)
    return float(np.max(np.abs(Q @ Q.T - np.eye(Q.shape[0]))))
