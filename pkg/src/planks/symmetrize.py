"""Diagonal row scaling plus orthogonal rotation that turns a square matrix
into a PSD matrix with unit diagonal.

Given ``A`` with non-null rows we look for ``theta > 0`` and orthogonal ``U``
such that ``H = diag(theta) @ A @ U`` is symmetric PSD with ``diag(H) == 1``.
The scaling ``theta`` is found by minimising the nuclear norm of
``diag(theta) @ A`` under ``prod(theta) == 1``; the multiplicative update

    gamma_i = geomean(sqrt(h_jj)) / sqrt(h_ii)

never increases that nuclear norm, and its fixed points are exactly the
scalings for which the PSD polar factor has constant diagonal.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDiagonal, InvalidOrthogonal, NoConvergence, NullRow
from .kernel import as_matrix, nuclear_norm, polar_decompose

log = logging.getLogger(__name__)

NULL_ROW_TOL = 1e-12
DIAG_FLOOR = 1e-12


@dataclass(frozen=True)
class ScalingConfig:
    tol: float = 1e-10
    max_iter: int = 10000
    damping: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")


@dataclass
class SymmetrizationResult:
    """Outcome of :func:`symmetrize`.

    ``history`` holds the nuclear norm of ``diag(theta) @ A`` at every iterate
    (before the final rescale); ``nuclear_trace`` is its last entry.
    """

    theta: np.ndarray
    U: np.ndarray
    H: np.ndarray
    iterations: int
    residual: float
    nuclear_trace: float
    history: list = field(default_factory=list, repr=False)

    def reconstruction_error(self, A):
        A = np.asarray(A, dtype=float)
        return float(np.max(np.abs(self.theta[:, None] * (A @ self.U) - self.H)))


def _check_rows(A):
    norms = np.linalg.norm(A, axis=1)
    bad = np.flatnonzero(norms < NULL_ROW_TOL)
    if bad.size:
        raise NullRow(f"row(s) {bad.tolist()} are null", rows=bad.tolist())


def _scale(polar_of, weights, config):
    """Run the multiplicative scaling on a (possibly block-reduced) system.

    ``polar_of(theta)`` returns ``(diag, factors)`` where ``diag`` holds the
    diagonal of the PSD factor per block and ``weights`` the block sizes.
    Returns ``(theta, converged, iterations, history)`` with ``theta`` already
    normalised so the mean diagonal is one.
    """
    total = weights.sum()
    theta = np.ones(weights.shape[0])
    history = []
    for it in range(config.max_iter + 1):
        d, _ = polar_of(theta)
        if d.min() < DIAG_FLOOR:
            raise DegenerateDiagonal(
                f"diagonal entry {d.min():.3e} collapsed at iteration {it}"
            )
        trace = float(weights @ d)
        history.append(trace)
        mean = trace / total
        if np.max(np.abs(d / mean - 1.0)) <= config.tol:
            d1, _ = polar_of(theta / mean)
            if np.max(np.abs(d1 - 1.0)) <= config.tol:
                return theta / mean, True, it, history
        if it == config.max_iter:
            return theta / mean, False, it, history
        log_gm = (weights @ np.log(d)) / total
        gamma = np.exp(0.5 * log_gm) / np.sqrt(d)
        theta = theta * gamma**config.damping


def _finish(scaled, materialize, polar_of):
    theta, converged, it, history = scaled
    _, f = polar_of(theta)
    H, U = materialize(theta, f)
    residual = float(np.max(np.abs(np.diag(H) - 1.0)))
    result = SymmetrizationResult(theta, U, H, it, residual, history[-1], history)
    if not converged:
        raise NoConvergence(
            f"no convergence after {it} iterations (residual {residual:.3e})",
            result=result,
        )
    log.debug("symmetrize converged in %d iterations, residual %.2e", it, residual)
    return result


def symmetrize(A, config=None):
    """Find ``theta > 0`` and orthogonal ``U`` with ``diag(theta) A U`` PSD and unit-diagonal.

    Raises:
        NullRow: some row of ``A`` has 2-norm below 1e-12.
        DegenerateDiagonal: the PSD factor lost a diagonal entry numerically.
        NoConvergence: ``config.max_iter`` updates did not reach ``config.tol``;
            ``exc.result`` carries the best iterate.
    """
    config = config or ScalingConfig()
    A = as_matrix(A, name="A")
    _check_rows(A)
    n = A.shape[0]

    def polar_of(theta):
        f = polar_decompose(theta[:, None] * A)
        return np.diag(f.psd_part).copy(), f

    return _finish(
        _scale(polar_of, np.ones(n), config),
        lambda theta, f: (f.psd_part, f.orthogonal_part.T),
        polar_of,
    )


def symmetrize_replicated(A, counts, config=None):
    """Symmetrize the matrix obtained by repeating row/column ``i`` of ``A``
    ``counts[i]`` times, without iterating on the large matrix.

    The replicated scaling stays constant across copies, so the iteration runs
    on the ``n x n`` matrix ``sqrt(k) theta A sqrt(k)``. The returned result is
    expressed on the full ``K x K`` system (``K = sum(counts)``), row order
    ``(0,0), (0,1), ..., (1,0), ...``, and satisfies the same invariants as
    :func:`symmetrize` applied to the materialised matrix.
    """
    config = config or ScalingConfig()
    A = as_matrix(A, name="A")
    _check_rows(A)
    k = np.asarray(counts, dtype=int)
    if k.shape != (A.shape[0],) or np.any(k < 1):
        raise ValueError("counts must hold one positive integer per row of A")
    sk = np.sqrt(k.astype(float))
    weights = k.astype(float)

    def polar_of(theta):
        f = polar_decompose(sk[:, None] * theta[:, None] * A * sk[None, :])
        return np.diag(f.psd_part) / weights, f

    idx = np.repeat(np.arange(A.shape[0]), k)
    # R has orthonormal columns: R[(i, t), i] = 1 / sqrt(k_i)
    R = np.zeros((idx.size, A.shape[0]))
    R[np.arange(idx.size), idx] = 1.0 / sk[idx]

    def materialize(theta, f):
        H = R @ f.psd_part @ R.T
        U = R @ f.orthogonal_part.T @ R.T + np.eye(idx.size) - R @ R.T
        return 0.5 * (H + H.T), U

    result = _finish(_scale(polar_of, weights, config), materialize, polar_of)
    result.theta = result.theta[idx]
    return result


def diagonal_trace_bound(H, U):
    """Both sides of ``sum_i (HU)_ii^2 / h_ii <= sum_i h_ii`` for PSD ``H``, orthogonal ``U``.

    Returns ``(lhs, rhs)``.
    """
    H = as_matrix(H, name="H")
    U = as_matrix(U, name="U")
    d = np.diag(H)
    if d.min() < DIAG_FLOOR:
        raise DegenerateDiagonal(f"diagonal entry {d.min():.3e} below {DIAG_FLOOR}")
    if np.max(np.abs(U @ U.T - np.eye(U.shape[0]))) > 1e-8:
        raise InvalidOrthogonal("U is not orthogonal to 1e-8")
    hu = np.einsum("ij,ji->i", H, U)
    return float(np.sum(hu**2 / d)), float(np.sum(d))


def normalized_nuclear_bound(H):
    """Both sides of ``||(h_ij / sqrt(h_ii))||_1 <= sqrt(n) ||H||_1^(1/2)`` for PSD ``H``.

    Returns ``(lhs, rhs)`` with ``||.||_1`` the nuclear norm.
    """
    H = as_matrix(H, name="H")
    d = np.diag(H)
    if d.min() < DIAG_FLOOR:
        raise DegenerateDiagonal(f"diagonal entry {d.min():.3e} below {DIAG_FLOOR}")
    lhs = nuclear_norm(H / np.sqrt(d)[:, None])
    rhs = np.sqrt(H.shape[0]) * np.sqrt(nuclear_norm(H))
    return float(lhs), float(rhs)
