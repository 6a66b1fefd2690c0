"""Point construction for plank systems.

A plank system ``(A, m, w)`` has a unit-diagonal matrix ``A``, midpoints ``m``
and half-widths ``w`` with ``sum(w) <= 1``. A solution is a coefficient
vector ``lam`` with ``sum(|lam|) <= 1`` and ``|A lam - m|_i >= w_i`` for all i.

Equal widths ``1/n`` are handled directly (scale, choose signs, rotate back),
which even gives ``sum(lam**2) <= 1/n``. Unequal widths are reduced to the
equal-width case by splitting every plank into overlapping sheets of width
``1/K`` and folding the sheet coefficients back together.
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bang import DIAGONAL_TOL, BangInstance, bang_signs
from .errors import (
    CertificateViolation,
    InstanceError,
    InsufficientSlack,
    InvalidDimension,
    ResolutionTooCoarse,
    TooLarge,
)
from .kernel import as_matrix
from .symmetrize import ScalingConfig, symmetrize, symmetrize_replicated

log = logging.getLogger(__name__)

CONTRACT_SLACK = 1e-9
THETA_SLACK = 1e-8
AUTO_RETRIES = 3
# the replicated K x K system is dense; 4096 sheets is ~130 MB per matrix
MAX_SHEETS = 4096


class Certificate(str, enum.Enum):
    EQUAL_WIDTH = "EqualWidth"
    REPLICATED = "Replicated"
    DIRECT_WEIGHTED = "DirectWeighted"


@dataclass
class PlankSystem:
    A: np.ndarray
    m: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        self.A = as_matrix(self.A, name="A")
        self.m = np.asarray(self.m, dtype=float)
        self.w = np.asarray(self.w, dtype=float)
        n = self.A.shape[0]
        if self.m.shape != (n,) or self.w.shape != (n,):
            raise InvalidDimension(
                f"A is {n}x{n} but m has shape {self.m.shape}, w {self.w.shape}"
            )
        if not (np.all(np.isfinite(self.m)) and np.all(np.isfinite(self.w))):
            raise InstanceError("midpoints and half-widths must be finite")
        off = float(np.max(np.abs(np.diag(self.A) - 1.0)))
        if off > 1e-10:
            raise InstanceError(f"A must have unit diagonal (max deviation {off:.3e})")
        if np.any(self.w <= 0):
            raise InstanceError("half-widths must be positive")
        if self.w.sum() > 1 + 1e-12:
            raise InstanceError(f"half-widths sum to {self.w.sum():.17g} > 1")

    @property
    def n(self):
        return self.A.shape[0]

    @classmethod
    def equal_width(cls, A, m):
        A = as_matrix(A, name="A")
        return cls(A, m, np.full(A.shape[0], 1.0 / A.shape[0]))


@dataclass
class Solution:
    """Coefficients with their margins and norms.

    ``resolution`` is the sheet count N for replicated solves. ``meta`` holds
    solver bookkeeping (iterations, flips, sheet count K, sum of theta^2).
    """

    lam: np.ndarray
    margins: np.ndarray
    l1_norm: float
    l2sq_norm: float
    weighted_norm: float
    certificate: Certificate
    resolution: int = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_coefficients(cls, system, lam, certificate, resolution=None, **meta):
        lam = np.asarray(lam, dtype=float)
        return cls(
            lam=lam,
            margins=np.abs(system.A @ lam - system.m),
            l1_norm=float(np.sum(np.abs(lam))),
            l2sq_norm=float(lam @ lam),
            weighted_norm=float(np.sum(lam**2 / system.w)),
            certificate=certificate,
            resolution=resolution,
            meta=meta,
        )


def _assemble_equal_width(A, m, sym, max_flips, seed):
    n = A.shape[0]
    theta = sym.theta
    theta_sq = float(theta @ theta)
    if theta_sq > n + THETA_SLACK:
        raise CertificateViolation(f"sum(theta^2) = {theta_sq:.17g} exceeds n = {n}")
    inst = BangInstance(sym.H, theta, n * theta * m)
    signs = bang_signs(inst, max_flips=max_flips, restarts=1, seed=seed,
                       diag_tol=max(DIAGONAL_TOL, 2 * sym.residual))
    lam = sym.U @ (signs.signs * theta) / n
    return lam, signs, theta_sq


def solve_equal_width(A, m, config=None, max_flips=1_000_000, seed=42, symmetrization=None):
    """Find ``lam`` with ``sum(lam**2) <= 1/n`` and ``|A lam - m| >= 1/n`` row-wise.

    ``symmetrization`` may supply a precomputed result for ``A`` (used by the
    sheet construction, which builds it block-wise).

    Raises:
        CertificateViolation: the assembled point failed its own post-check.
    """
    config = config or ScalingConfig()
    system = PlankSystem.equal_width(A, m)
    A, m, n = system.A, system.m, system.n
    sym = symmetrization if symmetrization is not None else symmetrize(A, config)
    lam, signs, theta_sq = _assemble_equal_width(A, m, sym, max_flips, seed)
    sol = Solution.from_coefficients(
        system, lam, Certificate.EQUAL_WIDTH,
        iterations=sym.iterations, flips=signs.flips, theta_sq=theta_sq,
        residual=sym.residual,
    )
    worst = float(sol.margins.min())
    if worst < 1.0 / n - CONTRACT_SLACK or sol.l2sq_norm > 1.0 / n + CONTRACT_SLACK:
        raise CertificateViolation(
            f"equal-width post-check failed: min margin {worst:.3e}, "
            f"sum(lam^2) {sol.l2sq_norm:.3e}, n = {n}"
        )
    return sol


def auto_resolution(n, slack):
    return max(int(math.ceil(2 * n / slack)), 1)


def sheet_counts(w, N):
    return np.floor(np.asarray(w) * N).astype(int) + 1


def sheet_centers(m, w, N, counts=None):
    """Midpoints of the sheets covering each plank, grouped per plank.

    Plank ``i`` gets ``k_i = floor(w_i N) + 1`` centers spread evenly from
    ``m_i - w_i + 1/N`` to ``m_i + w_i - 1/N`` (a single center at ``m_i`` when
    ``k_i == 1``). Open intervals of radius ``1/N`` around them cover the open
    plank, since consecutive centers are less than ``2/N`` apart.
    """
    counts = sheet_counts(w, N) if counts is None else counts
    out = []
    for mi, wi, ki in zip(m, w, counts):
        if ki == 1:
            out.append(np.array([mi]))
        else:
            out.append(np.linspace(mi - wi + 1.0 / N, mi + wi - 1.0 / N, ki))
    return out


def _dilation(total, n, N):
    # widths are stretched to fill the sheet budget 1 - n/N; shrunk back afterwards
    return max(total, 1.0 - n / N) / total


def _solve_replicated(system, N, config, max_flips, seed):
    n = system.n
    total = float(system.w.sum())
    scale = _dilation(total, n, N)
    w = system.w * scale
    m = system.m * scale
    counts = sheet_counts(w, N)
    K = int(counts.sum())
    if K > N:
        raise ResolutionTooCoarse(f"{K} sheets do not fit resolution N = {N}", K=K, N=N)
    if K > MAX_SHEETS:
        raise TooLarge(
            f"replication needs {K} sheets (limit {MAX_SHEETS}); widen the gap 1 - sum(w) "
            "or use the direct strategy", K=K,
        )
    centers = np.concatenate(sheet_centers(m, w, N, counts))
    idx = np.repeat(np.arange(n), counts)
    A_rep = system.A[np.ix_(idx, idx)]
    sym = symmetrize_replicated(system.A, counts, config)
    sheet_sol = solve_equal_width(A_rep, centers, config, max_flips=max_flips, seed=seed,
                                  symmetrization=sym)
    lam = np.bincount(idx, weights=sheet_sol.lam, minlength=n) / scale
    sol = Solution.from_coefficients(
        system, lam, Certificate.REPLICATED, resolution=N,
        iterations=sheet_sol.meta["iterations"], flips=sheet_sol.meta["flips"],
        theta_sq=sheet_sol.meta["theta_sq"], sheets=K, dilation=scale,
    )
    _post_check(system, sol)
    return sol


def _post_check(system, sol):
    deficit = system.w - sol.margins
    if deficit.max() > CONTRACT_SLACK or sol.l1_norm > 1 + CONTRACT_SLACK:
        raise CertificateViolation(
            f"{sol.certificate.value} post-check failed: worst margin deficit "
            f"{deficit.max():.3e}, sum|lam| = {sol.l1_norm:.17g}",
            rows=np.flatnonzero(deficit > CONTRACT_SLACK).tolist(),
        )


def _solve_direct(system, config, max_flips, seed):
    sym = symmetrize(system.A, config)
    theta, w = sym.theta, system.w
    inst = BangInstance(sym.H, theta * w, theta * system.m)
    signs = bang_signs(inst, max_flips=max_flips, restarts=1, seed=seed,
                       diag_tol=max(DIAGONAL_TOL, 2 * sym.residual))
    lam = sym.U @ (signs.signs * theta * w)
    sol = Solution.from_coefficients(
        system, lam, Certificate.DIRECT_WEIGHTED,
        iterations=sym.iterations, flips=signs.flips, theta_sq=float(theta @ theta),
    )
    _post_check(system, sol)
    return sol


def solve_general(system, strategy="replicate", sheet_resolution="auto", config=None,
                  max_flips=1_000_000, seed=42):
    """Solve a plank system with arbitrary positive half-widths, ``sum(w) < 1``.

    ``strategy="replicate"`` splits planks into equal sheets at resolution N
    (``"auto"`` picks ``ceil(2n / (1 - sum(w)))`` and doubles it up to three
    times if the sheets do not fit or the fold misses its post-check).
    ``strategy="direct"`` scales by the widths directly on the ``n x n`` system;
    margins hold by construction but the norm bound is only checked after the
    fact, falling back to replication when it fails.

    Raises:
        InsufficientSlack: ``sum(w) >= 1``.
        ResolutionTooCoarse: the sheets do not fit the requested resolution.
        TooLarge: more than ``MAX_SHEETS`` sheets would be needed.
    """
    config = config or ScalingConfig()
    n = system.n
    slack = 1.0 - float(system.w.sum())
    if slack <= 0:
        shrink = 1 - 1e-6
        raise InsufficientSlack(
            f"half-widths sum to {1 - slack:.17g}; sheet replication needs sum(w) < 1 "
            f"(e.g. multiply w by {shrink})"
        )
    if strategy == "direct":
        try:
            return _solve_direct(system, config, max_flips, seed)
        except CertificateViolation as exc:
            log.info("direct weighting failed its check (%s); replicating", exc)
    elif strategy != "replicate":
        raise ValueError(f"unknown strategy {strategy!r}")

    if sheet_resolution == "auto":
        N = auto_resolution(n, slack)
        for attempt in range(AUTO_RETRIES + 1):
            try:
                return _solve_replicated(system, N, config, max_flips, seed)
            except (ResolutionTooCoarse, CertificateViolation) as exc:
                if attempt == AUTO_RETRIES:
                    raise
                log.info("resolution N=%d failed (%s); doubling", N, exc)
                N *= 2
    N = int(sheet_resolution)
    if N < 1:
        raise ValueError("sheet_resolution must be positive")
    return _solve_replicated(system, N, config, max_flips, seed)


@dataclass
class DualSolution:
    """A functional ``phi = sum_j lam_j psi_j`` given by its coordinates."""

    phi: np.ndarray
    lam: np.ndarray
    functionals: np.ndarray
    values: np.ndarray
    margins: np.ndarray
    dual_norm: float
    solution: Solution


def solve_dual(body, points, m, w, config=None, strategy="replicate",
               sheet_resolution="auto", max_flips=1_000_000, seed=42):
    """Find a functional of dual norm at most one far from ``m`` on each point.

    ``points`` are unit vectors of ``body`` (one per row). Returns a
    :class:`DualSolution` with ``|phi(x_i) - m_i| >= w_i``.
    """
    from .geometry import dual_norm, gauge, norming_functional

    X = np.atleast_2d(np.asarray(points, dtype=float))
    for i, x in enumerate(X):
        g = gauge(body, x)
        if abs(g - 1.0) > 1e-9:
            raise InstanceError(f"point {i} has norm {g:.17g}, expected 1")
    Psi = np.array([norming_functional(body, x) for x in X])
    A = X @ Psi.T  # a_ij = psi_j(x_i)
    np.fill_diagonal(A, 1.0)
    system = PlankSystem(A, m, w)
    sol = solve_general(system, strategy=strategy, sheet_resolution=sheet_resolution,
                        config=config, max_flips=max_flips, seed=seed)
    phi = Psi.T @ sol.lam
    values = X @ phi
    return DualSolution(phi, sol.lam, Psi, values, np.abs(values - system.m),
                        dual_norm(body, phi), sol)
