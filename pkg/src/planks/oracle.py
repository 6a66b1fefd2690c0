"""Independent checks: recompute margins and norms from scratch, enumerate
sign vectors, and grid-search 2-D centers.

Nothing here reuses solver internals. Sums go through ``math.fsum`` so the
checker's own round-off stays far below the 1e-9 contract slacks.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimension, TooLarge
from .geometry import LinearImage, LpBall, dual_norm, gauge, normalize_hyperplanes

MAX_ENUMERATION = 20
MAX_GRID = 4096


@dataclass
class VerificationReport:
    feasible: bool
    worst_margin_slack: float
    norm_slacks: dict
    failures: list = field(default_factory=list)

    def render(self):
        lines = [f"feasible: {'yes' if self.feasible else 'no'}",
                 f"worst margin slack: {self.worst_margin_slack:.6e}"]
        for name, value in self.norm_slacks.items():
            if value is not None:
                lines.append(f"{name} slack: {value:.6e}")
        for cid, deficit in self.failures:
            lines.append(f"VIOLATED {cid}: deficit {deficit:.6e}")
        return "\n".join(lines)


def _row_value(row, lam):
    return math.fsum(float(a) * float(x) for a, x in zip(row, lam))


def check_solution(system, solution, tol=1e-9):
    """Recheck a matrix-instance solution against its plank system.

    Feasible iff every margin is at least ``w_i - tol`` and the norm bound
    of the solution's certificate holds within ``tol``: ``sum(lam^2) <= 1/n``
    for equal-width certificates, ``sum(|lam|) <= 1`` otherwise.
    """
    lam = [float(x) for x in np.asarray(solution.lam).ravel()]
    n = system.n
    if len(lam) != n:
        raise InvalidDimension(f"solution has {len(lam)} coefficients, system has {n} planks")
    failures = []
    worst = math.inf
    for i in range(n):
        margin = abs(_row_value(system.A[i], lam) - float(system.m[i]))
        slack = margin - float(system.w[i])
        worst = min(worst, slack)
        if slack < -tol:
            failures.append((f"plank[{i}]", -slack))
    l1 = math.fsum(abs(x) for x in lam)
    l2sq = math.fsum(x * x for x in lam)
    weighted = math.fsum(x * x / float(wi) for x, wi in zip(lam, system.w))
    slacks = {
        "l1": 1.0 - l1,
        "l2sq": 1.0 / n - l2sq,
        "weighted": math.fsum(float(x) for x in system.w) - weighted,
    }
    cert = getattr(solution.certificate, "value", solution.certificate)
    if cert == "EqualWidth":
        if slacks["l2sq"] < -tol:
            failures.append(("norm:l2sq", -slacks["l2sq"]))
    elif slacks["l1"] < -tol:
        failures.append(("norm:l1", -slacks["l1"]))
    if cert != "EqualWidth":
        slacks["l2sq"] = None
    return VerificationReport(not failures, worst, slacks, failures)


def check_homothet(body, hyperplanes, center, tol=1e-9):
    """Recheck a homothet center: body norm at most ``n/(n+1)`` and every
    normalized hyperplane at distance at least ``1/(n+1)``."""
    n = len(hyperplanes)
    ratio = 1.0 / (n + 1)
    center = np.asarray(center, dtype=float)
    failures = []
    worst = math.inf
    for i, h in enumerate(hyperplanes):
        scale = dual_norm(body, h.normal)
        value = math.fsum(float(a) * float(x) for a, x in zip(h.normal, center))
        margin = abs(value - h.offset) / scale
        worst = min(worst, margin - ratio)
        if margin < ratio - tol:
            failures.append((f"hyperplane[{i}]", ratio - margin))
    norm_slack = 1.0 - ratio - gauge(body, center)
    if norm_slack < -tol:
        failures.append(("norm:body", -norm_slack))
    return VerificationReport(not failures, worst, {"body": norm_slack}, failures)


def sign_margins(H, theta, mu, eps):
    """Row margins ``|sum_j h_ij eps_j theta_j - mu_i|`` by explicit summation."""
    n = len(theta)
    return [abs(math.fsum(float(H[i][j]) * float(eps[j]) * float(theta[j]) for j in range(n))
                - float(mu[i])) for i in range(n)]


def exhaustive_signs(H, theta=None, mu=None):
    """First sign vector (``+1`` before ``-1``, lexicographic) whose rows all
    clear ``|sum_j h_ij eps_j theta_j - mu_i| >= theta_i``; None if none does.

    ``H`` need not be symmetric. Accepts a BangInstance as the first argument.
    """
    if hasattr(H, "H"):
        H, theta, mu = H.H, H.theta, H.mu
    H = np.asarray(H, dtype=float)
    theta = np.asarray(theta, dtype=float)
    mu = np.asarray(mu, dtype=float)
    n = H.shape[0]
    if n > MAX_ENUMERATION:
        raise TooLarge(f"enumeration limited to n <= {MAX_ENUMERATION}, got {n}")
    # columns scaled once; each candidate is a +-1 combination of them
    cols = [[H[i][j] * theta[j] for i in range(n)] for j in range(n)]
    chunk = 1 << min(n, 12)
    candidates = itertools.product((1.0, -1.0), repeat=n)
    while True:
        block = np.array(list(itertools.islice(candidates, chunk)))
        if block.size == 0:
            return None
        values = np.einsum("bj,ji->bi", block, np.array(cols)) - mu
        ok = np.all((theta == 0) | (np.abs(values) >= theta), axis=1)
        hit = np.flatnonzero(ok)
        if hit.size:
            return block[hit[0]].copy()


def bounding_box(body):
    """Half-extents of the body along each coordinate axis."""
    return np.array([dual_norm(body, e) for e in np.eye(body.dim)])


def grid_search_2d(body, hyperplanes, ratio, resolution=512):
    """Best grid center for a homothet of the given ratio, or None.

    Scans the cell centers of a ``resolution x resolution`` grid over the
    body's bounding box, keeping points with ``gauge <= 1 - ratio + s`` and
    normalized margins ``>= ratio - s`` where ``s`` is twice the cell
    diagonal. The returned center maximises the smallest of those slacks.
    """
    if body.dim != 2:
        raise TooLarge(f"grid search is 2-D only, body has dimension {body.dim}")
    if resolution > MAX_GRID or resolution < 1:
        raise TooLarge(f"resolution must lie in [1, {MAX_GRID}]")
    Phi, m, _ = normalize_hyperplanes(body, hyperplanes)
    half = bounding_box(body)
    cell = 2.0 * half / resolution
    slack = 2.0 * float(np.hypot(*cell))
    xs = -half[0] + cell[0] * (np.arange(resolution) + 0.5)
    ys = -half[1] + cell[1] * (np.arange(resolution) + 0.5)
    best, best_score = None, -math.inf
    rows_per_chunk = max(1, 262144 // resolution)
    for start in range(0, resolution, rows_per_chunk):
        X, Y = np.meshgrid(xs, ys[start:start + rows_per_chunk], indexing="xy")
        P = np.stack([X.ravel(), Y.ravel()], axis=1)
        norms = _grid_gauge(body, P)
        score = (1.0 - ratio) - norms
        for phi, mi in zip(Phi, m):
            score = np.minimum(score, np.abs(P @ phi - mi) - ratio)
        k = int(np.argmax(score))
        if score[k] >= -slack and score[k] > best_score:
            best_score, best = float(score[k]), P[k].copy()
    return best


def _grid_gauge(body, P):
    if isinstance(body, LinearImage):
        return _grid_gauge(body.base, np.linalg.solve(body.map, P.T).T)
    if isinstance(body, LpBall):
        if math.isinf(body.p):
            return np.max(np.abs(P), axis=1)
        return np.sum(np.abs(P) ** body.p, axis=1) ** (1.0 / body.p)
    raise TooLarge(f"unsupported body {body!r}")
