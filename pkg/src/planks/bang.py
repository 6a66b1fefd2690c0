"""Sign selection for symmetric unit-diagonal systems.

For symmetric ``H`` with unit diagonal, non-negative ``theta`` and any ``mu``
there are signs ``eps`` with

    |sum_j h_ij eps_j theta_j - mu_i| >= theta_i   for every i.

A flip-local maximiser of

    F(eps) = sum_ij h_ij eps_i eps_j theta_i theta_j - 2 sum_i eps_i theta_i mu_i

has this property: flipping coordinate ``k`` changes ``F`` by
``4 h_kk theta_k^2 - 4 eps_k theta_k (S_k - mu_k)``, which is positive whenever
row ``k`` violates its margin. Local search over violating coordinates
therefore strictly increases ``F`` and terminates.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import FlipBudgetExceeded, InvalidDimension, NotSymmetric
from .kernel import as_matrix

log = logging.getLogger(__name__)

MARGIN_SLACK = 1e-9
SYMMETRY_TOL = 1e-10
DIAGONAL_TOL = 1e-10


@dataclass
class BangInstance:
    H: np.ndarray
    theta: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        self.H = as_matrix(self.H, name="H")
        self.theta = np.asarray(self.theta, dtype=float)
        self.mu = np.asarray(self.mu, dtype=float)
        n = self.H.shape[0]
        if self.theta.shape != (n,) or self.mu.shape != (n,):
            raise InvalidDimension(
                f"H is {n}x{n} but theta has shape {self.theta.shape}, mu {self.mu.shape}"
            )

    @property
    def n(self):
        return self.H.shape[0]

    def validate(self, diag_tol=DIAGONAL_TOL):
        """Check the hypotheses the sign search relies on."""
        asym = float(np.max(np.abs(self.H - self.H.T)))
        if asym > SYMMETRY_TOL:
            raise NotSymmetric(f"H is not symmetric (max asymmetry {asym:.3e})")
        off = float(np.max(np.abs(np.diag(self.H) - 1.0)))
        if off > diag_tol:
            raise NotSymmetric(f"H must have unit diagonal (max deviation {off:.3e})")
        if np.any(self.theta < 0) or not np.all(np.isfinite(self.theta)):
            raise ValueError("theta must be finite and non-negative")
        if not np.all(np.isfinite(self.mu)):
            raise ValueError("mu must be finite")


@dataclass
class SignResult:
    signs: np.ndarray
    flips: int
    objectives: list = field(default_factory=list, repr=False)


def _as_signs(eps, n):
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (n,):
        raise InvalidDimension(f"expected {n} signs, got shape {eps.shape}")
    if not np.all(np.abs(eps) == 1.0):
        raise ValueError("signs must be exactly +1 or -1")
    return eps


def bang_objective(inst, eps):
    """Evaluate ``F(eps)``."""
    eps = _as_signs(eps, inst.n)
    v = eps * inst.theta
    return float(v @ inst.H @ v - 2.0 * (v @ inst.mu))


def margins(inst, eps):
    """``|H (eps * theta) - mu|`` row by row."""
    eps = _as_signs(eps, inst.n)
    return np.abs(inst.H @ (eps * inst.theta) - inst.mu)


def _violations(inst, eps, S, slack):
    r = S - inst.mu
    h = np.diag(inst.H)
    target = inst.theta * np.minimum(1.0, h) - slack
    viol = (inst.theta > 0) & (np.abs(r) < target)
    gain = 4.0 * h * inst.theta**2 - 4.0 * eps * inst.theta * r
    return viol, gain


def _search(inst, eps, max_flips, slack, record):
    H, theta = inst.H, inst.theta
    n = inst.n
    S = H @ (eps * theta)
    objectives = [bang_objective(inst, eps)] if record else []
    flips = 0
    since_refresh = 0
    while True:
        viol, gain = _violations(inst, eps, S, slack)
        if not viol.any():
            # confirm against a fresh product before accepting
            S = H @ (eps * theta)
            viol, gain = _violations(inst, eps, S, slack)
            if not viol.any():
                return SignResult(eps, flips, objectives)
        if flips >= max_flips:
            raise FlipBudgetExceeded(
                f"flip budget {max_flips} exhausted with {int(viol.sum())} violated rows",
                signs=eps.copy(),
                violations=np.flatnonzero(viol).tolist(),
            )
        k = int(np.argmax(np.where(viol, gain, -np.inf)))
        S -= 2.0 * eps[k] * theta[k] * H[:, k]
        eps[k] = -eps[k]
        flips += 1
        since_refresh += 1
        if since_refresh >= n:
            S = H @ (eps * theta)
            since_refresh = 0
        if record:
            objectives.append(bang_objective(inst, eps))


def bang_signs(inst, max_flips=1_000_000, slack=MARGIN_SLACK, restarts=0, seed=42,
               record=False, diag_tol=DIAGONAL_TOL):
    """Choose signs so every row with ``theta_i > 0`` clears its margin.

    Starts from all ``+1`` and repeatedly flips the violating coordinate with
    the largest objective gain (lowest index on ties). With ``restarts > 0``
    a budget overrun triggers that many extra attempts from seeded random
    starts; in exact arithmetic the first attempt always succeeds.

    Returns a :class:`SignResult`; with ``record=True`` its ``objectives``
    list holds ``F`` before the first flip and after each flip.

    Raises:
        NotSymmetric: ``H`` is asymmetric or lacks a unit diagonal.
        FlipBudgetExceeded: no attempt finished within ``max_flips`` flips.
    """
    inst.validate(diag_tol=diag_tol)
    if max_flips < 1:
        raise ValueError("max_flips must be at least 1")
    try:
        return _search(inst, np.ones(inst.n), max_flips, slack, record)
    except FlipBudgetExceeded:
        if restarts <= 0:
            raise
    rng = np.random.default_rng(seed)
    for attempt in range(restarts):
        log.warning("sign search restart %d/%d", attempt + 1, restarts)
        start = rng.choice([-1.0, 1.0], size=inst.n)
        try:
            return _search(inst, start, max_flips, slack, record)
        except FlipBudgetExceeded as exc:
            last = exc
    raise last


def reject_asymmetric_counterexample():
    """Enumerate all signs for ``H = [[1, 1], [-1, 1]]``, ``theta = (1, 1)``, ``mu = 0``.

    Returns a report listing each sign vector, its row values and whether it
    clears both margins; ``report["any_feasible"]`` is False, which is why the
    sign search insists on symmetric ``H``.
    """
    H = np.array([[1.0, 1.0], [-1.0, 1.0]])
    theta = np.ones(2)
    rows = []
    for eps in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        values = H @ (np.array(eps, dtype=float) * theta)
        failing = [i for i in range(2) if abs(values[i]) < theta[i]]
        rows.append({"signs": eps, "values": values.tolist(), "failing_rows": failing,
                     "feasible": not failing})
    return {"matrix": H.tolist(), "theta": theta.tolist(), "mu": [0.0, 0.0],
            "checks": rows, "any_feasible": any(r["feasible"] for r in rows)}
