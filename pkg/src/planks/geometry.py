"""Symmetric convex bodies as norms, and homothets avoiding hyperplanes.

A body is either an l_p unit ball or an invertible linear image of another
body. Given ``n`` hyperplanes, :func:`solve_homothet` finds a center ``x`` so
that ``x + body / (n + 1)`` lies inside the body and no hyperplane meets its
interior.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimension, InvalidMatrix, NonNormable, NotNormalized, NullNormal
from .solver import solve_equal_width

NORMALIZATION_TOL = 1e-6


def parse_p(p):
    """Accept a number in [1, inf] or the string ``"inf"``."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity"):
            return math.inf
        raise ValueError(f"p must be a number or 'inf', got {p!r}")
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"p must lie in [1, inf], got {p}")
    return p


@dataclass(frozen=True)
class LpBall:
    p: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "p", parse_p(self.p))
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidDimension(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))


@dataclass(frozen=True, eq=False)
class LinearImage:
    """The body ``map @ base``; its norm is ``gauge(base, inv(map) @ x)``."""

    base: object
    map: np.ndarray

    def __post_init__(self):
        M = np.array(self.map, dtype=float)
        d = self.base.dim
        if M.shape != (d, d) or not np.all(np.isfinite(M)):
            raise InvalidMatrix(f"map must be a finite {d}x{d} matrix, got shape {M.shape}")
        sign, logdet = np.linalg.slogdet(M)
        if sign == 0 or logdet < math.log(1e-12):
            raise InvalidMatrix("map must be invertible (|det| >= 1e-12)")
        M.setflags(write=False)
        object.__setattr__(self, "map", M)

    @property
    def dim(self):
        return self.base.dim


def _vector(body, x, name="x"):
    x = np.asarray(x, dtype=float)
    if x.shape != (body.dim,):
        raise InvalidDimension(f"{name} must have shape ({body.dim},), got {x.shape}")
    return x


def _lp(x, p):
    if math.isinf(p):
        return float(np.max(np.abs(x)))
    if p == 1:
        return float(np.sum(np.abs(x)))
    if p == 2:
        return float(np.linalg.norm(x))
    a = np.abs(x)
    top = a.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((a / top) ** p) ** (1.0 / p))


def conjugate_exponent(p):
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def gauge(body, x):
    """The norm whose unit ball is ``body``."""
    x = _vector(body, x)
    if isinstance(body, LpBall):
        return _lp(x, body.p)
    if isinstance(body, LinearImage):
        return gauge(body.base, np.linalg.solve(body.map, x))
    raise NonNormable(f"unsupported body {body!r}")


def dual_norm(body, phi):
    """``max <phi, x>`` over the body."""
    phi = _vector(body, phi, "phi")
    if isinstance(body, LpBall):
        return _lp(phi, conjugate_exponent(body.p))
    if isinstance(body, LinearImage):
        return dual_norm(body.base, body.map.T @ phi)
    raise NonNormable(f"unsupported body {body!r}")


def norming_point(body, phi):
    """A boundary point ``x`` with ``<phi, x> = 1`` for a unit functional ``phi``.

    Raises NotNormalized if ``dual_norm(body, phi)`` is off by more than 1e-6.
    """
    phi = _vector(body, phi, "phi")
    size = dual_norm(body, phi)
    if abs(size - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"functional has dual norm {size:.17g}, expected 1")
    return _norming_point(body, phi / size)


def _norming_point(body, phi):
    if isinstance(body, LinearImage):
        return body.map @ _norming_point(body.base, body.map.T @ phi)
    if not isinstance(body, LpBall):
        raise NonNormable(f"unsupported body {body!r}")
    p = body.p
    if math.isinf(p):
        return np.where(phi < 0, -1.0, 1.0)
    if p == 1:
        k = int(np.argmax(np.abs(phi)))
        x = np.zeros_like(phi)
        x[k] = 1.0 if phi[k] >= 0 else -1.0
        return x
    q = conjugate_exponent(p)
    return np.sign(phi) * np.abs(phi) ** (q - 1.0)


def norming_functional(body, x):
    """A functional ``psi`` of dual norm one with ``psi(x) = 1`` for a unit vector ``x``."""
    x = _vector(body, x)
    size = gauge(body, x)
    if abs(size - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"vector has norm {size:.17g}, expected 1")
    return _norming_functional(body, x / size)


def _norming_functional(body, x):
    if isinstance(body, LinearImage):
        z = np.linalg.solve(body.map, x)
        return np.linalg.solve(body.map.T, _norming_functional(body.base, z))
    if not isinstance(body, LpBall):
        raise NonNormable(f"unsupported body {body!r}")
    # the l_q ball's norming point for x is the l_p ball's norming functional
    return _norming_point(LpBall(conjugate_exponent(body.p), body.dim), x)


@dataclass
class Hyperplane:
    """The set ``{x : <normal, x> = offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float)
        self.offset = float(self.offset)
        if self.normal.ndim != 1 or not np.all(np.isfinite(self.normal)):
            raise InvalidDimension("normal must be a finite vector")
        if np.linalg.norm(self.normal) < 1e-12:
            raise NullNormal("hyperplane normal is (numerically) zero")

    def normalized(self, body):
        """``(phi, m)`` with ``phi`` of unit dual norm describing the same hyperplane."""
        size = dual_norm(body, self.normal)
        return self.normal / size, self.offset / size


@dataclass
class HomothetResult:
    """Center and margins (in unit-functional scale) of the avoiding homothet.

    ``scales`` are the dual norms of the raw normals; ``margins * scales``
    recovers distances in the hyperplanes' own units.
    """

    center: np.ndarray
    ratio: float
    margins: np.ndarray
    body_norm_of_center: float
    functionals: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    scales: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)
    solution: object = field(repr=False, default=None)


def normalize_hyperplanes(body, hyperplanes):
    if not hyperplanes:
        raise InvalidDimension("need at least one hyperplane")
    Phi, m, scales = [], [], []
    for h in hyperplanes:
        if h.normal.shape != (body.dim,):
            raise InvalidDimension(
                f"normal has shape {h.normal.shape}, body dimension is {body.dim}"
            )
        phi, mi = h.normalized(body)
        Phi.append(phi)
        m.append(mi)
        scales.append(dual_norm(body, h.normal))
    return np.array(Phi), np.array(m), np.array(scales)


def solve_homothet(body, hyperplanes, config=None, max_flips=1_000_000, seed=42):
    """Center of a copy of ``body`` scaled by ``1/(n+1)`` avoiding all hyperplanes.

    The hyperplanes become unit functionals ``phi_i`` with levels ``m_i``;
    with norming points ``x_j`` of ``phi_j`` the matrix ``a_ij = phi_i(x_j)``
    has unit diagonal, and an equal-width solution for levels
    ``m (n+1)/n`` gives ``y = sum_j lam_j x_j`` in the body. The center
    ``x = y n/(n+1)`` then satisfies ``gauge(x) <= n/(n+1)`` and
    ``|phi_i(x) - m_i| >= 1/(n+1)``.
    """
    Phi, m, scales = normalize_hyperplanes(body, hyperplanes)
    n = len(hyperplanes)
    X = np.array([norming_point(body, phi) for phi in Phi])
    A = Phi @ X.T
    np.fill_diagonal(A, 1.0)
    sol = solve_equal_width(A, m * (n + 1) / n, config, max_flips=max_flips, seed=seed)
    y = X.T @ sol.lam
    center = y * n / (n + 1)
    return HomothetResult(
        center=center,
        ratio=1.0 / (n + 1),
        margins=np.abs(Phi @ center - m),
        body_norm_of_center=gauge(body, center),
        functionals=Phi,
        offsets=m,
        lam=sol.lam,
        solution=sol,
        scales=scales,
    )


def sharpness_instance(n, d):
    """Cube ``[-1, 1]^d`` with ``n`` evenly spaced hyperplanes normal to ``e_1``.

    No homothet larger than ``1/(n+1)`` fits between them.
    """
    if n < 1 or d < 1:
        raise InvalidDimension("n and d must be positive")
    e1 = np.zeros(d)
    e1[0] = 1.0
    planes = [Hyperplane(e1, -1.0 + 2.0 * k / (n + 1)) for k in range(1, n + 1)]
    return LpBall(math.inf, d), planes


def davenport_comparison(n):
    """``(2**-n, 1/(n+1))``: the cube pigeonhole factor versus the homothet factor."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return 2.0**-n, 1.0 / (n + 1)
