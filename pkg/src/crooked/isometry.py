"""Linear and affine isometries of Minkowski space.

``LinearIsometry`` wraps a matrix of SO^0(2,1); ``AffineIsometry`` pairs one
with a translation.  Besides the group operations this module carries the
eigen-data of hyperbolic elements, the projective action on the ideal
circle, the Cartan decomposition ``R_theta tau_s R_theta'`` and the
compression estimates for balls in weak-unstable planes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .lorentz import (
    TOL,
    CirclePoint,
    Interval,
    J,
    SpacePoint,
    angle_of,
    bform,
    circle_vector,
    spacelike_from_interval,
    vec,
)


def rotation(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def transvection(s: float) -> np.ndarray:
    """The boost ``tau_s`` in the (x2, x3)-plane."""
    c, h = math.cosh(s), math.sinh(s)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, h], [0.0, h, c]])


def isometry_defect(m: np.ndarray) -> float:
    """Largest violation of ``g^T J g = J`` and ``det g = 1``, relative to ``|g|^2``."""
    scale = max(1.0, float(np.max(np.abs(m))) ** 2)
    d1 = float(np.max(np.abs(m.T @ J @ m - J))) / scale
    d2 = abs(float(np.linalg.det(m)) - 1.0) / scale
    return max(d1, d2)


@dataclass(frozen=True, eq=False)
class LinearIsometry:
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(3, 3)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.check:
            if not np.all(np.isfinite(m)):
                raise ValueError("non-finite matrix")
            if isometry_defect(m) > 1e-9:
                raise ValueError(f"matrix is not in SO(2,1):\n{m}")
            if m[2, 2] <= 0.0:
                raise ValueError("matrix does not preserve the future cone")

    @classmethod
    def identity(cls) -> "LinearIsometry":
        return cls(np.eye(3), check=False)

    @property
    def linear(self) -> "LinearIsometry":
        return self

    @property
    def translation(self) -> np.ndarray:
        return np.zeros(3)

    def __matmul__(self, other: "LinearIsometry") -> "LinearIsometry":
        if isinstance(other, AffineIsometry):
            return AffineIsometry(self, np.zeros(3)) @ other
        return LinearIsometry(self.matrix @ other.matrix, check=False)

    compose = __matmul__

    def inverse(self) -> "LinearIsometry":
        # exact inverse for matrices preserving J
        return LinearIsometry(J @ self.matrix.T @ J, check=False)

    def apply(self, x):
        if isinstance(x, SpacePoint):
            return SpacePoint.of(self.matrix @ x.coords)
        x = np.asarray(x, dtype=float)
        return self.matrix @ x if x.ndim == 1 else x @ self.matrix.T

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.matrix.T

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def power(self, n: int) -> "LinearIsometry":
        base = self if n >= 0 else self.inverse()
        out = LinearIsometry.identity()
        for _ in range(abs(n)):
            out = out @ base
        return out


@dataclass(frozen=True, eq=False)
class AffineIsometry:
    """``h(p) = g p + t`` with ``g`` in SO^0(2,1)."""

    linear: LinearIsometry
    translation: np.ndarray

    def __post_init__(self):
        if not isinstance(self.linear, LinearIsometry):
            object.__setattr__(self, "linear", LinearIsometry(self.linear))
        t = vec(self.translation)
        t.setflags(write=False)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "AffineIsometry":
        return cls(LinearIsometry.identity(), np.zeros(3))

    @classmethod
    def translation_by(cls, t) -> "AffineIsometry":
        return cls(LinearIsometry.identity(), vec(t))

    @property
    def matrix(self) -> np.ndarray:
        return self.linear.matrix

    def __matmul__(self, other) -> "AffineIsometry":
        if isinstance(other, LinearIsometry):
            other = AffineIsometry(other, np.zeros(3))
        return AffineIsometry(
            self.linear @ other.linear,
            self.linear.matrix @ other.translation + self.translation,
        )

    compose = __matmul__

    def inverse(self) -> "AffineIsometry":
        gi = self.linear.inverse()
        return AffineIsometry(gi, -(gi.matrix @ self.translation))

    def apply(self, x):
        """Points move affinely; bare vectors only see the linear part."""
        if isinstance(x, SpacePoint):
            return SpacePoint.of(self.linear.matrix @ x.coords + self.translation)
        return self.linear.apply(x)

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.linear.matrix.T + self.translation

    def power(self, n: int) -> "AffineIsometry":
        base = self if n >= 0 else self.inverse()
        out = AffineIsometry.identity()
        for _ in range(abs(n)):
            out = out @ base
        return out


def as_affine(h) -> AffineIsometry:
    if isinstance(h, AffineIsometry):
        return h
    if isinstance(h, LinearIsometry):
        return AffineIsometry(h, np.zeros(3))
    return AffineIsometry(LinearIsometry(h), np.zeros(3))


def as_linear(g) -> LinearIsometry:
    if isinstance(g, AffineIsometry):
        return g.linear
    if isinstance(g, LinearIsometry):
        return g
    return LinearIsometry(g)


# --- classification and eigen-data -----------------------------------------


class IsometryType(enum.Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def classify(g, tol: float = TOL) -> IsometryType:
    g = as_linear(g)
    tr = g.trace
    if tr > 3.0 + tol:
        return IsometryType.HYPERBOLIC
    if tr < 3.0 - tol:
        return IsometryType.ELLIPTIC
    if np.allclose(g.matrix, np.eye(3), atol=max(tol, 1e-12), rtol=0.0):
        return IsometryType.IDENTITY
    return IsometryType.PARABOLIC


@dataclass(frozen=True, eq=False)
class HyperbolicData:
    lam: float
    xminus: np.ndarray
    xplus: np.ndarray
    x0: np.ndarray

    @property
    def phi_minus(self) -> float:
        return angle_of(self.xminus)

    @property
    def phi_plus(self) -> float:
        return angle_of(self.xplus)

    @property
    def hyperbolicity(self) -> float:
        return float(np.linalg.norm(self.xplus - self.xminus))

    @property
    def translation_length(self) -> float:
        return -math.log(self.lam)


def _null_direction(m: np.ndarray, mu: float) -> np.ndarray:
    """Kernel of ``m - mu I`` from the largest cross product of two rows."""
    a = m - mu * np.eye(3)
    best = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        c = np.cross(a[i], a[j])
        if best is None or c @ c > best @ best:
            best = c
    return best / np.linalg.norm(best)


def _future_section(w: np.ndarray) -> np.ndarray:
    if w[2] < 0.0:
        w = -w
    w = w / w[2]
    # re-project onto S^1: the eigenvector is null up to rounding
    r = math.hypot(w[0], w[1])
    return np.array([w[0] / r, w[1] / r, 1.0])


def frame_vector(xplus, xminus) -> np.ndarray:
    """Unit spacelike ``x0`` with ``(x-, x+, x0)`` a positively oriented null frame."""
    p, q = angle_of(xplus), angle_of(xminus)
    if q <= p:
        q += 2.0 * math.pi
    return spacelike_from_interval(Interval(p, q))


def hyperbolic_data(g, tol: float = TOL) -> HyperbolicData:
    """Eigenvalues ``lam < 1 < 1/lam`` and the null frame of a hyperbolic element.

    The eigenvalue 1 is known, so the other two solve
    ``mu^2 - (tr g - 1) mu + 1 = 0``.  The expanding eigenvector is taken from
    ``g`` and the contracting one from ``g^{-1}`` (each as a dominant root, which
    keeps long words well conditioned); ``x0`` is their Lorentzian cross product.
    """
    g = as_linear(g)
    if classify(g, tol) is not IsometryType.HYPERBOLIC:
        raise ValueError(f"isometry is not hyperbolic (trace {g.trace:.12g})")
    c = g.trace - 1.0
    mu = 0.5 * (c + math.sqrt(c * c - 4.0))
    xplus = _future_section(_null_direction(g.matrix, mu))
    xminus = _future_section(_null_direction(g.inverse().matrix, mu))
    x0 = frame_vector(xplus, xminus)
    return HyperbolicData(lam=1.0 / mu, xminus=xminus, xplus=xplus, x0=x0)


def isometry_hyperbolicity(g, tol: float = TOL) -> float:
    return hyperbolic_data(g, tol).hyperbolicity


def is_epsilon_hyperbolic(g, eps: float, tol: float = TOL) -> bool:
    """Affine isometries delegate to their linear part."""
    g = as_linear(g)
    if classify(g, tol) is not IsometryType.HYPERBOLIC:
        return False
    return hyperbolic_data(g, tol).hyperbolicity >= eps - tol


# --- action on the ideal circle --------------------------------------------


def circle_action(g, a: CirclePoint) -> CirclePoint:
    w = as_linear(g).matrix @ a.vector
    return CirclePoint(math.atan2(w[1], w[0]))


def circle_action_vectors(g, pts: np.ndarray) -> np.ndarray:
    """Projective action on an array of points of ``S^1`` (rows ``(c, s, 1)``)."""
    w = np.asarray(pts, dtype=float) @ as_linear(g).matrix.T
    return w / w[..., 2:3]


# --- Cartan decomposition and distortion -----------------------------------


@dataclass(frozen=True)
class CartanFactors:
    theta: float
    s: float
    theta_prime: float

    def matrix(self) -> np.ndarray:
        return rotation(self.theta) @ transvection(self.s) @ rotation(self.theta_prime)


def cartan_decompose(psi) -> CartanFactors:
    """Write ``psi = R_theta tau_s R_theta'`` with ``s = d(O, psi O) >= 0``.

    At ``s = 0`` the split between the two rotations is arbitrary and
    ``theta' = 0`` is returned.
    """
    m = as_linear(psi).matrix
    w = m[:, 2]
    sh = math.hypot(w[0], w[1])
    s = math.asinh(sh)
    if sh < 1e-13:
        return CartanFactors(math.atan2(m[1, 0], m[0, 0]), 0.0, 0.0)
    # psi e3 = R_theta (0, sinh s, cosh s)
    theta = math.atan2(-w[0], w[1])
    rest = transvection(-s) @ rotation(-theta) @ m
    return CartanFactors(theta, s, math.atan2(rest[1, 0], rest[0, 0]))


def distortion_bound(psi) -> float:
    """``K = e^s pi/2``: bounds how much ``psi`` can stretch chords of ``S^1``."""
    return math.exp(cartan_decompose(psi).s) * math.pi / 2.0


def chord_ratio(psi, a1: CirclePoint, a2: CirclePoint) -> float:
    b1, b2 = circle_action(psi, a1), circle_action(psi, a2)
    return float(np.linalg.norm(b1.vector - b2.vector) / np.linalg.norm(a1.vector - a2.vector))


# --- compression ------------------------------------------------------------


def weak_unstable_basis(g) -> np.ndarray:
    """Euclidean orthonormal basis (rows) of the plane spanned by ``x0(g)`` and ``x+(g)``."""
    hd = hyperbolic_data(g)
    q, _ = np.linalg.qr(np.stack([hd.x0, hd.xplus], axis=1))
    return q.T


@dataclass(frozen=True, eq=False)
class CompressionRectangle:
    corners: np.ndarray
    sides: tuple[float, float]
    epsilon: float
    delta: float

    @property
    def inradius(self) -> float:
        return 0.5 * min(self.sides)


def compression_rectangle(v, delta: float) -> CompressionRectangle:
    """Convex hull of the points where the lines through ``v`` and ``x+(v)`` meet the sphere of radius delta."""
    from .lorentz import hyperbolicity, null_frame

    f = null_frame(v)
    y = f.x0 / np.linalg.norm(f.x0)
    xp = f.xplus / np.linalg.norm(f.xplus)
    corners = delta * np.stack([y, xp, -y, -xp])
    sides = (
        float(np.linalg.norm(corners[0] - corners[1])),
        float(np.linalg.norm(corners[1] - corners[2])),
    )
    return CompressionRectangle(corners, sides, hyperbolicity(v), delta)


@dataclass(frozen=True)
class CompressionReport:
    epsilon: float
    delta: float
    radius: float
    samples: int
    violations: int
    max_ratio: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def compression_check(h, delta: float, x, samples: int, rng: np.random.Generator, margin: float = 1e-6) -> CompressionReport:
    """Sample ``B(h(x), delta eps / 4)`` inside the weak-unstable plane at ``h(x)``
    and check every sample pulls back into ``B(x, delta)``.

    ``max_ratio`` is the largest ``|h^-1(y) - x| / delta`` seen; it must stay
    below one.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    h = as_affine(h)
    eps = isometry_hyperbolicity(h.linear)
    x = x.coords if isinstance(x, SpacePoint) else vec(x)
    hx = h.linear.matrix @ x + h.translation
    basis = weak_unstable_basis(h.linear)
    radius = delta * eps / 4.0
    r = radius * (1.0 - margin) * np.sqrt(rng.uniform(0.0, 1.0, samples))
    t = rng.uniform(0.0, 2.0 * math.pi, samples)
    ys = hx + (r * np.cos(t))[:, None] * basis[0] + (r * np.sin(t))[:, None] * basis[1]
    back = h.inverse().apply_points(ys)
    dist = np.linalg.norm(back - x, axis=1)
    return CompressionReport(
        epsilon=eps,
        delta=delta,
        radius=radius,
        samples=samples,
        violations=int(np.count_nonzero(dist >= delta)),
        max_ratio=float(dist.max() / delta) if samples else 0.0,
    )


# --- random elements (used by the property suites) -------------------------


def random_linear_isometry(rng: np.random.Generator, max_s: float = 3.0) -> LinearIsometry:
    m = rotation(rng.uniform(0, 2 * math.pi)) @ transvection(rng.uniform(0, max_s)) @ rotation(rng.uniform(0, 2 * math.pi))
    return LinearIsometry(m, check=False)


def random_hyperbolic(rng: np.random.Generator, max_s: float = 3.0, min_len: float = 0.05) -> LinearIsometry:
    """A conjugate of a transvection, hence hyperbolic."""
    psi = random_linear_isometry(rng, max_s)
    core = LinearIsometry(transvection(rng.uniform(min_len, max_s)), check=False)
    return psi @ core @ psi.inverse()


def random_affine_isometry(rng: np.random.Generator, max_s: float = 3.0, scale: float = 5.0) -> AffineIsometry:
    return AffineIsometry(random_linear_isometry(rng, max_s), rng.uniform(-scale, scale, 3))


def boost_to(u) -> LinearIsometry:
    """An element of SO^0(2,1) taking ``e1`` to the unit spacelike vector ``u``."""
    u = vec(u)
    t = math.asinh(u[2])
    a = math.atan2(u[1], u[0])
    c, s = math.cosh(t), math.sinh(t)
    b13 = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])
    return LinearIsometry(rotation(a) @ b13, check=False)

