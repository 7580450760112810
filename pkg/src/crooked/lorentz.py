"""Lorentzian linear algebra on R^{2,1}.

Vectors are plain ``numpy`` arrays of shape ``(3,)`` (or ``(..., 3)`` where a
function says it broadcasts).  Points of Minkowski space are wrapped in
:class:`SpacePoint` so that the only arithmetic allowed on them is
displacement: ``q - p`` is a vector and ``p + v`` is a point.

The bilinear form is ``B(u, v) = u1 v1 + u2 v2 - u3 v3``.  The ideal circle
``S^1`` is the section ``{(cos t, sin t, 1)}`` of the future light cone.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi

#: Absolute tolerance on order-one quantities.  ``CROOKED_TOL`` overrides it.
TOL = float(os.environ.get("CROOKED_TOL", "1e-9"))

J = np.diag([1.0, 1.0, -1.0])

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def vec(x) -> np.ndarray:
    """Coerce ``x`` to a finite float vector of shape (3,)."""
    v = np.asarray(x, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector {v!r}")
    return v


@dataclass(frozen=True)
class SpacePoint:
    """A point of Minkowski space (not a vector)."""

    x1: float
    x2: float
    x3: float

    @classmethod
    def of(cls, coords) -> "SpacePoint":
        v = vec(coords)
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    def __sub__(self, other):
        if isinstance(other, SpacePoint):
            return self.coords - other.coords
        return NotImplemented

    def __add__(self, v):
        if isinstance(v, SpacePoint):
            return NotImplemented
        return SpacePoint.of(self.coords + vec(v))

    __radd__ = __add__

    def __iter__(self):
        return iter((self.x1, self.x2, self.x3))


ORIGIN = SpacePoint(0.0, 0.0, 0.0)


def bform(u, v):
    """The Lorentzian inner product; broadcasts over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def lorentz_cross(u, v) -> np.ndarray:
    """Lorentzian cross product, characterised by ``B(u x v, w) = det(u, v, w)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.cross(u, v) * np.array([1.0, 1.0, -1.0])


def normalize_spacelike(v, tol: float = TOL) -> np.ndarray:
    """Scale a spacelike vector to ``B(v, v) = 1``."""
    v = vec(v)
    q = bform(v, v)
    # B(v, v) carries rounding of order eps * |v|^2
    if q <= 1e-13 * float(v @ v) or q <= 0.0:
        raise ValueError(f"vector {v!r} is not spacelike (B = {q:g})")
    return v / math.sqrt(q)


def is_unit_spacelike(v, tol: float = TOL) -> bool:
    return abs(float(bform(v, v)) - 1.0) <= tol * max(1.0, float(np.dot(v, v)))


class Causality(enum.Enum):
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"
    TIMELIKE = "timelike"


class TimeOrientation(enum.Enum):
    FUTURE = "future"
    PAST = "past"


class CausalClass(NamedTuple):
    kind: Causality
    orientation: TimeOrientation | None = None


def causal_class(u, tol: float = TOL) -> CausalClass:
    u = vec(u)
    if not np.any(u):
        raise ValueError("the zero vector has no causal character")
    q = float(bform(u, u))
    if q > tol:
        return CausalClass(Causality.SPACELIKE)
    if q >= -tol:
        return CausalClass(Causality.LIGHTLIKE)
    orient = TimeOrientation.FUTURE if u[2] > 0 else TimeOrientation.PAST
    return CausalClass(Causality.TIMELIKE, orient)


class PlaneType(enum.Enum):
    INDEFINITE = "indefinite"
    NULL = "null"
    DEFINITE = "definite"


def plane_type(a, b, tol: float = TOL) -> PlaneType:
    """Classify the linear plane spanned by ``a`` and ``b``.

    Works through the Lorentzian normal ``a x b``: spacelike normal means an
    indefinite plane, null normal a null plane, timelike normal a definite one.
    """
    n = lorentz_cross(vec(a), vec(b))
    nn = float(np.linalg.norm(n))
    if nn == 0.0:
        raise ValueError("vectors do not span a plane")
    kind = causal_class(n / nn, tol).kind
    return {
        Causality.SPACELIKE: PlaneType.INDEFINITE,
        Causality.LIGHTLIKE: PlaneType.NULL,
        Causality.TIMELIKE: PlaneType.DEFINITE,
    }[kind]


def hyperbolic_distance(u, v) -> float:
    """Distance in H^2 between the points represented by timelike ``u``, ``v``."""
    c = abs(float(bform(u, v))) / math.sqrt(float(bform(u, u) * bform(v, v)))
    return math.acosh(max(c, 1.0))


# --- the ideal circle -------------------------------------------------------


def canonical_angle(phi: float) -> float:
    a = math.fmod(phi, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    # fmod can return exactly 2pi after the shift for tiny negative inputs
    return 0.0 if a >= TWO_PI else a


def circle_vector(phi) -> np.ndarray:
    """``u_phi = (cos phi, sin phi, 1)``; broadcasts over an array of angles."""
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(phi), np.sin(phi), np.ones_like(phi)], axis=-1)


@dataclass(frozen=True)
class CirclePoint:
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", canonical_angle(float(self.phi)))

    @property
    def vector(self) -> np.ndarray:
        return circle_vector(self.phi)

    @classmethod
    def from_null(cls, w, tol: float = TOL) -> "CirclePoint":
        """Project a future null vector to ``S^1`` by ``w -> w / w3``."""
        w = vec(w)
        if w[2] <= 0.0:
            raise ValueError(f"{w!r} is not future pointing")
        w = w / w[2]
        if abs(w[0] ** 2 + w[1] ** 2 - 1.0) > max(tol, 1e-7):
            raise ValueError(f"{w!r} is not null")
        return cls(math.atan2(w[1], w[0]))


def angle_of(w) -> float:
    """Angle of the ray through a future null (or timelike) vector, in [0, 2pi)."""
    return canonical_angle(math.atan2(w[1], w[0]))


def chord_distance(a1: CirclePoint, a2: CirclePoint) -> float:
    return 2.0 * abs(math.sin(0.5 * (a2.phi - a1.phi)))


@dataclass(frozen=True)
class Interval:
    """The open arc ``{u_phi : phi1 < phi < phi2}`` of ``S^1``."""

    phi1: float
    phi2: float

    def __post_init__(self):
        length = self.phi2 - self.phi1
        if not (0.0 < length < TWO_PI):
            raise ValueError(f"degenerate interval ({self.phi1}, {self.phi2})")

    @property
    def length(self) -> float:
        return self.phi2 - self.phi1

    @property
    def center(self) -> float:
        return 0.5 * (self.phi1 + self.phi2)

    @property
    def endpoints(self) -> tuple[CirclePoint, CirclePoint]:
        return CirclePoint(self.phi1), CirclePoint(self.phi2)

    def offset(self, phi: float) -> float:
        """Angle of ``phi`` measured counterclockwise from ``phi1``, in [0, 2pi)."""
        return canonical_angle(phi - self.phi1)

    def contains(self, phi: float, tol: float = 0.0) -> bool:
        t = self.offset(phi)
        return tol < t < self.length - tol

    def gap_to(self, other: "Interval") -> float:
        """Counterclockwise angle from the end of ``self`` to the start of ``other``."""
        return canonical_angle(other.phi1 - self.phi2)

    def complement(self) -> "Interval":
        return Interval(self.phi2, self.phi1 + TWO_PI)


def circular_gaps(intervals: list[Interval]) -> tuple[bool, float]:
    """Check that arcs are pairwise disjoint; return (disjoint, minimum gap).

    The minimum gap is the smallest angular separation between consecutive
    arcs; it is only meaningful when the arcs are disjoint.
    """
    if len(intervals) < 2:
        return True, TWO_PI - (intervals[0].length if intervals else 0.0)
    order = sorted(intervals, key=lambda a: canonical_angle(a.phi1))
    starts = [canonical_angle(a.phi1) for a in order]
    total = sum(a.length for a in order)
    gaps = []
    for k, a in enumerate(order):
        nxt = starts[(k + 1) % len(order)] + (TWO_PI if k == len(order) - 1 else 0.0)
        gaps.append(nxt - (starts[k] + a.length))
    disjoint = total < TWO_PI and min(gaps) > 0.0
    return disjoint, min(gaps)


# --- null frames ------------------------------------------------------------


@dataclass(frozen=True)
class NullFrame:
    xminus: np.ndarray
    xplus: np.ndarray
    x0: np.ndarray

    @property
    def phi_plus(self) -> float:
        return angle_of(self.xplus)

    @property
    def phi_minus(self) -> float:
        return angle_of(self.xminus)


def _frame_angles(v: np.ndarray) -> tuple[float, float]:
    # B(u_phi, v) = r cos(phi - alpha) - v3 vanishes at phi = alpha -/+ beta
    r = math.hypot(v[0], v[1])
    alpha = math.atan2(v[1], v[0])
    # cos(beta) = v3 / r and sin(beta) = 1 / r for unit v
    beta = math.atan2(1.0, v[2])
    return alpha, beta


def null_frame(v, tol: float = TOL) -> NullFrame:
    """The null frame ``(x-, x+, v)`` of a unit spacelike vector."""
    v = vec(v)
    if not is_unit_spacelike(v, tol):
        raise ValueError(f"{v!r} is not unit spacelike (B = {bform(v, v):.12g})")
    alpha, beta = _frame_angles(v)
    return NullFrame(
        xminus=circle_vector(alpha + beta),
        xplus=circle_vector(alpha - beta),
        x0=v,
    )


def frame_interval(v, tol: float = TOL) -> Interval:
    """The arc bounded by the ordered pair ``(x+(v), x-(v))``: the ideal boundary of ``H_v``."""
    v = vec(v)
    if not is_unit_spacelike(v, tol):
        raise ValueError(f"{v!r} is not unit spacelike")
    alpha, beta = _frame_angles(v)
    return Interval(alpha - beta, alpha + beta)


def hyperbolicity(v, tol: float = TOL) -> float:
    """Euclidean distance between the two null frame vectors of ``v``."""
    f = null_frame(v, tol)
    return float(np.linalg.norm(f.xplus - f.xminus))


def hyperbolicity_closed_form(v) -> float:
    v = vec(v)
    return 2.0 * math.sqrt(2.0 / (1.0 + float(v @ v)))


def epsilon_spacelike_radius(eps: float) -> float:
    """Euclidean radius of the ball cutting out the eps-spacelike unit vectors."""
    if not 0.0 < eps <= 2.0:
        raise ValueError("eps must lie in (0, 2]")
    return math.sqrt(8.0 / eps**2 - 1.0)


def is_epsilon_spacelike(v, eps: float, tol: float = TOL) -> bool:
    """``tol`` is the slack on ``eps``; the unit check keeps the default band."""
    return hyperbolicity(v) >= eps - tol


def spacelike_from_interval(a: Interval) -> np.ndarray:
    """Unit spacelike vector whose half-plane has ideal boundary ``a``.

    This is the normalisation of ``u_phi2 x u_phi1``, written in closed form
    ``(cos c, sin c, cos b) / sin b`` (centre ``c``, half-width ``b``) so that
    very short arcs keep full precision.
    """
    c, b = a.center, 0.5 * a.length
    return np.array([math.cos(c), math.sin(c), math.cos(b)]) / math.sin(b)


def random_unit_spacelike(rng: np.random.Generator, size: int | None = None, scale: float = 3.0):
    """Random unit spacelike vectors ``(cosh t cos a, cosh t sin a, sinh t)``."""
    n = 1 if size is None else size
    t = rng.normal(0.0, scale / 2.0, n)
    a = rng.uniform(0.0, TWO_PI, n)
    out = np.stack([np.cosh(t) * np.cos(a), np.cosh(t) * np.sin(a), np.sinh(t)], axis=-1)
    return out[0] if size is None else out
