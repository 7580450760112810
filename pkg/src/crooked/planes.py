"""Crooked planes and crooked half-spaces.

With ``x = q - p`` and the null frame ``(x-, x+, u)`` of the direction, the
crooked half-space ``H(u, p)`` is

    {B(x, u) > 0, B(x, x+) < 0}  u  {B(x, u) < 0, B(x, x-) > 0}
        u  {B(x, u) = 0, B(x, x+) < 0 < B(x, x-)}

and the crooked plane ``C(u, p)`` is its boundary: the stem (the part of
the plane ``u-perp`` inside the light cone) together with the wings, the null
half-planes ``span(x+) + R>=0 u`` and ``span(x-) - R>=0 u``.  Space
splits as ``H(u, p)``, ``C(u, p)``, ``H(-u, p)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .convex import ConvexWedge, PieceDistance, pieces_distance
from .isometry import AffineIsometry, as_affine, frame_vector
from .lorentz import TOL, SpacePoint, bform, frame_interval, null_frame, vec


class Membership(enum.Enum):
    IN_HALF_SPACE = "InHalfSpace"
    ON_CROOKED_PLANE = "OnCrookedPlane"
    IN_OPPOSITE_HALF_SPACE = "InOppositeHalfSpace"

    def flipped(self) -> "Membership":
        if self is Membership.IN_HALF_SPACE:
            return Membership.IN_OPPOSITE_HALF_SPACE
        if self is Membership.IN_OPPOSITE_HALF_SPACE:
            return Membership.IN_HALF_SPACE
        return self


def _coords(p) -> np.ndarray:
    return p.coords if isinstance(p, SpacePoint) else vec(p)


def _sign(x, band):
    return np.where(x > band, 1, np.where(x < -band, -1, 0))


def membership_codes(q, u, p, tol: float = TOL) -> np.ndarray:
    """Vectorised membership: +1 in ``H(u, p)``, 0 on ``C(u, p)``, -1 in ``H(-u, p)``.

    ``q`` is an ``(n, 3)`` array (or a single point).  Values within ``tol``
    of zero count as zero, so the band around the crooked plane resolves to
    the plane itself.
    """
    f = null_frame(u)
    x = np.atleast_2d(np.asarray(q, dtype=float)) - _coords(p)
    a = _sign(bform(x, f.x0), tol)
    bp = _sign(bform(x, f.xplus), tol)
    bm = _sign(bform(x, f.xminus), tol)
    out = np.zeros(len(x), dtype=int)
    out = np.where(a > 0, -bp, out)
    out = np.where(a < 0, bm, out)
    slab_in = (a == 0) & (bp < 0) & (bm > 0)
    slab_out = (a == 0) & (bp > 0) & (bm < 0)
    out = np.where(slab_in, 1, np.where(slab_out, -1, np.where(a == 0, 0, out)))
    return out


_CODE = {1: Membership.IN_HALF_SPACE, 0: Membership.ON_CROOKED_PLANE, -1: Membership.IN_OPPOSITE_HALF_SPACE}


def membership(q, u, p, tol: float = TOL) -> Membership:
    return _CODE[int(membership_codes(_coords(q), u, p, tol)[0])]


@dataclass(frozen=True, eq=False)
class CrookedPlane:
    u: np.ndarray
    p: SpacePoint

    def __post_init__(self):
        u = vec(self.u)
        if abs(bform(u, u) - 1.0) > 1e-9 * max(1.0, float(u @ u)):
            raise ValueError(f"direction {u} is not unit spacelike")
        object.__setattr__(self, "u", u)
        if not isinstance(self.p, SpacePoint):
            object.__setattr__(self, "p", SpacePoint.of(self.p))

    @property
    def vertex(self) -> np.ndarray:
        return self.p.coords

    @property
    def frame(self):
        return null_frame(self.u)

    def half_space(self) -> "CrookedHalfSpace":
        return CrookedHalfSpace(self.u, self.p)

    def pieces(self) -> list[ConvexWedge]:
        """The two wings and the two (future and past) halves of the stem."""
        f = self.frame
        v = self.vertex
        return [
            ConvexWedge(v, (f.xplus,), (f.x0,), "wing+"),
            ConvexWedge(v, (f.xminus,), (-f.x0,), "wing-"),
            ConvexWedge(v, (), (f.xplus, f.xminus), "stem+"),
            ConvexWedge(v, (), (-f.xplus, -f.xminus), "stem-"),
        ]

    def transform(self, h) -> "CrookedPlane":
        h = as_affine(h)
        return CrookedPlane(transport_direction(h.linear.matrix, self.u), h.apply(self.p))

    def contains(self, q, tol: float = TOL) -> bool:
        return membership(q, self.u, self.p, tol) is Membership.ON_CROOKED_PLANE

    def sample(self, rng: np.random.Generator, n: int, scale: float = 5.0) -> np.ndarray:
        ps = self.pieces()
        k = rng.integers(0, len(ps), n)
        out = np.empty((n, 3))
        for idx, piece in enumerate(ps):
            sel = k == idx
            out[sel] = piece.sample(rng, int(sel.sum()), scale)
        return out


def transport_direction(g: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``g u`` for a unit spacelike ``u``, rebuilt from the images of its null frame.

    ``B(g u, g u)`` cancels badly once ``g`` is large, while the circle
    points ``g x+`` and ``g x-`` stay well defined.
    """
    f = null_frame(u)
    xp, xm = g @ f.xplus, g @ f.xminus
    return frame_vector(xp / xp[2], xm / xm[2])


@dataclass(frozen=True, eq=False)
class CrookedHalfSpace:
    u: np.ndarray
    p: SpacePoint

    def __post_init__(self):
        u = vec(self.u)
        if abs(bform(u, u) - 1.0) > 1e-9 * max(1.0, float(u @ u)):
            raise ValueError(f"direction {u} is not unit spacelike")
        object.__setattr__(self, "u", u)
        if not isinstance(self.p, SpacePoint):
            object.__setattr__(self, "p", SpacePoint.of(self.p))

    @property
    def vertex(self) -> np.ndarray:
        return self.p.coords

    @property
    def frame(self):
        return null_frame(self.u)

    @property
    def boundary(self) -> CrookedPlane:
        return CrookedPlane(self.u, self.p)

    def opposite(self) -> "CrookedHalfSpace":
        return CrookedHalfSpace(-self.u, self.p)

    def membership(self, q, tol: float = TOL) -> Membership:
        return membership(q, self.u, self.p, tol)

    def codes(self, qs, tol: float = TOL) -> np.ndarray:
        return membership_codes(qs, self.u, self.p, tol)

    def contains(self, q, tol: float = TOL) -> bool:
        return self.membership(q, tol) is Membership.IN_HALF_SPACE

    def closure_wedges(self) -> tuple[ConvexWedge, ConvexWedge]:
        return closure_wedges(self)

    def transform(self, h) -> "CrookedHalfSpace":
        return transform(h, self)

    @property
    def angle(self) -> float:
        return angle(self)


def closure_wedges(hs: CrookedHalfSpace) -> tuple[ConvexWedge, ConvexWedge]:
    """``W1 = {B(x,u) >= 0, B(x,x+) <= 0}`` and ``W2 = {B(x,u) <= 0, B(x,x-) >= 0}``.

    As cones: ``W1 = span(x+) + cone(x-, u)`` and ``W2 = span(x-) + cone(-x+, -u)``.
    """
    f = hs.frame
    v = hs.vertex
    w1 = ConvexWedge(v, (f.xplus,), (f.xminus, f.x0), "W1")
    w2 = ConvexWedge(v, (f.xminus,), (-f.xplus, -f.x0), "W2")
    return w1, w2


def wedge_constraints(hs: CrookedHalfSpace) -> list[list[tuple[np.ndarray, int]]]:
    """The same two wedges as lists of ``(normal n, sense s)`` meaning ``s * B(x - p, n) >= 0``."""
    f = hs.frame
    return [[(f.x0, 1), (f.xplus, -1)], [(f.x0, -1), (f.xminus, 1)]]


def transform(h, obj):
    """Image of a crooked plane or half-space: ``h H(u, p) = H(L(h) u, h(p))``."""
    h = as_affine(h)
    if isinstance(obj, CrookedPlane):
        return obj.transform(h)
    if isinstance(obj, CrookedHalfSpace):
        return CrookedHalfSpace(transport_direction(h.linear.matrix, obj.u), h.apply(obj.p))
    raise TypeError(f"cannot transform {type(obj).__name__}")


def angle(hs) -> float:
    """Length of the arc bounded by ``(x+(u), x-(u))``."""
    return frame_interval(hs.u).length


# --- separation --------------------------------------------------------------


class SeparationError(ValueError):
    pass


@dataclass(frozen=True)
class Separation:
    distance: float
    attained: bool
    asymptotic_flag: bool
    x: np.ndarray
    y: np.ndarray
    truncation: float

    def to_json(self) -> dict:
        return {
            "distance": self.distance,
            "attained": self.attained,
            "asymptotic_flag": self.asymptotic_flag,
            "witness_x": [float(c) for c in self.x],
            "witness_y": [float(c) for c in self.y],
        }


def default_truncation(*objs) -> float:
    scale = max(float(np.linalg.norm(o.vertex)) for o in objs) + 1.0
    return 1e3 * scale


def _pieces(obj) -> list[ConvexWedge]:
    if isinstance(obj, CrookedHalfSpace):
        return list(closure_wedges(obj))
    if isinstance(obj, CrookedPlane):
        return obj.pieces()
    if isinstance(obj, ConvexWedge):
        return [obj]
    raise TypeError(f"no convex pieces for {type(obj).__name__}")


def separation(a, b, truncation: float | None = None) -> Separation:
    """Euclidean distance between the closures of two crooked half-spaces (or planes).

    Both closures are unions of polyhedral pieces, so the minimum is always
    attained; ``asymptotic_flag`` reports nearest points beyond the
    truncation radius, i.e. a minimum realised far out along the pieces.
    """
    if truncation is None:
        truncation = default_truncation(a, b)
    if not truncation > 0.0:
        raise SeparationError("truncation radius must be positive")
    r: PieceDistance = pieces_distance(_pieces(a), _pieces(b))
    far = max(float(np.linalg.norm(r.x)), float(np.linalg.norm(r.y))) > truncation
    # distances below rounding level of the inputs are contact
    scale = max(1.0, float(np.linalg.norm(r.x)))
    d = 0.0 if r.distance <= 1e-12 * scale else r.distance
    return Separation(d, True, far, r.x, r.y, truncation)


def random_half_space(rng: np.random.Generator, scale: float = 5.0) -> CrookedHalfSpace:
    from .lorentz import random_unit_spacelike

    return CrookedHalfSpace(random_unit_spacelike(rng), SpacePoint.of(rng.uniform(-scale, scale, 3)))


def model_membership(x) -> Membership:
    """Membership in ``H((1,0,0), 0)`` written directly in coordinates.

    Pieces: ``{x1 > 0, x2 + x3 > 0}``, ``{x1 < 0, x2 - x3 > 0}`` and the slab
    ``{x1 = 0, x2 > |x3|}``; the crooked plane is ``{x1 >= 0, x2 = -x3}``,
    ``{x1 <= 0, x2 = x3}`` and ``{x1 = 0, |x2| <= |x3|}``.
    """
    x1, x2, x3 = (float(c) for c in vec(x))
    if x1 > 0:
        s = x2 + x3
    elif x1 < 0:
        s = x2 - x3
    else:
        s = x2 - abs(x3)
    if s > 0:
        return Membership.IN_HALF_SPACE
    if s < 0:
        if x1 == 0 and -x2 > abs(x3):
            return Membership.IN_OPPOSITE_HALF_SPACE
        if x1 != 0:
            return Membership.IN_OPPOSITE_HALF_SPACE
    return Membership.ON_CROOKED_PLANE

