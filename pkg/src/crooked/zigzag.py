"""Slices of crooked geometry by definite planes.

A crooked plane meets a definite plane ``P`` (one on which ``B`` is
positive definite) in a zigzag: a stem segment ``[v0, v1]`` cut from the stem
plus two rays cut from the wings.  ``v0`` lies on the ``x+`` wing and ``v1``
on the ``x-`` wing.  A crooked half-space meets ``P`` in a zigzag region.

Inside ``P`` all lengths and angles are Euclidean, measured in the
orthonormal in-plane frame ``(e1, e2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .affine import AffineSchottkyConfig, NestedSequence, Region, validate
from .lorentz import TOL, J, SpacePoint, bform, vec
from .planes import CrookedHalfSpace, CrookedPlane, Membership, membership_codes
from .schottky import word_hyperbolic_data


class SliceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DefinitePlane:
    base: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    def __post_init__(self):
        b = self.base.coords if isinstance(self.base, SpacePoint) else vec(self.base)
        e1, e2 = vec(self.e1), vec(self.e2)
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)
        gram = np.array([[e1 @ e1, e1 @ e2], [e2 @ e1, e2 @ e2]])
        if np.max(np.abs(gram - np.eye(2))) > 1e-9:
            raise SliceError("in-plane basis must be Euclidean orthonormal")
        bgram = np.array([[bform(e1, e1), bform(e1, e2)], [bform(e2, e1), bform(e2, e2)]])
        if np.linalg.det(bgram) <= 1e-12 or bgram[0, 0] <= 0.0:
            raise SliceError("plane is not definite")

    @classmethod
    def horizontal(cls, c: float) -> "DefinitePlane":
        """The plane ``{x3 = c}`` with in-plane coordinates ``(x1, x2)``."""
        return cls(np.array([0.0, 0.0, float(c)]), np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))

    @classmethod
    def through(cls, base, n) -> "DefinitePlane":
        """Plane through ``base`` with Euclidean normal ``n``."""
        n = vec(n)
        n = n / np.linalg.norm(n)
        a = np.eye(3)[int(np.argmin(np.abs(n)))]
        e1 = a - (a @ n) * n
        e1 /= np.linalg.norm(e1)
        return cls(base, e1, np.cross(n, e1))

    @property
    def normal(self) -> np.ndarray:
        return np.cross(self.e1, self.e2)

    @property
    def level(self) -> float:
        return float(self.normal @ self.base)

    def lift(self, st) -> np.ndarray:
        st = np.asarray(st, dtype=float)
        return self.base + st[..., :1] * self.e1 + st[..., 1:2] * self.e2

    def coords(self, x) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.base
        return np.stack([d @ self.e1, d @ self.e2], axis=-1)

    def direction(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        return np.stack([d @ self.e1, d @ self.e2], axis=-1)

    def height(self, x) -> float:
        """Signed Euclidean distance from the plane."""
        return float(self.normal @ (vec(x) - self.base))


@dataclass(frozen=True, eq=False)
class Zigzag:
    plane: DefinitePlane
    v0: np.ndarray
    v1: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    source: CrookedPlane

    def points2d(self) -> tuple[np.ndarray, np.ndarray]:
        return self.plane.coords(self.v0), self.plane.coords(self.v1)

    def dirs2d(self) -> tuple[np.ndarray, np.ndarray]:
        return self.plane.direction(self.d0), self.plane.direction(self.d1)

    def polyline(self, length: float) -> np.ndarray:
        """``v0 + length d0 -> v0 -> v1 -> v1 + length d1`` in plane coordinates."""
        a, b = self.points2d()
        d0, d1 = self.dirs2d()
        return np.array([a + length * d0, a, b, b + length * d1])


def slice_plane(c: CrookedPlane, plane: DefinitePlane, tol: float = TOL) -> Zigzag:
    """Intersect a crooked plane with a definite plane."""
    n = plane.normal
    h = plane.height(c.vertex) * -1.0
    if abs(h) <= tol * max(1.0, float(np.linalg.norm(c.vertex))):
        raise SliceError("plane passes through the vertex")
    f = c.frame
    npl, nmi, nu = n @ f.xplus, n @ f.xminus, n @ f.x0
    v0 = c.vertex + (h / npl) * f.xplus
    v1 = c.vertex + (h / nmi) * f.xminus
    d0 = f.x0 - (nu / npl) * f.xplus
    d1 = (nu / nmi) * f.xminus - f.x0
    return Zigzag(plane, v0, v1, d0 / np.linalg.norm(d0), d1 / np.linalg.norm(d1), c)


def _angle2(a: np.ndarray, b: np.ndarray) -> float:
    """Unsigned angle in [0, pi] between two plane vectors."""
    return abs(math.atan2(a[0] * b[1] - a[1] * b[0], a @ b))


@dataclass(frozen=True, eq=False)
class ZigzagRegion:
    zigzag: Zigzag
    half_space: CrookedHalfSpace

    @property
    def angle(self) -> float:
        return self.half_space.angle

    def contains(self, w, tol: float = TOL) -> bool:
        return region_contains(self, w, tol)

    def codes(self, ws, tol: float = TOL) -> np.ndarray:
        pts = self.zigzag.plane.lift(np.atleast_2d(ws))
        return membership_codes(pts, self.half_space.u, self.half_space.p, tol)


def region(hs: CrookedHalfSpace, plane: DefinitePlane) -> ZigzagRegion:
    return ZigzagRegion(slice_plane(hs.boundary, plane), hs)


def region_contains(z: ZigzagRegion, w, tol: float = TOL) -> bool:
    return bool(z.codes(w, tol)[0] == 1)


@dataclass(frozen=True)
class ZigzagAngles:
    theta0: float
    theta1: float
    phi: float

    def defect(self) -> float:
        """Distance of ``theta1 - theta0`` from pi, modulo 2pi."""
        d = math.remainder(self.theta1 - self.theta0 - math.pi, 2 * math.pi)
        return abs(d)

    def sector_defect(self) -> float:
        """Distance of ``{theta0, theta1}`` from ``{phi/2, phi/2 + pi}``."""
        lo, hi = sorted((self.theta0, self.theta1))
        return max(abs(lo - self.phi / 2), abs(hi - self.phi / 2 - math.pi))


def angles(z: ZigzagRegion) -> ZigzagAngles:
    """Angles of the region's two sectors at ``v0`` (between ``s`` and ``r0``) and at ``v1``.

    At each vertex the rays and the stem bound a convex angle ``alpha`` and a
    reflex one ``2pi - alpha``; a test point on the convex bisector decides
    which of the two lies in the region.
    """
    zz = z.zigzag
    a, b = zz.points2d()
    d0, d1 = zz.dirs2d()
    stem = b - a
    slen = float(np.linalg.norm(stem))
    out = []
    for v, ray, s in ((a, d0, stem / slen), (b, d1, -stem / slen)):
        alpha = _angle2(ray, s)
        bis = ray / np.linalg.norm(ray) + s
        bis = bis / np.linalg.norm(bis)
        probe = v + 1e-3 * min(slen, 1.0) * bis
        inside = z.codes(probe, 0.0)[0] == 1
        out.append(alpha if inside else 2 * math.pi - alpha)
    return ZigzagAngles(out[0], out[1], z.angle)


# --- half-plane approximations --------------------------------------------------


@dataclass(frozen=True, eq=False)
class HalfPlaneApprox:
    k: int
    vertex: np.ndarray
    vertex_index: int
    nu: np.ndarray
    offset: float

    def contains(self, w, tol: float = 1e-9) -> bool:
        return float(np.asarray(w) @ self.nu) >= self.offset - tol

    def line(self) -> tuple[np.ndarray, np.ndarray]:
        """A point of ``L_k`` and its unit direction (both in plane coordinates)."""
        return self.vertex, np.array([-self.nu[1], self.nu[0]])


class ApproxError(ValueError):
    pass


def reference_direction(r0: ZigzagRegion) -> np.ndarray:
    """Unit in-plane direction of the stem line of ``r0``, oriented into the region."""
    a, b = r0.zigzag.points2d()
    nu = (b - a) / np.linalg.norm(b - a)
    mid = 0.5 * (a + b)
    far = 1e3 * (1.0 + float(np.linalg.norm(mid)))
    if r0.codes(mid + far * nu, 0.0)[0] == 1:
        return nu
    if r0.codes(mid - far * nu, 0.0)[0] == 1:
        return -nu
    raise ApproxError("stem direction does not recede into the region")


def ray_angles(r: ZigzagRegion, nu: np.ndarray) -> tuple[float, float]:
    d0, d1 = r.zigzag.dirs2d()
    return _angle2(d0, nu), _angle2(d1, nu)


def approx_half_planes(
    half_spaces: list[CrookedHalfSpace],
    plane: DefinitePlane,
    rng: np.random.Generator | None = None,
    samples: int = 200,
) -> list[HalfPlaneApprox]:
    """Half-planes ``Pi_k`` containing ``H_k cap P``, bounded by lines ``L_k`` perpendicular to ``nu``.

    ``nu`` comes from the stem of the first region.  ``L_k`` passes through
    the vertex of ``zeta_k`` lying lowest along ``nu``; the choice is valid
    when both rays of ``zeta_k`` point up along ``nu``, and with ``rng`` it is
    also confirmed on sampled region points.
    """
    if not half_spaces:
        return []
    if half_spaces[0].angle >= math.pi / 2:
        raise ApproxError("first half-space must have angle below pi/2")
    regions = [region(hs, plane) for hs in half_spaces]
    nu = reference_direction(regions[0])
    out = []
    for k, r in enumerate(regions):
        a, b = r.zigzag.points2d()
        d0, d1 = r.zigzag.dirs2d()
        if min(d0 @ nu, d1 @ nu) < -1e-12:
            raise ApproxError(f"region {k} is not bounded below along nu")
        cands = sorted([(float(a @ nu), 0, a), (float(b @ nu), 1, b)], key=lambda t: (t[0], t[1]))
        off, idx, v = cands[0]
        approx = HalfPlaneApprox(k, v, idx, nu, off)
        if rng is not None:
            pts = _sample_region(r, rng, samples)
            if len(pts) and np.any(pts @ nu < off - 1e-9 * max(1.0, abs(off))):
                raise ApproxError(f"sampled points of region {k} fall outside Pi_{k}")
        out.append(approx)
    return out


def _sample_region(r: ZigzagRegion, rng: np.random.Generator, n: int) -> np.ndarray:
    a, b = r.zigzag.points2d()
    center = 0.5 * (a + b)
    rad = 2.0 * float(np.linalg.norm(b - a)) + 5.0
    pts = center + rng.uniform(-rad, rad, (4 * n, 2))
    return pts[r.codes(pts, 0.0) == 1][:n]


# --- separation of the approximating lines -----------------------------------------


@dataclass
class SeparationRow:
    k: int
    word: str
    rho: float
    eps: float
    bound: float
    wu_angle: float
    passed: bool
    wu_ok: bool

    def csv_row(self) -> list[str]:
        return [str(self.k), repr(self.rho), repr(self.bound), "true" if self.passed else "false"]


@dataclass
class SeparationReport:
    delta: float
    delta0: float
    nu: list
    ray_angles: list
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed and r.wu_ok for r in self.rows)

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "delta0": self.delta0,
            "nu": self.nu,
            "ray_angles": self.ray_angles,
            "ok": self.ok,
            "rows": [r.__dict__ for r in self.rows],
        }


def weak_unstable_line_angle(xplus: np.ndarray, plane: DefinitePlane, nu: np.ndarray) -> float:
    """Angle in [0, pi/2] between ``nu`` and the line ``E^wu cap P``.

    ``E^wu`` is the null plane ``B(., x+) = 0``; inside ``P`` its direction
    is ``n x (J x+)``.
    """
    d = np.cross(plane.normal, J @ xplus)
    d2 = plane.direction(d)
    d2 = d2 / np.linalg.norm(d2)
    c = abs(float(d2 @ nu))
    return math.acos(min(1.0, c))


def separation_report(
    cfg: AffineSchottkyConfig,
    seq: NestedSequence,
    delta: float | None = None,
    plane: DefinitePlane | None = None,
    delta0: float | None = None,
    rng: np.random.Generator | None = None,
) -> SeparationReport:
    """Distances ``rho(L_k, L_{k+1})`` against ``delta eps_k / (4 sqrt 2)``.

    ``eps_k`` is the hyperbolicity of the linear part of ``gamma_k``
    (computed from its eigen-data); ``k = 0`` has ``gamma_0 = 1`` and is
    skipped.  Each row also records the angle between ``nu`` and the
    weak-unstable line of ``gamma_k``, which must not exceed pi/4.
    """
    if delta0 is None:
        delta0 = validate(cfg).delta0
    if delta is None:
        delta = delta0
    if delta > delta0:
        raise ValueError(f"delta {delta} exceeds delta0 {delta0}")
    if plane is None:
        plane = DefinitePlane.horizontal(float(seq.point[2]))
    hss = [t.half_space for t in seq.terms]
    approx = approx_half_planes(hss, plane, rng)
    nu = approx[0].nu if approx else np.zeros(2)
    r0 = region(hss[0], plane) if hss else None
    rep = SeparationReport(delta, delta0, [float(c) for c in nu], list(ray_angles(r0, nu)) if r0 else [])
    lin = cfg.linear_config()
    for k in range(1, len(approx) - 1):
        gamma = seq.terms[k].gamma
        hd = word_hyperbolic_data(lin, gamma)
        eps = hd.hyperbolicity
        bound = delta * eps / (4.0 * math.sqrt(2.0))
        rho = approx[k + 1].offset - approx[k].offset
        wu = weak_unstable_line_angle(hd.xplus, plane, nu)
        rep.rows.append(
            SeparationRow(k, str(gamma), rho, eps, bound, wu, rho >= bound - 1e-9, wu <= math.pi / 4 + 1e-9)
        )
    return rep
