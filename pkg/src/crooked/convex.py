"""Closed convex polyhedral pieces and the exact distance between two of them.

Every piece used here is a translated finitely generated cone

    W = apex + span(lineal) + cone(rays)

which covers the closed wedges of a crooked half-space (one line plus two
rays) as well as the wings and stem sectors of a crooked plane.

The distance between two pieces is the distance from the origin to the
polyhedron ``W_a - W_b``, itself a translated cone.  Projection onto a
finitely generated cone is solved exactly by enumerating linearly
independent subsets of generators (Caratheodory): the projection lies in the
relative interior of the cone spanned by one such subset, where it coincides
with the orthogonal projection onto that subset's span.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .lorentz import vec


@dataclass(frozen=True, eq=False)
class ConvexWedge:
    apex: np.ndarray
    lineal: tuple[np.ndarray, ...] = ()
    rays: tuple[np.ndarray, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "apex", vec(self.apex))
        object.__setattr__(self, "lineal", tuple(_unit(v) for v in self.lineal))
        object.__setattr__(self, "rays", tuple(_unit(v) for v in self.rays))

    @property
    def dim(self) -> int:
        gens = list(self.lineal) + list(self.rays)
        return int(np.linalg.matrix_rank(np.array(gens))) if gens else 0

    def translate(self, t) -> "ConvexWedge":
        return ConvexWedge(self.apex + vec(t), self.lineal, self.rays, self.label)

    def transform(self, h) -> "ConvexWedge":
        """Image under an affine isometry (anything with ``linear.matrix`` and ``translation``)."""
        m = h.linear.matrix
        return ConvexWedge(m @ self.apex + h.translation, tuple(m @ v for v in self.lineal), tuple(m @ v for v in self.rays), self.label)

    def contains(self, q, tol: float = 1e-9) -> bool:
        return self.distance_to_point(q) <= tol * max(1.0, float(np.linalg.norm(vec(q) - self.apex)))

    def distance_to_point(self, q) -> float:
        d, _ = project_to_cone(vec(q) - self.apex, list(self.lineal), list(self.rays))
        return d

    def sample(self, rng: np.random.Generator, n: int, scale: float = 5.0) -> np.ndarray:
        pts = np.repeat(self.apex[None, :], n, axis=0)
        for v in self.lineal:
            pts += rng.uniform(-scale, scale, (n, 1)) * v
        for v in self.rays:
            pts += rng.uniform(0.0, scale, (n, 1)) * v
        return pts


def _unit(v) -> np.ndarray:
    v = vec(v)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero generator")
    return v / n


def _independent_basis(vs: list[np.ndarray], tol: float = 1e-12) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in vs:
        cand = out + [v]
        if np.linalg.matrix_rank(np.array(cand), tol=tol) == len(cand):
            out = cand
    return out


def project_to_cone(t: np.ndarray, lineal: list[np.ndarray], rays: list[np.ndarray], tol: float = 1e-12):
    """Nearest point to ``t`` in ``span(lineal) + cone(rays)``; returns (distance, point).

    The point comes with its coefficients so callers can split it back into
    the contributions of each generator: ``(distance, (point, lin_coef, ray_coef))``.
    """
    t = vec(t)
    base = _independent_basis(lineal)
    best = None
    scale = max(1.0, float(np.linalg.norm(t)))
    for r in range(len(rays) + 1):
        for sub in itertools.combinations(range(len(rays)), r):
            gens = base + [rays[k] for k in sub]
            if not gens:
                coef = np.zeros(0)
                point = np.zeros(3)
            else:
                a = np.array(gens).T
                if len(gens) > 3 or np.linalg.matrix_rank(a, tol=tol) < len(gens):
                    continue
                coef, *_ = np.linalg.lstsq(a, t, rcond=None)
                rc = coef[len(base):]
                if np.any(rc < -tol * scale):
                    continue
                coef = coef.copy()
                coef[len(base):] = np.maximum(rc, 0.0)
                point = a @ coef
            d = float(np.linalg.norm(t - point))
            if best is None or d < best[0]:
                ray_coef = np.zeros(len(rays))
                for k, c in zip(sub, coef[len(base):]):
                    ray_coef[k] = c
                best = (d, (point, _lineal_coef(lineal, base, coef[: len(base)]), ray_coef))
    return best[0], best[1]


def _lineal_coef(lineal, base, coef):
    # coefficients are reported against the independent basis, padded with zeros
    out = np.zeros(len(lineal))
    k = 0
    for idx, v in enumerate(lineal):
        if k < len(base) and v is base[k]:
            out[idx] = coef[k]
            k += 1
    return out


@dataclass(frozen=True)
class PieceDistance:
    distance: float
    x: np.ndarray
    y: np.ndarray


def wedge_distance(a: ConvexWedge, b: ConvexWedge) -> PieceDistance:
    """Exact Euclidean distance between two pieces, with a pair of nearest points.

    ``x - y`` ranges over ``(apex_a - apex_b) + cone(generators of a and -b)``
    (lines of either piece stay lines).  When the nearest points are not
    unique (parallel faces) one valid pair is returned.
    """
    lineal = list(a.lineal) + list(b.lineal)
    rays = list(a.rays) + [-r for r in b.rays]
    t = b.apex - a.apex
    d, (point, lin_c, ray_c) = project_to_cone(t, lineal, rays)
    na = len(a.lineal)
    ka = sum((c * v for c, v in zip(lin_c[:na], a.lineal)), np.zeros(3))
    ka = ka + sum((c * v for c, v in zip(ray_c[: len(a.rays)], a.rays)), np.zeros(3))
    kb = sum((-c * v for c, v in zip(lin_c[na:], b.lineal)), np.zeros(3))
    kb = kb + sum((c * v for c, v in zip(ray_c[len(a.rays):], b.rays)), np.zeros(3))
    return PieceDistance(d, a.apex + ka, b.apex + kb)


def pieces_distance(pa: list[ConvexWedge], pb: list[ConvexWedge]) -> PieceDistance:
    best = None
    for a in pa:
        for b in pb:
            r = wedge_distance(a, b)
            if best is None or r.distance < best.distance:
                best = r
    return best
