"""Schottky groups acting on the hyperbolic plane.

Points of the hyperbolic plane are future timelike vectors up to positive
scale.  A unit spacelike ``v`` cuts out the open half-plane ``H_v`` of
vectors with ``B(u, v) > 0``; its ideal boundary is an interval of ``S^1``.
A configuration pairs ``2m`` disjoint intervals ``A_i^-``, ``A_i^+`` by
generators with ``g_i(A_i^-) = S^1 - closure(A_i^+)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .isometry import (
    HyperbolicData,
    IsometryType,
    LinearIsometry,
    circle_action,
    classify,
    frame_vector,
    hyperbolic_data,
    isometry_defect,
)
from .lorentz import (
    TOL,
    J,
    Causality,
    CirclePoint,
    Interval,
    TimeOrientation,
    bform,
    causal_class,
    circle_vector,
    circular_gaps,
    frame_interval,
    spacelike_from_interval,
    vec,
)
from .words import Letter, Word, reduced_words


@dataclass(frozen=True, eq=False)
class HalfPlane:
    v: np.ndarray

    def __post_init__(self):
        v = vec(self.v)
        if abs(bform(v, v) - 1.0) > 1e-9 * max(1.0, float(v @ v)):
            raise ValueError("half-plane needs a unit spacelike vector")
        object.__setattr__(self, "v", v)

    @classmethod
    def from_interval(cls, a: Interval) -> "HalfPlane":
        return cls(spacelike_from_interval(a))

    @property
    def interval(self) -> Interval:
        return frame_interval(self.v)

    def contains(self, u, tol: float = TOL) -> bool:
        return half_plane_contains(self, u, tol)


def _require_future_timelike(u, tol: float) -> np.ndarray:
    u = vec(u)
    c = causal_class(u, tol)
    if c.kind is not Causality.TIMELIKE or c.orientation is not TimeOrientation.FUTURE:
        raise ValueError(f"expected a future timelike vector, got {u}")
    return u


def half_plane_contains(h: HalfPlane, u, tol: float = TOL) -> bool:
    u = _require_future_timelike(u, tol)
    return bform(u, h.v) > tol


def build_generator(a_minus: Interval, a_plus: Interval, tol: float = TOL) -> LinearIsometry:
    """The transvection pairing ``A^-`` with the complement of ``A^+``.

    With ``v-`` and ``v+`` the unit spacelike vectors of the intervals, the
    product of Lorentz reflections ``r_{v+} r_m`` with ``m = v- - v+``
    sends ``v-`` to ``v+`` and then to ``-v+``.  Both reflections fix
    ``v- x v+``, so the product is the translation along the common
    perpendicular of the two geodesics, of length ``arccosh |B(v-, v+)|``.
    """
    ok, gap = circular_gaps([a_minus, a_plus])
    if not ok or gap <= tol:
        raise ValueError("intervals overlap or touch")
    vm = spacelike_from_interval(a_minus)
    vp = spacelike_from_interval(a_plus)
    c = float(bform(vm, vp))
    if abs(c) <= 1.0 + tol:
        raise ValueError(f"geodesics are not ultraparallel (|B| = {abs(c):.6g})")

    def reflection(n):
        # x -> x - 2 B(x, n) n / B(n, n), as a matrix
        return np.eye(3) - 2.0 * np.outer(n, n @ np.diag([1.0, 1.0, -1.0])) / bform(n, n)

    m = reflection(vp) @ reflection(vm - vp)
    return LinearIsometry(m)


def intervals_pairing_residual(g: LinearIsometry, a_minus: Interval, a_plus: Interval) -> float:
    """Largest chord error between ``g`` applied to the endpoints of ``A^-``
    and the endpoints of ``S^1 - closure(A^+)``.

    ``g`` preserves orientation, so the first endpoint of ``A^-`` lands on
    the second endpoint of ``A^+`` and vice versa.
    """
    e1 = circle_action(g, CirclePoint(a_minus.phi1)).vector
    e2 = circle_action(g, CirclePoint(a_minus.phi2)).vector
    return float(max(np.linalg.norm(e1 - circle_vector(a_plus.phi2)), np.linalg.norm(e2 - circle_vector(a_plus.phi1))))


@dataclass(frozen=True, eq=False)
class SchottkyConfig:
    generators: tuple[LinearIsometry, ...]
    intervals: dict

    def __post_init__(self):
        gens = tuple(g if isinstance(g, LinearIsometry) else LinearIsometry(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        m = len(gens)
        if m < 1:
            raise ValueError("need at least one generator")
        ivs = {}
        for i in range(1, m + 1):
            for j in (1, -1):
                if (i, j) not in self.intervals:
                    raise ValueError(f"missing interval for ({i}, {j:+d})")
                ivs[(i, j)] = self.intervals[(i, j)]
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def from_intervals(cls, intervals: dict) -> "SchottkyConfig":
        m = max(i for i, _ in intervals)
        gens = tuple(build_generator(intervals[(i, -1)], intervals[(i, 1)]) for i in range(1, m + 1))
        return cls(gens, dict(intervals))

    @property
    def m(self) -> int:
        return len(self.generators)

    def keys(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.m + 1) for j in (1, -1)]

    def letter_matrix(self, a: Letter) -> np.ndarray:
        if not 1 <= a.i <= self.m:
            raise IndexError(f"generator {a.i} out of range 1..{self.m}")
        g = self.generators[a.i - 1]
        return g.matrix if a.j > 0 else g.inverse().matrix

    def word_matrix(self, w: Word) -> np.ndarray:
        out = np.eye(3)
        for a in w:
            out = out @ self.letter_matrix(a)
        return out

    def word_isometry(self, w: Word) -> LinearIsometry:
        return LinearIsometry(self.word_matrix(w), check=False)

    def half_plane(self, i: int, j: int) -> HalfPlane:
        return HalfPlane.from_interval(self.intervals[(i, j)])

    def polygon(self) -> "FundamentalPolygon":
        return FundamentalPolygon({k: self.half_plane(*k) for k in self.keys()})


@dataclass(frozen=True, eq=False)
class FundamentalPolygon:
    half_planes: dict

    def contains(self, u, tol: float = TOL) -> bool:
        return delta_contains(self, u, tol)


def delta_contains(poly: FundamentalPolygon, u, tol: float = TOL) -> bool:
    u = vec(u)
    return all(bform(u, h.v) < -tol for h in poly.half_planes.values())


# --- word dynamics on S^1 ----------------------------------------------------


def _gap_point(cfg: SchottkyConfig) -> np.ndarray:
    """A point of ``S^1`` outside every interval (midpoint of the widest gap)."""
    ivs = sorted((iv.phi1 % (2 * math.pi), iv.length) for iv in cfg.intervals.values())
    best, where = -1.0, 0.0
    for k, (start, length) in enumerate(ivs):
        nxt = ivs[(k + 1) % len(ivs)][0] + (2 * math.pi if k + 1 == len(ivs) else 0.0)
        gap = nxt - (start + length)
        if gap > best:
            best, where = gap, start + length + gap / 2
    return circle_vector(where)


def _iterate(mats: list[np.ndarray], x: np.ndarray, iters: int) -> tuple[np.ndarray, float]:
    """Fixed point of the circle action of ``mats[0] @ ... @ mats[-1]`` by iteration,
    applied one factor at a time; also returns the eigenvalue at that point."""
    mu = 1.0
    for _ in range(iters):
        y, mu = x, 1.0
        for m in reversed(mats):
            y = m @ y
            mu *= y[2]
            y = y / y[2]
        y = np.array([*(y[:2] / math.hypot(y[0], y[1])), 1.0])
        if np.max(np.abs(y - x)) <= 1e-15:
            return y, mu
        x = y
    return x, mu


def word_hyperbolic_data(cfg: SchottkyConfig, w: Word, iters: int = 500) -> HyperbolicData:
    """Eigen-data of the word's isometry, computed letter by letter.

    The product matrix of a long word is badly conditioned (its two null
    eigenvectors can be closer than its rounding error), so the fixed points
    of ``P(w)`` are found by iterating the circle action one letter at a
    time.  Every non-trivial word of a Schottky group is hyperbolic, and a
    starting point outside all intervals is attracted by ping-pong.
    """
    if w.is_identity:
        raise ValueError("identity word")
    mats = [cfg.letter_matrix(a) for a in w]
    inv = [J @ m.T @ J for m in reversed(mats)]
    start = _gap_point(cfg)
    xplus, mu = _iterate(mats, start, iters)
    xminus, _ = _iterate(inv, start, iters)
    x0 = frame_vector(xplus, xminus)
    return HyperbolicData(lam=1.0 / mu, xminus=xminus, xplus=xplus, x0=x0)


def word_fixed_points(cfg: SchottkyConfig, w: Word) -> tuple[np.ndarray, np.ndarray]:
    hd = word_hyperbolic_data(cfg, w)
    return hd.xplus, hd.xminus


def word_hyperbolicity(cfg: SchottkyConfig, w: Word) -> float:
    return word_hyperbolic_data(cfg, w).hyperbolicity


# --- verification --------------------------------------------------------------


@dataclass
class SchottkyReport:
    ok: bool
    theta0: float
    eps0: float
    smallest_interval: float
    smallest_key: tuple[int, int] | None
    pairing_residuals: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    discreteness: str = "implied by ping-pong"

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "theta0": self.theta0,
            "eps0": self.eps0,
            "smallest_interval": self.smallest_interval,
            "smallest_key": None if self.smallest_key is None else key_name(self.smallest_key),
            "pairing_residuals": {str(k): v for k, v in self.pairing_residuals.items()},
            "failures": list(self.failures),
            "flags": list(self.flags),
            "discreteness": self.discreteness,
        }


def key_name(k: tuple[int, int]) -> str:
    return f"{k[0]}{'+' if k[1] > 0 else '-'}"


def verify_schottky(cfg: SchottkyConfig, tol: float = TOL) -> SchottkyReport:
    failures: list[str] = []
    flags: list[str] = []
    keys = cfg.keys()
    ivs = [cfg.intervals[k] for k in keys]
    disjoint, theta0 = circular_gaps(ivs)
    if not disjoint or theta0 <= tol:
        failures.append(f"intervals not disjoint (min gap {theta0:.6g})")
    eps0 = 2.0 * math.sin(max(theta0, 0.0) / 2.0)

    residuals = {}
    for i, g in enumerate(cfg.generators, start=1):
        am, ap = cfg.intervals[(i, -1)], cfg.intervals[(i, 1)]
        if isometry_defect(g.matrix) > 1e-9:
            failures.append(f"generator {i} is not an isometry")
        r = intervals_pairing_residual(g, am, ap)
        residuals[i] = r
        if r > 1e-9:
            failures.append(f"generator {i} does not pair its intervals (residual {r:.3g})")
        if classify(g, tol) is not IsometryType.HYPERBOLIC:
            failures.append(f"generator {i} is not hyperbolic")
            continue
        hd = hyperbolic_data(g, tol)
        if not ap.contains(hd.phi_plus, 1e-9):
            failures.append(f"attracting fixed point of generator {i} outside A_{i}^+")
        if not am.contains(hd.phi_minus, 1e-9):
            failures.append(f"repelling fixed point of generator {i} outside A_{i}^-")

    lengths = {k: cfg.intervals[k].length for k in keys}
    kmin = min(lengths, key=lambda k: (lengths[k], k[0], -k[1]))
    smallest = lengths[kmin]
    if cfg.m >= 2:
        if smallest >= math.pi / 2:
            failures.append("no interval shorter than pi/2")
    else:
        flags.append("single generator: no small interval guaranteed")
    return SchottkyReport(
        ok=not failures,
        theta0=theta0,
        eps0=eps0,
        smallest_interval=smallest,
        smallest_key=kmin,
        pairing_residuals=residuals,
        failures=failures,
        flags=flags,
    )


def sample_delta(cfg: SchottkyConfig, n: int, rng: np.random.Generator, spread: float = 2.0) -> np.ndarray:
    """``n`` future timelike vectors (on the hyperboloid) inside the polygon."""
    poly = cfg.polygon()
    out = []
    while len(out) < n:
        r = rng.uniform(0.0, spread)
        a = rng.uniform(0.0, 2 * math.pi)
        u = np.array([math.sinh(r) * math.cos(a), math.sinh(r) * math.sin(a), math.cosh(r)])
        if delta_contains(poly, u):
            out.append(u)
    return np.array(out).reshape(n, 3)


@dataclass
class PingPongResult:
    ok: bool
    vacuous: bool
    failures: int
    checked: int


def pingpong_check(cfg: SchottkyConfig, w: Word, samples: np.ndarray) -> PingPongResult:
    """Images of points of the polygon under ``w`` must land in the half-plane of its first letter."""
    if w.is_identity:
        return PingPongResult(ok=True, vacuous=True, failures=0, checked=0)
    g = cfg.word_matrix(w)
    h = cfg.half_plane(w[0].i, w[0].j)
    imgs = np.asarray(samples, dtype=float) @ g.T
    scale = np.linalg.norm(imgs, axis=1)
    inside = bform(imgs, h.v) > 1e-12 * scale
    bad = int(np.count_nonzero(~inside))
    return PingPongResult(ok=bad == 0, vacuous=False, failures=bad, checked=len(imgs))


@dataclass
class HyperbolicityCriterion:
    guaranteed_eps: float | None
    actual: float | None
    cyclically_reduced: bool

    @property
    def holds(self) -> bool:
        if self.guaranteed_eps is None or self.actual is None:
            return True
        return self.actual >= self.guaranteed_eps - 1e-9


def word_hyperbolicity_criterion(cfg: SchottkyConfig, w: Word, theta0: float | None = None) -> HyperbolicityCriterion:
    if w.is_identity:
        raise ValueError("identity word")
    if theta0 is None:
        theta0 = verify_schottky(cfg).theta0
    eps0 = 2.0 * math.sin(theta0 / 2.0)
    actual = word_hyperbolicity(cfg, w)
    if w.is_cyclically_reduced():
        return HyperbolicityCriterion(eps0, actual, True)
    return HyperbolicityCriterion(None, actual, False)


def locate_in_plane(cfg: SchottkyConfig, u, max_steps: int = 1000) -> tuple[Word, np.ndarray] | None:
    """Move a future timelike vector into the closed polygon by ping-pong descent."""
    u = vec(u)
    hps = {k: cfg.half_plane(*k) for k in cfg.keys()}
    word = Word()
    for _ in range(max_steps):
        scale = float(np.linalg.norm(u))
        hit = [k for k, h in hps.items() if bform(u, h.v) > 1e-12 * scale]
        if not hit:
            return word, u
        i, j = hit[0]
        u = cfg.letter_matrix(Letter(i, -j)) @ u
        u = u / math.sqrt(-bform(u, u))
        word = word.append(Letter(i, j))
    return None


def all_words(cfg: SchottkyConfig, max_length: int):
    for n in range(1, max_length + 1):
        yield from reduced_words(cfg.m, n)
