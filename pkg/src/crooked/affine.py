"""Affine Schottky groups: paired crooked half-spaces and the polyhedron X.

A configuration has generators ``h_1..h_m`` and crooked half-spaces
``H_i^+``, ``H_i^-`` with ``h_i(H_i^-) = E - closure(H_i^+)``.  When the
half-spaces are pairwise disjoint, ``X = E - U closure(H_i^j)`` tiles space
under the group.  This module validates a configuration, locates points in
the tiling, enumerates tiles and audits the hyperbolicity of words.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .isometry import AffineIsometry, LinearIsometry, distortion_bound, hyperbolic_data
from .lorentz import TOL, Interval, SpacePoint, bform, frame_interval, spacelike_from_interval, vec
from .planes import CrookedHalfSpace, CrookedPlane, Membership, separation, transform
from .schottky import SchottkyConfig, build_generator, key_name, verify_schottky, word_hyperbolic_data
from .words import Letter, Word, count_reduced, reduced_words, words_up_to


class UnvalidatedConfig(RuntimeError):
    pass


@dataclass(eq=False)
class AffineSchottkyConfig:
    generators: tuple[AffineIsometry, ...]
    half_spaces: dict
    intervals: dict | None = None
    _validated: bool = field(default=False, repr=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        m = len(self.generators)
        if m < 1:
            raise ValueError("need at least one generator")
        for i in range(1, m + 1):
            for j in (1, -1):
                if (i, j) not in self.half_spaces:
                    raise ValueError(f"missing half-space {key_name((i, j))}")
        extra = set(self.half_spaces) - set(self.keys())
        if extra:
            raise ValueError(f"unexpected half-space keys {sorted(extra)}")

    @property
    def m(self) -> int:
        return len(self.generators)

    def keys(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.m + 1) for j in (1, -1)]

    def letter(self, a: Letter) -> AffineIsometry:
        if not 1 <= a.i <= self.m:
            raise IndexError(f"generator {a.i} out of range 1..{self.m}")
        h = self.generators[a.i - 1]
        return h if a.j > 0 else h.inverse()

    def interval(self, key) -> Interval:
        if self.intervals and key in self.intervals:
            return self.intervals[key]
        return frame_interval(self.half_spaces[key].u)

    def linear_config(self) -> SchottkyConfig:
        return SchottkyConfig(
            tuple(h.linear for h in self.generators),
            {k: self.interval(k) for k in self.keys()},
        )

    def plane(self, key) -> CrookedPlane:
        return self.half_spaces[key].boundary

    def scale(self) -> float:
        return max(float(np.linalg.norm(hs.vertex)) for hs in self.half_spaces.values()) + 1.0

    def with_vertex(self, key, vertex) -> "AffineSchottkyConfig":
        hs = dict(self.half_spaces)
        hs[key] = CrookedHalfSpace(hs[key].u, SpacePoint.of(vertex))
        return AffineSchottkyConfig(self.generators, hs, self.intervals)


def word_to_isometry(cfg: AffineSchottkyConfig, w: Word) -> AffineIsometry:
    """``h_{l0} o h_{l1} o ... o h_{lk}`` for ``w = l0 l1 ... lk``."""
    out = AffineIsometry.identity()
    for a in w:
        out = out @ cfg.letter(a)
    return out


def apply_word(cfg: AffineSchottkyConfig, w: Word, pts) -> np.ndarray:
    """Apply a word letter by letter (rightmost first); better conditioned than the product."""
    pts = np.asarray(pts, dtype=float)
    for a in reversed(w.letters):
        pts = cfg.letter(a).apply_points(pts)
    return pts


def transform_word(cfg: AffineSchottkyConfig, w: Word, obj):
    """Image of a crooked plane or half-space under a word, one letter at a time."""
    for a in reversed(w.letters):
        obj = transform(cfg.letter(a), obj)
    return obj


def shipped_example(tau: float = 4.0) -> AffineSchottkyConfig:
    """Two generators pairing arcs of length pi/3 centred at 0, pi/2, pi, 3pi/2."""
    p = math.pi
    intervals = {
        (1, 1): Interval(-p / 6, p / 6),
        (1, -1): Interval(5 * p / 6, 7 * p / 6),
        (2, 1): Interval(p / 3, 2 * p / 3),
        (2, -1): Interval(4 * p / 3, 5 * p / 3),
    }
    vertices = {
        (1, -1): (0.0, -tau / 2, 0.0),
        (1, 1): (0.0, tau / 2, 0.0),
        (2, -1): (tau / 2, 0.0, 0.0),
        (2, 1): (-tau / 2, 0.0, 0.0),
    }
    return from_intervals(intervals, vertices)


def from_intervals(intervals: dict, vertices: dict) -> AffineSchottkyConfig:
    """Builder mode: generators are the canonical transvections, translations
    are fixed by ``h_i(p_i^-) = p_i^+``."""
    m = max(i for i, _ in intervals)
    gens = []
    half_spaces = {}
    for i in range(1, m + 1):
        g = build_generator(intervals[(i, -1)], intervals[(i, 1)])
        pm, pp = vec(vertices[(i, -1)]), vec(vertices[(i, 1)])
        gens.append(AffineIsometry(g, pp - g.matrix @ pm))
        for j in (1, -1):
            half_spaces[(i, j)] = CrookedHalfSpace(spacelike_from_interval(intervals[(i, j)]), SpacePoint.of(vertices[(i, j)]))
    return AffineSchottkyConfig(tuple(gens), half_spaces, dict(intervals))


# --- validation ---------------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    pairing_residuals: dict
    separations: dict
    min_separation: float
    delta0: float
    delta0_pair: tuple | None
    theta0: float
    eps0: float
    schottky: dict
    failures: list
    asymptotic: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "delta0": self.delta0,
            "delta0_pair": self.delta0_pair,
            "theta0": self.theta0,
            "eps0": self.eps0,
            "min_separation": self.min_separation,
            "pairing_residuals": self.pairing_residuals,
            "separations": self.separations,
            "asymptotic": self.asymptotic,
            "schottky": self.schottky,
            "failures": self.failures,
        }


def pairing_residual(cfg: AffineSchottkyConfig, i: int) -> float:
    """``max(|L(h_i) u_i^- + u_i^+|, |h_i(p_i^-) - p_i^+|)``."""
    h = cfg.generators[i - 1]
    hm, hp = cfg.half_spaces[(i, -1)], cfg.half_spaces[(i, 1)]
    r_dir = float(np.linalg.norm(h.linear.matrix @ hm.u + hp.u))
    r_pt = float(np.linalg.norm(h.apply(hm.p).coords - hp.vertex))
    return max(r_dir, r_pt)


def star_pairs(cfg: AffineSchottkyConfig):
    """The ``2m(2m-1)`` pairs ``(C_i^j, h_i^j C_i'^j')`` with ``(i', j') != (i, -j)``."""
    for key in cfg.keys():
        hij = cfg.letter(Letter(*key))
        for key2 in cfg.keys():
            if key2 == (key[0], -key[1]):
                continue
            yield key, key2, cfg.plane(key), transform(hij, cfg.plane(key2))


def validate(cfg: AffineSchottkyConfig, tol: float = 1e-9) -> ValidationReport:
    failures: list[str] = []
    residuals = {}
    for i in range(1, cfg.m + 1):
        r = pairing_residual(cfg, i)
        residuals[str(i)] = r
        if r > tol:
            failures.append(f"pairing of generator {i} fails (residual {r:.6g})")

    trunc = 1e3 * cfg.scale()
    seps = {}
    asym = []
    for k1, k2 in itertools.combinations(cfg.keys(), 2):
        s = separation(cfg.half_spaces[k1], cfg.half_spaces[k2], trunc)
        name = f"{key_name(k1)}|{key_name(k2)}"
        seps[name] = s.distance
        if s.asymptotic_flag:
            asym.append(name)
        if s.distance <= tol:
            failures.append(f"half-spaces {key_name(k1)} and {key_name(k2)} meet")
    min_sep = min(seps.values()) if seps else math.inf

    delta0, pair = math.inf, None
    for k1, k2, c1, c2 in star_pairs(cfg):
        d = separation(c1, c2, trunc).distance
        if d < delta0:
            delta0, pair = d, (key_name(k1), key_name(k2))
    if cfg.m == 1 and pair is None:
        delta0 = min_sep
    if not delta0 > tol:
        failures.append(f"delta0 is not positive ({delta0:.6g})")

    try:
        srep = verify_schottky(cfg.linear_config())
        sj = srep.to_json()
        theta0, eps0 = srep.theta0, srep.eps0
        failures.extend(f"linear part: {f}" for f in srep.failures)
    except ValueError as exc:
        sj = {"ok": False, "failures": [str(exc)]}
        theta0, eps0 = 0.0, 0.0
        failures.append(f"linear part: {exc}")

    ok = not failures
    cfg._validated = ok
    return ValidationReport(
        ok=ok,
        pairing_residuals=residuals,
        separations=seps,
        min_separation=min_sep,
        delta0=delta0,
        delta0_pair=pair,
        theta0=theta0,
        eps0=eps0,
        schottky=sj,
        failures=failures,
        asymptotic=asym,
    )


def _require_valid(cfg: AffineSchottkyConfig):
    if not cfg._validated:
        raise UnvalidatedConfig("configuration has not passed validate()")


# --- the polyhedron X and point location -------------------------------------


class Region(enum.Enum):
    IN_X = "InX"
    ON_BOUNDARY = "OnBoundary"
    IN_HALF_SPACE = "InHalfSpace"


@dataclass(frozen=True)
class XLocation:
    region: Region
    key: tuple[int, int] | None = None

    def __str__(self) -> str:
        if self.region is Region.IN_HALF_SPACE:
            return f"InHalfSpace({key_name(self.key)})"
        return self.region.value


def x_codes(cfg: AffineSchottkyConfig, pts, tol: float = TOL) -> np.ndarray:
    """Per point: index ``k >= 0`` into ``cfg.keys()`` of the containing half-space,
    ``-1`` for X and ``-2`` for the boundary."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    out = np.full(len(pts), -1, dtype=int)
    for k, key in enumerate(cfg.keys()):
        c = cfg.half_spaces[key].codes(pts, tol)
        out = np.where((c == 1) & (out < 0), k, out)
        out = np.where((c == 0) & (out == -1), -2, out)
    return out


def x_contains(cfg: AffineSchottkyConfig, q, tol: float = TOL) -> XLocation:
    q = q.coords if isinstance(q, SpacePoint) else vec(q)
    code = int(x_codes(cfg, q, tol)[0])
    if code >= 0:
        return XLocation(Region.IN_HALF_SPACE, cfg.keys()[code])
    return XLocation(Region.ON_BOUNDARY if code == -2 else Region.IN_X)


@dataclass
class LocateResult:
    located: bool
    word: Word
    final: np.ndarray
    steps: int
    region: Region | None = None

    def to_json(self) -> dict:
        return {
            "located": self.located,
            "word": str(self.word),
            "length": len(self.word),
            "final_point": [float(c) for c in self.final],
            "region": None if self.region is None else self.region.value,
        }


def locate(cfg: AffineSchottkyConfig, q, max_steps: int = 10_000, tol: float = TOL) -> LocateResult:
    """Descend into closure(X): while ``q`` lies in ``H_i^j`` replace it by ``(h_i^j)^-1 q``.

    The letters collected form ``gamma`` with ``gamma^-1(q0)`` in closure(X),
    so ``q0 = gamma(final)``.
    """
    _require_valid(cfg)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    q = q.coords if isinstance(q, SpacePoint) else vec(q)
    keys = cfg.keys()
    inverses = {k: cfg.letter(Letter(k[0], -k[1])) for k in keys}
    letters: list[Letter] = []
    for step in range(max_steps + 1):
        code = int(x_codes(cfg, q, tol)[0])
        if code < 0:
            region = Region.IN_X if code == -1 else Region.ON_BOUNDARY
            return LocateResult(True, Word(tuple(letters)), q, step, region)
        if step == max_steps:
            break
        key = keys[code]
        q = inverses[key].apply_points(q)
        letters.append(Letter(*key))
    return LocateResult(False, Word(tuple(letters)), q, max_steps, None)


# --- tiles ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tile:
    word: Word
    isometry: AffineIsometry
    half_spaces: dict

    def faces(self) -> list[tuple[tuple[int, int], CrookedPlane]]:
        return [(k, hs.boundary) for k, hs in self.half_spaces.items()]


def tile_count(m: int, depth: int) -> int:
    return sum(count_reduced(m, n) for n in range(depth + 1))


def enumerate_tiles(cfg: AffineSchottkyConfig, depth: int) -> list[Tile]:
    """All tiles ``gamma closure(X)`` for reduced words of length at most ``depth``,
    each given by its transported family ``gamma H_i^j``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    tiles = []
    for w in words_up_to(cfg.m, depth):
        g = word_to_isometry(cfg, w)
        tiles.append(Tile(w, g, {k: transform_word(cfg, w, hs) for k, hs in cfg.half_spaces.items()}))
    return tiles


def unique_faces(cfg: AffineSchottkyConfig, depth: int) -> list[tuple[Word, tuple[int, int]]]:
    """Distinct crooked planes bounding tiles up to ``depth``.

    Tiles ``gamma`` and ``gamma h_i^j`` share the face ``gamma C_i^j``; each
    shared face is listed once, under the shorter word.
    """
    seen = set()
    out = []
    for w in words_up_to(cfg.m, depth):
        for key in cfg.keys():
            nbr = w * Word((Letter(*key),))
            edge = frozenset([str(w), str(nbr)])
            if edge in seen:
                continue
            seen.add(edge)
            out.append((w, key))
    return out


# --- nested sequences ---------------------------------------------------------------


class SequenceTerminates(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NestedTerm:
    k: int
    key: tuple[int, int]
    gamma: Word
    half_space: CrookedHalfSpace


@dataclass
class NestedSequence:
    point: np.ndarray
    adjust: Word
    terms: list
    nesting_ok: bool

    @property
    def letters(self) -> Word:
        return Word(tuple(Letter(*t.key) for t in self.terms))


def small_key(cfg: AffineSchottkyConfig) -> tuple[int, int]:
    """An index ``(i0, j0)`` whose arc is shorter than pi/2 (the shortest one)."""
    lengths = {k: cfg.interval(k).length for k in cfg.keys()}
    k = min(lengths, key=lambda k: (lengths[k], k[0], -k[1]))
    if lengths[k] >= math.pi / 2:
        raise ValueError("no arc shorter than pi/2")
    return k


def nested_sequence(
    cfg: AffineSchottkyConfig,
    q,
    K: int,
    rng: np.random.Generator | None = None,
    samples: int = 200,
    tol: float = TOL,
) -> NestedSequence:
    """The nested half-spaces ``H_k = gamma_k H_{i_k}^{j_k}`` containing ``q``.

    First ``q`` is moved into ``H_{i0}^{j0}`` with ``Phi(A_{i0}^{j0}) < pi/2``
    (two moves when it starts in ``H_{i0}^{-j0}``).  Then the descent that
    defines the sequence is run for ``K`` terms; it must not reach
    closure(X) before that, otherwise :class:`SequenceTerminates` is raised.
    Strict nesting ``H_{k+1} in H_k`` is checked on points sampled in each
    ``H_{k+1}``.
    """
    _require_valid(cfg)
    q = q.coords if isinstance(q, SpacePoint) else vec(q)
    i0, j0 = small_key(cfg)
    loc = x_contains(cfg, q, tol)
    if loc.region is not Region.IN_HALF_SPACE:
        raise SequenceTerminates("point already lies in closure(X)")
    adjust = Word()
    if loc.key != (i0, j0):
        if loc.key == (i0, -j0):
            other = next(k for k in cfg.keys() if k[0] != i0) if cfg.m > 1 else None
            if other is None:
                raise ValueError("two-step adjustment needs a second generator")
            adjust = Word((Letter(i0, j0), Letter(*other)))
        else:
            adjust = Word((Letter(i0, j0),))
        q = apply_word(cfg, adjust, q[None, :])[0]

    terms: list[NestedTerm] = []
    keys = cfg.keys()
    x = q.copy()
    gamma = Word()
    for k in range(K):
        code = int(x_codes(cfg, x, tol)[0])
        if code < 0:
            raise SequenceTerminates(f"descent reached closure(X) after {k} terms")
        key = keys[code]
        terms.append(NestedTerm(k, key, gamma, transform_word(cfg, gamma, cfg.half_spaces[key])))
        x = cfg.letter(Letter(key[0], -key[1])).apply_points(x)
        gamma = gamma.append(Letter(*key))

    ok = True
    if rng is not None:
        for a, b in zip(terms, terms[1:]):
            pts = sample_half_space(cfg, b, rng, samples)
            if len(pts) and not np.all(a.half_space.codes(pts, tol) == 1):
                ok = False
    return NestedSequence(q, adjust, terms, ok)


def sample_half_space(cfg: AffineSchottkyConfig, term: NestedTerm, rng: np.random.Generator, n: int) -> np.ndarray:
    """Points of ``H_k``: images under ``gamma_k`` of points sampled in ``H_{i_k}^{j_k}``."""
    hs = cfg.half_spaces[term.key]
    pts = []
    w1, w2 = hs.closure_wedges()
    for w in (w1, w2):
        cand = w.sample(rng, n, scale=10.0)
        cand = cand[hs.codes(cand) == 1]
        pts.append(cand)
    pts = np.concatenate(pts)
    return apply_word(cfg, term.gamma, pts)


# --- hyperbolicity audit ---------------------------------------------------------------


@dataclass
class AuditEntry:
    word: str
    cyclically_reduced: bool
    guarantee: float
    actual: float
    k1: int = 0
    middle: str = ""
    tail: int = 0
    conjugator: str = ""
    K: float = 1.0

    @property
    def holds(self) -> bool:
        return self.actual >= self.guarantee - 1e-9

    def to_json(self) -> dict:
        return dict(self.__dict__, holds=self.holds)


def _leading_run(w: Word) -> tuple[int, int]:
    a = w[0]
    k1 = 0
    while k1 < len(w) and w[k1] == a:
        k1 += 1
    t = 0
    while t < len(w) - k1 and w[len(w) - 1 - t] == a.inverse():
        t += 1
    return k1, t


def hyperbolicity_audit(cfg: AffineSchottkyConfig, words, eps0: float | None = None) -> list[AuditEntry]:
    """Guaranteed hyperbolicity of each word, checked against its eigen-data.

    Cyclically reduced words are ``eps0``-hyperbolic.  Otherwise write
    ``w = a^k1 w' a^-t`` with ``a`` the first letter; conjugating by
    ``psi = a^-k1`` gives ``w' a^(k1-t)`` and ``w`` is ``eps0 / K``-hyperbolic
    with ``K = e^s pi / 2`` taken from ``a^k1``.  If that conjugate is still
    not cyclically reduced, the full cyclic reduction ``w = u c u^-1`` is used
    instead, with ``K`` from ``u``.
    """
    lin = cfg.linear_config()
    if eps0 is None:
        eps0 = verify_schottky(lin).eps0
    out = []
    for w in words:
        if not isinstance(w, Word):
            raise TypeError(f"not a word: {w!r}")
        if w.is_identity:
            raise ValueError("identity word has no hyperbolicity")
        if w.max_index() > cfg.m:
            raise IndexError(f"word {w} uses a generator beyond {cfg.m}")
        actual = word_hyperbolic_data(lin, w).hyperbolicity
        if w.is_cyclically_reduced():
            out.append(AuditEntry(str(w), True, eps0, actual))
            continue
        a = w[0]
        k1, t = _leading_run(w)
        middle = Word(w.letters[k1 : len(w) - t])
        conj = middle * Word((a,) * k1) * Word((a.inverse(),) * t)
        if not conj.is_identity and conj.is_cyclically_reduced():
            u = Word((a,) * k1)
        else:
            u, _ = w.cyclic_reduction()
        K = distortion_bound(LinearIsometry(lin.word_matrix(u), check=False))
        out.append(AuditEntry(str(w), False, eps0 / K, actual, k1, str(middle), t, str(u), K))
    return out
