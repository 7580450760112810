"""Runtime property suites for a configuration.

Each suite draws its own stream from a PCG64 generator seeded with
``(seed, suite index)``, so a report is reproducible and suites do not
perturb each other.  A suite that fails at the requested tolerance is rerun
at :data:`LOOSE_TOL`; if it passes there the failure is classed as
``tolerance``, otherwise as ``mathematics``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .affine import (
    AffineSchottkyConfig,
    Region,
    SequenceTerminates,
    apply_word,
    hyperbolicity_audit,
    locate,
    nested_sequence,
    star_pairs,
    validate,
    x_codes,
)
from .isometry import (
    AffineIsometry,
    LinearIsometry,
    chord_ratio,
    compression_check,
    distortion_bound,
    random_hyperbolic,
    random_linear_isometry,
)
from .lorentz import CirclePoint, hyperbolicity, hyperbolicity_closed_form, random_unit_spacelike
from .planes import Membership, closure_wedges, membership_codes, random_half_space, transform
from .schottky import key_name, pingpong_check, sample_delta, word_hyperbolicity
from .words import Letter, Word, cyclically_reduced_words, power, random_reduced_word, words_up_to
from .zigzag import ApproxError, DefinitePlane, angles, region, separation_report

RNG_NAME = "numpy.random.PCG64"
LOOSE_TOL = 1e-6


@dataclass
class Context:
    cfg: AffineSchottkyConfig
    report: object

    @property
    def lin(self):
        return self.cfg.linear_config()


@dataclass
class Outcome:
    checked: int = 0
    failures: list = field(default_factory=list)
    worst: float = 0.0

    def fail(self, violation: float, size: float = 0.0, **detail) -> None:
        v = float(violation)
        self.failures.append({"violation": v if math.isfinite(v) else None, "size": float(size), **detail})

    def track(self, v: float) -> None:
        self.worst = max(self.worst, float(v))


@dataclass(frozen=True)
class Suite:
    name: str
    claim: str
    run: Callable
    needs_valid: bool = True


@dataclass
class SuiteResult:
    name: str
    claim: str
    status: str
    checked: int
    failures: int
    worst: float
    classification: str | None = None
    counterexample: dict | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def _sample_x(ctx: Context, rng, n: int, box: float = 3.0) -> np.ndarray:
    out = []
    while sum(len(o) for o in out) < n:
        cand = rng.uniform(-box, box, (4 * n, 3))
        out.append(cand[x_codes(ctx.cfg, cand) == -1])
    return np.concatenate(out)[:n]


# --- configuration -----------------------------------------------------------------


def s_pairing(ctx, rng, n, tol):
    out = Outcome()
    for i, r in ctx.report.pairing_residuals.items():
        out.checked += 1
        out.track(r)
        if r > tol:
            out.fail(r, generator=int(i))
    return out


def s_disjointness(ctx, rng, n, tol):
    out = Outcome()
    for name, d in ctx.report.separations.items():
        out.checked += 1
        if d <= tol:
            out.fail(tol - d, pair=name, distance=d)
    return out


def s_star(ctx, rng, n, tol):
    """Balls of radius delta0 around points outside ``H_i^j`` miss ``h_i^j closure(H')``."""
    out = Outcome()
    d0 = ctx.report.delta0
    out.checked += 1
    if not d0 > tol:
        out.fail(tol - d0, delta0=d0)
        return out
    cfg = ctx.cfg
    per = max(1, n // (2 * cfg.m))
    targets = {}
    for key in cfg.keys():
        hij = cfg.letter(Letter(*key))
        targets[key] = [
            (k2, closure_wedges(transform(hij, cfg.half_spaces[k2])))
            for k2 in cfg.keys()
            if k2 != (key[0], -key[1])
        ]
    for key in cfg.keys():
        hs = cfg.half_spaces[key]
        pts = rng.uniform(-10.0, 10.0, (4 * per, 3))
        pts = pts[hs.codes(pts) != 1][:per]
        for x in pts:
            for k2, wedges in targets[key]:
                out.checked += 1
                d = min(w.distance_to_point(x) for w in wedges)
                out.track(max(0.0, d0 - d))
                if d < d0 - tol:
                    out.fail(d0 - d, pair=f"{key_name(key)}|{key_name(k2)}", point=x.tolist(), distance=d)
    return out


# --- Lorentzian geometry ------------------------------------------------------------


def s_hyperbolicity_identity(ctx, rng, n, tol):
    out = Outcome()
    vs = random_unit_spacelike(rng, n)
    for v in vs:
        out.checked += 1
        e = abs(hyperbolicity(v) - hyperbolicity_closed_form(v))
        out.track(e)
        if e > tol:
            out.fail(e, size=float(np.linalg.norm(v)), v=v.tolist())
    return out


def s_compression(ctx, rng, n, tol):
    out = Outcome()
    for _ in range(max(3, n // 100)):
        g = random_hyperbolic(rng, max_s=2.0)
        h = AffineIsometry(g, rng.uniform(-5.0, 5.0, 3))
        x = rng.uniform(-5.0, 5.0, 3)
        for delta in (0.1, 1.0, 10.0):
            rep = compression_check(h, delta, x, n, rng)
            out.checked += rep.samples
            out.track(rep.max_ratio - 1.0)
            if rep.max_ratio > 1.0 + tol:
                out.fail(rep.max_ratio - 1.0, delta=delta, epsilon=rep.epsilon, matrix=g.matrix.tolist(), x=x.tolist())
    return out


def s_distortion(ctx, rng, n, tol):
    out = Outcome()
    for _ in range(n):
        psi = random_linear_isometry(rng, max_s=3.0)
        a1, a2 = (CirclePoint(float(t)) for t in rng.uniform(0.0, 2 * math.pi, 2))
        if abs(math.remainder(a1.phi - a2.phi, 2 * math.pi)) < 1e-6:
            continue
        out.checked += 1
        K = distortion_bound(psi)
        r = chord_ratio(psi, a1, a2)
        v = max(0.0, math.log(r) - math.log(K), -math.log(K) - math.log(r))
        out.track(v)
        if v > tol:
            out.fail(v, K=K, ratio=r, matrix=psi.matrix.tolist(), phi=[a1.phi, a2.phi])
    return out


# --- linear Schottky group -----------------------------------------------------------


def s_pingpong(ctx, rng, n, tol):
    out = Outcome()
    lin = ctx.lin
    pts = sample_delta(lin, n, rng)
    for w in words_up_to(lin.m, 3):
        if w.is_identity:
            continue
        r = pingpong_check(lin, w, pts)
        out.checked += r.checked
        if r.failures:
            out.fail(r.failures, size=len(w), word=str(w), plane="linear")
    xs = _sample_x(ctx, rng, n)
    keys = ctx.cfg.keys()
    for w in words_up_to(ctx.cfg.m, 3):
        if w.is_identity:
            continue
        codes = x_codes(ctx.cfg, apply_word(ctx.cfg, w, xs), tol)
        want = keys.index((w[0].i, w[0].j))
        bad = np.count_nonzero(codes != want)
        out.checked += len(xs)
        if bad:
            out.fail(int(bad), size=len(w), word=str(w), plane="affine")
    return out


def s_cyclic(ctx, rng, n, tol):
    out = Outcome()
    lin = ctx.lin
    eps0 = ctx.report.eps0
    for length in range(1, 7):
        for w in cyclically_reduced_words(lin.m, length):
            out.checked += 1
            e = word_hyperbolicity(lin, w)
            out.track(eps0 - e)
            if e < eps0 - tol:
                out.fail(eps0 - e, size=len(w), word=str(w), hyperbolicity=e)
    return out


def s_conjugates(ctx, rng, n, tol):
    """``a^n b a^-n`` keeps its eigenvalues while its fixed points merge."""
    out = Outcome()
    lin = ctx.lin
    if lin.m < 2:
        return out
    a, b = Letter(1, 1), Letter(2, 1)
    prev = math.inf
    for k in range(7):
        w = power(a, k) * Word((b,)) * power(a.inverse(), k)
        e = word_hyperbolicity(lin, w)
        out.checked += 1
        if not e < prev:
            out.fail(e - prev, size=k, word=str(w), hyperbolicity=e)
        prev = e
    return out


def s_audit(ctx, rng, n, tol):
    out = Outcome()
    words = [random_reduced_word(ctx.cfg.m, int(rng.integers(1, 9)), rng) for _ in range(max(10, n // 10))]
    for e in hyperbolicity_audit(ctx.cfg, words, ctx.report.eps0):
        out.checked += 1
        v = e.guarantee - e.actual
        out.track(v)
        if v > tol:
            out.fail(v, size=len(Word.parse(e.word)), word=e.word, guarantee=e.guarantee, actual=e.actual)
    return out


# --- crooked half-spaces -----------------------------------------------------------------


def s_trichotomy(ctx, rng, n, tol):
    out = Outcome()
    for _ in range(max(1, n // 100)):
        hs = random_half_space(rng)
        q = rng.uniform(-10.0, 10.0, (100, 3))
        a = hs.codes(q, tol)
        b = hs.opposite().codes(q, tol)
        out.checked += len(q)
        bad = np.flatnonzero((a != -b) | (np.abs(a) > 1))
        for k in bad[:1]:
            out.fail(1.0, point=q[k].tolist(), u=hs.u.tolist(), vertex=hs.vertex.tolist())
    return out


def s_equivariance(ctx, rng, n, tol):
    out = Outcome()
    for _ in range(n):
        hs = random_half_space(rng)
        h = AffineIsometry(random_linear_isometry(rng, max_s=1.5), rng.uniform(-5.0, 5.0, 3))
        q = rng.uniform(-10.0, 10.0, 3)
        out.checked += 1
        c0 = int(hs.codes(q, tol)[0])
        c1 = int(membership_codes(h.apply_points(q[None, :]), transform(h, hs).u, transform(h, hs).p, tol)[0])
        if c0 != c1:
            out.fail(1.0, point=q.tolist(), before=c0, after=c1, matrix=h.linear.matrix.tolist())
    return out


# --- affine group ------------------------------------------------------------------


def s_locate(ctx, rng, n, tol):
    out = Outcome()
    pts = rng.uniform(-20.0, 20.0, (n, 3))
    for q in pts:
        out.checked += 1
        r = locate(ctx.cfg, q, 10_000, tol)
        if not r.located:
            out.fail(math.inf, point=q.tolist(), steps=r.steps)
            continue
        back = apply_word(ctx.cfg, r.word, r.final[None, :])[0]
        err = float(np.linalg.norm(back - q))
        out.track(err)
        if err > 1e-7 * max(1.0, float(np.linalg.norm(q))):
            out.fail(err, size=len(r.word), point=q.tolist(), word=str(r.word))
        if r.region not in (Region.IN_X, Region.ON_BOUNDARY):
            out.fail(1.0, point=q.tolist(), region=str(r.region))
    return out


def _sequences(ctx, rng, count: int):
    cfg = ctx.cfg
    xs = _sample_x(ctx, rng, count, box=1.0)
    for x in xs:
        w = random_reduced_word(cfg.m, int(rng.integers(3, 7)), rng)
        q = apply_word(cfg, w, x[None, :])[0]
        for K in range(len(w), 2, -1):
            try:
                yield w, nested_sequence(cfg, q, K, rng=rng, samples=50)
                break
            except SequenceTerminates:
                continue


def s_nesting(ctx, rng, n, tol):
    out = Outcome()
    for w, seq in _sequences(ctx, rng, max(5, n // 50)):
        out.checked += 1
        if not seq.nesting_ok:
            out.fail(1.0, size=len(w), word=str(w), point=seq.point.tolist())
    return out


def _chain(ctx, rng, n, tol, which: str):
    out = Outcome()
    for w, seq in _sequences(ctx, rng, max(5, n // 20)):
        try:
            rep = separation_report(ctx.cfg, seq, delta0=ctx.report.delta0, rng=rng)
        except ApproxError as exc:
            out.checked += 1
            out.fail(math.inf, size=len(w), word=str(w), error=str(exc))
            continue
        for r in rep.rows:
            out.checked += 1
            if which == "rho":
                v = r.bound - r.rho
                out.track(v)
                if v > tol:
                    out.fail(v, size=len(w), word=str(w), k=r.k, rho=r.rho, bound=r.bound)
            else:
                v = r.wu_angle - math.pi / 4
                out.track(v)
                if v > tol:
                    out.fail(v, size=len(w), word=str(w), k=r.k, angle=r.wu_angle)
    return out


def s_separation_chain(ctx, rng, n, tol):
    return _chain(ctx, rng, n, tol, "rho")


def s_weak_unstable(ctx, rng, n, tol):
    return _chain(ctx, rng, n, tol, "wu")


def s_zigzag(ctx, rng, n, tol):
    out = Outcome()
    for _ in range(n):
        hs = random_half_space(rng)
        c = float(rng.uniform(-5.0, 5.0))
        if abs(c - hs.vertex[2]) < 1e-3:
            continue
        a = angles(region(hs, DefinitePlane.horizontal(c)))
        out.checked += 1
        v = max(a.defect(), a.sector_defect())
        out.track(v)
        if v > tol:
            out.fail(v, u=hs.u.tolist(), vertex=hs.vertex.tolist(), level=c)
    return out


SUITES = (
    Suite("pairing", "pairing conditions", s_pairing, needs_valid=False),
    Suite("disjointness", "disjoint crooked half-spaces", s_disjointness, needs_valid=False),
    Suite("star-neighborhood", "star neighbourhood radius delta0", s_star, needs_valid=False),
    Suite("hyperbolicity-identity", "hyperbolicity of a unit spacelike vector", s_hyperbolicity_identity, False),
    Suite("compression", "compression of balls in the weak-unstable plane", s_compression, False),
    Suite("distortion", "distortion of chords under the circle action", s_distortion, False),
    Suite("ping-pong", "ping-pong", s_pingpong),
    Suite("cyclic-hyperbolicity", "cyclically reduced words are eps0-hyperbolic", s_cyclic),
    Suite("conjugate-degeneration", "conjugates a^n b a^-n lose hyperbolicity", s_conjugates),
    Suite("hyperbolicity-audit", "hyperbolicity guarantee of arbitrary words", s_audit),
    Suite("trichotomy", "crooked plane splits space in two", s_trichotomy, False),
    Suite("equivariance", "isometries transport membership", s_equivariance, False),
    Suite("locate", "completeness of the tiling", s_locate),
    Suite("nesting", "nested half-spaces along a descent", s_nesting),
    Suite("separation-chain", "separation of consecutive approximating lines", s_separation_chain),
    Suite("weak-unstable-angle", "weak-unstable lines within pi/4 of nu", s_weak_unstable),
    Suite("zigzag-structure", "zigzag angles", s_zigzag, False),
)


def _minimal(failures: list) -> dict:
    # smallest witness first, then the largest violation (None means unbounded)
    return min(failures, key=lambda f: (f["size"], -math.inf if f["violation"] is None else -f["violation"]))


def run_suite(suite: Suite, index: int, ctx: Context, samples: int, seed: int, tol: float) -> SuiteResult:
    res = suite.run(ctx, _rng(seed, index), samples, tol)
    if not res.failures:
        return SuiteResult(suite.name, suite.claim, "pass", res.checked, 0, res.worst)
    loose = suite.run(ctx, _rng(seed, index), samples, max(tol, LOOSE_TOL))
    cls = "tolerance" if not loose.failures else "mathematics"
    return SuiteResult(suite.name, suite.claim, "fail", res.checked, len(res.failures), res.worst, cls, _minimal(res.failures))


def run_all(cfg: AffineSchottkyConfig, samples: int = 1000, seed: int = 0, tol: float = 1e-9, only=None) -> dict:
    if samples < 1:
        raise ValueError("samples must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    names = [s.name for s in SUITES]
    unknown = sorted(set(only or ()) - set(names))
    if unknown:
        raise ValueError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(names)}")
    rep = validate(cfg)
    ctx = Context(cfg, rep)
    results = []
    for index, suite in enumerate(SUITES):
        if only is not None and suite.name not in only:
            continue
        if suite.needs_valid and not rep.ok:
            results.append(SuiteResult(suite.name, suite.claim, "skipped", 0, 0, 0.0, None, {"reason": "configuration failed validation"}))
            continue
        results.append(run_suite(suite, index, ctx, samples, seed, tol))
    ok = all(r.status == "pass" for r in results)
    failing = [r for r in results if r.status == "fail"]
    return {
        "ok": ok,
        "rng": RNG_NAME,
        "seed": seed,
        "samples": samples,
        "tol": tol,
        "validation_ok": rep.ok,
        "failing": [r.name for r in failing],
        "classification": sorted({r.classification for r in failing}),
        "suites": [r.to_json() for r in results],
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False, allow_nan=False) + "\n"
