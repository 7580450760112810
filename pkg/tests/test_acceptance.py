"""Acceptance criteria, one test per criterion.

Each test carries a ``criterion`` marker; conftest prints one PASS/FAIL line
per criterion at the end of the run.  Tolerances and sample counts are
pinned below.  Where possible the expected value is recomputed here from
first principles rather than through the library.
"""

import math

import numpy as np
import pytest

from crooked import config
from crooked.affine import (
    Region,
    SequenceTerminates,
    apply_word,
    locate,
    nested_sequence,
    validate,
    x_codes,
)
from crooked.cli import EXIT_OK, main
from crooked.isometry import AffineIsometry, random_hyperbolic, random_linear_isometry
from crooked.lorentz import J, hyperbolicity, random_unit_spacelike
from crooked.planes import membership_codes, random_half_space, transform
from crooked.schottky import word_hyperbolicity
from crooked.words import Letter, Word, cyclically_reduced_words, power, random_reduced_word, words_up_to
from crooked.zigzag import DefinitePlane, angles, region, separation_report

SEED = 20240611
TOL_IDENTITY = 1e-9
TOL_EPS0 = 1e-9
TOL_EIGEN = 1e-9
TOL_CHAIN = 1e-9
TOL_ZIGZAG = 1e-9
TOL_ROUNDTRIP = 1e-7
TOL_COMPRESSION = 1e-9
TOL_DISTORTION = 1e-12

N_SPACELIKE = 10_000
N_HYPERBOLIC = 100
N_COMPRESSION = 1_000
DELTAS = (0.1, 1.0, 10.0)
PINGPONG_LENGTH = 4
PINGPONG_SAMPLES = 100
CYCLIC_LENGTH = 8
CONJUGATE_N = 6
N_DISTORTION = 1_000
N_MEMBERSHIP = 100_000
N_TRANSPORT = 1_000
N_LOCATE = 1_000
LOCATE_BOX = 20.0
LOCATE_STEPS = 10_000
N_SEQUENCES = 60
N_SLICES = 1_000
EPS0 = 2 * math.sin(math.pi / 12)

SHIPPED = str(config.shipped_path())


def rng_for(n):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([SEED, n])))


def sample_x(cfg, rng, n, box=3.0):
    out = []
    while sum(len(o) for o in out) < n:
        pts = rng.uniform(-box, box, (4 * n, 3))
        out.append(pts[x_codes(cfg, pts) == -1])
    return np.concatenate(out)[:n]


def line(n, ok, detail):
    print(f"criterion {n}: {'pass' if ok else 'FAIL'} ({detail})")


def eigen_frame(m):
    """Null eigenvectors (normalised to height one) and eigenvalues of a hyperbolic matrix, via numpy."""
    w, v = np.linalg.eig(m)
    w, v = w.real, v.real
    order = np.argsort(w)
    lo, mid, hi = order
    xminus = v[:, lo] / v[2, lo]
    xplus = v[:, hi] / v[2, hi]
    x0 = v[:, mid] / math.sqrt(v[:, mid] @ J @ v[:, mid])
    return xminus, x0, xplus, w[hi]


@pytest.mark.criterion(1, "hyperbolicity closed form over random unit spacelike vectors")
def test_hyperbolicity_closed_form():
    vs = random_unit_spacelike(rng_for(1), N_SPACELIKE)
    want = 2.0 * np.sqrt(2.0 / (1.0 + np.sum(vs * vs, axis=1)))
    got = np.array([hyperbolicity(v) for v in vs])
    err = float(np.max(np.abs(got - want)))
    line(1, err < TOL_IDENTITY, f"max error {err:.3g} over {N_SPACELIKE}")
    assert err < TOL_IDENTITY


@pytest.mark.criterion(2, "compression of weak-unstable balls")
def test_compression():
    rng = rng_for(2)
    violations = checked = 0
    worst = 0.0
    for _ in range(N_HYPERBOLIC):
        g = random_hyperbolic(rng, max_s=2.0)
        m = g.matrix
        h = AffineIsometry(g, rng.uniform(-5.0, 5.0, 3))
        xminus, x0, xplus, _ = eigen_frame(m)
        eps = float(np.linalg.norm(xplus - xminus))
        basis, _ = np.linalg.qr(np.stack([x0, xplus], axis=1))
        minv = J @ m.T @ J
        x = rng.uniform(-5.0, 5.0, 3)
        hx = m @ x + h.translation
        for delta in DELTAS:
            r = delta * eps / 4.0 * np.sqrt(rng.uniform(0.0, 1.0, N_COMPRESSION))
            a = rng.uniform(0.0, 2 * math.pi, N_COMPRESSION)
            ys = hx + (r * np.cos(a))[:, None] * basis[:, 0] + (r * np.sin(a))[:, None] * basis[:, 1]
            back = (ys - h.translation) @ minv.T
            d = np.linalg.norm(back - x, axis=1) / delta
            worst = max(worst, float(d.max()))
            violations += int(np.count_nonzero(d > 1.0 + TOL_COMPRESSION))
            checked += N_COMPRESSION
    line(2, violations == 0, f"{violations} violations in {checked}, worst ratio {worst:.4f}")
    assert violations == 0


@pytest.mark.criterion(3, "ping-pong on the shipped configuration")
def test_pingpong(shipped):
    rng = rng_for(3)
    keys = shipped.keys()
    returned = misplaced = 0
    words = [w for w in words_up_to(shipped.m, PINGPONG_LENGTH) if not w.is_identity]
    for w in words:
        xs = sample_x(shipped, rng, PINGPONG_SAMPLES)
        codes = x_codes(shipped, apply_word(shipped, w, xs))
        returned += int(np.count_nonzero(codes == -1))
        misplaced += int(np.count_nonzero(codes != keys.index((w[0].i, w[0].j))))
    ok = returned == 0 and misplaced == 0
    line(3, ok, f"{len(words)} words, {returned} returned to X, {misplaced} outside the first letter's half-space")
    assert len(words) == 160
    assert ok


@pytest.mark.criterion(4, "eps0 bound for cyclically reduced words and degenerating conjugates")
def test_eps0(shipped):
    lin = shipped.linear_config()
    worst = math.inf
    count = 0
    for n in range(1, CYCLIC_LENGTH + 1):
        for w in cyclically_reduced_words(shipped.m, n):
            worst = min(worst, word_hyperbolicity(lin, w))
            count += 1
    # numpy eigen-data of the product matrix agrees for short words
    eig_err = 0.0
    for n in range(1, 5):
        for w in cyclically_reduced_words(shipped.m, n):
            m = np.eye(3)
            for a in w:
                m = m @ lin.letter_matrix(a)
            xminus, _, xplus, _ = eigen_frame(m)
            eig_err = max(eig_err, abs(float(np.linalg.norm(xplus - xminus)) - word_hyperbolicity(lin, w)))
    a, b = Letter(1, 1), Letter(2, 1)
    conj = [word_hyperbolicity(lin, power(a, n) * Word((b,)) * power(a.inverse(), n)) for n in range(CONJUGATE_N + 1)]
    decreasing = all(y < x for x, y in zip(conj, conj[1:]))
    ok = worst >= EPS0 - TOL_EPS0 and eig_err < TOL_EIGEN and decreasing
    line(4, ok, f"{count} words, min {worst:.6f} vs {EPS0:.6f}; conjugates {conj[0]:.3g} -> {conj[-1]:.3g}")
    assert count == 9856
    assert worst >= EPS0 - TOL_EPS0
    assert eig_err < TOL_EIGEN
    assert decreasing


@pytest.mark.criterion(5, "distortion of chords")
def test_distortion():
    rng = rng_for(5)
    violations = 0
    for _ in range(N_DISTORTION):
        psi = random_linear_isometry(rng, max_s=3.0).matrix
        s = math.acosh(psi[2, 2])
        K = math.exp(s) * math.pi / 2
        p1, p2 = rng.uniform(0.0, 2 * math.pi, 2)
        a1, a2 = np.array([math.cos(p1), math.sin(p1), 1.0]), np.array([math.cos(p2), math.sin(p2), 1.0])
        b1, b2 = psi @ a1, psi @ a2
        b1, b2 = b1 / b1[2], b2 / b2[2]
        ratio = np.linalg.norm(b1 - b2) / np.linalg.norm(a1 - a2)
        if not (1 / K) * (1 - TOL_DISTORTION) <= ratio <= K * (1 + TOL_DISTORTION):
            violations += 1
    line(5, violations == 0, f"{violations} violations in {N_DISTORTION}")
    assert violations == 0


@pytest.mark.criterion(6, "membership trichotomy and equivariance")
def test_trichotomy_equivariance():
    rng = rng_for(6)
    bad = 0
    per = 1_000
    for _ in range(N_MEMBERSHIP // per):
        hs = random_half_space(rng)
        q = rng.uniform(-10.0, 10.0, (per, 3))
        a = hs.codes(q)
        b = hs.opposite().codes(q)
        bad += int(np.count_nonzero(~np.isin(a, (-1, 0, 1)) | (a != -b)))
    moved = 0
    for _ in range(N_TRANSPORT):
        hs = random_half_space(rng)
        h = AffineIsometry(random_linear_isometry(rng, max_s=1.5), rng.uniform(-5.0, 5.0, 3))
        q = rng.uniform(-10.0, 10.0, (1, 3))
        t = transform(h, hs)
        if hs.codes(q)[0] != membership_codes(h.apply_points(q), t.u, t.p)[0]:
            moved += 1
    ok = bad == 0 and moved == 0
    line(6, ok, f"{bad} trichotomy failures in {N_MEMBERSHIP}, {moved} label changes in {N_TRANSPORT}")
    assert ok


@pytest.mark.criterion(7, "every sampled point is located")
def test_completeness(shipped):
    rng = rng_for(7)
    pts = rng.uniform(-LOCATE_BOX, LOCATE_BOX, (N_LOCATE, 3))
    missing = 0
    worst = 0.0
    longest = 0
    for q in pts:
        r = locate(shipped, q, LOCATE_STEPS)
        if not r.located or r.region not in (Region.IN_X, Region.ON_BOUNDARY):
            missing += 1
            continue
        longest = max(longest, len(r.word))
        worst = max(worst, float(np.linalg.norm(apply_word(shipped, r.word, r.final[None])[0] - q)))
    ok = missing == 0 and worst < TOL_ROUNDTRIP
    line(7, ok, f"{missing} unlocated of {N_LOCATE}, round-trip error {worst:.3g}, longest word {longest}")
    assert ok


@pytest.mark.criterion(8, "separation of consecutive approximating lines")
def test_separation_chain(shipped, shipped_report):
    assert shipped_report.delta0 > 0
    rng = rng_for(8)
    rows = short = wide = 0
    worst_gap = math.inf
    for x in sample_x(shipped, rng, N_SEQUENCES, box=1.0):
        w = random_reduced_word(shipped.m, int(rng.integers(4, 8)), rng)
        q = apply_word(shipped, w, x[None])[0]
        seq = None
        for K in range(len(w), 2, -1):
            try:
                seq = nested_sequence(shipped, q, K)
                break
            except SequenceTerminates:
                continue
        if seq is None:
            continue
        rep = separation_report(shipped, seq, delta0=shipped_report.delta0)
        for r in rep.rows:
            rows += 1
            worst_gap = min(worst_gap, r.rho - r.bound)
            short += r.rho < r.bound - TOL_CHAIN
            wide += r.wu_angle > math.pi / 4 + TOL_CHAIN
    ok = rows > 0 and short == 0 and wide == 0
    line(8, ok, f"delta0 {shipped_report.delta0:.6f}, {rows} rows, {short} short, {wide} wide angles")
    assert rows >= N_SEQUENCES
    assert short == 0 and wide == 0


@pytest.mark.criterion(9, "zigzag angle structure")
def test_zigzag_structure():
    rng = rng_for(9)
    worst = 0.0
    checked = 0
    while checked < N_SLICES:
        hs = random_half_space(rng)
        c = float(rng.uniform(-5.0, 5.0))
        if abs(c - hs.vertex[2]) < 1e-3:
            continue
        a = angles(region(hs, DefinitePlane.horizontal(c)))
        worst = max(worst, a.defect(), a.sector_defect())
        checked += 1
    line(9, worst < TOL_ZIGZAG, f"worst defect {worst:.3g} over {checked} slices")
    assert worst < TOL_ZIGZAG


@pytest.mark.criterion(10, "tile and verify outputs are byte-identical across runs")
def test_determinism(tmp_path):
    outs = {}
    for run in (1, 2):
        svg, rep = tmp_path / f"t{run}.svg", tmp_path / f"v{run}.json"
        assert main(["tile", SHIPPED, "--depth", "2", "--out", str(svg)]) == EXIT_OK
        assert main(["verify", SHIPPED, "--samples", "1000", "--seed", "42", "--out", str(rep)]) == EXIT_OK
        outs[run] = (svg.read_bytes(), rep.read_bytes())
    ok = outs[1] == outs[2]
    line(10, ok, f"svg {len(outs[1][0])} bytes, verify {len(outs[1][1])} bytes")
    assert ok
