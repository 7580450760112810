import itertools
import math

import cvxpy as cp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crooked.affine import transform_word, word_to_isometry
from crooked.convex import ConvexWedge, project_to_cone, wedge_distance
from crooked.isometry import AffineIsometry, LinearIsometry, rotation
from crooked.lorentz import J, ORIGIN, SpacePoint, bform
from crooked.planes import (
    CrookedHalfSpace,
    CrookedPlane,
    Membership,
    SeparationError,
    angle,
    closure_wedges,
    membership,
    membership_codes,
    model_membership,
    random_half_space,
    separation,
    transform,
    wedge_constraints,
)
from crooked.words import Word

from strategies import affine_isometry, point, unit_spacelike

S2, S3 = math.sqrt(2), math.sqrt(3)
E1 = np.array([1.0, 0, 0])


class TestMembership:
    def test_examples(self):
        assert membership([1, 5, 0], E1, ORIGIN) is Membership.IN_HALF_SPACE
        assert membership([0, 1, 1], E1, ORIGIN) is Membership.ON_CROOKED_PLANE
        assert membership([-1, -5, 0], E1, ORIGIN) is Membership.IN_OPPOSITE_HALF_SPACE

    def test_stem_point(self):
        # (0,0,1) is timelike and orthogonal to u: it lies on the stem
        assert membership([0, 0, 1], E1, ORIGIN) is Membership.ON_CROOKED_PLANE
        assert membership([0, 2, 1], E1, ORIGIN) is Membership.IN_HALF_SPACE

    def test_grid_matches_coordinate_model(self):
        ticks = np.linspace(-2, 2, 9)
        pts = np.array(list(itertools.product(ticks, ticks, ticks)))
        # grid points hit the plane exactly; the band only absorbs cos(pi/2) ~ 6e-17
        codes = membership_codes(pts, E1, ORIGIN, 1e-12)
        want = {Membership.IN_HALF_SPACE: 1, Membership.ON_CROOKED_PLANE: 0, Membership.IN_OPPOSITE_HALF_SPACE: -1}
        assert all(c == want[model_membership(q)] for q, c in zip(pts, codes))

    def test_random_matches_coordinate_model(self, rng):
        pts = rng.normal(size=(5000, 3))
        codes = membership_codes(pts, E1, ORIGIN, 0.0)
        assert all(c == {Membership.IN_HALF_SPACE: 1, Membership.IN_OPPOSITE_HALF_SPACE: -1}[model_membership(q)] for q, c in zip(pts, codes))

    @given(unit_spacelike(), point, st.lists(point, min_size=1, max_size=20))
    def test_trichotomy(self, u, p, qs):
        hs = CrookedHalfSpace(u, SpacePoint.of(p))
        a = hs.codes(np.array(qs))
        b = hs.opposite().codes(np.array(qs))
        np.testing.assert_array_equal(a, -b)

    @given(unit_spacelike(), point, affine_isometry(), st.lists(point, min_size=1, max_size=20))
    def test_equivariance(self, u, p, h, qs):
        hs = CrookedHalfSpace(u, SpacePoint.of(p))
        qs = np.array(qs)
        before = hs.codes(qs)
        after = transform(h, hs).codes(h.apply_points(qs))
        far = np.abs(_boundary_values(hs, qs)) > 1e-6
        np.testing.assert_array_equal(before[far], after[far])

    def test_plane_samples_on_plane(self, rng):
        c = CrookedPlane([S2, 0, 1], SpacePoint(1.0, 2.0, 3.0))
        pts = c.sample(rng, 500)
        assert np.all(c.half_space().codes(pts, 1e-9) == 0)


def _boundary_values(hs, qs):
    # the three linear forms deciding membership; samples near any of them are skipped
    f = hs.frame
    x = qs - hs.vertex
    vals = np.stack([x @ J @ f.x0, x @ J @ f.xplus, x @ J @ f.xminus], axis=1)
    return np.min(np.abs(vals), axis=1)


class TestWedges:
    def test_model(self):
        w1, w2 = closure_wedges(CrookedHalfSpace(E1, ORIGIN))
        assert w1.contains([1, 1, 0]) and w1.contains([0, -1, 1]) and not w1.contains([-1, 0, 0])
        assert w2.contains([-1, 1, 1]) and not w2.contains([1, 0, 0])

    def test_open_set_in_closure(self, rng):
        hs = random_half_space(rng)
        pts = rng.uniform(-10, 10, (2000, 3))
        inside = pts[hs.codes(pts) == 1]
        w1, w2 = hs.closure_wedges()
        assert all(w1.contains(q) or w2.contains(q) for q in inside)

    def test_constraint_form_agrees(self, rng):
        hs = random_half_space(rng)
        pts = rng.uniform(-10, 10, (300, 3))
        for wedge, cons in zip(hs.closure_wedges(), wedge_constraints(hs)):
            for q in pts:
                lin = all(s * ((q - hs.vertex) @ J @ n) >= -1e-9 for n, s in cons)
                assert lin == wedge.contains(q, 1e-7)


class TestTransform:
    def test_translation(self):
        hs = CrookedHalfSpace(E1, ORIGIN)
        t = transform(AffineIsometry.translation_by([1, 2, 3]), hs)
        np.testing.assert_allclose(t.vertex, [1, 2, 3])
        np.testing.assert_allclose(t.u, E1, atol=1e-15)

    def test_rotation(self):
        t = transform(LinearIsometry(rotation(math.pi / 2)), CrookedHalfSpace(E1, ORIGIN))
        np.testing.assert_allclose(t.u, [0, 1, 0], atol=1e-15)


class TestAngle:
    @pytest.mark.parametrize("u, phi", [((S2, 0, 1), math.pi / 2), ((2, 0, S3), math.pi / 3), ((1, 0, 0), math.pi)])
    def test_examples(self, u, phi):
        assert angle(CrookedHalfSpace(u, ORIGIN)) == pytest.approx(phi)


def _qp_distance(a: CrookedHalfSpace, b: CrookedHalfSpace) -> float:
    """Independent oracle: minimise |x - y| over each pair of closed wedges with cvxpy."""
    best = math.inf
    for ca in wedge_constraints(a):
        for cb in wedge_constraints(b):
            x, y = cp.Variable(3), cp.Variable(3)
            cons = [s * ((J @ n) @ (x - a.vertex)) >= 0 for n, s in ca]
            cons += [s * ((J @ n) @ (y - b.vertex)) >= 0 for n, s in cb]
            prob = cp.Problem(cp.Minimize(cp.norm(x - y)), cons)
            prob.solve(solver=cp.CLARABEL)
            best = min(best, prob.value)
    return best


class TestSeparation:
    def test_identical_and_opposite(self):
        hs = CrookedHalfSpace([S2, 0, 1], SpacePoint(1.0, 0.0, 2.0))
        assert separation(hs, hs).distance == 0
        assert separation(hs, hs.opposite()).distance == 0

    def test_shipped_pair(self, shipped):
        s = separation(shipped.half_spaces[(1, 1)], shipped.half_spaces[(1, -1)])
        # regression value, cross-checked by the QP oracle below
        assert s.distance == pytest.approx(3.4641016151377544, abs=1e-12)
        assert s.distance == pytest.approx(_qp_distance(shipped.half_spaces[(1, 1)], shipped.half_spaces[(1, -1)]), abs=1e-6)
        assert s.attained and not s.asymptotic_flag
        np.testing.assert_allclose(np.linalg.norm(s.x - s.y), s.distance)

    def test_random_pairs_match_qp(self, rng):
        for _ in range(15):
            a, b = random_half_space(rng), random_half_space(rng)
            assert separation(a, b).distance == pytest.approx(_qp_distance(a, b), abs=1e-5)

    def test_disjoint_translates_match_qp(self):
        a = CrookedHalfSpace([2, 0, S3], SpacePoint(0.0, 2.0, 0.0))
        b = CrookedHalfSpace([-2, 0, S3], SpacePoint(0.0, -2.0, 0.0))
        for t in (0.5, 1.0, 3.0):
            bb = CrookedHalfSpace(b.u, SpacePoint(0.0, -t, 0.0))
            assert separation(a, bb).distance == pytest.approx(_qp_distance(a, bb), abs=1e-6)

    def test_bad_truncation(self):
        hs = CrookedHalfSpace(E1, ORIGIN)
        with pytest.raises(SeparationError):
            separation(hs, hs, truncation=0.0)


class TestConvex:
    def test_point_to_ray(self):
        w = ConvexWedge([0, 0, 0], (), ([1, 0, 0],))
        assert w.distance_to_point([-3, 4, 0]) == pytest.approx(5)
        assert w.distance_to_point([3, 4, 0]) == pytest.approx(4)

    def test_parallel_lines(self):
        a = ConvexWedge([0, 0, 0], ([1, 0, 0],))
        b = ConvexWedge([0, 2, 0], ([1, 0, 0],))
        assert wedge_distance(a, b).distance == pytest.approx(2)

    @given(point, st.lists(point.filter(lambda v: np.linalg.norm(v) > 1e-3), min_size=1, max_size=4))
    def test_projection_is_optimal(self, t, rays):
        d, (pt, _, coef) = project_to_cone(t, [], [r / np.linalg.norm(r) for r in rays])
        assert np.all(coef >= 0)
        # no generator direction improves the projection
        for r in rays:
            r = r / np.linalg.norm(r)
            for s in (1e-3, 1e-1, 1.0):
                assert np.linalg.norm(t - (pt + s * r)) >= d - 1e-9


def test_transport_of_long_words_stays_unit(shipped):
    # the product matrix of this word has entries near 1e7; B(g u, g u) would cancel
    w = Word.parse("[1+ 2+ 1+ 2+ 1+ 2+ 1+]")
    hs = transform_word(shipped, w, shipped.half_spaces[(1, 1)])
    assert abs(bform(hs.u, hs.u) - 1.0) <= 1e-9 * float(hs.u @ hs.u)
    assert np.abs(word_to_isometry(shipped, w).matrix).max() > 1e6
