import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pg3par import clifford as cl
from pg3par import lines as ln
from pg3par import quaternions as qt
from pg3par.sphere import covering_radius

LEFT, RIGHT = cl.CliffordSide.LEFT, cl.CliffordSide.RIGHT
E = np.eye(4)
seeds = st.integers(0, 2**32 - 1)


class TestCalibration:
    def test_fixed_coordinates(self):
        # left multiplication fixes the difference coordinate, right the sum
        assert cl.FIXED_COORD[LEFT] == 1
        assert cl.FIXED_COORD[RIGHT] == 0

    def test_induced_conjugation_is_identity(self):
        np.testing.assert_array_equal(cl.INDUCED_CONJUGATION[LEFT], np.eye(3))
        np.testing.assert_array_equal(cl.INDUCED_CONJUGATION[RIGHT], np.eye(3))

    def test_left_i_fixes_span_of_one_and_i(self):
        a = np.array([np.cos(0.7), np.sin(0.7), 0, 0])
        L = ln.line_through(E[0], E[1])
        image = ln.line_through(qt.multiply(a, E[0]), qt.multiply(a, E[1]))
        np.testing.assert_allclose(image, L, atol=1e-15)
        np.testing.assert_allclose(cl.act_left(a, L), L, atol=1e-15)

    def test_act_matches_point_images(self, rng):
        a, b = qt.random_unit(rng), qt.random_unit(rng)
        P, Q = rng.standard_normal((2, 50, 4))
        L = ln.line_through(P, Q)
        want = ln.line_through(qt.multiply(a, qt.multiply(P, b)), qt.multiply(a, qt.multiply(Q, b)))
        np.testing.assert_allclose(cl.act(qt.Isometry4(a, b), L), want, atol=1e-12)


class TestProductAction:
    @settings(max_examples=50, deadline=None)
    @given(seeds)
    def test_law(self, seed):
        rng = np.random.default_rng(seed)
        L = ln.random_lines(rng, 50)
        a = qt.random_unit(rng)
        c0 = ln.klein_split(L)
        for side, actor in ((LEFT, cl.act_left), (RIGHT, cl.act_right)):
            c1 = ln.klein_split(actor(a, L))
            k = cl.FIXED_COORD[side]
            assert np.abs(c1[k] - c0[k]).max() <= 1e-10
            R = cl.induced_rotation(side, a)
            assert np.abs(c1[1 - k] - c0[1 - k] @ R.T).max() <= 1e-10

    def test_commute(self, rng):
        for _ in range(100):
            a, b = qt.random_unit(rng), qt.random_unit(rng)
            L = ln.random_lines(rng, 1)
            lr = cl.act_left(a, cl.act_right(b, L))
            rl = cl.act_right(b, cl.act_left(a, L))
            assert np.abs(lr - rl).max() <= 1e-12

    def test_orbit_covers_moving_sphere(self, rng):
        L = ln.random_lines(rng, 1)
        for side, actor in ((LEFT, cl.act_left), (RIGHT, cl.act_right)):
            images = np.array([actor(qt.random_unit(rng), L)[0] for _ in range(10_000)])
            moving = ln.klein_split(images)[1 - cl.FIXED_COORD[side]]
            assert covering_radius(moving) < 0.2


class TestClassOf:
    def test_examples(self):
        L = ln.line_through(E[0], E[1])
        assert cl.class_of(L, LEFT) == cl.CliffordClass(LEFT, [1, 0, 0])
        assert cl.class_of(L, RIGHT) == cl.CliffordClass(RIGHT, [1, 0, 0])
        L = ln.line_through(E[2], E[3])
        assert cl.class_of(L, LEFT) == cl.CliffordClass(LEFT, [-1, 0, 0])
        assert cl.class_of(L, RIGHT) == cl.CliffordClass(RIGHT, [1, 0, 0])

    def test_members_share_anchor(self, rng):
        for side in (LEFT, RIGHT):
            C = cl.CliffordClass(side, ln.uniform_sphere(rng, 1)[0])
            M = C.members(ln.uniform_sphere(rng, 200))
            assert all(C.contains(m) for m in M)
            assert ln.quadric_residual(M).max() < 1e-12

    def test_orbit_stays_in_class(self, rng):
        L = ln.random_lines(rng, 1)[0]
        for side, actor in ((LEFT, cl.act_left), (RIGHT, cl.act_right)):
            C = cl.class_of(L, side)
            for _ in range(20):
                assert C.contains(actor(qt.random_unit(rng), L))

    def test_json(self, rng):
        C = cl.CliffordClass(RIGHT, ln.uniform_sphere(rng, 1)[0], oriented=False)
        assert cl.CliffordClass.from_json(C.to_json()) == C


class TestConjugation:
    def test_e01_reversed(self):
        L = ln.line_through(E[0], E[1])
        np.testing.assert_allclose(cl.conjugation_image(L), -L)

    def test_involution(self, rng):
        L = ln.random_lines(rng, 1000)
        np.testing.assert_allclose(cl.conjugation_image(cl.conjugation_image(L)), L, atol=1e-14)

    def test_exchanges_classes(self, rng):
        for _ in range(100):
            L = ln.random_lines(rng, 1)[0]
            a = qt.random_unit(rng)
            C = cl.class_of(L, LEFT)
            img = cl.conjugation_image(C.members(ln.uniform_sphere(rng, 20)))
            # all images share the right anchor, so they form one right class
            anchors = cl.anchors(img, RIGHT)
            assert np.abs(anchors - anchors[0]).max() < 1e-10
            # and left-multiplication orbits go to right-multiplication orbits
            lhs = cl.conjugation_image(cl.act_left(a, L))
            rhs = cl.act_right(qt.conjugate(a), cl.conjugation_image(L))
            assert np.abs(lhs - rhs).max() < 1e-12

    def test_coordinate_swap(self, rng):
        L = ln.random_lines(rng, 100)
        c0, c1 = ln.klein_split(L), ln.klein_split(cl.conjugation_image(L))
        np.testing.assert_allclose(c1.x, -c0.y, atol=1e-14)
        np.testing.assert_allclose(c1.y, -c0.x, atol=1e-14)


class TestPartition:
    @pytest.mark.parametrize("side", [LEFT, RIGHT])
    def test_distinct_members_skew(self, side, rng):
        # unit lines: reciprocal product is (x1.x2 - y1.y2) / 2, so with one
        # coordinate shared it is +-(u1.u2 - 1) / 2 in the moving one
        C = cl.CliffordClass(side, ln.uniform_sphere(rng, 1)[0])
        free = ln.uniform_sphere(rng, 400)
        M = C.members(free)
        a, b = M[:200], M[200:]
        rp = ln.reciprocal_product(a, b)
        sign = 1.0 if cl.FIXED_COORD[side] == 1 else -1.0
        want = sign * (np.sum(free[:200] * free[200:], axis=1) - 1) / 2
        np.testing.assert_allclose(rp, want, atol=1e-12)
        assert np.abs(rp).min() > 1e-8

    def test_every_line_one_class(self, rng):
        L = ln.random_lines(rng, 10_000)
        for side in (LEFT, RIGHT):
            P = cl.clifford_parallelism(side)
            res = P.resolve_many(L)
            assert {r.multiplicity for r in res} == {1}
            assert ln.quadric_residual(L).max() < 1e-12

    def test_z_axis_and_infinity(self):
        axis = np.array([0.0, 0, 1, 0, 0, 0])
        inf = np.array([0.0, 0, 0, 0, 0, 1])
        np.testing.assert_allclose(cl.anchors(axis, LEFT), -cl.anchors(inf, LEFT))
        np.testing.assert_allclose(cl.anchors(axis, RIGHT), cl.anchors(inf, RIGHT))

    def test_ordinary_merges_antipodes(self, rng):
        P = cl.clifford_parallelism(RIGHT, oriented=False)
        L = ln.random_lines(rng, 100)
        np.testing.assert_allclose(P.class_index(L), P.class_index(ln.reverse(L)))
        assert {P.resolve(l).multiplicity for l in L} == {1}

    @pytest.mark.parametrize("side", [LEFT, RIGHT])
    def test_invariant_under_isometries(self, side, rng):
        P = cl.clifford_parallelism(side)
        for _ in range(50):
            g = qt.Isometry4.random(rng)
            C = cl.CliffordClass(side, ln.uniform_sphere(rng, 1)[0])
            img = cl.act(g, C.members(ln.uniform_sphere(rng, 10)))
            idx = P.class_index(img)
            assert np.abs(idx - idx[0]).max() < 1e-10
