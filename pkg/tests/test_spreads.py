import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pg3par import clifford as cl
from pg3par import lines as ln
from pg3par import spreads as sp
from pg3par.suite import bad_profile

COMPLEX = sp.RotationalSpread(sp.ComplexProfile(1.0))
radii = st.floats(1e-3, 1e3)
angles = st.floats(-np.pi, np.pi)


def brute_count(profile, point, nodes=400_001):
    """Count rulings through a point by scanning phi with r = rho cos phi, t = rho sin phi."""
    rho = np.hypot(point[0], point[1])
    phi = np.linspace(-np.pi / 2, np.pi / 2, nodes)[1:-1]
    r = rho * np.cos(phi)
    h = profile.center(r) + rho * np.sin(phi) * profile.slope(r) - point[2]
    return int(np.count_nonzero(np.sign(h[:-1]) * np.sign(h[1:]) < 0))


class QuadraticTouch:
    """Profile whose upper branch touches the point (2, 0, 0) at r = 1."""

    def slope(self, r):
        return np.ones_like(np.asarray(r, float))

    def center(self, r):
        r = np.asarray(r, float)
        return (r - 1) ** 2 - np.sqrt(np.maximum(4 - r * r, 0.0))


class TestSpreadLine:
    def test_example(self):
        L = sp.spread_line(COMPLEX, 1.0, 0.0)
        np.testing.assert_allclose(L.point, [1, 0, 0])
        np.testing.assert_allclose(L.direction, np.array([0, 1, 1]) / np.sqrt(2))

    def test_invalid_radius(self):
        for r in (0.0, -1.0):
            with pytest.raises(sp.InvalidRadius):
                sp.spread_line(COMPLEX, r, 0.0)

    @given(radii, angles, st.floats(-100, 100))
    def test_on_hyperboloid(self, r, th, t):
        L = sp.spread_line(COMPLEX, r, th)
        x, y, z = L.point + t * L.direction
        f = 1.0 / r
        assert abs(x * x + y * y - (z / f) ** 2 - r * r) <= 1e-9 * (1 + x * x + y * y + r * r)

    @given(radii, angles, angles)
    def test_rotation_equivariant(self, r, th, a):
        R = np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])
        L = sp.spread_line(COMPLEX, r, th)
        M = sp.spread_line(COMPLEX, r, th + a)
        np.testing.assert_allclose(R @ L.point, M.point, atol=1e-9 * (1 + r))
        np.testing.assert_allclose(R @ L.direction, M.direction, atol=1e-9 * (1 + 1 / r))

    def test_slope_is_c_over_r(self):
        s = sp.RotationalSpread(sp.ComplexProfile(2.5))
        for r in (0.01, 1.0, 40.0):
            d = sp.spread_line(s, r, 0.3).direction
            assert d[2] / np.hypot(d[0], d[1]) == pytest.approx(2.5 / r)

    def test_special_lines(self):
        axis, inf = sp.special_lines(COMPLEX)
        np.testing.assert_allclose(ln.affine_to_pluecker(axis), sp.AXIS)
        np.testing.assert_allclose(ln.affine_to_pluecker(inf), sp.INFINITY)

    def test_pluecker_matches_affine(self, rng):
        r, th = 10 ** rng.uniform(-3, 3, 50), rng.uniform(-np.pi, np.pi, 50)
        want = np.array([ln.affine_to_pluecker(sp.spread_line(COMPLEX, a, b)) for a, b in zip(r, th)])
        np.testing.assert_allclose(sp.spread_pluecker(COMPLEX, r, th), want, atol=1e-12)


class TestMembership:
    def test_round_trip(self, rng):
        r, th = 10 ** rng.uniform(-3, 3, 10_000), rng.uniform(-np.pi, np.pi, 10_000)
        L = sp.spread_pluecker(COMPLEX, r, th)
        assert sp.membership_residual(COMPLEX, L).max() <= 1e-9

    def test_special_lines_members(self):
        assert sp.contains(COMPLEX, sp.AXIS).member
        assert sp.contains(COMPLEX, sp.INFINITY).member

    def test_reversed(self):
        L = ln.affine_to_pluecker(sp.spread_line(COMPLEX, 1.0, 0.0))
        assert not sp.contains(COMPLEX, -L).member
        assert sp.contains(sp.RotationalSpread(COMPLEX.profile, oriented=False), -L).member

    def test_other_ruling_rejected(self):
        L = ln.affine_to_pluecker(ln.FiniteLine([1, 0, 0], [0, 1, -1]))
        assert not sp.contains(COMPLEX, L).member

    def test_random_lines_rejected(self, rng):
        L = ln.random_lines(rng, 10_000)
        assert sp.membership_residual(COMPLEX, L).min() > 1e-9

    def test_complex_spread_is_right_clifford_class(self, rng):
        r, th = 10 ** rng.uniform(-3, 3, 1000), rng.uniform(-np.pi, np.pi, 1000)
        L = np.vstack([sp.spread_pluecker(COMPLEX, r, th), sp.AXIS, sp.INFINITY])
        C = cl.CliffordClass(cl.CliffordSide.RIGHT, [0, 0, 1])
        assert all(C.contains(l) for l in L)
        # and conversely members of that class are in the spread
        M = C.members(ln.uniform_sphere(rng, 1000))
        assert sp.membership_residual(COMPLEX, M).max() <= 1e-9

    def test_scaling_is_automorphism(self, rng):
        for k in (0.1, 3.0):
            M = np.diag([1.0, k, k, 1.0])
            r, th = 10 ** rng.uniform(-2, 2, 500), rng.uniform(-np.pi, np.pi, 500)
            img = ln.transform(M, sp.spread_pluecker(COMPLEX, r, th))
            assert sp.membership_residual(COMPLEX, img).max() <= 1e-9


class TestCoverage:
    def test_point_on_axis_plane(self):
        c = sp.coverage_count(COMPLEX, [2.0, 0.0, 5.0])
        assert c.count == 1
        assert brute_count(COMPLEX.profile, [2.0, 0.0, 5.0]) == 1

    def test_waist_point(self):
        for rho in (0.01, 1.0, 300.0):
            c = sp.coverage_count(COMPLEX, [rho, 0.0, 0.0])
            assert c.count == 1
            assert c.roots[0][0] == pytest.approx(rho, rel=1e-9)

    def test_point_on_line_recovers_radius(self, rng):
        for _ in range(50):
            r, th, t = 10 ** rng.uniform(-2, 2), rng.uniform(-np.pi, np.pi), rng.uniform(-5, 5)
            L = sp.spread_line(COMPLEX, r, th)
            c = sp.coverage_count(COMPLEX, L.point + t * L.direction)
            assert c.count == 1
            assert c.roots[0][0] == pytest.approx(r, rel=1e-8)

    def test_axis_point(self):
        with pytest.raises(sp.AxisPoint):
            sp.coverage_count(COMPLEX, [0.0, 0.0, 1.0])

    def test_tangent_root(self):
        c = sp.coverage_count(sp.RotationalSpread(QuadraticTouch()), [2.0, 0.0, 0.0])
        kinds = sorted(k for _, _, k in c.roots)
        assert kinds == ["simple", "tangent"]
        tangent = [r for r, _, k in c.roots if k == "tangent"][0]
        assert tangent == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("profile", [sp.ComplexProfile(1.0), sp.ComplexProfile(0.2), bad_profile()])
    def test_agrees_with_brute_force(self, profile, rng):
        s = sp.RotationalSpread(profile)
        rho = 10 ** rng.uniform(-1, 1, 100)
        ang = rng.uniform(0, 2 * np.pi, 100)
        pts = np.stack([rho * np.cos(ang), rho * np.sin(ang), rho * rng.standard_normal(100)], axis=1)
        got = [c.count for c in sp.coverage_counts(s, pts)]
        want = [brute_count(profile, p) for p in pts]
        assert got == want

    def test_json(self):
        c = sp.coverage_count(COMPLEX, [1.0, 1.0, 1.0])
        obj = json.loads(json.dumps(c.to_json()))
        assert obj["roots"][0]["kind"] == "simple"


class TestVerifySpread:
    def test_empty(self):
        rep = sp.verify_spread(COMPLEX, 0)
        assert rep.passed and rep.samples == 0

    def test_complex_passes(self):
        rep = sp.verify_spread(COMPLEX, 3000, seed=1)
        assert rep.histogram == {1: 3000}
        assert rep.to_json()["pass"] is True

    def test_bad_profile_fails(self):
        rep = sp.verify_spread(sp.RotationalSpread(bad_profile()), 2000, seed=1)
        assert not rep.passed
        assert 0 < len(rep.witnesses) <= 20
        assert all(w["roots"] is not None for w in rep.witnesses)

    def test_deterministic(self):
        a = sp.verify_spread(COMPLEX, 600, seed=7, workers=1)
        b = sp.verify_spread(COMPLEX, 600, seed=7, workers=4)
        assert a.to_json() == b.to_json()


class TestProfiles:
    def test_is_regular(self):
        assert sp.is_regular(COMPLEX)
        r = np.logspace(-4, 4, 200)
        tab = sp.TabulatedProfile.sample(lambda x: 2 / x, lambda x: 0 * x, r)
        assert sp.is_regular(sp.RotationalSpread(tab))
        shifted = sp.TabulatedProfile.sample(lambda x: 2 / x, lambda x: 0 * x + 0.1, r)
        assert not sp.is_regular(sp.RotationalSpread(shifted))
        steep = sp.TabulatedProfile.sample(lambda x: 1 / x**2, lambda x: 0 * x, r, (-2, -2, 0, 0))
        assert not sp.is_regular(sp.RotationalSpread(steep))

    def test_tabulated_interpolates_nodes(self):
        p = bad_profile()
        np.testing.assert_allclose(p.slope(p.r), p.f, rtol=1e-12)
        np.testing.assert_allclose(p.center(p.r), p.g, atol=1e-12)

    def test_tails(self):
        r = np.logspace(-1, 1, 20)
        p = sp.TabulatedProfile.sample(lambda x: 3 / x, lambda x: 0 * x + 1, r, (-1, -1, 0, 0))
        assert p.slope(1e-3) == pytest.approx(3e3)
        assert p.slope(1e3) == pytest.approx(3e-3)
        assert p.center(1e5) == pytest.approx(1.0)

    def test_rejects_bad_tables(self):
        with pytest.raises(ValueError):
            sp.TabulatedProfile([1, 2, 3, 4], [1, 1, -1, 1], [0, 0, 0, 0])
        with pytest.raises(ValueError):
            sp.TabulatedProfile([1, 3, 2, 4], [1, 1, 1, 1], [0, 0, 0, 0])
        with pytest.raises(ValueError):
            sp.ComplexProfile(0.0)

    def test_json(self):
        for p in (sp.ComplexProfile(1.5), bad_profile()):
            back = sp.profile_from_json(json.loads(json.dumps(p.to_json())))
            r = np.logspace(-3, 3, 50)
            np.testing.assert_allclose(back.slope(r), p.slope(r))
            np.testing.assert_allclose(back.center(r), p.center(r))

    def test_parse(self):
        assert sp.parse_profile("complex:2").c == 2.0
        with pytest.raises(ValueError):
            sp.parse_profile("tabulated")


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-2, 1e2), st.floats(-1e2, 1e2))
def test_complex_cover_exactly_once(rho, z):
    assert sp.coverage_count(COMPLEX, [rho, 0.0, z]).count == 1
