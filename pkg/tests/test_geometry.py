import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halpernlp import LpSpace
from halpernlp.geometry import DimensionMismatchError

from conftest import P_GRID


def vec(draw_dim=4):
    return st.lists(
        st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
        min_size=draw_dim,
        max_size=draw_dim,
    ).map(np.array)


ps = st.sampled_from(P_GRID)


class TestNorms:
    def test_zero_vector(self):
        sp = LpSpace(3, 3.0)
        assert sp.norm(np.zeros(3)) == 0.0
        assert sp.dual_norm(np.zeros(3)) == 0.0

    def test_euclidean_case(self):
        sp = LpSpace(2, 2.0)
        assert sp.norm(np.array([3.0, 4.0])) == pytest.approx(5.0)

    def test_p3_closed_form(self):
        # (1^3 + 1^3)^{1/3} evaluated by independent scalar arithmetic
        sp = LpSpace(2, 3.0)
        assert sp.norm(np.array([1.0, 1.0])) == pytest.approx(2.0 ** (1 / 3), rel=1e-14)

    def test_dual_norm_p3(self):
        # q = 3/2: (1 + 1)^{2/3}
        sp = LpSpace(2, 3.0)
        assert sp.dual_norm(np.array([1.0, 1.0])) == pytest.approx(
            2.0 ** (2 / 3), rel=1e-14
        )

    def test_large_exponent_no_overflow(self):
        sp = LpSpace(4, 10.0)
        x = np.full(4, 1e3)
        expected = 1e3 * 4 ** (1 / 10)
        assert sp.norm(x) == pytest.approx(expected, rel=1e-12)

    def test_exponent_range_enforced(self):
        with pytest.raises(ValueError):
            LpSpace(3, 1.0)
        with pytest.raises(ValueError):
            LpSpace(3, 11.0)
        with pytest.raises(ValueError):
            LpSpace(0, 2.0)

    def test_conjugate_exponent(self):
        for p in P_GRID + [1.1, 10.0]:
            sp = LpSpace(2, p)
            assert 1.0 / p + 1.0 / sp.q == pytest.approx(1.0, abs=1e-15)


class TestPairing:
    def test_zero_dual(self, rng):
        sp = LpSpace(5, 2.5)
        assert sp.pairing(rng.standard_normal(5), np.zeros(5)) == 0.0

    def test_dot_product(self):
        sp = LpSpace(2, 2.0)
        assert sp.pairing(np.array([1.0, 2.0]), np.array([3.0, -1.0])) == 1.0

    def test_dimension_mismatch(self):
        sp = LpSpace(3, 2.0)
        with pytest.raises(DimensionMismatchError):
            sp.pairing(np.zeros(3), np.zeros(4))

    def test_holder(self, rng):
        for p in P_GRID:
            sp = LpSpace(6, p)
            for _ in range(50):
                x = rng.standard_normal(6)
                xs = rng.standard_normal(6)
                assert abs(sp.pairing(x, xs)) <= sp.norm(x) * sp.dual_norm(xs) + 1e-12


class TestDualityMap:
    def test_zero(self):
        sp = LpSpace(3, 3.0)
        np.testing.assert_array_equal(sp.duality_map(np.zeros(3)), np.zeros(3))
        np.testing.assert_array_equal(sp.inverse_duality_map(np.zeros(3)), np.zeros(3))

    def test_identity_for_p2(self, rng):
        sp = LpSpace(4, 2.0)
        x = rng.standard_normal(4)
        np.testing.assert_allclose(sp.duality_map(x), x, rtol=1e-12)
        np.testing.assert_allclose(sp.inverse_duality_map(x), x, rtol=1e-12)

    def test_p3_frozen_value(self):
        sp = LpSpace(2, 3.0)
        x = np.array([1.0, 1.0])
        j = sp.duality_map(x)
        np.testing.assert_allclose(j, 2.0 ** (-1 / 3) * np.ones(2), rtol=1e-13)
        assert sp.pairing(x, j) == pytest.approx(2.0 ** (2 / 3), rel=1e-13)
        assert sp.pairing(x, j) == pytest.approx(sp.norm(x) ** 2, rel=1e-13)

    @given(x=vec(), p=ps)
    @settings(max_examples=300, deadline=None)
    def test_defining_identities(self, x, p):
        sp = LpSpace(4, p)
        j = sp.duality_map(x)
        n2 = sp.norm(x) ** 2
        scale = max(n2, 1.0)
        assert abs(sp.pairing(x, j) - n2) <= 1e-10 * scale
        assert abs(sp.dual_norm(j) - sp.norm(x)) <= 1e-10 * max(sp.norm(x), 1.0)

    @given(x=vec(), p=ps)
    @settings(max_examples=300, deadline=None)
    def test_roundtrip(self, x, p):
        sp = LpSpace(4, p)
        back = sp.inverse_duality_map(sp.duality_map(x))
        assert np.linalg.norm(back - x) <= 1e-10 * max(np.linalg.norm(x), 1.0)
        xs = np.asarray(x)
        fwd = sp.duality_map(sp.inverse_duality_map(xs))
        assert np.linalg.norm(fwd - xs) <= 1e-10 * max(np.linalg.norm(xs), 1.0)

    @given(x=vec(), y=vec(), p=ps)
    @settings(max_examples=300, deadline=None)
    def test_monotone(self, x, y, p):
        sp = LpSpace(4, p)
        gap = sp.pairing(x - y, sp.duality_map(x) - sp.duality_map(y))
        assert gap >= -1e-12 * max(1.0, np.linalg.norm(x - y) ** 2)


class TestLyapunov:
    def test_self_distance_zero(self, rng):
        for p in P_GRID:
            sp = LpSpace(5, p)
            x = rng.standard_normal(5)
            assert sp.lyapunov(x, x) == pytest.approx(0.0, abs=1e-12)

    def test_p2_is_squared_distance(self, rng):
        sp = LpSpace(5, 2.0)
        for _ in range(20):
            x, y = rng.standard_normal(5), rng.standard_normal(5)
            assert sp.lyapunov(x, y) == pytest.approx(
                np.linalg.norm(x - y) ** 2, rel=1e-12, abs=1e-12
            )

    def test_p3_axis_points(self):
        sp = LpSpace(2, 3.0)
        assert sp.lyapunov(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(
            2.0, rel=1e-14
        )

    @given(x=vec(), y=vec(), p=ps)
    @settings(max_examples=300, deadline=None)
    def test_lower_bound(self, x, y, p):
        sp = LpSpace(4, p)
        assert sp.lyapunov(x, y) >= (sp.norm(x) - sp.norm(y)) ** 2 - 1e-12

    def test_kt_inequality(self, rng):
        # phi(x, J^{-1}x*) <= phi(x, J^{-1}(x* - y*)) + 2<J^{-1}x* - x, y*>
        for p in P_GRID:
            sp = LpSpace(4, p)
            for _ in range(200):
                x = rng.standard_normal(4)
                xs = rng.standard_normal(4)
                ys = rng.standard_normal(4)
                jinv_xs = sp.inverse_duality_map(xs)
                lhs = sp.lyapunov(x, jinv_xs)
                rhs = sp.lyapunov(x, sp.inverse_duality_map(xs - ys)) + 2.0 * float(
                    np.dot(jinv_xs - x, ys)
                )
                assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs))


class TestDualConvexCombination:
    def test_endpoints(self, rng):
        sp = LpSpace(4, 3.0)
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        np.testing.assert_array_equal(sp.dual_convex_combination(1.0, x, y), x)
        np.testing.assert_array_equal(sp.dual_convex_combination(0.0, x, y), y)

    def test_p2_is_plain_combination(self, rng):
        sp = LpSpace(4, 2.0)
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        np.testing.assert_allclose(
            sp.dual_convex_combination(0.3, x, y), 0.3 * x + 0.7 * y, rtol=1e-12
        )

    def test_weight_range(self):
        sp = LpSpace(2, 2.0)
        with pytest.raises(ValueError):
            sp.dual_convex_combination(1.5, np.zeros(2), np.ones(2))

    def test_convexity_inequality(self, rng):
        # phi(w, J^{-1}(lam Jx + (1-lam) Jy)) <= lam phi(w,x) + (1-lam) phi(w,y)
        for p in P_GRID:
            sp = LpSpace(4, p)
            for _ in range(200):
                lam = rng.uniform()
                x, y, w = (rng.standard_normal(4) for _ in range(3))
                blend = sp.dual_convex_combination(lam, x, y)
                lhs = sp.lyapunov(w, blend)
                rhs = lam * sp.lyapunov(w, x) + (1 - lam) * sp.lyapunov(w, y)
                assert lhs <= rhs + 1e-9 * max(1.0, rhs)


class TestSampleLevelEquivalence:
    """x_n - y_n -> 0, J x_n - J y_n -> 0 and phi(x_n, y_n) -> 0 travel together."""

    def test_vanishing_gap_vanishing_phi(self, rng):
        sp = LpSpace(4, 3.0)
        base = rng.standard_normal(4) + 2.0
        phis, jgaps = [], []
        for n in range(1, 60):
            xn = base + rng.standard_normal(4) / (10.0 * n)
            yn = base - rng.standard_normal(4) / (10.0 * n)
            phis.append(sp.lyapunov(xn, yn))
            jgaps.append(sp.dual_norm(sp.duality_map(xn) - sp.duality_map(yn)))
        assert phis[-1] < 1e-2 and phis[-1] < phis[0]
        assert jgaps[-1] < 1e-1 and jgaps[-1] < jgaps[0]

    def test_persistent_gap_persistent_phi(self, rng):
        sp = LpSpace(4, 3.0)
        offset = np.array([1.0, 0.0, 0.0, 0.0])
        for n in range(1, 40):
            xn = rng.standard_normal(4)
            yn = xn + offset
            assert sp.lyapunov(xn, yn) > 1e-3
            assert sp.dual_norm(sp.duality_map(xn) - sp.duality_map(yn)) > 1e-3
