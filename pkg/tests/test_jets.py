import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sasaklab import jets
from sasaklab.jets import Dual, Jet2, d_scalar, d_vector, enter_level, exit_level, imag, jsqrt, value

finite = st.floats(min_value=-10, max_value=10, allow_nan=False)
nonzero = st.floats(min_value=0.1, max_value=10).map(lambda x: x)


def poly(c0, c1, c2):
    return lambda t: c0 + c1 * t + c2 * t * t


class TestJet2:
    def test_degree_two_taylor_is_exact(self):
        f = poly(3.0, -2.0, 5.0)
        j = f(Jet2(1.5, 1.0, 0.0))
        assert j.value == 3.0 - 2.0 * 1.5 + 5.0 * 1.5**2
        assert j.d1 == -2.0 + 10.0 * 1.5
        assert j.d2 == 10.0

    @given(a=finite, b=finite, c=finite, d=finite, e=finite, f=finite, t=finite)
    @settings(max_examples=50, deadline=None)
    def test_leibniz_rule_exact(self, a, b, c, d, e, f, t):
        p, q = poly(a, b, c), poly(d, e, f)
        x = Jet2(t, 1.0, 0.0)
        prod = p(x) * q(x)
        # (pq)' and (pq)'' of polynomials are exactly representable
        full = poly(a, b, c)(x) * poly(d, e, f)(x)
        pq1 = (b + 2 * c * t) * (d + e * t + f * t * t) + (a + b * t + c * t * t) * (e + 2 * f * t)
        assert prod.d1 == pytest.approx(pq1, abs=1e-9, rel=1e-12)
        assert full.d2 == prod.d2

    def test_division_roundtrip(self):
        x = Jet2(2.0, 1.0, 0.0)
        num = x * x + 1.0
        back = (num / x) * x
        assert back.value == pytest.approx(num.value, rel=1e-15)
        assert back.d1 == pytest.approx(num.d1, rel=1e-14)
        assert back.d2 == pytest.approx(num.d2, rel=1e-14)

    def test_sqrt_second_derivative(self):
        # d^2/dt^2 sqrt(4 + 2t + t^2)|_0 against the hand expansion
        j = (Jet2(0.0, 1.0, 0.0) * Jet2(0.0, 1.0, 0.0) + 2.0 * Jet2(0.0, 1.0, 0.0) + 4.0).sqrt()
        assert j.value == 2.0
        assert j.d1 == pytest.approx(0.5)
        assert j.d2 == pytest.approx((2.0 - 2.0 * 0.25) / 4.0)


class TestDualTower:
    def test_first_derivative(self):
        d = d_scalar(lambda v: v[0] * v[0] * v[0], [2.0], [1.0])
        assert d == pytest.approx(12.0, rel=1e-14)

    def test_mixed_partial_via_nesting(self):
        # f(x, y) = x^2 y + y^3, d2f/dxdy at (3, 5) = 2x = 6
        f = lambda v: v[0] * v[0] * v[1] + v[1] * v[1] * v[1]
        mixed = d_scalar(lambda q: d_scalar(f, q, [0.0, 1.0]), [3.0, 5.0], [1.0, 0.0])
        assert mixed == pytest.approx(6.0, rel=1e-14)

    def test_triple_nesting(self):
        # f = x y z: d3f/dxdydz = 1 exactly
        f = lambda v: v[0] * v[1] * v[2]
        g = lambda q: d_scalar(f, q, [0.0, 0.0, 1.0])
        h = lambda q: d_scalar(g, q, [0.0, 1.0, 0.0])
        assert d_scalar(h, [1.1, 2.2, 3.3], [1.0, 0.0, 0.0]) == pytest.approx(1.0, rel=1e-13)

    def test_same_direction_pair_matches_second_derivative(self):
        # two equal perturbations: the mixed coefficient is f''
        f = lambda v: v[0] * v[0] * v[0]
        mixed = d_scalar(lambda q: d_scalar(f, q, [1.0]), [2.0], [1.0])
        assert mixed == pytest.approx(12.0, rel=1e-14)

    def test_division_and_sqrt(self):
        f = lambda v: jsqrt(v[0] * v[0] + v[1] * v[1]) / v[1]
        x, y = 3.0, 4.0
        d = d_scalar(f, [x, y], [1.0, 0.0])
        r = math.hypot(x, y)
        assert d == pytest.approx((x / r) / y, rel=1e-13)

    def test_vector_field_derivative(self):
        field = lambda q: [q[0] * q[1], q[1] * q[1]]
        d = d_vector(field, [2.0, 3.0], [1.0, 1.0])
        assert d[0] == pytest.approx(5.0)
        assert d[1] == pytest.approx(6.0)

    def test_value_strips_all_structure(self):
        lvl = enter_level()
        try:
            x = Dual(lvl, Dual(lvl - 1, 2.0, 1.0) if lvl > 1 else 2.0, 1.0)
        finally:
            exit_level()
        assert value(x) == 2.0

    def test_imag_of_constant_is_zero(self):
        lvl = enter_level()
        try:
            assert imag(7.5, lvl) == 0.0
        finally:
            exit_level()

    @given(x=nonzero, v=finite)
    @settings(max_examples=30, deadline=None)
    def test_derivative_of_inverse(self, x, v):
        d = d_scalar(lambda q: 1.0 / q[0], [x], [v])
        assert d == pytest.approx(-v / (x * x), rel=1e-12, abs=1e-12)


def test_backend_is_reported():
    assert jets.BACKEND in ("python", "compiled")
