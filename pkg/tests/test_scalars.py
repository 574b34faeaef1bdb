from hypothesis import given, strategies as st

from sl3inv.scalars import GaussianRational, IMAG, ONE, ZERO, rational


def gr(re_n, re_d, im_n, im_d):
    return GaussianRational(rational(re_n, re_d), rational(im_n, im_d))


small = st.integers(-30, 30)
denom = st.integers(1, 12)
gaussians = st.builds(gr, small, denom, small, denom)


def test_basic_arithmetic():
    a = gr(1, 2, -3, 1)
    b = gr(2, 3, 1, 5)
    assert a + b == gr(7, 6, -14, 5)
    assert a - b + b == a
    assert a * ONE == a
    assert a * ZERO == ZERO
    assert IMAG * IMAG == GaussianRational(-1)


def test_division_and_conjugate():
    a = gr(3, 4, -2, 7)
    assert (a / a) == ONE
    assert a.conjugate().conjugate() == a
    assert (a * a.conjugate()).im == 0


@given(gaussians, gaussians, gaussians)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    assert a + b == b + a
    assert a * b == b * a


@given(gaussians)
def test_json_round_trip(a):
    assert GaussianRational.from_json(a.to_json()) == a


def test_int_coercion_and_repr():
    assert GaussianRational(5) * 3 == GaussianRational(15)
    assert 2 + GaussianRational(1, 1) == GaussianRational(3, 1)
    assert repr(GaussianRational(rational(1, 2))) == "1/2"
    assert complex(GaussianRational(1, -2)) == 1 - 2j
