from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from adelion import dyadic
from adelion.dyadic import DyadicStepFunction


@st.composite
def step_functions(draw):
    level = draw(st.integers(-2, 4))
    n = draw(st.integers(1, 5))
    pieces = {draw(st.integers(-8, 8)): complex(draw(st.integers(-3, 3)), draw(st.integers(-3, 3))) for _ in range(n)}
    return DyadicStepFunction(level, pieces)


def test_haar_refinement_exact():
    phi = dyadic.real_haar_scaling()
    rhs = dyadic.dilate(phi, 1) + dyadic.translate(dyadic.dilate(phi, 1), Fraction(1, 2))
    assert rhs == phi
    assert rhs.level == phi.level and rhs.pieces == phi.pieces


def test_haar_wavelet_shape():
    psi = dyadic.real_haar_wavelet()
    assert psi(Fraction(1, 4)) == 1 and psi(Fraction(3, 4)) == -1 and psi(1) == 0
    assert dyadic.integrate(psi) == 0
    assert dyadic.l2_norm(psi) == pytest.approx(1)


def test_haar_orthonormal_box():
    fns = [dyadic.real_haar_wavelet(j, n) for j in range(0, 3) for n in range(-2, 3)]
    fns += [dyadic.real_scaling(0, n) for n in range(-2, 3)]
    for i, f in enumerate(fns):
        for k, g in enumerate(fns):
            assert dyadic.inner_product(f, g) == pytest.approx(1.0 if i == k else 0.0, abs=1e-15)


def test_coarsening_and_zero():
    f = DyadicStepFunction(3, {n: 2.0 for n in range(8)})
    assert f.level == 0 and f.pieces == ((0, 2.0),)
    assert dyadic.zero().is_zero()
    assert DyadicStepFunction(5, {}) == dyadic.zero()
    assert (f - f).is_zero()


def test_translate_requires_dyadic_shift():
    with pytest.raises(ValueError):
        dyadic.translate(dyadic.real_haar_scaling(), Fraction(1, 3))


def test_moment_rejects_negative_degree():
    with pytest.raises(ValueError):
        dyadic.moment(dyadic.real_haar_scaling(), -1)


@pytest.mark.parametrize("s, expected", [(0, 0.0), (1, -0.25), (2, -0.25)])
def test_haar_moments(s, expected):
    assert dyadic.moment(dyadic.real_haar_wavelet(), s) == pytest.approx(expected)


@given(step_functions(), st.integers(0, 3))
def test_moment_matches_grid_oracle(f, s):
    assert abs(dyadic.moment(f, s) - oracles.dyadic_moment(f, s, max(f.level, 0) + 2)) < 1e-9


@given(step_functions(), step_functions())
def test_inner_product_and_sum_pointwise(f, g):
    J = max(f.level, g.level, 0) + 1
    h = f + g
    pts = [Fraction(n, 2**J) for n in range(-40 * 2**J, 40 * 2**J, 3)]
    for t in pts[::7]:
        assert h(t) == pytest.approx(f(t) + g(t))
        assert f(t) == pytest.approx(oracles.dyadic_point(f, t))
    assert dyadic.inner_product(f, g) == pytest.approx(dyadic.integrate(dyadic.multiply(f, dyadic.conjugate(g))))


@given(step_functions(), st.integers(-2, 2), st.integers(-8, 8))
def test_dilate_translate_pointwise(f, j, m):
    c = Fraction(m, 4)
    tf, df = dyadic.translate(f, c), dyadic.dilate(f, j)
    for n in range(-20, 20, 3):
        t = Fraction(n, 8)
        assert tf(t + c) == f(t)
        assert df(t / Fraction(2) ** j) == f(t)


@given(step_functions())
def test_json_round_trip(f):
    assert dyadic.from_json(dyadic.to_json(f)) == f
