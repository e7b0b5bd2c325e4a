import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from adelion import dyadic, local
from adelion.adelic import (
    REAL,
    AdelePoint,
    AdelicFunction,
    AdelicIndex,
    AdelicSum,
    NotLizorkin,
    adelic_character,
    adelic_gram,
    adelic_inner,
    adelic_norm,
    adelic_wavelet,
    combination,
    decompose,
    difference_norm,
    evaluate,
    function_from_json,
    function_to_json,
    lizorkin_check,
    mra_family,
    mra_scaling,
    mra_wavelet,
    multi_dilate,
    place_box,
    primes_upto,
    reconstruct,
    refinable,
    scale,
    shift,
    tensor,
    tensor_box,
)
from adelion.padic import Ball, UnitPhase, enumerate_shifts
from adelion.wavelets import gram_deviation, kozyrev
from strategies import rationals


def test_primes_upto():
    assert primes_upto(None) == [] and primes_upto(1) == []
    assert primes_upto(11) == [2, 3, 5, 7, 11]


@pytest.mark.parametrize("r", [Fraction(0), Fraction(7), Fraction(-3, 4), Fraction(5, 6), Fraction(-97, 60)])
def test_character_trivial_on_principal_adeles(r):
    assert adelic_character(AdelePoint.principal(r)) == UnitPhase(0)


def test_real_character_sign():
    # chi_inf(t) = exp(-2 pi i t)
    assert adelic_character(AdelePoint(Fraction(1, 4))).r == Fraction(3, 4)
    assert adelic_character(AdelePoint(0, {2: Fraction(1, 4)})).r == Fraction(1, 4)


@given(rationals(), rationals(), st.dictionaries(st.sampled_from([2, 3, 5]), rationals(), max_size=3))
def test_character_is_a_homomorphism(a, b, fin):
    x = AdelePoint(a, fin)
    y = AdelePoint(b, {p: -v / 3 for p, v in fin.items()})
    s = AdelePoint(a + b, {p: x.coordinate(p) + y.coordinate(p) for p in fin})
    assert adelic_character(s) == adelic_character(x) * adelic_character(y)


def test_point_mode_validation():
    with pytest.raises(ValueError):
        AdelePoint(0, {}, "other")
    assert AdelePoint.principal(Fraction(1, 6)).nonintegral_primes() == [2, 3]


def test_omega_factors_are_dropped():
    f = AdelicFunction(None, {2: kozyrev(2, 1), 3: local.omega(3), 5: local.omega(5)})
    assert list(f.factors) == [2] and f.P == 2
    assert f.factor(7) == local.omega(7)
    assert refinable(False).P is None
    with pytest.raises(ValueError):
        AdelicFunction(None, {3: local.omega(2)})
    with pytest.raises(ValueError):
        tensor(None, {5: kozyrev(5, 1)}, P=3)


def test_evaluate_refinable_at_principal_points():
    phi = refinable(True)
    assert evaluate(phi, AdelePoint.principal(0)) == 1
    assert evaluate(phi, AdelePoint.principal(Fraction(1, 2))) == 0
    assert evaluate(phi, AdelePoint(Fraction(1, 2))) == 1


def test_shift_and_dilate_conventions():
    f = AdelicFunction(dyadic.real_haar_wavelet(), {3: kozyrev(3, 1)})
    g = shift(f, {REAL: 1, 3: Fraction(1, 3)})
    x = AdelePoint(Fraction(5, 4), {3: Fraction(1, 3)})
    assert evaluate(g, x) == pytest.approx(evaluate(f, AdelePoint(Fraction(1, 4), {3: 0})))
    # literal multi-dilation: p^{-j/2} f(p^j x) and 2^{-j/2} f(2^{-j} x)
    d = multi_dilate(f, {3: 1, REAL: 1})
    assert evaluate(d, AdelePoint(Fraction(1, 2), {3: Fraction(1, 3)})) == pytest.approx(
        3**-0.5 * 2**-0.5 * evaluate(f, AdelePoint(Fraction(1, 4), {3: 1}))
    )
    assert adelic_norm(d) == pytest.approx(1)


@pytest.mark.parametrize(
    "a, exc",
    [({REAL: Fraction(1, 2)}, ValueError), ({2: Fraction(3, 2)}, ValueError), ({4: 0}, ValueError)],
)
def test_shift_validation(a, exc):
    with pytest.raises(exc):
        shift(refinable(True), a)


def test_finite_adele_functions_reject_real_operations():
    with pytest.raises(ValueError):
        shift(refinable(False), {REAL: 1})
    with pytest.raises(ValueError):
        multi_dilate(refinable(False), {REAL: 1})
    with pytest.raises(ValueError):
        adelic_inner(refinable(False), refinable(True))


def test_inner_product_against_place_oracles():
    rng = random.Random(3)
    for _ in range(20):
        fs = []
        for _ in range(2):
            factors = {}
            for p in (2, 3):
                j = rng.randint(-1, 1)
                a = rng.choice(enumerate_shifts(p, 1))
                factors[p] = local.scale(kozyrev(p, rng.randint(1, p - 1), j, a), complex(rng.random(), rng.random()))
            fs.append(AdelicFunction(None, factors))
        f, g = fs
        expected = oracles.inner(f.factor(2), g.factor(2)) * oracles.inner(f.factor(3), g.factor(3))
        assert abs(adelic_inner(f, g) - expected) < 1e-12


def test_sums_are_bilinear():
    a = AdelicFunction(None, {2: kozyrev(2, 1)})
    b = AdelicFunction(None, {3: kozyrev(3, 2, 1, Fraction(1, 3))})
    s = combination([2, 1j], [a, b])
    assert adelic_inner(s, s) == pytest.approx(5)
    assert adelic_inner(s, a) == pytest.approx(2)
    assert scale(a, 1) is a


def test_difference_norm_matches_expanded_formula():
    rng = np.random.default_rng(2)
    for _ in range(10):
        f = AdelicFunction(dyadic.real_haar_wavelet(0, int(rng.integers(0, 2))), {2: kozyrev(2, 1, int(rng.integers(0, 2))), 3: kozyrev(3, 1)})
        g = scale(f, 1 + 0.1 * rng.standard_normal())
        g = AdelicFunction(g.real, {**g.factors, 3: kozyrev(3, int(rng.integers(1, 3)))})
        want = adelic_inner(f, f) + adelic_inner(g, g) - 2 * adelic_inner(f, g).real
        assert difference_norm(f, g) == pytest.approx(max(want.real, 0) ** 0.5, abs=1e-12)
    assert difference_norm(f, f) == 0


def test_index_validation_and_json():
    i = AdelicIndex.make(k={2: 1, 3: 0}, j={2: 1, REAL: -1}, a={3: Fraction(2, 3), REAL: 4}, real=True)
    assert i.m == 3 and i.entry(5) == (0, 0, 0)
    assert i.has_scaling_factor()
    assert AdelicIndex.from_json(i.to_json()) == i
    assert not AdelicIndex.make(k={2: 1, 3: 2}).has_scaling_factor()
    assert AdelicIndex.make(k={2: 0}).m is None
    for bad in (
        dict(k={2: 2}),
        dict(k={2: 0}, j={2: 1}),
        dict(k={2: 1}, j={2: -1}),
        dict(a={3: Fraction(1, 2)}),
        dict(j={REAL: 1}),
        dict(k={5: 1}, m=3),
    ):
        with pytest.raises(ValueError):
            AdelicIndex.make(**bad)


def test_tensor_box_orthonormal_small():
    idx = tensor_box([2, 3], [-1, 0, 1], 1, real_j=[0, 1], real_n=[0], real=True)
    assert len(idx) == len(set(idx))
    G = adelic_gram([adelic_wavelet(i) for i in idx])
    assert gram_deviation(G) < 1e-12


def test_adelic_gram_matches_pairwise_inner():
    fns = [adelic_wavelet(i) for i in tensor_box([2, 3], [0], 1)][:12]
    G = adelic_gram(fns)
    for i in range(len(fns)):
        for j in range(len(fns)):
            assert abs(G[i, j] - adelic_inner(fns[i], fns[j])) < 1e-14


@pytest.mark.parametrize("top, real", [(2, True), (3, False), (3, True)])
def test_mra_family_orthonormal(top, real):
    fns = mra_family(top, [0], 1, real=real)
    assert gram_deviation(adelic_gram(fns)) < 1e-12


def test_mra_refinement_containment():
    # the V_0 generator lies in V_1: its level-1 scaling coefficients carry all of its norm
    phi = mra_scaling(0, {}, 3, real=True)
    parts = [mra_scaling(1, {REAL: n, 2: a, 3: b}, 3, real=True) for n in (0, 1) for a in enumerate_shifts(2, 1) for b in enumerate_shifts(3, 1)]
    coeffs = [adelic_inner(phi, q) for q in parts]
    assert sum(abs(c) ** 2 for c in coeffs) == pytest.approx(1, abs=1e-14)
    assert difference_norm(phi, phi) == 0
    assert adelic_norm(AdelicSum(tuple(scale(q, c) for q, c in zip(parts, coeffs)))) == pytest.approx(1, abs=1e-14)


def test_mra_wavelet_validation():
    with pytest.raises(ValueError):
        mra_wavelet({}, {REAL: 1, 2: 1}, 0, {}, 2)
    with pytest.raises(ValueError):
        mra_wavelet({}, {REAL: 2}, 0, {}, 2)
    with pytest.raises(ValueError):
        mra_wavelet({}, {REAL: 3, 2: 2}, 0, {}, 2)


def test_lizorkin_examples():
    rep = lizorkin_check(refinable(False))
    assert not rep.ok and rep.failing_place() == 2 and rep.places[2][1] == 1
    w = adelic_wavelet(AdelicIndex.make(k={2: 1, 3: 1}, a={2: Fraction(1, 2)}))
    rep = lizorkin_check(w)
    assert rep.places[2][0] and rep.places[3][0] and rep.ok
    # a scaling factor at 2 leaves a nonzero integral over x_2
    half = adelic_wavelet(AdelicIndex.make(k={2: 0, 3: 1}, a={2: Fraction(1, 2)}))
    assert lizorkin_check(half).failing_place() == 2
    real = lizorkin_check(AdelicFunction(dyadic.real_haar_wavelet(), {2: kozyrev(2, 1)}), real_moment_max=1)
    assert real.finite_ok and not real.real_ok and real.failing_place() == REAL


def test_lizorkin_sum_uses_marginal():
    # two half-ball pieces at place 2 cancel in the integral over x_2
    a = AdelicFunction(None, {2: local.indicator(Ball(2, 0, -1))})
    b = AdelicFunction(None, {2: local.scale(local.indicator(Ball(2, 1, -1)), -1)})
    assert lizorkin_check(AdelicSum((a, b))).ok
    # different companions at place 3 stop the cancellation
    c = AdelicFunction(None, {2: b.factors[2], 3: local.indicator(Ball(3, 0, -1))})
    assert not lizorkin_check(AdelicSum((a, c))).ok


def test_place_box_contains_kozyrev_index():
    f = kozyrev(3, 2, 1, Fraction(1, 3))
    box = place_box(f)
    assert (2, 1, Fraction(1, 3)) in box
    assert place_box(local.zero(3)) == []


def test_decompose_single_wavelet():
    i = AdelicIndex.make(k={2: 1, 3: 2}, j={2: 1}, a={3: Fraction(1, 3)})
    d = decompose(adelic_wavelet(i), certify=True)
    assert set(d.coefficients) == {i}
    assert d.coefficients[i] == pytest.approx(1)
    assert d.residual < 1e-12 and d.certified and d.max_outside < 1e-12


def test_decompose_errors():
    with pytest.raises(NotLizorkin) as e:
        decompose(refinable(False))
    assert e.value.place == 2
    with pytest.raises(ValueError):
        decompose(AdelicFunction(dyadic.real_haar_wavelet(), {2: kozyrev(2, 1)}))


def test_decompose_round_trip_random():
    rng = random.Random(17)
    idx = tensor_box([2, 3], [0, 1], 1)
    idx = [i for i in idx if not i.has_scaling_factor()]
    for _ in range(3):
        chosen = sorted(rng.sample(idx, 4))
        coeffs = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in chosen]
        zeta = combination(coeffs, [adelic_wavelet(i) for i in chosen])
        d = decompose(zeta, certify=True)
        for i, c in zip(chosen, coeffs):
            assert abs(d.coefficients.get(i, 0) - c) < 1e-12
        assert d.residual < 1e-12 and d.certified
        assert difference_norm(reconstruct(d.coefficients), zeta) < 1e-12


def test_json_round_trip():
    f = AdelicFunction(dyadic.real_haar_wavelet(1, 2), {2: kozyrev(2, 1, 1), 5: kozyrev(5, 3)})
    g = function_from_json(function_to_json(f))
    assert g.factors == f.factors and g.real == f.real
    s = AdelicSum((f, scale(f, 2j)))
    t = function_from_json(function_to_json(s))
    assert isinstance(t, AdelicSum) and len(t.terms) == 2
    assert adelic_inner(t, t) == pytest.approx(adelic_inner(s, s))
