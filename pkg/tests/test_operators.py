import cmath
import math
import random
from fractions import Fraction

import pytest

import oracles
from adelion import dyadic, local
from adelion.adelic import (
    AdelicFunction,
    AdelicIndex,
    AdelicSum,
    NotLizorkin,
    adelic_norm,
    adelic_wavelet,
    combination,
    difference_norm,
    lizorkin_check,
    refinable,
)
from adelion.operators import (
    PowerNorm,
    Symbol,
    SymbolDomain,
    Tabulated,
    apply_place,
    apply_symbol,
    eigen_check,
    eigenvalue,
    fractional,
    fractional_apply,
    negate,
    real_power_symbol,
    sum_of_gammas,
    symbol_from_json,
    symbol_to_json,
    uniform,
    verify_eigenrelation,
)
from adelion.padic import Ball, enumerate_shifts
from adelion.wavelets import kozyrev

COUNTER = Tabulated(((Ball(2, Fraction(1, 2), -1), 1), (Ball(2, Fraction(3, 2), -1), 3)), 1)


def power_oracle(g, gamma, x):
    """(D^gamma g)(x) as a point sum of chi(-x xi) |xi|^gamma F[g](xi)."""
    p = g.p
    x = Fraction(x)
    grid_from = local.fourier(g)  # only fixes where and how finely to sample
    v = oracles.val(x, p)
    pts, w = oracles._grid([grid_from], p, None if v == math.inf else int(v))
    acc = 0j
    for xi in pts:
        F = oracles.fourier_point(g, xi)
        if F == 0:
            continue
        norm = float(p) ** (-oracles.val(xi, p))
        acc += oracles.chi(-x * xi, p) * norm**gamma * F
    return acc * w


def random_lizorkin(rng, p, n=3):
    fs = []
    for _ in range(n):
        k = rng.randint(1, p - 1)
        j = rng.randint(-1, 1)
        a = rng.choice(enumerate_shifts(p, 1))
        fs.append(local.scale(kozyrev(p, k, j, a), complex(rng.uniform(-1, 1), rng.uniform(-1, 1))))
    return local.add(*fs)


@pytest.mark.parametrize("gamma, p, v, expected", [(1, 2, -3, 8), (0.5, 2, -2, 2), (2, 3, 1, 1 / 9), (0, 5, 4, 1)])
def test_power_norm_values(gamma, p, v, expected):
    assert PowerNorm(gamma).at_valuation(p, v) == pytest.approx(expected)


def test_power_norm_complex_exponent():
    assert PowerNorm(1 + 1j).at_valuation(3, -2) == pytest.approx(cmath.exp((1 + 1j) * 2 * math.log(3)))


def test_tabulated_validation():
    with pytest.raises(ValueError):
        Tabulated(((Ball(2, 0, 0), 1), (Ball(2, 0, -1), 2)), 0)
    with pytest.raises(ValueError):
        Tabulated(((Ball(2, 0, 0), 1), (Ball(3, 1, 0), 2)), 0)
    assert COUNTER.at(Fraction(3, 2)) == 3
    with pytest.raises(SymbolDomain):
        COUNTER.at(0)


def test_symbol_validation_and_places():
    with pytest.raises(ValueError):
        Symbol({5: PowerNorm(1)}, 3)
    with pytest.raises(ValueError):
        Symbol({}, 4)
    with pytest.raises(ValueError):
        Symbol({3: COUNTER}, 3)
    A = fractional({3: 2})
    assert A.m == 3
    assert A.place(2) == PowerNorm(0) and A.place(3) == PowerNorm(2) and A.place(5) is None
    assert uniform(1, 5).place(5) == PowerNorm(1)


def test_real_power_symbol():
    assert real_power_symbol(-4.0, 0.5) == pytest.approx(2)
    with pytest.raises(ValueError):
        real_power_symbol(0.0, 1)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("gamma", [-1, 0.5, 2, 1 + 1j])
def test_kozyrev_is_eigenfunction_at_one_place(p, gamma):
    for j in (-1, 0, 2):
        for a in enumerate_shifts(p, 1):
            psi = kozyrev(p, 1, j, a)
            out = apply_place(psi, PowerNorm(gamma))
            lam = cmath.exp(gamma * (j + 1) * math.log(p))
            assert local.max_deviation(out, local.scale(psi, lam)) < 1e-12 * max(1, abs(lam))


@pytest.mark.parametrize("p, gamma", [(2, 1), (3, 0.5), (2, -1)])
def test_apply_place_matches_point_sum_oracle(p, gamma):
    rng = random.Random(p * 10 + int(gamma * 2))
    for _ in range(3):
        g = random_lizorkin(rng, p, 2)
        out = apply_place(g, PowerNorm(gamma))
        xs = sorted({t.ball.center for t in g.terms} | {t.ball.center + Fraction(1, p) for t in g.terms})[:6]
        for x in xs:
            assert abs(out(x) - power_oracle(g, gamma, x)) < 1e-9


def test_non_lizorkin_input_raises():
    with pytest.raises(NotLizorkin) as e:
        apply_place(local.omega(3), PowerNorm(1))
    assert e.value.place == 3
    with pytest.raises(NotLizorkin):
        apply_symbol(refinable(False), fractional({2: 1}))
    with pytest.raises(ValueError):
        apply_symbol(AdelicFunction(dyadic.real_haar_wavelet(), {2: kozyrev(2, 1)}), fractional({2: 1}))


def test_tabulated_domain_error():
    with pytest.raises(SymbolDomain):
        apply_place(kozyrev(2, 1, 1, 0), COUNTER)


def test_omega_multiplier_beyond_m():
    # F[psi_{k;ja}] lives on |xi| = p^{j+1}: killed for j >= 0, kept for j <= -1
    assert apply_place(kozyrev(3, 1, 0, 0), None).is_zero()
    psi = kozyrev(3, 2, -2, Fraction(1, 3))
    assert local.max_deviation(apply_place(psi, None), psi) < 1e-14


def test_fractional_identity_at_unlisted_places():
    f = AdelicFunction(None, {2: kozyrev(2, 1), 3: kozyrev(3, 1), 5: kozyrev(5, 2, 1, Fraction(1, 5))})
    g = fractional_apply(f, {2: 1})
    assert local.max_deviation(g.factor(2), local.scale(f.factor(2), 2)) < 1e-14
    for p in (3, 5):
        assert local.max_deviation(g.factor(p), f.factor(p)) < 1e-14
    # an Omega factor below P is not Lizorkin
    with pytest.raises(NotLizorkin):
        fractional_apply(AdelicFunction(None, {2: kozyrev(2, 1), 5: kozyrev(5, 1)}), {2: 1})


@pytest.mark.parametrize("seed", range(8))
def test_group_law(seed):
    rng = random.Random(seed)
    f = AdelicFunction(None, {2: random_lizorkin(rng, 2), 3: random_lizorkin(rng, 3)})
    choices = [-1, 0.5, 1, 2, 1 + 1j]
    g = {2: rng.choice(choices), 3: rng.choice(choices)}
    b = {2: rng.choice(choices), 3: rng.choice(choices)}
    lhs = fractional_apply(fractional_apply(f, b), g)
    rhs = fractional_apply(f, sum_of_gammas(g, b))
    assert difference_norm(lhs, rhs) < 1e-12 * max(1, adelic_norm(rhs))
    back = fractional_apply(fractional_apply(f, g), negate(g))
    assert difference_norm(back, f) < 1e-12 * adelic_norm(f)
    assert lizorkin_check(lhs).ok


def test_apply_on_sums_is_linear():
    a = AdelicFunction(None, {2: kozyrev(2, 1)})
    b = AdelicFunction(None, {2: kozyrev(2, 1, 2), 3: kozyrev(3, 2, 1, Fraction(1, 3))})
    s = combination([1, 2j], [a, b])
    out = apply_symbol(s, uniform(1, 3))
    assert isinstance(out, AdelicSum)
    want = combination([2, 2j * 8 * 9], [a, b])
    assert difference_norm(out, want) < 1e-12


@pytest.mark.parametrize("gamma", [-1, 0.5, 1, 2, 1 + 1j])
def test_eigen_power_norm(gamma):
    alpha = AdelicIndex.make(k={2: 1, 3: 2}, j={2: 1, 3: 0}, a={3: Fraction(1, 3)})
    A = fractional({2: gamma, 3: gamma})
    res = eigen_check(A, alpha)
    lam = cmath.exp(gamma * (2 * math.log(2) + math.log(3)))
    assert res.is_eigen
    assert abs(res.eigenvalue - lam) < 1e-12 * abs(lam)
    assert verify_eigenrelation(A, alpha) < 1e-12


def test_eigen_omega_place_gives_zero():
    alpha = AdelicIndex.make(k={2: 1, 3: 1})
    A = fractional({2: 1}, m=2)
    res = eigen_check(A, alpha)
    assert res.is_eigen and res.eigenvalue == 0
    assert verify_eigenrelation(A, alpha) < 1e-12


def test_tabulated_counterexample():
    A = Symbol({2: COUNTER}, 2)
    alpha = AdelicIndex.make(k={2: 1})
    res = eigen_check(A, alpha)
    assert not res.is_eigen and res.eigenvalue == 3
    assert verify_eigenrelation(A, alpha) > 0.1


def test_tabulated_constant_on_sphere_is_eigen():
    A = Symbol({2: Tabulated(((Ball(2, Fraction(1, 2), 0), 5), (Ball(2, Fraction(1, 4), -2), 7)), 0)}, 2)
    alpha = AdelicIndex.make(k={2: 1})
    res = eigen_check(A, alpha)
    assert res.is_eigen and res.eigenvalue == 5
    assert verify_eigenrelation(A, alpha) < 1e-12


def test_tabulated_declared_constancy_is_checked():
    A = Symbol({2: COUNTER}, 2)
    bad = Symbol({2: Tabulated(COUNTER.pieces, 0)}, 2)
    eigen_check(A, AdelicIndex.make(k={2: 1}))
    with pytest.raises(ValueError):
        eigen_check(bad, AdelicIndex.make(k={2: 1}))


@pytest.mark.parametrize(
    "alpha",
    [
        AdelicIndex.make(k={2: 1}, real=True),
        AdelicIndex.make(k={3: 0}, a={3: Fraction(1, 3)}),
        AdelicIndex.make(k={3: 1}),
    ],
)
def test_eigen_index_validation(alpha):
    # real index, no wavelet factor, and a scaling factor at 2 below m = 3
    with pytest.raises(ValueError):
        eigenvalue(fractional({2: 1}), alpha)


def test_symbol_json_round_trip():
    A = Symbol({2: COUNTER, 3: PowerNorm(1 + 1j)}, 5)
    assert symbol_from_json(symbol_to_json(A)) == A
    with pytest.raises(ValueError):
        symbol_from_json({"m": 2, "places": {"2": {"kind": "spline"}}})


def test_gamma_helpers():
    assert sum_of_gammas({2: 1}, {3: 2, 2: 1j}) == {2: 1 + 1j, 3: 2}
    assert negate({5: 1 - 2j}) == {5: -1 + 2j}
