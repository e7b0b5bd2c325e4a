"""Pseudo-differential operators on the finite adeles as exact Fourier multipliers.

A symbol acts on an elementary term with finiteness parameter P through its
truncation: the place symbol A_p at primes p <= P, the identity beyond.  Places
up to ``m`` without an explicit entry carry |xi|^0; places beyond ``m`` carry
Omega(|xi_p|_p).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from . import local
from .adelic import (
    AdelicFunction,
    AdelicIndex,
    AdelicSum,
    AnyAdelic,
    NotLizorkin,
    adelic_norm,
    adelic_wavelet,
    difference_norm,
    primes_upto,
    terms_of,
)
from .local import CharBallTerm, LocalFunction
from .padic import (
    Ball,
    BallRelation,
    Scalar,
    as_fraction,
    ball_from_json,
    ball_relation,
    ball_to_json,
    check_prime,
    valuation,
)


class SymbolDomain(ValueError):
    """A tabulated symbol was asked for a value outside its pieces."""


@dataclass(frozen=True)
class PowerNorm:
    """|xi|_p^gamma for xi != 0."""

    gamma: complex

    def at_valuation(self, p: int, v: int) -> complex:
        """Value on the sphere |xi|_p = p^{-v}."""
        g = complex(self.gamma)
        if g.imag == 0:
            x = g.real * -v
            if x == int(x):
                n = int(x)
                return complex(float(p**n) if n >= 0 else 1 / float(p ** (-n)))
            return complex(float(p) ** x)
        return cmath.exp(-v * g * math.log(p))


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-constant values on disjoint balls; constant on radius p^{-M} balls away from 0."""

    pieces: tuple[tuple[Ball, complex], ...]
    M: int

    def __post_init__(self):
        pieces = tuple(sorted(((b, complex(c)) for b, c in self.pieces), key=lambda bc: bc[0]))
        for i, (b, _) in enumerate(pieces):
            for c, _ in pieces[i + 1 :]:
                if b.p != c.p:
                    raise ValueError("pieces at different places")
                if ball_relation(b, c) != BallRelation.DISJOINT:
                    raise ValueError("tabulated pieces must be disjoint")
        object.__setattr__(self, "pieces", pieces)

    def at(self, xi: Scalar) -> complex:
        xi = as_fraction(xi)
        for b, c in self.pieces:
            if b.contains(xi):
                return c
        raise SymbolDomain(f"symbol undefined at {xi}")


PlaceSymbol = Union[PowerNorm, Tabulated]


@dataclass(frozen=True)
class Symbol:
    per_place: Mapping[int, PlaceSymbol]
    m: int

    def __post_init__(self):
        check_prime(self.m)
        for p, s in self.per_place.items():
            check_prime(p)
            if p > self.m:
                raise ValueError(f"place {p} lies beyond m = {self.m}")
            if isinstance(s, Tabulated) and any(b.p != p for b, _ in s.pieces):
                raise ValueError(f"tabulated pieces for {p} live elsewhere")
        object.__setattr__(self, "per_place", dict(sorted(self.per_place.items())))

    def place(self, p: int) -> PlaceSymbol | None:
        """The symbol at p; None stands for the Omega multiplier beyond m."""
        if p > self.m:
            return None
        return self.per_place.get(p, PowerNorm(0))


def fractional(gammas: Mapping[int, complex], m: int | None = None) -> Symbol:
    """|xi'|^gamma-hat, with gamma_p = 0 at unlisted places up to m."""
    top = max([2, *gammas] + ([m] if m else []))
    return Symbol({p: PowerNorm(complex(g)) for p, g in gammas.items()}, top)


def uniform(gamma: complex, m: int) -> Symbol:
    return Symbol({p: PowerNorm(complex(gamma)) for p in primes_upto(m)}, m)


def real_power_symbol(xi: float, gamma: complex) -> complex:
    """|xi_inf|^gamma at the real place (formula only; no operator is built on it)."""
    if xi == 0:
        raise ValueError("undefined at 0")
    return cmath.exp(complex(gamma) * math.log(abs(xi)))


# per-place multiplier


def _resolve(sym: PlaceSymbol, t: CharBallTerm) -> list[tuple[CharBallTerm, complex]]:
    """Split t until the symbol is constant on each piece; pair pieces with values."""
    p = t.p
    if isinstance(sym, PowerNorm):
        return [(t, sym.at_valuation(p, valuation(t.ball.center, p)))]
    out = []
    stack = [t]
    while stack:
        s = stack.pop()
        value = None
        straddles = False
        for b, c in sym.pieces:
            rel = ball_relation(s.ball, b)
            if rel in (BallRelation.EQUAL, BallRelation.FIRST_INSIDE_SECOND):
                value = c
                break
            if rel == BallRelation.SECOND_INSIDE_FIRST:
                straddles = True
        if value is not None:
            out.append((s, value))
        elif straddles:
            stack.extend(s.split())
        else:
            raise SymbolDomain(f"symbol undefined on {s.ball}")
    return out


def apply_place(g: LocalFunction, sym: PlaceSymbol | None) -> LocalFunction:
    """F^{-1}[A_p F[g]] for one factor."""
    p = g.p
    h = local.fourier(g)
    if sym is None:
        return local.inverse_fourier(local.multiply(h, local.omega(p, h.tol)))
    terms = []
    pieces = []
    for t in h.terms:
        if t.ball.contains(0):
            raise NotLizorkin(p, t.coefficient)
        res = _resolve(sym, t)
        pieces.append(res)
        for s, c in res:
            terms.append(CharBallTerm(s.amp * c, s.phase, s.freq, s.ball))
    # when F maps terms of g one-to-one onto constant pieces, scale g directly
    # and skip the p^gamma round trip
    by_ball = {s.ball: c for res in pieces if len(res) == 1 for s, c in res}
    if len(by_ball) == len(g.terms) == len(h.terms):
        direct = []
        for t in g.terms:
            c = by_ball.get(Ball(p, -t.freq, -t.ball.gamma))
            if c is None:
                break
            direct.append(CharBallTerm(t.amp * c, t.phase, t.freq, t.ball))
        else:
            return LocalFunction(p, direct, g.tol)
    return local.inverse_fourier(LocalFunction(p, terms, h.tol))


def _apply_term(t: AdelicFunction, A: Symbol) -> AdelicFunction:
    if t.real is not None:
        raise ValueError("operators act on functions on the finite adeles")
    factors = {}
    for p in primes_upto(t.P or 2):
        factors[p] = apply_place(t.factor(p), A.place(p))
    return AdelicFunction(None, factors)


def apply_symbol(f: AnyAdelic, A: Symbol) -> AnyAdelic:
    """A f = F^{-1} A F f, term by term."""
    if isinstance(f, AdelicFunction):
        return _apply_term(f, A)
    out = []
    for t in terms_of(f):
        g = _apply_term(t, A)
        if not any(h.is_zero() for h in g.factors.values()):
            out.append(g)
    return AdelicSum(tuple(out))


def fractional_apply(f: AnyAdelic, gammas: Mapping[int, complex]) -> AnyAdelic:
    """D^gamma-hat f, identity at places of f that gamma-hat does not list."""
    top = max([t.P or 2 for t in terms_of(f)] + list(gammas))
    return apply_symbol(f, fractional(gammas, top))


# eigenfunctions


@dataclass(frozen=True)
class EigenResult:
    is_eigen: bool
    eigenvalue: complex
    place_values: dict


def _place_point(q: int, k: int, j: int) -> Fraction:
    return Fraction(-k, q ** (j + 1))


def _sphere_values(sym: PlaceSymbol | None, q: int, k: int, j: int) -> set[complex]:
    """Values of A_q on q^{-j}(-k/q + Z_q), one per coset of q^M Z_q."""
    if sym is None:
        return {0j}
    if isinstance(sym, PowerNorm):
        return {sym.at_valuation(q, -(j + 1))}
    xi0 = _place_point(q, k, j)
    M = sym.M
    n = max(j + M, 0)
    step = Fraction(q) ** (-j)
    extra = Fraction(q) ** M
    out = set()
    for t in range(q**n):
        xi = xi0 + t * step
        c = sym.at(xi)
        if sym.at(xi + extra) != c:
            raise ValueError(f"declared constancy exponent {M} violated at place {q}")
        out.add(c)
    return out


def _check_index(alpha: AdelicIndex):
    if alpha.real:
        raise ValueError("eigenfunctions are considered on the finite adeles")
    if alpha.m is None:
        raise ValueError("the index carries no wavelet factor")
    if alpha.has_scaling_factor():
        raise ValueError("index has a pure scaling factor at a place up to m")


def eigenvalue(A: Symbol, alpha: AdelicIndex) -> tuple[complex, dict]:
    """lambda = prod_q A_q(-q^{-j_q-1} k_q), with the per-place factors."""
    _check_index(alpha)
    parts = {}
    for q in primes_upto(alpha.m):
        k, j, _ = alpha.entry(q)
        sym = A.place(q)
        if sym is None:
            parts[q] = 0j
        elif isinstance(sym, PowerNorm):
            parts[q] = sym.at_valuation(q, -(j + 1))
        else:
            parts[q] = sym.at(_place_point(q, k, j))
    lam = 1 + 0j
    for v in parts.values():
        lam *= v
    return lam, parts


def eigen_check(A: Symbol, alpha: AdelicIndex) -> EigenResult:
    """Whether Psi~_alpha is an eigenfunction of A, by the sphere criterion."""
    lam, parts = eigenvalue(A, alpha)
    vals = {}
    for q in primes_upto(alpha.m):
        k, j, _ = alpha.entry(q)
        vals[q] = _sphere_values(A.place(q), q, k, j)
    if any(v == {0j} for v in vals.values()):
        ok = True
    else:
        ok = all(len(v) == 1 for v in vals.values())
    return EigenResult(ok, lam, parts)


def verify_eigenrelation(A: Symbol, alpha: AdelicIndex) -> float:
    """||A Psi - lambda Psi|| / ||Psi||."""
    _, parts = eigenvalue(A, alpha)
    psi = adelic_wavelet(alpha)
    out = apply_symbol(psi, A)
    target = AdelicFunction(None, {q: local.scale(psi.factor(q), parts[q]) for q in primes_upto(alpha.m)})
    return difference_norm(out, target) / adelic_norm(psi)


# JSON


def _complex_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def symbol_to_json(A: Symbol) -> dict:
    places = {}
    for p, s in A.per_place.items():
        if isinstance(s, PowerNorm):
            places[str(p)] = {"kind": "power", "gamma": _complex_json(s.gamma)}
        else:
            places[str(p)] = {
                "kind": "table",
                "pieces": [{"ball": ball_to_json(b), "value": _complex_json(c)} for b, c in s.pieces],
                "M": s.M,
            }
    return {"m": A.m, "places": places}


def _complex_from_json(x) -> complex:
    if isinstance(x, (list, tuple)):
        re, im = x
        return complex(float(re), float(im))
    return complex(x)


def symbol_from_json(obj: Mapping) -> Symbol:
    per = {}
    for key, s in obj.get("places", {}).items():
        p = int(key)
        kind = s.get("kind")
        if kind == "power":
            per[p] = PowerNorm(_complex_from_json(s["gamma"]))
        elif kind == "table":
            pieces = tuple((ball_from_json(q["ball"]), _complex_from_json(q["value"])) for q in s["pieces"])
            per[p] = Tabulated(pieces, int(s["M"]))
        else:
            raise ValueError(f"unknown symbol kind {kind!r}")
    return Symbol(per, int(obj["m"]))


def sum_of_gammas(a: Mapping[int, complex], b: Mapping[int, complex]) -> dict[int, complex]:
    return {p: complex(a.get(p, 0)) + complex(b.get(p, 0)) for p in sorted(set(a) | set(b))}


def negate(a: Mapping[int, complex]) -> dict[int, complex]:
    return {p: -complex(g) for p, g in a.items()}
