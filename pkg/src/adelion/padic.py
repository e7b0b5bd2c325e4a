"""Exact arithmetic of rationals viewed inside Q_p.

Scalars are plain :class:`fractions.Fraction` values; the prime is passed to
every operation so the same rational can be read at several places.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import sympy

Scalar = Union[Fraction, int]

INF = math.inf


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


def as_fraction(x: Scalar | str) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return Fraction(x)


def _strip(n: int, p: int) -> tuple[int, int]:
    """Return (e, m) with n = p**e * m and p not dividing m (n != 0)."""
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e, n


def valuation(x: Scalar, p: int) -> int | float:
    """p-adic valuation; ``math.inf`` for zero."""
    x = as_fraction(x)
    if x == 0:
        return INF
    return _strip(x.numerator, p)[0] - _strip(x.denominator, p)[0]


def norm(x: Scalar, p: int) -> Fraction:
    """|x|_p = p^(-valuation) as an exact rational."""
    v = valuation(x, p)
    if v == INF:
        return Fraction(0)
    return Fraction(p) ** (-v)


def frac_part(x: Scalar, p: int) -> Fraction:
    """The fractional part {x}_p in [0, 1), a rational with p-power denominator."""
    x = as_fraction(x)
    den = x.denominator
    if den % p:
        return Fraction(0)
    e, rest = _strip(den, p)
    pe = p**e
    t = (x.numerator * pow(rest, -1, pe)) % pe
    return Fraction(t, pe)


def digits(x: Scalar, p: int, k_lo: int, k_hi: int) -> list[int]:
    """Digits x_k, k_lo <= k <= k_hi, of the canonical expansion x = sum x_k p^k."""
    if k_lo > k_hi:
        raise ValueError("k_lo must not exceed k_hi")
    y = as_fraction(x) * Fraction(p) ** (-k_lo)
    y -= frac_part(y, p)
    n = k_hi - k_lo + 1
    pn = p**n
    t = (y.numerator * pow(y.denominator, -1, pn)) % pn
    out = []
    for _ in range(n):
        t, d = divmod(t, p)
        out.append(d)
    return out


@dataclass(frozen=True, order=True)
class UnitPhase:
    """The unimodular number exp(2 pi i r), with r kept exactly in [0, 1)."""

    r: Fraction = Fraction(0)

    def __post_init__(self):
        r = as_fraction(self.r)
        object.__setattr__(self, "r", r - math.floor(r))

    def __mul__(self, other: UnitPhase) -> UnitPhase:
        return UnitPhase(self.r + other.r)

    def conjugate(self) -> UnitPhase:
        return UnitPhase(-self.r)

    def value(self) -> complex:
        return root_of_unity(self.r)


def root_of_unity(r: Fraction) -> complex:
    """exp(2 pi i r), exact on the quarter turns."""
    r = r - math.floor(r)
    if r.denominator <= 4 and 4 % r.denominator == 0:
        return (1, 1j, -1, -1j)[int(r * 4)]
    return cmath.exp(2j * math.pi * (r.numerator / r.denominator))


def chi(x: Scalar, p: int) -> UnitPhase:
    """Additive character chi_p(x) = exp(2 pi i {x}_p)."""
    return UnitPhase(frac_part(x, p))


def enumerate_shifts(p: int, max_depth: int) -> list[Fraction]:
    """Elements of I_p with denominator dividing p**max_depth, denominator-major."""
    if max_depth < 0:
        raise ValueError("depth must be non-negative")
    out = [Fraction(0)]
    for d in range(1, max_depth + 1):
        pd = p**d
        out.extend(Fraction(t, pd) for t in range(pd) if t % p)
    return out


def enumerate_restricted_shifts(p: int, j: int) -> list[Fraction]:
    """I_p^j = {a in I_p : p^j a in Z_p}."""
    return enumerate_shifts(p, j)


def is_shift(a: Scalar, p: int) -> bool:
    a = as_fraction(a)
    return frac_part(a, p) == a


def canonical_center(a: Scalar, gamma: int, p: int) -> Fraction:
    """Digits of a below position -gamma: the canonical center of B_gamma(a)."""
    s = Fraction(p) ** gamma
    return frac_part(as_fraction(a) * s, p) / s


def reduce_frequency(b: Scalar, gamma: int, p: int) -> Fraction:
    """Representative of b modulo p^(-gamma) Z_p, i.e. modulo the frequencies invisible on B_gamma."""
    s = Fraction(p) ** gamma
    return frac_part(as_fraction(b) / s, p) * s


@dataclass(frozen=True)
class Ball:
    """B_gamma(a) = {x : |x - a|_p <= p^gamma}, with a canonical center."""

    p: int
    center: Fraction
    gamma: int

    def __post_init__(self):
        object.__setattr__(self, "center", canonical_center(self.center, self.gamma, self.p))

    def __lt__(self, other: Ball) -> bool:
        return (self.center, self.gamma) < (other.center, other.gamma)

    def contains(self, x: Scalar) -> bool:
        return valuation(as_fraction(x) - self.center, self.p) >= -self.gamma

    def parent(self, levels: int = 1) -> Ball:
        return Ball(self.p, self.center, self.gamma + levels)

    def children(self) -> list[Ball]:
        step = Fraction(self.p) ** (-self.gamma)
        return [Ball(self.p, self.center + r * step, self.gamma - 1) for r in range(self.p)]

    def measure(self) -> float:
        return float(self.p) ** self.gamma


class BallRelation(enum.Enum):
    DISJOINT = "disjoint"
    EQUAL = "equal"
    FIRST_INSIDE_SECOND = "first_inside_second"
    SECOND_INSIDE_FIRST = "second_inside_first"


def ball_relation(b1: Ball, b2: Ball) -> BallRelation:
    if b1.p != b2.p:
        raise ValueError("balls live at different places")
    top = max(b1.gamma, b2.gamma)
    if valuation(b1.center - b2.center, b1.p) < -top:
        return BallRelation.DISJOINT
    if b1.gamma == b2.gamma:
        return BallRelation.EQUAL
    if b1.gamma < b2.gamma:
        return BallRelation.FIRST_INSIDE_SECOND
    return BallRelation.SECOND_INSIDE_FIRST


# JSON helpers


def scalar_to_json(x: Scalar) -> dict:
    x = as_fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def scalar_from_json(obj) -> Fraction:
    if isinstance(obj, dict):
        return Fraction(int(obj["num"]), int(obj["den"]))
    if isinstance(obj, (int, str)):
        return Fraction(obj)
    raise ValueError(f"not a scalar: {obj!r}")


def ball_to_json(b: Ball) -> dict:
    return {"p": b.p, "center": scalar_to_json(b.center), "gamma": b.gamma}


def ball_from_json(obj: dict) -> Ball:
    if obj["p"] == "inf":
        raise ValueError("real-place balls are handled by adelion.dyadic")
    return Ball(check_prime(int(obj["p"])), scalar_from_json(obj["center"]), int(obj["gamma"]))
