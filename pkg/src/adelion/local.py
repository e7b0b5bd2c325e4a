"""Test functions at one finite place.

A :class:`LocalFunction` is a finite sum of terms
``amp * exp(2 pi i phase) * chi_p(freq * x) * 1_ball(x)``.  Phases, centers and
frequencies are exact rationals; only the amplitude is a float.  The canonical
form uses the coarsest partition of the support into balls on which the
function is a single character term.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .padic import (
    Ball,
    Scalar,
    as_fraction,
    ball_from_json,
    ball_to_json,
    check_prime,
    frac_part,
    reduce_frequency,
    root_of_unity,
    scalar_from_json,
    scalar_to_json,
    valuation,
)

DEFAULT_TOL = float(os.environ.get("ADELION_TOL", "1e-12"))


@dataclass(frozen=True)
class CharBallTerm:
    amp: complex
    phase: Fraction
    freq: Fraction
    ball: Ball

    def __post_init__(self):
        ph = self.phase
        if not 0 <= ph < 1:
            object.__setattr__(self, "phase", ph - (ph.numerator // ph.denominator))

    @property
    def p(self) -> int:
        return self.ball.p

    @property
    def coefficient(self) -> complex:
        """amp * exp(2 pi i phase)."""
        if self.phase == 0:
            return self.amp
        return self.amp * root_of_unity(self.phase)

    def normalized(self) -> CharBallTerm:
        """Fold the part of the frequency invisible on the ball into the phase."""
        p, g = self.ball.p, self.ball.gamma
        b = reduce_frequency(self.freq, g, p)
        if b == self.freq:
            return self
        ph = self.phase + frac_part((self.freq - b) * self.ball.center, p)
        return CharBallTerm(self.amp, ph, b, self.ball)

    def split(self) -> list[CharBallTerm]:
        return [CharBallTerm(self.amp, self.phase, self.freq, c).normalized() for c in self.ball.children()]

    def value(self, x: Fraction) -> complex:
        if not self.ball.contains(x):
            return 0j
        return self.coefficient * root_of_unity(frac_part(self.freq * x, self.p))


def _close(x: complex, y: complex, tol: float) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def _combine(terms: Sequence[CharBallTerm]) -> tuple[complex, Fraction]:
    if len(terms) == 1:
        return terms[0].amp, terms[0].phase
    ph = terms[0].phase
    if all(t.phase == ph for t in terms):
        return sum(t.amp for t in terms), ph
    return sum(t.coefficient for t in terms), Fraction(0)


def _negligible(c: complex, tol: float) -> bool:
    return c == 0 or abs(c) < tol


def _settle(ball: Ball, terms: list[CharBallTerm], tol: float) -> list[CharBallTerm]:
    """Reduce terms sharing one ball to at most one term per sub-ball."""
    by_freq: dict[Fraction, list[CharBallTerm]] = defaultdict(list)
    for t in terms:
        by_freq[t.freq].append(t)
    merged = []
    for b, ts in by_freq.items():
        amp, ph = _combine(ts)
        if not _negligible(amp, tol):
            merged.append(CharBallTerm(amp, ph, b, ball))
    if len(merged) <= 1:
        return merged
    buckets: dict[Ball, list[CharBallTerm]] = defaultdict(list)
    for t in merged:
        for c in t.split():
            buckets[c.ball].append(c)
    out = []
    for child, ts in buckets.items():
        out.extend(_settle(child, ts, tol))
    return out


def _merge_children(terms: list[CharBallTerm], p: int, tol: float) -> list[CharBallTerm]:
    """Replace complete sets of p sibling terms by one parent term where possible."""
    while True:
        groups: dict[Ball, list[CharBallTerm]] = defaultdict(list)
        for t in terms:
            groups[t.ball.parent()].append(t)
        out = []
        changed = False
        for parent, ts in groups.items():
            if len(ts) == p and len({t.freq for t in ts}) == 1:
                up = _try_merge(parent, ts, p, tol)
                if up is not None:
                    out.append(up)
                    changed = True
                    continue
            out.extend(ts)
        terms = out
        if not changed:
            return terms


def _try_merge(parent: Ball, ts: list[CharBallTerm], p: int, tol: float) -> CharBallTerm | None:
    g = ts[0].ball.gamma
    b = ts[0].freq
    step = Fraction(p) ** g
    t0 = ts[0]
    for t in range(p):
        shifts = [frac_part(t * step * s.ball.center, p) for s in ts]
        ph = t0.phase - shifts[0]
        ok = True
        for s, f in zip(ts[1:], shifts[1:]):
            if (s.phase - ph - f) % 1 == 0:
                if not _close(s.amp, t0.amp, tol):
                    ok = False
                    break
            elif not _close(s.coefficient, t0.amp * root_of_unity(ph + f), tol):
                ok = False
                break
        if ok:
            return CharBallTerm(t0.amp, ph, b + t * step, parent)
    return None


def canonical_terms(p: int, terms: Iterable[CharBallTerm], tol: float = DEFAULT_TOL) -> tuple[CharBallTerm, ...]:
    terms = [t.normalized() for t in terms if t.amp != 0]
    if not terms:
        return ()
    for t in terms:
        if t.ball.p != p:
            raise ValueError("term from another place")
    top = max(t.ball.gamma for t in terms)

    # balls strictly containing some term ball have to be split
    internal: set[Ball] = set()
    for b in {t.ball for t in terms}:
        for lv in range(1, top - b.gamma + 1):
            a = b.parent(lv)
            if a in internal:
                break
            internal.add(a)

    buckets: dict[Ball, list[CharBallTerm]] = defaultdict(list)
    stack = list(terms)
    while stack:
        t = stack.pop()
        if t.ball in internal:
            stack.extend(t.split())
        else:
            buckets[t.ball].append(t)

    settled = []
    for ball, ts in buckets.items():
        settled.extend(_settle(ball, ts, tol))
    merged = _merge_children(settled, p, tol)
    merged.sort(key=lambda t: (t.ball.center, t.ball.gamma, t.freq))
    return tuple(merged)


class LocalFunction:
    """Finite sum of character-times-ball terms at the place p, kept canonical."""

    __slots__ = ("p", "terms", "tol")

    def __init__(self, p: int, terms: Iterable[CharBallTerm] = (), tol: float = DEFAULT_TOL, *, canonical: bool = False):
        self.p = p
        self.tol = tol
        self.terms = tuple(terms) if canonical else canonical_terms(p, terms, tol)

    def __repr__(self) -> str:
        return f"LocalFunction(p={self.p}, terms={len(self.terms)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalFunction) and self.p == other.p and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.p, self.terms))

    def __add__(self, other: LocalFunction) -> LocalFunction:
        return add(self, other)

    def __sub__(self, other: LocalFunction) -> LocalFunction:
        return add(self, scale(other, -1))

    def __neg__(self) -> LocalFunction:
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, LocalFunction):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __call__(self, x: Scalar) -> complex:
        return evaluate(self, x)

    def is_zero(self) -> bool:
        return not self.terms

    def support_exponent(self) -> int | None:
        """Smallest N with supp f inside a union of balls of radius p^N."""
        return max((t.ball.gamma for t in self.terms), default=None)

    def constancy_exponent(self) -> int | None:
        """Largest l such that f is constant on every ball of radius p^l."""
        out = None
        for t in self.terms:
            c = t.ball.gamma
            if t.freq != 0:
                c = min(c, valuation(t.freq, self.p))
            out = c if out is None else min(out, c)
        return out

    def is_step(self) -> bool:
        return all(t.freq == 0 for t in self.terms)


def _build(p: int, terms: Iterable[CharBallTerm], tol: float) -> LocalFunction:
    return LocalFunction(p, terms, tol)


def zero(p: int, tol: float = DEFAULT_TOL) -> LocalFunction:
    return LocalFunction(check_prime(p), (), tol, canonical=True)


def indicator(ball: Ball, tol: float = DEFAULT_TOL) -> LocalFunction:
    return LocalFunction(ball.p, [CharBallTerm(1.0 + 0j, Fraction(0), Fraction(0), ball)], tol)


def omega(p: int, tol: float = DEFAULT_TOL) -> LocalFunction:
    """Omega(|x|_p), the indicator of Z_p."""
    return indicator(Ball(check_prime(p), Fraction(0), 0), tol)


def translate(f: LocalFunction, c: Scalar) -> LocalFunction:
    """g(x) = f(x - c)."""
    c = as_fraction(c)
    terms = [
        CharBallTerm(t.amp, t.phase - frac_part(t.freq * c, f.p), t.freq, Ball(f.p, t.ball.center + c, t.ball.gamma))
        for t in f.terms
    ]
    return _build(f.p, terms, f.tol)


def dilate(f: LocalFunction, j: int) -> LocalFunction:
    """g(x) = f(p^j x); supports grow by p^j (radius exponent += j)."""
    s = Fraction(f.p) ** j
    terms = [CharBallTerm(t.amp, t.phase, t.freq * s, Ball(f.p, t.ball.center / s, t.ball.gamma + j)) for t in f.terms]
    return _build(f.p, terms, f.tol)


def reflect(f: LocalFunction) -> LocalFunction:
    """g(x) = f(-x)."""
    terms = [CharBallTerm(t.amp, t.phase, -t.freq, Ball(f.p, -t.ball.center, t.ball.gamma)) for t in f.terms]
    return _build(f.p, terms, f.tol)


def modulate(f: LocalFunction, b: Scalar) -> LocalFunction:
    """g(x) = chi_p(b x) f(x)."""
    b = as_fraction(b)
    return _build(f.p, [replace(t, freq=t.freq + b) for t in f.terms], f.tol)


def scale(f: LocalFunction, c: complex) -> LocalFunction:
    c = complex(c)
    if c == 0:
        return LocalFunction(f.p, (), f.tol, canonical=True)
    if c == 1:
        return f
    return _build(f.p, [replace(t, amp=t.amp * c) for t in f.terms], f.tol)


def conjugate(f: LocalFunction) -> LocalFunction:
    terms = [CharBallTerm(t.amp.conjugate(), -t.phase, -t.freq, t.ball) for t in f.terms]
    return _build(f.p, terms, f.tol)


def add(*fs: LocalFunction, tol: float | None = None) -> LocalFunction:
    p = fs[0].p
    if any(g.p != p for g in fs):
        raise ValueError("cannot add functions from different places")
    return _build(p, [t for g in fs for t in g.terms], fs[0].tol if tol is None else tol)


def linear_combination(coeffs: Sequence[complex], fs: Sequence[LocalFunction], tol: float | None = None) -> LocalFunction:
    p = fs[0].p
    terms = [replace(t, amp=t.amp * complex(c)) for c, g in zip(coeffs, fs) for t in g.terms if c != 0]
    return _build(p, terms, fs[0].tol if tol is None else tol)


def difference(f: LocalFunction, g: LocalFunction) -> LocalFunction:
    """f - g with no tolerance-based dropping; used to measure small residuals."""
    return add(f, scale(g, -1), tol=0.0)


def _term_product(s: CharBallTerm, t: CharBallTerm) -> CharBallTerm | None:
    p = s.p
    inner, outer = (s.ball, t.ball) if s.ball.gamma <= t.ball.gamma else (t.ball, s.ball)
    if valuation(inner.center - outer.center, p) < -outer.gamma:
        return None
    return CharBallTerm(s.amp * t.amp, s.phase + t.phase, s.freq + t.freq, inner)


def multiply(f: LocalFunction, g: LocalFunction) -> LocalFunction:
    if f.p != g.p:
        raise ValueError("cannot multiply functions from different places")
    terms = []
    for s in f.terms:
        for t in g.terms:
            u = _term_product(s, t)
            if u is not None:
                terms.append(u)
    return _build(f.p, terms, f.tol)


def _term_integral(t: CharBallTerm) -> complex:
    b = t.normalized()
    if b.freq != 0:
        return 0j
    return b.coefficient * b.ball.measure()


def integrate(f: LocalFunction) -> complex:
    return sum((_term_integral(t) for t in f.terms), 0j)


def inner_product(f: LocalFunction, g: LocalFunction) -> complex:
    """(f, g) = integral of f * conj(g)."""
    if f.p != g.p:
        raise ValueError("cannot pair functions from different places")
    p = f.p
    acc = 0j
    for s in f.terms:
        for t in g.terms:
            inner, outer = (s.ball, t.ball) if s.ball.gamma <= t.ball.gamma else (t.ball, s.ball)
            if valuation(inner.center - outer.center, p) < -outer.gamma:
                continue
            b = s.freq - t.freq
            if b != 0 and valuation(b, p) < inner.gamma:
                continue
            ph = s.phase - t.phase + frac_part(b * inner.center, p)
            acc += s.amp * t.amp.conjugate() * root_of_unity(ph) * inner.measure()
    return acc


def l2_norm(f: LocalFunction) -> float:
    return abs(inner_product(f, f)) ** 0.5


def l1_norm(f: LocalFunction) -> float:
    # canonical terms sit on disjoint balls
    return sum(abs(t.amp) * t.ball.measure() for t in f.terms)


def _power(p: int, g: int, amp: complex) -> complex:
    # divide rather than multiply by a rounded reciprocal
    return amp * float(p**g) if g >= 0 else amp / float(p ** (-g))


def fourier(f: LocalFunction) -> LocalFunction:
    """F[f](xi) = integral of chi_p(xi x) f(x) dx."""
    p = f.p
    terms = []
    for t in f.terms:
        a, b, g = t.ball.center, t.freq, t.ball.gamma
        terms.append(CharBallTerm(_power(p, g, t.amp), t.phase + frac_part(a * b, p), a, Ball(p, -b, -g)))
    return _build(p, terms, f.tol)


def inverse_fourier(f: LocalFunction) -> LocalFunction:
    return reflect(fourier(f))


def canonicalize(f: LocalFunction, tol: float | None = None) -> LocalFunction:
    return LocalFunction(f.p, f.terms, f.tol if tol is None else tol)


def evaluate(f: LocalFunction, x: Scalar) -> complex:
    x = as_fraction(x)
    for t in f.terms:
        if t.ball.contains(x):
            return t.value(x)
    return 0j


def expand_steps(f: LocalFunction) -> list[CharBallTerm]:
    """Split terms until every frequency is invisible: a pure step-function listing."""
    out = []
    stack = list(f.terms)
    while stack:
        t = stack.pop()
        if t.freq == 0:
            out.append(t)
        else:
            stack.extend(t.split())
    out.sort(key=lambda t: (t.ball.center, t.ball.gamma))
    return out


def max_deviation(f: LocalFunction, g: LocalFunction) -> float:
    """Largest pointwise amplitude gap, compared on a common refinement."""
    d = difference(f, g)
    return max((abs(t.amp) for t in d.terms), default=0.0)


def to_json(f: LocalFunction) -> dict:
    return {
        "p": f.p,
        "terms": [
            {
                "amp": [t.amp.real, t.amp.imag],
                "phase": scalar_to_json(t.phase),
                "freq": scalar_to_json(t.freq),
                "ball": ball_to_json(t.ball),
            }
            for t in f.terms
        ],
    }


def from_json(obj: dict, tol: float = DEFAULT_TOL) -> LocalFunction:
    p = check_prime(int(obj["p"]))
    terms = []
    for t in obj["terms"]:
        ball = ball_from_json(t["ball"])
        if ball.p != p:
            raise ValueError("term ball at another place")
        re, im = t["amp"]
        terms.append(CharBallTerm(complex(re, im), scalar_from_json(t["phase"]), scalar_from_json(t["freq"]), ball))
    return LocalFunction(p, terms, tol)
