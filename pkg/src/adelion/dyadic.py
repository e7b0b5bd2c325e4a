"""Step functions on dyadic half-open intervals: the real-place factor."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

from .padic import Scalar, as_fraction


class DyadicStepFunction:
    """sum_n amp_n 1_[n 2^-J, (n+1) 2^-J), stored at the coarsest common level J."""

    __slots__ = ("level", "pieces")

    def __init__(self, level: int, pieces: Mapping[int, complex] | Iterable[tuple[int, complex]]):
        items = pieces.items() if isinstance(pieces, Mapping) else pieces
        acc: dict[int, complex] = {}
        for n, a in items:
            acc[n] = acc.get(n, 0j) + complex(a)
        acc = {n: a for n, a in acc.items() if a != 0}
        level, acc = _coarsen(level, acc)
        self.level = level
        self.pieces = tuple(sorted(acc.items()))

    def __repr__(self) -> str:
        return f"DyadicStepFunction(level={self.level}, pieces={len(self.pieces)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicStepFunction):
            return NotImplemented
        if not self.pieces and not other.pieces:
            return True
        return self.level == other.level and self.pieces == other.pieces

    def __hash__(self) -> int:
        return hash((self.level, self.pieces)) if self.pieces else 0

    def __add__(self, other: DyadicStepFunction) -> DyadicStepFunction:
        return add(self, other)

    def __sub__(self, other: DyadicStepFunction) -> DyadicStepFunction:
        return add(self, scale(other, -1))

    def __call__(self, t: Scalar) -> complex:
        return evaluate(self, t)

    def is_zero(self) -> bool:
        return not self.pieces

    def at_level(self, J: int) -> dict[int, complex]:
        """Pieces refined to level J >= self.level."""
        if J < self.level:
            raise ValueError("can only refine")
        k = 1 << (J - self.level)
        return {n * k + i: a for n, a in self.pieces for i in range(k)}


def _coarsen(level: int, acc: dict[int, complex]) -> tuple[int, dict[int, complex]]:
    while acc:
        up = {}
        for n, a in acc.items():
            m = n >> 1
            twin = n ^ 1
            if acc.get(twin) != a:
                return level, acc
            up[m] = a
        acc = up
        level -= 1
    return level, acc


def zero() -> DyadicStepFunction:
    return DyadicStepFunction(0, {})


def real_haar_scaling() -> DyadicStepFunction:
    """phi^H = 1 on [0, 1)."""
    return DyadicStepFunction(0, {0: 1.0})


def real_haar_wavelet(j: int = 0, n: int = 0) -> DyadicStepFunction:
    """psi^H_{jn}(t) = 2^{j/2} psi^H(2^j t - n)."""
    c = 2.0 ** (j / 2)
    return DyadicStepFunction(j + 1, {2 * n: c, 2 * n + 1: -c})


def real_scaling(j: int = 0, n: int = 0) -> DyadicStepFunction:
    """2^{j/2} phi^H(2^j t - n)."""
    return DyadicStepFunction(j, {n: 2.0 ** (j / 2)})


def _common(f: DyadicStepFunction, g: DyadicStepFunction) -> tuple[int, dict, dict]:
    J = max(f.level, g.level)
    return J, f.at_level(J), g.at_level(J)


def add(f: DyadicStepFunction, g: DyadicStepFunction) -> DyadicStepFunction:
    J, a, b = _common(f, g)
    out = dict(a)
    for n, v in b.items():
        out[n] = out.get(n, 0j) + v
    return DyadicStepFunction(J, out)


def scale(f: DyadicStepFunction, c: complex) -> DyadicStepFunction:
    return DyadicStepFunction(f.level, [(n, a * c) for n, a in f.pieces])


def multiply(f: DyadicStepFunction, g: DyadicStepFunction) -> DyadicStepFunction:
    J, a, b = _common(f, g)
    return DyadicStepFunction(J, {n: v * b[n] for n, v in a.items() if n in b})


def conjugate(f: DyadicStepFunction) -> DyadicStepFunction:
    return DyadicStepFunction(f.level, [(n, a.conjugate()) for n, a in f.pieces])


def translate(f: DyadicStepFunction, c: Scalar) -> DyadicStepFunction:
    """g(t) = f(t - c) for a dyadic rational c."""
    c = as_fraction(c)
    den = c.denominator
    if den & (den - 1):
        raise ValueError("shift must be a dyadic rational")
    J = max(f.level, den.bit_length() - 1, 0)
    step = int(c * 2**J)
    return DyadicStepFunction(J, {n + step: a for n, a in f.at_level(J).items()})


def dilate(f: DyadicStepFunction, j: int) -> DyadicStepFunction:
    """g(t) = f(2^j t)."""
    return DyadicStepFunction(f.level + j, f.pieces)


def evaluate(f: DyadicStepFunction, t: Scalar) -> complex:
    t = as_fraction(t)
    n = math.floor(t * Fraction(2) ** f.level)
    return dict(f.pieces).get(n, 0j)


def integrate(f: DyadicStepFunction) -> complex:
    w = 2.0 ** (-f.level)
    return sum((a * w for _, a in f.pieces), 0j)


def inner_product(f: DyadicStepFunction, g: DyadicStepFunction) -> complex:
    J, a, b = _common(f, g)
    w = 2.0 ** (-J)
    return sum((v * b[n].conjugate() * w for n, v in a.items() if n in b), 0j)


def l2_norm(f: DyadicStepFunction) -> float:
    return abs(inner_product(f, f)) ** 0.5


def moment(f: DyadicStepFunction, s: int) -> complex:
    """integral of t^s f(t) dt; the interval integrals are exact rationals."""
    if s < 0:
        raise ValueError("degree must be non-negative")
    h = Fraction(2) ** (-f.level)
    acc = 0j
    for n, a in f.pieces:
        w = ((n + 1) ** (s + 1) - n ** (s + 1)) * h ** (s + 1) / (s + 1)
        acc += a * float(w)
    return acc


def to_json(f: DyadicStepFunction) -> dict:
    return {"pieces": [{"j": f.level, "n": n, "amp": [a.real, a.imag]} for n, a in f.pieces]}


def from_json(obj: dict) -> DyadicStepFunction:
    pieces = obj["pieces"]
    if not pieces:
        return zero()
    J = max(int(q["j"]) for q in pieces)
    out: dict[int, complex] = {}
    for q in pieces:
        piece = DyadicStepFunction(int(q["j"]), {int(q["n"]): complex(*q["amp"])})
        for n, a in piece.at_level(J).items():
            out[n] = out.get(n, 0j) + a
    return DyadicStepFunction(J, out)
