"""Gram-matrix kernel over integer-encoded canonical terms.

Every term of every function is packed as ``(owner, C, gamma, F, coeff)`` with
center = C / p^D and frequency = F / p^D for one common exponent D.  The pair
integral then needs only integer divisibility tests and one modular product.

Two interchangeable backends: a numba ``@njit`` kernel and a pure-numpy one.
Set ``ADELION_NUMBA=0`` to force numpy.
"""

from __future__ import annotations

import os
from typing import Sequence

import numpy as np

from .padic import valuation

LIMIT = 2**61

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False


def numba_enabled() -> bool:
    return HAS_NUMBA and os.environ.get("ADELION_NUMBA", "1") != "0"


class Packed:
    __slots__ = ("p", "n", "owner", "start", "C", "G", "F", "coef", "pw", "M", "D")

    def __init__(self, p, n, owner, start, C, G, F, coef, pw, M, D):
        self.p, self.n, self.owner, self.start = p, n, owner, start
        self.C, self.G, self.F, self.coef, self.pw, self.M, self.D = C, G, F, coef, pw, M, D


def pack(functions: Sequence, p: int) -> Packed | None:
    """Integer encoding of a family; None when the numbers do not fit in int64."""
    D = 0
    for f in functions:
        for t in f.terms:
            for x in (t.ball.center, t.freq):
                if x.denominator > 1:
                    D = max(D, valuation(x.denominator, p))
    scale = p**D
    M = scale * scale
    if M >= LIMIT:
        return None
    owner, C, G, F, coef = [], [], [], [], []
    start = [0]
    for i, f in enumerate(functions):
        for t in f.terms:
            c = t.ball.center * scale
            b = t.freq * scale
            if c.denominator != 1 or b.denominator != 1 or abs(c) >= LIMIT or abs(b) >= LIMIT:
                return None
            owner.append(i)
            C.append(int(c))
            G.append(t.ball.gamma)
            F.append(int(b))
            coef.append(t.coefficient)
        start.append(len(owner))
    E = 0
    while p ** (E + 1) < LIMIT:
        E += 1
    pw = np.array([p**e for e in range(E + 1)], dtype=np.int64)
    return Packed(
        p,
        len(functions),
        np.array(owner, dtype=np.int64),
        np.array(start, dtype=np.int64),
        np.array(C, dtype=np.int64),
        np.array(G, dtype=np.int64),
        np.array(F, dtype=np.int64) if F else np.zeros(0, dtype=np.int64),
        np.array(coef, dtype=np.complex128),
        pw,
        M,
        D,
    )


def _divides_py(x, e, pw):
    if e <= 0:
        return True
    if e >= len(pw):
        return x == 0
    return x % pw[e] == 0


def _mulmod_py(a, b, m):
    a %= m
    b %= m
    if m < 3037000499:
        return (a * b) % m
    r = 0
    while b:
        if b & 1:
            r = (r + a) % m
        a = (a + a) % m
        b >>= 1
    return r


def _gram_loop(start, C, G, F, coef, pw, D, M, p):
    n = len(start) - 1
    out = np.zeros((n, n), dtype=np.complex128)
    two_pi = 2.0 * np.pi
    for i in range(n):
        for j in range(i, n):
            acc = 0j
            for s in range(start[i], start[i + 1]):
                for t in range(start[j], start[j + 1]):
                    gs = G[s]
                    gt = G[t]
                    if gs <= gt:
                        inner_g = gs
                        outer_g = gt
                        c = C[s]
                    else:
                        inner_g = gt
                        outer_g = gs
                        c = C[t]
                    if not _divides(C[s] - C[t], D - outer_g, pw):
                        continue
                    df = F[s] - F[t]
                    if not _divides(df, D + inner_g, pw):
                        continue
                    r = _mulmod(df, c, M)
                    ph = two_pi * (r / M)
                    acc += coef[s] * np.conj(coef[t]) * (np.cos(ph) + 1j * np.sin(ph)) * float(p) ** inner_g
            out[i, j] = acc
            out[j, i] = np.conj(acc)
    return out


if HAS_NUMBA:
    _divides = njit(cache=True)(_divides_py)
    _mulmod = njit(cache=True)(_mulmod_py)
    _gram_numba = njit(cache=True)(_gram_loop)
else:  # pragma: no cover
    _divides = _divides_py
    _mulmod = _mulmod_py
    _gram_numba = None


def _divides_np(x: np.ndarray, e: np.ndarray, pw: np.ndarray) -> np.ndarray:
    ok = e <= 0
    big = e >= len(pw)
    ok |= big & (x == 0)
    mid = ~(ok | big)
    if mid.any():
        ok[mid] = (x[mid] % pw[e[mid]]) == 0
    return ok


def _mulmod_np(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    a = a % m
    b = b % m
    if m < 3037000499:
        return (a * b) % m
    r = np.zeros_like(a)
    while b.any():
        odd = (b & 1).astype(bool)
        r[odd] = (r[odd] + a[odd]) % m
        a = (a + a) % m
        b = b >> 1
    return r


def _gram_numpy(pk: Packed, D: int, chunk: int = 1 << 22) -> np.ndarray:
    n = pk.n
    out = np.zeros(n * n, dtype=np.complex128)
    T = len(pk.C)
    if T == 0:
        return out.reshape(n, n)
    rows = max(1, chunk // T)
    cols = np.arange(T)
    for lo in range(0, T, rows):
        s = np.repeat(np.arange(lo, min(T, lo + rows)), T)
        t = np.tile(cols, len(s) // T)
        gs, gt = pk.G[s], pk.G[t]
        first = gs <= gt
        inner_g = np.where(first, gs, gt)
        outer_g = np.where(first, gt, gs)
        c = np.where(first, pk.C[s], pk.C[t])
        keep = _divides_np(pk.C[s] - pk.C[t], D - outer_g, pk.pw)
        df = pk.F[s] - pk.F[t]
        keep &= _divides_np(df, D + inner_g, pk.pw)
        s, t, df, c, inner_g = s[keep], t[keep], df[keep], c[keep], inner_g[keep]
        r = _mulmod_np(df, c, pk.M)
        val = pk.coef[s] * np.conj(pk.coef[t]) * np.exp(2j * np.pi * (r / pk.M)) * np.power(float(pk.p), inner_g)
        np.add.at(out, pk.owner[s] * n + pk.owner[t], val)
    return out.reshape(n, n)


def gram(functions: Sequence, p: int, backend: str | None = None) -> np.ndarray | None:
    """Gram matrix (f_i, f_j) through the packed kernel; None if packing overflows."""
    pk = pack(functions, p)
    if pk is None:
        return None
    D = pk.D
    if backend is None:
        backend = "numba" if numba_enabled() else "numpy"
    if backend == "numba":
        return _gram_numba(pk.start, pk.C, pk.G, pk.F, pk.coef, pk.pw, D, pk.M, p)
    if backend == "numpy":
        return _gram_numpy(pk, D)
    raise ValueError(f"unknown backend {backend!r}")
