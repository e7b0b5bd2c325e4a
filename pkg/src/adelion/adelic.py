"""Finite-data adeles, stabilized tensor products and adelic wavelet bases.

An :class:`AdelicFunction` is an elementary tensor: an optional real factor
(absent for functions on the finite adeles), finitely many p-adic factors,
and Omega(|x_p|_p) at every other prime.  Finite sums are :class:`AdelicSum`.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
import sympy

from . import dyadic, local
from .dyadic import DyadicStepFunction
from .local import DEFAULT_TOL, LocalFunction
from .padic import (
    Scalar,
    UnitPhase,
    as_fraction,
    check_prime,
    enumerate_shifts,
    frac_part,
    is_shift,
    scalar_from_json,
    scalar_to_json,
)
from .wavelets import gram_matrix, kozyrev, scaling

REAL = "inf"
Place = Union[int, str]


def place_key(v: Place) -> int:
    return -1 if v == REAL else int(v)


def primes_upto(m: int | None) -> list[int]:
    if not m or m < 2:
        return []
    return list(sympy.primerange(2, m + 1))


# adele points and the character


@dataclass(frozen=True)
class AdelePoint:
    """Real coordinate plus finitely many p-adic coordinates.

    In ``principal`` mode an absent prime carries the real coordinate itself;
    in ``zero`` mode it carries 0.
    """

    real: Fraction
    finite: Mapping[int, Fraction] = field(default_factory=dict)
    mode: str = "zero"

    def __post_init__(self):
        if self.mode not in ("zero", "principal"):
            raise ValueError("mode is 'zero' or 'principal'")
        object.__setattr__(self, "real", as_fraction(self.real))
        object.__setattr__(self, "finite", {check_prime(p): as_fraction(x) for p, x in dict(self.finite).items()})

    @classmethod
    def principal(cls, r: Scalar) -> AdelePoint:
        return cls(as_fraction(r), {}, "principal")

    def coordinate(self, p: int) -> Fraction:
        if p in self.finite:
            return self.finite[p]
        return self.real if self.mode == "principal" else Fraction(0)

    def nonintegral_primes(self) -> list[int]:
        ps = set(self.finite)
        if self.mode == "principal":
            ps |= set(sympy.primefactors(self.real.denominator))
        return sorted(p for p in ps if self.coordinate(p).denominator % p == 0)


def adelic_character(x: AdelePoint) -> UnitPhase:
    """chi(x) = chi_inf(x_inf) prod_p chi_p(x_p), with chi_inf(t) = exp(-2 pi i t)."""
    r = -x.real
    for p in x.nonintegral_primes():
        r += frac_part(x.coordinate(p), p)
    return UnitPhase(r)


# elementary functions


def _is_omega(f: LocalFunction) -> bool:
    return f.terms == local.omega(f.p).terms


class AdelicFunction:
    """Elementary tensor real (x) f_2 (x) f_3 (x) ... with Omega beyond P."""

    __slots__ = ("real", "factors", "P")

    def __init__(self, real: DyadicStepFunction | None, factors: Mapping[int, LocalFunction] | None = None):
        kept = {}
        for p, f in sorted((factors or {}).items()):
            if f.p != p:
                raise ValueError(f"factor stored at {p} lives at {f.p}")
            if not _is_omega(f):
                kept[p] = f
        self.real = real
        self.factors = kept
        self.P = max(kept, default=None)

    def __repr__(self) -> str:
        places = ([REAL] if self.real is not None else []) + list(self.factors)
        return f"AdelicFunction(places={places}, P={self.P})"

    @property
    def on_finite_adeles(self) -> bool:
        return self.real is None

    def factor(self, p: int) -> LocalFunction:
        return self.factors.get(p) or local.omega(p)

    def places(self) -> list[Place]:
        return ([REAL] if self.real is not None else []) + list(self.factors)


def tensor(real: DyadicStepFunction | None, factors: Mapping[int, LocalFunction], P: int | None = None) -> AdelicFunction:
    if P is not None:
        for p, f in factors.items():
            if p > P and not _is_omega(f):
                raise ValueError(f"non-trivial factor at {p} beyond P={P}")
    return AdelicFunction(real, factors)


def refinable(real: bool = True) -> AdelicFunction:
    """Phi = phi^H (x) Omega (x) Omega ..., or its finite-adele version."""
    return AdelicFunction(dyadic.real_haar_scaling() if real else None, {})


@dataclass(frozen=True)
class AdelicSum:
    terms: tuple[AdelicFunction, ...]

    def __iter__(self):
        return iter(self.terms)


AnyAdelic = Union[AdelicFunction, AdelicSum]


def terms_of(f: AnyAdelic) -> tuple[AdelicFunction, ...]:
    return f.terms if isinstance(f, AdelicSum) else (f,)


def scale(f: AdelicFunction, c: complex) -> AdelicFunction:
    """c * f, with c absorbed into the first stored factor."""
    c = complex(c)
    if c == 1:
        return f
    if f.real is not None:
        return AdelicFunction(dyadic.scale(f.real, c), f.factors)
    factors = dict(f.factors)
    p = min(factors, default=2)
    factors[p] = local.scale(f.factor(p), c)
    return AdelicFunction(None, factors)


def combination(coeffs: Sequence[complex], fs: Sequence[AdelicFunction]) -> AdelicSum:
    return AdelicSum(tuple(scale(f, c) for c, f in zip(coeffs, fs) if c != 0))


def _check_same_ring(f: AdelicFunction, g: AdelicFunction):
    if (f.real is None) != (g.real is None):
        raise ValueError("cannot pair a function on A with one on the finite adeles")


def adelic_inner(f: AnyAdelic, g: AnyAdelic) -> complex:
    """(f, g) as a product of per-place pairings, extended bilinearly to sums."""
    acc = 0j
    for s in terms_of(f):
        for t in terms_of(g):
            _check_same_ring(s, t)
            v = 1 + 0j
            if s.real is not None:
                v *= dyadic.inner_product(s.real, t.real)
            for p in sorted(set(s.factors) | set(t.factors)):
                v *= local.inner_product(s.factor(p), t.factor(p))
                if v == 0:
                    break
            acc += v
    return acc


def adelic_norm(f: AnyAdelic) -> float:
    return max(adelic_inner(f, f).real, 0.0) ** 0.5


def shift(f: AdelicFunction, a: Mapping[Place, Scalar]) -> AdelicFunction:
    """(T_a f)(x) = f(x - a) with a_inf in Z and a_p in I_p."""
    real = f.real
    factors = dict(f.factors)
    for v, c in a.items():
        c = as_fraction(c)
        if v == REAL:
            if c.denominator != 1:
                raise ValueError("real shift must be an integer")
            if real is None:
                raise ValueError("no real place on the finite adeles")
            real = dyadic.translate(real, c)
        else:
            p = check_prime(int(v))
            if not is_shift(c, p):
                raise ValueError(f"{c} is not in I_{p}")
            factors[p] = local.translate(f.factor(p), c)
    return AdelicFunction(real, factors)


def multi_dilate(f: AdelicFunction, j: Mapping[Place, int]) -> AdelicFunction:
    """p-adic places: p^{-j/2} f(p^j x); real place: 2^{-j/2} f(2^{-j} x)."""
    real = f.real
    factors = dict(f.factors)
    for v, jj in j.items():
        if jj == 0:
            continue
        if v == REAL:
            if real is None:
                raise ValueError("no real place on the finite adeles")
            real = dyadic.scale(dyadic.dilate(real, -jj), 2.0 ** (-jj / 2))
        else:
            p = check_prime(int(v))
            factors[p] = local.scale(local.dilate(f.factor(p), jj), float(p) ** (-jj / 2))
    return AdelicFunction(real, factors)


def evaluate(f: AdelicFunction, x: AdelePoint) -> complex:
    v = 1 + 0j
    if f.real is not None:
        v *= dyadic.evaluate(f.real, x.real)
    for p in f.factors:
        v *= local.evaluate(f.factors[p], x.coordinate(p))
    for p in x.nonintegral_primes():
        if p not in f.factors:
            v *= local.evaluate(local.omega(p), x.coordinate(p))
    return v


# indices and the two wavelet bases


@dataclass(frozen=True, order=True)
class AdelicIndex:
    """Place-major tuple of (place, k, j, a); k = 0 marks a scaling entry phi(x - a).

    Trivial entries (k = 0, j = 0, a = 0) at primes are dropped, so m is the
    largest prime with a non-trivial entry.  ``real`` marks indices on A.
    """

    entries: tuple
    real: bool = False

    @classmethod
    def make(
        cls,
        k: Mapping[int, int] | None = None,
        j: Mapping[Place, int] | None = None,
        a: Mapping[Place, Scalar] | None = None,
        m: int | None = None,
        real: bool = False,
    ) -> AdelicIndex:
        k, j, a = dict(k or {}), dict(j or {}), dict(a or {})
        if not real and (REAL in j or REAL in a):
            raise ValueError("real entries given for an index on the finite adeles")
        primes = {int(v) for v in itertools.chain(k, j, a) if v != REAL}
        if m is not None and any(p > m for p in primes):
            raise ValueError("index support exceeds m")
        entries = []
        if real:
            ja = as_fraction(a.get(REAL, 0))
            if ja.denominator != 1:
                raise ValueError("real shift must be an integer")
            entries.append((-1, 1, int(j.get(REAL, 0)), ja))
        for p in sorted(primes):
            check_prime(p)
            kk, jj, aa = int(k.get(p, 0)), int(j.get(p, 0)), as_fraction(a.get(p, 0))
            if not 0 <= kk <= p - 1:
                raise ValueError(f"k_{p} out of range")
            if not is_shift(aa, p):
                raise ValueError(f"a_{p} = {aa} is not in I_{p}")
            if kk == 0 and jj != 0:
                raise ValueError("scaling entries carry j = 0")
            if kk and jj < 0:
                raise ValueError("wavelet entries need j >= 0")
            if (kk, jj, aa) != (0, 0, 0):
                entries.append((p, kk, jj, aa))
        return cls(tuple(entries), real)

    @property
    def m(self) -> int | None:
        return max((e[0] for e in self.entries if e[0] > 0), default=None)

    def entry(self, v: Place) -> tuple[int, int, Fraction]:
        key = place_key(v)
        for e in self.entries:
            if e[0] == key:
                return e[1], e[2], e[3]
        return 0, 0, Fraction(0)

    def k_map(self) -> dict[int, int]:
        return {e[0]: e[1] for e in self.entries if e[0] > 0}

    def j_map(self) -> dict[Place, int]:
        return {(REAL if e[0] < 0 else e[0]): e[2] for e in self.entries}

    def a_map(self) -> dict[Place, Fraction]:
        return {(REAL if e[0] < 0 else e[0]): e[3] for e in self.entries}

    def generator(self) -> AdelicIndex:
        """The index (k, 0, 0) with the same k."""
        return AdelicIndex.make(k=self.k_map(), real=self.real)

    def has_scaling_factor(self) -> bool:
        """True if some prime up to m carries a pure scaling factor."""
        ks = self.k_map()
        return any(ks.get(p, 0) == 0 for p in primes_upto(self.m))

    def to_json(self) -> dict:
        return {
            "real": self.real,
            "m": self.m,
            "k": {str(p): k for p, k in self.k_map().items()},
            "j": {str(v): j for v, j in self.j_map().items()},
            "a": {str(v): scalar_to_json(a) for v, a in self.a_map().items()},
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> AdelicIndex:
        def keyed(d):
            return {(REAL if v == REAL else int(v)): x for v, x in (d or {}).items()}

        return cls.make(
            k=keyed(obj.get("k")),
            j=keyed(obj.get("j")),
            a={v: scalar_from_json(x) for v, x in keyed(obj.get("a")).items()},
            m=obj.get("m"),
            real=bool(obj.get("real", False)),
        )


def _place_basis_element(p: int, k: int, j: int, a: Fraction) -> LocalFunction:
    if k == 0:
        return local.translate(local.omega(p), a)
    return kozyrev(p, k, j, a)


def adelic_wavelet(alpha: AdelicIndex) -> AdelicFunction:
    """Tensor of one-dimensional basis elements, Omega beyond m."""
    real = None
    if alpha.real:
        _, j, a = alpha.entry(REAL)
        real = dyadic.real_haar_wavelet(j, int(a))
    factors = {e[0]: _place_basis_element(*e) for e in alpha.entries if e[0] > 0}
    return AdelicFunction(real, factors)


def tensor_box(places: Sequence[int], j_range: Iterable[int], depth: int, real_j: Iterable[int] = (), real_n: Iterable[int] = (), real: bool = False) -> list[AdelicIndex]:
    """All tensor-basis indices with the given per-place ranges."""
    j_range = list(j_range)
    per_place = []
    for p in places:
        opts = [(0, 0, a) for a in enumerate_shifts(p, depth)]
        opts += [(k, j, a) for j in j_range if j >= 0 for k in range(1, p) for a in enumerate_shifts(p, depth)]
        per_place.append(opts)
    reals = [(j, n) for j in real_j for n in real_n] if real else [None]
    out = []
    for r in reals:
        for combo in itertools.product(*per_place):
            k = {p: c[0] for p, c in zip(places, combo)}
            j = {p: c[1] for p, c in zip(places, combo)}
            a = {p: c[2] for p, c in zip(places, combo)}
            if r is not None:
                j[REAL], a[REAL] = r
            out.append(AdelicIndex.make(k, j, a, real=real))
    return out


SCALING, WAVELET = 1, 2


def _mra_places(top: int, real: bool) -> list[Place]:
    return ([REAL] if real else []) + primes_upto(top)


def mra_wavelet(
    k: Mapping[int, int],
    pattern: Mapping[Place, int],
    j: int,
    a: Mapping[Place, Scalar],
    top: int,
    real: bool = True,
) -> AdelicFunction:
    """Uniform-level MRA wavelet: place v carries the scaling (1) or wavelet (2) factor.

    Real place: 2^{j/2} theta(2^j x - a); p-adic place: p^{j/2} theta(p^{-j} x - a).
    """
    places = _mra_places(top, real)
    if set(pattern) != set(places):
        raise ValueError(f"pattern must cover exactly {places}")
    if any(v not in (SCALING, WAVELET) for v in pattern.values()):
        raise ValueError("pattern entries are 1 (scaling) or 2 (wavelet)")
    if all(v == SCALING for v in pattern.values()):
        raise ValueError("the all-scaling pattern is the scaling function, not a wavelet")
    return _mra_tensor(k, pattern, j, a, places)


def mra_scaling(j: int, a: Mapping[Place, Scalar], top: int, real: bool = True) -> AdelicFunction:
    places = _mra_places(top, real)
    return _mra_tensor({}, {v: SCALING for v in places}, j, a, places)


def _mra_tensor(k, pattern, j, a, places) -> AdelicFunction:
    real_factor = None
    factors = {}
    for v in places:
        av = as_fraction(a.get(v, 0))
        if v == REAL:
            n = int(av)
            real_factor = dyadic.real_scaling(j, n) if pattern[v] == SCALING else dyadic.real_haar_wavelet(j, n)
        elif pattern[v] == SCALING:
            factors[v] = scaling(v, j, av)
        else:
            factors[v] = kozyrev(v, k.get(v, 1), j, av)
    return AdelicFunction(real_factor, factors)


def mra_family(top: int, levels: Iterable[int], depth: int, real: bool = True, with_scaling: bool = True) -> list[AdelicFunction]:
    """Level-0 scaling shifts plus all MRA wavelets on the box."""
    places = _mra_places(top, real)

    def shift_sets():
        per = [list(range(2)) if v == REAL else enumerate_shifts(v, depth) for v in places]
        for combo in itertools.product(*per):
            yield dict(zip(places, combo))

    out = []
    if with_scaling:
        out.extend(mra_scaling(0, a, top, real) for a in shift_sets())
    for j in levels:
        for pat in itertools.product((SCALING, WAVELET), repeat=len(places)):
            if all(x == SCALING for x in pat):
                continue
            pattern = dict(zip(places, pat))
            kspace = [range(1, v) if (v != REAL and pattern[v] == WAVELET) else [None] for v in places]
            for kc in itertools.product(*kspace):
                k = {v: kk for v, kk in zip(places, kc) if kk is not None}
                out.extend(mra_wavelet(k, pattern, j, a, top, real) for a in shift_sets())
    return out


# Gram matrices and residuals


def adelic_gram(fns: Sequence[AdelicFunction], backend: str | None = None) -> np.ndarray:
    """Gram matrix of elementary functions as an elementwise product of place Grams."""
    n = len(fns)
    G = np.ones((n, n), dtype=complex)
    if n == 0:
        return G
    for f in fns[1:]:
        _check_same_ring(fns[0], f)
    if fns[0].real is not None:
        uniq: dict = {}
        idx = [uniq.setdefault(f.real, len(uniq)) for f in fns]
        reals = list(uniq)
        R = np.array([[dyadic.inner_product(a, b) for b in reals] for a in reals])
        G *= R[np.ix_(idx, idx)]
    for p in sorted({p for f in fns for p in f.factors}):
        uniq = {}
        idx = [uniq.setdefault(f.factor(p), len(uniq)) for f in fns]
        L = gram_matrix(list(uniq), backend)
        G *= L[np.ix_(idx, idx)]
    return G


def _telescope(f: AdelicFunction, g: AdelicFunction) -> list[tuple]:
    """Pieces g_1..g_{i-1} (f_i - g_i) f_{i+1}.. summing to f - g, as factor tuples."""
    _check_same_ring(f, g)
    places: list[Place] = ([REAL] if f.real is not None else []) + sorted(set(f.factors) | set(g.factors))

    def fac(h, v):
        return h.real if v == REAL else h.factor(v)

    pieces = []
    for i, v in enumerate(places):
        if v == REAL:
            d = dyadic.add(f.real, dyadic.scale(g.real, -1))
        else:
            d = local.difference(f.factor(v), g.factor(v))
        if d.is_zero():
            continue
        pieces.append(tuple((w, fac(g, w)) for w in places[:i]) + ((v, d),) + tuple((w, fac(f, w)) for w in places[i + 1 :]))
    return pieces


def _piece_inner(s: tuple, t: tuple) -> complex:
    v = 1 + 0j
    dt = dict(t)
    ds = dict(s)
    for w in sorted(set(ds) | set(dt), key=place_key):
        a = ds.get(w) or local.omega(w)
        b = dt.get(w) or local.omega(w)
        v *= dyadic.inner_product(a, b) if w == REAL else local.inner_product(a, b)
        if v == 0:
            break
    return v


def difference_norm(f: AnyAdelic, g: AnyAdelic) -> float:
    """||f - g||, accurate when f and g agree term by term up to small factor changes."""
    fs, gs = terms_of(f), terms_of(g)
    if len(fs) != len(gs):
        d = adelic_inner(f, f) + adelic_inner(g, g) - 2 * adelic_inner(f, g).real
        return max(d.real, 0.0) ** 0.5
    pieces = [pc for s, t in zip(fs, gs) for pc in _telescope(s, t)]
    acc = 0j
    for i, s in enumerate(pieces):
        acc += _piece_inner(s, s)
        for t in pieces[i + 1 :]:
            acc += 2 * _piece_inner(s, t).real
    return max(acc.real, 0.0) ** 0.5


# Lizorkin spaces


@dataclass
class LizorkinReport:
    places: dict = field(default_factory=dict)
    real_moments: list = field(default_factory=list)
    real_ok: bool = True

    @property
    def finite_ok(self) -> bool:
        return all(ok for ok, _ in self.places.values())

    @property
    def ok(self) -> bool:
        return self.finite_ok and self.real_ok

    def failing_place(self) -> Place | None:
        for p, (ok, _) in self.places.items():
            if not ok:
                return p
        return None if self.real_ok else REAL


def lizorkin_check(f: AnyAdelic, real_moment_max: int = 0, tol: float = DEFAULT_TOL) -> LizorkinReport:
    """Zero integrals at every finite place up to P; vanishing real moments 0..N.

    An integral counts as zero below tol * max(1, L1 mass of the factor), so
    rounding in large-amplitude factors is not read as a failure.  A sum is
    tested place by place over the terms whose own finiteness parameter
    reaches that place; if their integrals do not all vanish, the marginal of
    their sum over x_r must vanish instead.
    """
    ts = terms_of(f)
    report = LizorkinReport()
    Ps = [t.P or 2 for t in ts]
    for r in primes_upto(max(Ps, default=2)):
        rel = [t for t, P in zip(ts, Ps) if P >= r]
        ints = [local.integrate(t.factor(r)) for t in rel]
        if all(abs(c) < tol * max(1.0, local.l1_norm(t.factor(r))) for c, t in zip(ints, rel)):
            report.places[r] = (True, sum(ints, 0j))
            continue
        if len(rel) == 1:
            report.places[r] = (False, ints[0])
            continue
        rest = [AdelicFunction(t.real, {q: g for q, g in t.factors.items() if q != r}) for t in rel]
        marg = AdelicSum(tuple(scale(x, c) for x, c in zip(rest, ints) if c != 0))
        size = sum(abs(c) * adelic_norm(x) for x, c in zip(rest, ints))
        value = adelic_norm(marg)
        report.places[r] = (value <= max(tol, 1e-9 * size), value)
    if ts and ts[0].real is not None:
        for s in range(real_moment_max + 1):
            tot = sum((dyadic.moment(t.real, s) for t in ts), 0j)
            report.real_moments.append(tot)
            if abs(tot) >= tol:
                report.real_ok = False
    return report


class NotLizorkin(ValueError):
    def __init__(self, place: Place, value=None):
        super().__init__(f"not a Lizorkin function: fails at place {place}" + ("" if value is None else f" (value {value})"))
        self.place = place
        self.value = value


# finite decomposition on the finite adeles


def _candidate_centers(f: LocalFunction, r: int, widen: int = 0) -> set[Fraction]:
    """Centers of radius-p^r balls meeting the (optionally enlarged) support of f."""
    p = f.p
    out = set()
    for t in f.terms:
        b = t.ball.parent(widen) if widen else t.ball
        if b.gamma <= r:
            out.add(b.parent(r - b.gamma).center)
        else:
            step = Fraction(p) ** (-b.gamma)
            for i in range(p ** (b.gamma - r)):
                out.add(local.Ball(p, b.center + i * step, r).center)
    return out


def place_box(f: LocalFunction, widen: int = 0) -> list[tuple[int, int, Fraction]]:
    """Modified-basis indices (k, j, a) that can pair non-trivially with f.

    Scaling entries phi(x - a) for unit balls meeting supp f; wavelets with
    0 <= j <= -l - 1 (l the constancy exponent) whose support meets supp f.
    """
    p = f.p
    if f.is_zero():
        return []
    l = f.constancy_exponent()
    out = [(0, 0, frac_part(c, p)) for c in sorted(_candidate_centers(f, 0, widen))]
    for j in range(0, -l + widen):
        shifts = sorted({frac_part(c * Fraction(p) ** (-j), p) for c in _candidate_centers(f, -j, widen)})
        out.extend((k, j, a) for k in range(1, p) for a in shifts)
    return sorted(set(out), key=lambda e: (e[1], e[0], e[2]))


@dataclass
class Decomposition:
    coefficients: dict
    residual: float
    box_size: int
    certified: bool | None = None
    max_outside: float | None = None


def _place_coefficients(f: LocalFunction, box) -> dict:
    return {e: local.inner_product(f, _place_basis_element(f.p, *e)) for e in box}


def decompose(zeta: AnyAdelic, tol: float = DEFAULT_TOL, certify: bool = False) -> Decomposition:
    """Coefficients (zeta, Psi_alpha) over the finite box fixed by support and constancy."""
    ts = terms_of(zeta)
    for t in ts:
        if t.real is not None:
            raise ValueError("decomposition is provided on the finite adeles only")
    rep = lizorkin_check(zeta, tol=tol)
    if not rep.finite_ok:
        place = rep.failing_place()
        raise NotLizorkin(place, rep.places[place][1])

    coeffs: dict[AdelicIndex, complex] = defaultdict(complex)
    recon_terms = []
    box_size = 0
    max_outside = 0.0
    for t in ts:
        places = sorted(t.factors)
        per_place = []
        recon = {}
        for p in places:
            f = t.factors[p]
            box = place_box(f)
            box_size += len(box)
            cs = {e: c for e, c in _place_coefficients(f, box).items() if c != 0}
            per_place.append(list(cs.items()))
            recon[p] = local.linear_combination(list(cs.values()), [_place_basis_element(p, *e) for e in cs], tol=0.0) if cs else local.zero(p, 0.0)
            if certify:
                wide = [e for e in place_box(f, widen=1) if e not in set(box)]
                extra = _place_coefficients(f, wide)
                max_outside = max([max_outside] + [abs(c) for c in extra.values()])
        recon_terms.append(AdelicFunction(None, recon))
        for combo in itertools.product(*per_place):
            c = 1 + 0j
            k, j, a = {}, {}, {}
            for p, (e, cp) in zip(places, combo):
                c *= cp
                k[p], j[p], a[p] = e
            coeffs[AdelicIndex.make(k, j, a)] += c
    coeffs = {i: c for i, c in sorted(coeffs.items()) if abs(c) >= tol}

    residual = difference_norm(AdelicSum(ts), AdelicSum(tuple(recon_terms)))
    return Decomposition(coeffs, residual, box_size, (max_outside < tol) if certify else None, max_outside if certify else None)


def reconstruct(coeffs: Mapping[AdelicIndex, complex]) -> AdelicSum:
    return combination(list(coeffs.values()), [adelic_wavelet(i) for i in coeffs])


# JSON


def function_to_json(f: AnyAdelic) -> dict:
    if isinstance(f, AdelicSum):
        return {"kind": "sum", "terms": [function_to_json(t) for t in f.terms]}
    return {
        "kind": "elementary",
        "real": None if f.real is None else dyadic.to_json(f.real),
        "P": f.P,
        "places": {str(p): local.to_json(g) for p, g in f.factors.items()},
    }


def function_from_json(obj: Mapping, tol: float = DEFAULT_TOL) -> AnyAdelic:
    if obj.get("kind") == "sum":
        return AdelicSum(tuple(function_from_json(t, tol) for t in obj["terms"]))
    real = None if obj.get("real") is None else dyadic.from_json(obj["real"])
    factors = {int(p): local.from_json(g, tol) for p, g in obj.get("places", {}).items()}
    return tensor(real, factors, obj.get("P"))
