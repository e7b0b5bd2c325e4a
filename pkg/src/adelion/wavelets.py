"""p-adic wavelet families: Kozyrev, the parametric Haar family, modified bases."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .local import (
    LocalFunction,
    dilate,
    difference,
    inner_product,
    l2_norm,
    linear_combination,
    modulate,
    multiply,
    omega,
    scale,
    translate,
)
from .padic import Ball, Scalar, as_fraction, check_prime, enumerate_shifts, frac_part, is_shift, root_of_unity


def _half_power(p: int, j: int) -> float:
    return float(p) ** (j / 2)


def place_wavelet(psi: LocalFunction, j: int, a: Scalar) -> LocalFunction:
    """p^{j/2} psi(p^{-j} x - a) for any generator psi."""
    return scale(dilate(translate(psi, a), -j), _half_power(psi.p, j))


def scaling(p: int, j: int = 0, a: Scalar = 0) -> LocalFunction:
    """p^{j/2} phi(p^{-j} x - a), phi = Omega."""
    return place_wavelet(omega(p), j, a)


def kozyrev(p: int, k: int, j: int = 0, a: Scalar = 0) -> LocalFunction:
    """psi_{k; j a}(x) = p^{j/2} chi_p((k/p)(p^{-j} x - a)) Omega(|p^{-j} x - a|_p)."""
    check_prime(p)
    if not 1 <= k <= p - 1:
        raise ValueError(f"k must lie in 1..{p - 1}, got {k}")
    if not is_shift(a, p):
        raise ValueError(f"{a} is not in I_{p}")
    return place_wavelet(modulate(omega(p), Fraction(k, p)), j, a)


@dataclass(frozen=True)
class HaarFamilyParams:
    p: int
    s: int
    U: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        p, s = self.p, self.s
        check_prime(p)
        if s < 0:
            raise ValueError("s must be non-negative")
        U = np.asarray(self.U, dtype=complex)
        sigma = np.asarray(self.sigma, dtype=complex)
        if U.shape != (p - 1, p - 1):
            raise ValueError(f"U must be {(p - 1, p - 1)}")
        if sigma.shape != (p - 1, p**s):
            raise ValueError(f"sigma must be {(p - 1, p**s)}")
        if np.abs(U.conj().T @ U - np.eye(p - 1)).max() > 1e-10:
            raise ValueError("U is not unitary")
        if np.abs(np.abs(sigma) - 1).max() > 1e-10:
            raise ValueError("sigma entries must be unimodular")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "sigma", sigma)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_params(p: int, s: int, rng: np.random.Generator) -> HaarFamilyParams:
    sigma = np.exp(2j * np.pi * rng.random((p - 1, p**s)))
    return HaarFamilyParams(p, s, random_unitary(p - 1, rng), sigma)


def haar_coefficients(params: HaarFamilyParams, mu: int) -> np.ndarray:
    """alpha^mu_{nu; k}, rows nu = 1..p-1, columns k = 0..p^s-1."""
    p, s = params.p, params.s
    if not 1 <= mu <= p - 1:
        raise ValueError("mu out of range")
    N = p**s
    U, sigma = params.U, params.sigma
    out = np.zeros((p - 1, N), dtype=complex)
    for nu in range(1, p):
        for k in range(N):
            # e^{-2 pi i (-nu/p + m) k / p^s}
            e = [root_of_unity(Fraction((nu - p * m) * k, p * N)) for m in range(N)]
            if mu == nu:
                acc = sum(e[m] * sigma[mu - 1, m] for m in range(N)) * U[mu - 1, mu - 1]
                out[nu - 1, k] = -acc / N
                continue
            num = 1 - root_of_unity(Fraction(mu - nu, p))
            acc = 0j
            for m in range(N):
                inner = 0j
                for n in range(N):
                    x = Fraction(mu - nu + p * (m - n), p * N)
                    assert x.denominator != 1, "vanishing denominator"
                    inner += num / (1 - root_of_unity(x))
                acc += e[m] * inner * sigma[nu - 1, m]
            out[nu - 1, k] = -acc * U[nu - 1, mu - 1] / N**2
    return out


def _combine_shifted(p: int, s: int, coeffs: np.ndarray) -> LocalFunction:
    N = p**s
    fns, cs = [], []
    for nu in range(1, p):
        psi0 = kozyrev(p, nu)
        for k in range(N):
            fns.append(translate(psi0, Fraction(k, N)))
            cs.append(coeffs[nu - 1, k])
    return linear_combination(cs, fns)


def haar_wavelet(params: HaarFamilyParams, mu: int) -> LocalFunction:
    """psi_mu(x) = sum_nu sum_k alpha^mu_{nu;k} psi0_nu(x - k/p^s)."""
    return _combine_shifted(params.p, params.s, haar_coefficients(params, mu))


def haar2_coefficients(s: int, gammas: Sequence[complex]) -> np.ndarray:
    N = 2**s
    if len(gammas) != N:
        raise ValueError(f"need {N} phases")
    if any(abs(abs(g) - 1) > 1e-10 for g in gammas):
        raise ValueError("phases must be unimodular")
    alpha = np.zeros(N, dtype=complex)
    for k in range(N):
        # e^{-i pi (2r - 1) k / 2^s}
        alpha[k] = sum(g * root_of_unity(Fraction(-(2 * r - 1) * k, 2 * N)) for r, g in enumerate(gammas)) / N
    return alpha


def haar2_wavelet(s: int, gammas: Sequence[complex]) -> LocalFunction:
    return _combine_shifted(2, s, haar2_coefficients(s, gammas)[None, :])


def modified_basis(p: int, j_max: int, depth: int) -> list[LocalFunction]:
    """{phi(x - a)} together with {psi_{k; j a} : 0 <= j <= j_max}."""
    if j_max < 0:
        raise ValueError("j_max must be non-negative")
    shifts = enumerate_shifts(p, depth)
    out = [translate(omega(p), a) for a in shifts]
    for j in range(j_max + 1):
        for k in range(1, p):
            out.extend(kozyrev(p, k, j, a) for a in shifts)
    return out


def restrict_to_unit_ball(f: LocalFunction) -> LocalFunction:
    return multiply(f, omega(f.p))


def restricted_basis(p: int, j_max: int) -> list[LocalFunction]:
    """{phi} together with the restrictions of psi_{k; j a}, j >= 0, a in I_p^j."""
    out = [omega(p)]
    for j in range(j_max + 1):
        for k in range(1, p):
            out.extend(restrict_to_unit_ball(kozyrev(p, k, j, a)) for a in enumerate_shifts(p, j))
    return out


def gram_matrix(fns: Sequence[LocalFunction], backend: str | None = None) -> np.ndarray:
    """G[i, j] = (f_i, f_j)."""
    if not fns:
        return np.zeros((0, 0), dtype=complex)
    p = fns[0].p
    if any(f.p != p for f in fns):
        raise ValueError("mixed places")
    if backend != "exact":
        G = _kernels.gram(fns, p, backend)
        if G is not None:
            return G
    n = len(fns)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = inner_product(fns[i], fns[j])
            G[j, i] = G[i, j].conjugate()
    return G


def gram_deviation(G: np.ndarray) -> float:
    if G.size == 0:
        return 0.0
    return float(np.abs(G - np.eye(len(G))).max())


def _balls_at_level(f: LocalFunction, r: int) -> set[Fraction]:
    """Canonical centers of the radius-p^r balls meeting supp f."""
    p = f.p
    out = set()
    for t in f.terms:
        b = t.ball
        if b.gamma <= r:
            out.add(b.parent(r - b.gamma).center)
        else:
            step = Fraction(p) ** (-b.gamma)
            out.update(Ball(p, b.center + i * step, r).center for i in range(p ** (b.gamma - r)))
    return out


def expand_in_scaling(f: LocalFunction, J: int) -> tuple[dict[Fraction, complex], float]:
    """Coefficients of f in {p^{J/2} phi(p^{-J} x - a)} and the residual norm."""
    p = f.p
    coeffs = {}
    for c in sorted(_balls_at_level(f, -J)):
        a = frac_part(c * Fraction(p) ** (-J), p)
        coeffs[a] = inner_product(f, scaling(p, J, a))
    recon = linear_combination(list(coeffs.values()), [scaling(p, J, a) for a in coeffs]) if coeffs else scale(f, 0)
    return coeffs, l2_norm(difference(f, recon))


def support_bound_ok(f: LocalFunction, s: int) -> bool:
    """True when supp f lies in B_s(0)."""
    return all(t.ball.gamma <= s and frac_part(t.ball.center * Fraction(f.p) ** s, f.p) == 0 for t in f.terms)
