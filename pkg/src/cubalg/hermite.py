"""Probabilists' Hermite polynomials: products, aliasing on Gaussian nodes,
and the weighing polynomial.

Everything here is exact (Python ints and Fractions) except where a routine
says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

import mpmath
import numpy as np
import scipy.linalg

from .errors import InputError, NumericError
from .ortho import HERMITE, UniPoly, nodes, pi_table

__all__ = [
    "HermiteExpansion",
    "hermite_poly",
    "product_expand",
    "aliasing_nf",
    "aliasing_symbolic",
    "weighing_polynomial",
    "weighing_values",
    "snap_rational",
]

# integer coefficients grow like factorials; beyond this the exact
# recursions still work but get slow
MAX_EXACT_DEGREE = 64


@dataclass(frozen=True)
class HermiteExpansion:
    """Finite expansion ``sum_j c_j H_j`` keyed by degree."""

    coeffs: Mapping[int, object]

    def __post_init__(self):
        clean = {int(j): c for j, c in sorted(self.coeffs.items()) if c != 0}
        if any(j < 0 for j in clean):
            raise InputError("negative Hermite index")
        object.__setattr__(self, "coeffs", clean)

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __getitem__(self, j: int):
        return self.coeffs.get(j, 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, HermiteExpansion):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs.items()))

    def __call__(self, x):
        if not self.coeffs:
            return 0
        prev, cur = 0, 1
        total = self[0] * cur
        for k in range(self.degree):
            prev, cur = cur, x * cur - k * prev
            if k + 1 in self.coeffs:
                total = total + self.coeffs[k + 1] * cur
        return total

    def to_monomial(self) -> UniPoly:
        out: list = [0] * (self.degree + 1)
        for j, c in self.coeffs.items():
            for i, a in enumerate(hermite_poly(j).coeffs):
                out[i] += c * a
        return UniPoly(tuple(out))

    def to_unipoly(self) -> UniPoly:
        return UniPoly(tuple(self[j] for j in range(self.degree + 1)), "ortho", HERMITE)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for j in sorted(self.coeffs):
            c = self.coeffs[j]
            neg = c < 0
            mag = -c if neg else c
            text = _format_number(mag)
            term = f"H{j}" if text == "1" else f"{text} H{j}"
            if not parts:
                parts.append(("-" if neg else "") + term)
            else:
                parts.append(("- " if neg else "+ ") + term)
        return " ".join(parts)


def _format_number(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, float) and c.is_integer():
        return str(int(c))
    return str(c) if isinstance(c, int) else repr(c)


@lru_cache(maxsize=None)
def hermite_poly(n: int) -> UniPoly:
    """``H_n`` in the monomial basis, via ``H_{n+1} = x H_n - n H_{n-1}``."""
    if n < 0:
        raise InputError("degree must be non-negative")
    prev, cur = (), (1,)
    for k in range(n):
        nxt = [0] * (len(cur) + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] += c
        for i, c in enumerate(prev):
            nxt[i] -= k * c
        prev, cur = cur, tuple(nxt)
    return UniPoly(cur)


def _product_coefficient(n: int, k: int, i: int) -> int:
    return math.comb(n, i) * math.comb(k, i) * math.factorial(i)


def product_expand(k: int, n: int) -> HermiteExpansion:
    """Fourier expansion of ``H_k H_n``.

    ``H_k H_n = H_{n+k} + sum_{i=1}^{min(n,k)} C(n,i) C(k,i) i! H_{n+k-2i}``.
    """
    if k < 0 or n < 0:
        raise InputError("degrees must be non-negative")
    out = {n + k: 1}
    for i in range(1, min(n, k) + 1):
        out[n + k - 2 * i] = _product_coefficient(n, k, i)
    return HermiteExpansion(out)


@lru_cache(maxsize=None)
def _alias(m: int, n: int) -> tuple:
    # coefficients of NF(H_m) over H_0..H_{n-1} on the zeros of H_n
    if m < n:
        return tuple(1 if j == m else 0 for j in range(n))
    if m == n:
        return (0,) * n
    k = m - n
    out = [0] * n
    for i in range(1, min(n, k) + 1):
        c = _product_coefficient(n, k, i)
        for j, h in enumerate(_alias(m - 2 * i, n)):
            out[j] -= c * h
    return tuple(out)


def aliasing_nf(k: int, n: int) -> HermiteExpansion:
    """Normal form of ``H_{n+k}`` on the zeros of ``H_n``, over ``H_0..H_{n-1}``.

    Uses the closed recursion obtained from the product formula with
    ``H_n = 0`` on the node set.
    """
    if n < 1:
        raise InputError("design degree n must be at least 1")
    if k < 0:
        raise InputError("offset k must be non-negative")
    if n + k > MAX_EXACT_DEGREE:
        raise InputError(f"n + k must not exceed {MAX_EXACT_DEGREE}")
    return HermiteExpansion(dict(enumerate(_alias(n + k, n))))


def aliasing_symbolic(k: int) -> dict:
    """Aliasing of ``H_{n+k}`` for symbolic ``n``.

    Returns ``{j: coefficient}`` meaning ``H_{n+k} == sum_j coefficient * H_{n-j}``
    on the zeros of ``H_n``, each coefficient a factored sympy expression in
    the symbol ``n``. Valid for every integer ``n >= k``.
    """
    import sympy

    n = sympy.Symbol("n", integer=True, positive=True)

    @lru_cache(maxsize=None)
    def rec(kk: int) -> tuple:
        if kk < 0:
            return ((-kk, sympy.Integer(1)),)
        if kk == 0:
            return ()
        acc: dict = {}
        for i in range(1, kk + 1):
            falling = sympy.Integer(1)
            for r in range(i):
                falling *= n - r
            c = falling / sympy.factorial(i) * math.comb(kk, i) * math.factorial(i)
            for j, v in rec(kk - 2 * i):
                acc[j] = acc.get(j, 0) - c * v
        return tuple((j, sympy.expand(v)) for j, v in sorted(acc.items())
                     if sympy.expand(v) != 0)

    return {j: sympy.factor(v) for j, v in rec(k)}


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    # rational with the smallest denominator in [lo, hi] (continued fractions)
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    return fl + 1 / _simplest_between(1 / (hi - fl), 1 / (lo - fl))


def snap_rational(value: float, max_denominator: int = 10**6, tol: float = 1e-9):
    """Simplest rational within ``tol`` of ``value``, or ``None`` when its
    denominator exceeds ``max_denominator``."""
    x = Fraction(value)
    lo, hi = x - Fraction(tol), x + Fraction(tol)
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        frac = -_simplest_between(-hi, -lo)
    else:
        frac = _simplest_between(lo, hi)
    return frac if frac.denominator <= max_denominator else None


def _weighing_numeric(n: int) -> HermiteExpansion:
    z = nodes(HERMITE, n)
    table = pi_table(HERMITE, n - 1, z)
    target = math.factorial(n - 1) / n
    try:
        coef = scipy.linalg.solve(table, target / table[:, n - 1] ** 2)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular Hermite interpolation matrix: {exc}") from exc
    # lambda(z) H_{n-1}(z)^2 == (n-1)!/n at every node, measured against the
    # size of the terms since the outer weights are tiny
    want = target / table[:, n - 1] ** 2

    def residual(c):
        return np.max(np.abs(table @ c - want) / (np.abs(table) @ np.abs(c)))

    if residual(coef) > 1e-8:
        raise NumericError("weighing identity fails at the nodes")
    snapped = [snap_rational(float(c)) for c in coef]
    if all(s is not None for s in snapped):
        if residual(np.array([float(s) for s in snapped])) < 1e-12:
            return HermiteExpansion(dict(enumerate(snapped)))
    return HermiteExpansion(dict(enumerate(float(c) for c in coef)))


def _poly_mod(a: list, m: list) -> list:
    a = list(a)
    while len(a) >= len(m):
        c = a[-1] / m[-1]
        shift = len(a) - len(m)
        for i, v in enumerate(m):
            a[shift + i] -= c * v
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _inverse_mod(a: list, m: list) -> list:
    """Inverse of ``a`` modulo ``m`` over Q by the extended Euclidean algorithm."""
    r0, r1 = [Fraction(c) for c in m], _poly_mod([Fraction(c) for c in a], m)
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q: list = [Fraction(0)] * (len(r0) - len(r1) + 1)
        r = list(r0)
        while len(r) >= len(r1):
            c = r[-1] / r1[-1]
            shift = len(r) - len(r1)
            q[shift] = c
            for i, v in enumerate(r1):
                r[shift + i] -= c * v
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        qs = _poly_mul(q, s1)
        s_new = [(s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)
                 for i in range(max(len(s0), len(qs)))]
        while s_new and s_new[-1] == 0:
            s_new.pop()
        r0, r1, s0, s1 = r1, r, s1, s_new
    if not r1:
        raise NumericError("polynomials are not coprime")
    inv = [c / r1[0] for c in s1]
    return _poly_mod(inv, m)


def _weighing_exact(n: int) -> HermiteExpansion:
    h_n = list(hermite_poly(n).coeffs)
    h_prev = hermite_poly(n - 1)
    square = list((h_prev * h_prev).coeffs)
    inv = _inverse_mod(square, h_n)
    scale = Fraction(math.factorial(n - 1), n)
    lam = UniPoly(tuple(scale * c for c in inv))
    ortho = lam.to_ortho(HERMITE)
    return HermiteExpansion({j: Fraction(c) for j, c in enumerate(ortho.coeffs)})


def weighing_polynomial(n: int, method: str = "exact") -> HermiteExpansion:
    """The degree ``n-1`` polynomial whose values on the zeros of ``H_n`` are
    the Gaussian weights ``(n-1)!/n * H_{n-1}(z)**-2``.

    ``method="exact"`` inverts ``H_{n-1}**2`` modulo ``H_n`` over the
    rationals. ``method="numeric"`` interpolates the closed-form weights at
    floating-point nodes and snaps each coefficient to a rational with
    denominator at most 10**6 when one lies within 1e-9; coefficients that
    do not snap stay floats.
    """
    if n < 1:
        raise InputError("need at least one node")
    if n == 1:
        return HermiteExpansion({0: Fraction(1)})
    if method == "exact":
        if n > MAX_EXACT_DEGREE:
            raise InputError(f"exact weighing polynomial limited to n <= {MAX_EXACT_DEGREE}")
        return _weighing_exact(n)
    if method == "numeric":
        return _weighing_numeric(n)
    raise InputError(f"unknown method {method!r}")


def weighing_values(n: int, dps: int = 60) -> list[float]:
    """The weighing polynomial evaluated at the zeros of ``H_n``, ascending.

    The polynomial is steep near the outer nodes, so both the nodes and the
    evaluation are carried out with ``dps`` decimal digits.
    """
    lam = weighing_polynomial(n)
    with mpmath.workdps(dps):
        out = []
        h_n = hermite_poly(n).coeffs
        for z0 in nodes(HERMITE, n):
            z = mpmath.mpf(float(z0))
            for _ in range(100):
                p = mpmath.polyval([mpmath.mpf(c) for c in reversed(h_n)], z, derivative=True)
                step = p[0] / p[1]
                z -= step
                if abs(step) < mpmath.mpf(10) ** (-dps + 5):
                    break
            total = mpmath.mpf(0)
            prev, cur = mpmath.mpf(0), mpmath.mpf(1)
            for k in range(lam.degree + 1):
                c = lam[k]
                if c:
                    total += mpmath.mpf(c.numerator) / c.denominator * cur \
                        if isinstance(c, Fraction) else mpmath.mpf(c) * cur
                prev, cur = cur, z * cur - k * prev
            out.append(float(total))
    return out
