"""Univariate orthogonal polynomial systems given by three-term recurrences.

A system is described by coefficient sequences ``gamma``, ``alpha`` and
``beta`` with

    pi_{k+1}(x) = (gamma_k x - alpha_k) pi_k(x) - beta_k pi_{k-1}(x),
    pi_{-1} = 0,  pi_0 = 1.

``beta_0`` carries the total mass of the measure, i.e. ``||pi_0||^2``; the
built-in systems are probability measures so ``beta_0 == 1``.

Exact inputs (ints and :class:`fractions.Fraction`) stay exact through the
conversions; floats go through numpy/scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    CoefficientExhaustedError,
    DegenerateNodesError,
    InputError,
    InvalidDesignError,
    NumericError,
    UnsupportedNormalizationError,
)

__all__ = [
    "RecurrenceSystem",
    "UniPoly",
    "QuadratureRule",
    "HERMITE",
    "LEGENDRE",
    "CHEBYSHEV",
    "SYSTEMS",
    "get_system",
    "eval_pi",
    "eval_pi_all",
    "pi_table",
    "norm_sq",
    "monomial_to_ortho",
    "to_ortho",
    "ortho_to_monomial",
    "poly_divmod",
    "nodes",
    "interpolatory_weights",
    "gauss_rule",
    "quadrature_error_1d",
    "cd_kernel",
    "fourier_identify",
]


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


@dataclass(frozen=True, eq=False)
class RecurrenceSystem:
    """Coefficients of a three-term recurrence and the moments of its measure.

    ``gamma``, ``alpha`` and ``beta`` map an index ``k`` to a coefficient.
    ``size`` bounds the available indices (``None`` means unbounded).
    ``moment_fn`` gives ``E(X**k)`` in closed form; without it moments are
    derived from the monomial-to-orthogonal conversion.
    """

    name: str
    gamma: Callable[[int], Number]
    alpha: Callable[[int], Number]
    beta: Callable[[int], Number]
    monic: bool = True
    size: int | None = None
    moment_fn: Callable[[int], Number] | None = None
    symbol: str = "pi"
    exact: bool = False
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    @classmethod
    def from_sequences(cls, name: str, gamma: Sequence, alpha: Sequence, beta: Sequence,
                       symbol: str = "pi") -> "RecurrenceSystem":
        if not (len(gamma) == len(alpha) == len(beta)):
            raise InputError("gamma, alpha and beta must have equal length")
        g, a, b = tuple(gamma), tuple(alpha), tuple(beta)
        return cls(
            name=name,
            gamma=g.__getitem__,
            alpha=a.__getitem__,
            beta=b.__getitem__,
            monic=all(v == 1 for v in g),
            size=len(g),
            symbol=symbol,
            exact=all(_is_exact(v) for v in g + a + b),
        )

    def _check(self, k: int) -> None:
        if k < 0:
            raise InputError(f"negative recurrence index {k}")
        if self.size is not None and k >= self.size:
            raise CoefficientExhaustedError(
                f"system {self.name!r} has {self.size} coefficients, index {k} requested")

    def coeffs(self, k: int) -> tuple:
        """Return ``(gamma_k, alpha_k, beta_k)``."""
        self._check(k)
        return self.gamma(k), self.alpha(k), self.beta(k)

    def validate(self, n: int) -> None:
        """Check positivity of the recurrence up to index ``n``.

        Requires ``gamma_k != 0`` and, after rescaling to the monic system,
        ``beta_k > 0`` for ``1 <= k <= n``.
        """
        for k in range(n + 1):
            g, _, b = self.coeffs(k)
            if g == 0:
                raise InputError(f"gamma_{k} = 0 in system {self.name!r}")
            if k == 0:
                if b <= 0:
                    raise InputError(f"beta_0 must be positive in system {self.name!r}")
            elif b / (g * self.gamma(k - 1)) <= 0:
                raise InputError(f"beta_{k} is not positive in system {self.name!r}")

    def moment(self, k: int):
        """``E(X**k)`` under the (unnormalised) measure of the system."""
        if self.moment_fn is not None:
            return self.moment_fn(k)
        return monomial_to_ortho(self, k).coeffs[0] * self.beta(0)

    def __repr__(self) -> str:
        return f"RecurrenceSystem({self.name!r})"


def _hermite_moment(k: int) -> int:
    if k % 2:
        return 0
    out = 1
    for j in range(k - 1, 0, -2):
        out *= j
    return out


def _uniform_moment(k: int) -> Fraction:
    return Fraction(0) if k % 2 else Fraction(1, k + 1)


def _arcsine_moment(k: int) -> Fraction:
    if k % 2:
        return Fraction(0)
    m = k // 2
    return Fraction(math.comb(2 * m, m), 4 ** m)


def _one(k: int) -> int:
    return 1


def _zero(k: int) -> int:
    return 0


HERMITE = RecurrenceSystem(
    name="hermite",
    gamma=_one,
    alpha=_zero,
    beta=lambda k: k if k > 0 else 1,
    moment_fn=_hermite_moment,
    symbol="H",
    exact=True,
)

LEGENDRE = RecurrenceSystem(
    name="legendre",
    gamma=_one,
    alpha=_zero,
    beta=lambda k: Fraction(k * k, 4 * k * k - 1) if k > 0 else Fraction(1),
    moment_fn=_uniform_moment,
    symbol="P",
    exact=True,
)

# monic Chebyshev polynomials of the first kind, arcsine law on [-1, 1]
CHEBYSHEV = RecurrenceSystem(
    name="chebyshev",
    gamma=_one,
    alpha=_zero,
    beta=lambda k: Fraction(1) if k == 0 else (Fraction(1, 2) if k == 1 else Fraction(1, 4)),
    moment_fn=_arcsine_moment,
    symbol="T",
    exact=True,
)

SYSTEMS = {s.name: s for s in (HERMITE, LEGENDRE, CHEBYSHEV)}


def get_system(name: str) -> RecurrenceSystem:
    try:
        return SYSTEMS[name.lower()]
    except KeyError:
        raise InputError(f"unknown orthogonal system {name!r}; "
                         f"known: {', '.join(sorted(SYSTEMS))}") from None


def _trim(coeffs) -> tuple:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial in the monomial or an orthogonal basis."""

    coeffs: tuple
    basis: str = "monomial"
    system: RecurrenceSystem | None = None

    def __post_init__(self):
        if self.basis not in ("monomial", "ortho"):
            raise InputError(f"unknown basis {self.basis!r}")
        if self.basis == "ortho" and self.system is None:
            raise InputError("an ortho polynomial needs a system")
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        """Degree, ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def __call__(self, x):
        if self.basis == "monomial":
            acc = 0
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        if not self.coeffs:
            return 0
        values = eval_pi_all(self.system, self.degree, x)
        return sum(c * v for c, v in zip(self.coeffs, values))

    def to_ortho(self, system: RecurrenceSystem) -> "UniPoly":
        if self.basis == "ortho":
            if self.system is not system:
                return self.to_monomial().to_ortho(system)
            return self
        return to_ortho(system, self)

    def to_monomial(self) -> "UniPoly":
        if self.basis == "monomial":
            return self
        return ortho_to_monomial(self.system, self)

    def __add__(self, other: "UniPoly") -> "UniPoly":
        self._same_basis(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(tuple(x + y for x, y in zip(a, b)), self.basis, self.system)

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs), self.basis, self.system)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            if self.basis != "monomial" or other.basis != "monomial":
                raise InputError("products are only defined in the monomial basis")
            if not self.coeffs or not other.coeffs:
                return UniPoly(())
            out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return UniPoly(tuple(out))
        return UniPoly(tuple(c * other for c in self.coeffs), self.basis, self.system)

    __rmul__ = __mul__

    def _same_basis(self, other: "UniPoly") -> None:
        if self.basis != other.basis or self.system is not other.system:
            raise InputError("polynomials are in different bases")

    @classmethod
    def from_roots(cls, roots) -> "UniPoly":
        """Monic polynomial with the given roots."""
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    def __call__(self, f) -> float:
        return float(sum(w * f(z) for z, w in zip(self.nodes, self.weights)))


def eval_pi_all(system: RecurrenceSystem, n: int, x) -> list:
    """Values ``[pi_0(x), ..., pi_n(x)]`` by forward recurrence."""
    if n < 0:
        raise InputError("degree must be non-negative")
    values = [1]
    prev, cur = 0, 1
    for k in range(n):
        g, a, b = system.coeffs(k)
        prev, cur = cur, (g * x - a) * cur - b * prev
        values.append(cur)
    return values


def eval_pi(system: RecurrenceSystem, n: int, x):
    """``pi_n(x)`` by forward three-term recurrence."""
    return eval_pi_all(system, n, x)[-1]


def pi_table(system: RecurrenceSystem, n: int, xs) -> np.ndarray:
    """Float matrix ``T[i, k] = pi_k(xs[i])`` for ``k = 0..n``."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty((xs.shape[0], n + 1))
    out[:, 0] = 1.0
    prev = np.zeros_like(xs)
    for k in range(n):
        g, a, b = (float(v) for v in system.coeffs(k))
        out[:, k + 1] = (g * xs - a) * out[:, k] - b * prev
        prev = out[:, k]
    return out


def norm_sq(system: RecurrenceSystem, n: int):
    """``||pi_n||^2 = beta_n beta_{n-1} ... beta_0`` for monic systems."""
    if not system.monic:
        raise UnsupportedNormalizationError(
            f"norm from betas needs a monic system, {system.name!r} is not")
    if n < 0:
        raise InputError("degree must be non-negative")
    out = 1
    for k in range(n + 1):
        out = out * system.coeffs(k)[2]
    return out


def monomial_to_ortho(system: RecurrenceSystem, k: int) -> UniPoly:
    """Fourier coefficients ``c_j(x**k)``, ``j = 0..k``."""
    if k < 0:
        raise InputError("degree must be non-negative")
    rows = system._cache.setdefault("m2o", [(1,)])
    while len(rows) <= k:
        m = len(rows)
        prev = rows[-1] + (0, 0)
        row = []
        for j in range(m + 1):
            c = 0
            if j >= 1:
                c += _div(prev[j - 1], system.coeffs(j - 1)[0])
            if prev[j]:
                g, a, _ = system.coeffs(j)
                c += _div(prev[j] * a, g)
            if prev[j + 1]:
                g, _, b = system.coeffs(j + 1)
                c += _div(prev[j + 1] * b, g)
            row.append(_normalize(c))
        rows.append(tuple(row))
    return UniPoly(rows[k], "ortho", system)


def _div(a, b):
    if b == 1:
        return a
    if _is_exact(a) and _is_exact(b):
        return Fraction(a) / b
    return a / b


def _normalize(c):
    # keeps integer-valued Fractions as ints so Hermite tables print cleanly
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def to_ortho(system: RecurrenceSystem, p: UniPoly) -> UniPoly:
    """Rewrite a monomial-basis polynomial over ``pi_0, pi_1, ...``."""
    if p.basis != "monomial":
        raise InputError("expected a monomial-basis polynomial")
    out = [0] * len(p.coeffs)
    for k, a in enumerate(p.coeffs):
        if a == 0:
            continue
        for j, c in enumerate(monomial_to_ortho(system, k).coeffs):
            out[j] += a * c
    return UniPoly(tuple(_normalize(c) for c in out), "ortho", system)


def _pi_monomials(system: RecurrenceSystem, n: int) -> list:
    rows = system._cache.setdefault("o2m", [(1,)])
    while len(rows) <= n:
        k = len(rows) - 1
        g, a, b = system.coeffs(k)
        cur = rows[k] + (0,)
        prev = (rows[k - 1] if k >= 1 else ()) + (0,) * (k + 2)
        shifted = (0,) + rows[k]
        rows.append(tuple(_normalize(g * shifted[i] - a * cur[i] - b * prev[i])
                          for i in range(k + 2)))
    return rows


def ortho_to_monomial(system: RecurrenceSystem, p: UniPoly) -> UniPoly:
    """Expand ``sum c_k pi_k`` in the monomial basis."""
    if p.basis != "ortho":
        raise InputError("expected an ortho-basis polynomial")
    if not p.coeffs:
        return UniPoly(())
    rows = _pi_monomials(system, p.degree)
    out = [0] * len(p.coeffs)
    for k, c in enumerate(p.coeffs):
        if c == 0:
            continue
        for i, a in enumerate(rows[k]):
            out[i] += c * a
    return UniPoly(tuple(_normalize(c) for c in out))


def poly_divmod(p: UniPoly, g: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Univariate division ``p = q*g + r`` with ``deg r < deg g``."""
    if p.basis != "monomial" or g.basis != "monomial":
        raise InputError("division needs monomial-basis polynomials")
    if g.degree < 0:
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(p.coeffs)
    m = g.degree
    lead = g.coeffs[-1]
    quot = [0] * max(len(rem) - m, 0)
    for i in range(len(rem) - 1, m - 1, -1):
        c = _normalize(_div(rem[i], lead))
        quot[i - m] = c
        if c:
            for j, gc in enumerate(g.coeffs):
                rem[i - m + j] -= c * gc
        rem[i] = 0
    return UniPoly(tuple(quot)), UniPoly(tuple(rem[:m]))


def _monic_jacobi(system: RecurrenceSystem, n: int) -> tuple[np.ndarray, np.ndarray]:
    diag = np.empty(n)
    off = np.empty(max(n - 1, 0))
    for k in range(n):
        g, a, b = system.coeffs(k)
        diag[k] = float(a) / float(g)
        if k >= 1:
            bk = float(b) / (float(g) * float(system.gamma(k - 1)))
            if bk <= 0:
                raise InputError(f"beta_{k} is not positive in system {system.name!r}")
            off[k - 1] = math.sqrt(bk)
    return diag, off


def nodes(system: RecurrenceSystem, n: int) -> np.ndarray:
    """Zeros of ``pi_n``, ascending, as eigenvalues of the Jacobi matrix."""
    if n < 1:
        raise InputError("need at least one node")
    system.validate(n - 1)
    diag, off = _monic_jacobi(system, n)
    try:
        z = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"Jacobi eigenproblem failed: {exc}") from exc
    z = np.sort(z)
    if not np.any(diag):
        # symmetric measure: zeros come in +- pairs, and 0 when n is odd
        z = (z - z[::-1]) / 2
    # Newton step size as residual: |pi_n(z) / pi_n'(z)|
    vals, ders = _values_and_derivatives(diag, off ** 2, n, z)
    step = np.abs(vals / ders)
    if np.any(step > 1e-9 * np.maximum(1.0, np.abs(z))):
        raise NumericError("node residual above tolerance")
    return z


def _values_and_derivatives(diag, off_sq, n, z):
    p_prev, p = np.zeros_like(z), np.ones_like(z)
    d_prev, d = np.zeros_like(z), np.zeros_like(z)
    for k in range(n):
        b = off_sq[k - 1] if k >= 1 else 0.0
        p_next = (z - diag[k]) * p - b * p_prev
        d_next = p + (z - diag[k]) * d - b * d_prev
        p_prev, p, d_prev, d = p, p_next, d, d_next
    return p, d


def _orthonormal_scale(system: RecurrenceSystem, n: int) -> np.ndarray:
    return np.sqrt(np.array([float(norm_sq(system, k)) for k in range(n)]))


def interpolatory_weights(system: RecurrenceSystem, points) -> np.ndarray:
    """Weights ``E(l_z(X))`` of the interpolatory rule on distinct ``points``.

    The Lagrange polynomial ``l_z`` has orthonormal coefficients ``d`` solving
    ``M d = e_z`` with ``M[i, k] = pi_k(points[i]) / ||pi_k||``; only the
    constant term survives the expectation, so all weights come from the
    single transposed system ``M^T w = ||pi_0|| e_0``.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if n == 0:
        raise InputError("empty node set")
    M = pi_table(system, n - 1, pts)
    if system.monic:
        M = M / _orthonormal_scale(system, n)
        rhs0 = math.sqrt(float(system.beta(0)))
    else:
        rhs0 = float(system.beta(0))
    rhs = np.zeros(n)
    rhs[0] = rhs0
    try:
        w = scipy.linalg.solve(M.T, rhs)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning) as exc:
        raise DegenerateNodesError(f"singular evaluation matrix: {exc}") from exc
    if not np.all(np.isfinite(w)) or np.linalg.cond(M) > 1e14:
        raise DegenerateNodesError("evaluation matrix is numerically singular")
    return w


def gauss_rule(system: RecurrenceSystem, n: int) -> QuadratureRule:
    """Gaussian rule on the zeros of ``pi_n``; exact up to degree ``2n-1``."""
    z = nodes(system, n)
    w = interpolatory_weights(system, z)
    if np.all(z == -z[::-1]):
        w = (w + w[::-1]) / 2
    return QuadratureRule(nodes=z, weights=w, degree=2 * n - 1)


def _check_distinct_real_roots(g: UniPoly) -> None:
    roots = np.roots([float(c) for c in reversed(g.coeffs)])
    if roots.size == 0:
        return
    scale = max(1.0, float(np.max(np.abs(roots))))
    if np.any(np.abs(roots.imag) > 1e-7 * scale):
        raise InvalidDesignError("node polynomial has non-real roots")
    r = np.sort(roots.real)
    if r.size > 1 and np.min(np.diff(r)) < 1e-7 * scale:
        raise InvalidDesignError("node polynomial has repeated roots")


def quadrature_error_1d(system: RecurrenceSystem, p: UniPoly, node_poly: UniPoly):
    """``E(p(X)) - sum_z p(z) lambda_z`` for the design ``{node_poly = 0}``.

    With ``p = q*g + r`` the error is ``sum_k c_k(q) c_k(g) ||pi_k||^2``.
    """
    if node_poly.basis != "monomial" or p.basis != "monomial":
        raise InputError("expected monomial-basis polynomials")
    if node_poly.degree < 1 or node_poly.coeffs[-1] != 1:
        raise InvalidDesignError("node polynomial must be monic of positive degree")
    _check_distinct_real_roots(node_poly)
    q, _ = poly_divmod(p, node_poly)
    cq = to_ortho(system, q).coeffs
    cg = to_ortho(system, node_poly).coeffs
    return sum((cq[k] * cg[k] * norm_sq(system, k)
                for k in range(min(len(cq), len(cg)))), 0)


def _orthonormal_values(system: RecurrenceSystem, n: int, x) -> list:
    vals = eval_pi_all(system, n, x)
    return [v / math.sqrt(float(norm_sq(system, k))) for k, v in enumerate(vals)]


def cd_kernel(system: RecurrenceSystem, n: int, x: float, t: float,
              closed_form: bool = False) -> float:
    """Christoffel-Darboux kernel ``sum_{k<n} pit_k(x) pit_k(t)`` (orthonormal).

    ``closed_form=True`` evaluates the two-term Christoffel-Darboux
    expression instead of the sum; for ``x == t`` it uses the confluent,
    derivative-based variant.
    """
    if n < 1:
        raise InputError("kernel needs n >= 1")
    if not closed_form:
        px = _orthonormal_values(system, n - 1, x)
        pt = _orthonormal_values(system, n - 1, t)
        return float(sum(a * b for a, b in zip(px, pt)))
    sb = math.sqrt(float(system.beta(n)))
    px = _orthonormal_values(system, n, x)
    if x != t:
        pt = _orthonormal_values(system, n, t)
        return sb * (px[n] * pt[n - 1] - px[n - 1] * pt[n]) / (x - t)
    d = _orthonormal_derivatives(system, n, x)
    return sb * (d[n] * px[n - 1] - d[n - 1] * px[n])


def _orthonormal_derivatives(system: RecurrenceSystem, n: int, x) -> list:
    p_prev, p = 0.0, 1.0
    d_prev, d = 0.0, 0.0
    ders = [0.0]
    for k in range(n):
        g, a, b = (float(v) for v in system.coeffs(k))
        p_next = (g * x - a) * p - b * p_prev
        d_next = g * p + (g * x - a) * d - b * d_prev
        p_prev, p, d_prev, d = p, p_next, d, d_next
        ders.append(d)
    return [v / math.sqrt(float(norm_sq(system, k))) for k, v in enumerate(ders)]


def fourier_identify(system: RecurrenceSystem, rule_nodes, fvals, i: int,
                     weights=None) -> float:
    """Fourier coefficient ``c_i(f)`` from values of ``f`` on a Gaussian node set.

    Exact when ``deg f + i <= 2n - 1``; checking that is the caller's job.
    """
    z = np.asarray(rule_nodes, dtype=float)
    f = np.asarray(fvals, dtype=float)
    if f.shape != z.shape:
        raise InputError("one value per node is required")
    w = interpolatory_weights(system, z) if weights is None else np.asarray(weights, float)
    pi_i = pi_table(system, i, z)[:, i]
    return float(np.sum(f * pi_i * w) / float(norm_sq(system, i)))
