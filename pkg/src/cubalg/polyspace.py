"""Sparse multivariate polynomials over monomials or product orthogonal bases.

Exponent vectors are plain tuples of non-negative ints. A polynomial is a
mapping from exponent tuples to coefficients; :class:`OrthoPoly` reads the
key ``a`` as ``pi_a(x) = prod_i pi_{a_i}(x_i)`` with one recurrence system per
coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatchError, InputError
from .ortho import (
    RecurrenceSystem,
    eval_pi_all,
    get_system,
    monomial_to_ortho,
    norm_sq,
    _pi_monomials,
)

__all__ = [
    "TermOrder",
    "DEGLEX",
    "DEGREVLEX",
    "LEX",
    "compare",
    "total_degree",
    "divides",
    "MonoPoly",
    "OrthoPoly",
    "mono_to_ortho_multi",
    "ortho_to_mono_multi",
    "eval_multi",
    "norm_sq_multi",
    "poly_from_json",
    "poly_to_json",
    "parse_number",
    "CLEANUP_TOL",
]

CLEANUP_TOL = 1e-12


def total_degree(a: Sequence[int]) -> int:
    return sum(a)


def divides(a: Sequence[int], b: Sequence[int]) -> bool:
    """``x^a`` divides ``x^b``, i.e. ``a <= b`` componentwise."""
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class TermOrder:
    """Lex, DegLex or DegRevLex with a variable precedence.

    ``precedence`` lists variable indices from most to least significant;
    the default ``(0, 1, ..., d-1)`` means ``x_1 > x_2 > ... > x_d``.
    """

    kind: str = "deglex"
    precedence: tuple[int, ...] | None = None

    KINDS = ("lex", "deglex", "degrevlex")

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in self.KINDS:
            raise InputError(f"unknown term order {self.kind!r}; known: {', '.join(self.KINDS)}")
        object.__setattr__(self, "kind", kind)
        if self.precedence is not None:
            prec = tuple(self.precedence)
            if sorted(prec) != list(range(len(prec))):
                raise InputError(f"precedence {prec} is not a permutation")
            object.__setattr__(self, "precedence", prec)

    @property
    def degree_compatible(self) -> bool:
        return self.kind != "lex"

    def _prec(self, d: int) -> tuple[int, ...]:
        if self.precedence is None:
            return tuple(range(d))
        if len(self.precedence) != d:
            raise DimensionMismatchError(
                f"order has {len(self.precedence)} variables, exponent has {d}")
        return self.precedence

    def key(self, a: Sequence[int]) -> tuple:
        """Sort key: ``key(a) < key(b)`` iff ``a < b`` in this order."""
        prec = self._prec(len(a))
        if self.kind == "lex":
            return tuple(a[i] for i in prec)
        if self.kind == "deglex":
            return (sum(a),) + tuple(a[i] for i in prec)
        # smaller exponent in the least significant variable wins
        return (sum(a),) + tuple(-a[i] for i in reversed(prec))

    def __str__(self) -> str:
        name = {"lex": "Lex", "deglex": "DegLex", "degrevlex": "DegRevLex"}[self.kind]
        return name if self.precedence is None else f"{name}{list(self.precedence)}"


DEGLEX = TermOrder("deglex")
DEGREVLEX = TermOrder("degrevlex")
LEX = TermOrder("lex")


def compare(order: TermOrder, a: Sequence[int], b: Sequence[int]) -> int:
    """-1, 0 or 1 as ``a`` is below, equal to or above ``b``."""
    if len(a) != len(b):
        raise DimensionMismatchError(f"exponents {tuple(a)} and {tuple(b)} differ in length")
    ka, kb = order.key(a), order.key(b)
    return (ka > kb) - (ka < kb)


def _is_zero(c) -> bool:
    if isinstance(c, float):
        return abs(c) <= CLEANUP_TOL
    return c == 0


class _SparsePoly:
    """Shared storage and linear arithmetic; immutable after construction."""

    __slots__ = ("terms", "dim")

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None, dim: int | None = None):
        clean: dict = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if any(e < 0 for e in exps):
                raise InputError(f"negative exponent in {exps}")
            if dim is None:
                dim = len(exps)
            elif len(exps) != dim:
                raise DimensionMismatchError(f"exponent {exps} does not have {dim} entries")
            clean[exps] = clean.get(exps, 0) + c
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if not _is_zero(v)})
        object.__setattr__(self, "dim", dim)

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    def _like(self, terms):
        raise NotImplementedError

    def _check_compatible(self, other):
        if type(self) is not type(other):
            raise InputError("cannot mix monomial and ortho polynomials")
        if self.dim is not None and other.dim is not None and self.dim != other.dim:
            raise DimensionMismatchError("polynomials live in different dimensions")

    def __add__(self, other):
        if not isinstance(other, _SparsePoly):
            return self + self._like({(0,) * (self.dim or 0): other})
        self._check_compatible(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return self._like({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        return self.terms == other.terms and getattr(self, "systems", None) == getattr(other, "systems", None)

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self.terms.items())))

    def coeff(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), 0)

    @property
    def total_degree(self) -> int:
        """Maximal total degree of the support, ``-1`` for zero."""
        return max((sum(k) for k in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self, order: TermOrder) -> list[tuple[tuple[int, ...], object]]:
        """Terms in descending order."""
        return sorted(self.terms.items(), key=lambda kv: order.key(kv[0]), reverse=True)

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)


class MonoPoly(_SparsePoly):
    """Sparse polynomial over monomials ``x^a``."""

    __slots__ = ()

    def _like(self, terms):
        return MonoPoly(terms, self.dim)

    def __mul__(self, other):
        if not isinstance(other, MonoPoly):
            return self.scale(other)
        self._check_compatible(other)
        out: dict = {}
        for a, c in self.terms.items():
            for b, e in other.terms.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, 0) + c * e
        return MonoPoly(out, self.dim)

    __rmul__ = __mul__

    def __call__(self, point):
        return eval_multi(self, point)

    def __repr__(self) -> str:
        return f"MonoPoly({self.terms!r})"

    @classmethod
    def variable(cls, i: int, dim: int) -> "MonoPoly":
        return cls({tuple(1 if j == i else 0 for j in range(dim)): 1})

    @classmethod
    def constant(cls, c, dim: int) -> "MonoPoly":
        return cls({(0,) * dim: c})


class OrthoPoly(_SparsePoly):
    """Sparse polynomial over product orthogonal polynomials ``pi_a``."""

    __slots__ = ("systems",)

    def __init__(self, terms=None, systems: Sequence[RecurrenceSystem] = (), dim: int | None = None):
        systems = tuple(systems)
        super().__init__(terms, dim if dim is not None else (len(systems) or None))
        if self.dim is not None and len(systems) != self.dim:
            raise DimensionMismatchError(
                f"{len(systems)} systems given for a {self.dim}-dimensional polynomial")
        object.__setattr__(self, "systems", systems)

    def _like(self, terms):
        return OrthoPoly(terms, self.systems)

    def _check_compatible(self, other):
        super()._check_compatible(other)
        if tuple(s.name for s in self.systems) != tuple(s.name for s in other.systems):
            raise InputError("ortho polynomials over different systems")

    def __mul__(self, other):
        if isinstance(other, _SparsePoly):
            # no product formula for general systems; go through monomials
            return mono_to_ortho_multi(
                ortho_to_mono_multi(self) * ortho_to_mono_multi(other), self.systems)
        return self.scale(other)

    __rmul__ = __mul__

    def __call__(self, point):
        return eval_multi(self, point)

    def __repr__(self) -> str:
        return f"OrthoPoly({self.terms!r}, systems={[s.name for s in self.systems]})"

    def render(self, order: TermOrder, names: Sequence[str] | None = None) -> str:
        """Human-readable form in descending order, e.g. ``H_2(y) - H_1(x) + 2 H_1(y) - 4``."""
        return render_terms(self.sorted_terms(order), self.systems, names)


def variable_names(d: int) -> list[str]:
    return ["x", "y", "z"][:d] if d <= 3 else [f"x{i + 1}" for i in range(d)]


def format_coeff(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, float):
        if c.is_integer() and abs(c) < 1e15:
            return str(int(c))
        return repr(c)
    return str(c)


def render_terms(terms, systems: Sequence[RecurrenceSystem], names=None) -> str:
    names = list(names) if names is not None else variable_names(len(systems))
    out = []
    for exps, c in terms:
        factors = [f"{systems[i].symbol}_{e}({names[i]})" for i, e in enumerate(exps) if e]
        neg = c < 0
        mag = format_coeff(-c if neg else c)
        if not factors:
            body = mag
        elif mag == "1":
            body = " ".join(factors)
        else:
            body = mag + " " + " ".join(factors)
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out) if out else "0"


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def mono_to_ortho_multi(p: MonoPoly, systems: Sequence[RecurrenceSystem]) -> OrthoPoly:
    """Rewrite ``p`` over ``pi_a``; the image of ``x^a`` is supported on ``b <= a``."""
    systems = tuple(systems)
    if p.dim is not None and p.dim != len(systems):
        raise DimensionMismatchError(f"{len(systems)} systems for a {p.dim}-variate polynomial")
    out: dict = {}
    for a, c in p.terms.items():
        factors = [monomial_to_ortho(s, e).coeffs for s, e in zip(systems, a)]
        for b in product(*(range(len(f)) for f in factors)):
            v = c
            for f, j in zip(factors, b):
                v = v * f[j]
                if v == 0:
                    break
            if v != 0:
                out[b] = out.get(b, 0) + v
    return OrthoPoly({k: _normalize(v) for k, v in out.items()}, systems)


def ortho_to_mono_multi(p: OrthoPoly) -> MonoPoly:
    """Expand ``p`` in monomials."""
    out: dict = {}
    for a, c in p.terms.items():
        factors = [_pi_monomials(s, e)[e] for s, e in zip(p.systems, a)]
        for b in product(*(range(len(f)) for f in factors)):
            v = c
            for f, j in zip(factors, b):
                v = v * f[j]
                if v == 0:
                    break
            if v != 0:
                out[b] = out.get(b, 0) + v
    return MonoPoly({k: _normalize(v) for k, v in out.items()}, p.dim)


def eval_multi(p: MonoPoly | OrthoPoly, point: Sequence) -> object:
    """Termwise evaluation at ``point``."""
    point = tuple(point)
    if p.dim is not None and len(point) != p.dim:
        raise DimensionMismatchError(f"point of length {len(point)} for a {p.dim}-variate polynomial")
    if not p.terms:
        return 0
    total = 0
    if isinstance(p, OrthoPoly):
        top = [max(a[i] for a in p.terms) for i in range(len(point))]
        tables = [eval_pi_all(s, m, x) for s, m, x in zip(p.systems, top, point)]
        for a, c in p.terms.items():
            v = c
            for t, e in zip(tables, a):
                v = v * t[e]
            total = total + v
        return total
    for a, c in p.terms.items():
        v = c
        for x, e in zip(point, a):
            if e:
                v = v * x ** e
        total = total + v
    return total


def norm_sq_multi(systems: Sequence[RecurrenceSystem], a: Sequence[int]):
    """``||pi_a||^2`` for the product measure."""
    out = 1
    for s, e in zip(systems, a):
        out = out * norm_sq(s, e)
    return out


def parse_number(value):
    """JSON number or ``"p/q"`` string to int, Fraction or float."""
    if isinstance(value, bool):
        raise InputError(f"not a number: {value!r}")
    if isinstance(value, Fraction):
        return _normalize(value)
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not math.isfinite(value):
            raise InputError(f"non-finite number {value!r}")
        return value
    if isinstance(value, str):
        try:
            f = Fraction(value.strip())
        except ValueError:
            try:
                return float(value)
            except ValueError:
                raise InputError(f"not a number: {value!r}") from None
        return _normalize(f)
    raise InputError(f"not a number: {value!r}")


def poly_from_json(data: Mapping) -> MonoPoly | OrthoPoly:
    """Parse ``{"basis", "systems", "terms": [{"exps", "coeff"}]}``."""
    try:
        basis = data.get("basis", "monomial")
        names = list(data.get("systems", []))
        raw_terms = data["terms"]
    except (AttributeError, KeyError, TypeError) as exc:
        raise InputError(f"malformed polynomial JSON: {exc}") from None
    terms: dict = {}
    for t in raw_terms:
        try:
            exps = tuple(int(e) for e in t["exps"])
            coeff = parse_number(t["coeff"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed term {t!r}: {exc}") from None
        terms[exps] = terms.get(exps, 0) + coeff
    systems = tuple(get_system(n) for n in names)
    if basis == "monomial":
        p = MonoPoly(terms, len(systems) or None)
        if systems and p.dim is not None and p.dim != len(systems):
            raise DimensionMismatchError("number of systems does not match exponent length")
        return p
    if basis == "ortho":
        if not systems:
            raise InputError("ortho polynomials need a systems list")
        return OrthoPoly(terms, systems)
    raise InputError(f"unknown basis {basis!r}")


def poly_to_json(p: MonoPoly | OrthoPoly, order: TermOrder = DEGLEX,
                 systems: Iterable[RecurrenceSystem] | None = None) -> dict:
    if isinstance(p, OrthoPoly):
        basis, names = "ortho", [s.name for s in p.systems]
    else:
        basis, names = "monomial", [s.name for s in (systems or ())]
    return {
        "basis": basis,
        "systems": names,
        "terms": [{"exps": list(k), "coeff": v} for k, v in p.sorted_terms(order)],
    }
