"""Vanishing ideals of finite point sets, computed over orthogonal polynomials.

:func:`bm_ortho` is a Buchberger-Moller loop in which every candidate
``pi_alpha`` is tested against the span of the standard part by a linear
solve on the design. Integer or rational designs over exact systems run in
exact arithmetic; everything else uses column-pivoted QR with a residual
threshold.
"""

from __future__ import annotations

import json
import math
import warnings as _warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg
import sympy

from .errors import DegenerateNodesError, DimensionMismatchError, InputError, InvalidDesignError
from .ortho import RecurrenceSystem, _is_exact, eval_pi_all, get_system, nodes
from .polyspace import CLEANUP_TOL, DEGLEX, OrthoPoly, TermOrder, divides, render_terms
from .hermite import snap_rational

__all__ = [
    "Design",
    "StandardSet",
    "BasisElement",
    "OrthoGBasis",
    "ConditioningWarning",
    "bm_ortho",
    "interpolate",
    "indicator",
    "weights",
    "product_design",
    "DISTINCT_TOL",
]

DISTINCT_TOL = 1e-10


class ConditioningWarning(UserWarning):
    """A residual fell close to the rank threshold."""


def parse_coordinate(value):
    """Number, ``"p/q"`` or a closed-form real such as ``"-1+sqrt(3)"``."""
    if isinstance(value, bool):
        raise InputError(f"not a coordinate: {value!r}")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InputError(f"non-finite coordinate {value!r}")
        return value
    if isinstance(value, str):
        try:
            f = Fraction(value.strip())
            return int(f) if f.denominator == 1 else f
        except ValueError:
            pass
        try:
            expr = sympy.sympify(value, rational=True)
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise InputError(f"cannot parse coordinate {value!r}") from exc
        if not expr.is_real or expr.free_symbols:
            raise InputError(f"coordinate {value!r} is not a real constant")
        if expr.is_Rational:
            f = Fraction(int(expr.p), int(expr.q))
            return int(f) if f.denominator == 1 else f
        return float(expr)
    raise InputError(f"not a coordinate: {value!r}")


@dataclass(frozen=True)
class Design:
    """Distinct points in R^d with one orthogonal system per coordinate."""

    points: tuple
    systems: tuple

    def __init__(self, points: Iterable[Sequence], systems: Sequence[RecurrenceSystem] | RecurrenceSystem):
        pts = tuple(tuple(p) for p in points)
        if not pts:
            raise InvalidDesignError("a design needs at least one point")
        d = len(pts[0])
        if d == 0 or any(len(p) != d for p in pts):
            raise DimensionMismatchError("design points have inconsistent dimensions")
        if isinstance(systems, RecurrenceSystem):
            systems = (systems,) * d
        systems = tuple(get_system(s) if isinstance(s, str) else s for s in systems)
        if len(systems) != d:
            raise DimensionMismatchError(f"{len(systems)} systems for {d}-dimensional points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "systems", systems)
        self._check_distinct()

    def _check_distinct(self) -> None:
        if self.exact:
            if len(set(self.points)) != len(self.points):
                raise InvalidDesignError("design contains repeated points")
            return
        arr = self.array()
        n = len(arr)
        for i in range(n - 1):
            gaps = np.max(np.abs(arr[i + 1:] - arr[i]), axis=1)
            j = int(np.argmin(gaps))
            if gaps[j] <= DISTINCT_TOL:
                raise InvalidDesignError(
                    f"points {i} and {i + 1 + j} coincide within {DISTINCT_TOL:g}")

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    @property
    def exact(self) -> bool:
        return all(s.exact for s in self.systems) and all(
            _is_exact(c) for p in self.points for c in p)

    def array(self) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.points], dtype=float)

    @classmethod
    def from_json(cls, data: Mapping | str) -> "Design":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise InputError(f"design is not valid JSON: {exc}") from None
        try:
            raw_points = data["points"]
            names = data.get("systems")
            dim = data.get("dim")
        except (KeyError, TypeError, AttributeError) as exc:
            raise InputError(f"malformed design JSON: missing {exc}") from None
        if not isinstance(raw_points, list):
            raise InputError("design points must be a list")
        points = []
        for p in raw_points:
            if not isinstance(p, list):
                p = [p]
            points.append(tuple(parse_coordinate(c) for c in p))
        if dim is None:
            dim = len(points[0]) if points else 1
        if any(len(p) != dim for p in points):
            raise DimensionMismatchError(f"design declares dim {dim} but a point disagrees")
        if names is None:
            names = ["hermite"] * dim
        if isinstance(names, str):
            names = [names] * dim
        return cls(points, [get_system(n) for n in names])

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "systems": [s.name for s in self.systems],
            "points": [list(p) for p in self.points],
        }


class StandardSet(tuple):
    """Standard exponents sorted ascending in the term order."""

    def __new__(cls, exps: Iterable[Sequence[int]], order: TermOrder):
        items = sorted({tuple(a) for a in exps}, key=order.key)
        obj = super().__new__(cls, items)
        obj.order = order
        return obj

    def is_down_set(self) -> bool:
        members = set(self)
        for a in self:
            for i, e in enumerate(a):
                if e and a[:i] + (e - 1,) + a[i + 1:] not in members:
                    return False
        return True


@dataclass(frozen=True)
class BasisElement:
    """``pi_leading - sum_b tail[b] pi_b``."""

    leading: tuple
    tail: Mapping

    def to_ortho(self, systems: Sequence[RecurrenceSystem]) -> OrthoPoly:
        terms = {b: -c for b, c in self.tail.items()}
        terms[self.leading] = 1
        return OrthoPoly(terms, systems)


@dataclass(frozen=True)
class OrthoGBasis:
    elements: tuple
    order: TermOrder
    L: StandardSet
    systems: tuple
    condition: float = 1.0
    warnings: tuple = ()

    def polys(self) -> list[OrthoPoly]:
        return [g.to_ortho(self.systems) for g in self.elements]

    @property
    def leading_exponents(self) -> list[tuple]:
        return [g.leading for g in self.elements]

    def snapped(self, max_denominator: int = 10**4, tol: float = 1e-9) -> "OrthoGBasis":
        """Copy with float tails replaced by nearby simple rationals where possible."""
        elems = []
        for g in self.elements:
            tail = {}
            for b, c in g.tail.items():
                if isinstance(c, float):
                    r = snap_rational(c, max_denominator, tol * max(1.0, abs(c)))
                    if r is not None:
                        c = int(r) if r.denominator == 1 else r
                tail[b] = c
            elems.append(BasisElement(g.leading, tail))
        return OrthoGBasis(tuple(elems), self.order, self.L, self.systems,
                           self.condition, self.warnings)

    def render(self, names: Sequence[str] | None = None) -> list[str]:
        out = []
        for g in self.snapped().elements:
            terms = [(g.leading, 1)] + sorted(
                ((b, -c) for b, c in g.tail.items()),
                key=lambda kv: self.order.key(kv[0]), reverse=True)
            out.append(render_terms(terms, self.systems, names))
        return out

    def to_json(self) -> dict:
        return {
            "order": str(self.order),
            "systems": [s.name for s in self.systems],
            "L": [list(a) for a in self.L],
            "elements": [
                {
                    "leading": list(g.leading),
                    "tail": [{"exps": list(b), "coeff": c} for b, c in sorted(
                        g.tail.items(), key=lambda kv: self.order.key(kv[0]), reverse=True)],
                }
                for g in self.elements
            ],
            "condition": self.condition,
            "warnings": list(self.warnings),
        }


class _Evaluator:
    """Caches ``pi_k(z_i)`` per point and coordinate."""

    def __init__(self, design: Design, exact: bool):
        self.design = design
        self.exact = exact
        top = len(design)
        self.tables = []
        for p in design.points:
            row = []
            for s, x in zip(design.systems, p):
                row.append(eval_pi_all(s, top, x if exact else float(x)))
            self.tables.append(row)

    def column(self, alpha: Sequence[int]) -> list:
        out = []
        for row in self.tables:
            v = 1
            for t, e in zip(row, alpha):
                v = v * t[e]
            out.append(v)
        return out

    def matrix(self, exps: Sequence[Sequence[int]]):
        cols = [self.column(a) for a in exps]
        if self.exact:
            return [list(r) for r in zip(*cols)]
        return np.array(cols, dtype=float).T


class _ExactSpan:
    """Incremental exact elimination over the admitted columns."""

    def __init__(self):
        self.rows: list[tuple[int, list, dict]] = []

    def reduce(self, v: list) -> tuple[list, dict]:
        v = [Fraction(x) for x in v]
        coef: dict = {}
        for pivot, r, comb in self.rows:
            if v[pivot] != 0:
                f = v[pivot] / r[pivot]
                v = [a - f * b for a, b in zip(v, r)]
                for j, c in comb.items():
                    coef[j] = coef.get(j, 0) + f * c
        return v, coef

    def admit(self, reduced: list, coef: dict, index: int) -> None:
        pivot = next(i for i, x in enumerate(reduced) if x != 0)
        comb = {j: -c for j, c in coef.items()}
        comb[index] = Fraction(1)
        self.rows.append((pivot, reduced, comb))


def _lstsq_qr(A: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q, r, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
    y = scipy.linalg.solve_triangular(r, q.T @ v)
    b = np.empty_like(y)
    b[perm] = y
    return b, v - A @ b


def _clean(c):
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    return float(c)


def bm_ortho(design: Design, order: TermOrder = DEGLEX, tol_abs: float = 1e-8,
             tol_rel: float = 1e-10, exact: bool | None = None) -> tuple[OrthoGBasis, StandardSet]:
    """Reduced Groebner basis of the vanishing ideal of ``design`` over ``pi_alpha``.

    ``exact=None`` picks exact arithmetic when the design allows it.
    """
    if tol_abs <= 0 or tol_rel <= 0:
        raise InputError("tolerances must be positive")
    if exact is None:
        exact = design.exact
    elif exact and not design.exact:
        raise InputError("exact arithmetic needs rational points and exact systems")
    d = design.dim
    ev = _Evaluator(design, exact)
    zero = (0,) * d
    L = [zero]
    G: list[BasisElement] = []
    M = {tuple(1 if j == i else 0 for j in range(d)) for i in range(d)}
    notes: list[str] = []

    span = None
    if exact:
        span = _ExactSpan()
        v, coef = span.reduce(ev.column(zero))
        span.admit(v, coef, 0)
    cols = [np.asarray(ev.column(zero), dtype=float)] if not exact else None

    while M:
        alpha = min(M, key=order.key)
        M.discard(alpha)
        v = ev.column(alpha)
        if exact:
            reduced, coef = span.reduce(v)
            independent = any(x != 0 for x in reduced)
            b = [coef.get(j, 0) for j in range(len(L))]
        else:
            vf = np.asarray(v, dtype=float)
            b, rho = _lstsq_qr(np.column_stack(cols), vf)
            res = float(np.linalg.norm(rho))
            tau = max(tol_abs, tol_rel * float(np.linalg.norm(vf)))
            if tau / 10 <= res <= tau:
                notes.append(f"residual {res:.3g} for exponent {alpha} is within a factor 10 of the threshold {tau:.3g}")
            independent = res > tau
        if independent and len(L) == len(design):
            # the evaluation matrix of L is square and invertible already
            notes.append(f"residual {res:.3g} for exponent {alpha} exceeds the threshold with a full standard set")
            independent = False
        if independent:
            if exact:
                span.admit(reduced, coef, len(L))
            else:
                cols.append(np.asarray(v, dtype=float))
            L.append(alpha)
            for i in range(d):
                m = alpha[:i] + (alpha[i] + 1,) + alpha[i + 1:]
                if any(divides(g.leading, m) for g in G) or any(divides(x, m) for x in M):
                    continue
                M.add(m)
        else:
            tail = {beta: _clean(c) for beta, c in zip(L, b)}
            G.append(BasisElement(alpha, {k: c for k, c in tail.items() if abs(c) > CLEANUP_TOL}))
            M = {x for x in M if not divides(alpha, x)}

    for n in notes:
        _warnings.warn(n, ConditioningWarning, stacklevel=2)
    if len(L) < len(design):
        raise DegenerateNodesError(
            f"only {len(L)} of {len(design)} points are separated at the residual threshold; "
            "lower --tol-abs/--tol-rel or merge nearby points")
    cond = float(np.linalg.cond(np.asarray(ev.matrix(L), dtype=float)))
    std = StandardSet(L, order)
    G.sort(key=lambda g: order.key(g.leading))
    return OrthoGBasis(tuple(G), order, std, design.systems, cond, tuple(notes)), std


def _interp_coeffs(ev: _Evaluator, L: Sequence, values: Sequence, exact: bool) -> list:
    A = ev.matrix(L)
    if exact:
        return [_clean(c) for c in _solve_exact(A, list(values))]
    A = np.asarray(A, dtype=float)
    if np.linalg.cond(A) > 1e14:
        raise DegenerateNodesError("standard set does not interpolate on this design")
    a = np.linalg.solve(A, np.asarray(values, dtype=float))
    return [float(c) for c in a]


def _solve_exact(A: list, y: list) -> list:
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(v)] for row, v in zip(A, y)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise DegenerateNodesError("standard set does not interpolate on this design")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def interpolate(design: Design, values: Sequence, L: Sequence[Sequence[int]]) -> OrthoPoly:
    """The element of ``span{pi_b : b in L}`` taking ``values`` on the design."""
    if len(values) != len(design):
        raise DimensionMismatchError(f"{len(values)} values for {len(design)} points")
    if len(L) != len(design):
        raise InputError("standard set size differs from the number of points")
    exact = design.exact and all(_is_exact(v) for v in values)
    ev = _Evaluator(design, exact)
    L = [tuple(a) for a in L]
    a = _interp_coeffs(ev, L, values, exact)
    return OrthoPoly(dict(zip(L, a)), design.systems)


def indicator(design: Design, index: int, L: Sequence[Sequence[int]] | None = None,
              order: TermOrder = DEGLEX) -> OrthoPoly:
    """Indicator (Lagrange) polynomial of the ``index``-th point."""
    if L is None:
        _, L = bm_ortho(design, order)
    vals = [1 if i == index else 0 for i in range(len(design))]
    return interpolate(design, vals, L)


def weights(design: Design, order: TermOrder = DEGLEX, L: Sequence | None = None) -> list:
    """Cubature weights ``E(l_z)``, aligned with ``design.points``.

    The constant coefficient of each indicator is row 0 of the inverse
    evaluation matrix, so all weights come from one transposed solve.
    """
    if L is None:
        _, L = bm_ortho(design, order)
    L = sorted((tuple(a) for a in L), key=order.key)
    exact = design.exact
    ev = _Evaluator(design, exact)
    A = ev.matrix(L)
    scale = 1
    for s in design.systems:
        scale = scale * s.coeffs(0)[2]
    e0 = [1] + [0] * (len(L) - 1)
    if exact:
        At = [list(r) for r in zip(*A)]
        return [_clean(w * scale) for w in _solve_exact(At, e0)]
    A = np.asarray(A, dtype=float)
    if np.linalg.cond(A) > 1e14:
        raise DegenerateNodesError("standard set does not interpolate on this design")
    w = np.linalg.solve(A.T, np.asarray(e0, dtype=float)) * float(scale)
    return [float(x) for x in w]


def product_design(counts: Sequence[int], systems: Sequence[RecurrenceSystem] | RecurrenceSystem) -> Design:
    """Grid of zeros of ``pi_{n_i}`` in each coordinate."""
    counts = [int(n) for n in counts]
    if not counts or any(n < 1 for n in counts):
        raise InputError("every count must be at least 1")
    if isinstance(systems, RecurrenceSystem):
        systems = [systems] * len(counts)
    systems = [get_system(s) if isinstance(s, str) else s for s in systems]
    if len(systems) != len(counts):
        raise DimensionMismatchError("one system per count is needed")
    axes = [[float(z) for z in nodes(s, n)] for s, n in zip(systems, counts)]
    return Design(list(product(*axes)), systems)
