"""Expectations, cubature formulas, fractions of Gaussian designs and
degree-of-exactness certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatchError, InputError, InvalidFractionError, OrderError
from .ortho import (
    HERMITE,
    RecurrenceSystem,
    UniPoly,
    _pi_monomials,
    gauss_rule,
    get_system,
    nodes,
    poly_divmod,
    quadrature_error_1d,
    to_ortho,
)
from .polyspace import (
    DEGLEX,
    MonoPoly,
    OrthoPoly,
    TermOrder,
    eval_multi,
    mono_to_ortho_multi,
    norm_sq_multi,
    ortho_to_mono_multi,
)
from .vanishing import Design, OrthoGBasis, bm_ortho, product_design, weights as design_weights

__all__ = [
    "exact_expectation",
    "cubature_value",
    "CubatureFormula",
    "zero_mean_check",
    "s_orthogonality",
    "cubature_degree",
    "DesignFraction",
    "fraction_weights",
    "fraction_error",
    "product_grid_expectation",
    "S_ZERO_TOL",
]

S_ZERO_TOL = 1e-8


def _beta0_product(systems: Sequence[RecurrenceSystem]):
    out = 1
    for s in systems:
        out = out * s.coeffs(0)[2]
    return out


def exact_expectation(p: MonoPoly | OrthoPoly, systems: Sequence[RecurrenceSystem] | None = None):
    """``E(p(X))`` for the product measure: the constant Fourier coefficient."""
    if isinstance(p, MonoPoly):
        if systems is None:
            raise InputError("a monomial polynomial needs its systems to be integrated")
        systems = tuple(get_system(s) if isinstance(s, str) else s for s in systems)
        if p.dim is not None and p.dim != len(systems):
            raise DimensionMismatchError(f"{len(systems)} systems for a {p.dim}-variate polynomial")
        p = mono_to_ortho_multi(p, systems)
    if p.is_zero():
        return 0
    return p.coeff((0,) * p.dim) * _beta0_product(p.systems)


def cubature_value(f: Callable | MonoPoly | OrthoPoly, design: Design,
                   weights: Sequence | Mapping) -> float:
    """``sum_z f(z) w_z``; ``weights`` is aligned with the points or keyed by them."""
    if isinstance(weights, Mapping):
        weights = [weights[p] for p in design.points]
    if len(weights) != len(design):
        raise DimensionMismatchError(f"{len(weights)} weights for {len(design)} points")
    total = 0
    for z, w in zip(design.points, weights):
        if isinstance(f, (MonoPoly, OrthoPoly)):
            v = eval_multi(f, z)
        else:
            v = f(*z)
        total = total + v * w
    return total


@dataclass(frozen=True)
class CubatureFormula:
    design: Design
    weights: tuple
    order: TermOrder
    degree: int

    @classmethod
    def build(cls, design: Design, order: TermOrder = DEGLEX, **tols) -> "CubatureFormula":
        G, L = bm_ortho(design, order, **tols)
        w = design_weights(design, order, L)
        deg = cubature_degree(G) if order.degree_compatible else -1
        return cls(design, tuple(w), order, deg)

    def __call__(self, f) -> float:
        return cubature_value(f, self.design, self.weights)


def _q_for_elements(G: OrthoGBasis, q) -> list:
    if isinstance(q, Mapping):
        return [q.get(g.leading) for g in G.elements]
    q = list(q)
    if len(q) != len(G.elements):
        raise DimensionMismatchError(f"{len(q)} multipliers for {len(G.elements)} basis elements")
    return q


def zero_mean_check(G: OrthoGBasis, q) -> object:
    """``E(sum_g q_g g)`` from the coefficients of each ``q_g`` that can matter.

    With ``g = pi_a - sum_b t_b pi_b`` only ``c_a(q_g)`` and ``c_b(q_g)``
    for ``b`` in the tail enter; everything else is orthogonal to ``g``.
    ``q`` is a sequence aligned with ``G.elements`` or a mapping from
    leading exponents; missing entries count as zero.
    """
    total = 0
    for g, qg in zip(G.elements, _q_for_elements(G, q)):
        if qg is None:
            continue
        if qg.dim is not None and qg.dim != len(G.systems):
            raise DimensionMismatchError("multiplier and basis live in different dimensions")
        total = total + norm_sq_multi(G.systems, g.leading) * qg.coeff(g.leading)
        for b, t in g.tail.items():
            c = qg.coeff(b)
            if c:
                total = total - norm_sq_multi(G.systems, b) * c * t
    return total


def s_orthogonality(g: OrthoPoly) -> int:
    """Largest ``s`` such that ``E(f g) = 0`` whenever ``deg(f g) <= s``.

    A product ``f g`` with ``deg f = k`` can only correlate with the terms of
    ``g`` of degree at most ``k``; with ``m`` the lowest degree present in
    ``g`` that gives ``s = deg g + m - 1``, never more than ``2 deg g - 1``.
    """
    if g.is_zero():
        raise InputError("the zero polynomial has no degree")
    scale = g.max_abs_coeff()
    present = [sum(a) for a, c in g.terms.items() if abs(float(c)) > S_ZERO_TOL * scale]
    deg, low = max(present), min(present)
    return min(deg + low - 1, 2 * deg - 1)


def cubature_degree(G: OrthoGBasis) -> int:
    """Degree of exactness of the interpolatory formula on the design of ``G``."""
    if not G.order.degree_compatible:
        raise OrderError(f"{G.order} is not degree compatible; the degree bound needs e.g. DegLex")
    return min(s_orthogonality(p) for p in G.polys())


def s_values(G: OrthoGBasis) -> list[int]:
    return [s_orthogonality(p) for p in G.polys()]


class DesignFraction:
    """A subset of the zeros of ``pi_n`` for a univariate system."""

    MATCH_TOL = 1e-10

    def __init__(self, parent_n: int, subset: Sequence[float], system: RecurrenceSystem = HERMITE):
        if isinstance(system, str):
            system = get_system(system)
        self.system = system
        self.parent = tuple(float(z) for z in nodes(system, parent_n))
        picked = []
        for x in subset:
            x = float(x)
            j = int(np.argmin([abs(x - z) for z in self.parent]))
            if abs(x - self.parent[j]) > self.MATCH_TOL * max(1.0, abs(x)):
                raise InvalidFractionError(f"{x!r} is not a zero of {system.symbol}_{parent_n}")
            picked.append(self.parent[j])
        if not picked:
            raise InvalidFractionError("a fraction needs at least one point")
        if len(set(picked)) != len(picked):
            raise InvalidFractionError("fraction lists a node twice")
        self.subset = tuple(sorted(picked))
        self.node_poly = UniPoly.from_roots(self.subset)

    def __len__(self) -> int:
        return len(self.subset)

    def parent_lagrange(self, z: float) -> UniPoly:
        """Lagrange polynomial of ``z`` on the full parent design."""
        others = [w for w in self.parent if w != z]
        num = UniPoly.from_roots(others)
        return UniPoly([c / num(z) for c in num.coeffs])


def fraction_weights(fr: DesignFraction) -> list[float]:
    """``E(l_z^F)`` for ``z`` in the fraction, in increasing node order.

    ``l_z^F`` is the normal form of the parent Lagrange polynomial modulo
    the node polynomial of the fraction.
    """
    out = []
    for z in fr.subset:
        _, r = poly_divmod(fr.parent_lagrange(z), fr.node_poly)
        c = to_ortho(fr.system, r).coeffs
        out.append(float(c[0] * fr.system.coeffs(0)[2]) if c else 0.0)
    return out


def fraction_error(fr: DesignFraction, p: UniPoly):
    """``E(p) - sum_F p(z) w_z`` from the Fourier coefficients of quotient and node polynomial."""
    return quadrature_error_1d(fr.system, p, fr.node_poly)


def _divide_in_coordinate(p: MonoPoly, k: int, g: Sequence) -> tuple[MonoPoly, MonoPoly]:
    """Divide by the univariate ``g(x_k)`` (monomial coefficients, ascending)."""
    n = len(g) - 1
    lead = g[-1]
    rows: dict[int, dict] = {}
    for a, c in p.terms.items():
        rows.setdefault(a[k], {})
        rest = a[:k] + (0,) + a[k + 1:]
        rows[a[k]][rest] = rows[a[k]].get(rest, 0) + c
    q: dict = {}
    for j in range(max(rows, default=-1), n - 1, -1):
        row = rows.pop(j, {})
        for rest, c in row.items():
            if c == 0:
                continue
            t = c / lead if lead != 1 else c
            e = rest[:k] + (j - n,) + rest[k + 1:]
            q[e] = q.get(e, 0) + t
            for i, gi in enumerate(g[:-1]):
                if gi:
                    tgt = rows.setdefault(j - n + i, {})
                    tgt[rest] = tgt.get(rest, 0) - t * gi
    r = {rest[:k] + (j,) + rest[k + 1:]: c for j, row in rows.items() for rest, c in row.items()}
    return MonoPoly(q, p.dim), MonoPoly(r, p.dim)


def product_grid_expectation(f, counts: Sequence[int], systems) -> tuple[object, list | None]:
    """Product-rule value of ``f`` on the grid of Gaussian nodes, plus error terms.

    For a polynomial ``f`` the error is split by coordinate: dividing
    successively by ``pi_{n_k}(x_k)`` gives ``f = sum_k q_k pi_{n_k}(x_k) + r``
    and the ``k``-th term is ``E(q_k pi_{n_k}(X_k))``. Their sum is
    ``E(f)`` minus the value. A black-box ``f`` gets ``None`` for the errors.
    """
    counts = [int(n) for n in counts]
    if isinstance(systems, (RecurrenceSystem, str)):
        systems = [systems] * len(counts)
    systems = [get_system(s) if isinstance(s, str) else s for s in systems]
    design = product_design(counts, systems)
    w1 = [gauss_rule(s, n).weights for s, n in zip(systems, counts)]
    w = [float(np.prod(ws)) for ws in product(*w1)]
    if not isinstance(f, (MonoPoly, OrthoPoly)):
        return cubature_value(f, design, w), None
    if isinstance(f, OrthoPoly):
        f = ortho_to_mono_multi(f)
    if f.dim is not None and f.dim != len(counts):
        raise DimensionMismatchError(f"{len(counts)} counts for a {f.dim}-variate polynomial")
    value = cubature_value(f, design, w)
    errors = []
    rest = f
    for k, (s, n) in enumerate(zip(systems, counts)):
        g = _pi_monomials(s, n)[n]
        q, rest = _divide_in_coordinate(rest, k, g)
        pik = MonoPoly({tuple(j if i == k else 0 for i in range(len(counts))): c
                        for j, c in enumerate(g) if c}, len(counts))
        errors.append(exact_expectation(q * pik, systems) if not q.is_zero() else 0)
    return value, errors

