"""Independent reference implementations used only by the tests."""

from __future__ import annotations

from fractions import Fraction

import sympy


def monomial_bm(points, order_key):
    """Classical Buchberger-Moller over monomials in exact arithmetic.

    Walks the border of the current standard set in increasing order and
    reduces each monomial's evaluation vector against the admitted ones.
    Returns ``(L, {leading: {beta: coeff}})`` with ``x^a - sum coeff x^beta``.
    """
    d = len(points[0])
    pts = [tuple(Fraction(c) for c in p) for p in points]

    def column(a):
        out = []
        for p in pts:
            v = Fraction(1)
            for x, e in zip(p, a):
                v *= x ** e
            out.append(v)
        return out

    basis = []  # (pivot, reduced vector, combination over L indices)
    L = []
    G = {}
    zero = (0,) * d
    seen = set()
    candidates = {zero}
    while candidates:
        a = min(candidates, key=order_key)
        candidates.discard(a)
        seen.add(a)
        v = column(a)
        coef = {}
        for piv, r, comb in basis:
            if v[piv] != 0:
                f = v[piv] / r[piv]
                v = [x - f * y for x, y in zip(v, r)]
                for j, c in comb.items():
                    coef[j] = coef.get(j, 0) + f * c
        if any(x != 0 for x in v):
            piv = next(i for i, x in enumerate(v) if x != 0)
            comb = {j: -c for j, c in coef.items()}
            comb[len(L)] = Fraction(1)
            basis.append((piv, v, comb))
            L.append(a)
            for i in range(d):
                m = a[:i] + (a[i] + 1,) + a[i + 1:]
                if m in seen or any(all(x <= y for x, y in zip(g, m)) for g in G):
                    continue
                candidates.add(m)
        else:
            G[a] = {L[j]: c for j, c in coef.items() if c != 0}
            candidates = {m for m in candidates if not all(x <= y for x, y in zip(a, m))}
    return sorted(L, key=order_key), G


def hermite_expectation(terms: dict) -> Fraction:
    """E of a monomial polynomial under the standard Gaussian, from moments."""
    total = Fraction(0)
    for exps, c in terms.items():
        m = Fraction(c)
        for e in exps:
            if e % 2:
                m = Fraction(0)
                break
            m *= sympy.factorial2(e - 1) if e else 1
        total += m
    return total


def lagrange_weights_1d(points, moment):
    """Weights of the interpolatory rule on ``points`` via the moment matrix."""
    n = len(points)
    V = sympy.Matrix([[sympy.nsimplify(p) ** k for p in points] for k in range(n)])
    rhs = sympy.Matrix([moment(k) for k in range(n)])
    return list(V.LUsolve(rhs))
