import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cubalg.errors import InputError
from cubalg.hermite import (
    HermiteExpansion,
    aliasing_nf,
    aliasing_symbolic,
    hermite_poly,
    product_expand,
    snap_rational,
    weighing_polynomial,
    weighing_values,
)
from cubalg.ortho import HERMITE, UniPoly, gauss_rule

x = sympy.Symbol("x")


def sympy_hermite(m):
    """Probabilists' Hermite polynomial from sympy's physicists' one."""
    return sympy.expand(2 ** sympy.Rational(-m, 2) * sympy.hermite(m, x / sympy.sqrt(2)))


def test_hermite_poly_examples():
    assert hermite_poly(0).coeffs == (1,)
    assert hermite_poly(4).coeffs == (3, 0, -6, 0, 1)
    assert hermite_poly(5).coeffs == (0, 15, 0, -10, 0, 1)


def test_hermite_poly_against_sympy():
    for m in range(15):
        want = sympy.Poly(sympy_hermite(m), x).all_coeffs()[::-1]
        assert list(hermite_poly(m).coeffs) == [int(c) for c in want]


def test_product_expand_examples():
    assert product_expand(5, 0) == HermiteExpansion({5: 1})
    assert product_expand(2, 1) == HermiteExpansion({3: 1, 1: 2})
    assert product_expand(2, 2) == HermiteExpansion({4: 1, 2: 4, 0: 2})


@given(st.integers(0, 12), st.integers(0, 12))
@settings(max_examples=50, deadline=None)
def test_product_expand_matches_multiplication(k, n):
    assert product_expand(k, n).to_monomial() == hermite_poly(k) * hermite_poly(n)


def test_aliasing_examples():
    assert aliasing_nf(0, 4) == HermiteExpansion({})
    for n in range(1, 9):
        assert aliasing_nf(1, n) == HermiteExpansion({n - 1: -n})
    for n in range(3, 9):
        assert aliasing_nf(3, n) == HermiteExpansion({n - 3: -n * (n - 1) * (n - 2), n - 1: 3 * n})


def test_aliasing_input_errors():
    with pytest.raises(InputError):
        aliasing_nf(1, 0)
    with pytest.raises(InputError):
        aliasing_nf(-1, 3)
    with pytest.raises(InputError):
        aliasing_nf(60, 10)


def test_aliasing_equals_remainder():
    # independent route: polynomial division of H_{n+k} by H_n
    for n in range(1, 8):
        hn = sympy.Poly(sympy_hermite(n), x)
        for k in range(7):
            rem = sympy.Poly(sympy_hermite(n + k), x).rem(hn)
            got = sympy.Poly(sum(int(c) * sympy_hermite(j) for j, c in aliasing_nf(k, n).coeffs.items()) + 0 * x, x)
            assert (rem - got).is_zero


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("k", range(7))
def test_aliasing_on_nodes(n, k):
    z = gauss_rule(HERMITE, n).nodes
    nf = aliasing_nf(k, n)
    for zz in z:
        target = float(hermite_poly(n + k)(zz))
        assert abs(float(nf(zz)) - target) < 1e-7 * max(1.0, abs(target))


# rows k = 5, 6 with the coefficients the remainder actually has
nsym = sympy.Symbol("n", integer=True, positive=True)
CORRECTED = {
    5: {1: 5 * nsym * (nsym - 4), 3: 15 * nsym * (nsym - 1) * (nsym - 2),
        5: -sympy.ff(nsym, 5)},
    6: {2: 6 * nsym * (nsym - 1) * (2 * nsym - 15), 4: 24 * nsym * (nsym - 1) * (nsym - 2) * (nsym - 3),
        6: -sympy.ff(nsym, 6)},
}


@pytest.mark.parametrize("k", [5, 6])
def test_aliasing_rows_five_six(k):
    got = aliasing_symbolic(k)
    assert set(got) == set(CORRECTED[k])
    for j, c in CORRECTED[k].items():
        assert sympy.expand(got[j] - c) == 0
    for n in range(k, 11):
        hn = sympy.Poly(sympy_hermite(n), x)
        rem = sympy.Poly(sympy_hermite(n + k), x).rem(hn)
        row = sum(c.subs(nsym, n) * sympy_hermite(n - j) for j, c in CORRECTED[k].items())
        assert (rem - sympy.Poly(row, x)).is_zero


def test_symbolic_matches_numeric_rows():
    for k in range(1, 7):
        row = aliasing_symbolic(k)
        for n in range(k, 10):
            want = aliasing_nf(k, n)
            got = {n - j: int(c.subs(nsym, n)) for j, c in row.items() if c.subs(nsym, n) != 0}
            assert HermiteExpansion(got) == want


def test_weighing_examples():
    assert weighing_polynomial(1) == HermiteExpansion({0: 1})
    assert weighing_polynomial(3) == HermiteExpansion({0: Fraction(1, 2), 2: Fraction(-1, 6)})
    assert weighing_polynomial(3).to_monomial() == UniPoly((Fraction(2, 3), 0, Fraction(-1, 6)))
    assert weighing_polynomial(4) == HermiteExpansion({0: Fraction(5, 12), 2: Fraction(-1, 12)})
    assert str(weighing_polynomial(4)) == "5/12 H0 - 1/12 H2"


@pytest.mark.parametrize("n", range(1, 16))
def test_weighing_matches_gauss_weights(n):
    lam = weighing_polynomial(n)
    assert lam.degree <= n - 1
    w = gauss_rule(HERMITE, n).weights
    vals = np.array(weighing_values(n))
    assert np.max(np.abs(vals - w) / w) < 1e-9
    assert abs(vals.sum() - 1) < 1e-10


@pytest.mark.parametrize("n", range(2, 16))
def test_weighing_identity_exact(n):
    # lambda * H_{n-1}^2 == (n-1)!/n modulo H_n, over the rationals
    lam = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * sympy_hermite(j)
                         for j, c in ((j, Fraction(c)) for j, c in weighing_polynomial(n).coeffs.items())), x)
    prod = lam * sympy.Poly(sympy_hermite(n - 1), x) ** 2
    rem = prod.rem(sympy.Poly(sympy_hermite(n), x))
    assert (rem - sympy.Poly(sympy.Rational(math.factorial(n - 1), n), x)).is_zero


@pytest.mark.parametrize("n", range(2, 16))
def test_weighing_numeric_route(n):
    exact = weighing_polynomial(n)
    numeric = weighing_polynomial(n, method="numeric")
    for j in set(exact.coeffs) | set(numeric.coeffs):
        assert abs(float(numeric[j]) - float(exact[j])) < 1e-9
    if n <= 8:
        assert numeric == exact


def test_weighing_bad_method():
    with pytest.raises(InputError):
        weighing_polynomial(3, method="guess")


def test_snap_rational():
    assert snap_rational(5 / 12) == Fraction(5, 12)
    assert snap_rational(-1 / 12) == Fraction(-1, 12)
    assert snap_rational(2.0000000000000004) == 2
    assert snap_rational(math.sqrt(2), max_denominator=1000) is None
    assert snap_rational(0.0) == 0


def test_expansion_str_and_eval():
    e = HermiteExpansion({0: Fraction(5, 12), 2: Fraction(-1, 12)})
    assert e(0) == Fraction(1, 2)
    assert str(HermiteExpansion({})) == "0"
    assert str(HermiteExpansion({1: 1, 3: -2})) == "H1 - 2 H3"
