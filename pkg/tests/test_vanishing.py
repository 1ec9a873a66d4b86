import math
import random
from fractions import Fraction

import numpy as np
import pytest

from cubalg.errors import DegenerateNodesError, DimensionMismatchError, InputError, InvalidDesignError
from cubalg.ortho import CHEBYSHEV, HERMITE, LEGENDRE, gauss_rule
from cubalg.polyspace import DEGLEX, DEGREVLEX, LEX, eval_multi
from cubalg.vanishing import (
    ConditioningWarning,
    Design,
    bm_ortho,
    indicator,
    interpolate,
    parse_coordinate,
    product_design,
    weights,
)

R3 = math.sqrt(3)
SYSTEMS = [HERMITE, LEGENDRE, CHEBYSHEV]


def random_design(seed, exact=True):
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    pts = set()
    size = rng.randint(1, 12)
    while len(pts) < size:
        pts.add(tuple(Fraction(rng.randint(-6, 6), rng.choice([1, 2, 3])) for _ in range(d)))
    pts = sorted(pts)
    if not exact:
        pts = [tuple(float(c) for c in p) for p in pts]
    return Design(pts, [rng.choice(SYSTEMS) for _ in range(d)])


def test_design_validation():
    with pytest.raises(InvalidDesignError):
        Design([], HERMITE)
    with pytest.raises(InvalidDesignError):
        Design([(1, 2), (1, 2)], HERMITE)
    with pytest.raises(InvalidDesignError):
        Design([(0.0,), (5e-11,)], HERMITE)
    with pytest.raises(DimensionMismatchError):
        Design([(1, 2), (1,)], HERMITE)
    with pytest.raises(DimensionMismatchError):
        Design([(1, 2)], [HERMITE])


def test_design_json():
    d = Design.from_json('{"dim": 2, "systems": ["hermite", "legendre"], '
                         '"points": [[0, "1/2"], [1, "-1+sqrt(3)"]]}')
    assert d.points[0] == (0, Fraction(1, 2))
    assert d.points[1][1] == pytest.approx(R3 - 1)
    assert [s.name for s in d.systems] == ["hermite", "legendre"]
    assert Design.from_json(d.to_json()).points[0] == d.points[0]
    with pytest.raises(InputError):
        Design.from_json("{not json")
    with pytest.raises(InputError):
        Design.from_json({"dim": 2})
    with pytest.raises(DimensionMismatchError):
        Design.from_json({"dim": 3, "points": [[1, 2]]})
    with pytest.raises(InputError):
        parse_coordinate("x + 1")


def test_single_point():
    G, L = bm_ortho(Design([(Fraction(5, 2),)], HERMITE))
    assert list(L) == [(0,)]
    assert [g.to_ortho((HERMITE,)).terms for g in G.elements] == [{(1,): 1, (0,): Fraction(-5, 2)}]
    assert weights(Design([(0.3, -1.0)], HERMITE)) == [1.0]


def _check_basis(design, G, L):
    assert len(L) == len(design)
    assert L.is_down_set()
    assert np.isfinite(G.condition) and G.condition >= 1
    for g in G.polys():
        for z in design.points:
            lead = max(abs(float(eval_multi(g.__class__({a: 1}, design.systems), z))) for a in g.terms)
            assert abs(float(eval_multi(g, z))) < 1e-7 * max(1.0, lead)
    leads = G.leading_exponents
    # minimal generators of the complement of L
    for a in leads:
        assert a not in L
        assert all(not (b != a and all(x <= y for x, y in zip(b, a))) for b in leads)
        for i, e in enumerate(a):
            if e:
                assert a[:i] + (e - 1,) + a[i + 1:] in L


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("order", [DEGLEX, DEGREVLEX, LEX], ids=str)
def test_basis_invariants(seed, order):
    for exact in (True, False):
        design = random_design(seed, exact)
        G, L = bm_ortho(design, order)
        _check_basis(design, G, L)


@pytest.mark.parametrize("seed", range(10))
def test_exact_and_float_agree(seed):
    Ge, Le = bm_ortho(random_design(seed, True), DEGLEX)
    Gf, Lf = bm_ortho(random_design(seed, False), DEGLEX)
    assert list(Le) == list(Lf)
    for ge, gf in zip(Ge.elements, Gf.elements):
        assert ge.leading == gf.leading
        for b in set(ge.tail) | set(gf.tail):
            want = float(ge.tail.get(b, 0))
            assert abs(float(gf.tail.get(b, 0)) - want) < 1e-7 * max(1.0, abs(want))


@pytest.mark.parametrize("seed", range(10))
def test_interpolation(seed):
    design = random_design(seed, exact=False)
    _, L = bm_ortho(design, DEGLEX)
    rng = np.random.default_rng(seed)
    values = rng.normal(size=len(design)).tolist()
    p = interpolate(design, values, L)
    assert set(p.terms) <= set(L)
    for z, v in zip(design.points, values):
        assert abs(float(eval_multi(p, z)) - v) < 1e-9
    const = interpolate(design, [2.5] * len(design), L)
    assert const.terms == {(0,) * design.dim: pytest.approx(2.5)}


def test_interpolation_errors():
    design = Design([(0,), (1,)], HERMITE)
    with pytest.raises(DimensionMismatchError):
        interpolate(design, [1], [(0,), (1,)])
    with pytest.raises(InputError):
        interpolate(design, [1, 2], [(0,)])


def test_weights_sum_to_one_and_match_indicators():
    for seed in range(15):
        design = random_design(seed, exact=seed % 2 == 0)
        _, L = bm_ortho(design, DEGLEX)
        w = weights(design, DEGLEX, L)
        assert abs(sum(float(x) for x in w) - 1) < 1e-10
        # second route: constant coefficient of every indicator
        for i in range(len(design)):
            ind = indicator(design, i, L)
            assert abs(float(ind.coeff((0,) * design.dim)) - float(w[i])) < 1e-9


def test_exact_weights_are_rational():
    w = weights(Design([(-1,), (0,), (1,)], HERMITE))
    assert w == [Fraction(1, 2), 0, Fraction(1, 2)]


def test_product_design_examples():
    d = product_design([3], HERMITE)
    assert np.allclose(sorted(p[0] for p in d.points), [-R3, 0, R3])
    assert product_design([1, 1], HERMITE).points == ((0.0, 0.0),)
    assert len(product_design([3, 3], HERMITE)) == 9
    with pytest.raises(InputError):
        product_design([0, 2], HERMITE)


def test_product_weights_two_routes():
    design = product_design([3, 3], HERMITE)
    w = weights(design, DEGLEX)
    g = gauss_rule(HERMITE, 3)
    lookup = {round(float(z), 12): float(v) for z, v in zip(g.nodes, g.weights)}
    for (a, b), x in zip(design.points, w):
        assert abs(x - lookup[round(a, 12)] * lookup[round(b, 12)]) < 1e-12
    assert sorted(set(round(x, 12) for x in w)) == sorted({round(u * v, 12) for u in (1 / 6, 2 / 3) for v in (1 / 6, 2 / 3)})


def test_close_points_warn_then_fail():
    design = Design([(0.0,), (5e-9,)], HERMITE)
    with pytest.warns(ConditioningWarning):
        with pytest.raises(DegenerateNodesError):
            bm_ortho(design)
    G, L = bm_ortho(design, tol_abs=1e-12, tol_rel=1e-14)
    assert len(L) == 2


def test_tolerance_validation():
    with pytest.raises(InputError):
        bm_ortho(Design([(0,)], HERMITE), tol_abs=0)
    with pytest.raises(InputError):
        bm_ortho(Design([(0.5,)], HERMITE), exact=True)


def test_render_and_json():
    G, _ = bm_ortho(Design([(-6, -1), (-5, 0), (-2, 1), (3, 2), (10, 3)], HERMITE), DEGLEX)
    assert G.render()[0] == "H_2(y) - H_1(x) + 2 H_1(y) - 4"
    data = G.to_json()
    assert data["L"] == [[0, 0], [0, 1], [1, 0], [1, 1], [2, 0]]
    assert data["elements"][0]["leading"] == [0, 2]
    assert data["elements"][0]["tail"][0] == {"exps": [1, 0], "coeff": 1}
