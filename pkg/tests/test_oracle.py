from __future__ import annotations

import random
from fractions import Fraction

import pytest

from toric_alpha.exact import RatVec, vec
from toric_alpha.invariants import alpha_km, c_general, neg_gauge
from toric_alpha.oracle import (
    BOUNDARY,
    INTERIOR,
    OUTSIDE,
    OracleError,
    _colex_rank,
    _combinations_array,
    alpha_km_bruteforce,
    c_star_bisection,
    ehrhart_fit_check,
    interior_membership,
)
from toric_alpha.polytope import lattice_points

from conftest import CATALOG_NAMES, entry, poly

SQUARE = [vec(1, 1), vec(1, -1), vec(-1, 1), vec(-1, -1)]


def test_interior_membership_examples():
    verts = poly("p2").vertices
    assert interior_membership(vec(0, 0), verts) == INTERIOR
    assert interior_membership(vec(2, -1), verts) == BOUNDARY
    assert interior_membership(vec(3, 0), verts) == OUTSIDE


def test_interior_membership_lower_dimensional_hull():
    seg = [vec(-1, 0), vec(1, 0)]
    assert interior_membership(vec(0, 0), seg) == BOUNDARY


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_membership_agrees_with_gauge(name):
    rng = random.Random(name)
    p = poly(name)
    for _ in range(10):
        x = RatVec([Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(p.dim)])
        # membership against P itself: gauge of P is the gauge of -P at -x
        g = neg_gauge(p, -x)
        expected = INTERIOR if g < 1 else BOUNDARY if g == 1 else OUTSIDE
        assert interior_membership(x, p.vertices) == expected


def test_bisection_examples():
    r = c_star_bisection([vec(2, -1)], poly("p2").vertices, 40)
    assert r.width == Fraction(1, 2**40)
    assert r.contains(Fraction(1, 3))
    r = c_star_bisection([vec(0, 0), vec(1, 0)], SQUARE, 40)
    assert r.upper == 1
    r = c_star_bisection([vec(1, 1)], SQUARE, 40)
    assert r.contains(Fraction(1, 2))


def test_bisection_needs_interior_origin():
    with pytest.raises(OracleError):
        c_star_bisection([vec(1, 1)], [vec(0, 0), vec(1, 0), vec(0, 1)], 5)


def test_bisection_brackets_random_pairs():
    rng = random.Random(7)
    for name in ("p2", "dp1", "p1xp1"):
        pts = lattice_points(poly(name), 1)
        for _ in range(3):
            f = rng.sample(pts, rng.randint(1, 2))
            u = list(poly(name).vertices)
            exact = c_general(f, u)
            br = c_star_bisection(f, u, 12)
            assert br.contains(exact)
            mid = (br.lower + br.upper) / 2
            assert abs(mid - exact) <= br.width / 2


def test_bruteforce_examples():
    p, r = poly("p2"), entry("p2").rays
    assert alpha_km_bruteforce(p, r, 1, 2).value == Fraction(1, 2)
    assert alpha_km_bruteforce(p, r, 1, 1).value == Fraction(1, 3)
    assert alpha_km_bruteforce(p, r, 2, 2).value == Fraction(2, 5)


def test_bruteforce_ceiling():
    with pytest.raises(OracleError, match="ceiling"):
        alpha_km_bruteforce(poly("p3"), entry("p3").rays, 3, 4)


def test_combinations_are_colex_ranked():
    arr = _combinations_array(7, 3)
    assert len(arr) == 35
    assert list(_colex_rank(arr)) == list(range(35))
    assert sorted(map(tuple, arr)) == sorted(set(map(tuple, arr)))


@pytest.mark.parametrize("name", ["p2", "dp1", "dp2", "dp3", "p1xp1", "p3"])
def test_bruteforce_matches_search_small(name):
    p, r = poly(name), entry(name).rays
    for k in (1, 2):
        for m in (2, 3):
            assert alpha_km_bruteforce(p, r, k, m).value == alpha_km(p, r, k, m).value


def test_ehrhart_fit_examples():
    fit = ehrhart_fit_check(poly("p2"), 6)
    assert fit.passed and fit.coefficients[-1] == Fraction(9, 2)
    assert fit.coefficients == (1, Fraction(9, 2), Fraction(9, 2))
    fit = ehrhart_fit_check(poly("p1xp1"), 6)
    assert fit.passed and fit.coefficients[-1] == 4
    assert ehrhart_fit_check(poly("p3"), 7).passed


def test_ehrhart_fit_kmax_too_small():
    with pytest.raises(ValueError):
        ehrhart_fit_check(poly("p2"), 3)
