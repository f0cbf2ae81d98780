from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toric_alpha.exact import RatVec, vec
from toric_alpha.invariants import neg_gauge
from toric_alpha.polytope import (
    FanRays,
    PolytopeError,
    anticanonical_polytope,
    edges,
    ehrhart_count,
    gauge,
    integrality_check,
    lattice_points,
    negate,
    polar,
    polytope_from_halfspaces,
    polytope_from_vertices,
    rays_of,
    smoothness_check,
    support,
    vertices_from_halfspaces,
    volume,
)

from conftest import CATALOG_NAMES, entry, poly

P2_RAYS = [(1, 0), (0, 1), (-1, -1)]
SQUARE_RAYS = [(1, 0), (0, 1), (-1, 0), (0, -1)]


def vs(*pts):
    return {RatVec(p) for p in pts}


def test_plane_vertices():
    p = anticanonical_polytope(FanRays.of(P2_RAYS))
    assert set(p.vertices) == vs((-1, -1), (2, -1), (-1, 2))


def test_square_vertices():
    p = anticanonical_polytope(FanRays.of(SQUARE_RAYS))
    assert set(p.vertices) == vs((1, 1), (1, -1), (-1, 1), (-1, -1))


def test_one_point_blowup_vertices():
    p = anticanonical_polytope(FanRays.of(P2_RAYS + [(1, 1)]))
    assert set(p.vertices) == vs((2, -1), (-1, 2), (-1, 0), (0, -1))


def test_vertices_in_dimension_one():
    verts, tight = vertices_from_halfspaces([(vec(1), 1), (vec(-1), 1)], 1)
    assert verts == (vec(-1), vec(1))
    assert tight == ((1,), (0,))


def test_unit_square_from_halfspaces():
    hs = [(vec(1, 0), 1), (vec(0, 1), 1), (vec(-1, 0), 0), (vec(0, -1), 0)]
    verts, _ = vertices_from_halfspaces(hs, 2)
    assert len(verts) == 4


def test_two_point_blowup_pentagon():
    p = anticanonical_polytope(FanRays.of(P2_RAYS + [(-1, 0), (0, -1)]))
    assert set(p.vertices) == vs((1, -1), (1, 0), (0, 1), (-1, 1), (-1, -1))


def test_vertices_record_full_tight_sets():
    p = poly("p2")
    for v, t in zip(p.vertices, p.tightness):
        for j, (a, b) in enumerate(p.halfspaces):
            assert (a.dot(v) == b) == (j in t)
            assert a.dot(v) <= b


def test_unbounded_rays_rejected():
    with pytest.raises(PolytopeError, match="unbounded"):
        anticanonical_polytope(FanRays.of([(1, 0), (0, 1)]))


def test_degenerate_halfspace_rejected():
    hs = [(vec(1, 0), 1), (vec(-1, 0), 1), (vec(0, 1), 1), (vec(0, -1), 1), (vec(1, 1), 5)]
    with pytest.raises(PolytopeError, match="degenerate"):
        polytope_from_halfspaces(hs, 2)


def test_rays_must_be_primitive():
    with pytest.raises(PolytopeError):
        FanRays.of([(2, 0), (0, 1), (-1, -1)])


def test_support_examples():
    a = [vec(1, 0), vec(0, 1), vec(-1, -1)]
    assert support(a, vec(1, 1)) == 1
    assert support(a, vec(0, 0)) == 0
    assert support([vec(2, -1)], vec(1, 0)) == 2


def test_gauge_examples():
    minus_p = negate(poly("p2"))
    assert gauge(minus_p, vec(2, -1)) == 2
    assert gauge(minus_p, vec(0, 0)) == 0
    assert gauge(minus_p, vec("1/2", "1/2")) == Fraction(1, 2)


def test_lattice_points_examples():
    assert len(lattice_points(poly("p2"), 1)) == 10
    assert len(lattice_points(poly("p1xp1"), 1)) == 9
    for name in CATALOG_NAMES:
        assert RatVec.zero(poly(name).dim) in lattice_points(poly(name), 1)


def test_lattice_points_are_sorted_and_scaled():
    pts = lattice_points(poly("p2"), 2)
    assert pts == sorted(pts)
    assert all((x * 2).is_integral() and poly("p2").contains(x) for x in pts)


def test_ehrhart_examples():
    p = poly("p2")
    assert [ehrhart_count(p, k) for k in (1, 2, 3)] == [10, 28, 55]
    for k in range(1, 6):
        assert ehrhart_count(p, k) == (9 * k * k + 9 * k + 2) // 2
        assert ehrhart_count(poly("p1xp1"), k) == (2 * k + 1) ** 2
    assert ehrhart_count(p, 1) <= ehrhart_count(p, 2)


def test_smoothness_examples():
    assert smoothness_check(FanRays.of(P2_RAYS)).passed
    assert smoothness_check(FanRays.of(SQUARE_RAYS)).passed
    bad = smoothness_check(FanRays.of([(1, 0), (0, 1), (-1, -2)]))
    assert not bad.passed
    assert set(bad.facet) == vs((1, 0), (-1, -2))
    assert bad.determinant == -2


def test_catalog_is_smooth_and_integral(catalog_name):
    assert smoothness_check(entry(catalog_name).rays).passed
    assert integrality_check(poly(catalog_name))


def test_integrality_examples():
    assert integrality_check(poly("p2"))
    assert not integrality_check(polytope_from_vertices([vec("1/2", 0), vec(0, 1), vec(-1, -1)]))
    shear = [[1, 1], [0, 1]]
    img = [RatVec([sum(shear[i][j] * v[j] for j in range(2)) for i in range(2)])
           for v in poly("p2").vertices]
    assert integrality_check(polytope_from_vertices(img))


def test_edge_counts():
    assert len(edges(poly("p2"))) == 3
    assert len(edges(poly("p1xp1"))) == 4
    assert len(edges(poly("dp2"))) == 5
    assert len(edges(poly("p1cubed"))) == 12
    for e in edges(poly("p3")):
        assert len(e.common) == 2


def test_edges_reject_non_simple():
    octahedron = polytope_from_vertices(
        [vec(1, 0, 0), vec(-1, 0, 0), vec(0, 1, 0), vec(0, -1, 0), vec(0, 0, 1), vec(0, 0, -1)])
    with pytest.raises(PolytopeError, match="not simple"):
        edges(octahedron)


def test_volumes():
    assert volume(poly("p2")) == Fraction(9, 2)
    assert volume(poly("p1xp1")) == 4
    assert volume(poly("p3")) == Fraction(32, 3)
    assert volume(poly("p1cubed")) == 8


def test_polarity_involution(catalog_name):
    p = poly(catalog_name)
    q = polar(negate(p))  # conv of the rays
    assert set(q.vertices) == set(entry(catalog_name).rays.rays)
    back = negate(polar(q))
    assert back.vertices == p.vertices


def test_hull_round_trip(catalog_name):
    p = poly(catalog_name)
    q = polytope_from_vertices(p.vertices)
    assert q.vertices == p.vertices
    assert set(rays_of(q).rays) == set(entry(catalog_name).rays.rays)


def _random_point(rng, n, box=3, den=4):
    return RatVec([Fraction(rng.randint(-box * den, box * den), rng.randint(1, den)) for _ in range(n)])


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG_NAMES), st.integers(0, 10**6))
def test_gauge_membership(name, seed):
    rng = random.Random(seed)
    p = poly(name)
    for _ in range(20):
        x = _random_point(rng, p.dim)
        g = gauge(p, x)
        assert (g <= 1) == p.contains(x)
        assert (g == 1) == p.on_boundary(x)
        assert gauge(p, x * 3) == 3 * g


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG_NAMES), st.integers(0, 10**6))
def test_support_equals_hull_support(name, seed):
    rng = random.Random(seed)
    p = poly(name)
    pts = lattice_points(p, 1)
    y = _random_point(rng, p.dim)
    assert support(pts, y) == support(p.vertices, y)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG_NAMES), st.integers(0, 10**6))
def test_vertex_max_principle(name, seed):
    rng = random.Random(seed)
    p = poly(name)
    top = max(neg_gauge(p, v) for v in p.vertices)
    for _ in range(30):
        w = [Fraction(rng.randint(0, 20)) for _ in p.vertices]
        total = sum(w) or Fraction(1)
        x = RatVec.zero(p.dim)
        for wi, v in zip(w, p.vertices):
            x = x + v * (wi / total)
        if p.contains(x):
            assert neg_gauge(p, x) <= top


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_ehrhart_polynomial_predicts(name):
    from toric_alpha.oracle import _evaluate, _interpolate

    p = poly(name)
    n = p.dim
    counts = [ehrhart_count(p, k) for k in range(1, n + 3)]
    coeffs = _interpolate(list(range(1, n + 2)), counts[: n + 1])
    assert _evaluate(coeffs, n + 2) == counts[n + 1]
