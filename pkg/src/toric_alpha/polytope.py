"""Fan rays, rational polytopes, gauges and lattice points.

The anticanonical polytope of a fan with rays ``v_i`` is
``P = {y : <y, -v_i> <= 1}``.  Polytopes keep both representations in sync:
halfspaces ``<x, normal> <= rhs`` and the vertex list, together with the
set of halfspaces tight at every vertex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import lp
from .exact import RatMat, RatVec, as_rat, denominator_lcm, det, rank, solve_linear


class PolytopeError(ValueError):
    """Invalid or unsupported polytope input (unbounded, degenerate, ...)."""


@dataclass(frozen=True)
class FanRays:
    """Primitive integer ray generators of a complete fan."""

    dim: int
    rays: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise PolytopeError("dimension must be positive")
        for r in self.rays:
            if not isinstance(r, RatVec):
                raise TypeError("rays must be RatVec instances")
            if r.dim != self.dim:
                raise PolytopeError(f"ray {r!r} does not have dimension {self.dim}")
            if not r.is_integral():
                raise PolytopeError(f"ray {r!r} is not integral")
            if math.gcd(*(int(c) for c in r)) != 1:
                raise PolytopeError(f"ray {r!r} is not primitive")
        if len(set(self.rays)) != len(self.rays):
            raise PolytopeError("duplicate rays")

    @classmethod
    def of(cls, rays: Iterable[Sequence[int]]) -> "FanRays":
        vs = tuple(RatVec(r) for r in rays)
        if not vs:
            raise PolytopeError("no rays given")
        return cls(vs[0].dim, vs)

    def to_json(self) -> list:
        return [[int(c) for c in r] for r in self.rays]


@dataclass(frozen=True)
class Polytope:
    """Bounded full-dimensional polytope with synchronized H- and V-data.

    ``tightness[i]`` lists the indices of halfspaces tight at ``vertices[i]``.
    Vertices are sorted lexicographically.
    """

    dim: int
    halfspaces: tuple  # of (normal: RatVec, rhs: Fraction)
    vertices: tuple
    tightness: tuple

    def contains(self, x: RatVec) -> bool:
        return all(a.dot(x) <= b for a, b in self.halfspaces)

    def on_boundary(self, x: RatVec) -> bool:
        return self.contains(x) and any(a.dot(x) == b for a, b in self.halfspaces)

    def origin_interior(self) -> bool:
        return all(b > 0 for _, b in self.halfspaces)

    def is_centrally_symmetric(self) -> bool:
        return set(self.vertices) == {-v for v in self.vertices}

    def is_integral(self) -> bool:
        return all(v.is_integral() for v in self.vertices)

    def vertices_json(self) -> list:
        return [v.to_json() for v in self.vertices]


@dataclass(frozen=True)
class FacePath:
    """An edge: ordered vertex pair and the halfspaces tight along it."""

    a: RatVec
    b: RatVec
    common: tuple

    def midpoint(self) -> RatVec:
        return (self.a + self.b) / 2


@dataclass(frozen=True)
class SmoothnessReport:
    passed: bool
    facet: Optional[tuple] = None  # rays on the offending facet of conv(rays)
    determinant: Optional[Fraction] = None


# ---------------------------------------------------------------- construction


def _affine_rank(points: Sequence[RatVec]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return rank([(p - base).coords for p in points[1:]])


def _check_bounded(halfspaces: Sequence, n: int) -> None:
    ub = [(a.coords, b) for a, b in halfspaces]
    free = [None] * n
    for i in range(n):
        for s in (1, -1):
            obj = [0] * n
            obj[i] = s
            out = lp.solve(lp.LinearProgram.build(obj, "max", ub=ub, lower=free))
            if out.status == lp.INFEASIBLE:
                raise PolytopeError("empty: the halfspaces have no common point")
            if out.status == lp.UNBOUNDED:
                raise PolytopeError("unbounded: the halfspaces do not cut out a bounded polytope")


def vertices_from_halfspaces(halfspaces: Sequence, n: int) -> tuple:
    """Enumerate vertices of a bounded intersection of halfspaces.

    Returns ``(vertices, tightness)`` with vertices sorted lexicographically
    and each tightness entry the full tuple of tight halfspace indices.
    """
    hs = [(a if isinstance(a, RatVec) else RatVec(a), as_rat(b)) for a, b in halfspaces]
    if any(a.dim != n for a, _ in hs):
        raise PolytopeError("halfspace normal of the wrong dimension")
    _check_bounded(hs, n)
    found = set()
    for combo in itertools.combinations(range(len(hs)), n):
        mat = RatMat([hs[i][0].coords for i in combo])
        x = solve_linear(mat, RatVec._raw(tuple(hs[i][1] for i in combo)))
        if x is None or x in found:
            continue
        if all(a.dot(x) <= b for a, b in hs):
            found.add(x)
    verts = tuple(sorted(found))
    tight = tuple(tuple(j for j, (a, b) in enumerate(hs) if a.dot(v) == b) for v in verts)
    return verts, tight


def polytope_from_halfspaces(halfspaces: Sequence, n: int) -> Polytope:
    hs = tuple((a if isinstance(a, RatVec) else RatVec(a), as_rat(b)) for a, b in halfspaces)
    verts, tight = vertices_from_halfspaces(hs, n)
    used = {j for t in tight for j in t}
    for j in range(len(hs)):
        if j not in used:
            raise PolytopeError(f"degenerate: halfspace {j} touches no vertex")
    return Polytope(n, hs, verts, tight)


def anticanonical_polytope(rays: FanRays) -> Polytope:
    """``P = {y : <y, -v_i> <= 1}``; halfspace ``i`` corresponds to ray ``i``."""
    hs = tuple((-v, Fraction(1)) for v in rays.rays)
    p = polytope_from_halfspaces(hs, rays.dim)
    if not p.origin_interior():
        raise PolytopeError("origin is not interior")
    return p


def _normalize_halfspace(a: RatVec, b: Fraction) -> tuple:
    if b != 0:
        s = abs(b)
        return a / s, b / s
    L = denominator_lcm(a.coords)
    ints = [int(c * L) for c in a.coords]
    g = math.gcd(*ints)
    return RatVec._raw(tuple(Fraction(c, g) for c in ints)), Fraction(0)


def polytope_from_vertices(points: Iterable) -> Polytope:
    """Convex hull of a finite full-dimensional point set (intended for n <= 4)."""
    pts = sorted({p if isinstance(p, RatVec) else RatVec(p) for p in points})
    if not pts:
        raise PolytopeError("empty point set")
    n = pts[0].dim
    if _affine_rank(pts) != n:
        raise PolytopeError("points are not full-dimensional")
    facets = []
    seen = set()
    for combo in itertools.combinations(range(len(pts)), n):
        sub = [pts[i] for i in combo]
        if _affine_rank(sub) != n - 1:
            continue
        normal = _hyperplane_normal(sub)
        b = normal.dot(sub[0])
        vals = [normal.dot(p) for p in pts]
        if all(v <= b for v in vals):
            pass
        elif all(v >= b for v in vals):
            normal, b = -normal, -b
        else:
            continue
        key = _normalize_halfspace(normal, b)
        if key in seen:
            continue
        on = [p for p in pts if key[0].dot(p) == key[1]]
        if _affine_rank(on) == n - 1:
            seen.add(key)
            facets.append(key)
    facets.sort(key=lambda h: (h[0].coords, h[1]))
    verts = []
    for p in pts:
        tight = [a for a, b in facets if a.dot(p) == b]
        if rank([a.coords for a in tight]) == n:
            verts.append(p)
    tightness = tuple(
        tuple(j for j, (a, b) in enumerate(facets) if a.dot(v) == b) for v in verts
    )
    return Polytope(n, tuple(facets), tuple(verts), tightness)


def _hyperplane_normal(points: Sequence[RatVec]) -> RatVec:
    """A nonzero normal of the affine hyperplane through n affinely independent points."""
    n = points[0].dim
    diffs = [(p - points[0]).coords for p in points[1:]]
    # cofactor expansion gives the generalized cross product
    coords = []
    for j in range(n):
        minor = RatMat([[row[c] for c in range(n) if c != j] for row in diffs]) if diffs else None
        d = det(minor) if minor is not None else Fraction(1)
        coords.append(d if j % 2 == 0 else -d)
    return RatVec._raw(tuple(coords))


def negate(p: Polytope) -> Polytope:
    """``-P``."""
    hs = tuple((-a, b) for a, b in p.halfspaces)
    order = sorted(range(len(p.vertices)), key=lambda i: -p.vertices[i])
    return Polytope(
        p.dim, hs, tuple(-p.vertices[i] for i in order), tuple(p.tightness[i] for i in order)
    )


def polar(p: Polytope) -> Polytope:
    """``P° = {y : <x,y> <= 1 for all x in P}``; requires 0 interior."""
    if not p.origin_interior():
        raise PolytopeError("polar needs the origin in the interior")
    return polytope_from_halfspaces(tuple((v, Fraction(1)) for v in p.vertices), p.dim)


def rays_of(p: Polytope) -> FanRays:
    """Recover fan rays from a reflexive polytope ``{y : <y,-v_i> <= 1}``."""
    rays = []
    for a, b in p.halfspaces:
        if b <= 0:
            raise PolytopeError("origin is not interior")
        v = -(a / b)
        if not v.is_integral():
            raise PolytopeError("polytope is not reflexive: a facet is not at lattice distance one")
        rays.append(v)
    return FanRays(p.dim, tuple(rays))


# ---------------------------------------------------------------- functions


def support(points: Iterable[RatVec], y: RatVec) -> Fraction:
    """``max_{x in points} <x, y>``."""
    pts = list(points)
    if not pts:
        raise ValueError("support of an empty set")
    return max(x.dot(y) for x in pts)


def gauge(p: Polytope, x: RatVec) -> Fraction:
    """``||x||_p = max over facets of <x, normal>/rhs``; needs 0 interior to ``p``."""
    if not p.origin_interior():
        raise PolytopeError("gauge needs the origin in the interior")
    return max(a.dot(x) / b for a, b in p.halfspaces)


def ray_gauge(rays: FanRays, x: RatVec) -> Fraction:
    """Gauge of ``-P`` computed straight from the rays: ``max_i <x, v_i>``."""
    return max(v.dot(x) for v in rays.rays)


# ---------------------------------------------------------------- lattice points


def _integer_halfspaces(p: Polytope) -> tuple:
    normals, rhs = [], []
    for a, b in p.halfspaces:
        L = math.lcm(denominator_lcm(a.coords), b.denominator)
        normals.append([int(c * L) for c in a.coords])
        rhs.append(b * L)
    return np.array(normals, dtype=np.int64), rhs


def lattice_int_points(p: Polytope, k: int) -> np.ndarray:
    """Integer points ``z`` of ``k·p`` as an ``(N, n)`` array in lexicographic order."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    n = p.dim
    lo = [math.ceil(k * min(v[i] for v in p.vertices)) for i in range(n)]
    hi = [math.floor(k * max(v[i] for v in p.vertices)) for i in range(n)]
    axes = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    normals, rhs = _integer_halfspaces(p)
    bounds = np.array([math.floor(k * b) for b in rhs], dtype=np.int64)
    mask = np.all(grid @ normals.T <= bounds, axis=1)
    return grid[mask]


def lattice_points(p: Polytope, k: int = 1) -> list:
    """All points of ``(1/k)Z^n ∩ p`` in lexicographic order."""
    pts = lattice_int_points(p, k)
    return [RatVec._raw(tuple(Fraction(int(c), k) for c in row)) for row in pts]


def ehrhart_count(p: Polytope, k: int) -> int:
    """``E_P(k) = |kP ∩ Z^n|``."""
    return int(lattice_int_points(p, k).shape[0])


# ---------------------------------------------------------------- checks


def smoothness_check(rays: FanRays) -> SmoothnessReport:
    """Every facet of ``conv(rays)`` must carry exactly ``n`` rays forming a Z-basis.

    Facets of ``conv(rays)`` are dual to vertices of the anticanonical
    polytope, and the rays on a facet are the halfspaces tight at that vertex.
    """
    p = anticanonical_polytope(rays)
    n = rays.dim
    for t in p.tightness:
        facet = tuple(rays.rays[i] for i in t)
        if len(facet) != n:
            return SmoothnessReport(False, facet, None)
        d = det(RatMat([r.coords for r in facet]))
        if abs(d) != 1:
            return SmoothnessReport(False, facet, d)
    return SmoothnessReport(True)


def integrality_check(p: Polytope) -> bool:
    return p.is_integral()


def is_simple(p: Polytope) -> bool:
    return all(len(t) == p.dim for t in p.tightness)


def edges(p: Polytope) -> list:
    """Edges of a simple polytope, ordered by vertex index pairs."""
    n = p.dim
    if not is_simple(p):
        raise PolytopeError("not simple: some vertex lies on more than n facets")
    out = []
    for i, j in itertools.combinations(range(len(p.vertices)), 2):
        common = tuple(sorted(set(p.tightness[i]) & set(p.tightness[j])))
        if len(common) == n - 1 and rank([p.halfspaces[c][0].coords for c in common]) == n - 1:
            out.append(FacePath(p.vertices[i], p.vertices[j], common))
    return out


# ---------------------------------------------------------------- volume


def _subfaces(p: Polytope, face: frozenset, d: int) -> list:
    """Faces of dimension ``d-1`` inside ``face`` (a set of vertex indices of dim ``d``)."""
    out = set()
    for j in range(len(p.halfspaces)):
        sub = frozenset(i for i in face if j in p.tightness[i])
        if sub and sub != face and _affine_rank([p.vertices[i] for i in sorted(sub)]) == d - 1:
            out.add(sub)
    return sorted(out, key=sorted)


def triangulate(p: Polytope) -> list:
    """Pulling triangulation: each simplex is a tuple of ``n+1`` vertex indices."""

    def rec(face: frozenset, d: int) -> list:
        if d == 0:
            return [tuple(face)]
        apex = min(face)
        simplices = []
        for sub in _subfaces(p, face, d):
            if apex in sub:
                continue
            for s in rec(sub, d - 1):
                simplices.append((apex,) + s)
        return simplices

    return rec(frozenset(range(len(p.vertices))), p.dim)


def volume(p: Polytope) -> Fraction:
    """Euclidean volume via the pulling triangulation."""
    n = p.dim
    total = Fraction(0)
    for s in triangulate(p):
        base = p.vertices[s[0]]
        d = det(RatMat([(p.vertices[i] - base).coords for i in s[1:]]))
        total += abs(d)
    return total / math.factorial(n)
