"""Lattice automorphisms of a polytope, subgroups, orbits and averaging.

A matrix ``A`` acts on points by ``x -> A x``.  Every group is stored with
its elements sorted (identity first) so that all derived output is
deterministic.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import lp
from .exact import RatMat, RatVec, det, inverse, rank
from .polytope import Polytope, lattice_int_points


class GroupError(ValueError):
    """A matrix or generator set is not a valid automorphism (subgroup)."""


@dataclass(frozen=True)
class UnimodularMap:
    matrix: RatMat

    def __post_init__(self):
        m = self.matrix
        if not m.is_square:
            raise GroupError("matrix is not square")
        if not m.is_integral():
            raise GroupError("matrix is not integral")
        if abs(det(m)) != 1:
            raise GroupError("matrix determinant is not +1 or -1")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "UnimodularMap":
        return cls(RatMat(rows))

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    def int_rows(self) -> tuple:
        return tuple(tuple(int(x) for x in r) for r in self.matrix.rows)

    def apply(self, x: RatVec) -> RatVec:
        return self.matrix @ x

    def compose(self, other: "UnimodularMap") -> "UnimodularMap":
        """``self ∘ other``."""
        return UnimodularMap(self.matrix @ other.matrix)

    def is_identity(self) -> bool:
        return self.matrix == RatMat.identity(self.dim)

    def to_json(self) -> list:
        return [list(r) for r in self.int_rows()]

    def __lt__(self, other: "UnimodularMap") -> bool:
        return self.matrix < other.matrix


def _sorted_elements(elements: Iterable[UnimodularMap]) -> tuple:
    els = sorted(set(elements), key=lambda g: (not g.is_identity(), g.int_rows()))
    return tuple(els)


@dataclass(frozen=True)
class FiniteGroup:
    """Finite matrix group; ``elements[0]`` is the identity."""

    dim: int
    elements: tuple
    generators: tuple = ()

    @property
    def order(self) -> int:
        return len(self.elements)

    @functools.cached_property
    def element_sum(self) -> tuple:
        """Integer matrix ``sum of all elements``; ``π_H = element_sum / order``."""
        n = self.dim
        total = [[0] * n for _ in range(n)]
        for g in self.elements:
            for i, row in enumerate(g.int_rows()):
                for j, x in enumerate(row):
                    total[i][j] += x
        return tuple(tuple(r) for r in total)

    def __contains__(self, g: UnimodularMap) -> bool:
        return g in set(self.elements)

    def is_closed(self) -> bool:
        els = set(self.elements)
        return all(a.compose(b) in els for a in self.elements for b in self.elements)

    def is_inverse_closed(self) -> bool:
        els = set(self.elements)
        return all(UnimodularMap(inverse(a.matrix)) in els for a in self.elements)

    @classmethod
    def trivial(cls, n: int) -> "FiniteGroup":
        return cls(n, (UnimodularMap(RatMat.identity(n)),), ())


def preserves(g: UnimodularMap, p: Polytope) -> bool:
    verts = set(p.vertices)
    return g.dim == p.dim and {g.apply(v) for v in p.vertices} == verts


def automorphism_group(p: Polytope) -> FiniteGroup:
    """All ``A`` in ``GL(n, Z)`` with ``A(Ver P) = Ver P``.

    A frame of ``n`` linearly independent vertices is fixed; each ordered
    ``n``-tuple of vertices is a candidate image and determines ``A``.
    """
    n = p.dim
    verts = list(p.vertices)
    frame = []
    for v in verts:
        if rank([f.coords for f in frame] + [v.coords]) == len(frame) + 1:
            frame.append(v)
        if len(frame) == n:
            break
    if len(frame) < n:
        raise GroupError("no linear frame: vertices do not span the ambient space")
    finv = inverse(RatMat.from_columns(frame))
    vset = set(verts)
    found = []
    for images in itertools.permutations(verts, n):
        a = RatMat.from_columns(images) @ finv
        if not a.is_integral() or abs(det(a)) != 1:
            continue
        g = UnimodularMap(a)
        if {g.apply(v) for v in verts} == vset:
            found.append(g)
    return FiniteGroup(n, _sorted_elements(found), ())


def subgroup_closure(gens: Sequence[UnimodularMap], within: FiniteGroup) -> FiniteGroup:
    """Smallest subgroup of ``within`` containing ``gens``."""
    members = set(within.elements)
    for g in gens:
        if g not in members:
            raise GroupError(f"generator {g.to_json()} is not an automorphism of the polytope")
    ident = within.elements[0]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = g.compose(a)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return FiniteGroup(within.dim, _sorted_elements(seen), tuple(gens))


def cyclic_subgroups(group: FiniteGroup) -> list:
    """Distinct cyclic subgroups, ordered by (order, element list)."""
    out = {}
    for g in group.elements:
        h = subgroup_closure([g], group)
        key = tuple(e.int_rows() for e in h.elements)
        out.setdefault(key, h)
    return sorted(out.values(), key=lambda h: (h.order, [e.int_rows() for e in h.elements]))


@dataclass(frozen=True)
class OrbitDecomposition:
    k: int
    orbits: tuple  # each a sorted tuple of RatVec; orbits sorted by representative

    @property
    def representatives(self) -> tuple:
        return tuple(o[0] for o in self.orbits)

    def __len__(self) -> int:
        return len(self.orbits)

    def to_json(self) -> dict:
        return {"k": self.k, "orbits": [[v.to_json() for v in o] for o in self.orbits]}


def orbit_decomposition(h: FiniteGroup, p: Polytope, k: int) -> OrbitDecomposition:
    """Partition ``(1/k)M ∩ P`` into ``h``-orbits; representatives are lexicographically least."""
    pts = [tuple(int(c) for c in row) for row in lattice_int_points(p, k)]
    index = {z: i for i, z in enumerate(pts)}
    mats = [g.int_rows() for g in h.elements]
    owner = [-1] * len(pts)
    orbits = []
    for i, z in enumerate(pts):
        if owner[i] >= 0:
            continue
        members = set()
        for a in mats:
            w = tuple(sum(r[c] * z[c] for c in range(len(z))) for r in a)
            j = index.get(w)
            if j is None:
                raise GroupError("group element does not preserve the lattice points")
            members.add(j)
        for j in members:
            owner[j] = len(orbits)
        orbits.append(
            tuple(RatVec._raw(tuple(Fraction(c, k) for c in pts[j])) for j in sorted(members))
        )
    return OrbitDecomposition(k, tuple(orbits))


def project_pi_H(h: FiniteGroup, x: RatVec) -> RatVec:
    """Average of the ``h``-orbit of ``x``."""
    if x.dim != h.dim:
        raise ValueError(f"dimension mismatch: {h.dim} vs {x.dim}")
    order = h.order
    return RatVec._raw(
        tuple(sum((c * xi for c, xi in zip(row, x.coords) if c), Fraction(0)) / order
              for row in h.element_sum)
    )


def _in_hull(x: RatVec, points: Sequence[RatVec]) -> bool:
    if not points:
        return False
    n = x.dim
    eq = [([p[i] for p in points], x[i]) for i in range(n)]
    eq.append(([1] * len(points), 1))
    out = lp.solve(lp.LinearProgram.build([0] * len(points), "min", eq=eq))
    return out.optimal


def fixed_polytope_vertices(
    h: FiniteGroup, p: Polytope, extreme_only: bool = False
) -> tuple:
    """The set ``π_H(Ver P)`` sorted lexicographically.

    With ``extreme_only`` the points lying in the hull of the others are
    dropped, leaving exactly the vertices of ``P^H``.
    """
    pts = sorted({project_pi_H(h, v) for v in p.vertices})
    if extreme_only and len(pts) > 1:
        pts = [u for u in pts if not _in_hull(u, [w for w in pts if w != u])]
    return tuple(pts)


def parse_generators(matrices: Sequence[Sequence[Sequence[int]]]) -> list:
    out = []
    for m in matrices:
        for row in m:
            for x in row:
                if isinstance(x, bool) or not isinstance(x, int):
                    raise GroupError(f"generator entry {x!r} is not an integer")
        out.append(UnimodularMap.of(m))
    return out


def group_from_spec(spec, p: Polytope, aut: Optional[FiniteGroup] = None) -> FiniteGroup:
    """Build a subgroup of Aut P from ``"trivial"``, ``"full-aut"`` or generator matrices."""
    if aut is None:
        aut = automorphism_group(p)
    if spec == "trivial":
        return FiniteGroup.trivial(p.dim)
    if spec == "full-aut":
        return aut
    if isinstance(spec, dict):
        spec = spec.get("generators")
    if not isinstance(spec, (list, tuple)):
        raise GroupError(f"unrecognized group specification {spec!r}")
    return subgroup_closure(parse_generators(spec), aut)
