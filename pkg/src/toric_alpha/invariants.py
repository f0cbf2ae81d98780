"""Alpha-type invariants of smooth toric Fano manifolds from polytope data.

Throughout, ``p`` is the anticanonical polytope ``P = {y : <y,-v_i> <= 1}``
and ``||x||_{-P} = max_i <x, v_i>`` is the gauge of ``-P``.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import lp
from .exact import RatVec, denominator_lcm
from .polytope import FanRays, Polytope, edges, lattice_int_points, ray_gauge
from .symmetry import FiniteGroup, GroupError, orbit_decomposition, preserves, project_pi_H

VERTEX_FORMULA = "vertex-formula"
ORBIT_FORMULA = "orbit-formula"
SUBSET_SEARCH = "subset-search"


class NoInvariantSubspace(ValueError):
    """``m`` exceeds the number of available lattice points: the infimum is over the empty set."""


class ConsistencyError(RuntimeError):
    """A proven relation between computed quantities failed."""


@dataclass(frozen=True)
class AlphaValue:
    invariant: str
    value: Fraction
    path: str
    k: int
    group_order: int = 1
    m: Optional[int] = None
    witness_point: Optional[RatVec] = None
    witness_subset: Optional[tuple] = None

    def to_json(self) -> dict:
        from .exact import rat_str

        if self.witness_subset is not None:
            witness = [v.to_json() for v in self.witness_subset]
        elif self.witness_point is not None:
            witness = self.witness_point.to_json()
        else:
            witness = None
        out = {
            "invariant": self.invariant,
            "value": rat_str(self.value),
            "witness": witness,
            "path": self.path,
            "k": self.k,
        }
        if self.m is not None:
            out["m"] = self.m
        out["group_order"] = self.group_order
        return out


def neg_gauge(p: Polytope, x: RatVec) -> Fraction:
    """``||x||_{-P}`` read off the halfspaces of ``P``."""
    return max(-a.dot(x) / b for a, b in p.halfspaces)


def _check_group(h: FiniteGroup, p: Polytope) -> None:
    if h.dim != p.dim:
        raise GroupError("group and polytope dimensions differ")
    for g in h.elements:
        if not preserves(g, p):
            raise GroupError(f"{g.to_json()} is not an automorphism of the polytope")


def _alpha_of(gauge_value: Fraction) -> Fraction:
    return 1 / (1 + gauge_value)


def alpha_kG(p: Polytope, rays: FanRays, h: FiniteGroup, k: int = 1) -> AlphaValue:
    """``min over u in π_H(Ver P)`` of ``1/(1 + max_i <u, v_i>)``.

    The value does not depend on ``k``; it is only recorded in the result.
    """
    _check_group(h, p)
    best = None
    for u in sorted({project_pi_H(h, v) for v in p.vertices}):
        val = _alpha_of(ray_gauge(rays, u))
        if best is None or val < best[0]:
            best = (val, u)
    return AlphaValue("alpha_kG", best[0], VERTEX_FORMULA, k, h.order, witness_point=best[1])


glct_kG = alpha_kG


def alpha_via_orbits(p: Polytope, rays: FanRays, h: FiniteGroup, k: int) -> AlphaValue:
    """Minimum over ``h``-orbits ``O`` of ``(1/k)M ∩ P`` of ``1/(1 + ||π_H(rep O)||)``."""
    _check_group(h, p)
    v = [[int(c) for c in r.coords] for r in rays.rays]
    s = h.element_sum
    best = None
    for orbit in orbit_decomposition(h, p, k).orbits:
        z = [int(c * k) for c in orbit[0].coords]
        sz = [sum(a * b for a, b in zip(row, z)) for row in s]
        # ||π_H(rep)|| = max_j <S z, v_j> / (|H| k)
        g = Fraction(max(sum(a * b for a, b in zip(vj, sz)) for vj in v), h.order * k)
        val = _alpha_of(g)
        if best is None or val < best[0]:
            best = (val, orbit[0])
    u = project_pi_H(h, best[1])
    return AlphaValue("alpha_kG", best[0], ORBIT_FORMULA, k, h.order, witness_point=u)


def _min_gauge_on_hull(p: Polytope, f: Sequence[RatVec]) -> Fraction:
    """``min over conv f`` of ``||·||_{-P}`` by the LP ``min t``, ``<x, v_j> <= t``."""
    f = list(f)
    if not f:
        raise ValueError("empty point set")
    if len(f) == 1:
        return neg_gauge(p, f[0])
    nf = len(f)
    ub = []
    for a, b in p.halfspaces:
        w = -a / b
        ub.append(([w.dot(x) for x in f] + [-1], 0))
    eq = [([1] * nf + [0], 1)]
    out = lp.solve(lp.LinearProgram.build([0] * nf + [1], "min", eq=eq, ub=ub, lower=[0] * nf + [None]))
    if not out.optimal:
        raise ConsistencyError(f"gauge minimization ended {out.status}")
    return out.value


def c_k_subset(p: Polytope, f: Sequence[RatVec]) -> Fraction:
    """``1/(1 + min over conv f of ||·||_{-P})``; ``f`` must lie in ``P``."""
    f = list(f)
    if not f:
        raise ValueError("empty point set")
    for x in f:
        if not p.contains(x):
            raise ValueError(f"point {x!r} lies outside the polytope")
    return _alpha_of(_min_gauge_on_hull(p, f))


def c_general(f: Sequence[RatVec], u: Sequence[RatVec]) -> Fraction:
    """Largest ``c <= 1`` with ``0 ∈ c·conv f + (1-c)·conv u``, as ``t/(1+t)``.

    ``t`` maximizes ``sum y_i`` subject to ``sum y_i f_i + sum mu_j u_j = 0``,
    ``sum mu_j = 1``, ``y, mu >= 0``; an unbounded ``t`` gives ``1``.
    """
    from .oracle import INTERIOR, interior_membership

    f, u = list(f), list(u)
    if not f or not u:
        raise ValueError("empty point set")
    n = u[0].dim
    if interior_membership(RatVec.zero(n), u) != INTERIOR:
        raise ValueError("origin not interior to conv U")
    nf, nu = len(f), len(u)
    eq = [([x[i] for x in f] + [w[i] for w in u], 0) for i in range(n)]
    eq.append(([0] * nf + [1] * nu, 1))
    out = lp.solve(lp.LinearProgram.build([1] * nf + [0] * nu, "max", eq=eq))
    if out.status == lp.UNBOUNDED:
        return Fraction(1)
    if not out.optimal:
        raise ConsistencyError(f"singularity-exponent LP ended {out.status}")
    return out.value / (1 + out.value)


# ---------------------------------------------------------------- subset search


@dataclass
class SearchStats:
    nodes: int = 0
    pruned: int = 0


@dataclass
class _Shared:
    best: Fraction
    subset: Optional[tuple]
    lock: threading.Lock = field(default_factory=threading.Lock)


class _SubsetSearch:
    """Branch and bound for ``max over |F| = m of min over conv F of the gauge``.

    Points are sorted by gauge descending, then lexicographically.  Subsets
    grow in index order.  A partial subset ``F`` whose completion must add
    ``r`` more points after index ``i`` is bounded by
    ``min(mu(F), g[i + r])``: the hull minimum only drops on supersets and
    never exceeds the gauge of any member.
    """

    def __init__(self, p: Polytope, rays: FanRays, k: int, m: int):
        z = lattice_int_points(p, k)
        if m < 1:
            raise ValueError("m must be positive")
        if m > len(z):
            raise NoInvariantSubspace(
                f"no invariant subspace of dimension {m}: only {len(z)} sections at k={k}"
            )
        self.p = p
        self.k = k
        self.m = m
        v = np.array([[int(c) for c in r] for r in rays.rays], dtype=np.int64)
        pair = z @ v.T  # k * <x, v_j>
        top = pair.max(axis=1)
        # gauge descending, then lexicographic (np.lexsort keys: last is primary)
        order = np.lexsort(tuple(z[:, c] for c in reversed(range(z.shape[1]))) + (-top,))
        self.z = z[order]
        self.pair = pair[order].tolist()
        self.g = [Fraction(int(t), k) for t in top[order]]
        self.npoints = len(self.g)

    def point(self, i: int) -> RatVec:
        return RatVec._raw(tuple(Fraction(int(c), self.k) for c in self.z[i]))

    def mu(self, idx: tuple) -> Fraction:
        if len(idx) == 1:
            return self.g[idx[0]]
        nf = len(idx)
        nrays = len(self.pair[0])
        ub = [([Fraction(self.pair[i][j], self.k) for i in idx] + [-1], 0) for j in range(nrays)]
        eq = [([1] * nf + [0], 1)]
        out = lp.solve(
            lp.LinearProgram.build([0] * nf + [1], "min", eq=eq, ub=ub, lower=[0] * nf + [None])
        )
        if not out.optimal:
            raise ConsistencyError(f"gauge minimization ended {out.status}")
        return out.value

    def _bound(self, partial_mu: Fraction, last: int, depth: int) -> Optional[Fraction]:
        need = self.m - depth
        if need == 0:
            return partial_mu
        if last + need >= self.npoints:
            return None
        return min(partial_mu, self.g[last + need])

    def dfs(self, prefix: tuple, prefix_mu: Fraction, shared: _Shared, stats: SearchStats,
            target: Optional[Fraction] = None) -> Optional[tuple]:
        """Depth-first search below ``prefix``.

        Without ``target`` it improves ``shared`` on strict gains.  With a
        ``target`` it returns the first subset (in search order) reaching it.
        """
        stats.nodes += 1
        if len(prefix) == self.m:
            if target is not None:
                return prefix if prefix_mu == target else None
            with shared.lock:
                if prefix_mu > shared.best:
                    shared.best, shared.subset = prefix_mu, prefix
            return None
        start = prefix[-1] + 1 if prefix else 0
        for i in range(start, self.npoints - (self.m - len(prefix)) + 1):
            # cheap bound before paying for the LP
            g_bound = self.g[i] if self.m - len(prefix) == 1 else self.g[i + self.m - len(prefix) - 1]
            pre_bound = min(prefix_mu, g_bound) if prefix else g_bound
            if self._prune(pre_bound, shared, target):
                stats.pruned += 1
                # gauges only decrease further along, so later siblings fare no better
                break
            child = prefix + (i,)
            child_mu = self.mu(child) if prefix else self.g[i]
            b = self._bound(child_mu, i, len(child))
            if b is None:
                continue
            if self._prune(b, shared, target):
                stats.pruned += 1
                continue
            hit = self.dfs(child, child_mu, shared, stats, target)
            if hit is not None:
                return hit
        return None

    @staticmethod
    def _prune(bound: Fraction, shared: _Shared, target: Optional[Fraction]) -> bool:
        if target is not None:
            return bound < target
        return bound <= shared.best


def alpha_km(p: Polytope, rays: FanRays, k: int, m: int, threads: int = 1,
             stats: Optional[SearchStats] = None) -> AlphaValue:
    """``[1 + max over |F| = m of min over conv F of ||·||_{-P}]^(-1)`` over ``F ⊆ (1/k)M ∩ P``."""
    search = _SubsetSearch(p, rays, k, m)
    stats = stats if stats is not None else SearchStats()
    shared = _Shared(Fraction(-1), None)
    if threads <= 1:
        search.dfs((), Fraction(0), shared, stats)
        best, subset = shared.best, shared.subset
    else:
        # top-level branches run concurrently against one monotone incumbent
        n_top = search.npoints - m + 1
        local = [SearchStats() for _ in range(n_top)]

        def branch(i: int) -> None:
            s = local[i]
            s.nodes += 1
            b = search._bound(search.g[i], i, 1)
            if b is None or _SubsetSearch._prune(b, shared, None):
                s.pruned += 1
                return
            search.dfs((i,), search.g[i], shared, s)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(branch, range(n_top)))
        for s in local:
            stats.nodes += s.nodes
            stats.pruned += s.pruned
        best = shared.best
        # the witness must not depend on scheduling: rerun sequentially toward the known optimum
        subset = search.dfs((), Fraction(0), _Shared(best, None), SearchStats(), target=best)
    if subset is None:
        raise ConsistencyError("subset search found no witness")
    witness = tuple(sorted(search.point(i) for i in subset))
    return AlphaValue(
        "alpha_km", _alpha_of(best), SUBSET_SEARCH, k, 1, m=m, witness_subset=witness
    )


# ---------------------------------------------------------------- (*_P) and stabilization


@dataclass(frozen=True)
class StarPReport:
    holds: bool
    max_gauge: Fraction
    argmax_vertices: tuple
    flat_edge: Optional[tuple] = None

    def to_json(self) -> dict:
        from .exact import rat_str

        return {
            "holds": self.holds,
            "max_gauge": rat_str(self.max_gauge),
            "argmax_vertices": [v.to_json() for v in self.argmax_vertices],
            "flat_edge": None if self.flat_edge is None else [v.to_json() for v in self.flat_edge],
        }


def star_p_check(p: Polytope, rays: FanRays) -> StarPReport:
    """Does the gauge of ``-P`` reach its maximum on ``P`` only at vertices?

    The maximum set is a face; a positive-dimensional one contains an edge
    whose endpoints and midpoint all sit at the maximum, and by convexity
    such an edge lies wholly in the maximum set.
    """
    vals = {v: ray_gauge(rays, v) for v in p.vertices}
    top = max(vals.values())
    argmax = tuple(v for v in p.vertices if vals[v] == top)
    for e in edges(p):
        if vals[e.a] == top and vals[e.b] == top and ray_gauge(rays, e.midpoint()) == top:
            return StarPReport(False, top, argmax, (e.a, e.b))
    return StarPReport(True, top, argmax, None)


STABLE_ALL_K = "stabilizes for all k"
STRICT = "strict"
STABILIZES = "stabilizes"


@dataclass(frozen=True)
class StabilizationReport:
    m: int
    verdict: str
    alpha: Fraction
    star_p_holds: bool
    k1: Optional[int] = None
    checked: tuple = ()  # (k, alpha_km) pairs computed along the way

    def to_json(self) -> dict:
        from .exact import rat_str

        return {
            "m": self.m,
            "verdict": self.verdict,
            "alpha": rat_str(self.alpha),
            "star_p_holds": self.star_p_holds,
            "k1": self.k1,
            "checked": [[k, rat_str(v)] for k, v in self.checked],
        }


def stabilization_report(p: Polytope, rays: FanRays, m: int, kmax: int = 8,
                         spot_k: int = 3, threads: int = 1) -> StabilizationReport:
    """Classify whether ``alpha_{k,m}`` settles at ``alpha`` for large ``k``.

    When the maximum of the gauge is attained only at vertices and ``m >= 2``
    the inequality stays strict; otherwise it stabilizes and the least
    ``k1 <= kmax`` with three consecutive equal values is searched for.
    """
    if m < 1:
        raise ValueError("m must be positive")
    alpha = alpha_kG(p, rays, FiniteGroup.trivial(p.dim)).value
    star = star_p_check(p, rays)
    if m == 1:
        return StabilizationReport(m, STABLE_ALL_K, alpha, star.holds, 1)
    if star.holds:
        v = alpha_km(p, rays, spot_k, m, threads).value
        if not v > alpha:
            raise ConsistencyError(f"alpha_{spot_k},{m} = {v} is not above alpha = {alpha}")
        return StabilizationReport(m, STRICT, alpha, True, None, ((spot_k, v),))
    checked = []
    run = 0
    for k in range(1, kmax + 1):
        try:
            v = alpha_km(p, rays, k, m, threads).value
        except NoInvariantSubspace:
            run = 0
            continue
        checked.append((k, v))
        run = run + 1 if v == alpha else 0
        if run == 3:
            return StabilizationReport(m, STABILIZES, alpha, False, k - 2, tuple(checked))
    return StabilizationReport(m, STABILIZES, alpha, False, None, tuple(checked))


# ---------------------------------------------------------------- k0, lct, symmetry


@dataclass(frozen=True)
class KZero:
    k0: int
    witness: RatVec
    alpha: Fraction

    def to_json(self) -> dict:
        from .exact import rat_str

        return {"k0": self.k0, "witness": self.witness.to_json(), "alpha": rat_str(self.alpha)}


def k_zero(p: Polytope, rays: FanRays, h: FiniteGroup) -> KZero:
    """Least common denominator of an alpha-minimizing projected vertex.

    Among several minimizers, the least denominator wins, then the
    lexicographically least point.
    """
    res = alpha_kG(p, rays, h)
    cands = [
        u for u in {project_pi_H(h, v) for v in p.vertices}
        if _alpha_of(ray_gauge(rays, u)) == res.value
    ]
    u0 = min(cands, key=lambda u: (denominator_lcm(u.coords), u))
    return KZero(denominator_lcm(u0.coords), u0, res.value)


def lct_monomial(rays: FanRays, u: RatVec, k: int) -> Fraction:
    """``(1/k) / (1 + max_i <u, v_i>)`` for ``u ∈ P ∩ (1/k)M``."""
    if k < 1:
        raise ValueError("k must be positive")
    if not (u * k).is_integral():
        raise ValueError(f"{u!r} is not in (1/{k})M")
    if any((-v).dot(u) > 1 for v in rays.rays):
        raise ValueError(f"{u!r} lies outside the polytope")
    return Fraction(1, k) / (1 + ray_gauge(rays, u))


@dataclass(frozen=True)
class SymmetryBound:
    centrally_symmetric: bool
    alpha: Fraction


def symmetry_alpha_bound(p: Polytope, rays: FanRays) -> SymmetryBound:
    """Check ``alpha <= 1/2``, with equality exactly when ``P = -P``, else ``alpha <= 1/3``."""
    sym = p.is_centrally_symmetric()
    alpha = alpha_kG(p, rays, FiniteGroup.trivial(p.dim)).value
    half, third = Fraction(1, 2), Fraction(1, 3)
    if alpha > half:
        raise ConsistencyError(f"alpha = {alpha} exceeds 1/2")
    if (alpha == half) != sym:
        raise ConsistencyError(f"alpha = {alpha} but central symmetry is {sym}")
    if not sym and alpha > third:
        raise ConsistencyError(f"asymmetric polytope with alpha = {alpha} > 1/3")
    return SymmetryBound(sym, alpha)


def kahler_einstein_bound(alpha: Fraction, n: int) -> bool:
    """Informational: whether ``alpha > n/(n+1)``."""
    return alpha > Fraction(n, n + 1)
