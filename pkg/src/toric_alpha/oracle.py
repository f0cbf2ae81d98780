"""Independent cross-checks used by the test suite and ``verify``.

* ``interior_membership`` classifies a point against a convex hull with LPs.
* ``c_star_bisection`` brackets a singularity exponent using nothing but
  membership of the origin in Minkowski combinations.
* ``alpha_km_bruteforce`` evaluates every subset without pruning and without
  the simplex solver: each candidate optimum is a basic solution obtained
  by integer Cramer's rule, vectorized with numpy.
* ``ehrhart_fit_check`` interpolates lattice-point counts and compares the
  leading coefficient with the triangulated volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from . import lp
from .exact import RatVec, denominator_lcm, rat_str
from .invariants import SUBSET_SEARCH, AlphaValue, NoInvariantSubspace
from .polytope import FanRays, Polytope, ehrhart_count, lattice_int_points, volume

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"

BRUTEFORCE_CEILING = 2_000_000


class OracleError(RuntimeError):
    """Oracle precondition failure (ceiling exceeded, origin not interior, ...)."""


def _directions(n: int) -> list:
    # n unit vectors plus minus their sum positively span R^n
    dirs = []
    for i in range(n):
        dirs.append([1 if j == i else 0 for j in range(n)])
    dirs.append([-1] * n)
    return dirs


def interior_membership(x: RatVec, points: Sequence[RatVec]) -> str:
    """Classify ``x`` as interior to, on the boundary of, or outside ``conv(points)``.

    For each direction ``d`` of a positively spanning set, maximize ``e >= 0``
    with ``x + e d`` in the hull.  Infeasibility means ``x`` is outside; all
    optima positive means a neighbourhood of ``x`` is inside.
    """
    pts = list(points)
    if not pts:
        raise ValueError("empty point set")
    n = x.dim
    npts = len(pts)
    for d in _directions(n):
        # variables: lambda (npts), e
        eq = [([p[i] for p in pts] + [-d[i]], x[i]) for i in range(n)]
        eq.append(([1] * npts + [0], 1))
        out = lp.solve(lp.LinearProgram.build([0] * npts + [1], "max", eq=eq))
        if out.status == lp.INFEASIBLE:
            return OUTSIDE
        if out.status != lp.OPTIMAL:
            raise OracleError(f"membership LP ended {out.status}")
        if out.value == 0:
            return BOUNDARY
    return INTERIOR


def extreme_points(points: Sequence[RatVec]) -> list:
    """Points not in the convex hull of the others (duplicates collapsed)."""
    pts = sorted(set(points))
    out = []
    for i, x in enumerate(pts):
        others = pts[:i] + pts[i + 1:]
        if not others:
            out.append(x)
            continue
        eq = [([p[j] for p in others], x[j]) for j in range(x.dim)]
        eq.append(([1] * len(others), 1))
        if not lp.solve(lp.LinearProgram.build([0] * len(others), "min", eq=eq)).optimal:
            out.append(x)
    return out


def minkowski_generators(c: Fraction, f: Sequence[RatVec], u: Sequence[RatVec]) -> list:
    """Generating set ``{c f_i + (1-c) u_j}`` of ``c conv f + (1-c) conv u``."""
    return sorted({fi * c + uj * (1 - c) for fi in f for uj in u})


@dataclass(frozen=True)
class BisectionResult:
    lower: Fraction
    upper: Fraction
    iterations: int

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, c: Fraction) -> bool:
        return self.lower <= c <= self.upper

    def to_json(self) -> dict:
        return {"lower": rat_str(self.lower), "upper": rat_str(self.upper), "iterations": self.iterations}


def c_star_bisection(f: Sequence[RatVec], u: Sequence[RatVec], iterations: int = 40) -> BisectionResult:
    """Bracket the threshold ``c`` below which ``0`` is interior to ``c conv f + (1-c) conv u``.

    The lower end is always certified interior; the upper end is certified
    not interior, or is the cap ``1``.  Endpoints are dyadic rationals.
    """
    f, u = list(f), list(u)
    if not f or not u:
        raise ValueError("empty point set")
    origin = RatVec.zero(u[0].dim)
    if interior_membership(origin, u) != INTERIOR:
        raise OracleError("origin not interior to conv U")
    # the Minkowski combination is generated by pairs of extreme points
    f, u = extreme_points(f), extreme_points(u)
    # interiority of the origin is scale invariant: clear denominators so the
    # LPs run on integer data
    scale = denominator_lcm([c for p in f + u for c in p.coords])
    f = [p * scale for p in f]
    u = [p * scale for p in u]
    lo, hi = Fraction(0), Fraction(1)
    for _ in range(iterations):
        mid = (lo + hi) / 2
        a, b = mid.numerator, mid.denominator
        gens = sorted({fi * a + uj * (b - a) for fi in f for uj in u})
        if interior_membership(origin, gens) == INTERIOR:
            lo = mid
        else:
            hi = mid
    return BisectionResult(lo, hi, iterations)


# ---------------------------------------------------------------- brute force


def _combinations_array(n: int, r: int) -> np.ndarray:
    """All ``r``-subsets of ``range(n)`` as rows, in colexicographic order.

    Row ``i`` has colex rank ``i``, i.e. ``sum_t C(c_t, t+1)``.
    """
    if r == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if r > n:
        return np.zeros((0, r), dtype=np.int64)
    prev = _combinations_array(n, r - 1)
    parts = []
    for c in range(r - 1, n):
        block = prev[: math.comb(c, r - 1)]
        parts.append(np.column_stack([block, np.full(len(block), c, dtype=np.int64)]))
    return np.concatenate(parts, axis=0)


def _colex_rank(combos: np.ndarray) -> np.ndarray:
    r = combos.shape[1]
    out = np.zeros(combos.shape[0], dtype=np.int64)
    for t in range(r):
        c = combos[:, t]
        # C(c, t+1) vectorized
        num = np.ones_like(c)
        for s in range(t + 1):
            num = num * (c - s)
        out += num // math.factorial(t + 1)
    return out


def _batch_det(m: np.ndarray) -> np.ndarray:
    """Exact integer determinants of a batch ``(B, r, r)`` by Laplace expansion."""
    r = m.shape[1]
    if r == 0:
        return np.ones(m.shape[0], dtype=np.int64)
    if r == 1:
        return m[:, 0, 0].copy()
    total = np.zeros(m.shape[0], dtype=np.int64)
    for j in range(r):
        minor = m[:, 1:, [c for c in range(r) if c != j]]
        term = m[:, 0, j] * _batch_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _basic_values(a: np.ndarray, r: int, nrays: int) -> tuple:
    """Minimum feasible basic value over ray subsets for every ``r``-subset of points.

    ``a[i, j] = <z_i, v_j>`` for integer points ``z_i``.  Returns the
    ``r``-subsets (colex order) and per subset a numerator/denominator pair
    of the best value, with denominator 0 marking "no feasible basis".
    """
    npts = a.shape[0]
    subsets = _combinations_array(npts, r)
    best_num = np.zeros(len(subsets), dtype=np.int64)
    best_den = np.zeros(len(subsets), dtype=np.int64)
    for js in combinations(range(nrays), r):
        sub = a[subsets]  # (B, r, nrays)
        j1 = js[0]
        mat = np.empty((len(subsets), r, r), dtype=np.int64)
        mat[:, 0, :] = 1
        for l, jl in enumerate(js[1:], start=1):
            mat[:, l, :] = sub[:, :, j1] - sub[:, :, jl]
        # lambda_i = C_{0,i} / D with C the cofactors along the first row
        cof = np.empty((len(subsets), r), dtype=np.int64)
        for i in range(r):
            minor = mat[:, 1:, [c for c in range(r) if c != i]]
            cof[:, i] = (-1) ** i * _batch_det(minor)
        d = cof.sum(axis=1)
        sgn = np.sign(d)
        ok = (d != 0) & np.all(cof * sgn[:, None] >= 0, axis=1)
        # value of ray j at the point: (sum_i cof_i a_ij) / D
        vals = np.einsum("bi,bij->bj", cof, sub)  # (B, nrays)
        t = vals[:, j1]
        ok &= np.all(vals * sgn[:, None] <= (t * sgn)[:, None], axis=1)
        num = t * sgn
        den = np.abs(d)
        # keep the smaller fraction: num/den < best_num/best_den
        better = ok & ((best_den == 0) | (num * best_den < best_num * den))
        best_num = np.where(better, num, best_num)
        best_den = np.where(better, den, best_den)
    return subsets, best_num, best_den


def alpha_km_bruteforce(p: Polytope, rays: FanRays, k: int, m: int,
                        ceiling: int = BRUTEFORCE_CEILING) -> AlphaValue:
    """Exhaustive ``max over |F| = m of min over conv F of the gauge``, no pruning.

    The hull minimum of the piecewise-linear gauge is attained at a basic
    solution supported on at most ``n + 1`` points of ``F``, so it equals the
    least basic value over sub-subsets of size ``<= min(m, n + 1)``.
    """
    z = lattice_int_points(p, k)
    npts = len(z)
    if m < 1:
        raise ValueError("m must be positive")
    if m > npts:
        raise NoInvariantSubspace(f"no invariant subspace of dimension {m}: only {npts} sections")
    total = math.comb(npts, m)
    if total > ceiling:
        raise OracleError(f"C({npts}, {m}) = {total} subsets exceeds the ceiling {ceiling}")
    v = np.array([[int(c) for c in r] for r in rays.rays], dtype=np.int64)
    a = z @ v.T  # (npts, nrays), k times the pairings
    nrays = v.shape[0]
    rmax = min(m, p.dim + 1, nrays)

    # rank all basic values as exact rationals so numpy can take minima on integers
    per_r = {}
    for r in range(1, rmax + 1):
        _, num, den = _basic_values(a, r, nrays)
        g = np.gcd(num, den)
        g[g == 0] = 1
        per_r[r] = (num // g, den // g)
    base = 1 + max(int(den.max()) for _, den in per_r.values())
    keys = np.concatenate([num * base + den for num, den in per_r.values()])
    uniq, inv = np.unique(keys, return_inverse=True)
    inv = inv.reshape(-1)
    feasible = [(int(q), i) for i, q in enumerate(uniq) if int(q) % base != 0]
    ordered = sorted(Fraction(q // base, (q % base) * k) for q, _ in feasible)
    rank_of = {q: r for r, q in enumerate(ordered)}
    big = len(ordered)
    lut = np.full(len(uniq), big, dtype=np.int64)
    for q, i in feasible:
        lut[i] = rank_of[Fraction(q // base, (q % base) * k)]
    ranks = {}
    offset = 0
    for r, (num, _) in per_r.items():
        ranks[r] = lut[inv[offset : offset + len(num)]]
        offset += len(num)

    best_rank = -1
    best_row = None
    chunk = 200_000
    for start in range(0, total, chunk):
        combos = _chunk_combinations(npts, m, start, min(chunk, total - start))
        mins = np.full(len(combos), big, dtype=np.int64)
        for r in range(1, rmax + 1):
            for cols in combinations(range(m), r):
                idx = _colex_rank(combos[:, list(cols)])
                mins = np.minimum(mins, ranks[r][idx])
        i = int(np.argmax(mins))
        if mins[i] > best_rank:
            best_rank, best_row = int(mins[i]), combos[i]
    if best_rank >= big:
        raise OracleError("no feasible basic solution found")
    mu = ordered[best_rank]
    witness = tuple(
        sorted(RatVec._raw(tuple(Fraction(int(c), k) for c in z[j])) for j in best_row)
    )
    return AlphaValue("alpha_km", 1 / (1 + mu), SUBSET_SEARCH, k, 1, m=m, witness_subset=witness)


_COMBO_CACHE: dict = {}


def _chunk_combinations(n: int, m: int, start: int, count: int) -> np.ndarray:
    key = (n, m)
    arr = _COMBO_CACHE.get(key)
    if arr is None:
        arr = _combinations_array(n, m)
        _COMBO_CACHE.clear()
        _COMBO_CACHE[key] = arr
    return arr[start : start + count]


# ---------------------------------------------------------------- Ehrhart


@dataclass(frozen=True)
class EhrhartFit:
    passed: bool
    coefficients: tuple  # constant term first
    counts: tuple  # E(1..kmax)
    volume: Fraction
    mismatches: tuple = ()

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "coefficients": [rat_str(c) for c in self.coefficients],
            "counts": list(self.counts),
            "volume": rat_str(self.volume),
            "mismatches": [list(x) for x in self.mismatches],
        }


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> list:
    """Coefficients (constant first) of the Lagrange interpolating polynomial."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            # multiply basis by (x - xs[j])
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xs[j] * basis[t + 1]
            denom *= xs[i] - xs[j]
        for t in range(n):
            coeffs[t] += ys[i] * basis[t] / denom
    return coeffs


def _evaluate(coeffs: Sequence[Fraction], x: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def ehrhart_fit_check(p: Polytope, kmax: int) -> EhrhartFit:
    """Fit ``E(1..n+1)`` exactly, predict ``E(n+2..kmax)``, compare the leading term with the volume."""
    n = p.dim
    if kmax < n + 2:
        raise ValueError(f"kmax must be at least {n + 2}")
    counts = tuple(ehrhart_count(p, k) for k in range(1, kmax + 1))
    coeffs = _interpolate(list(range(1, n + 2)), counts[: n + 1])
    mismatches = []
    for k in range(n + 2, kmax + 1):
        pred = _evaluate(coeffs, k)
        if pred != counts[k - 1]:
            mismatches.append((k, rat_str(pred), counts[k - 1]))
    vol = volume(p)
    ok = not mismatches and coeffs[-1] == vol
    return EhrhartFit(ok, tuple(coeffs), counts, vol, tuple(mismatches))
