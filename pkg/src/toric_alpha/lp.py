"""Exact two-phase simplex on a dense fraction-free tableau.

Bland's rule picks both the entering column (lowest index with negative
reduced cost) and the leaving row (lowest basic index among ratio ties), so
the solver terminates and its output is deterministic.  Every optimal solve
also builds a dual vector and checks it exactly; a failed check raises
rather than returning a wrong optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import RatMat, RatVec, as_rat, solve_linear

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


class LpError(RuntimeError):
    """Raised on solver invariant failures (pivot ceiling, bad certificate)."""


@dataclass(frozen=True)
class LinearProgram:
    """``min/max c.x`` subject to equality rows, ``<=`` rows and lower bounds.

    ``lower[j] is None`` marks variable ``j`` as free.  When ``lower`` is not
    given every variable is nonnegative.
    """

    objective: tuple
    sense: str = "min"
    eq_rows: tuple = ()
    ub_rows: tuple = ()
    lower: Optional[tuple] = None

    def __post_init__(self):
        n = len(self.objective)
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown sense {self.sense!r}")
        for a, _ in tuple(self.eq_rows) + tuple(self.ub_rows):
            if len(a) != n:
                raise ValueError(f"row of length {len(a)} in a program with {n} variables")
        if self.lower is not None and len(self.lower) != n:
            raise ValueError("lower bounds do not match the variable count")

    @classmethod
    def build(
        cls,
        objective: Sequence,
        sense: str = "min",
        eq: Sequence = (),
        ub: Sequence = (),
        lower: Optional[Sequence] = None,
    ) -> "LinearProgram":
        """Convenience constructor accepting ints, Fractions or strings."""
        return cls(
            objective=tuple(as_rat(c) for c in objective),
            sense=sense,
            eq_rows=tuple((tuple(as_rat(x) for x in a), as_rat(b)) for a, b in eq),
            ub_rows=tuple((tuple(as_rat(x) for x in a), as_rat(b)) for a, b in ub),
            lower=None if lower is None else tuple(None if l is None else as_rat(l) for l in lower),
        )

    @property
    def nvars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpOutcome:
    status: str
    value: Optional[Fraction] = None
    point: Optional[RatVec] = None
    eq_duals: tuple = ()
    ub_duals: tuple = ()
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class _Standard:
    """``min c.z, A z = b, z >= 0`` plus the bookkeeping to map back."""

    a: list
    b: list
    c: list
    offset: list  # x = offset + sum(coef * z[col])
    colmap: list  # per original var: list of (col, coef)
    row_sign: list  # +1/-1 per standard row
    row_origin: list  # ("eq", i) or ("ub", i)
    slack_of_row: dict = field(default_factory=dict)


def _standardize(lp: LinearProgram) -> _Standard:
    n = lp.nvars
    lower = lp.lower if lp.lower is not None else (_ZERO,) * n
    colmap = []
    offset = []
    ncols = 0
    for j in range(n):
        if lower[j] is None:
            colmap.append([(ncols, _ONE), (ncols + 1, -_ONE)])
            offset.append(_ZERO)
            ncols += 2
        else:
            colmap.append([(ncols, _ONE)])
            offset.append(lower[j])
            ncols += 1
    nstruct = ncols
    nslack = len(lp.ub_rows)
    total = nstruct + nslack

    a, b, origin, slack_of_row = [], [], [], {}

    def expand(coeffs, rhs):
        row = [_ZERO] * total
        shift = _ZERO
        for j, x in enumerate(coeffs):
            if x:
                # each structural column belongs to one variable, with coefficient +-1
                for col, coef in colmap[j]:
                    row[col] = x if coef > 0 else -x
                if offset[j]:
                    shift += x * offset[j]
        return row, rhs - shift

    for i, (coeffs, rhs) in enumerate(lp.eq_rows):
        row, r = expand(coeffs, rhs)
        a.append(row)
        b.append(r)
        origin.append(("eq", i))
    for i, (coeffs, rhs) in enumerate(lp.ub_rows):
        row, r = expand(coeffs, rhs)
        row[nstruct + i] = _ONE
        slack_of_row[len(a)] = nstruct + i
        a.append(row)
        b.append(r)
        origin.append(("ub", i))

    sign = 1 if lp.sense == "min" else -1
    c = [_ZERO] * total
    for j, cj in enumerate(lp.objective):
        for col, coef in colmap[j]:
            c[col] += sign * coef * cj

    row_sign = []
    for i in range(len(a)):
        if b[i] < 0:
            a[i] = [-x for x in a[i]]
            b[i] = -b[i]
            row_sign.append(-1)
        else:
            row_sign.append(1)
    return _Standard(a, b, c, offset, colmap, row_sign, origin, slack_of_row)


def _int_row(xs: Sequence) -> list:
    """Positive multiple of a rational row with coprime integer entries."""
    den = math.lcm(1, *(x.denominator for x in xs))
    ints = [x.numerator * (den // x.denominator) for x in xs]
    g = math.gcd(*ints)
    return [x // g for x in ints] if g > 1 else ints


def _pivot(rows: list, r: int, col: int) -> None:
    # rows are integer multiples of the rational tableau rows; combining with
    # a positive pivot keeps every row's scale positive
    pr = rows[r]
    p = pr[col]
    if p < 0:
        pr[:] = [-x for x in pr]
        p = -p
    nz = [j for j, x in enumerate(pr) if x]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[col]
        if f:
            new = [x * p for x in row]
            for j in nz:
                new[j] -= f * pr[j]
            g = math.gcd(*new)
            row[:] = [x // g for x in new] if g > 1 else new


class _Tableau:
    def __init__(self, rows, basis, ceiling):
        self.rows = rows  # constraint rows followed by objective row(s)
        self.basis = basis
        self.pivots = 0
        self.ceiling = ceiling

    def value(self, i: int) -> Fraction:
        row = self.rows[i]
        return Fraction(row[-1], row[self.basis[i]])

    def run(self, obj_index: int, allowed: int) -> str:
        """Bland iterations on objective row ``obj_index`` over columns < allowed."""
        rows = self.rows
        m = len(self.basis)
        obj = rows[obj_index]
        while True:
            col = next((j for j in range(allowed) if obj[j] < 0), None)
            if col is None:
                return OPTIMAL
            best_row = None
            for i in range(m):
                aij = rows[i][col]
                if aij > 0:
                    if best_row is None:
                        best_row = i
                        continue
                    # compare rows[i][-1] / aij with the incumbent ratio
                    lhs = rows[i][-1] * rows[best_row][col]
                    rhs = rows[best_row][-1] * aij
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best_row]):
                        best_row = i
            if best_row is None:
                return UNBOUNDED
            _pivot(rows, best_row, col)
            self.basis[best_row] = col
            self.pivots += 1
            if self.pivots > self.ceiling:
                raise LpError(f"pivot ceiling {self.ceiling} exceeded")


def solve(lp: LinearProgram, pivot_ceiling: Optional[int] = None) -> LpOutcome:
    """Solve ``lp`` exactly.

    The returned point is a basic feasible solution.  ``pivot_ceiling``
    defaults to ``10 * (rows + columns)`` of the standard form.
    """
    std = _standardize(lp)
    m = len(std.a)
    ncols = len(std.c)
    if pivot_ceiling is None:
        pivot_ceiling = 10 * (m + ncols) + 10

    # initial basis: slacks where possible, artificials elsewhere
    basis = []
    art_rows = []
    for i in range(m):
        s = std.slack_of_row.get(i)
        if s is not None and std.row_sign[i] == 1:
            basis.append(s)
        else:
            basis.append(None)
            art_rows.append(i)
    nart = len(art_rows)
    width = ncols + nart
    frac_rows = [std.a[i] + [_ZERO] * nart + [std.b[i]] for i in range(m)]
    for k, i in enumerate(art_rows):
        frac_rows[i][ncols + k] = _ONE
        basis[i] = ncols + k
    rows = [_int_row(row) for row in frac_rows]

    tab = _Tableau(rows, basis, pivot_ceiling)

    if nart:
        phase1 = [_ZERO] * (width + 1)
        for k in range(nart):
            phase1[ncols + k] = _ONE
        for i in art_rows:
            phase1 = [x - y for x, y in zip(phase1, frac_rows[i])]
        rows.append(_int_row(phase1))
        tab.run(m, width)
        if rows[m][-1] != 0:
            return LpOutcome(INFEASIBLE, pivots=tab.pivots)
        rows.pop()
        # drive remaining (zero-valued) artificials out of the basis
        i = 0
        while i < len(tab.basis):
            if tab.basis[i] >= ncols:
                col = next((j for j in range(ncols) if rows[i][j] != 0), None)
                if col is None:
                    rows.pop(i)
                    tab.basis.pop(i)
                    std.row_origin.pop(i)
                    std.row_sign.pop(i)
                    std.a.pop(i)
                    std.b.pop(i)
                    continue
                _pivot(rows, i, col)
                tab.basis[i] = col
                tab.pivots += 1
            i += 1
        for row in rows:
            del row[ncols:width]
    m = len(tab.basis)

    obj = list(std.c) + [_ZERO]
    for i in range(m):
        cb = std.c[tab.basis[i]]
        if cb:
            scale = cb / rows[i][tab.basis[i]]
            obj = [x - scale * y for x, y in zip(obj, rows[i])]
    rows.append(_int_row(obj))
    status = tab.run(m, ncols)
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED, pivots=tab.pivots)

    z = [_ZERO] * ncols
    for i in range(m):
        z[tab.basis[i]] = tab.value(i)
    std_value = sum((cj * zj for cj, zj in zip(std.c, z)), _ZERO)

    y = _verify_certificate(std, tab.basis, z, std_value)

    x = []
    for j, cm in enumerate(std.colmap):
        x.append(std.offset[j] + sum((coef * z[col] for col, coef in cm), _ZERO))
    point = RatVec._raw(tuple(x))
    value = sum((cj * xj for cj, xj in zip(lp.objective, x)), _ZERO)

    eq_d = [_ZERO] * len(lp.eq_rows)
    ub_d = [_ZERO] * len(lp.ub_rows)
    flip = 1 if lp.sense == "min" else -1
    for yi, (kind, idx), s in zip(y, std.row_origin, std.row_sign):
        if kind == "eq":
            eq_d[idx] = flip * s * yi
        else:
            ub_d[idx] = flip * s * yi
    return LpOutcome(OPTIMAL, value, point, tuple(eq_d), tuple(ub_d), tab.pivots)


def _verify_certificate(std: _Standard, basis: list, z: list, value: Fraction) -> list:
    """Build duals ``y`` with ``B^T y = c_B`` and check ``A^T y <= c``, ``b.y = c.z``."""
    m = len(basis)
    z_nz = [(j, zj) for j, zj in enumerate(z) if zj]
    for i, row in enumerate(std.a):
        lhs = sum((row[j] * zj for j, zj in z_nz if row[j]), _ZERO)
        if lhs != std.b[i]:
            raise LpError("primal point violates an equality row")
    if any(zj < 0 for zj in z):
        raise LpError("primal point has a negative coordinate")
    if m == 0:
        y = []
    else:
        bt = RatMat([[std.a[i][basis[r]] for i in range(m)] for r in range(m)])
        sol = solve_linear(bt, RatVec._raw(tuple(std.c[basis[r]] for r in range(m))))
        if sol is None:
            raise LpError("singular basis at optimum")
        y = list(sol.coords)
    y_nz = [(std.a[i], yi) for i, yi in enumerate(y) if yi]
    for j in range(len(std.c)):
        col_dot = sum((row[j] * yi for row, yi in y_nz if row[j]), _ZERO)
        if col_dot > std.c[j]:
            raise LpError("dual certificate infeasible")
    dual_value = sum((bi * yi for bi, yi in zip(std.b, y)), _ZERO)
    if dual_value != value:
        raise LpError(f"duality gap {value - dual_value} at reported optimum")
    return y


def maximize(objective, eq=(), ub=(), lower=None) -> LpOutcome:
    return solve(LinearProgram.build(objective, "max", eq, ub, lower))


def minimize(objective, eq=(), ub=(), lower=None) -> LpOutcome:
    return solve(LinearProgram.build(objective, "min", eq, ub, lower))
