"""Exact rational scalars, vectors and matrices.

Scalars are plain :class:`fractions.Fraction` objects (aliased as ``Rat``);
they are always normalized with a positive denominator, so equality and
hashing are canonical.  Vectors and matrices are small immutable wrappers
around tuples of fractions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Rat = Fraction
Number = Union[int, Fraction]


def as_rat(value: Union[Number, str]) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: a float already carries a rounding error.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rat_str(q: Number) -> str:
    """Serialize as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class RatVec:
    """Immutable vector of rationals with a fixed dimension."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coords: Iterable[Union[Number, str]]):
        self._c = tuple(as_rat(c) for c in coords)
        self._hash = None

    @classmethod
    def _raw(cls, coords: tuple) -> "RatVec":
        # trusted constructor: coords already a tuple of Fractions
        v = object.__new__(cls)
        v._c = coords
        v._hash = None
        return v

    @classmethod
    def zero(cls, n: int) -> "RatVec":
        return cls._raw((Fraction(0),) * n)

    @property
    def coords(self) -> tuple:
        return self._c

    @property
    def dim(self) -> int:
        return len(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self._c)

    def __getitem__(self, i):
        return self._c[i]

    def _check(self, other: "RatVec") -> None:
        if len(other._c) != len(self._c):
            raise ValueError(f"dimension mismatch: {len(self._c)} vs {len(other._c)}")

    def __add__(self, other: "RatVec") -> "RatVec":
        self._check(other)
        return RatVec._raw(tuple(a + b for a, b in zip(self._c, other._c)))

    def __sub__(self, other: "RatVec") -> "RatVec":
        self._check(other)
        return RatVec._raw(tuple(a - b for a, b in zip(self._c, other._c)))

    def __neg__(self) -> "RatVec":
        return RatVec._raw(tuple(-a for a in self._c))

    def __mul__(self, scalar: Number) -> "RatVec":
        s = as_rat(scalar)
        return RatVec._raw(tuple(a * s for a in self._c))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> "RatVec":
        s = as_rat(scalar)
        return RatVec._raw(tuple(a / s for a in self._c))

    def dot(self, other: Union["RatVec", Sequence[Number]]) -> Fraction:
        oc = other._c if isinstance(other, RatVec) else tuple(other)
        if len(oc) != len(self._c):
            raise ValueError(f"dimension mismatch: {len(self._c)} vs {len(oc)}")
        return sum((a * b for a, b in zip(self._c, oc)), Fraction(0))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._c)

    def is_zero(self) -> bool:
        return not any(self._c)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatVec):
            return self._c == other._c
        return NotImplemented

    def __lt__(self, other: "RatVec") -> bool:
        return self._c < other._c

    def __le__(self, other: "RatVec") -> bool:
        return self._c <= other._c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._c)
        return self._hash

    def __repr__(self) -> str:
        return "RatVec(" + ", ".join(rat_str(c) for c in self._c) + ")"

    def to_json(self) -> list:
        return [rat_str(c) for c in self._c]


def vec(*coords: Union[Number, str]) -> RatVec:
    """Shorthand: ``vec(1, "1/2")``."""
    return RatVec(coords)


class RatMat:
    """Immutable dense matrix of rationals (row-major)."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[Union[Number, str]]]):
        self._rows = tuple(tuple(as_rat(x) for x in row) for row in rows)
        self.nrows = len(self._rows)
        self.ncols = len(self._rows[0]) if self._rows else 0
        if any(len(r) != self.ncols for r in self._rows):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n: int) -> "RatMat":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[RatVec]) -> "RatMat":
        return cls(zip(*(c.coords for c in cols)))

    @property
    def rows(self) -> tuple:
        return self._rows

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other) -> bool:
        if isinstance(other, RatMat):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._rows)

    def __lt__(self, other: "RatMat") -> bool:
        return self._rows < other._rows

    def __repr__(self) -> str:
        return "RatMat(" + repr([[rat_str(x) for x in r] for r in self._rows]) + ")"

    def transpose(self) -> "RatMat":
        return RatMat(zip(*self._rows))

    def __matmul__(self, other):
        if isinstance(other, RatVec):
            if other.dim != self.ncols:
                raise ValueError("dimension mismatch")
            return RatVec._raw(
                tuple(sum((a * b for a, b in zip(r, other.coords)), Fraction(0)) for r in self._rows)
            )
        if isinstance(other, RatMat):
            if other.nrows != self.ncols:
                raise ValueError("dimension mismatch")
            cols = list(zip(*other._rows))
            return RatMat(
                [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self._rows]
            )
        return NotImplemented

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)

    def to_json(self) -> list:
        return [[rat_str(x) for x in r] for r in self._rows]


def _bareiss_det(a: list) -> int:
    """Fraction-free determinant of an integer matrix (list of lists, mutated)."""
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det(m: RatMat) -> Fraction:
    """Exact determinant.

    Integral matrices go through Bareiss elimination; anything else is first
    scaled to an integral matrix by the lcm of its denominators.
    """
    if not m.is_square:
        raise ValueError(f"determinant of non-square {m.nrows}x{m.ncols} matrix")
    n = m.nrows
    if n == 0:
        return Fraction(1)
    scale = 1
    rows = []
    for r in m.rows:
        L = math.lcm(*(x.denominator for x in r))
        scale *= L
        rows.append([int(x * L) for x in r])
    return Fraction(_bareiss_det(rows), scale)


def solve_linear(a: RatMat, b: RatVec) -> RatVec | None:
    """Solve ``a x = b`` exactly for square ``a``; ``None`` signals a singular system."""
    if not a.is_square:
        raise ValueError("solve_linear needs a square matrix")
    if b.dim != a.nrows:
        raise ValueError(f"dimension mismatch: {a.nrows} rows vs rhs of length {b.dim}")
    n = a.nrows
    aug = [list(r) + [bi] for r, bi in zip(a.rows, b.coords)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pr = aug[col]
        inv = 1 / pr[col]
        for j in range(col, n + 1):
            pr[j] *= inv
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                ri = aug[i]
                for j in range(col, n + 1):
                    ri[j] -= f * pr[j]
    return RatVec._raw(tuple(aug[i][n] for i in range(n)))


def inverse(a: RatMat) -> RatMat | None:
    """Exact inverse, or ``None`` when singular."""
    n = a.nrows
    cols = []
    for j in range(n):
        e = RatVec._raw(tuple(Fraction(int(i == j)) for i in range(n)))
        x = solve_linear(a, e)
        if x is None:
            return None
        cols.append(x)
    return RatMat.from_columns(cols)


def rank(rows: Sequence[Sequence[Number]]) -> int:
    """Rank of a list of row vectors."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    r = 0
    ncols = len(m[0])
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][col] != 0:
                f = m[i][col] / m[r][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def denominator_lcm(v: Iterable[Number]) -> int:
    """Least positive k with ``k * v`` integral."""
    return math.lcm(1, *(Fraction(x).denominator for x in v))


def primitive(v: Sequence[int]) -> tuple:
    """Divide an integer vector by the gcd of its entries."""
    g = math.gcd(*v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)
