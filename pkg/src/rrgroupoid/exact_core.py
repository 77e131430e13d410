"""
Exact arithmetic over the Gaussian rationals Q(i) and sparse exact
linear algebra (rank, kernel).
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import lcm
from numbers import Rational


class Scalar:
    """Gaussian rational re + i*im with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar):
            assert im == 0
            re, im = re.re, re.im
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def promote(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x)
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        raise TypeError("cannot promote %r to Scalar" % (x,))

    # arithmetic ------------------------------------------------------

    def __add__(self, other):
        try:
            other = Scalar.promote(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __sub__(self, other):
        try:
            other = Scalar.promote(other)
        except TypeError:
            return NotImplemented
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Scalar.promote(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar(self.re * other, self.im * other)
        try:
            other = Scalar.promote(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return Scalar(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            other = Scalar.promote(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.promote(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Scalar(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    # comparison / hashing ---------------------------------------------

    def __eq__(self, other):
        try:
            other = Scalar.promote(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "%+d" % self.im if self.im.denominator == 1 else ("+" if self.im > 0 else "-") + str(abs(self.im))
        return "%s%si" % (self.re, im)

    @classmethod
    def from_text(cls, s: str) -> "Scalar":
        m = re.match(r"^([+-]?\d+(?:/\d+)?)([+-]\d+(?:/\d+)?)i$", s.strip())
        if m:
            return cls(Fraction(m.group(1)), Fraction(m.group(2)))
        return cls(Fraction(s.strip()))

    def __repr__(self):
        return "Scalar(%s, %s)" % (self.re, self.im)


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


class SparseMatrix:
    """Matrix over Q(i) stored as {(row, col): Scalar} with no zero entries."""

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        data = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError("entry (%d, %d) outside %dx%d" % (i, j, rows, cols))
            v = Scalar.promote(v)
            if v:
                data[i, j] = v
        self.entries = data

    @classmethod
    def from_columns(cls, rows: int, columns: list[dict]) -> "SparseMatrix":
        entries = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                entries[i, j] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def from_dense(cls, rows) -> "SparseMatrix":
        m = len(rows)
        n = len(rows[0]) if m else 0
        return cls(m, n, {(i, j): v for i, row in enumerate(rows)
                          for j, v in enumerate(row)})

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def __getitem__(self, key):
        return self.entries.get(key, ZERO)

    def to_dense(self) -> list[list[Scalar]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def apply(self, vec: list) -> list[Scalar]:
        out = [ZERO] * self.rows
        for (i, j), v in self.entries.items():
            if vec[j]:
                out[i] = out[i] + v * vec[j]
        return out

    def __repr__(self):
        return "SparseMatrix(%d, %d, nnz=%d)" % (self.rows, self.cols, len(self.entries))


# Gaussian integers as (a, b) int pairs, used by the fraction-free path.

def _gi_mul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gi_sub(x, y):
    return (x[0] - y[0], x[1] - y[1])


def _gi_exact_div(x, y):
    n = y[0] * y[0] + y[1] * y[1]
    re = x[0] * y[0] + x[1] * y[1]
    im = x[1] * y[0] - x[0] * y[1]
    assert re % n == 0 and im % n == 0, "inexact Bareiss division"
    return (re // n, im // n)


def _integral_rows(m: SparseMatrix) -> list[dict]:
    """Rows scaled by the lcm of their denominators so entries lie in Z[i]."""
    rows = [dict() for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    out = []
    for row in rows:
        if not row:
            continue
        den = 1
        for v in row.values():
            den = lcm(den, v.re.denominator, v.im.denominator)
        out.append({j: (int(v.re * den), int(v.im * den)) for j, v in row.items()})
    return out


def rank(m: SparseMatrix) -> int:
    """Exact rank via fraction-free (Bareiss) elimination over Z[i]."""
    rows = _integral_rows(m)
    r = 0
    prev = (1, 0)
    for col in range(m.cols):
        pivot = None
        for k in range(r, len(rows)):
            if col in rows[k]:
                pivot = k
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        prow = rows[r]
        p = prow[col]
        for k in range(r + 1, len(rows)):
            row = rows[k]
            a = row.get(col)
            new = {}
            keys = set(row) | set(prow)
            for j in keys:
                if j < col:
                    continue
                v = _gi_sub(_gi_mul(p, row.get(j, (0, 0))),
                            _gi_mul(a, prow[j]) if a is not None and j in prow else (0, 0))
                if v != (0, 0):
                    new[j] = _gi_exact_div(v, prev)
            rows[k] = new
        prev = p
        r += 1
        if r == len(rows):
            break
    return r


def rref(m: SparseMatrix) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form over Q(i): (nonzero rows, pivot columns)."""
    rows = [dict() for _ in range(m.rows)]
    for (i, j), v in m.entries.items():
        rows[i][j] = v
    rows = [row for row in rows if row]
    pivots = []
    r = 0
    for col in range(m.cols):
        pivot = None
        for k in range(r, len(rows)):
            if col in rows[k]:
                pivot = k
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][col].inverse()
        prow = {j: v * inv for j, v in rows[r].items()}
        rows[r] = prow
        for k in range(len(rows)):
            if k == r or col not in rows[k]:
                continue
            a = rows[k][col]
            row = dict(rows[k])
            for j, v in prow.items():
                w = row.get(j, ZERO) - a * v
                if w:
                    row[j] = w
                else:
                    row.pop(j, None)
            rows[k] = row
        pivots.append(col)
        r += 1
    return rows[:r], pivots


def kernel_basis(m: SparseMatrix) -> list[list[Scalar]]:
    """Basis of {v : m v = 0}, one vector per free column, in column order."""
    rows, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vec = [ZERO] * m.cols
        vec[free] = ONE
        for row, p in zip(rows, pivots):
            v = row.get(free)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def span_rank(vectors: list[list[Scalar]], length: int) -> int:
    """Rank of a list of exact vectors of the given length."""
    return rank(SparseMatrix(len(vectors), length,
                             {(i, j): v for i, vec in enumerate(vectors)
                              for j, v in enumerate(vec) if v}))
