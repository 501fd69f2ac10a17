"""Exact rational matrices and vectors.

Entries are Python ``int`` or :class:`fractions.Fraction`; a Fraction with
denominator 1 is always collapsed to ``int`` so that integer-valued work stays
on the fast path.  Vectors are plain lists.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Number = Union[int, Fraction]
Vector = list


class ShapeError(ValueError):
    """Operand dimensions do not agree."""


def as_rational(v) -> Number:
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, (np.integer,)):
        return int(v)
    f = Fraction(v)
    return f.numerator if f.denominator == 1 else f


def format_rational(v: Number) -> str:
    """Canonical text form: ``"p/q"`` in lowest terms, ``"p"`` for integers."""
    return str(Fraction(v))


def parse_rational(s: str) -> Number:
    return as_rational(Fraction(s))


class RationalMatrix:
    """Immutable exact matrix with row-sparse storage.

    Zero entries are never stored, so a fully populated matrix is simply the
    dense case of the same representation.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries=()):
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, Number]] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for key in items:
            if isinstance(entries, Mapping):
                (r, c), v = key
            else:
                r, c, v = key
            if not (0 <= r < rows and 0 <= c < cols):
                raise ShapeError(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = as_rational(v)
            if v:
                row = data.setdefault(r, {})
                row[c] = row.get(c, 0) + v
                if not row[c]:
                    del row[c]
                    if not row:
                        del data[r]
        self._data = data

    @classmethod
    def _raw(cls, rows: int, cols: int, data: dict) -> "RationalMatrix":
        out = cls.__new__(cls)
        out.rows, out.cols, out._data = rows, cols, data
        return out

    # -- constructors ---------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        return cls._raw(rows, rows if cols is None else cols, {})

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls._raw(n, n, {k: {k: 1} for k in range(n)})

    @classmethod
    def ones(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        cols = rows if cols is None else cols
        return cls._raw(rows, cols, {r: dict.fromkeys(range(cols), 1) for r in range(rows)})

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        return cls(n, n, ((k, k, v) for k, v in enumerate(values)))

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        return cls(nr, nc, ((r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row)))

    @classmethod
    def from_support(cls, rows: int, cols: int, pairs: Iterable[tuple[int, int]],
                     value: Number = 1) -> "RationalMatrix":
        data: dict[int, dict[int, Number]] = {}
        for r, c in pairs:
            data.setdefault(int(r), {})[int(c)] = value
        return cls._raw(rows, cols, data)

    # -- access ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._data.values())

    def __getitem__(self, rc: tuple[int, int]) -> Number:
        r, c = rc
        return self._data.get(r, {}).get(c, 0)

    def row(self, r: int) -> dict[int, Number]:
        return dict(self._data.get(r, {}))

    def items(self) -> list[tuple[int, int, Number]]:
        """Nonzero entries as (row, col, value), row-major sorted."""
        return [(r, c, self._data[r][c]) for r in sorted(self._data) for c in sorted(self._data[r])]

    def support(self) -> set[tuple[int, int]]:
        return {(r, c) for r, row in self._data.items() for c in row}

    def is_zero(self) -> bool:
        return not self._data

    def to_dense(self) -> list[list[Number]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for r, row in self._data.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def column(self, c: int) -> Vector:
        return [self._data.get(r, {}).get(c, 0) for r in range(self.rows)]

    def trace(self) -> Number:
        return as_rational(sum(row.get(r, 0) for r, row in self._data.items()))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        cpos = {c: k for k, c in enumerate(cols)}
        data = {}
        for k, r in enumerate(rows):
            src = self._data.get(r)
            if not src:
                continue
            sel = {cpos[c]: v for c, v in src.items() if c in cpos}
            if sel:
                data[k] = sel
        return RationalMatrix._raw(len(rows), len(cols), data)

    # -- arithmetic -----------------------------------------------------
    def transpose(self) -> "RationalMatrix":
        data: dict[int, dict[int, Number]] = {}
        for r, row in self._data.items():
            for c, v in row.items():
                data.setdefault(c, {})[r] = v
        return RationalMatrix._raw(self.cols, self.rows, data)

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    def _combine(self, other: "RationalMatrix", sign: int) -> "RationalMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        data = {r: dict(row) for r, row in self._data.items()}
        for r, row in other._data.items():
            dst = data.setdefault(r, {})
            for c, v in row.items():
                w = as_rational(dst.get(c, 0) + sign * v)
                if w:
                    dst[c] = w
                else:
                    dst.pop(c, None)
            if not dst:
                del data[r]
        return RationalMatrix._raw(self.rows, self.cols, data)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s) -> "RationalMatrix":
        s = as_rational(s)
        if not s:
            return RationalMatrix.zeros(self.rows, self.cols)
        data = {r: {c: as_rational(v * s) for c, v in row.items()} for r, row in self._data.items()}
        return RationalMatrix._raw(self.rows, self.cols, data)

    def __mul__(self, s):
        if isinstance(s, RationalMatrix):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            return matmul(self, other)
        return self.apply(other)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ShapeError(f"vector of length {len(v)} for {self.rows}x{self.cols} matrix")
        out = [0] * self.rows
        for r, row in self._data.items():
            s = 0
            for c, a in row.items():
                x = v[c]
                if x:
                    s += a * x
            out[r] = as_rational(s)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.items())))

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def matmul(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    bdata = b._data
    data: dict[int, dict[int, Number]] = {}
    for r, arow in a._data.items():
        acc: dict[int, Number] = {}
        for k, av in arow.items():
            brow = bdata.get(k)
            if not brow:
                continue
            for c, bv in brow.items():
                acc[c] = acc.get(c, 0) + av * bv
        acc = {c: as_rational(v) for c, v in acc.items() if v}
        if acc:
            data[r] = acc
    return RationalMatrix._raw(a.rows, b.cols, data)


def entrywise_product(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a.shape != b.shape:
        raise ShapeError(f"cannot take Hadamard product of {a.shape} and {b.shape}")
    data = {}
    for r, arow in a._data.items():
        brow = b._data.get(r)
        if not brow:
            continue
        row = {c: as_rational(v * brow[c]) for c, v in arow.items() if c in brow}
        if row:
            data[r] = row
    return RationalMatrix._raw(a.rows, a.cols, data)


# -- vectors --------------------------------------------------------------

def dot(u: Sequence, v: Sequence) -> Number:
    """Standard inner product; all data is real so conjugation is a no-op."""
    if len(u) != len(v):
        raise ShapeError(f"vectors of length {len(u)} and {len(v)}")
    return as_rational(sum(a * b for a, b in zip(u, v) if a and b))


def primitive(v: Sequence) -> Vector:
    """Positive rational multiple of ``v`` with coprime integer entries."""
    den = 1
    for x in v:
        if isinstance(x, Fraction):
            den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g > 1 else ints


def is_zero_vector(v: Sequence) -> bool:
    return not any(v)


def _integer_rows(a: RationalMatrix) -> list[list[int]]:
    dense = a.to_dense()
    out = []
    for row in dense:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def bareiss_echelon(rows: Sequence[Sequence[int]]) -> tuple[np.ndarray, list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the echelon matrix (object dtype, exact ints) and pivot columns.
    Each entry after step k is a k x k minor, so all divisions are exact.
    """
    mat = np.array(rows, dtype=object)
    if mat.ndim != 2 or mat.size == 0:
        return mat.reshape(len(rows), -1), []
    nrows, ncols = mat.shape
    prev = 1
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        col = mat[r:, c]
        nz = np.flatnonzero(col != 0)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            mat[[r, k]] = mat[[k, r]]
        p = mat[r, c]
        if r + 1 < nrows:
            below = mat[r + 1:, c:]
            mat[r + 1:, c:] = (p * below - np.outer(below[:, 0], mat[r, c:])) // prev
        prev = p
        pivots.append(c)
        r += 1
    return mat, pivots


def rank(a: RationalMatrix) -> int:
    if a.rows == 0 or a.cols == 0 or a.is_zero():
        return 0
    return len(bareiss_echelon(_integer_rows(a))[1])


def kernel_basis(a: RationalMatrix) -> list[Vector]:
    """Basis of {v : a v = 0} as primitive integer vectors.

    One vector per free column, obtained by back substitution on the
    fraction-free echelon form.
    """
    n = a.cols
    if a.is_zero():
        return [[int(k == f) for k in range(n)] for f in range(n)]
    ech, pivots = bareiss_echelon(_integer_rows(a))
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = []
    for f in free:
        x: list[Number] = [0] * n
        x[f] = 1
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            row = ech[r]
            s = 0
            for c in range(pc + 1, n):
                if row[c] and x[c]:
                    s += row[c] * x[c]
            x[pc] = as_rational(Fraction(-s, row[pc])) if s else 0
        basis.append(primitive(x))
    return basis


def gram_schmidt(vs: Iterable[Sequence]) -> list[tuple[Vector, Number]]:
    """Unnormalized Gram-Schmidt.

    Returns (vector, squared norm) pairs; vectors that become zero (linearly
    dependent on earlier input) are dropped.
    """
    out: list[tuple[Vector, Number]] = []
    for v in vs:
        w = [as_rational(x) for x in v]
        for u, nu in out:
            c = dot(w, u)
            if c:
                c = as_rational(Fraction(c) / nu)
                w = [as_rational(wi - c * ui) if ui else wi for wi, ui in zip(w, u)]
        nw = dot(w, w)
        if nw:
            out.append((w, nw))
    return out


def inverse(a: RationalMatrix) -> RationalMatrix:
    """Exact inverse by Gauss-Jordan elimination over the rationals."""
    n = a.rows
    if a.cols != n:
        raise ShapeError(f"cannot invert non-square {a.shape}")
    aug = [[Fraction(x) for x in row] + [Fraction(int(r == c)) for c in range(n)]
           for r, row in enumerate(a.to_dense())]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return RationalMatrix.from_dense([row[n:] for row in aug])


class Echelon:
    """Incrementally grown echelon basis, for independence tests."""

    def __init__(self, n: int):
        self.n = n
        self._rows: dict[int, list[Number]] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: Sequence) -> list[Number]:
        w = [as_rational(x) for x in v]
        for p in sorted(self._rows):
            c = w[p]
            if c:
                row = self._rows[p]
                w = [as_rational(a - c * b) if b else a for a, b in zip(w, row)]
        return w

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; return False if it was already in the span."""
        w = self.reduce(v)
        p = next((k for k, x in enumerate(w) if x), None)
        if p is None:
            return False
        lead = Fraction(w[p])
        new = [as_rational(x / lead) if x else 0 for x in w]
        # Keep every stored row zero at every other pivot.
        for q, row in self._rows.items():
            c = row[p]
            if c:
                self._rows[q] = [as_rational(a - c * b) if b else a for a, b in zip(row, new)]
        self._rows[p] = new
        return True
