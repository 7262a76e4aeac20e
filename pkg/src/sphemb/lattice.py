"""Exact integer and rational linear algebra.

Integer matrices with arbitrary-precision entries, Smith normal form with
unimodular transforms, cokernel presentations of finitely generated abelian
groups, and integer linear-system solving.  Rational (``fractions.Fraction``)
Gaussian elimination lives here too.  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

RationalVector = tuple[Fraction, ...]


def rational_vector(values) -> RationalVector:
    """Coerce an iterable of numbers to a tuple of reduced Fractions."""
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class IntegerMatrix:
    """Immutable integer matrix, entries stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match rows*cols")
        for e in self.entries:
            if not isinstance(e, int):
                raise TypeError(f"non-integer entry {e!r}")

    @classmethod
    def from_rows(cls, row_data: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        row_data = [list(r) for r in row_data]
        if row_data:
            width = len(row_data[0])
            if any(len(r) != width for r in row_data):
                raise ValueError("ragged rows")
            if cols is not None and cols != width:
                raise ValueError("cols does not match row width")
        else:
            width = 0 if cols is None else cols
        flat = tuple(int(e) for r in row_data for e in r)
        return cls(len(row_data), width, flat)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(
            self.cols,
            self.rows,
            tuple(self.entry(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        out = []
        for i in range(self.rows):
            ri = self.row(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other.entry(k, j) for k in range(self.cols)))
        return IntegerMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch in matrix-vector product")
        return tuple(sum(self.row(i)[k] * vec[k] for k in range(self.cols)) for i in range(self.rows))

    def is_diagonal(self) -> bool:
        return all(self.entry(i, j) == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entry(i, i) for i in range(min(self.rows, self.cols)))

    def __repr__(self):
        return f"IntegerMatrix({self.to_rows()!r})"


def determinant(a: IntegerMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise ValueError("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = a.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V == D with U, V unimodular and D a divisibility-chain diagonal."""

    U: IntegerMatrix
    V: IntegerMatrix
    D: IntegerMatrix

    def invariant_diagonal(self) -> tuple[int, ...]:
        return self.D.diagonal()


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """A finitely generated abelian group: Z^free_rank (+) sum of Z/f_i."""

    free_rank: int
    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for f in self.invariant_factors:
            if f < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise ValueError("invariant factors must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{f}" for f in self.invariant_factors]
        return " + ".join(parts) if parts else "0"


def smith_normal_form(a: IntegerMatrix) -> SmithDecomposition:
    """Smith normal form with transforms, U @ A @ V == D.

    Pivoting always picks the nonzero entry of smallest absolute value in the
    remaining submatrix (first such in row-major order), which bounds entry
    growth and makes the output deterministic.  Diagonal entries come out
    nonnegative with d_i | d_{i+1}.
    """
    m, n = a.rows, a.cols
    d = a.to_rows()
    u = IntegerMatrix.identity(m).to_rows()
    v = IntegerMatrix.identity(n).to_rows()

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def row_addmul(i, j, q):
        # row_i += q * row_j
        di, dj = d[i], d[j]
        for k in range(n):
            di[k] += q * dj[k]
        ui, uj = u[i], u[j]
        for k in range(m):
            ui[k] += q * uj[k]

    def col_addmul(i, j, q):
        # col_i += q * col_j
        for r in d:
            r[i] += q * r[j]
        for r in v:
            r[i] += q * r[j]

    for t in range(min(m, n)):
        while True:
            best = None
            best_abs = None
            for i in range(t, m):
                row = d[i]
                for j in range(t, n):
                    e = row[j]
                    if e != 0 and (best is None or abs(e) < best_abs):
                        best = (i, j)
                        best_abs = abs(e)
            if best is None:
                break
            i0, j0 = best
            if i0 != t:
                row_swap(t, i0)
            if j0 != t:
                col_swap(t, j0)
            p = d[t][t]
            dirty = False
            for i in range(t + 1, m):
                if d[i][t] != 0:
                    row_addmul(i, t, -(d[i][t] // p))
                    if d[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if d[t][j] != 0:
                    col_addmul(j, t, -(d[t][j] // p))
                    if d[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            offender = None
            for i in range(t + 1, m):
                if any(d[i][j] % p != 0 for j in range(t + 1, n)):
                    offender = i
                    break
            if offender is None:
                break
            # Fold the offending row into row t; the next pass shrinks the pivot.
            row_addmul(t, offender, 1)
    for t in range(min(m, n)):
        if d[t][t] < 0:
            for k in range(n):
                d[t][k] = -d[t][k]
            for k in range(m):
                u[t][k] = -u[t][k]
    return SmithDecomposition(
        U=IntegerMatrix.from_rows(u, cols=m),
        V=IntegerMatrix.from_rows(v, cols=n),
        D=IntegerMatrix.from_rows(d, cols=n),
    )


def integer_rank(a: IntegerMatrix) -> int:
    return sum(1 for e in smith_normal_form(a).D.diagonal() if e != 0)


def cokernel(a: IntegerMatrix) -> AbelianGroupPresentation:
    """Presentation of Z^cols modulo the row span of ``a``.

    Rows of ``a`` are relations, columns index generators.
    """
    diag = smith_normal_form(a).D.diagonal()
    rank = sum(1 for e in diag if e != 0)
    factors = tuple(e for e in diag if e > 1)
    return AbelianGroupPresentation(free_rank=a.cols - rank, invariant_factors=factors)


def solve_integer(a: IntegerMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer solution x of A x = b, or None when none exists.

    Existence is decided exactly via the Smith normal form: with U A V = D
    the system becomes D y = U b, solvable iff each d_i divides (U b)_i and
    the coordinates of U b beyond the diagonal vanish.
    """
    if len(b) != a.rows:
        raise ValueError("right-hand side length does not match row count")
    snf = smith_normal_form(a)
    c = snf.U.apply(tuple(int(x) for x in b))
    k = min(a.rows, a.cols)
    y = [0] * a.cols
    for i in range(a.rows):
        di = snf.D.entry(i, i) if i < k else 0
        if di != 0:
            if c[i] % di != 0:
                return None
            y[i] = c[i] // di
        elif c[i] != 0:
            return None
    return snf.V.apply(y)


# ---------------------------------------------------------------------------
# Rational (and generic ring) matrix helpers.


def mat_mul(a, b):
    """Product of two matrices given as sequences of rows; entries need + and *."""
    if not a:
        return []
    inner = len(a[0])
    if inner != len(b):
        raise ValueError("dimension mismatch in matrix product")
    bc = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(bc)] for i in range(len(a))]


def mat_transpose(a):
    if not a:
        return []
    return [[a[i][j] for i in range(len(a))] for j in range(len(a[0]))]


def mat_identity(n: int):
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def rational_rank(rows) -> int:
    """Rank of a matrix with Fraction/int entries, by Gaussian elimination."""
    m = [[Fraction(e) for e in r] for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    col = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [e * inv for e in m[rank]]
        for i in range(nrows):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [e - f * p for e, p in zip(m[i], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def rational_inverse(rows):
    """Inverse of a square matrix with Fraction/int entries."""
    n = len(rows)
    m = [[Fraction(e) for e in r] + [Fraction(i == j) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = None
        for i in range(col, n):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [e * inv for e in m[col]]
        for i in range(n):
            if i != col and m[i][col] != 0:
                f = m[i][col]
                m[i] = [e - f * p for e, p in zip(m[i], m[col])]
    return [r[n:] for r in m]


def rational_solve(rows, rhs):
    """Unique solution of a square nonsingular rational system."""
    inv = rational_inverse(rows)
    return [sum(inv[i][k] * Fraction(rhs[k]) for k in range(len(rhs))) for i in range(len(rhs))]
