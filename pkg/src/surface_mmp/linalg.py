"""Exact rational linear algebra for intersection lattices.

Everything here runs over arbitrary-precision rationals
(:class:`fractions.Fraction`); the engine never touches floating point,
because intersection numbers and discrepancies are rationals and the
downstream integrality tests would not survive rounding.  Matrices are
small (tens of rows), so the cubic and quartic exact algorithms below are
deliberate choices.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "SingularMatrixError",
    "SymMatrix",
    "as_rational",
    "is_negative_definite",
    "solve_unique",
    "rational_rank",
    "integer_kernel",
]


class SingularMatrixError(ValueError):
    """An exact solve hit a matrix with determinant zero."""


def as_rational(value: int | Fraction) -> Fraction:
    """Coerce an int or Fraction; floats are rejected to keep everything exact."""
    if isinstance(value, bool):
        raise TypeError("boolean is not a rational value")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class SymMatrix:
    """A symmetric matrix with exact rational entries.

    Rows are stored as an immutable tuple of tuples.  Symmetry and
    squareness are checked at construction time; everything else about a
    matrix (integrality, definiteness) is the caller's business.
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[int | Fraction]]) -> None:
        canon = tuple(tuple(as_rational(x) for x in row) for row in rows)
        n = len(canon)
        for row in canon:
            if len(row) != n:
                raise ValueError("matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if canon[i][j] != canon[j][i]:
                    raise ValueError(f"matrix not symmetric at ({i}, {j})")
        object.__setattr__(self, "rows", canon)

    def __setattr__(self, name: str, value) -> None:
        raise AttributeError("SymMatrix is immutable")

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, SymMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows)
        return f"SymMatrix([{body}])"

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.rows[i]

    def submatrix(self, indices: Sequence[int]) -> "SymMatrix":
        """Principal submatrix on the given index list (order preserved)."""
        return SymMatrix(tuple(tuple(self.rows[i][j] for j in indices) for i in indices))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def det(self) -> Fraction:
        return _det([list(row) for row in self.rows])

    def pair(self, v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
        """The bilinear form v^T M w."""
        if len(v) != self.n or len(w) != self.n:
            raise ValueError("vector length does not match matrix dimension")
        total = Fraction(0)
        for i, vi in enumerate(v):
            if vi == 0:
                continue
            row = self.rows[i]
            total += vi * sum(row[j] * w[j] for j in range(self.n) if w[j] != 0)
        return total


def _det(rows: list[list[Fraction]]) -> Fraction:
    """Determinant by exact Gaussian elimination (destroys its argument)."""
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
            det = -det
        pivot = rows[col][col]
        det *= pivot
        for r in range(col + 1, n):
            if rows[r][col] == 0:
                continue
            factor = rows[r][col] / pivot
            for c in range(col, n):
                rows[r][c] -= factor * rows[col][c]
    return det


def is_negative_definite(m: SymMatrix) -> bool:
    """Exact negative-definiteness test.

    Decided by sign alternation of the leading principal minors
    (Sylvester): the k-th minor must have sign (-1)^k.  The empty matrix
    is vacuously negative definite, which lets callers treat an empty
    exceptional cluster uniformly.
    """
    for k in range(1, m.n + 1):
        minor = _det([list(m.rows[i][:k]) for i in range(k)])
        if k % 2 == 1 and minor >= 0:
            return False
        if k % 2 == 0 and minor <= 0:
            return False
    return True


def solve_unique(m: SymMatrix, b: Sequence[int | Fraction]) -> tuple[Fraction, ...]:
    """Solve M x = b exactly; raises :class:`SingularMatrixError` if det M = 0."""
    n = m.n
    rhs = [as_rational(x) for x in b]
    if len(rhs) != n:
        raise ValueError("right-hand side length does not match matrix dimension")
    rows = [list(row) + [rhs[i]] for i, row in enumerate(m.rows)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError("matrix is singular")
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
        pivot = rows[col][col]
        for r in range(n):
            if r == col or rows[r][col] == 0:
                continue
            factor = rows[r][col] / pivot
            for c in range(col, n + 1):
                rows[r][c] -= factor * rows[col][c]
    return tuple(rows[i][n] / rows[i][i] for i in range(n))


def rational_rank(rows: Iterable[Sequence[int | Fraction]]) -> int:
    """Rank of an arbitrary rational matrix by exact elimination."""
    work = [[as_rational(x) for x in row] for row in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        pivot_row = next((r for r in range(rank, len(work)) if work[r][col] != 0), None)
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        pivot = work[rank][col]
        for r in range(len(work)):
            if r == rank or work[r][col] == 0:
                continue
            factor = work[r][col] / pivot
            for c in range(col, ncols):
                work[r][c] -= factor * work[rank][c]
        rank += 1
    return rank


def integer_kernel(rows: Iterable[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Basis of the integer kernel {x in Z^ncols : A x = 0}.

    Column reduction by unimodular operations: gcd elimination sweeps each
    row in turn while the same operations are applied to an identity
    matrix, whose surviving columns form a basis of the full (saturated)
    kernel lattice, not merely a finite-index sublattice.
    """
    a = [list(map(int, row)) for row in rows]
    for row in a:
        if len(row) != ncols:
            raise ValueError("row length does not match ncols")
    transform = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    def col_swap(j0: int, j1: int) -> None:
        for mat in (a, transform):
            for row in mat:
                row[j0], row[j1] = row[j1], row[j0]

    def col_sub(j_dst: int, j_src: int, q: int) -> None:
        # column j_dst -= q * column j_src
        for mat in (a, transform):
            for row in mat:
                row[j_dst] -= q * row[j_src]

    col_start = 0
    for r in range(len(a)):
        while True:
            nonzero = [j for j in range(col_start, ncols) if a[r][j] != 0]
            if not nonzero:
                break
            if len(nonzero) == 1:
                j0 = nonzero[0]
                if j0 != col_start:
                    col_swap(j0, col_start)
                col_start += 1
                break
            j0 = min(nonzero, key=lambda j: abs(a[r][j]))
            for j in nonzero:
                if j == j0:
                    continue
                q = a[r][j] // a[r][j0]
                if q != 0:
                    col_sub(j, j0, q)
    return [tuple(transform[i][j] for i in range(ncols)) for j in range(col_start, ncols)]
