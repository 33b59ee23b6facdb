"""Exact linear algebra over the rationals and prime fields.

Everything here follows the column-coordinate convention: an r x c matrix
represents a linear map from a c-dimensional space to an r-dimensional space,
acting on column vectors.  Subspaces are stored through a reduced column
echelon basis, which is unique for a given subspace, so two Subspace values
are equal exactly when they describe the same subspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .fields import Field, Scalar


@dataclass(frozen=True)
class Matrix:
    """An immutable exact matrix over a :class:`Field`.

    Args:
        field: the scalar field.
        nrows: number of rows (target dimension).
        ncols: number of columns (source dimension).
        entries: row-major tuple of tuples, entries already normalized.
    """

    field: Field
    nrows: int
    ncols: int
    entries: Tuple[Tuple[Scalar, ...], ...]

    def __post_init__(self) -> None:
        if self.nrows < 0 or self.ncols < 0:
            raise ValueError("negative matrix dimensions")
        if len(self.entries) != self.nrows:
            raise ValueError(
                f"expected {self.nrows} rows, got {len(self.entries)}"
            )
        for row in self.entries:
            if len(row) != self.ncols:
                raise ValueError(
                    f"expected {self.ncols} columns, got a row of length {len(row)}"
                )

    @classmethod
    def from_rows(
        cls,
        field: Field,
        rows: Sequence[Sequence[Union[int, Fraction, str]]],
        ncols: Optional[int] = None,
    ) -> "Matrix":
        """Build a matrix from row data, coercing entries into the field.

        ``ncols`` is only required when ``rows`` is empty.
        """
        rows = [list(r) for r in rows]
        if not rows:
            if ncols is None:
                raise ValueError("ncols required for a matrix with no rows")
            return cls(field, 0, ncols, ())
        width = len(rows[0]) if ncols is None else ncols
        return cls(
            field,
            len(rows),
            width,
            tuple(tuple(field.of(x) for x in row) for row in rows),
        )

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        z = field.zero()
        return cls(field, nrows, ncols, tuple((z,) * ncols for _ in range(nrows)))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        return cls(
            field,
            n,
            n,
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)),
        )

    @classmethod
    def from_cols(
        cls,
        field: Field,
        cols: Sequence[Sequence[Union[int, Fraction, str]]],
        nrows: Optional[int] = None,
    ) -> "Matrix":
        """Build a matrix whose columns are the given vectors."""
        cols = [list(c) for c in cols]
        if not cols:
            if nrows is None:
                raise ValueError("nrows required for a matrix with no columns")
            return cls(field, nrows, 0, tuple(() for _ in range(nrows)))
        height = len(cols[0]) if nrows is None else nrows
        return cls(
            field,
            height,
            len(cols),
            tuple(
                tuple(field.of(col[i]) for col in cols) for i in range(height)
            ),
        )

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble a block matrix from a grid of compatible blocks."""
        if not blocks or not blocks[0]:
            raise ValueError("empty block grid")
        field = blocks[0][0].field
        rows: List[Tuple[Scalar, ...]] = []
        width = sum(b.ncols for b in blocks[0])
        for block_row in blocks:
            height = block_row[0].nrows
            for b in block_row:
                if b.nrows != height:
                    raise ValueError("ragged block row heights")
                if b.field != field:
                    raise ValueError("mixed fields in block matrix")
            if sum(b.ncols for b in block_row) != width:
                raise ValueError("ragged block row widths")
            for i in range(height):
                row: Tuple[Scalar, ...] = ()
                for b in block_row:
                    row = row + b.entries[i]
                rows.append(row)
        return cls(field, len(rows), width, tuple(rows))

    def row(self, i: int) -> Tuple[Scalar, ...]:
        return self.entries[i]

    def col(self, j: int) -> Tuple[Scalar, ...]:
        return tuple(self.entries[i][j] for i in range(self.nrows))

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field,
            self.ncols,
            self.nrows,
            tuple(self.col(j) for j in range(self.ncols)),
        )

    def add(self, other: "Matrix") -> "Matrix":
        self._compatible(other)
        f = self.field
        return Matrix(
            f,
            self.nrows,
            self.ncols,
            tuple(
                tuple(f.add(a, b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def sub(self, other: "Matrix") -> "Matrix":
        self._compatible(other)
        f = self.field
        return Matrix(
            f,
            self.nrows,
            self.ncols,
            tuple(
                tuple(f.sub(a, b) for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def neg(self) -> "Matrix":
        f = self.field
        return Matrix(
            f,
            self.nrows,
            self.ncols,
            tuple(tuple(f.neg(a) for a in row) for row in self.entries),
        )

    def scale(self, s: Union[int, Fraction]) -> "Matrix":
        f = self.field
        s = f.of(s)
        return Matrix(
            f,
            self.nrows,
            self.ncols,
            tuple(tuple(f.mul(s, a) for a in row) for row in self.entries),
        )

    def mul(self, other: "Matrix") -> "Matrix":
        """Matrix product self * other."""
        if self.field != other.field:
            raise ValueError("matrix product over mixed fields")
        if self.ncols != other.nrows:
            raise ValueError(
                f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}"
            )
        f = self.field
        p = f.p
        out: List[Tuple[Scalar, ...]] = []
        other_entries = other.entries
        for row in self.entries:
            new_row: List[Scalar] = []
            for j in range(other.ncols):
                acc = sum(row[k] * other_entries[k][j] for k in range(self.ncols))
                new_row.append(acc % p if p is not None else Fraction(acc))
            out.append(tuple(new_row))
        return Matrix(f, self.nrows, other.ncols, tuple(out))

    def trace(self) -> Scalar:
        if self.nrows != self.ncols:
            raise ValueError("trace of a non-square matrix")
        f = self.field
        acc = f.zero()
        for i in range(self.nrows):
            acc = f.add(acc, self.entries[i][i])
        return acc

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def _compatible(self, other: "Matrix") -> None:
        if self.field != other.field:
            raise ValueError("mixed fields")
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError(
                f"shape mismatch {self.nrows}x{self.ncols} vs {other.nrows}x{other.ncols}"
            )


def hstack(mats: Sequence[Matrix]) -> Matrix:
    """Concatenate matrices with equal row counts side by side."""
    if not mats:
        raise ValueError("hstack of nothing")
    return Matrix.block([list(mats)])


def mat_pow(m: Matrix, k: int) -> Matrix:
    """Matrix power by repeated squaring, k >= 0."""
    if m.nrows != m.ncols:
        raise ValueError("power of a non-square matrix")
    result = Matrix.identity(m.field, m.nrows)
    base = m
    while k > 0:
        if k & 1:
            result = result.mul(base)
        base = base.mul(base) if k > 1 else base
        k >>= 1
    return result


def rref(m: Matrix) -> Tuple[Matrix, Tuple[int, ...]]:
    """Reduced row echelon form and the tuple of pivot column indices."""
    f = m.field
    rows = [list(r) for r in m.entries]
    pivots: List[int] = []
    r = 0
    for c in range(m.ncols):
        pivot_row = None
        for i in range(r, m.nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = f.inv(rows[r][c])
        rows[r] = [f.mul(inv, x) for x in rows[r]]
        for i in range(m.nrows):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [
                    f.sub(x, f.mul(factor, y)) for x, y in zip(rows[i], rows[r])
                ]
        pivots.append(c)
        r += 1
        if r == m.nrows:
            break
    return (
        Matrix(f, m.nrows, m.ncols, tuple(tuple(row) for row in rows)),
        tuple(pivots),
    )


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """A basis of the null space, returned as the columns of a matrix.

    The basis is the canonical one read off the reduced row echelon form:
    one vector per free column, with a 1 in the free coordinate.
    """
    f = m.field
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.ncols) if c not in pivot_set]
    cols: List[List[Scalar]] = []
    for fc in free:
        vec = [f.zero()] * m.ncols
        vec[fc] = f.one()
        for i, pc in enumerate(pivots):
            vec[pc] = f.neg(reduced.entries[i][fc])
        cols.append(vec)
    return Matrix.from_cols(f, cols, nrows=m.ncols)


def column_echelon(m: Matrix) -> Matrix:
    """Reduced column echelon form with zero columns dropped.

    This is the canonical basis matrix of the column space: two matrices have
    the same column space exactly when their reduced column echelon forms are
    identical.
    """
    reduced, pivots = rref(m.transpose())
    cols = [reduced.entries[i] for i in range(len(pivots))]
    return Matrix.from_cols(m.field, cols, nrows=m.nrows)


def image_basis(m: Matrix) -> Matrix:
    """Canonical basis of the column space, as columns."""
    return column_echelon(m)


def solve(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """Solve a X = b exactly, columnwise.

    Returns:
        A matrix X with a.mul(X) == b, or None when no solution exists.
        The zero solution comes back as an actual zero matrix, never None.
    """
    if a.field != b.field:
        raise ValueError("mixed fields")
    if a.nrows != b.nrows:
        raise ValueError("right hand side has wrong height")
    f = a.field
    reduced, pivots = rref(hstack([a, b]))
    for c in pivots:
        if c >= a.ncols:
            return None
    cols: List[List[Scalar]] = []
    for j in range(b.ncols):
        vec = [f.zero()] * a.ncols
        for i, pc in enumerate(pivots):
            vec[pc] = reduced.entries[i][a.ncols + j]
        cols.append(vec)
    return Matrix.from_cols(f, cols, nrows=a.ncols)


@dataclass(frozen=True)
class Subspace:
    """A subspace of k^ambient with its canonical echelon basis.

    The basis matrix is ambient x dim in reduced column echelon form, so
    equality of Subspace values is equality of subspaces.
    """

    ambient: int
    basis: Matrix

    def __post_init__(self) -> None:
        if self.basis.nrows != self.ambient:
            raise ValueError("basis height differs from ambient dimension")

    @classmethod
    def span(cls, vectors: Matrix) -> "Subspace":
        """The column span of a matrix, canonicalized."""
        return cls(vectors.nrows, column_echelon(vectors))

    @classmethod
    def zero(cls, field: Field, ambient: int) -> "Subspace":
        return cls(ambient, Matrix.zeros(field, ambient, 0))

    @classmethod
    def full(cls, field: Field, ambient: int) -> "Subspace":
        return cls(ambient, Matrix.identity(field, ambient))

    @property
    def dim(self) -> int:
        return self.basis.ncols

    @property
    def field(self) -> Field:
        return self.basis.field

    def contains(self, vec: Matrix) -> bool:
        """Membership test for a column vector (ambient x 1 matrix)."""
        return solve(self.basis, vec) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        return solve(self.basis, other.basis) is not None

    def sum_with(self, other: "Subspace") -> "Subspace":
        if self.ambient != other.ambient:
            raise ValueError("subspace sum in different ambient spaces")
        return Subspace.span(hstack([self.basis, other.basis]))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """The intersection of two subspaces of one ambient space."""
    if a.ambient != b.ambient:
        raise ValueError("subspace intersection in different ambient spaces")
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.field, a.ambient)
    pairs = kernel_basis(hstack([a.basis, b.basis.neg()]))
    top = Matrix(a.field, a.dim, pairs.ncols, pairs.entries[: a.dim])
    return Subspace.span(a.basis.mul(top))


def perp(sub: Subspace, gram: Matrix) -> Subspace:
    """The orthogonal complement of ``sub`` under a bilinear pairing.

    ``gram[i][j]`` is the pairing of basis vector i of the left space with
    basis vector j of the right space; ``sub`` lives in the left space and the
    returned subspace in the right space (dimension ``gram.ncols``).
    """
    if sub.ambient != gram.nrows:
        raise ValueError("gram matrix height differs from left ambient dimension")
    conditions = sub.basis.transpose().mul(gram)
    return Subspace.span(kernel_basis(conditions))


@dataclass(frozen=True)
class Polynomial:
    """A rational polynomial, coefficients stored from degree 0 upward."""

    coeffs: Tuple[Fraction, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Union[int, Fraction]]) -> "Polynomial":
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: Union[int, Fraction]) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def interpolate(points: Sequence[Tuple[Union[int, Fraction], Union[int, Fraction]]]) -> Polynomial:
    """Lagrange interpolation through exact points.

    Args:
        points: (x, y) pairs with pairwise distinct x.

    Raises:
        ValueError: on a repeated abscissa.
    """
    xs = [Fraction(x) for x, _ in points]
    ys = [Fraction(y) for _, y in points]
    if len(set(xs)) != len(xs):
        raise ValueError("repeated abscissa in interpolation data")
    acc = [Fraction(0)] * max(len(points), 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        num = [Fraction(1)]
        den = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            num = _poly_mul_linear(num, -xj)
            den *= xi - xj
        scale = yi / den
        for k, c in enumerate(num):
            acc[k] += scale * c
    return Polynomial.from_coeffs(acc)


def _poly_mul_linear(coeffs: List[Fraction], constant: Fraction) -> List[Fraction]:
    """Multiply a coefficient list by (X + constant)."""
    out = [Fraction(0)] * (len(coeffs) + 1)
    for k, c in enumerate(coeffs):
        out[k] += c * constant
        out[k + 1] += c
    return out
