"""Dense exact matrices over Q and F_p, with kernel/image/idempotent splitting.

Two storage backends sit behind one immutable ``Matrix`` facade:

* F_2: each row is a Python int bitmask (column j = bit j).  Row operations
  are single big-int XORs, which keeps the heavy characteristic-2 scenarios
  cheap.
* Q and F_p (p odd): each row is a tuple of exact scalars
  (``fractions.Fraction`` or ints mod p).

All pivoting is deterministic: leftmost available pivot, topmost row first.
Identical inputs therefore produce bit-identical bases everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotIdempotent, ShapeMismatch
from .fields import Field


class Matrix:
    """Immutable exact matrix.  0xN and Nx0 matrices are legal."""

    __slots__ = ("field", "rows", "cols", "_r", "_h")

    def __init__(self, field: Field, rows: int, cols: int, payload):
        self.field = field
        self.rows = rows
        self.cols = cols
        self._r = payload  # tuple[int] bitmask rows (F_2) or tuple[tuple]
        self._h = None

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_rows(field: Field, data: Sequence[Sequence]) -> "Matrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        for row in data:
            if len(row) != ncols:
                raise ShapeMismatch("ragged rows")
        if field.characteristic == 2:
            payload = tuple(
                sum((int(x) & 1) << j for j, x in enumerate(row)) for row in data
            )
        else:
            payload = tuple(tuple(field.coerce(x) for x in row) for row in data)
        return Matrix(field, nrows, ncols, payload)

    @staticmethod
    def zeros(field: Field, rows: int, cols: int) -> "Matrix":
        if field.characteristic == 2:
            return Matrix(field, rows, cols, (0,) * rows)
        z = field.zero()
        return Matrix(field, rows, cols, ((z,) * cols,) * rows)

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        if field.characteristic == 2:
            return Matrix(field, n, n, tuple(1 << i for i in range(n)))
        z, o = field.zero(), field.one()
        return Matrix(
            field, n, n,
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)),
        )

    @staticmethod
    def selection_incl(field: Field, ambient: int, indices: Sequence[int]) -> "Matrix":
        """ambient x k matrix with a single 1 at (indices[k], k)."""
        k = len(indices)
        pos = {idx: col for col, idx in enumerate(indices)}
        if field.characteristic == 2:
            payload = tuple(
                (1 << pos[i]) if i in pos else 0 for i in range(ambient)
            )
            return Matrix(field, ambient, k, payload)
        z, o = field.zero(), field.one()
        return Matrix(
            field, ambient, k,
            tuple(
                tuple(o if (i in pos and pos[i] == c) else z for c in range(k))
                for i in range(ambient)
            ),
        )

    @staticmethod
    def selection_proj(field: Field, ambient: int, indices: Sequence[int]) -> "Matrix":
        """k x ambient matrix with a single 1 at (k, indices[k])."""
        if field.characteristic == 2:
            payload = tuple(1 << i for i in indices)
            return Matrix(field, len(indices), ambient, payload)
        z, o = field.zero(), field.one()
        return Matrix(
            field, len(indices), ambient,
            tuple(
                tuple(o if j == i else z for j in range(ambient)) for i in indices
            ),
        )

    # -- basic access ------------------------------------------------------

    def entry(self, i: int, j: int):
        if self.field.characteristic == 2:
            return (self._r[i] >> j) & 1
        return self._r[i][j]

    def row_list(self, i: int) -> list:
        if self.field.characteristic == 2:
            r = self._r[i]
            return [(r >> j) & 1 for j in range(self.cols)]
        return list(self._r[i])

    def to_rows(self) -> list:
        return [self.row_list(i) for i in range(self.rows)]

    def is_zero(self) -> bool:
        if self.field.characteristic == 2:
            return all(r == 0 for r in self._r)
        z = self.field.zero()
        return all(all(x == z for x in row) for row in self._r)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self._r == other._r
        )

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.field.characteristic, self.rows, self.cols, self._r))
        return self._h

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        if self.field.characteristic == 2:
            return Matrix(self.field, self.rows, self.cols,
                          tuple(a ^ b for a, b in zip(self._r, other._r)))
        f = self.field
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(f.add(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self._r, other._r)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.field.characteristic == 2:
            return self + other
        f = self.field
        self._same_shape(other)
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(f.sub(a, b) for a, b in zip(ra, rb))
                            for ra, rb in zip(self._r, other._r)))

    def __neg__(self) -> "Matrix":
        if self.field.characteristic == 2:
            return self
        f = self.field
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(f.neg(a) for a in row) for row in self._r))

    def scale(self, c) -> "Matrix":
        f = self.field
        c = f.coerce(c)
        if f.characteristic == 2:
            return self if c == 1 else Matrix.zeros(f, self.rows, self.cols)
        return Matrix(f, self.rows, self.cols,
                      tuple(tuple(f.mul(c, a) for a in row) for row in self._r))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows or self.field != other.field:
            raise ShapeMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        if self.field.characteristic == 2:
            brows = other._r
            out = []
            for arow in self._r:
                acc = 0
                m = arow
                while m:
                    lsb = m & -m
                    acc ^= brows[lsb.bit_length() - 1]
                    m ^= lsb
                out.append(acc)
            return Matrix(self.field, self.rows, other.cols, tuple(out))
        f = self.field
        bcols = other.cols
        brows = other._r
        out = []
        for arow in self._r:
            acc = [f.zero()] * bcols
            for j, a in enumerate(arow):
                if a == 0:
                    continue
                brow = brows[j]
                for k in range(bcols):
                    b = brow[k]
                    if b != 0:
                        acc[k] = f.add(acc[k], f.mul(a, b))
            out.append(tuple(acc))
        return Matrix(f, self.rows, other.cols, tuple(out))

    def transpose(self) -> "Matrix":
        if self.field.characteristic == 2:
            cols = [0] * self.cols
            for i, r in enumerate(self._r):
                m = r
                while m:
                    lsb = m & -m
                    cols[lsb.bit_length() - 1] |= 1 << i
                    m ^= lsb
            return Matrix(self.field, self.cols, self.rows, tuple(cols))
        return Matrix(self.field, self.cols, self.rows,
                      tuple(tuple(self._r[i][j] for i in range(self.rows))
                            for j in range(self.cols)))

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product, row-major pair order (i1*r2+i2, j1*c2+j2)."""
        f = self.field
        if f != other.field:
            raise ShapeMismatch("field mismatch in kron")
        if f.characteristic == 2:
            out = []
            c2 = other.cols
            for r1 in self._r:
                for r2 in other._r:
                    acc = 0
                    m = r1
                    while m:
                        lsb = m & -m
                        acc |= r2 << ((lsb.bit_length() - 1) * c2)
                        m ^= lsb
                    out.append(acc)
            return Matrix(f, self.rows * other.rows, self.cols * other.cols,
                          tuple(out))
        out = []
        for r1 in self._r:
            for r2 in other._r:
                row = []
                for a in r1:
                    if a == 0:
                        row.extend([f.zero()] * other.cols)
                    else:
                        row.extend(f.mul(a, b) for b in r2)
                out.append(tuple(row))
        return Matrix(f, self.rows * other.rows, self.cols * other.cols, tuple(out))

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        if self.field.characteristic == 2:
            out = []
            for i in row_idx:
                r = self._r[i]
                acc = 0
                for newj, j in enumerate(col_idx):
                    if (r >> j) & 1:
                        acc |= 1 << newj
                out.append(acc)
            return Matrix(self.field, len(row_idx), len(col_idx), tuple(out))
        return Matrix(self.field, len(row_idx), len(col_idx),
                      tuple(tuple(self._r[i][j] for j in col_idx) for i in row_idx))

    def _same_shape(self, other: "Matrix"):
        if (self.rows, self.cols, self.field) != (other.rows, other.cols, other.field):
            raise ShapeMismatch(
                f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    # -- elimination ---------------------------------------------------------

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and its pivot columns (leftmost first)."""
        if self.field.characteristic == 2:
            rows = list(self._r)
            pivots = []
            prow = 0
            nrows = self.rows
            for col in range(self.cols):
                if prow >= nrows:
                    break
                bit = 1 << col
                sel = -1
                for i in range(prow, nrows):
                    if rows[i] & bit:
                        sel = i
                        break
                if sel < 0:
                    continue
                rows[prow], rows[sel] = rows[sel], rows[prow]
                piv = rows[prow]
                for i in range(nrows):
                    if i != prow and rows[i] & bit:
                        rows[i] ^= piv
                pivots.append(col)
                prow += 1
            return Matrix(self.field, nrows, self.cols, tuple(rows)), tuple(pivots)
        f = self.field
        rows = [list(r) for r in self._r]
        pivots = []
        prow = 0
        nrows = self.rows
        for col in range(self.cols):
            if prow >= nrows:
                break
            sel = -1
            for i in range(prow, nrows):
                if rows[i][col] != 0:
                    sel = i
                    break
            if sel < 0:
                continue
            rows[prow], rows[sel] = rows[sel], rows[prow]
            inv = f.inv(rows[prow][col])
            if inv != 1:
                rows[prow] = [f.mul(inv, x) for x in rows[prow]]
            piv = rows[prow]
            for i in range(nrows):
                if i != prow:
                    c = rows[i][col]
                    if c != 0:
                        rows[i] = [f.sub(x, f.mul(c, p)) for x, p in zip(rows[i], piv)]
            pivots.append(col)
            prow += 1
        return (Matrix(f, nrows, self.cols, tuple(tuple(r) for r in rows)),
                tuple(pivots))

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> "Matrix":
        """Columns form a column-echelon basis of ker(self).

        One basis vector per free column (in increasing order); vector for
        free column f has a 1 in position f, zeros in the other free
        positions, and -R[p][f] in pivot position of each pivot row p.
        """
        R, pivots = self.rref()
        f = self.field
        pivset = set(pivots)
        free = [j for j in range(self.cols) if j not in pivset]
        if not free:
            return Matrix.zeros(f, self.cols, 0)
        cols = []
        for fc in free:
            v = [f.zero()] * self.cols
            v[fc] = f.one()
            for prow, pcol in enumerate(pivots):
                c = R.entry(prow, fc)
                if c != 0:
                    v[pcol] = f.neg(c)
            cols.append(v)
        return Matrix.from_rows(f, [[col[i] for col in cols]
                                    for i in range(self.cols)])

    def image_basis(self) -> "Matrix":
        """First independent columns of self, in order."""
        _, pivots = self.rref()
        return self.submatrix(range(self.rows), pivots)


# -- block assembly ----------------------------------------------------------


class MatrixBuilder:
    """Mutable scatter buffer; finalizes into an immutable Matrix."""

    def __init__(self, field: Field, rows: int, cols: int):
        self.field = field
        self.rows = rows
        self.cols = cols
        if field.characteristic == 2:
            self._rows = [0] * rows
        else:
            z = field.zero()
            self._rows = [[z] * cols for _ in range(rows)]

    def set(self, i: int, j: int, v):
        if self.field.characteristic == 2:
            if int(v) & 1:
                self._rows[i] |= 1 << j
            else:
                self._rows[i] &= ~(1 << j)
        else:
            self._rows[i][j] = self.field.coerce(v)

    def add_block(self, r0: int, c0: int, m: Matrix):
        if self.field.characteristic == 2:
            for i in range(m.rows):
                self._rows[r0 + i] ^= m._r[i] << c0
        else:
            f = self.field
            for i in range(m.rows):
                dst = self._rows[r0 + i]
                src = m._r[i]
                for j in range(m.cols):
                    if src[j] != 0:
                        dst[c0 + j] = f.add(dst[c0 + j], src[j])

    def scatter(self, row_pos: Sequence[int], col_pos: Sequence[int], m: Matrix):
        """Place m[i, j] at (row_pos[i], col_pos[j])."""
        if self.field.characteristic == 2:
            for i in range(m.rows):
                r = m._r[i]
                dst = self._rows[row_pos[i]]
                while r:
                    lsb = r & -r
                    dst |= 1 << col_pos[lsb.bit_length() - 1]
                    r ^= lsb
                self._rows[row_pos[i]] = dst
        else:
            for i in range(m.rows):
                src = m._r[i]
                dst = self._rows[row_pos[i]]
                for j in range(m.cols):
                    if src[j] != 0:
                        dst[col_pos[j]] = src[j]

    def build(self) -> Matrix:
        if self.field.characteristic == 2:
            return Matrix(self.field, self.rows, self.cols, tuple(self._rows))
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(r) for r in self._rows))


def hstack(mats: Sequence[Matrix]) -> Matrix:
    mats = list(mats)
    rows = mats[0].rows
    field = mats[0].field
    total = sum(m.cols for m in mats)
    b = MatrixBuilder(field, rows, total)
    off = 0
    for m in mats:
        if m.rows != rows:
            raise ShapeMismatch("hstack row mismatch")
        b.add_block(0, off, m)
        off += m.cols
    return b.build()


def vstack(mats: Sequence[Matrix]) -> Matrix:
    mats = list(mats)
    cols = mats[0].cols
    field = mats[0].field
    total = sum(m.rows for m in mats)
    b = MatrixBuilder(field, total, cols)
    off = 0
    for m in mats:
        if m.cols != cols:
            raise ShapeMismatch("vstack col mismatch")
        b.add_block(off, 0, m)
        off += m.rows
    return b.build()


def block_diag(field: Field, mats: Sequence[Matrix]) -> Matrix:
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    b = MatrixBuilder(field, rows, cols)
    r = c = 0
    for m in mats:
        b.add_block(r, c, m)
        r += m.rows
        c += m.cols
    return b.build()


def solve_exact(a: Matrix, b: Matrix) -> Matrix:
    """Unique X with a @ X = b, for a of full column rank.

    Raises ShapeMismatch when the system is inconsistent (im(b) not inside
    im(a)) or a has dependent columns.
    """
    if a.rows != b.rows:
        raise ShapeMismatch("solve_exact row mismatch")
    aug = hstack([a, b])
    R, pivots = aug.rref()
    head = [p for p in pivots if p < a.cols]
    if len(head) != a.cols or len(head) != len(pivots):
        raise ShapeMismatch("solve_exact: no unique solution")
    return R.submatrix(range(a.cols), range(a.cols, a.cols + b.cols))


# -- idempotent splitting ------------------------------------------------------


@dataclass(frozen=True)
class SplitSummand:
    """A split direct summand, presented by inclusion and projection.

    Invariants: proj @ incl = identity on the summand; incl @ proj is
    idempotent on the ambient space.
    """

    ambient_dim: int
    incl: Matrix  # ambient_dim x summand_dim
    proj: Matrix  # summand_dim x ambient_dim

    @property
    def dim(self) -> int:
        return self.incl.cols

    def idempotent(self) -> Matrix:
        return self.incl @ self.proj

    def validate(self):
        n, k = self.ambient_dim, self.dim
        if self.incl.rows != n or self.proj.cols != n or self.proj.rows != k:
            raise ShapeMismatch("split summand shape mismatch")
        if self.proj @ self.incl != Matrix.identity(self.incl.field, k):
            raise NotIdempotent("proj @ incl is not the identity")

    @property
    def selection(self) -> tuple[int, ...] | None:
        """Index list when this summand is a coordinate-subspace selection."""
        return _selection_of(self.incl, self.proj)


def _selection_of(incl: Matrix, proj: Matrix) -> tuple[int, ...] | None:
    idx = []
    if incl.field.characteristic == 2:
        for j in range(incl.cols):
            if proj._r[j].bit_count() != 1:
                return None
            i = proj._r[j].bit_length() - 1
            if incl._r[i] != 1 << j:
                return None
            idx.append(i)
        for i in range(incl.rows):
            if incl._r[i] and i not in idx:
                return None
    else:
        one = incl.field.one()
        for j in range(incl.cols):
            row = proj._r[j]
            nz = [i for i, x in enumerate(row) if x != 0]
            if len(nz) != 1 or row[nz[0]] != one:
                return None
            i = nz[0]
            col_ok = all(
                incl.entry(r, j) == (one if r == i else 0) for r in range(incl.rows)
            )
            if not col_ok:
                return None
            idx.append(i)
        for i in range(incl.rows):
            if i not in idx and any(x != 0 for x in incl._r[i]):
                return None
    return tuple(idx)


def diag01_support(e: Matrix) -> tuple[int, ...] | None:
    """Indices of diagonal 1s when e is a 0/1 diagonal matrix, else None."""
    if e.rows != e.cols:
        return None
    idx = []
    if e.field.characteristic == 2:
        for i, r in enumerate(e._r):
            if r == 0:
                continue
            if r != 1 << i:
                return None
            idx.append(i)
    else:
        one = e.field.one()
        for i, row in enumerate(e._r):
            for j, x in enumerate(row):
                if x == 0:
                    continue
                if j != i or x != one:
                    return None
            if row[i] == one:
                idx.append(i)
    return tuple(idx)


def split_idempotent(e: Matrix) -> SplitSummand:
    """Split e = incl @ proj with proj @ incl = 1 and im(incl) = im(e).

    A 0/1-diagonal idempotent splits as a coordinate selection (no
    elimination); the general case uses the deterministic image basis.
    """
    if e.rows != e.cols:
        raise NotIdempotent(f"idempotent must be square, got {e.rows}x{e.cols}")
    sup = diag01_support(e)
    if sup is not None:
        return SplitSummand(
            ambient_dim=e.rows,
            incl=Matrix.selection_incl(e.field, e.rows, sup),
            proj=Matrix.selection_proj(e.field, e.rows, sup),
        )
    if e @ e != e:
        raise NotIdempotent("matrix is not idempotent")
    incl = e.image_basis()
    if incl.cols == 0:
        return SplitSummand(e.rows, Matrix.zeros(e.field, e.rows, 0),
                            Matrix.zeros(e.field, 0, e.rows))
    proj = solve_exact(incl, e)
    return SplitSummand(e.rows, incl, proj)
