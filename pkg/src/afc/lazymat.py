"""Lazy morphisms: matrices evaluated entrywise or by block extraction.

Cross-effect towers evaluate base functors at arguments that double at every
resolution level.  The maps the tower actually needs are small blocks of
those huge structural matrices, so morphisms are passed around lazily and
densified only at the compressed dimensions:

* ``DenseLM`` wraps an ordinary ``Matrix``;
* ``BlockDiagLM`` is a direct sum of lazy parts (the doubled arguments);
* ``RestrictLM`` pre-composes with row/column selections (summand
  inclusions and projections), composing index lists instead of multiplying
  matrices.

``extract`` partitions indices by block so big direct sums never
materialize; structural functor maps (Kronecker patterns) override it in
``expr.py``.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Sequence

from .errors import ShapeMismatch
from .fields import Field
from .matrix import Matrix, MatrixBuilder


class LazyMor:
    """Protocol: a rows x cols matrix readable entrywise or by block."""

    field: Field
    rows: int
    cols: int

    def entry(self, i: int, j: int):
        raise NotImplementedError

    def key(self):
        """Stable content key for memoization."""
        raise NotImplementedError

    def diag_support(self):
        """Diagonal 1-positions, valid only on 0/1-diagonal matrices
        (callers must check that first).  Returns a set."""
        return {i for i in range(min(self.rows, self.cols))
                if self.entry(i, i) != 0}

    def extract(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> Matrix:
        b = MatrixBuilder(self.field, len(row_idx), len(col_idx))
        for r, i in enumerate(row_idx):
            for c, j in enumerate(col_idx):
                v = self.entry(i, j)
                if v != 0:
                    b.set(r, c, v)
        return b.build()

    def dense(self) -> Matrix:
        return self.extract(range(self.rows), range(self.cols))


class DenseLM(LazyMor):
    def __init__(self, mat: Matrix):
        self.mat = mat
        self.field = mat.field
        self.rows = mat.rows
        self.cols = mat.cols

    def entry(self, i, j):
        return self.mat.entry(i, j)

    def key(self):
        return ("dense", self.mat)

    def extract(self, row_idx, col_idx):
        return self.mat.submatrix(list(row_idx), list(col_idx))

    def dense(self):
        return self.mat

    def diag_support(self):
        from .matrix import diag01_support
        sup = diag01_support(self.mat)
        return set(sup) if sup is not None else super().diag_support()


class IdentityLM(LazyMor):
    def __init__(self, field: Field, n: int):
        self.field = field
        self.rows = self.cols = n

    def entry(self, i, j):
        return self.field.one() if i == j else self.field.zero()

    def key(self):
        return ("id", self.rows)

    def diag_support(self):
        return set(range(self.rows))

    def extract(self, row_idx, col_idx):
        b = MatrixBuilder(self.field, len(row_idx), len(col_idx))
        pos = {j: c for c, j in enumerate(col_idx)}
        one = self.field.one()
        for r, i in enumerate(row_idx):
            c = pos.get(i)
            if c is not None:
                b.set(r, c, one)
        return b.build()


class ZeroLM(LazyMor):
    def __init__(self, field: Field, rows: int, cols: int):
        self.field = field
        self.rows = rows
        self.cols = cols

    def entry(self, i, j):
        return self.field.zero()

    def key(self):
        return ("zero", self.rows, self.cols)

    def diag_support(self):
        return set()

    def extract(self, row_idx, col_idx):
        return Matrix.zeros(self.field, len(row_idx), len(col_idx))


class BlockDiagLM(LazyMor):
    """Direct sum of lazy parts (not necessarily square)."""

    def __init__(self, parts: Sequence[LazyMor]):
        self.parts = tuple(parts)
        self.field = self.parts[0].field
        self.rows = sum(p.rows for p in self.parts)
        self.cols = sum(p.cols for p in self.parts)
        self._roff = []
        self._coff = []
        r = c = 0
        for p in self.parts:
            self._roff.append(r)
            self._coff.append(c)
            r += p.rows
            c += p.cols
        self._rend = self._roff[1:] + [r]
        self._cend = self._coff[1:] + [c]

    def entry(self, i, j):
        bi = bisect_right(self._roff, i) - 1
        bj = bisect_right(self._coff, j) - 1
        if bi != bj:
            return self.field.zero()
        return self.parts[bi].entry(i - self._roff[bi], j - self._coff[bi])

    def key(self):
        return ("bd",) + tuple(p.key() for p in self.parts)

    def diag_support(self):
        out = set()
        for p, roff, coff in zip(self.parts, self._roff, self._coff):
            if roff == coff:
                out |= {roff + i for i in p.diag_support()}
        return out

    def extract(self, row_idx, col_idx):
        nb = len(self.parts)
        rgroups: list[list] = [[] for _ in range(nb)]
        rpos: list[list] = [[] for _ in range(nb)]
        for pos, i in enumerate(row_idx):
            b = bisect_right(self._roff, i) - 1
            rgroups[b].append(i - self._roff[b])
            rpos[b].append(pos)
        cgroups: list[list] = [[] for _ in range(nb)]
        cpos: list[list] = [[] for _ in range(nb)]
        for pos, j in enumerate(col_idx):
            b = bisect_right(self._coff, j) - 1
            cgroups[b].append(j - self._coff[b])
            cpos[b].append(pos)
        out = MatrixBuilder(self.field, len(row_idx), len(col_idx))
        for b in range(nb):
            if rgroups[b] and cgroups[b]:
                sub = self.parts[b].extract(rgroups[b], cgroups[b])
                out.scatter(rpos[b], cpos[b], sub)
        return out.build()


class RestrictLM(LazyMor):
    """base pre/post-composed with coordinate selections."""

    def __init__(self, base: LazyMor, row_idx: Sequence[int], col_idx: Sequence[int]):
        self.base = base
        self.row_idx = tuple(row_idx)
        self.col_idx = tuple(col_idx)
        self.field = base.field
        self.rows = len(self.row_idx)
        self.cols = len(self.col_idx)

    def entry(self, i, j):
        return self.base.entry(self.row_idx[i], self.col_idx[j])

    def key(self):
        return ("restr", self.base.key(), self.row_idx, self.col_idx)

    def diag_support(self):
        if self.row_idx == self.col_idx:
            base_sup = self.base.diag_support()
            return {i for i, b in enumerate(self.row_idx) if b in base_sup}
        return super().diag_support()

    def extract(self, row_idx, col_idx):
        return self.base.extract([self.row_idx[i] for i in row_idx],
                                 [self.col_idx[j] for j in col_idx])


class StackLM(LazyMor):
    """Vertical stack of lazy parts sharing a common source."""

    def __init__(self, parts: Sequence[LazyMor]):
        self.parts = tuple(parts)
        self.field = self.parts[0].field
        self.cols = self.parts[0].cols
        for p in self.parts:
            if p.cols != self.cols:
                raise ShapeMismatch("StackLM column mismatch")
        self._roff = []
        r = 0
        for p in self.parts:
            self._roff.append(r)
            r += p.rows
        self.rows = r

    def entry(self, i, j):
        b = bisect_right(self._roff, i) - 1
        return self.parts[b].entry(i - self._roff[b], j)

    def key(self):
        return ("stack",) + tuple(p.key() for p in self.parts)

    def extract(self, row_idx, col_idx):
        nb = len(self.parts)
        rgroups: list[list] = [[] for _ in range(nb)]
        rpos: list[list] = [[] for _ in range(nb)]
        for pos, i in enumerate(row_idx):
            b = bisect_right(self._roff, i) - 1
            rgroups[b].append(i - self._roff[b])
            rpos[b].append(pos)
        out = MatrixBuilder(self.field, len(row_idx), len(col_idx))
        allcols = list(range(len(col_idx)))
        for b in range(nb):
            if rgroups[b]:
                sub = self.parts[b].extract(rgroups[b], col_idx)
                out.scatter(rpos[b], allcols, sub)
        return out.build()


class ScaleLM(LazyMor):
    def __init__(self, base: LazyMor, scalar):
        self.base = base
        self.field = base.field
        self.scalar = self.field.coerce(scalar)
        self.rows = base.rows
        self.cols = base.cols

    def entry(self, i, j):
        return self.field.mul(self.scalar, self.base.entry(i, j))

    def key(self):
        return ("scale", self.scalar, self.base.key())

    def extract(self, row_idx, col_idx):
        return self.base.extract(row_idx, col_idx).scale(self.scalar)


class SumLM(LazyMor):
    def __init__(self, parts: Sequence[LazyMor]):
        self.parts = tuple(parts)
        self.field = self.parts[0].field
        self.rows = self.parts[0].rows
        self.cols = self.parts[0].cols
        for p in self.parts:
            if (p.rows, p.cols) != (self.rows, self.cols):
                raise ShapeMismatch("SumLM shape mismatch")

    def entry(self, i, j):
        acc = self.field.zero()
        for p in self.parts:
            acc = self.field.add(acc, p.entry(i, j))
        return acc

    def key(self):
        return ("sum",) + tuple(p.key() for p in self.parts)

    def extract(self, row_idx, col_idx):
        out = self.parts[0].extract(row_idx, col_idx)
        for p in self.parts[1:]:
            out = out + p.extract(row_idx, col_idx)
        return out


class BlockLM(LazyMor):
    """General block matrix of lazy parts with explicit block sizes."""

    def __init__(self, field: Field, row_sizes: Sequence[int],
                 col_sizes: Sequence[int],
                 blocks: dict):
        self.field = field
        self.row_sizes = tuple(row_sizes)
        self.col_sizes = tuple(col_sizes)
        self.blocks = dict(blocks)  # (bi, bj) -> LazyMor
        self._roff = []
        r = 0
        for sz in self.row_sizes:
            self._roff.append(r)
            r += sz
        self.rows = r
        self._coff = []
        c = 0
        for sz in self.col_sizes:
            self._coff.append(c)
            c += sz
        self.cols = c

    def entry(self, i, j):
        bi = bisect_right(self._roff, i) - 1
        bj = bisect_right(self._coff, j) - 1
        blk = self.blocks.get((bi, bj))
        if blk is None:
            return self.field.zero()
        return blk.entry(i - self._roff[bi], j - self._coff[bj])

    def key(self):
        return ("blk", self.row_sizes, self.col_sizes,
                tuple(sorted((k, v.key()) for k, v in self.blocks.items())))

    def extract(self, row_idx, col_idx):
        nr, nc = len(self.row_sizes), len(self.col_sizes)
        rgroups: list[list] = [[] for _ in range(nr)]
        rpos: list[list] = [[] for _ in range(nr)]
        for pos, i in enumerate(row_idx):
            b = bisect_right(self._roff, i) - 1
            rgroups[b].append(i - self._roff[b])
            rpos[b].append(pos)
        cgroups: list[list] = [[] for _ in range(nc)]
        cpos: list[list] = [[] for _ in range(nc)]
        for pos, j in enumerate(col_idx):
            b = bisect_right(self._coff, j) - 1
            cgroups[b].append(j - self._coff[b])
            cpos[b].append(pos)
        out = MatrixBuilder(self.field, len(row_idx), len(col_idx))
        for (bi, bj), blk in self.blocks.items():
            if rgroups[bi] and cgroups[bj]:
                sub = blk.extract(rgroups[bi], cgroups[bj])
                if not sub.is_zero():
                    out.scatter(rpos[bi], cpos[bj], sub)
        return out.build()


def lazy(m) -> LazyMor:
    return m if isinstance(m, LazyMor) else DenseLM(m)
