"""Closed functor expressions and their evaluation on objects and morphisms.

Terms: ``Var(i)``, ``Const(d)``, ``Sum``, ``Tensor``, ``Compose``, plus the
optional quadratic atoms ``Sym2`` (characteristic != 2) and ``Ext2``.
Objects are dimensions; morphisms are matrices.  Tensor acts by Kronecker
product, Sum by block diagonal, Const by identity.

Morphism evaluation is lazy (``ExprLM``): induced maps on huge direct sums
are never materialized; callers extract the blocks they need, and block
extraction factors through the Kronecker/block-diagonal structure whenever
the requested index sets do.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ArityMismatch, NotApplicable, ShapeMismatch
from .fields import Field
from .lazymat import DenseLM, LazyMor, lazy
from .matrix import Matrix, MatrixBuilder


@dataclass(frozen=True)
class FunctorExpr:
    def __post_init__(self):
        pass

    @property
    def arity(self) -> int:
        return max(1, _max_var(self) + 1)


@dataclass(frozen=True)
class Var(FunctorExpr):
    index: int


@dataclass(frozen=True)
class Const(FunctorExpr):
    dim: int


@dataclass(frozen=True)
class Sum(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr


@dataclass(frozen=True)
class Tensor(FunctorExpr):
    left: FunctorExpr
    right: FunctorExpr


@dataclass(frozen=True)
class Compose(FunctorExpr):
    head: FunctorExpr
    args: tuple[FunctorExpr, ...]

    def __post_init__(self):
        if self.head.arity != len(self.args):
            raise ArityMismatch(
                f"head arity {self.head.arity} != {len(self.args)} args")


@dataclass(frozen=True)
class Sym2(FunctorExpr):
    inner: FunctorExpr


@dataclass(frozen=True)
class Ext2(FunctorExpr):
    inner: FunctorExpr


def _max_var(e: FunctorExpr) -> int:
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Const):
        return -1
    if isinstance(e, (Sum, Tensor)):
        return max(_max_var(e.left), _max_var(e.right))
    if isinstance(e, Compose):
        return max((_max_var(a) for a in e.args), default=-1)
    if isinstance(e, (Sym2, Ext2)):
        return _max_var(e.inner)
    raise TypeError(f"not a functor expression: {e!r}")


def validate_expr(e: FunctorExpr, field: Field):
    """Arity/atom validity; Sym2 needs characteristic != 2."""
    if isinstance(e, Sym2) and field.characteristic == 2:
        raise NotApplicable("Sym2 needs characteristic != 2")
    if isinstance(e, Const) and e.dim < 0:
        raise ShapeMismatch("Const dimension must be nonnegative")
    if isinstance(e, Var) and e.index < 0:
        raise ArityMismatch("Var index must be nonnegative")
    for child in _children(e):
        validate_expr(child, field)


def _children(e: FunctorExpr):
    if isinstance(e, (Sum, Tensor)):
        return (e.left, e.right)
    if isinstance(e, Compose):
        return (e.head,) + e.args
    if isinstance(e, (Sym2, Ext2)):
        return (e.inner,)
    return ()


def eval_obj(e: FunctorExpr, dims: Sequence[int]) -> int:
    """Dimension of F(X) from the dimensions of the arguments."""
    if isinstance(e, Var):
        if e.index >= len(dims):
            raise ArityMismatch(f"Var({e.index}) with {len(dims)} arguments")
        return dims[e.index]
    if isinstance(e, Const):
        return e.dim
    if isinstance(e, Sum):
        return eval_obj(e.left, dims) + eval_obj(e.right, dims)
    if isinstance(e, Tensor):
        return eval_obj(e.left, dims) * eval_obj(e.right, dims)
    if isinstance(e, Compose):
        inner = tuple(eval_obj(a, dims) for a in e.args)
        return eval_obj(e.head, inner)
    if isinstance(e, Sym2):
        n = eval_obj(e.inner, dims)
        return n * (n + 1) // 2
    if isinstance(e, Ext2):
        n = eval_obj(e.inner, dims)
        return n * (n - 1) // 2
    raise TypeError(f"not a functor expression: {e!r}")


from functools import lru_cache


@lru_cache(maxsize=None)
def _pairs_sym(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i, n))


@lru_cache(maxsize=None)
def _pairs_ext(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


class ExprLM(LazyMor):
    """Induced map of a functor expression on lazy argument morphisms."""

    def __init__(self, expr: FunctorExpr, field: Field, args: Sequence[LazyMor]):
        # subterms evaluate against the ambient argument tuple, so extra
        # (unused) arguments are fine; too few is an error
        if len(args) < expr.arity:
            raise ArityMismatch(f"expected {expr.arity} arguments, got {len(args)}")
        self.expr = expr
        self.field = field
        self.args = tuple(args)
        self.src_dims = tuple(a.cols for a in self.args)
        self.tgt_dims = tuple(a.rows for a in self.args)
        self.rows = eval_obj(expr, self.tgt_dims)
        self.cols = eval_obj(expr, self.src_dims)
        self._inner = None  # composed head ExprLM
        self._subs: dict = {}

    def key(self):
        return ("expr", self.expr, tuple(a.key() for a in self.args))

    # structural decomposition ------------------------------------------------

    def _sub(self, sub_expr) -> "ExprLM":
        out = self._subs.get(sub_expr)
        if out is None:
            out = ExprLM(sub_expr, self.field, self.args)
            self._subs[sub_expr] = out
        return out

    def entry(self, i, j):
        e = self.expr
        f = self.field
        if isinstance(e, Var):
            return self.args[e.index].entry(i, j)
        if isinstance(e, Const):
            return f.one() if i == j else f.zero()
        if isinstance(e, Sum):
            lt = eval_obj(e.left, self.tgt_dims)
            ls = eval_obj(e.left, self.src_dims)
            if i < lt and j < ls:
                return self._sub(e.left).entry(i, j)
            if i >= lt and j >= ls:
                return self._sub(e.right).entry(i - lt, j - ls)
            return f.zero()
        if isinstance(e, Tensor):
            bt = eval_obj(e.right, self.tgt_dims)
            bs = eval_obj(e.right, self.src_dims)
            a = self._sub(e.left).entry(i // bt, j // bs)
            if a == 0:
                return f.zero()
            b = self._sub(e.right).entry(i % bt, j % bs)
            return f.mul(a, b)
        if isinstance(e, Compose):
            return self._composed().entry(i, j)
        if isinstance(e, Sym2):
            n_t = eval_obj(e.inner, self.tgt_dims)
            n_s = eval_obj(e.inner, self.src_dims)
            it, mt = _pairs_sym(n_t)[i]
            js, ls = _pairs_sym(n_s)[j]
            g = self._sub(e.inner)
            # class of e_j e_l maps to sum_{a,b} g_aj g_bl [e_a e_b]
            if it < mt:
                return f.add(f.mul(g.entry(it, js), g.entry(mt, ls)),
                             f.mul(g.entry(mt, js), g.entry(it, ls)))
            return f.mul(g.entry(it, js), g.entry(it, ls))
        if isinstance(e, Ext2):
            n_t = eval_obj(e.inner, self.tgt_dims)
            n_s = eval_obj(e.inner, self.src_dims)
            it, mt = _pairs_ext(n_t)[i]
            js, ls = _pairs_ext(n_s)[j]
            g = self._sub(e.inner)
            return f.sub(f.mul(g.entry(it, js), g.entry(mt, ls)),
                         f.mul(g.entry(it, ls), g.entry(mt, js)))
        raise TypeError(f"not a functor expression: {e!r}")

    def _composed(self) -> "ExprLM":
        if self._inner is None:
            e = self.expr
            inner_args = tuple(self._sub(a) for a in e.args)
            self._inner = ExprLM(e.head, self.field, inner_args)
        return self._inner

    # block extraction ----------------------------------------------------------

    def extract(self, row_idx, col_idx) -> Matrix:
        e = self.expr
        row_idx = list(row_idx)
        col_idx = list(col_idx)
        if isinstance(e, Var):
            return self.args[e.index].extract(row_idx, col_idx)
        if isinstance(e, Const):
            b = MatrixBuilder(self.field, len(row_idx), len(col_idx))
            pos = {j: c for c, j in enumerate(col_idx)}
            for r, i in enumerate(row_idx):
                if i in pos:
                    b.set(r, pos[i], 1)
            return b.build()
        if isinstance(e, Sum):
            lt = eval_obj(e.left, self.tgt_dims)
            ls = eval_obj(e.left, self.src_dims)
            out = MatrixBuilder(self.field, len(row_idx), len(col_idx))
            lrow = [(p, i) for p, i in enumerate(row_idx) if i < lt]
            rrow = [(p, i - lt) for p, i in enumerate(row_idx) if i >= lt]
            lcol = [(p, j) for p, j in enumerate(col_idx) if j < ls]
            rcol = [(p, j - ls) for p, j in enumerate(col_idx) if j >= ls]
            if lrow and lcol:
                sub = self._sub(e.left).extract([i for _, i in lrow],
                                                [j for _, j in lcol])
                out.scatter([p for p, _ in lrow], [p for p, _ in lcol], sub)
            if rrow and rcol:
                sub = self._sub(e.right).extract([i for _, i in rrow],
                                                 [j for _, j in rcol])
                out.scatter([p for p, _ in rrow], [p for p, _ in rcol], sub)
            return out.build()
        if isinstance(e, Tensor):
            bt = eval_obj(e.right, self.tgt_dims)
            bs = eval_obj(e.right, self.src_dims)
            rfac = _factor_product(row_idx, bt)
            cfac = _factor_product(col_idx, bs)
            left = self._sub(e.left)
            right = self._sub(e.right)
            if rfac is not None and cfac is not None:
                r1, r2, rperm = rfac
                c1, c2, cperm = cfac
                big = left.extract(r1, c1).kron(right.extract(r2, c2))
                if rperm is None and cperm is None:
                    return big
                return big.submatrix(
                    rperm if rperm is not None else range(big.rows),
                    cperm if cperm is not None else range(big.cols))
            # group by the major (left) factor: the requested block is a
            # sparse pattern of left entries scaling small right blocks
            rmaj: dict[int, tuple[list, list]] = {}
            for pos, i in enumerate(row_idx):
                a, b = divmod(i, bt)
                slot = rmaj.setdefault(a, ([], []))
                slot[0].append(pos)
                slot[1].append(b)
            cmaj: dict[int, tuple[list, list]] = {}
            for pos, j in enumerate(col_idx):
                a, b = divmod(j, bs)
                slot = cmaj.setdefault(a, ([], []))
                slot[0].append(pos)
                slot[1].append(b)
            out = MatrixBuilder(self.field, len(row_idx), len(col_idx))
            for a, (rpos, rmin) in rmaj.items():
                for a2, (cpos, cmin) in cmaj.items():
                    v = left.entry(a, a2)
                    if v == 0:
                        continue
                    sub = right.extract(rmin, cmin)
                    if sub.is_zero():
                        continue
                    if v != self.field.one():
                        sub = sub.scale(v)
                    out.scatter(rpos, cpos, sub)
            return out.build()
        if isinstance(e, Compose):
            return self._composed().extract(row_idx, col_idx)
        return super().extract(row_idx, col_idx)

    def diag01(self) -> bool:
        return all(_lazy_diag01(a) for a in self.args)

    def diag_support(self):
        e = self.expr
        if isinstance(e, Var):
            return self.args[e.index].diag_support()
        if isinstance(e, Const):
            return set(range(e.dim))
        if isinstance(e, Sum):
            lt = eval_obj(e.left, self.tgt_dims)
            ls = eval_obj(e.left, self.src_dims)
            if lt != ls:
                return super().diag_support()
            left = self._sub(e.left).diag_support()
            right = self._sub(e.right).diag_support()
            return left | {lt + i for i in right}
        if isinstance(e, Tensor):
            bt = eval_obj(e.right, self.tgt_dims)
            bs = eval_obj(e.right, self.src_dims)
            if bt != bs:
                return super().diag_support()
            left = self._sub(e.left).diag_support()
            right = self._sub(e.right).diag_support()
            return {a * bt + b for a in left for b in right}
        if isinstance(e, Compose):
            return self._composed().diag_support()
        if isinstance(e, Sym2):
            n_t = eval_obj(e.inner, self.tgt_dims)
            n_s = eval_obj(e.inner, self.src_dims)
            if n_t != n_s:
                return super().diag_support()
            inner = self._sub(e.inner).diag_support()
            pairs = _pairs_sym(n_t)
            return {idx for idx, (i, j) in enumerate(pairs)
                    if i in inner and j in inner}
        if isinstance(e, Ext2):
            n_t = eval_obj(e.inner, self.tgt_dims)
            n_s = eval_obj(e.inner, self.src_dims)
            if n_t != n_s:
                return super().diag_support()
            inner = self._sub(e.inner).diag_support()
            pairs = _pairs_ext(n_t)
            return {idx for idx, (i, j) in enumerate(pairs)
                    if i in inner and j in inner}
        return super().diag_support()


def _lazy_diag01(m: LazyMor) -> bool:
    from .lazymat import BlockDiagLM, IdentityLM, RestrictLM, ZeroLM
    from .matrix import diag01_support

    if isinstance(m, ExprLM):
        return m.diag01()
    if isinstance(m, (IdentityLM, ZeroLM)):
        return True
    if isinstance(m, BlockDiagLM):
        return all(_lazy_diag01(p) for p in m.parts)
    if isinstance(m, RestrictLM):
        return m.row_idx == m.col_idx and _lazy_diag01(m.base)
    if isinstance(m, DenseLM):
        return diag01_support(m.mat) is not None if m.rows == m.cols else False
    return False


def _factor_product(idx: list[int], block: int):
    """Try to see idx as {a*block + b : a in A, b in B}.

    Returns (A, B, perm) where perm reorders the kron-ordered extraction
    back to the requested order (None when already in product order), or
    None when the index set does not factor.
    """
    if block == 0:
        return None
    major = []
    minor = []
    seen_major = set()
    seen_minor = set()
    for i in idx:
        a, b = divmod(i, block)
        if a not in seen_major:
            seen_major.add(a)
            major.append(a)
        if b not in seen_minor:
            seen_minor.add(b)
            minor.append(b)
    if len(idx) != len(major) * len(minor):
        return None
    amaj = sorted(major)
    amin = sorted(minor)
    pos = {}
    for p, a in enumerate(amaj):
        for q, b in enumerate(amin):
            pos[a * block + b] = p * len(amin) + q
    perm = []
    in_order = True
    for want_pos, i in enumerate(idx):
        got = pos.get(i)
        if got is None:
            return None
        perm.append(got)
        if got != want_pos:
            in_order = False
    return amaj, amin, (None if in_order else perm)


def eval_mor(e: FunctorExpr, field: Field, args: Sequence) -> Matrix:
    """Dense induced map F(g_1, ..., g_m); identities to identities,
    composites to composites."""
    lm = ExprLM(e, field, [lazy(a) for a in args])
    return lm.dense()


# convenient atom builders used throughout the tests and scenarios
def tensor_square() -> FunctorExpr:
    return Tensor(Var(0), Var(0))


def tensor_cube() -> FunctorExpr:
    return Tensor(Var(0), Tensor(Var(0), Var(0)))


def add_constant(dim: int) -> FunctorExpr:
    return Sum(Const(dim), Var(0))
