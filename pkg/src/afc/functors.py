"""Chain-complex-valued functors on tuples of vector spaces.

A ``ChainFunctor`` assigns a chain complex to every tuple of dimensions and
a chain map to every tuple of morphisms, functorially.  Slots are grouped:
a group of g slots behaves as one variable of the g-fold product category,
and direct sums act blockwise on a group.

Cross effects are computed by the recursive complement-splitting of their
defining decomposition: cr_1 F is the complement of the image of F(X -> 0
-> X), and cr_n splits the two cr_{n-1} summands off cr_{n-1}F(X1 (+) X2,
X3, ...).  All idempotents arising from expression functors are 0/1
diagonal, so these splits are coordinate selections; values and maps of
deep towers are then extracted blocks of structural morphisms and never
materialize the doubled ambient spaces.  Non-diagonal idempotents (which
only occur at small, already-compressed dimensions) fall back to exact
elimination.

Resolution functors (polynomial approximation and linearization) totalize
the comonad tower with alternating-sum counit differentials; d^2 = 0 is
verified exactly whenever a value is materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .chain import (
    ChainComplex, ChainMap, TruncationWindow, restricted_trusted,
)
from .errors import ArityMismatch, ShapeMismatch, SlotOutOfRange
from .expr import ExprLM, FunctorExpr, eval_obj, validate_expr
from .fields import Field
from .lazymat import (
    BlockDiagLM, BlockLM, DenseLM, IdentityLM, LazyMor, RestrictLM, ScaleLM,
    SumLM, ZeroLM, lazy,
)
from .matrix import Matrix, MatrixBuilder, diag01_support, split_idempotent

Objs = tuple
Mors = tuple


class LazyComplex:
    """Chain complex whose differentials are lazily evaluated."""

    def __init__(self, field: Field, window: TruncationWindow,
                 dims: Sequence[int], diffs: Sequence[LazyMor | None]):
        self.field = field
        self.window = window
        self.dims = tuple(dims)
        self.diffs = list(diffs)

    def d(self, k: int) -> LazyMor:
        m = self.diffs[k - 1] if 1 <= k <= self.window.cutoff else None
        if m is None:
            rows = self.dims[k - 1] if k - 1 <= self.window.cutoff else 0
            cols = self.dims[k] if k <= self.window.cutoff else 0
            return ZeroLM(self.field, rows, cols)
        return m

    def dense(self, validate: bool = True) -> ChainComplex:
        mats = [self.d(k).dense() for k in range(1, self.window.cutoff + 1)]
        return ChainComplex(self.field, self.window, self.dims, mats,
                            validate=validate)


# presentation of a split summand, per chain degree
Pres = list  # entries ("sel", tuple[int]) or ("dense", incl, proj)


def _pres_dims(pres: Pres) -> tuple[int, ...]:
    out = []
    for kind, *rest in pres:
        out.append(len(rest[0]) if kind == "sel" else rest[0].cols)
    return tuple(out)


def _compose_pres(outer: Pres, local: Pres) -> Pres:
    """Presentation of (local summand of outer summand) in outer's base."""
    out = []
    for o, l in zip(outer, local):
        if o[0] == "sel" and l[0] == "sel":
            out.append(("sel", tuple(o[1][i] for i in l[1])))
        else:
            oi, op = _pres_dense(o)
            li, lp = _pres_dense(l, field=oi.field, ambient=oi.cols)
            out.append(("dense", oi @ li, lp @ op))
    return out


def _pres_dense(entry, field=None, ambient=None):
    if entry[0] == "dense":
        return entry[1], entry[2]
    sel = entry[1]
    if field is None or ambient is None:
        raise ShapeMismatch("cannot densify a selection without its ambient")
    return (Matrix.selection_incl(field, ambient, sel),
            Matrix.selection_proj(field, ambient, sel))


def _restrict(lm: LazyMor, rows_entry, cols_entry) -> LazyMor:
    """lm sandwiched between a row presentation (proj side) and a column
    presentation (incl side)."""
    if rows_entry[0] == "sel" and cols_entry[0] == "sel":
        return RestrictLM(lm, rows_entry[1], cols_entry[1])
    ri, rp = _pres_dense(rows_entry, lm.field, lm.rows)
    ci, cp = _pres_dense(cols_entry, lm.field, lm.cols)
    return DenseLM(rp @ lm.dense() @ ci)


def _full(n: int):
    return ("sel", tuple(range(n)))


def identity_mors(field: Field, objs: Objs) -> Mors:
    return tuple(IdentityLM(field, x) for x in objs)


def norm_mors(mors) -> Mors:
    return tuple(lazy(m) for m in mors)


def _fold_matrix(field: Field, x: int, m: int) -> Matrix:
    out = MatrixBuilder(field, x, m * x)
    for c in range(m):
        out.add_block(0, c * x, Matrix.identity(field, x))
    return out.build()


def _block_incl(field: Field, dims: Sequence[int], i: int) -> Matrix:
    off = sum(dims[:i])
    out = MatrixBuilder(field, sum(dims), dims[i])
    out.add_block(off, 0, Matrix.identity(field, dims[i]))
    return out.build()


def _block_proj(field: Field, dims: Sequence[int], i: int) -> Matrix:
    off = sum(dims[:i])
    out = MatrixBuilder(field, dims[i], sum(dims))
    out.add_block(0, off, Matrix.identity(field, dims[i]))
    return out.build()


def _part_idem(field: Field, dims: Sequence[int], i: int) -> Matrix:
    """Idempotent (+)dims -> (+)dims projecting onto block i."""
    n = sum(dims)
    off = sum(dims[:i])
    out = MatrixBuilder(field, n, n)
    out.add_block(off, off, Matrix.identity(field, dims[i]))
    return out.build()


class ChainFunctor:
    """Base class; subclasses implement _lazy_value and _lazy_map."""

    field: Field
    window: TruncationWindow
    groups: tuple[int, ...]
    ckey: tuple

    def _init_caches(self):
        self._vals: dict = {}
        self._lazy_vals: dict = {}
        self._maps: dict = {}

    @property
    def slots(self) -> int:
        return sum(self.groups)

    def group_start(self, g: int) -> int:
        return sum(self.groups[:g])

    def check_objs(self, objs) -> Objs:
        objs = tuple(int(x) for x in objs)
        if len(objs) != self.slots:
            raise ArityMismatch(f"expected {self.slots} slots, got {len(objs)}")
        return objs

    def lazy_value(self, objs) -> LazyComplex:
        objs = self.check_objs(objs)
        out = self._lazy_vals.get(objs)
        if out is None:
            out = self._lazy_value(objs)
            self._lazy_vals[objs] = out
        return out

    def value(self, objs) -> ChainComplex:
        objs = self.check_objs(objs)
        out = self._vals.get(objs)
        if out is None:
            out = self.lazy_value(objs).dense(validate=True)
            self._vals[objs] = out
        return out

    def lazy_map(self, mors) -> list[LazyMor]:
        return self._lazy_map(norm_mors(mors))

    def map(self, mors) -> ChainMap:
        mors = norm_mors(mors)
        src = tuple(m.cols for m in mors)
        tgt = tuple(m.rows for m in mors)
        key = tuple(m.key() for m in mors)
        out = self._maps.get(key)
        if out is None:
            comps = [c.dense() for c in self.lazy_map(mors)]
            out = ChainMap(self.value(src), self.value(tgt), comps)
            self._maps[key] = out
        return out

    def identity(self, objs) -> Mors:
        return identity_mors(self.field, self.check_objs(objs))

    def _lazy_value(self, objs) -> LazyComplex:
        raise NotImplementedError

    def _lazy_map(self, mors) -> list[LazyMor]:
        raise NotImplementedError


_CACHE: dict = {}


def _cached(key, build: Callable[[], ChainFunctor]) -> ChainFunctor:
    out = _CACHE.get(key)
    if out is None:
        out = build()
        out.ckey = key
        out._init_caches()
        _CACHE[key] = out
    return out


def clear_functor_cache():
    _CACHE.clear()


class ExprCF(ChainFunctor):
    """A functor expression, concentrated in chain degree 0."""

    def __init__(self, expr: FunctorExpr, field: Field, window: TruncationWindow):
        validate_expr(expr, field)
        self.expr = expr
        self.field = field
        self.window = TruncationWindow.bounded(window.cutoff)
        self.groups = (1,) * expr.arity

    def _lazy_value(self, objs):
        dims = [eval_obj(self.expr, objs)] + [0] * self.window.cutoff
        return LazyComplex(self.field, self.window, dims,
                           [None] * self.window.cutoff)

    def _lazy_map(self, mors):
        comps: list[LazyMor] = [ExprLM(self.expr, self.field, mors)]
        for k in range(1, self.window.cutoff + 1):
            comps.append(ZeroLM(self.field, 0, 0))
        return comps


def expr_functor(expr: FunctorExpr, field: Field,
                 window: TruncationWindow) -> ChainFunctor:
    return _cached(("expr", expr, field, window.cutoff),
                   lambda: ExprCF(expr, field, window))


class ReindexCF(ChainFunctor):
    """Precompose with a reindexing: base slot i reads my slot slot_map[i]."""

    def __init__(self, base: ChainFunctor, slot_map: tuple[int, ...],
                 groups: tuple[int, ...]):
        if len(slot_map) != base.slots:
            raise ArityMismatch("slot_map must cover the base slots")
        if any(s < 0 or s >= sum(groups) for s in slot_map):
            raise SlotOutOfRange("slot_map out of range")
        self.base = base
        self.slot_map = slot_map
        self.groups = groups
        self.field = base.field
        self.window = base.window

    def _base_objs(self, objs):
        return tuple(objs[self.slot_map[i]] for i in range(self.base.slots))

    def _lazy_value(self, objs):
        return self.base.lazy_value(self._base_objs(objs))

    def _lazy_map(self, mors):
        return self.base.lazy_map(tuple(mors[self.slot_map[i]]
                                        for i in range(self.base.slots)))


def reindex_functor(base: ChainFunctor, slot_map: Sequence[int],
                    groups: Sequence[int]) -> ChainFunctor:
    slot_map = tuple(slot_map)
    groups = tuple(groups)
    return _cached(("reindex", base.ckey, slot_map, groups),
                   lambda: ReindexCF(base, slot_map, groups))


def regroup_functor(base: ChainFunctor, groups: Sequence[int]) -> ChainFunctor:
    groups = tuple(groups)
    if sum(groups) != base.slots:
        raise ArityMismatch("regroup must preserve the number of slots")
    return reindex_functor(base, tuple(range(base.slots)), groups)


def merge_all_groups(base: ChainFunctor) -> ChainFunctor:
    return regroup_functor(base, (base.slots,)) if base.slots else base


class PresumCF(ChainFunctor):
    """(V; X) |-> F(X (+) V) with a fresh direction group prepended."""

    def __init__(self, base: ChainFunctor, group: int):
        if group >= len(base.groups):
            raise SlotOutOfRange(f"group {group} out of range")
        self.base = base
        self.group = group
        self.g = base.groups[group]
        self.gstart = base.group_start(group)
        self.groups = (self.g,) + base.groups
        self.field = base.field
        self.window = base.window

    def _base_objs(self, objs):
        v = objs[: self.g]
        rest = objs[self.g:]
        out = list(rest)
        for t in range(self.g):
            out[self.gstart + t] = rest[self.gstart + t] + v[t]
        return tuple(out)

    def _base_mors(self, mors):
        v = mors[: self.g]
        rest = list(mors[self.g:])
        for t in range(self.g):
            rest[self.gstart + t] = BlockDiagLM([rest[self.gstart + t], v[t]])
        return tuple(rest)

    def _lazy_value(self, objs):
        return self.base.lazy_value(self._base_objs(objs))

    def _lazy_map(self, mors):
        return self.base.lazy_map(self._base_mors(mors))


def presum_functor(base: ChainFunctor, group: int) -> ChainFunctor:
    return _cached(("presum", base.ckey, group), lambda: PresumCF(base, group))


class DirectSumCF(ChainFunctor):
    def __init__(self, parts: Sequence[ChainFunctor]):
        self.parts = tuple(parts)
        first = self.parts[0]
        for p in self.parts:
            if p.groups != first.groups or p.field != first.field:
                raise ShapeMismatch("direct sum parts must share domain")
        self.field = first.field
        cut = min(p.window.cutoff for p in self.parts)
        self.window = TruncationWindow(cut, min(p.window.trusted_upper
                                                for p in self.parts))
        self.groups = first.groups

    def _lazy_value(self, objs):
        vals = [p.lazy_value(objs) for p in self.parts]
        dims = [sum(v.dims[k] for v in vals)
                for k in range(self.window.cutoff + 1)]
        diffs = [BlockDiagLM([v.d(k) for v in vals])
                 for k in range(1, self.window.cutoff + 1)]
        trusted = min(self.window.trusted_upper,
                      min(v.window.trusted_upper for v in vals))
        return LazyComplex(self.field,
                           TruncationWindow(self.window.cutoff, trusted),
                           dims, diffs)

    def _lazy_map(self, mors):
        comps = [p.lazy_map(mors) for p in self.parts]
        return [BlockDiagLM([c[k] for c in comps])
                for k in range(self.window.cutoff + 1)]


def direct_sum_functor(parts: Sequence[ChainFunctor]) -> ChainFunctor:
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return _cached(("dsum",) + tuple(p.ckey for p in parts),
                   lambda: DirectSumCF(parts))


class _SplitCF(ChainFunctor):
    """Shared machinery for split-summand functors.

    Subclasses provide the ambient functor, the argument translation, and
    the idempotent(s) whose joint complement is the value.
    """

    amb: ChainFunctor

    def _amb_objs(self, objs) -> Objs:
        raise NotImplementedError

    def _amb_mors(self, mors) -> Mors:
        raise NotImplementedError

    def _idems(self, objs) -> list[Mors]:
        """Morphism tuples whose induced maps are the summand idempotents
        to remove from the ambient value."""
        raise NotImplementedError

    def pres(self, objs) -> Pres:
        objs = self.check_objs(objs)
        key = ("pres", objs)
        out = self._lazy_vals.get(key)
        if out is not None:
            return out
        aobjs = self._amb_objs(objs)
        aval = self.amb.lazy_value(aobjs)
        idems = [self.amb.lazy_map(mors) for mors in self._idems(objs)]
        pres: Pres = []
        for k in range(self.window.cutoff + 1):
            dim = aval.dims[k]
            comps = [idem[k] for idem in idems]
            if all(_structural_diag01(c) for c in comps):
                removed: set[int] = set()
                ok = True
                for c in comps:
                    sup = c.diag_support()
                    if removed & sup:
                        ok = False
                        break
                    removed |= sup
                if ok:
                    pres.append(("sel", tuple(i for i in range(dim)
                                              if i not in removed)))
                    continue
            total = Matrix.identity(self.field, dim)
            for c in comps:
                total = total - c.dense()
            split = split_idempotent(total)
            sel = split.selection
            pres.append(("sel", sel) if sel is not None
                        else ("dense", split.incl, split.proj))
        self._lazy_vals[key] = pres
        return pres

    def _lazy_value(self, objs):
        pres = self.pres(objs)
        aval = self.amb.lazy_value(self._amb_objs(objs))
        dims = _pres_dims(pres)
        diffs = [_restrict(aval.d(k), pres[k - 1], pres[k])
                 for k in range(1, self.window.cutoff + 1)]
        return LazyComplex(self.field, aval.window, dims, diffs)

    def _lazy_map(self, mors):
        src = tuple(m.cols for m in mors)
        tgt = tuple(m.rows for m in mors)
        ps = self.pres(src)
        pt = self.pres(tgt)
        acomps = self.amb.lazy_map(self._amb_mors(mors))
        return [_restrict(acomps[k], pt[k], ps[k])
                for k in range(self.window.cutoff + 1)]

    def incl_to_amb(self, objs) -> Pres:
        """Presentation of the value inside the ambient functor's value."""
        return self.pres(objs)


def _structural_diag01(m: LazyMor) -> bool:
    from .expr import _lazy_diag01
    return _lazy_diag01(m)


class ReducedPartCF(_SplitCF):
    """Complement of the image of F(zero map on one group)."""

    def __init__(self, base: ChainFunctor, group: int):
        self.base = base
        self.amb = base
        self.group = group
        self.g = base.groups[group]
        self.gstart = base.group_start(group)
        self.groups = base.groups
        self.field = base.field
        self.window = base.window

    def _amb_objs(self, objs):
        return objs

    def _amb_mors(self, mors):
        return mors

    def _idems(self, objs):
        mors = list(identity_mors(self.field, objs))
        for t in range(self.g):
            x = objs[self.gstart + t]
            mors[self.gstart + t] = DenseLM(Matrix.zeros(self.field, x, x))
        return [tuple(mors)]


class CrStepCF(_SplitCF):
    """cr_n from cr_{n-1}: split the two embedded cr_{n-1} summands off
    cr_{n-1}F(X1 (+) X2, X3, ..., Xn) in the designated group."""

    def __init__(self, base: ChainFunctor, group: int, n: int):
        self.base = base
        self.group = group
        self.n = n
        self.g = base.groups[group]
        self.gstart = base.group_start(group)
        self.groups = (base.groups[:group] + (self.g,) * n
                       + base.groups[group + 1:])
        self.field = base.field
        self.window = base.window
        self.amb = cross_effect_functor(base, group, n - 1)

    # my slots: copies occupy [gstart, gstart + n*g)
    def _amb_objs(self, objs):
        g, st = self.g, self.gstart
        merged = [objs[st + t] + objs[st + g + t] for t in range(g)]
        return tuple(list(objs[:st]) + merged + list(objs[st + 2 * g:]))

    def _amb_mors(self, mors):
        g, st = self.g, self.gstart
        merged = [BlockDiagLM([mors[st + t], mors[st + g + t]])
                  for t in range(g)]
        return tuple(list(mors[:st]) + merged + list(mors[st + 2 * g:]))

    def _idems(self, objs):
        g, st = self.g, self.gstart
        aobjs = self._amb_objs(objs)
        out = []
        for which in (0, 1):
            mors = list(identity_mors(self.field, aobjs))
            for t in range(g):
                dims = (objs[st + t], objs[st + g + t])
                mors[st + t] = DenseLM(_part_idem(self.field, dims, which))
            out.append(tuple(mors))
        return out

    def incl_to_base(self, objs) -> Pres:
        """Composite presentation inside base at the fully merged argument."""
        local = self.pres(objs)
        if self.n == 2:
            outer = self.amb.incl_to_base(self._amb_objs(objs)) \
                if isinstance(self.amb, CrStepCF) else \
                self.amb.incl_to_amb(self._amb_objs(objs))
            return _compose_pres(outer, local)
        outer = self.amb.incl_to_base(self._amb_objs(objs))
        return _compose_pres(outer, local)


def cross_effect_functor(base: ChainFunctor, group: int, n: int) -> ChainFunctor:
    """The n-th cross effect of base in one grouped variable."""
    if n < 1:
        raise ArityMismatch("cross effects start at n = 1")
    if group >= len(base.groups):
        raise SlotOutOfRange(f"group {group} out of range")
    if n == 1:
        return _cached(("cr1", base.ckey, group),
                       lambda: ReducedPartCF(base, group))
    return _cached(("cr", base.ckey, group, n),
                   lambda: CrStepCF(base, group, n))


def cr_incl_to_base(cf: ChainFunctor, objs) -> Pres:
    """Presentation of a cross-effect value inside base at the merged
    argument (handles both the n = 1 and n >= 2 classes)."""
    if isinstance(cf, CrStepCF):
        return cf.incl_to_base(objs)
    if isinstance(cf, ReducedPartCF):
        return cf.incl_to_amb(objs)
    raise ShapeMismatch("not a cross-effect functor")


def _diag_expand(objs, gstart: int, g: int, m: int):
    """Repeat the group argument m times (diagonal of the copies)."""
    group = list(objs[gstart: gstart + g])
    return tuple(list(objs[:gstart]) + group * m + list(objs[gstart + g:]))


def comonad_functor(base: ChainFunctor, group: int, m: int) -> ChainFunctor:
    """C_m = cross effect then diagonal: C_m F(X) = cr_m F(X, ..., X)."""
    cr = cross_effect_functor(base, group, m)
    st = base.group_start(group)
    g = base.groups[group]
    slot_map = []
    for i in range(cr.slots):
        if i < st:
            slot_map.append(i)
        elif i < st + m * g:
            slot_map.append(st + (i - st) % g)
        else:
            slot_map.append(i - (m - 1) * g)
    return reindex_functor(cr, tuple(slot_map), base.groups)


# -- natural transformations between chain functors -----------------------------


@dataclass
class LazyNat:
    """Natural transformation given by per-argument lazy components."""

    src: ChainFunctor
    tgt: ChainFunctor
    comp: Callable[[Objs], list[LazyMor]]

    def chain_map(self, objs) -> ChainMap:
        comps = [c.dense() for c in self.comp(tuple(objs))]
        return ChainMap(self.src.value(objs), self.tgt.value(objs), comps)


def counit_nat(base: ChainFunctor, group: int, m: int) -> LazyNat:
    """epsilon : C_m(base) -> base, the fold map restricted to the
    cross-effect summand."""
    cm = comonad_functor(base, group, m)
    cr = cross_effect_functor(base, group, m)
    st = base.group_start(group)
    g = base.groups[group]

    def comp(objs):
        crobjs = _diag_expand(objs, st, g, m)
        incl = cr_incl_to_base(cr, crobjs)
        mors = list(identity_mors(base.field, objs))
        for t in range(g):
            x = objs[st + t]
            mors[st + t] = DenseLM(_fold_matrix(base.field, x, m))
        fold = base.lazy_map(tuple(mors))
        return [_restrict(fold[k], _full(fold[k].rows), incl[k])
                for k in range(base.window.cutoff + 1)]

    return LazyNat(cm, base, comp)


def conjugate_nat(nat: LazyNat, group: int, m: int) -> LazyNat:
    """C_m applied to a natural transformation (restrict the component at
    the m-fold sum to the cross-effect summands)."""
    src_c = comonad_functor(nat.src, group, m)
    tgt_c = comonad_functor(nat.tgt, group, m)
    cr_s = cross_effect_functor(nat.src, group, m)
    cr_t = cross_effect_functor(nat.tgt, group, m)
    st = nat.src.group_start(group)
    g = nat.src.groups[group]

    def comp(objs):
        crobjs = _diag_expand(objs, st, g, m)
        merged = list(objs)
        for t in range(g):
            merged[st + t] = m * objs[st + t]
        inner = nat.comp(tuple(merged))
        ps = cr_incl_to_base(cr_s, crobjs)
        pt = cr_incl_to_base(cr_t, crobjs)
        return [_restrict(inner[k], pt[k], ps[k]) for k in range(len(inner))]

    return LazyNat(src_c, tgt_c, comp)


def cross_effect_nat(nat: LazyNat, group: int, n: int) -> LazyNat:
    """cr_n applied to a natural transformation (components restricted to
    the cross-effect summands at the merged argument)."""
    src_cr = cross_effect_functor(nat.src, group, n)
    tgt_cr = cross_effect_functor(nat.tgt, group, n)
    st = nat.src.group_start(group)
    g = nat.src.groups[group]

    def comp(objs):
        merged = list(objs[:st])
        for t in range(g):
            merged.append(sum(objs[st + t + i * g] for i in range(n)))
        merged.extend(objs[st + n * g:])
        inner = nat.comp(tuple(merged))
        ps = cr_incl_to_base(src_cr, objs)
        pt = cr_incl_to_base(tgt_cr, objs)
        return [_restrict(inner[k], pt[k], ps[k]) for k in range(len(inner))]

    return LazyNat(src_cr, tgt_cr, comp)


def reduced_inclusion_nat(base: ChainFunctor, group: int) -> LazyNat:
    """The natural inclusion cr_1 F -> F."""
    cr1 = cross_effect_functor(base, group, 1)

    def comp(objs):
        pres = cr1.pres(objs)
        val = base.lazy_value(objs)
        return [_restrict(IdentityLM(base.field, val.dims[k]),
                          _full(val.dims[k]), pres[k])
                for k in range(base.window.cutoff + 1)]

    return LazyNat(cr1, base, comp)


def comonad_shift_nat(base: ChainFunctor, group: int, n: int) -> LazyNat:
    """rho_n : C_{n+1}(base) -> C_n(base); the summand inclusion
    cr_{n+1} -> cr_n(X (+) X, X, ...) followed by the image of the fold."""
    src = comonad_functor(base, group, n + 1)
    tgt = comonad_functor(base, group, n)
    crn1 = cross_effect_functor(base, group, n + 1)
    crn = cross_effect_functor(base, group, n)
    st = base.group_start(group)
    g = base.groups[group]

    def comp(objs):
        crobjs1 = _diag_expand(objs, st, g, n + 1)
        local = crn1.pres(crobjs1)  # inside cr_n at (X (+) X, X, ..., X)
        crobjs = _diag_expand(objs, st, g, n)
        mors = list(identity_mors(base.field, crobjs))
        for t in range(g):
            x = objs[st + t]
            mors[st + t] = DenseLM(_fold_matrix(base.field, x, 2))
        fold = crn.lazy_map(tuple(mors))
        return [_restrict(fold[k], _full(fold[k].rows), local[k])
                for k in range(base.window.cutoff + 1)]

    return LazyNat(src, tgt, comp)


def compose_nats(outer: LazyNat, inner: LazyNat) -> LazyNat:
    def comp(objs):
        a = inner.comp(objs)
        b = outer.comp(objs)
        return [DenseLM(b[k].dense() @ a[k].dense()) for k in range(len(a))]

    return LazyNat(inner.src, outer.tgt, comp)


# -- resolution functors (polynomial approximation / linearization) -------------


class ResolutionCF(ChainFunctor):
    """Totalization of the comonad tower over one group.

    variant "pn": degree-0 term is the functor itself; the tower iterates
    C_{n+1}.  variant "d1": degree-0 term is the reduced part cr_1 F and
    the tower iterates C_2, with the first differential co-restricted to
    the reduced part.
    """

    def __init__(self, base: ChainFunctor, group: int, variant: str,
                 order: int):
        self.base = base
        self.group = group
        self.variant = variant
        self.order = order  # comonad C_{order}
        self.field = base.field
        n = base.window.cutoff
        base_trusted = base.window.trusted_upper
        self.window = TruncationWindow(n, max(min(n - 1, base_trusted), -1)
                                       if n > 0 else min(0, base_trusted))
        self.groups = base.groups
        self._ftower: list[ChainFunctor] = []
        self._bdries: dict[int, LazyNat] = {}

    def _ft(self, j: int) -> ChainFunctor:
        """The plain comonad tower over the base: C^(x j) F."""
        while len(self._ftower) <= j:
            if not self._ftower:
                self._ftower.append(self.base)
            else:
                self._ftower.append(comonad_functor(self._ftower[-1],
                                                    self.group, self.order))
        return self._ftower[j]

    def term(self, q: int) -> ChainFunctor:
        if q == 0 and self.variant == "d1":
            return cross_effect_functor(self.base, self.group, 1)
        return self._ft(q)

    def boundary(self, q: int) -> LazyNat:
        """The resolution differential term_q -> term_{q-1} as a LazyNat."""
        out = self._bdries.get(q)
        if out is not None:
            return out
        if q == 1 and self.variant == "d1":
            eps = counit_nat(self.base, self.group, self.order)
            cr1 = self.term(0)

            def comp(objs, eps=eps, cr1=cr1):
                raw = eps.comp(objs)
                rows = cr1.pres(objs)
                return [_restrict(raw[k], rows[k], _full(raw[k].cols))
                        for k in range(len(raw))]

            out = LazyNat(self.term(1), self.term(0), comp)
        else:
            parts = []
            for i in range(q):
                nat = counit_nat(self._ft(q - 1 - i), self.group, self.order)
                for _ in range(i):
                    nat = conjugate_nat(nat, self.group, self.order)
                parts.append(nat)

            def comp(objs, parts=parts):
                comps = [p.comp(objs) for p in parts]
                out = []
                for k in range(len(comps[0])):
                    terms = [comps[0][k]]
                    for i in range(1, len(comps)):
                        t = comps[i][k]
                        terms.append(ScaleLM(t, -1) if i % 2 else t)
                    out.append(SumLM(terms) if len(terms) > 1 else terms[0])
                return out

            out = LazyNat(self.term(q), self.term(q - 1), comp)
        self._bdries[q] = out
        return out

    def _lazy_value(self, objs):
        N = self.window.cutoff
        cols = [self.term(q).lazy_value(objs) for q in range(N + 1)]
        bnds = [None] + [self.boundary(q).comp(objs) for q in range(1, N + 1)]
        # Tot_n blocks ordered by decreasing inner degree p, (p, q = n - p)
        dims = []
        for n in range(N + 1):
            dims.append(sum(cols[n - p].dims[p] for p in range(n, -1, -1)))
        diffs = []
        for n in range(1, N + 1):
            row_sizes = [cols[(n - 1) - p].dims[p] for p in range(n - 1, -1, -1)]
            col_sizes = [cols[n - p].dims[p] for p in range(n, -1, -1)]
            blocks = {}
            for bj in range(n + 1):
                p = n - bj
                q = bj
                # vertical: inner differential of column q, degree p -> p-1
                if p >= 1:
                    blocks[(n - p, bj)] = cols[q].d(p)
                # horizontal: resolution boundary at inner degree p, with the
                # commuting-to-anticommuting sign (-1)^p
                if q >= 1:
                    blk = bnds[q][p]
                    if p % 2 == 1:
                        blk = ScaleLM(blk, -1)
                    blocks[(n - 1 - p, bj)] = blk
            diffs.append(BlockLM(self.field, row_sizes, col_sizes, blocks))
        trusted = min(self.window.trusted_upper,
                      min(c.window.trusted_upper for c in cols) if cols else 0)
        return LazyComplex(self.field,
                           TruncationWindow(N, trusted), dims, diffs)

    def _lazy_map(self, mors):
        N = self.window.cutoff
        comps = [self.term(q).lazy_map(mors) for q in range(N + 1)]
        src = tuple(m.cols for m in mors)
        tgt = tuple(m.rows for m in mors)
        svals = [self.term(q).lazy_value(src) for q in range(N + 1)]
        tvals = [self.term(q).lazy_value(tgt) for q in range(N + 1)]
        out = []
        for n in range(N + 1):
            row_sizes = [tvals[n - p].dims[p] for p in range(n, -1, -1)]
            col_sizes = [svals[n - p].dims[p] for p in range(n, -1, -1)]
            blocks = {}
            for bj in range(n + 1):
                p = n - bj
                blocks[(bj, bj)] = comps[bj][p]
            out.append(BlockLM(self.field, row_sizes, col_sizes, blocks))
        return out

    def block_offset(self, objs, n: int, q: int) -> int:
        """Offset of the (p = n - q, q) block inside Tot_n."""
        cols = [self.term(j).lazy_value(objs) for j in range(n + 1)]
        off = 0
        for p in range(n, n - q, -1):
            off += cols[n - p].dims[p]
        return off


def _resolution(base: ChainFunctor, group: int, variant: str,
                order: int) -> "ResolutionCF":
    return _cached(("res", base.ckey, group, variant, order),
                   lambda: ResolutionCF(base, group, variant, order))


def linearize_d1(base: ChainFunctor, group: int) -> ChainFunctor:
    """D_1 in one grouped variable: cr_1 F <- C_2 F <- C_2^2 F <- ...,
    totalized."""
    return _resolution(base, group, "d1", 2)


def poly_functor(base: ChainFunctor, group: int, n: int) -> ChainFunctor:
    """P_n in one grouped variable (n >= 1): F <- C_{n+1} F <- ..., totalized.
    For n = 0 use p0_functor (the reduced model F(0))."""
    if n < 1:
        raise ArityMismatch("poly_functor needs n >= 1; use p0_functor")
    return _resolution(base, group, "pn", n + 1)


class P0CF(ChainFunctor):
    """The degree-0 model: X |-> F(0), concentrated in degree 0."""

    def __init__(self, base: ChainFunctor, group: int):
        self.base = base
        self.group = group
        self.g = base.groups[group]
        self.gstart = base.group_start(group)
        self.field = base.field
        self.window = base.window
        self.groups = base.groups

    def _zeroed(self, objs):
        out = list(objs)
        for t in range(self.g):
            out[self.gstart + t] = 0
        return tuple(out)

    def _zero_mors(self, mors):
        out = list(mors)
        for t in range(self.g):
            out[self.gstart + t] = ZeroLM(self.field, 0, 0)
        return tuple(out)

    def _lazy_value(self, objs):
        return self.base.lazy_value(self._zeroed(objs))

    def _lazy_map(self, mors):
        return self.base.lazy_map(self._zero_mors(mors))


def p0_functor(base: ChainFunctor, group: int) -> ChainFunctor:
    return _cached(("p0", base.ckey, group), lambda: P0CF(base, group))


def poly_inclusion(res: ResolutionCF, objs) -> ChainMap:
    """p_n : F -> P_nF (or cr_1 F -> D_1 F), inclusion into degree zero."""
    objs = res.check_objs(objs)
    src = res.term(0).value(objs)
    tgt = res.value(objs)
    comps = []
    for n in range(res.window.cutoff + 1):
        # the q = 0 block sits first (largest inner degree p = n)
        m = MatrixBuilder(res.field, tgt.dim(n), src.dim(n))
        m.add_block(0, 0, Matrix.identity(res.field, src.dim(n)))
        comps.append(m.build())
    return ChainMap(src, tgt, comps)


# -- public cross-effect operations ---------------------------------------------


@dataclass
class CrossEffect:
    """A cross effect with its split-summand presentation.

    ``summand`` presents the degree-0 value inside base(X_1 (+) ... (+) X_n).
    ``induced`` evaluates the functor on argument morphisms by conjugating
    the base functor's induced map with the presentation.
    """

    base: ChainFunctor
    n: int
    args: tuple
    functor: ChainFunctor
    summand: "SplitSummandProxy"

    @property
    def dim(self) -> int:
        return self.summand.incl.cols

    def induced(self, mats) -> Matrix:
        return self.functor.map(mats).components[0]


@dataclass
class SplitSummandProxy:
    ambient_dim: int
    incl: Matrix
    proj: Matrix


def _pres_entry_to_matrices(entry, field: Field, ambient: int):
    incl, proj = _pres_dense(entry, field, ambient)
    return incl, proj


def cross_effect(f, n: int, args, field: Field | None = None,
                 window: TruncationWindow | None = None) -> CrossEffect:
    """cr_n of a one-variable functor at the given argument dimensions."""
    base = _as_functor(f, field, window)
    if n < 1:
        raise ArityMismatch("cross effects start at n = 1")
    cr = cross_effect_functor(base, 0, n)
    args = tuple(int(a) for a in args)
    if len(args) != n:
        raise ArityMismatch(f"cr_{n} takes {n} arguments")
    pres = cr_incl_to_base(cr, args)
    amb = base.value((sum(args),)).dims[0]
    incl, proj = _pres_entry_to_matrices(pres[0], base.field, amb)
    return CrossEffect(base, n, args, cr,
                       SplitSummandProxy(amb, incl, proj))


def _as_functor(f, field: Field | None, window: TruncationWindow | None
                ) -> ChainFunctor:
    if isinstance(f, ChainFunctor):
        return f
    if isinstance(f, FunctorExpr):
        if field is None or window is None:
            raise ShapeMismatch("expression functors need a field and window")
        return expr_functor(f, field, window)
    raise ShapeMismatch(f"not a functor: {f!r}")


def comonad_counit(f, n: int, x: int, field: Field | None = None,
                   window: TruncationWindow | None = None) -> Matrix:
    """The fold-restriction C_nF(X) -> F(X) in chain degree 0."""
    base = _as_functor(f, field, window)
    nat = counit_nat(base, 0, n)
    return nat.comp((x,))[0].dense()


def cr_symmetry_iso(f, n: int, args, perm, field: Field | None = None,
                    window: TruncationWindow | None = None) -> Matrix:
    """Isomorphism cr_nF(args) -> cr_nF(perm . args) from the coproduct
    shuffle automorphism of F((+) args), in chain degree 0."""
    base = _as_functor(f, field, window)
    args = tuple(int(a) for a in args)
    perm = tuple(perm)
    if sorted(perm) != list(range(n)):
        raise ArityMismatch("perm must be a permutation of range(n)")
    permuted = tuple(args[perm[j]] for j in range(n))
    cr = cross_effect_functor(base, 0, n)
    pres_src = cr_incl_to_base(cr, args)
    pres_tgt = cr_incl_to_base(cr, permuted)
    total = sum(args)
    # block permutation (+)_i X_i -> (+)_j X_{perm[j]}
    shuffle = MatrixBuilder(base.field, total, total)
    src_off = [sum(args[:i]) for i in range(n)]
    tgt_off = [sum(permuted[:j]) for j in range(n)]
    for j in range(n):
        i = perm[j]
        shuffle.add_block(tgt_off[j], src_off[i],
                          Matrix.identity(base.field, args[i]))
    smap = base.lazy_map((DenseLM(shuffle.build()),))
    return _restrict(smap[0], pres_tgt[0], pres_src[0]).dense()


def contraction_splittings(f, n: int, x: int, k: int,
                           field: Field | None = None,
                           window: TruncationWindow | None = None) -> Matrix:
    """The unit-induced splitting s_k of the comonad resolution column.

    s_k maps C_n^{x(k+1)}F(X) into C_n^{x(k+2)}F(X): include the n-variable
    cross effect along the coproduct inclusions X -> (+)^n X, then project
    onto the next cross-effect summand.
    """
    from .errors import NotApplicable

    base = _as_functor(f, field, window)
    if base.slots != 1 or n < 1 or k < 0:
        raise NotApplicable("unit splitting needs a one-variable functor, "
                            "n >= 1 and k >= 0")
    ft = base
    for _ in range(k):
        ft = comonad_functor(ft, 0, n)
    hk = cross_effect_functor(ft, 0, n)
    args = (x,) * n
    iota_mors = tuple(DenseLM(_block_incl(base.field, [x] * n, i))
                      for i in range(n))
    raw = hk.lazy_map(iota_mors)
    crt = cross_effect_functor(comonad_functor(ft, 0, n), 0, n)
    pres = crt.pres(args)
    return _restrict(raw[0], pres[0], _full(raw[0].cols)).dense()


def resolution_column(f, n: int, x: int, levels: int,
                      field: Field | None = None,
                      window: TruncationWindow | None = None):
    """The contractible column (C_n F(X) <- C_n^2 F(X) <- ...) as a
    ChainComplex together with its unit splittings, for testing."""
    from .chain import ChainComplex as CC

    base = _as_functor(f, field, window)
    res = _resolution(base, 0, "pn", n)
    dims = []
    diffs = []
    for j in range(levels + 1):
        dims.append(res._ft(j + 1).value((x,)).dims[0])
    for j in range(1, levels + 1):
        nat = conjugate_nat(res.boundary(j), 0, n)
        diffs.append(nat.comp((x,))[0].dense())
    w = TruncationWindow.bounded(levels)
    col = CC(base.field, w, dims, diffs)
    esses = [contraction_splittings(base, n, x, j) for j in range(levels)]
    return col, esses


def poly_projection_nat(src_res: ResolutionCF, tgt_res: ResolutionCF) -> LazyNat:
    """q_n : P_nF -> P_{n-1}F induced by the comonad map rho_n."""
    if src_res.base is not tgt_res.base or src_res.group != tgt_res.group:
        raise ShapeMismatch("q_n needs towers over the same functor")
    n_src = src_res.order  # = n + 1
    n_tgt = tgt_res.order  # = n
    group = src_res.group

    def level_nat(q: int) -> LazyNat:
        # C_{n+1}^{x q} F -> C_n^{x q} F
        if q == 0:
            t0s, t0t = src_res.term(0), tgt_res.term(0)

            def comp0(objs):
                val = t0s.lazy_value(objs)
                return [IdentityLM(src_res.field, val.dims[k])
                        for k in range(src_res.window.cutoff + 1)]

            return LazyNat(t0s, t0t, comp0)
        prev = level_nat(q - 1)
        rho = comonad_shift_nat(src_res.term(q - 1), group, n_tgt)
        # C_n applied to prev, then rho at the C_{n+1}-level
        return compose_nats(conjugate_nat(prev, group, n_tgt), rho)

    def comp(objs):
        N = src_res.window.cutoff
        svals = [src_res.term(q).lazy_value(objs) for q in range(N + 1)]
        tvals = [tgt_res.term(q).lazy_value(objs) for q in range(N + 1)]
        levels = [level_nat(q).comp(objs) for q in range(N + 1)]
        out = []
        for n in range(N + 1):
            row_sizes = [tvals[n - p].dims[p] for p in range(n, -1, -1)]
            col_sizes = [svals[n - p].dims[p] for p in range(n, -1, -1)]
            blocks = {}
            for bj in range(n + 1):
                p = n - bj
                blocks[(bj, bj)] = levels[bj][p]
            out.append(BlockLM(src_res.field, row_sizes, col_sizes, blocks))
        return out

    return LazyNat(src_res, tgt_res, comp)
