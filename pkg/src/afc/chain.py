"""Truncated non-negatively graded chain complexes, maps, homotopies, homology.

A complex stores dimensions for degrees 0..cutoff and differentials
d_k : C_k -> C_{k-1} for 1 <= k <= cutoff.  The window also carries a
``trusted_upper`` degree: homology is only reported there, because degrees
above it may be affected by truncating an unbounded construction.  Genuinely
bounded complexes carry trusted_upper = cutoff (the missing d_{cutoff+1} is
known to be zero); anything built by cutting a resolution carries
trusted_upper = cutoff - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import EmptyTrustedRange, RowNotContractible, ShapeMismatch, WindowTooSmall
from .fields import Field
from .matrix import Matrix, block_diag, split_idempotent, solve_exact


@dataclass(frozen=True)
class TruncationWindow:
    cutoff: int
    trusted_upper: int

    def __post_init__(self):
        if not (-1 <= self.trusted_upper <= self.cutoff):
            raise WindowTooSmall(
                f"trusted_upper {self.trusted_upper} outside [-1, {self.cutoff}]")

    @staticmethod
    def bounded(cutoff: int) -> "TruncationWindow":
        return TruncationWindow(cutoff, cutoff)

    @staticmethod
    def truncated(cutoff: int) -> "TruncationWindow":
        return TruncationWindow(cutoff, max(cutoff - 1, 0))

    def meet(self, other: "TruncationWindow") -> "TruncationWindow":
        return TruncationWindow(min(self.cutoff, other.cutoff),
                                min(self.trusted_upper, other.trusted_upper))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    detail: str = ""

    def __bool__(self):
        return self.ok


class ChainComplex:
    """Bounded exact-arithmetic chain complex with verified d @ d = 0."""

    __slots__ = ("field", "window", "dims", "diffs", "_h")

    def __init__(self, field: Field, window: TruncationWindow,
                 dims: Sequence[int], diffs: Sequence[Matrix], validate: bool = True):
        self.field = field
        self.window = window
        self.dims = tuple(dims)
        self.diffs = tuple(diffs)
        self._h = None
        if len(self.dims) != window.cutoff + 1:
            raise ShapeMismatch("dims must cover degrees 0..cutoff")
        if len(self.diffs) != window.cutoff:
            raise ShapeMismatch("need one differential per degree 1..cutoff")
        if validate:
            self._validate()

    def _validate(self):
        for k in range(1, self.window.cutoff + 1):
            d = self.diffs[k - 1]
            if d.rows != self.dims[k - 1] or d.cols != self.dims[k]:
                raise ShapeMismatch(f"d_{k} has shape {d.rows}x{d.cols}, "
                                    f"expected {self.dims[k - 1]}x{self.dims[k]}")
            if k >= 2 and not (self.diffs[k - 2] @ d).is_zero():
                raise ShapeMismatch(f"d_{k - 1} @ d_{k} != 0")

    def d(self, k: int) -> Matrix:
        """d_k for 1 <= k; zero map (0 columns or rows) outside the window."""
        if 1 <= k <= self.window.cutoff:
            return self.diffs[k - 1]
        if k == self.window.cutoff + 1:
            return Matrix.zeros(self.field, self.dims[self.window.cutoff], 0)
        raise WindowTooSmall(f"differential d_{k} not stored")

    def dim(self, k: int) -> int:
        return self.dims[k] if 0 <= k <= self.window.cutoff else 0

    def total_dim(self) -> int:
        return sum(self.dims)

    def homology_dims(self) -> tuple[int, ...]:
        """H_k = dim ker d_k - dim im d_{k+1} for degrees 0..trusted_upper."""
        out = []
        for k in range(self.window.trusted_upper + 1):
            kerdim = self.dims[k] - self.d(k).rank() if k >= 1 else self.dims[0]
            out.append(kerdim - self.d(k + 1).rank())
        return tuple(out)

    def is_exact_everywhere(self) -> bool:
        """All homology vanishes through the full stored range (d_{top+1}=0)."""
        for k in range(self.window.cutoff + 1):
            kerdim = self.dims[k] - self.d(k).rank() if k >= 1 else self.dims[0]
            imdim = self.d(k + 1).rank() if k + 1 <= self.window.cutoff else 0
            if kerdim != imdim:
                return False
        return True

    def __eq__(self, other):
        return (isinstance(other, ChainComplex)
                and self.field == other.field and self.window == other.window
                and self.dims == other.dims and self.diffs == other.diffs)

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.field.characteristic, self.window,
                            self.dims, self.diffs))
        return self._h

    def __repr__(self):
        return f"ChainComplex({self.field}, dims={self.dims})"


def deg0_complex(field: Field, window: TruncationWindow, dim: int) -> ChainComplex:
    dims = [dim] + [0] * window.cutoff
    diffs = [Matrix.zeros(field, dims[k - 1], dims[k])
             for k in range(1, window.cutoff + 1)]
    return ChainComplex(field, TruncationWindow(window.cutoff, window.cutoff),
                        dims, diffs, validate=False)


def zero_complex(field: Field, window: TruncationWindow) -> ChainComplex:
    return deg0_complex(field, window, 0)


def restricted_trusted(c: ChainComplex, new_cutoff: int) -> int:
    """Trusted range after cutting c at new_cutoff.

    Cutting below the stored cutoff loses the differential into the new top
    degree unless everything above the cut was zero anyway.
    """
    w = c.window
    if new_cutoff >= w.cutoff:
        return w.trusted_upper
    lost = any(c.dims[k] for k in range(new_cutoff + 1, w.cutoff + 1))
    return min(w.trusted_upper, new_cutoff - 1 if lost else new_cutoff)


def truncate_complex(c: ChainComplex, new_cutoff: int) -> ChainComplex:
    """Forget degrees above new_cutoff, degrading the trusted range."""
    if new_cutoff >= c.window.cutoff:
        return c
    w = TruncationWindow(new_cutoff, restricted_trusted(c, new_cutoff))
    return ChainComplex(c.field, w, c.dims[: new_cutoff + 1],
                        c.diffs[:new_cutoff], validate=False)


def pad_bounded(c: ChainComplex, new_cutoff: int) -> ChainComplex:
    """Extend a genuinely bounded complex with zero degrees."""
    if c.window.trusted_upper != c.window.cutoff:
        raise WindowTooSmall("only bounded complexes may be zero-padded")
    if new_cutoff <= c.window.cutoff:
        return c
    dims = list(c.dims) + [0] * (new_cutoff - c.window.cutoff)
    diffs = list(c.diffs)
    for k in range(c.window.cutoff + 1, new_cutoff + 1):
        diffs.append(Matrix.zeros(c.field, dims[k - 1], dims[k]))
    return ChainComplex(c.field, TruncationWindow.bounded(new_cutoff),
                        dims, diffs, validate=False)


def direct_sum(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    """Degreewise block-diagonal sum over the common window."""
    if c.field != d.field:
        raise ShapeMismatch("direct_sum field mismatch")
    cut = min(c.window.cutoff, d.window.cutoff)
    w = TruncationWindow(cut, min(restricted_trusted(c, cut),
                                  restricted_trusted(d, cut)))
    dims = [c.dim(k) + d.dim(k) for k in range(w.cutoff + 1)]
    diffs = [block_diag(c.field, [c.d(k), d.d(k)]) for k in range(1, w.cutoff + 1)]
    return ChainComplex(c.field, w, dims, diffs, validate=False)


def direct_sum_many(parts: Sequence[ChainComplex]) -> ChainComplex:
    out = parts[0]
    for p in parts[1:]:
        out = direct_sum(out, p)
    return out


@dataclass(frozen=True)
class HomologyComparison:
    equal: bool
    degrees: tuple[int, ...]
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]

    def __bool__(self):
        return self.equal


def compare_homology(c: ChainComplex, d: ChainComplex) -> HomologyComparison:
    """Equal/unequal homology over the intersection of trusted ranges."""
    if c.field != d.field:
        raise ShapeMismatch("compare_homology field mismatch")
    top = min(c.window.trusted_upper, d.window.trusted_upper)
    if top < 0:
        raise EmptyTrustedRange("no common trusted degrees")
    hl = c.homology_dims()[: top + 1]
    hr = d.homology_dims()[: top + 1]
    return HomologyComparison(hl == hr, tuple(range(top + 1)), hl, hr)


class ChainMap:
    """Degreewise map with optional commuting-square verification."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: ChainComplex, target: ChainComplex,
                 components: Sequence[Matrix]):
        self.source = source
        self.target = target
        self.components = tuple(components)
        top = min(source.window.cutoff, target.window.cutoff)
        if len(self.components) != top + 1:
            raise ShapeMismatch("chain map must cover degrees 0..min cutoff")
        for k, f in enumerate(self.components):
            if f.rows != target.dim(k) or f.cols != source.dim(k):
                raise ShapeMismatch(f"component {k} is {f.rows}x{f.cols}, expected "
                                    f"{target.dim(k)}x{source.dim(k)}")

    @property
    def top(self) -> int:
        return len(self.components) - 1

    def f(self, k: int) -> Matrix:
        if 0 <= k <= self.top:
            return self.components[k]
        return Matrix.zeros(self.source.field, self.target.dim(k), self.source.dim(k))

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self after other."""
        top = min(self.top, other.top)
        return ChainMap(other.source, self.target,
                        [self.components[k] @ other.components[k]
                         for k in range(top + 1)])

    def __add__(self, other: "ChainMap") -> "ChainMap":
        top = min(self.top, other.top)
        return ChainMap(self.source, self.target,
                        [self.components[k] + other.components[k]
                         for k in range(top + 1)])

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        top = min(self.top, other.top)
        return ChainMap(self.source, self.target,
                        [self.components[k] - other.components[k]
                         for k in range(top + 1)])

    def __eq__(self, other):
        return (isinstance(other, ChainMap) and self.components == other.components
                and self.source == other.source and self.target == other.target)

    def __hash__(self):
        return hash(self.components)


def identity_chain_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, [Matrix.identity(c.field, c.dim(k))
                           for k in range(c.window.cutoff + 1)])


def zero_chain_map(source: ChainComplex, target: ChainComplex) -> ChainMap:
    top = min(source.window.cutoff, target.window.cutoff)
    return ChainMap(source, target,
                    [Matrix.zeros(source.field, target.dim(k), source.dim(k))
                     for k in range(top + 1)])


def check_chain_map(f: ChainMap) -> Verdict:
    """Exact verification of f d = d f per degree."""
    for k in range(1, f.top + 1):
        lhs = f.components[k - 1] @ f.source.d(k)
        rhs = f.target.d(k) @ f.components[k]
        if lhs != rhs:
            return Verdict(False, f"square fails at degree {k}")
    return Verdict(True, "chain map verified")


class ChainHomotopy:
    """s_k : C_k -> C_{k+1} witnessing f - g = d s + s d."""

    __slots__ = ("f", "g", "components")

    def __init__(self, f: ChainMap, g: ChainMap, components: Sequence[Matrix]):
        if f.source is not g.source and f.source != g.source:
            raise ShapeMismatch("homotopy endpoints must share a source")
        if f.target != g.target:
            raise ShapeMismatch("homotopy endpoints must share a target")
        self.f = f
        self.g = g
        self.components = tuple(components)

    def s(self, k: int) -> Matrix:
        src = self.f.source
        tgt = self.f.target
        if 0 <= k < len(self.components):
            return self.components[k]
        return Matrix.zeros(src.field, tgt.dim(k + 1), src.dim(k))


def check_homotopy(h: ChainHomotopy) -> Verdict:
    """Exact verification of d s + s d = f - g, reporting the first failure.

    Checked for all degrees k with k + 1 <= cutoff, where the identity is
    unaffected by the truncation.
    """
    src = h.f.source
    tgt = h.f.target
    top = min(src.window.cutoff, tgt.window.cutoff)
    for k in range(top):
        want = h.f.f(k) - h.g.f(k)
        got = tgt.d(k + 1) @ h.s(k)
        if k >= 1:
            got = got + h.s(k - 1) @ src.d(k)
        if got != want:
            return Verdict(False, f"ds + sd != f - g at degree {k}")
    return Verdict(True, "homotopy verified")


def split_idempotent_chain(amb: ChainComplex, e: ChainMap
                           ) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """Split an idempotent chain self-map degreewise.

    The summand's differential is proj d incl; inclusion and projection are
    chain maps because e commutes with d.
    """
    splits = [split_idempotent(e.components[k]) for k in range(amb.window.cutoff + 1)]
    dims = [s.dim for s in splits]
    diffs = [splits[k - 1].proj @ amb.d(k) @ splits[k].incl
             for k in range(1, amb.window.cutoff + 1)]
    sub = ChainComplex(amb.field, amb.window, dims, diffs, validate=False)
    incl = ChainMap(sub, amb, [s.incl for s in splits])
    proj = ChainMap(amb, sub, [s.proj for s in splits])
    return sub, incl, proj


def contraction_of_exact(c: ChainComplex) -> list[Matrix]:
    """Deterministic s with d s + s d = 1 in degrees 0..cutoff-1.

    Split each C_k = ker d_k (+) U_k with d_k restricting to an isomorphism
    U_k -> im d_k; s inverts that isomorphism on cycles and kills U_k.
    Needs homology to vanish in degrees 0..cutoff-1 (exactness at the top
    degree is not required: the relation there involves the differential
    beyond the window).  Raises RowNotContractible otherwise.
    """
    field = c.field
    top = c.window.cutoff
    kers = [Matrix.identity(field, c.dims[0])]
    for k in range(1, top + 1):
        kers.append(c.d(k).kernel_basis())
    comps = [_complement_columns(kers[k]) for k in range(top + 1)]
    s_list = []
    for k in range(top):
        # s_k : C_k -> C_{k+1}: on ker d_k invert d_{k+1}|U_{k+1}, else 0.
        zk = kers[k]
        uk1 = comps[k + 1]
        if zk.cols == 0:
            s_list.append(Matrix.zeros(field, c.dims[k + 1], c.dims[k]))
            continue
        d_on_u = c.d(k + 1) @ uk1
        try:
            lift = solve_exact(d_on_u, zk)  # d|U(lift) = zk columns
        except ShapeMismatch:
            raise RowNotContractible(f"complex not exact at degree {k}")
        # express x in C_k as zk a + uk b; s x = uk1 lift a
        zu = _hstack_pair(zk, comps[k])
        coords = solve_exact(zu, Matrix.identity(field, c.dims[k]))
        a = coords.submatrix(range(zk.cols), range(c.dims[k]))
        s_list.append(uk1 @ lift @ a)
    return s_list


def _complement_columns(basis: Matrix) -> Matrix:
    """Standard-basis columns completing basis to the full space, greedily."""
    field = basis.field
    n = basis.rows
    chosen = []
    cur = basis
    for i in range(n):
        if cur.cols == n:
            break
        cand = _hstack_pair(cur, Matrix.selection_incl(field, n, [i]))
        if cand.rank() > cur.rank():
            chosen.append(i)
            cur = cand
    return Matrix.selection_incl(field, n, chosen)


def _hstack_pair(a: Matrix, b: Matrix) -> Matrix:
    from .matrix import hstack
    return hstack([a, b])


def contraction_as_homotopy(c: ChainComplex, s: Sequence[Matrix]) -> ChainHomotopy:
    """Package a contraction as a homotopy id ~ 0 for check_homotopy."""
    return ChainHomotopy(identity_chain_map(c), zero_chain_map(c, c), s)


def map_from_function(source: ChainComplex, target: ChainComplex,
                      fn: Callable[[int], Matrix]) -> ChainMap:
    top = min(source.window.cutoff, target.window.cutoff)
    return ChainMap(source, target, [fn(k) for k in range(top + 1)])
