"""Dold-Kan machinery: truncated simplicial objects, K, M, N, prolongation.

The inverse equivalence K sends a complex c to the simplicial object with

    K(c)_n = (+)_{eta : [n] ->> [k]} c_k

summed over monotone surjections.  For alpha : [m] -> [n] the component of
K(alpha) from the eta summand to the eta' summand is determined by the
epi-mono factorization eta alpha = mu eta': the identity when mu is the
identity, the differential c_k -> c_{k-1} when mu is the top coface
[k-1] -> [k] (image {0..k-1}), and zero otherwise.  Simplicial identities
are verified exactly whenever a simplicial object is constructed.

Prolonging a chain functor f along a complex applies f to every level and
face of K(c), takes the normalized complex N levelwise (inner-degreewise
kernels of the faces d_i, i > 0), and yields a commuting bicomplex with
rows indexed by simplicial level; the Moore functor M (alternating face
sums) is kept alongside for the comparison retraction, whose row data feeds
the general bicomplex machinery.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .bicomplex import Bicomplex, RowSDR, normalize_signs, tot
from .chain import (
    ChainComplex, ChainMap, TruncationWindow, Verdict, contraction_of_exact,
    restricted_trusted,
)
from .errors import NotStrictlyReduced, ShapeMismatch, WindowExhausted
from .fields import Field
from .functors import ChainFunctor, LazyComplex, _cached, identity_mors
from .lazymat import DenseLM, LazyMor, lazy
from .matrix import Matrix, MatrixBuilder, hstack, solve_exact, vstack


@lru_cache(maxsize=None)
def surjections(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Monotone surjections [n] ->> [k] as value tuples, lexicographic."""
    if k > n or k < 0:
        return ()
    out = []
    for jumps in combinations(range(1, n + 1), k):
        vals = [0]
        for i in range(1, n + 1):
            vals.append(vals[-1] + (1 if i in jumps else 0))
        out.append(tuple(vals))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def level_index(n: int, top: int) -> tuple[tuple[int, ...], ...]:
    """All surjection summands of K(c)_n for c supported in degrees <= top,
    ordered by (k, eta)."""
    out = []
    for k in range(min(n, top) + 1):
        out.extend(surjections(n, k))
    return tuple(out)


def _epi_mono_component(eta: tuple[int, ...], alpha: tuple[int, ...]):
    """Factor eta alpha and classify the mono part.

    Returns (eta_prime, kind) with kind in {"id", "d", None}: identity
    component, differential component (top coface), or zero.
    """
    comp = tuple(eta[a] for a in alpha)
    k = eta[-1]
    image = sorted(set(comp))
    rank = {v: i for i, v in enumerate(image)}
    eta_p = tuple(rank[v] for v in comp)
    if image == list(range(k + 1)):
        return eta_p, "id"
    if image == list(range(k)):
        return eta_p, "d"
    return eta_p, None


def _coface(n: int, i: int) -> tuple[int, ...]:
    """delta^i : [n-1] -> [n], skipping i."""
    return tuple(j if j < i else j + 1 for j in range(n))


def _codegeneracy(n: int, i: int) -> tuple[int, ...]:
    """sigma^i : [n+1] -> [n], hitting i twice."""
    return tuple(j if j <= i else j - 1 for j in range(n + 2))


class SimplicialObject:
    """Truncated simplicial vector space with verified identities."""

    def __init__(self, field: Field, top: int, dims: Sequence[int],
                 faces: dict, degeneracies: dict, validate: bool = True):
        self.field = field
        self.top = top
        self.dims = tuple(dims)
        self.faces = dict(faces)          # (n, i) -> d_i : S_n -> S_{n-1}
        self.degeneracies = dict(degeneracies)  # (n, i) -> s_i : S_n -> S_{n+1}
        if validate:
            v = self.verify_identities()
            if not v.ok:
                raise ShapeMismatch(v.detail)

    def face(self, n: int, i: int) -> Matrix:
        return self.faces[(n, i)]

    def degeneracy(self, n: int, i: int) -> Matrix:
        return self.degeneracies[(n, i)]

    def verify_identities(self) -> Verdict:
        for n in range(2, self.top + 1):
            for i in range(n):
                for j in range(i + 1, n + 1):
                    lhs = self.face(n - 1, i) @ self.face(n, j)
                    rhs = self.face(n - 1, j - 1) @ self.face(n, i)
                    if lhs != rhs:
                        return Verdict(False, f"d_i d_j fails at n={n},{i},{j}")
        for n in range(self.top):
            for i in range(n + 1):
                for j in range(n + 1):
                    ds = self.face(n + 1, i) @ self.degeneracy(n, j)
                    if i < j:
                        want = (self.degeneracy(n - 1, j - 1) @ self.face(n, i)
                                if n >= 1 else None)
                    elif i in (j, j + 1):
                        want = Matrix.identity(self.field, self.dims[n])
                    else:
                        want = (self.degeneracy(n - 1, j) @ self.face(n, i - 1)
                                if n >= 1 else None)
                    if want is not None and ds != want:
                        return Verdict(False, f"d s fails at n={n},{i},{j}")
        for n in range(self.top - 1):
            for i in range(n + 1):
                for j in range(i, n + 1):
                    lhs = self.degeneracy(n + 1, i) @ self.degeneracy(n, j)
                    rhs = self.degeneracy(n + 1, j + 1) @ self.degeneracy(n, i)
                    if lhs != rhs:
                        return Verdict(False, f"s_i s_j fails at n={n},{i},{j}")
        return Verdict(True, "simplicial identities hold")


def _k_structure_matrix(c_dims, c_diff, field: Field, n_src: int,
                        alpha: tuple[int, ...], top: int) -> Matrix:
    """K(alpha) : K_nsrc -> K_m for the structural rule, where the complex
    entries have dimensions c_dims and differentials c_diff(k)."""
    m_tgt = len(alpha) - 1
    src = level_index(n_src, top)
    tgt = level_index(m_tgt, top)
    tpos = {eta: i for i, eta in enumerate(tgt)}
    toff = []
    t = 0
    for eta in tgt:
        toff.append(t)
        t += c_dims(eta[-1])
    out = MatrixBuilder(field, t, sum(c_dims(eta[-1]) for eta in src))
    soff = 0
    for eta in src:
        k = eta[-1]
        dim = c_dims(k)
        if dim:
            eta_p, kind = _epi_mono_component(eta, alpha)
            if kind == "id" and eta_p in tpos:
                out.add_block(toff[tpos[eta_p]], soff,
                              Matrix.identity(field, dim))
            elif kind == "d" and eta_p in tpos and k >= 1:
                out.add_block(toff[tpos[eta_p]], soff, c_diff(k))
        soff += dim
    return out.build()


def gamma_K(c: ChainComplex, top: int | None = None) -> SimplicialObject:
    """The inverse Dold-Kan construction on a complex, with verified
    simplicial identities."""
    if top is None:
        top = c.window.cutoff
    field = c.field
    cut = c.window.cutoff
    dims = [sum(c.dim(eta[-1]) for eta in level_index(n, cut))
            for n in range(top + 1)]
    faces = {}
    degeneracies = {}
    for n in range(1, top + 1):
        for i in range(n + 1):
            faces[(n, i)] = _k_structure_matrix(
                c.dim, c.d, field, n, _coface(n, i), cut)
    for n in range(top):
        for i in range(n + 1):
            degeneracies[(n, i)] = _k_structure_matrix(
                c.dim, c.d, field, n, _codegeneracy(n, i), cut)
    return SimplicialObject(field, top, dims, faces, degeneracies)


def moore_M(s: SimplicialObject) -> ChainComplex:
    """Unnormalized chain complex: differentials are alternating face sums."""
    diffs = []
    for n in range(1, s.top + 1):
        d = s.face(n, 0)
        for i in range(1, n + 1):
            term = s.face(n, i)
            d = d + (term if i % 2 == 0 else -term)
        diffs.append(d)
    return ChainComplex(s.field, TruncationWindow.truncated(s.top),
                        s.dims, diffs)


def normalized_N(s: SimplicialObject) -> tuple[ChainComplex, list[Matrix]]:
    """Normalized complex: N_n = intersection of ker d_i (i > 0), with d_0
    restricted.  Returns the complex and the inclusion N_n -> S_n per
    degree."""
    field = s.field
    incls = [Matrix.identity(field, s.dims[0])]
    for n in range(1, s.top + 1):
        stacked = vstack([s.face(n, i) for i in range(1, n + 1)])
        incls.append(stacked.kernel_basis())
    diffs = []
    for n in range(1, s.top + 1):
        image = s.face(n, 0) @ incls[n]
        diffs.append(solve_exact(incls[n - 1], image))
    dims = [m.cols for m in incls]
    cpx = ChainComplex(field, TruncationWindow.truncated(s.top), dims, diffs)
    return cpx, incls


def nk_comparison(c: ChainComplex) -> tuple[ChainMap, Verdict]:
    """The projection K(c) -> (identity-surjection summands) restricted to
    N(K(c)): an exact isomorphism of complexes N(K(c)) = c."""
    s = gamma_K(c)
    ncpx, incls = normalized_N(s)
    comps = []
    for n in range(c.window.cutoff + 1):
        idx = level_index(n, c.window.cutoff)
        off = 0
        proj = None
        for eta in idx:
            dim = c.dim(eta[-1])
            if eta == tuple(range(n + 1)):
                proj = MatrixBuilder(c.field, dim, s.dims[n])
                proj.add_block(0, off, Matrix.identity(c.field, dim))
            off += dim
        pm = (proj.build() if proj is not None
              else Matrix.zeros(c.field, c.dim(n), s.dims[n]))
        comps.append(pm @ incls[n])
    truncated = ChainComplex(c.field, ncpx.window,
                             c.dims[: ncpx.window.cutoff + 1],
                             c.diffs[: ncpx.window.cutoff],
                             validate=False)
    cm = ChainMap(ncpx, truncated, comps)
    ok = all(m.rows == m.cols and m.rank() == m.rows for m in comps)
    from .chain import check_chain_map
    v = check_chain_map(cm)
    verdict = Verdict(ok and v.ok,
                      "N K = identity verified" if (ok and v.ok)
                      else f"comparison fails ({v.detail})")
    return cm, verdict


# -- prolongation ----------------------------------------------------------------


def _k_level_objs(cs: Sequence[ChainComplex], level: int) -> tuple[int, ...]:
    return tuple(sum(c.dim(eta[-1]) for eta in level_index(level,
                                                           c.window.cutoff))
                 for c in cs)


def _entry_trust(c: ChainComplex, n: int) -> int:
    """Degree through which c's entries faithfully represent the
    untruncated object: everything for genuinely bounded complexes, the
    stored cutoff for truncated ones."""
    if c.window.trusted_upper == c.window.cutoff:
        return n
    return c.window.cutoff


def _prolong_trusted(window: TruncationWindow,
                     cs: Sequence[ChainComplex]) -> int:
    n = window.cutoff
    through = min([n] + [_entry_trust(c, n) for c in cs])
    return min(window.trusted_upper, through - 1)


def _k_face_mors(cs: Sequence[ChainComplex], level: int, i: int):
    return tuple(DenseLM(_k_structure_matrix(c.dim, c.d, c.field, level,
                                             _coface(level, i),
                                             c.window.cutoff))
                 for c in cs)


def prolong(f: ChainFunctor, cs, window: TruncationWindow | None = None
            ) -> Bicomplex:
    """Apply f to every level and face of K(c) (one complex per slot of f),
    normalize levelwise, and return the anticommuting bicomplex with rows
    indexed by simplicial level and columns by inner degree."""
    if isinstance(cs, ChainComplex):
        cs = (cs,)
    cs = tuple(cs)
    if len(cs) != f.slots:
        raise ShapeMismatch(f"prolong needs one complex per slot ({f.slots})")
    field = f.field
    if window is None:
        window = TruncationWindow.truncated(f.window.cutoff)
    N = window.cutoff
    if f.window.cutoff < N:
        raise WindowExhausted("functor window too small for prolongation")
    values = []   # per level: ChainComplex F(K_level)
    faces = []    # per level: list of chain-map components per face
    for level in range(N + 1):
        objs = _k_level_objs(cs, level)
        values.append(f.value(objs))
        if level >= 1:
            fl = []
            for i in range(level + 1):
                fl.append(f.map(_k_face_mors(cs, level, i)))
            faces.append(fl)
    # levelwise normalized part, inner-degreewise
    incls: list[list[Matrix]] = []
    for level in range(N + 1):
        per_degree = []
        for p in range(N - level + 1):
            if level == 0:
                per_degree.append(Matrix.identity(field, values[0].dim(p)))
            else:
                stacked = vstack([faces[level - 1][i].components[p]
                                  for i in range(1, level + 1)])
                per_degree.append(stacked.kernel_basis())
        incls.append(per_degree)
    dims = {}
    dmats = {}
    emats = {}
    for level in range(N + 1):
        for p in range(N - level + 1):
            dims[(level, p)] = incls[level][p].cols
    for level in range(N + 1):
        for p in range(N - level + 1):
            inc = incls[level][p]
            if p >= 1:
                # inner differential restricted to the normalized part
                image = values[level].d(p) @ inc
                dmats[(level, p)] = solve_exact(incls[level][p - 1], image)
            if level >= 1:
                image = faces[level - 1][0].components[p] @ inc
                emats[(level, p)] = solve_exact(incls[level - 1][p], image)
    w = TruncationWindow(N, _prolong_trusted(window, cs))
    raw = Bicomplex(field, w, dims, dmats, emats, convention="commute")
    return normalize_signs(raw)


def comparison_iota(f: ChainFunctor, c: ChainComplex,
                    window: TruncationWindow | None = None) -> RowSDR:
    """The canonical comparison of the degreewise and Dold-Kan
    prolongations of a strictly reduced functor, as row-wise SDR data.

    Rows are simplicial levels.  The A side is the K-structure applied to
    the degreewise outer complex (levels (+)_eta F(c_k)); the B side is
    F((+)_eta c_k) with Moore differentials.  iota includes summandwise,
    the retraction projects summandwise (cross-effect terms are killed),
    and the row homotopy is an exact contraction of the complement.
    """
    from .chain import ChainHomotopy, identity_chain_map
    from .matrix import block_diag

    field = f.field
    if f.slots != 1:
        raise ShapeMismatch("comparison needs a one-variable functor")
    _check_strictly_reduced(f, (c,))
    if window is None:
        window = TruncationWindow.truncated(f.window.cutoff)
    N = window.cutoff
    cut = c.window.cutoff
    # B side: F(K(c)_p) with Moore verticals
    b_dims = {}
    b_d = {}
    b_e = {}
    b_vals = []
    for p in range(N + 1):
        obj = _k_level_objs((c,), p)[0]
        val = f.value((obj,))
        b_vals.append(val)
        for q in range(N - p + 1):
            b_dims[(p, q)] = val.dim(q)
            if q >= 1:
                b_d[(p, q)] = val.d(q)
    for p in range(1, N + 1):
        fmaps = [f.map(_k_face_mors((c,), p, i)) for i in range(p + 1)]
        for q in range(N - p + 1):
            m = fmaps[0].components[q]
            for i in range(1, p + 1):
                t = fmaps[i].components[q]
                m = m + (t if i % 2 == 0 else -t)
            b_e[(p, q)] = m
    b = normalize_signs(Bicomplex(field, window, b_dims, b_d, b_e,
                                  convention="commute"))
    # A side: (+)_eta F(c_k) with K-structure verticals built from F(d_c)
    a_dims = {}
    a_d = {}
    a_e = {}
    fvals = {k: f.value((c.dim(k),)) for k in range(cut + 1)}
    fbdry = {k: f.map((DenseLM(c.d(k)),)) for k in range(1, cut + 1)}

    def fdim(k):
        return fvals[k]

    for p in range(N + 1):
        idx = level_index(p, cut)
        for q in range(N - p + 1):
            a_dims[(p, q)] = sum(fvals[eta[-1]].dim(q) for eta in idx)
            if q >= 1:
                a_d[(p, q)] = block_diag(field, [fvals[eta[-1]].d(q)
                                                 for eta in idx])
    for p in range(1, N + 1):
        idx = level_index(p, cut)
        tgt_idx = level_index(p - 1, cut)
        for q in range(N - p + 1):
            acc = None
            for i in range(p + 1):
                m = _k_structure_matrix(
                    lambda k: fvals[k].dim(q),
                    lambda k: fbdry[k].components[q],
                    field, p, _coface(p, i), cut)
                if acc is None:
                    acc = m
                else:
                    acc = acc + (m if i % 2 == 0 else -m)
            a_e[(p, q)] = acc
    a = normalize_signs(Bicomplex(field, window, a_dims, a_d, a_e,
                                  convention="commute"))
    # iota / retraction, summandwise
    iota = {}
    fmat = {}
    for p in range(N + 1):
        idx = level_index(p, cut)
        obj = _k_level_objs((c,), p)[0]
        offs = []
        off = 0
        for eta in idx:
            offs.append(off)
            off += c.dim(eta[-1])
        incl_maps = []
        proj_maps = []
        for eta, o in zip(idx, offs):
            k = eta[-1]
            sel_in = Matrix.selection_incl(field, obj,
                                           range(o, o + c.dim(k)))
            sel_pr = Matrix.selection_proj(field, obj,
                                           range(o, o + c.dim(k)))
            incl_maps.append(f.map((DenseLM(sel_in),)))
            proj_maps.append(f.map((DenseLM(sel_pr),)))
        for q in range(N - p + 1):
            if incl_maps:
                iota[(p, q)] = hstack([m.components[q] for m in incl_maps])
                fmat[(p, q)] = vstack([m.components[q] for m in proj_maps])
            else:
                iota[(p, q)] = Matrix.zeros(field, b.dim(p, q), 0)
                fmat[(p, q)] = Matrix.zeros(field, 0, b.dim(p, q))
    # row homotopies: contract the complement of the summand image
    from .chain import split_idempotent_chain
    s = {}
    for p in range(N + 1):
        top = N - p
        row_dims = [b.dim(p, q) for q in range(top + 1)]
        row_diffs = [b.d(p, q) for q in range(1, top + 1)]
        row = ChainComplex(field, TruncationWindow.bounded(top),
                           row_dims, row_diffs, validate=False)
        comp_idem = [Matrix.identity(field, row_dims[q])
                     - iota[(p, q)] @ fmat[(p, q)] for q in range(top + 1)]
        e = ChainMap(row, row, comp_idem)
        sub, incl, proj = split_idempotent_chain(row, e)
        h = contraction_of_exact(sub)
        for q in range(top):
            s[(p, q)] = incl.components[q + 1] @ h[q] @ proj.components[q]
    return RowSDR(a, b, iota, fmat, s)


class KleisliCF(ChainFunctor):
    """Composite F o (G_1, ..., G_k): prolong F along the values of the
    G_i and totalize.  One inner functor per slot of F; all inner functors
    share a common domain."""

    def __init__(self, f: ChainFunctor, gs: Sequence[ChainFunctor]):
        gs = tuple(gs)
        if len(gs) != f.slots:
            raise ShapeMismatch("need one inner functor per outer slot")
        for g in gs:
            if g.groups != gs[0].groups or g.field != f.field:
                raise ShapeMismatch("inner functors must share a domain")
        self.f = f
        self.gs = gs
        self.field = f.field
        self.groups = gs[0].groups
        cut = min([f.window.cutoff] + [g.window.cutoff for g in gs])
        trusted = min([cut - 1] + [g.window.trusted_upper for g in gs])
        self.window = TruncationWindow(cut, max(trusted, -1))
        self._bicx: dict = {}

    def bicomplex_at(self, objs) -> Bicomplex:
        objs = self.check_objs(objs)
        out = self._bicx.get(objs)
        if out is None:
            cs = tuple(g.value(objs) for g in self.gs)
            out = prolong(self.f, cs,
                          TruncationWindow(self.window.cutoff,
                                           self.window.trusted_upper))
            self._bicx[objs] = out
        return out

    def _lazy_value(self, objs):
        t = tot(self.bicomplex_at(objs))
        return LazyComplex(self.field, t.window, t.dims,
                           [lazy(t.d(k)) for k in range(1, t.window.cutoff + 1)])

    def _lazy_map(self, mors):
        src = tuple(m.cols for m in mors)
        tgt = tuple(m.rows for m in mors)
        N = self.window.cutoff
        cs_s = tuple(g.value(src) for g in self.gs)
        cs_t = tuple(g.value(tgt) for g in self.gs)
        gmaps = [g.map(mors) for g in self.gs]
        # induced map on K levels: blockwise over surjection summands
        out_blocks: dict[int, dict] = {}
        incl_s = _prolong_incls(self.f, cs_s, N)
        incl_t = _prolong_incls(self.f, cs_t, N)
        per_cell: dict = {}
        for level in range(N + 1):
            kmors = []
            for j, g in enumerate(self.gs):
                kmors.append(DenseLM(_k_chain_map_matrix(
                    cs_s[j], cs_t[j], gmaps[j], level)))
            fmap = self.f.map(tuple(kmors))
            for p in range(N - level + 1):
                image = fmap.components[p] @ incl_s[level][p]
                per_cell[(level, p)] = solve_exact(incl_t[level][p], image)
        # assemble Tot components (blocks ordered by decreasing level)
        comps = []
        for n in range(N + 1):
            rows = []
            cols = []
            blocks = {}
            for i, level in enumerate(range(n, -1, -1)):
                p = n - level
                rows.append(incl_t[level][p].cols)
                cols.append(incl_s[level][p].cols)
                blocks[(i, i)] = lazy(per_cell[(level, p)])
            from .lazymat import BlockLM
            comps.append(BlockLM(self.field, rows, cols, blocks))
        return comps


def _k_chain_map_matrix(c_src: ChainComplex, c_tgt: ChainComplex,
                        gmap: ChainMap, level: int) -> Matrix:
    """K applied to a chain map, at one simplicial level (blockwise)."""
    field = c_src.field
    src_idx = level_index(level, c_src.window.cutoff)
    tgt_idx = level_index(level, c_tgt.window.cutoff)
    tpos = {}
    off = 0
    for eta in tgt_idx:
        tpos[eta] = off
        off += c_tgt.dim(eta[-1])
    rows = off
    cols = sum(c_src.dim(eta[-1]) for eta in src_idx)
    out = MatrixBuilder(field, rows, cols)
    soff = 0
    for eta in src_idx:
        k = eta[-1]
        dim = c_src.dim(k)
        if dim and eta in tpos:
            out.add_block(tpos[eta], soff, gmap.components[k])
        soff += dim
    return out.build()


def _prolong_incls(f: ChainFunctor, cs, N: int) -> list[list[Matrix]]:
    """Normalized-part inclusions per (level, inner degree), cached on f."""
    key = ("prolong-incl", tuple(cs), N)
    cache = getattr(f, "_prolong_cache", None)
    if cache is None:
        cache = f._prolong_cache = {}
    out = cache.get(key)
    if out is not None:
        return out
    field = f.field
    out = []
    for level in range(N + 1):
        per_degree = []
        objs = _k_level_objs(cs, level)
        val = f.value(objs)
        if level == 0:
            per_degree = [Matrix.identity(field, val.dim(p))
                          for p in range(N + 1)]
        else:
            fmaps = [f.map(_k_face_mors(cs, level, i))
                     for i in range(1, level + 1)]
            for p in range(N - level + 1):
                stacked = vstack([fm.components[p] for fm in fmaps])
                per_degree.append(stacked.kernel_basis())
        out.append(per_degree)
    cache[key] = out
    return out


def kleisli_compose(f: ChainFunctor, g) -> ChainFunctor:
    """Composition in the chain-valued world: Tot of the prolongation of f
    along g (or along a tuple of inner functors, one per slot of f)."""
    gs = (g,) if isinstance(g, ChainFunctor) else tuple(g)
    return _cached(("kleisli", f.ckey) + tuple(x.ckey for x in gs),
                   lambda: KleisliCF(f, gs))


def _check_strictly_reduced(f: ChainFunctor, cs: Sequence[ChainComplex]):
    zero_objs = (0,) * f.slots
    if f.value(zero_objs).total_dim() != 0:
        raise NotStrictlyReduced("F(0) != 0")
    zmors = tuple(DenseLM(Matrix.zeros(f.field, c.dim(0), c.dim(0)))
                  for c in cs)
    if not all(m.is_zero() for m in f.map(zmors).components):
        raise NotStrictlyReduced("F of a zero map is nonzero")


def prolong_simple(f: ChainFunctor, cs, window: TruncationWindow | None = None
                   ) -> Bicomplex:
    """Degreewise application of a strictly reduced functor: row q of the
    bicomplex is F(c_q) with vertical maps F(boundary)."""
    if isinstance(cs, ChainComplex):
        cs = (cs,)
    cs = tuple(cs)
    field = f.field
    if window is None:
        window = TruncationWindow.truncated(f.window.cutoff)
    N = window.cutoff
    _check_strictly_reduced(f, cs)
    rows = min(N, max((c.window.cutoff for c in cs), default=0))
    dims = {}
    dmats = {}
    emats = {}
    values = []
    for q in range(min(rows, N) + 1):
        objs = tuple(c.dim(q) for c in cs)
        values.append(f.value(objs))
        for p in range(N - q + 1):
            dims[(q, p)] = values[q].dim(p)
    for q in range(min(rows, N) + 1):
        bdry = None
        if q >= 1:
            bdry = f.map(tuple(DenseLM(c.d(q)) for c in cs))
        for p in range(N - q + 1):
            if p >= 1:
                dmats[(q, p)] = values[q].d(p)
            if q >= 1:
                emats[(q, p)] = bdry.components[p]
    w = TruncationWindow(N, _prolong_trusted(window, cs))
    raw = Bicomplex(field, w, dims, dmats, emats, convention="commute")
    return normalize_signs(raw)
