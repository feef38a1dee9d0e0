"""Deterministic seeded generators for test and scenario instances.

Random complexes are conjugated sums of elementary strips, so homology is
known by construction.  Seeded row-wise SDR instances are built as

    A = P (x) Q        (tensor bicomplex of two random complexes)
    B = A (+) P (x) cone(id on Q')

with s the canonical cone contraction tensored along P, iota the summand
inclusion, and f the projection.  This satisfies s iota = 0 and
ds + sd = 1 - iota f on the nose, with nonzero vertical differentials on
the complement so the (-es)-powers in the retraction are exercised.
An optional shear by a random chain map cone -> Q makes iota non-obvious
while preserving every identity.
"""

from __future__ import annotations

import random

from .bicomplex import (
    Bicomplex, RowSDR, cone_of_identity, direct_sum_bicomplex, tensor_bicomplex,
    normalize_signs,
)
from .chain import ChainComplex, TruncationWindow
from .fields import Field
from .matrix import Matrix, MatrixBuilder, block_diag, hstack, solve_exact


def tensor_tricomplex(p_cpx: ChainComplex, q_cpx: ChainComplex,
                      r_cpx: ChainComplex):
    """Triple tensor T = P (x) Q (x) R with the usual anticommuting signs."""
    from .bicomplex import Tricomplex

    field = p_cpx.field
    window = TruncationWindow.bounded(p_cpx.window.cutoff + q_cpx.window.cutoff
                                      + r_cpx.window.cutoff)
    dims = {}
    d1 = {}
    d2 = {}
    d3 = {}
    for p in range(p_cpx.window.cutoff + 1):
        for q in range(q_cpx.window.cutoff + 1):
            for r in range(r_cpx.window.cutoff + 1):
                dims[(p, q, r)] = (p_cpx.dim(p) * q_cpx.dim(q) * r_cpx.dim(r))
                iq = Matrix.identity(field, q_cpx.dim(q))
                ir = Matrix.identity(field, r_cpx.dim(r))
                ip = Matrix.identity(field, p_cpx.dim(p))
                if p >= 1:
                    d1[(p, q, r)] = p_cpx.d(p).kron(iq).kron(ir)
                if q >= 1:
                    m = ip.kron(q_cpx.d(q)).kron(ir)
                    d2[(p, q, r)] = -m if p % 2 == 1 else m
                if r >= 1:
                    m = ip.kron(iq).kron(r_cpx.d(r))
                    d3[(p, q, r)] = -m if (p + q) % 2 == 1 else m
    return Tricomplex(field, window, dims, d1, d2, d3)


def random_invertible(rng: random.Random, field: Field, n: int) -> Matrix:
    """Unit lower-triangular times unit upper-triangular times permutation."""
    if n == 0:
        return Matrix.identity(field, 0)
    span = field.characteristic if field.characteristic else 5

    def unit_tri(lower: bool) -> Matrix:
        b = MatrixBuilder(field, n, n)
        for i in range(n):
            b.set(i, i, 1)
            rng_range = range(i) if lower else range(i + 1, n)
            for j in rng_range:
                b.set(i, j, rng.randrange(span) - (0 if field.characteristic else 2))
        return b.build()

    perm = list(range(n))
    rng.shuffle(perm)
    pm = Matrix.selection_incl(field, n, perm)
    return unit_tri(True) @ unit_tri(False) @ pm


def random_complex(rng: random.Random, field: Field, top: int,
                   max_dim: int) -> ChainComplex:
    """Conjugated direct sum of elementary strips 0 -> F -> F -> 0."""
    window = TruncationWindow.bounded(top)
    dims = [rng.randrange(max_dim + 1) for _ in range(top + 1)]
    # elementary identity strips between consecutive degrees
    strips = [min(dims[k], dims[k - 1], rng.randrange(max_dim + 1))
              for k in range(1, top + 1)]
    # avoid overlapping strips competing for the same coordinates
    for k in range(1, top):
        if strips[k] + strips[k - 1] > dims[k]:
            strips[k] = max(dims[k] - strips[k - 1], 0)
    diffs = []
    for k in range(1, top + 1):
        m = MatrixBuilder(field, dims[k - 1], dims[k])
        # the strip occupying the first coordinates of degree k maps to the
        # last coordinates of degree k-1, clearing the d^2 = 0 overlap
        for t in range(strips[k - 1]):
            m.set(dims[k - 1] - 1 - t, t, 1)
        diffs.append(m.build())
    cpx = ChainComplex(field, window, dims, diffs)
    # conjugate by random invertibles to hide the elementary structure
    gs = [random_invertible(rng, field, dims[k]) for k in range(top + 1)]
    ginv = [solve_exact(g, Matrix.identity(field, g.rows)) for g in gs]
    newdiffs = [ginv[k - 1] @ cpx.d(k) @ gs[k] for k in range(1, top + 1)]
    return ChainComplex(field, window, dims, newdiffs)


def seeded_row_sdr(rng: random.Random, field: Field, rows: int, cols: int,
                   max_dim: int, shear: bool = True) -> RowSDR:
    """A verified random RowSDR instance (see module docstring)."""
    from .chain import pad_bounded

    p_cpx = random_complex(rng, field, rows, max_dim)
    q_cpx = random_complex(rng, field, max(cols - 1, 0), max_dim)
    # keep the cone's top degree inside the window so it stays exact there
    qq = pad_bounded(random_complex(rng, field, max(cols - 2, 0), max_dim),
                     max(cols - 1, 0))
    cone, h = cone_of_identity(qq)
    a = normalize_signs(tensor_bicomplex(p_cpx, q_cpx))
    c = normalize_signs(tensor_bicomplex(p_cpx, cone))
    b = direct_sum_bicomplex(a, c)
    iota = {}
    f = {}
    s = {}
    for (p, q) in b.cells():
        na = a.dim(p, q)
        nc = c.dim(p, q)
        ii = MatrixBuilder(field, na + nc, na)
        ii.add_block(0, 0, Matrix.identity(field, na))
        iota[(p, q)] = ii.build()
        ff = MatrixBuilder(field, na, na + nc)
        ff.add_block(0, 0, Matrix.identity(field, na))
        f[(p, q)] = ff.build()
        # s = 0 (+) (1_P (x) h), with the sign flip of odd rows applied to
        # keep ds + sd = 1 - iota f after normalize_signs negates d there
        hq = h[q] if q < len(h) else Matrix.zeros(field, cone.dim(q + 1),
                                                  cone.dim(q))
        sc = Matrix.identity(field, p_cpx.dim(p)).kron(hq)
        if p % 2 == 1:
            sc = -sc
        sm = MatrixBuilder(field, b.dim(p, q + 1), b.dim(p, q))
        sm.add_block(a.dim(p, q + 1), na, sc)
        s[(p, q)] = sm.build()
    sdr = RowSDR(a, b, iota, f, s)
    if not shear:
        return sdr
    # conjugate B cellwise by the shear [[1, t],[0, 1]] for random blocks
    # t : C_{p,q} -> A_{p,q}; any degreewise isomorphism transports all of
    # the SDR identities, so this hides the plain direct-sum structure
    span = field.characteristic if field.characteristic else 5
    g = {}
    ginv = {}
    for (p, q) in b.cells():
        na, nc = a.dim(p, q), c.dim(p, q)
        if na and nc:
            tc = Matrix.from_rows(field, [[rng.randrange(span)
                                           for _ in range(nc)]
                                          for _ in range(na)])
        else:
            tc = Matrix.zeros(field, na, nc)
        gb = MatrixBuilder(field, na + nc, na + nc)
        gb.add_block(0, 0, Matrix.identity(field, na))
        gb.add_block(0, na, tc)
        gb.add_block(na, na, Matrix.identity(field, nc))
        g[(p, q)] = gb.build()
        gi = MatrixBuilder(field, na + nc, na + nc)
        gi.add_block(0, 0, Matrix.identity(field, na))
        gi.add_block(0, na, -tc)
        gi.add_block(na, na, Matrix.identity(field, nc))
        ginv[(p, q)] = gi.build()
    newd = {}
    newe = {}
    for (p, q) in b.cells():
        if q >= 1:
            newd[(p, q)] = g[(p, q - 1)] @ b.d(p, q) @ ginv[(p, q)]
        if p >= 1:
            newe[(p, q)] = g[(p - 1, q)] @ b.e(p, q) @ ginv[(p, q)]
    b2 = Bicomplex(field, b.window, b.dims, newd, newe,
                   convention="anticommute")
    iota2 = {k: g[k] @ iota[k] for k in iota}
    f2 = {k: f[k] @ ginv[k] for k in f}
    s2 = {k: g[(k[0], k[1] + 1)] @ s[k] @ ginv[k]
          if (k[0], k[1] + 1) in g else s[k] for k in s}
    return RowSDR(a, b2, iota2, f2, s2)
