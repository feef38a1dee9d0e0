import random

import pytest

from afc.chain import (
    ChainHomotopy, TruncationWindow, check_chain_map, check_homotopy,
    compare_homology, identity_chain_map, zero_chain_map,
)
from afc.errors import ArityMismatch, NotApplicable
from afc.expr import Ext2, Var, add_constant, tensor_cube, tensor_square
from afc.fields import GF2, QQ
from afc.functors import (
    ChainFunctor, comonad_counit, comonad_functor, contraction_splittings,
    cr_symmetry_iso, cross_effect, cross_effect_functor, expr_functor,
    linearize_d1, p0_functor, poly_functor, poly_inclusion,
    poly_projection_nat, resolution_column, _resolution,
)
from afc.matrix import Matrix

W4 = TruncationWindow.bounded(4)


def F(expr, field=QQ, w=W4):
    return expr_functor(expr, field, w)


def rand_matrix(rng, field, rows, cols):
    span = field.characteristic if field.characteristic else 5
    if rows == 0 or cols == 0:
        return Matrix.zeros(field, rows, cols)
    return Matrix.from_rows(field, [[rng.randrange(span) for _ in range(cols)]
                                    for _ in range(rows)])


# -- cross effects -----------------------------------------------------------


def test_cr2_of_add_constant_vanishes():
    ce = cross_effect(add_constant(2), 2, (2, 2), QQ, W4)
    assert ce.dim == 0


def test_cr2_of_tensor_square_dimension():
    for a, b in [(1, 1), (1, 2), (2, 2)]:
        ce = cross_effect(tensor_square(), 2, (a, b), QQ, W4)
        assert ce.dim == 2 * a * b
        assert ce.summand.proj @ ce.summand.incl == Matrix.identity(QQ, ce.dim)
        e = ce.summand.incl @ ce.summand.proj
        assert e @ e == e


def test_cr1_at_zero_vanishes():
    ce = cross_effect(tensor_square(), 1, (0,), QQ, W4)
    assert ce.dim == 0


def test_strict_multireducedness():
    for expr in [tensor_square(), tensor_cube(), add_constant(1), Ext2(Var(0))]:
        for args in [(0, 2), (2, 0)]:
            assert cross_effect(expr, 2, args, QQ, W4).dim == 0


def test_decomposition_audit_n2_and_n3():
    for expr in [tensor_square(), tensor_cube(), add_constant(2), Ext2(Var(0))]:
        f = F(expr)
        cr1 = cross_effect_functor(f, 0, 1)
        cr2 = cross_effect_functor(f, 0, 2)
        cr3 = cross_effect_functor(f, 0, 3)
        for (x, y) in [(1, 1), (1, 2), (2, 2)]:
            total = f.value((x + y,)).dims[0]
            parts = (f.value((0,)).dims[0] + cr1.value((x,)).dims[0]
                     + cr1.value((y,)).dims[0] + cr2.value((x, y)).dims[0])
            assert total == parts, expr
        # ternary audit: F(x+y+z) = sum over nonempty subsets + F(0)
        x, y, z = 1, 1, 2
        total = f.value((x + y + z,)).dims[0]
        parts = f.value((0,)).dims[0]
        for args in [(x,), (y,), (z,)]:
            parts += cr1.value(args).dims[0]
        for args in [(x, y), (x, z), (y, z)]:
            parts += cr2.value(args).dims[0]
        parts += cr3.value((x, y, z)).dims[0]
        assert total == parts, expr


def test_functoriality_of_induced_maps():
    rng = random.Random(17)
    f = F(tensor_square(), GF2)
    cr2 = cross_effect_functor(f, 0, 2)
    a1, b1 = 2, 1
    g = (rand_matrix(rng, GF2, 2, a1), rand_matrix(rng, GF2, 2, b1))
    h = (rand_matrix(rng, GF2, a1, 2), rand_matrix(rng, GF2, b1, 1))
    lhs = cr2.map((g[0] @ h[0], g[1] @ h[1]))
    rhs = cr2.map(g).compose(cr2.map(h))
    assert lhs.components == rhs.components
    ident = cr2.map((Matrix.identity(GF2, 2), Matrix.identity(GF2, 2)))
    assert ident.components[0] == Matrix.identity(GF2, ident.source.dims[0])


def test_cr_idempotency_iso():
    # canonical comparison cr_n(cr_1 f) -> cr_n(f) is an exact isomorphism
    from afc.functors import cross_effect_nat, reduced_inclusion_nat

    for expr in [tensor_square(), add_constant(2)]:
        f = F(expr)
        incl = reduced_inclusion_nat(f, 0)
        for n in (1, 2, 3):
            comparison = cross_effect_nat(incl, 0, n)
            for args in [(1,) * n, (2,) + (1,) * (n - 1)]:
                cm = comparison.chain_map(args)
                assert check_chain_map(cm).ok
                m = cm.components[0]
                assert m.rows == m.cols and m.rank() == m.rows, (expr, n, args)


def test_cr_symmetry_iso_square_is_identity_perm():
    iso = cr_symmetry_iso(tensor_square(), 2, (1, 2), (0, 1), QQ, W4)
    assert iso == Matrix.identity(QQ, 4)


def test_cr_symmetry_iso_swap_involution():
    iso = cr_symmetry_iso(tensor_square(), 2, (2, 2), (1, 0), QQ, W4)
    assert iso.rows == iso.cols == 8
    back = cr_symmetry_iso(tensor_square(), 2, (2, 2), (1, 0), QQ, W4)
    # same dims: swapping twice gives the identity
    assert back @ iso == Matrix.identity(QQ, 8)


def test_cr_symmetry_vanishing_cross_effect():
    iso = cr_symmetry_iso(add_constant(1), 2, (1, 2), (1, 0), QQ, W4)
    assert iso.rows == 0 and iso.cols == 0


def test_exactness_additivity_on_split_exact_sequences():
    # 0 -> F -> F (+) G -> G -> 0 degreewise split: cross effects add
    from afc.expr import Sum
    f_expr, g_expr = tensor_square(), add_constant(1)
    s_expr = Sum(f_expr, g_expr)
    for n, args in [(1, (2,)), (2, (1, 2))]:
        dims = [cross_effect(e, n, args, QQ, W4).dim
                for e in (f_expr, g_expr, s_expr)]
        assert dims[0] + dims[1] == dims[2]


# -- comonad and counit --------------------------------------------------------


def test_counit_n1_is_reduced_inclusion():
    eps = comonad_counit(tensor_square(), 1, 2, QQ, W4)
    f = F(tensor_square())
    cr1 = cross_effect_functor(f, 0, 1)
    assert eps.cols == cr1.value((2,)).dims[0]
    assert eps.rows == f.value((2,)).dims[0]
    assert eps.rank() == eps.cols  # split injection


def test_counit_constant_functor_zero():
    from afc.expr import Const
    eps = comonad_counit(Const(3), 2, 2, QQ, W4)
    assert eps.cols == 0 and eps.rows == 3


def test_counit_c2_tensor_square_rank():
    # C_2(ts)(k) at dim 1: 2-dimensional cross effect folding onto x (x) x
    eps = comonad_counit(tensor_square(), 2, 1, QQ, W4)
    assert eps.cols == 2 and eps.rows == 1
    assert eps.rank() == 1


def test_contraction_splittings_and_column():
    f = F(tensor_square(), GF2, TruncationWindow.bounded(3))
    col, esses = resolution_column(f, 2, 1, 3)
    # ds + sd = 1 on the column (a contraction)
    h = ChainHomotopy(identity_chain_map(col), zero_chain_map(col, col), esses)
    assert check_homotopy(h).ok
    # bottom: d1 s0 = 1 (section of the counit)
    assert col.d(1) @ esses[0] == Matrix.identity(GF2, col.dims[0])


def test_contraction_splittings_not_applicable():
    f = F(tensor_square())
    two_slot = cross_effect_functor(f, 0, 2)
    with pytest.raises(NotApplicable):
        contraction_splittings(two_slot, 2, 1, 0)


# -- resolutions ---------------------------------------------------------------


def test_d1_add_constant_is_identity_functor():
    d1 = linearize_d1(F(add_constant(3)), 0)
    v = d1.value((2,))
    assert v.dims[0] == 2 and all(d == 0 for d in v.dims[1:])
    assert v.homology_dims() == (2, 0, 0, 0)


def test_d1_constant_is_zero():
    from afc.expr import Const
    d1 = linearize_d1(F(Const(4)), 0)
    assert d1.value((2,)).total_dim() == 0


def test_d1_tensor_square_dims_doubling():
    d1 = linearize_d1(F(tensor_square()), 0)
    for d in (1, 2):
        v = d1.value((d,))
        assert v.dims == tuple(d * d * (2 ** max(k - 0, 0)) if k else d * d
                               for k in range(5))[:5]
        assert v.dims == (d * d, 2 * d * d, 4 * d * d, 8 * d * d, 16 * d * d)


def test_d1_equals_p1_of_reduced_part():
    f = F(tensor_square())
    d1 = linearize_d1(f, 0)
    cr1 = cross_effect_functor(f, 0, 1)
    p1r = poly_functor(cr1, 0, 1)
    for d in (1, 2):
        a = d1.value((d,))
        b = p1r.value((d,))
        assert a.dims == b.dims
        assert compare_homology(a, b).equal


def test_pn_add_constant_examples():
    g = F(add_constant(1))
    p1 = poly_functor(g, 0, 1)
    v = p1.value((2,))
    assert v.dims == (3, 0, 0, 0, 0)
    p2 = poly_functor(g, 0, 2)
    assert p2.value((2,)).homology_dims() == (3, 0, 0, 0)
    p0 = p0_functor(g, 0)
    assert p0.value((2,)).homology_dims() == (1, 0, 0, 0, 0)


def test_p1_identity_inclusion_is_homology_equivalence():
    ident = F(Var(0))
    p1 = poly_functor(ident, 0, 1)
    pn = poly_inclusion(_resolution(ident, 0, "pn", 2), (2,))
    assert check_chain_map(pn).ok
    assert compare_homology(ident.value((2,)), p1.value((2,))).equal


def test_q1_projection_is_chain_map():
    f = F(add_constant(1))
    p2 = _resolution(f, 0, "pn", 3)
    p1 = _resolution(f, 0, "pn", 2)
    qn = poly_projection_nat(p2, p1)
    cm = qn.chain_map((2,))
    assert check_chain_map(cm).ok
    # q_n after p_n equals p_{n-1}
    inc2 = poly_inclusion(p2, (2,))
    inc1 = poly_inclusion(p1, (2,))
    assert cm.compose(inc2).components == inc1.components


def test_p1_tensor_square_is_degree_one():
    f = F(tensor_square(), GF2, TruncationWindow.bounded(4))
    p1 = poly_functor(f, 0, 1)
    c2 = comonad_functor(p1, 0, 2)
    for d in (1, 2):
        assert all(h == 0 for h in c2.value((d,)).homology_dims())
    # while ts itself is not degree 1: cr_2 has dimension 2ab > 0
    c2f = comonad_functor(f, 0, 2)
    assert c2f.value((1,)).homology_dims()[0] == 2


def test_functor_map_on_resolution_is_chain_map():
    rng = random.Random(3)
    d1 = linearize_d1(F(tensor_square(), GF2), 0)
    g = rand_matrix(rng, GF2, 2, 1)
    cm = d1.map((g,))
    assert check_chain_map(cm).ok
    ident = d1.map((Matrix.identity(GF2, 2),))
    for k, c in enumerate(ident.components):
        assert c == Matrix.identity(GF2, c.rows), k
