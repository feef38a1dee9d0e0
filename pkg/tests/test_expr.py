import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afc.errors import ArityMismatch, NotApplicable
from afc.expr import (
    Compose, Const, ExprLM, Ext2, Sum, Sym2, Tensor, Var, add_constant,
    eval_mor, eval_obj, tensor_square, validate_expr,
)
from afc.fields import GF2, QQ, GF
from afc.lazymat import BlockDiagLM, DenseLM, lazy
from afc.matrix import Matrix


def rand_matrix(rng, field, rows, cols):
    span = field.characteristic if field.characteristic else 7
    return Matrix.from_rows(field, [[rng.randrange(span) for _ in range(cols)]
                                    for _ in range(rows)]) if rows else \
        Matrix.zeros(field, rows, cols)


def test_eval_obj_examples():
    assert eval_obj(tensor_square(), (2,)) == 4
    assert eval_obj(Const(3), (5,)) == 3
    assert eval_obj(add_constant(1), (2,)) == 3
    diag_tensor = Compose(Tensor(Var(0), Var(1)), (Var(0), Var(0)))
    for d in range(4):
        assert eval_obj(diag_tensor, (d,)) == eval_obj(tensor_square(), (d,))


def test_eval_obj_arity_errors():
    with pytest.raises(ArityMismatch):
        eval_obj(Var(1), (2,))


def test_eval_mor_identity_to_identity():
    for e in [tensor_square(), add_constant(2), Sym2(Var(0)), Ext2(Var(0))]:
        m = eval_mor(e, QQ, [Matrix.identity(QQ, 3)])
        assert m == Matrix.identity(QQ, eval_obj(e, (3,)))


def test_eval_mor_tensor_zero_map():
    z = Matrix.zeros(QQ, 2, 2)
    assert eval_mor(tensor_square(), QQ, [z]).is_zero()


def test_sum_const_on_zero_morphism_idempotent():
    # F = A (+) X with dim A = 1; F(X -> 0 -> X) has rank 1 (the constant part)
    f = add_constant(1)
    z = Matrix.zeros(QQ, 2, 2)
    m = eval_mor(f, QQ, [z])
    assert m @ m == m
    assert m.rank() == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 977),
       st.sampled_from([QQ, GF2, GF(3)]))
def test_functoriality_on_random_morphisms(a, b, seed, field):
    rng = random.Random(seed)
    exprs = [tensor_square(), add_constant(2), Ext2(Var(0)),
             Compose(Tensor(Var(0), Var(1)), (Var(0), Var(0)))]
    if field.characteristic != 2:
        exprs.append(Sym2(Var(0)))
    g = rand_matrix(rng, field, a, b)
    h = rand_matrix(rng, field, b, 3)
    for e in exprs:
        lhs = eval_mor(e, field, [g @ h])
        rhs = eval_mor(e, field, [g]) @ eval_mor(e, field, [h])
        assert lhs == rhs, e


def test_sym2_rejected_in_char2():
    with pytest.raises(NotApplicable):
        validate_expr(Sym2(Var(0)), GF2)


def test_ext2_dimensions_and_char2():
    assert eval_obj(Ext2(Var(0)), (4,)) == 6
    g = Matrix.from_rows(GF2, [[1, 1], [0, 1]])
    m = eval_mor(Ext2(Var(0)), GF2, [g])
    assert m == Matrix.identity(GF2, 1)  # det of g is 1


def test_lazy_extract_matches_dense():
    rng = random.Random(5)
    g = rand_matrix(rng, QQ, 3, 2)
    lm = ExprLM(tensor_square(), QQ, [lazy(g)])
    dense = lm.dense()
    rows = [0, 4, 7, 2]
    cols = [3, 0, 1]
    assert lm.extract(rows, cols) == dense.submatrix(rows, cols)


def test_lazy_extract_factored_kron_path():
    rng = random.Random(6)
    g = rand_matrix(rng, GF2, 4, 4)
    lm = ExprLM(tensor_square(), GF2, [lazy(g)])
    # product-shaped index set: rows {0,2} x {1,3}, cols {1} x {0,2}
    rows = [0 * 4 + 1, 0 * 4 + 3, 2 * 4 + 1, 2 * 4 + 3]
    cols = [1 * 4 + 0, 1 * 4 + 2]
    assert lm.extract(rows, cols) == lm.dense().submatrix(rows, cols)


def test_lazy_blockdiag_tower():
    rng = random.Random(7)
    g = rand_matrix(rng, GF2, 2, 2)
    tower = BlockDiagLM([lazy(g)] * 4)  # g (+) g (+) g (+) g
    lm = ExprLM(tensor_square(), GF2, [tower])
    assert lm.rows == 64 and lm.cols == 64
    # spot-check entries against the explicit kron
    big = Matrix.from_rows(
        GF2, [[g.entry(i % 2, j % 2) if i // 2 == j // 2 else 0
               for j in range(8)] for i in range(8)])
    full = big.kron(big)
    for (i, j) in [(0, 0), (5, 5), (11, 3), (63, 63), (17, 20)]:
        assert lm.entry(i, j) == full.entry(i, j)
