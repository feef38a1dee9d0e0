from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afc.errors import FieldError, NotIdempotent
from afc.fields import GF, GF2, QQ, Field, parse_field
from afc.matrix import (
    Matrix, block_diag, diag01_support, hstack, solve_exact, split_idempotent,
    vstack,
)

FIELDS = [QQ, GF2, GF(5)]


def M(field, rows):
    return Matrix.from_rows(field, rows)


def test_field_validation():
    with pytest.raises(FieldError):
        Field(4)
    assert parse_field("q") == QQ
    assert parse_field("fp:7") == GF(7)
    with pytest.raises(FieldError):
        parse_field("fp:9")


def test_zero_by_n_matrices_are_legal():
    for f in FIELDS:
        a = Matrix.zeros(f, 0, 3)
        b = Matrix.zeros(f, 3, 0)
        assert (a @ b).rows == 0 and (a @ b).cols == 0
        prod = b @ a
        assert prod == Matrix.zeros(f, 3, 3)


@pytest.mark.parametrize("field", FIELDS)
def test_matmul_and_kron_agree_with_defs(field):
    a = M(field, [[1, 2], [3, 4]])
    b = M(field, [[0, 1], [1, 1]])
    ab = a @ b
    for i in range(2):
        for j in range(2):
            want = field.add(field.mul(a.entry(i, 0), b.entry(0, j)),
                             field.mul(a.entry(i, 1), b.entry(1, j)))
            assert ab.entry(i, j) == want
    k = a.kron(b)
    assert k.rows == 4 and k.cols == 4
    for i1 in range(2):
        for i2 in range(2):
            for j1 in range(2):
                for j2 in range(2):
                    assert k.entry(i1 * 2 + i2, j1 * 2 + j2) == field.mul(
                        a.entry(i1, j1), b.entry(i2, j2))


def test_kernel_zero_map_is_identity_basis():
    for f in FIELDS:
        z = Matrix.zeros(f, 2, 3)
        assert z.kernel_basis() == Matrix.identity(f, 3)


def test_kernel_identity_is_empty():
    for f in FIELDS:
        assert Matrix.identity(f, 2).kernel_basis().cols == 0


def test_kernel_gf2_example():
    # enumerate all 8 vectors of F_2^3: only (1,1,1) and 0 are in the kernel
    m = M(GF2, [[1, 1, 0], [0, 1, 1]])
    brute = [v for v in range(8)
             if all(sum((v >> j) & 1 for j in cols) % 2 == 0
                    for cols in [(0, 1), (1, 2)])]
    assert brute == [0, 0b111]
    k = m.kernel_basis()
    assert k.cols == 1
    assert [k.entry(i, 0) for i in range(3)] == [1, 1, 1]


def test_image_basis_examples():
    assert Matrix.zeros(QQ, 2, 2).image_basis().cols == 0
    assert Matrix.identity(QQ, 3).image_basis() == Matrix.identity(QQ, 3)
    m = M(GF2, [[1, 1], [1, 1]])
    b = m.image_basis()
    assert b.cols == 1 and [b.entry(i, 0) for i in range(2)] == [1, 1]


def test_split_idempotent_zero_and_identity():
    for f in FIELDS:
        s0 = split_idempotent(Matrix.zeros(f, 3, 3))
        assert s0.dim == 0
        s0.validate()
        s1 = split_idempotent(Matrix.identity(f, 3))
        assert s1.dim == 3
        assert s1.incl == Matrix.identity(f, 3)
        assert s1.proj == Matrix.identity(f, 3)


def test_split_idempotent_gf2_example():
    e = M(GF2, [[1, 1], [0, 0]])
    assert e @ e == e and e.rank() == 1
    s = split_idempotent(e)
    s.validate()
    assert s.dim == 1
    assert s.incl @ s.proj == e


def test_split_idempotent_rejects_non_idempotent():
    with pytest.raises(NotIdempotent):
        split_idempotent(M(QQ, [[0, 1], [0, 0]]))
    with pytest.raises(NotIdempotent):
        split_idempotent(Matrices_nonsquare())


def Matrices_nonsquare():
    return Matrix.zeros(QQ, 2, 3)


def test_diag01_support():
    assert diag01_support(M(QQ, [[1, 0], [0, 0]])) == (0,)
    assert diag01_support(M(QQ, [[1, 1], [0, 0]])) is None
    assert diag01_support(M(GF2, [[0, 0], [0, 1]])) == (1,)


def test_solve_exact_round_trip():
    a = M(QQ, [[1, 0], [2, 1], [0, 3]])
    x = M(QQ, [[Fraction(1, 2), 0], [1, 1]])
    b = a @ x
    assert solve_exact(a, b) == x


def test_stacking():
    a = Matrix.identity(QQ, 2)
    b = Matrix.zeros(QQ, 2, 2)
    h = hstack([a, b])
    v = vstack([a, b])
    assert h.rows == 2 and h.cols == 4
    assert v.rows == 4 and v.cols == 2
    d = block_diag(QQ, [a, a])
    assert d == Matrix.identity(QQ, 4)


@st.composite
def small_matrix(draw, field):
    rows = draw(st.integers(0, 4))
    cols = draw(st.integers(0, 4))
    if field.characteristic == 0:
        elem = st.integers(-4, 4)
    else:
        elem = st.integers(0, field.characteristic - 1)
    data = [[draw(elem) for _ in range(cols)] for _ in range(rows)]
    return Matrix.from_rows(field, data) if rows else Matrix.zeros(field, 0, cols)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FIELDS).flatmap(lambda f: small_matrix(f)))
def test_rank_nullity(m):
    assert m.kernel_basis().cols + m.image_basis().cols == m.cols


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FIELDS).flatmap(lambda f: small_matrix(f)))
def test_kernel_columns_are_killed(m):
    k = m.kernel_basis()
    assert (m @ k).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FIELDS).flatmap(lambda f: small_matrix(f)))
def test_split_idempotent_laws_on_random_projectors(m):
    # projector onto im(m) along a deterministic complement
    if m.rows != m.cols or m.rows == 0:
        return
    f = m.field
    incl = m.image_basis()
    comp = _complete_basis(incl)
    basis = hstack([incl, comp])
    inv = solve_exact(basis, Matrix.identity(f, m.rows))
    e = incl @ inv.submatrix(range(incl.cols), range(m.rows))
    assert e @ e == e
    s = split_idempotent(e)
    s.validate()
    assert s.incl @ s.proj == e
    assert s.dim == incl.cols


def _complete_basis(incl):
    f = incl.field
    n = incl.rows
    chosen = []
    cur = incl
    for i in range(n):
        if cur.cols == n:
            break
        cand = hstack([cur, Matrix.selection_incl(f, n, [i])])
        if cand.rank() > cur.rank():
            chosen.append(i)
            cur = cand
    return Matrix.selection_incl(f, n, chosen)


def test_determinism_bit_identical():
    m = M(GF2, [[1, 0, 1], [1, 1, 0], [0, 1, 1]])
    assert m.kernel_basis() == m.kernel_basis()
    assert m.rref() == m.rref()
