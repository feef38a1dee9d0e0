import random

import pytest

from afc.bicomplex import (
    Bicomplex, RowSDR, build_homotopy_sigma, build_retraction_rho,
    check_sdr_relations, cone_of_identity, normalize_signs, tensor_bicomplex,
    tot, tot_block_offsets, tot_chain_map, zeroth_row_retraction,
)
from afc.chain import (
    ChainComplex, TruncationWindow, check_chain_map, check_homotopy,
    compare_homology, contraction_as_homotopy,
)
from afc.errors import NotCommuting, RowNotContractible
from afc.fields import GF2, QQ
from afc.matrix import Matrix
from afc.seeding import random_complex, seeded_row_sdr


def simple_complex(field, dims, diffs):
    mats = [Matrix.from_rows(field, d) if d else
            Matrix.zeros(field, dims[k], dims[k + 1])
            for k, d in enumerate(diffs)]
    return ChainComplex(field, TruncationWindow.bounded(len(dims) - 1), dims, mats)


def test_normalize_signs_zero_and_single_row():
    z = Bicomplex(QQ, TruncationWindow.bounded(2), {(0, 0): 1, (1, 1): 1}, {}, {},
                  convention="commute")
    n = normalize_signs(z)
    assert n.convention == "anticommute"
    row = tensor_bicomplex(simple_complex(QQ, (2,), []),
                           simple_complex(QQ, (1, 1), [[[3]]]))
    nrow = normalize_signs(row)
    assert nrow.d(0, 1) == row.d(0, 1)  # row 0 is even: unchanged


def test_normalize_signs_gf2_identity():
    p = random_complex(random.Random(5), GF2, 1, 2)
    q = random_complex(random.Random(6), GF2, 1, 2)
    b = tensor_bicomplex(p, q)
    n = normalize_signs(b)
    assert n.convention == "anticommute"
    for key, m in b.dmats.items():
        assert n.dmats[key] == m  # -1 = 1 in characteristic 2


def test_normalize_rejects_noncommuting():
    bad = Bicomplex(QQ, TruncationWindow.bounded(2),
                    {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1},
                    {(0, 1): Matrix.from_rows(QQ, [[1]]),
                     (1, 1): Matrix.from_rows(QQ, [[1]])},
                    {(1, 0): Matrix.from_rows(QQ, [[1]]),
                     (1, 1): Matrix.from_rows(QQ, [[2]])},
                    convention="commute", validate=False)
    with pytest.raises(NotCommuting):
        normalize_signs(bad)


def test_tot_concentrated_row_and_column():
    c = simple_complex(QQ, (2, 1), [[[1], [0]]])
    row = normalize_signs(tensor_bicomplex(simple_complex(QQ, (1,), []), c))
    t = tot(row)
    assert t.dims == c.dims and t.diffs == c.diffs
    col = normalize_signs(tensor_bicomplex(c, simple_complex(QQ, (1,), [])))
    t2 = tot(col)
    assert t2.dims == c.dims and t2.diffs == c.diffs


def test_tot_2x2_identity_grid_hand_check():
    # P = Q = (0 -> F -> F -> 0) with identity differentials
    one = simple_complex(QQ, (1, 1), [[[1]]])
    b = normalize_signs(tensor_bicomplex(one, one))
    t = tot(b)
    assert t.dims == (1, 2, 1)
    # hand elimination: contractible (tensor of two exact complexes)
    assert t.homology_dims() == (0, 0, 0)


def test_tot_homology_matches_tensor_of_homologies():
    p = simple_complex(GF2, (1, 1), [[[0]]])  # homology (1,1)
    q = simple_complex(GF2, (1, 1), [[[1]]])  # exact
    t = tot(normalize_signs(tensor_bicomplex(p, q)))
    assert t.homology_dims() == (0, 0, 0)


def seeded(field, seed, rows=2, cols=3, max_dim=2, shear=True):
    return seeded_row_sdr(random.Random(seed), field, rows, cols, max_dim,
                          shear=shear)


@pytest.mark.parametrize("field,seed", [(QQ, 1), (QQ, 2), (GF2, 3), (GF2, 4)])
def test_seeded_sdr_basic_identities(field, seed):
    r = seeded(field, seed)
    assert r.basic_verdict().ok


@pytest.mark.parametrize("field,seed", [(QQ, 11), (GF2, 12)])
def test_seeded_sdr_four_relations(field, seed):
    r = seeded(field, seed)
    v = check_sdr_relations(r)
    assert v.ok, v.detail


def test_sdr_relations_with_zero_s_and_strict_inverses():
    # iota and f strict inverses, s = 0: relations reduce to f e = e f
    rng = random.Random(7)
    p = random_complex(rng, QQ, 2, 2)
    q = random_complex(rng, QQ, 2, 2)
    a = normalize_signs(tensor_bicomplex(p, q))
    iota = {k: Matrix.identity(QQ, a.dim(*k)) for k in a.cells()}
    r = RowSDR(a, a, iota, iota, {})
    v = check_sdr_relations(r)
    assert v.ok, v.detail


def test_corrupted_s_pinpoints_relation():
    r = seeded(GF2, 21)
    # corrupt s at one position that actually matters
    key = next(k for k, v in sorted(r.s_mats.items()) if v.rows and v.cols
               and k[0] >= 1)
    bad = dict(r.s_mats)
    m = bad[key].to_rows()
    m[0][0] ^= 1
    bad[key] = Matrix.from_rows(GF2, m)
    r2 = RowSDR(r.a, r.b, r.iota_mats, r.f_mats, bad)
    v = check_sdr_relations(r2)
    assert not v.ok


@pytest.mark.parametrize("field,seed", [(QQ, 31), (GF2, 32)])
def test_retraction_rho_is_chain_map_and_retraction(field, seed):
    r = seeded(field, seed)
    rho = build_retraction_rho(r)
    assert check_chain_map(rho).ok
    iota = tot_chain_map(r)
    assert check_chain_map(iota).ok
    comp = rho.compose(iota)
    for k, m in enumerate(comp.components):
        assert m == Matrix.identity(field, m.rows), f"degree {k}"


def test_rho_degree_zero_is_single_block_f():
    r = seeded(QQ, 41)
    rho = build_retraction_rho(r)
    assert rho.components[0] == r.f(0, 0)


def test_rho_blocks_match_formula():
    r = seeded(QQ, 42, rows=2, cols=2, max_dim=2)
    rho = build_retraction_rho(r)
    n = 2
    offa = tot_block_offsets(r.a, n)
    offb = tot_block_offsets(r.b, n)
    comp = rho.components[n]
    for i in range(1, n + 2):
        tp, tq = n - (i - 1), i - 1
        for j in range(1, n + 2):
            sp, sq = n - (j - 1), j - 1
            blk = comp.submatrix(
                range(offa[(tp, tq)], offa[(tp, tq)] + r.a.dim(tp, tq)),
                range(offb[(sp, sq)], offb[(sp, sq)] + r.b.dim(sp, sq)))
            if j > i:
                assert blk.is_zero()
            else:
                want = r.f(tp, tq) @ r.neg_es(sp, sq, i - j)
                assert blk == want


@pytest.mark.parametrize("field,seed", [(QQ, 51), (GF2, 52)])
def test_sigma_homotopy_verified_blockwise(field, seed):
    r = seeded(field, seed)
    sig = build_homotopy_sigma(r)
    v = check_homotopy(sig)
    assert v.ok, v.detail


def test_sigma_diagonal_blocks_are_one_minus_iota_f():
    r = seeded(QQ, 61, rows=2, cols=2)
    sig = build_homotopy_sigma(r)
    tb = tot(r.b)
    n = 1
    # d sigma + sigma d at degree n, diagonal block (j, j)
    m = (tb.d(n + 1) @ sig.components[n]) + (sig.components[n - 1] @ tb.d(n))
    offb = tot_block_offsets(r.b, n)
    for j in range(1, n + 2):
        sp, sq = n - (j - 1), j - 1
        blk = m.submatrix(range(offb[(sp, sq)], offb[(sp, sq)] + r.b.dim(sp, sq)),
                          range(offb[(sp, sq)], offb[(sp, sq)] + r.b.dim(sp, sq)))
        want = (Matrix.identity(QQ, r.b.dim(sp, sq))
                - r.iota(sp, sq) @ r.f(sp, sq))
        assert blk == want
    # strictly lower blocks: -iota f (-es)^(i-j)
    for i in range(1, n + 2):
        tp, tq = n - (i - 1), i - 1
        for j in range(1, i):
            sp, sq = n - (j - 1), j - 1
            blk = m.submatrix(
                range(offb[(tp, tq)], offb[(tp, tq)] + r.b.dim(tp, tq)),
                range(offb[(sp, sq)], offb[(sp, sq)] + r.b.dim(sp, sq)))
            want = -(r.iota(tp, tq) @ r.f(tp, tq) @ r.neg_es(sp, sq, i - j))
            assert blk == want


def test_tot_iota_is_homotopy_equivalence_on_homology():
    r = seeded(GF2, 71)
    assert compare_homology(tot(r.a), tot(r.b)).equal


def test_zeroth_row_retraction_identity_on_row_bicomplex():
    c = simple_complex(QQ, (2, 2), [[[1, 0], [0, 0]]])
    row = normalize_signs(tensor_bicomplex(simple_complex(QQ, (1,), []), c))
    rho = zeroth_row_retraction(row, {})
    for k, m in enumerate(rho.components):
        assert m == Matrix.identity(QQ, c.dim(k))


def test_zeroth_row_retraction_contractible_rows():
    # B = (complex in row 0) (+) (P' tensor cone) with P'_0 = 0, so every
    # row p >= 1 is a cone row with its canonical contraction
    from afc.bicomplex import direct_sum_bicomplex
    from afc.chain import pad_bounded

    rng = random.Random(81)
    p_red = ChainComplex(QQ, TruncationWindow.bounded(2), (0, 2, 1),
                         [Matrix.zeros(QQ, 0, 2),
                          Matrix.from_rows(QQ, [[1], [2]])])
    qq = pad_bounded(random_complex(rng, QQ, 1, 2), 2)
    cone, h = cone_of_identity(qq)
    upper = normalize_signs(tensor_bicomplex(p_red, cone))
    row0_cpx = random_complex(rng, QQ, 3, 2)
    row0 = normalize_signs(tensor_bicomplex(
        ChainComplex(QQ, TruncationWindow.bounded(0), (1,), []), row0_cpx))
    b = direct_sum_bicomplex(row0, upper)
    contractions = {}
    for (pp, q) in b.cells():
        if pp == 0 or b.dim(pp, q) == 0 or pp + q + 1 > b.window.cutoff:
            continue
        hq = h[q] if q < len(h) else Matrix.zeros(QQ, cone.dim(q + 1),
                                                  cone.dim(q))
        sc = Matrix.identity(QQ, p_red.dim(pp)).kron(hq)
        if pp % 2 == 1:
            sc = -sc
        contractions[(pp, q)] = sc
    rho = zeroth_row_retraction(b, contractions)
    assert check_chain_map(rho).ok
    assert compare_homology(tot(b), rho.target).equal
    assert compare_homology(rho.target, row0_cpx).equal


def test_zeroth_row_rejects_bad_contraction():
    rng = random.Random(91)
    p = random_complex(rng, QQ, 1, 2)
    q = random_complex(rng, QQ, 1, 2)
    b = normalize_signs(tensor_bicomplex(p, q))
    if all(b.dim(pp, qq) == 0 for (pp, qq) in b.cells() if pp >= 1):
        pytest.skip("degenerate draw")
    with pytest.raises(RowNotContractible):
        zeroth_row_retraction(b, {})


def test_tricomplex_concentrated_plane_and_zero():
    from afc.bicomplex import Tricomplex, tot_tricomplex
    from afc.seeding import tensor_tricomplex

    rng = random.Random(101)
    p = random_complex(rng, QQ, 2, 2)
    q = random_complex(rng, QQ, 2, 2)
    point = ChainComplex(QQ, TruncationWindow.bounded(0), (1,), [])
    t = tensor_tricomplex(p, q, point)
    plane = tot(normalize_signs(tensor_bicomplex(p, q)))
    got = tot_tricomplex(t)
    assert compare_homology(got, plane).equal
    zero = Tricomplex(QQ, TruncationWindow.bounded(2), {}, {}, {}, {})
    assert tot_tricomplex(zero).total_dim() == 0


@pytest.mark.parametrize("field,seed", [(QQ, 111), (GF2, 112)])
def test_tricomplex_totalization_orders_agree(field, seed):
    from afc.bicomplex import tot_tricomplex
    from afc.seeding import tensor_tricomplex

    rng = random.Random(seed)
    p = random_complex(rng, field, 1, 2)
    q = random_complex(rng, field, 1, 2)
    r = random_complex(rng, field, 1, 2)
    t = tensor_tricomplex(p, q, r)
    h1 = tot_tricomplex(t, (0, 1)).homology_dims()
    h2 = tot_tricomplex(t, (1, 2)).homology_dims()
    h3 = tot_tricomplex(t, (0, 2)).homology_dims()
    assert h1 == h2 == h3
