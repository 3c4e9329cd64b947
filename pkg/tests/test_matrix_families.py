"""The classical matrix Lie algebras, the three tensor-space LY families,
their enveloping algebras and the stated coincidences between them."""

from fractions import Fraction

import pytest

from lyalg import linalg as la
from lyalg.algebra import LYAlgebra
from lyalg.buildtools import subalgebra_on_indices
from lyalg.checks import check_lie, check_ly
from lyalg.envelope import build_enveloping
from lyalg.invariants import centroid_dim, commutant_dim, is_semisimple
from lyalg.matrixalg import (SL2_OPS, BilinForm, build_matrix_lie,
                             check_coincidence, lts_orthosymplectic_sum,
                             ly_sl_tensor_sl, ly_sp_tensor_sym, sl_ops,
                             split_skew_form, split_sym_form, sym0_basis,
                             _sp_trace_mul)
from lyalg.roots import classify, saturate_torus, verify_weights

fr = Fraction


def test_matrix_lie_dimensions():
    assert build_matrix_lie("sl", 2).dim == 3
    assert build_matrix_lie("so", 5).dim == 10
    assert build_matrix_lie("sp", 6).dim == 21
    assert build_matrix_lie("gl", 3).dim == 9


def test_matrix_lie_types():
    for kind, n, want in [("sl", 2, "A1"), ("sl", 4, "A3"), ("so", 5, "C2"),
                          ("so", 7, "B3"), ("so", 8, "D4"), ("sp", 6, "C3")]:
        g = build_matrix_lie(kind, n)
        assert check_lie(g, deep=True).complete
        assert classify(g) == want


def test_matrix_lie_bad_kind():
    with pytest.raises(ValueError):
        build_matrix_lie("su", 3)
    with pytest.raises(ValueError):
        build_matrix_lie("sp", 5)


def test_form_validation():
    with pytest.raises(ValueError):
        BilinForm([[fr(0), fr(1)], [fr(1), fr(0)]], -1)
    with pytest.raises(ValueError):
        BilinForm([[fr(1), fr(0)], [fr(0), fr(0)]], 1)


def env_type(ly):
    pair = build_enveloping(ly)
    return pair, classify(saturate_torus(pair.g))


def test_lts_ortho_3_5():
    ly = lts_orthosymplectic_sum(split_sym_form(3, tail=1),
                                 split_sym_form(5, tail=-1),
                                 name="lts-so(3,5)")
    assert ly.dim == 15
    assert not ly.binary
    assert ly.notes == []
    assert check_ly(ly, deep=True).complete
    pair, label = env_type(ly)
    assert pair.g.dim == 28 and label == "D4"
    dsub = subalgebra_on_indices(pair.g, pair.h_index)
    assert dsub.dim == 13
    assert is_semisimple(dsub) and centroid_dim(dsub) == 2
    dops = [dict_op(ly, i, j) for i in range(ly.dim)
            for j in range(i + 1, ly.dim)]
    assert commutant_dim(dops, ly.dim, weights=ly.weights) == 1


def dict_op(ly, i, j):
    from lyalg.envelope import d_op_sparse
    return d_op_sparse(ly, i, j)


def test_lts_sp_2_2():
    ly = lts_orthosymplectic_sum(split_skew_form(2), split_skew_form(2),
                                 name="lts-sp(2,2)")
    assert ly.dim == 4 and not ly.binary
    assert check_ly(ly, deep=True).complete
    pair, label = env_type(ly)
    assert pair.g.dim == 10 and label == "C2"


def test_lts_ortho_reducible_flag():
    ly = lts_orthosymplectic_sum(split_sym_form(1), split_sym_form(2, tail=-1))
    assert ly.notes and "reducible" in ly.notes[0]
    dops = [dict_op(ly, i, j) for i in range(ly.dim)
            for j in range(i + 1, ly.dim)]
    assert commutant_dim(dops, ly.dim) > 1


def test_sp2_sym_3_1():
    ly = ly_sp_tensor_sym(3, 1, name="ly-sp2-sym(3,1)")
    assert ly.dim == 15
    assert check_ly(ly, deep=True).complete
    pair, label = env_type(ly)
    assert pair.g.dim == 21 and label == "C3"


def test_sp2_sym_6_skew():
    ly = ly_sp_tensor_sym(6, -1, name="ly-sp2-sym(6,-1)")
    assert ly.dim == 42
    assert check_ly(ly, deep=True).complete
    pair, label = env_type(ly)
    assert pair.g.dim == 66 and label == "D6"


def test_sp2_sym_4_zero_binary():
    ly = ly_sp_tensor_sym(4, -1)
    assert ly.dim == 15
    assert not ly.binary
    assert check_ly(ly, deep=True).complete


def test_sp2_sym_bad_params():
    with pytest.raises(ValueError):
        ly_sp_tensor_sym(2, -1)
    with pytest.raises(ValueError):
        ly_sp_tensor_sym(2, 1)


def test_sl_tensor_sl_2_3():
    ly = ly_sl_tensor_sl(2, 3, name="ly-sl(2,3)")
    assert ly.dim == 24
    assert check_ly(ly, deep=True).complete
    pair, label = env_type(ly)
    assert pair.g.dim == 35 and label == "A5"
    dsub = subalgebra_on_indices(pair.g, pair.h_index)
    assert dsub.dim == 11
    dops = [dict_op(ly, i, j) for i in range(ly.dim)
            for j in range(i + 1, ly.dim)]
    assert commutant_dim(dops, ly.dim, weights=ly.weights) == 1


def test_sl_tensor_sl_3_3_dims():
    ly = ly_sl_tensor_sl(3, 3)
    assert ly.dim == 64
    pair = build_enveloping(ly)
    assert pair.g.dim == 80


def test_sl_tensor_sl_bad_params():
    with pytest.raises(ValueError):
        ly_sl_tensor_sl(1, 3)
    with pytest.raises(ValueError):
        ly_sl_tensor_sl(3, 2)


def trace_gram(mats, scale):
    return [[scale * _sp_trace_mul(a, b) for b in mats] for a in mats]


def test_coincidence_sp2sym_4_with_ortho_3_5():
    a = ly_sp_tensor_sym(4, -1)
    fmats, _ = sym0_basis(split_skew_form(4))
    g1 = BilinForm(trace_gram(SL2_OPS, fr(1)), 1)
    g2 = BilinForm(trace_gram(fmats, fr(-1, 2)), 1)
    b = lts_orthosymplectic_sum(g1, g2)
    assert check_coincidence(a, b, la.eye(15))


def test_coincidence_sl22_with_ortho_3_3():
    a = ly_sl_tensor_sl(2, 2)
    amats, _, _, _ = sl_ops(2)
    g1 = BilinForm(trace_gram(amats, fr(1)), 1)
    g2 = BilinForm(trace_gram(amats, fr(-1)), 1)
    b = lts_orthosymplectic_sum(g1, g2)
    assert check_coincidence(a, b, la.eye(9))


def test_coincidence_identity_and_failure():
    a = ly_sl_tensor_sl(2, 2)
    assert check_coincidence(a, a, la.eye(a.dim))
    twisted = la.eye(a.dim)
    twisted[0][0] = fr(2)
    assert not check_coincidence(a, a, twisted)
    with pytest.raises(ValueError):
        bad = la.zeros(a.dim, a.dim)
        check_coincidence(a, a, bad)


def test_family_weights_verify():
    for kind, n in [("sl", 3), ("so", 6), ("sp", 4)]:
        g = build_matrix_lie(kind, n)
        assert verify_weights(g) == len(g.cartan)
