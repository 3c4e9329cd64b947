"""Two-slice derivation-grid construction, the classical square, the
2x2-row bracket and the equivariant bracket solver.

Expected values fixed in advance: the sixteen square cells carry the
classical dimensions and types (3/A1, 8/A2, 21/C3, 52/F4; 16/A2+A2,
35/A5, 78/E6; 66/D6, 133/E7; 248/E8), the reductive pairs inside the
octonion row have module dimensions 35 = 52-(14+3) and 182 = 248-(14+52),
and the 2x2 row over H_n(K) must come out as sl(2n).
"""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyalg import linalg as la
from lyalg.buildtools import subalgebra_on_indices
from lyalg.checks import check_lie, check_ly, jacobi_defect
from lyalg.compjordan import build_composition, build_jordan, trace_admissible_view
from lyalg.envelope import build_enveloping, ly_from_reductive_indices
from lyalg.matrixalg import (build_matrix_lie, check_coincidence,
                             lts_orthosymplectic_sum, sl_ops, split_sym_form)
from lyalg.roots import check_grading, classify, saturate_torus
from lyalg.tits import (assemble_bracket, bracket_transport_equal, build_tits,
                        build_tkk_row, check_tits_conditions,
                        form_pair_module_data, ly_inside_tits, magic_square,
                        solve_equivariant_bracket, tensor_action,
                        tits_module_data, tkk_to_tits_map)

SQUARE = {
    "k": [(3, "A1"), (8, "A2"), (21, "C3"), (52, "F4")],
    "K": [(8, "A2"), (16, "A2+A2"), (35, "A5"), (78, "E6")],
    "Q": [(21, "C3"), (35, "A5"), (66, "D6"), (133, "E7")],
    "O": [(52, "F4"), (78, "E6"), (133, "E7"), (248, "E8")],
}


def cview(kind):
    return trace_admissible_view(build_composition(kind))


def jview(spec):
    return trace_admissible_view(build_jordan(spec))


def test_build_tits_block_layout():
    t = build_tits(cview("Q"), jview("H3(k)"))
    assert (t.nD, t.ngrid, t.nd) == (3, 15, 3)
    assert t.alg.dim == 21
    assert t.h_index == list(range(3)) + list(range(18, 21))
    assert t.m_index == list(range(3, 18))
    assert t.alg.labels[3] == "x0*y0"
    assert check_grading(t.alg) == len(t.alg.weights[0])


def test_small_cells_full_jacobi():
    for cx, cy, dim, typ in [("k", "k", 3, "A1"), ("K", "K", 16, "A2+A2"),
                             ("Q", "k", 21, "C3"), ("O", "k", 52, "F4")]:
        t = build_tits(cview(cx), jview("H3(%s)" % cy))
        assert t.alg.dim == dim
        assert check_lie(t.alg, deep=True).complete
        assert classify(saturate_torus(t.alg)) == typ


def test_magic_square_table():
    sq = magic_square()
    for ri, cx in enumerate("kKQO"):
        for ci, cy in enumerate("kKQO"):
            dim, typ = SQUARE[cx][ci]
            cell = sq[(cx, cy)]
            assert cell["dim"] == dim, (cx, cy)
            assert cell["type"] == typ, (cx, cy)
            assert cell["lie"]


def test_magic_square_symmetry():
    sq = magic_square()
    for cx in "kKQO":
        for cy in "kKQO":
            assert sq[(cx, cy)]["dim"] == sq[(cy, cx)]["dim"]
            assert sq[(cx, cy)]["type"] == sq[(cy, cx)]["type"]


def test_conditions_pass_on_catalog_pairs():
    for x, y in [(cview("Q"), jview("H3(Q)")),
                 (cview("O"), jview("H3(O)")),
                 (jview("JV(3)"), jview("JV(5)"))]:
        co = check_tits_conditions(x, y)
        assert co.passed(), co


def test_conditions_fail_octonion_degree_four():
    y4 = jview("H4(K)")
    co = check_tits_conditions(cview("O"), y4)
    assert co.ok["i"] and co.ok["ii"] and not co.ok["iii"]
    assert co.witnesses["iii"] is not None
    # the associative row stays a Lie algebra at any degree
    assert check_tits_conditions(cview("Q"), y4).passed()


def test_ly_inside_octonion_row_small():
    t = build_tits(cview("O"), jview("H3(k)"))
    ly = ly_inside_tits(t)
    assert ly.dim == 35
    assert check_ly(ly, deep=True).complete
    env = build_enveloping(ly)
    assert env.g.dim == 52
    assert classify(saturate_torus(env.g)) == "F4"
    dsub = subalgebra_on_indices(env.g, env.h_index)
    dsub.weights = [env.g.weights[i] for i in env.h_index]
    assert dsub.dim == 17
    assert classify(saturate_torus(dsub)) == "A1+G2"


def test_ly_inside_octonion_row_large():
    t = build_tits(cview("O"), jview("H3(O)"))
    ly = ly_inside_tits(t)
    assert ly.dim == 182
    env = build_enveloping(ly)
    assert env.g.dim == 248
    assert classify(saturate_torus(env.g)) == "E8"


def test_ly_inside_agrees_with_reductive_route():
    t = build_tits(cview("O"), jview("H3(k)"))
    a = ly_inside_tits(t)
    b = ly_from_reductive_indices(t.alg, t.h_index, t.m_index)
    assert a.dim == b.dim
    assert a.binary == b.binary
    assert a.ternary == b.ternary


def test_spin_pair_cell_is_orthosymplectic():
    t = build_tits(jview("JV(3)"), jview("JV(5)"))
    assert t.alg.dim == 28
    assert check_lie(t.alg, deep=True).complete
    ly = ly_inside_tits(t)
    assert ly.dim == 15 and not ly.binary
    ref = lts_orthosymplectic_sum(split_sym_form(3), split_sym_form(5))
    ident = [[F(1) if i == j else F(0) for j in range(15)] for i in range(15)]
    assert check_coincidence(ly, ref, ident)


def test_tkk_row_dims_and_types():
    for spec, dim, typ in [("H3(k)", 21, "C3"), ("H3(K)", 35, "A5"),
                           ("H3(Q)", 66, "D6"), ("H3(O)", 133, "E7")]:
        g = build_tkk_row(build_jordan(spec))
        assert g.dim == dim
        assert check_lie(g).passed
        assert classify(saturate_torus(g)) == typ


def test_tkk_transports_onto_tits():
    for spec in ["H3(k)", "H3(K)", "H3(Q)"]:
        tk, t, bm = tkk_to_tits_map(build_jordan(spec))
        assert bracket_transport_equal(tk, t.alg, bm)


def test_tkk_hermitian_degree_four_is_sl8():
    # H_n(K) must give sl(2n); at n=4 that is dim 63 of type A7
    j = build_jordan("H4(K)")
    g = build_tkk_row(j)
    assert g.dim == 63
    assert check_lie(g, deep=True).complete
    assert classify(saturate_torus(g)) == "A7"
    tk, t, bm = tkk_to_tits_map(j)
    assert bracket_transport_equal(tk, t.alg, bm)


def grid_to_tits_perm(t, hdim):
    n = t.alg.dim
    nDx = t.nD
    perm = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        if i < nDx:
            tgt = i
        elif i < hdim:
            tgt = t.nD + t.ngrid + (i - nDx)
        else:
            tgt = t.nD + (i - hdim)
        perm[tgt][i] = F(1)
    return perm


def test_solver_exceptional_family():
    x, y = cview("O"), jview("H3(O)")
    h, mod, cands = tits_module_data(x, y)
    assert (h.dim, mod.mdim, len(cands)) == (66, 182, 3)
    sol = solve_equivariant_bracket(h, mod, cands)
    assert len(sol.kernel) == 3
    assert sol.family_dim() == 1
    br, free = sol.branches[0]
    assert len(free) == 1
    # one free scale alpha, coefficients (alpha^2, alpha^2, alpha)
    assert sol.coefficients(0, {free[0]: F(2)}) == [F(4), F(4), F(2)]
    co = sol.coefficients(0, {free[0]: F(1)})
    assert co == [F(1), F(1), F(1)]
    g = assemble_bracket(h, mod, cands, co)
    t = build_tits(x, y)
    assert bracket_transport_equal(g, t.alg, grid_to_tits_perm(t, h.dim))


def test_solver_sl2_has_no_bracket():
    h = build_matrix_lie("sl", 2)
    mats, _, _, _ = sl_ops(2)
    act = tensor_action(h, mats, [], 2, 1)
    moment = {(0, 1): [(0, F(-1))]}
    into_m = {(0, 1): [(3, F(1))]}
    sol = solve_equivariant_bracket(h, act, [moment, into_m])
    assert sol.kernel == []
    assert sol.family_dim() == 0


def test_solver_so3_so5_diagonal_family():
    h, act, cands = form_pair_module_data(split_sym_form(3), split_sym_form(5))
    assert (h.dim, act.mdim) == (13, 15)
    sol = solve_equivariant_bracket(h, act, cands)
    assert len(sol.kernel) == 2
    assert sol.family_dim() == 1
    br, free = sol.branches[0]
    co = sol.coefficients(0, {free[0]: F(1)})
    assert co == [F(1), F(1)]
    g = assemble_bracket(h, act, cands, co)
    assert check_lie(g, deep=True).complete
    ly = ly_from_reductive_indices(g, list(range(13)), list(range(13, 28)))
    ref = lts_orthosymplectic_sum(split_sym_form(3), split_sym_form(5))
    ident = [[F(1) if i == j else F(0) for j in range(15)] for i in range(15)]
    assert check_coincidence(ly, ref, ident)


def test_solver_rejects_empty_candidates():
    h = build_matrix_lie("sl", 2)
    mats, _, _, _ = sl_ops(2)
    act = tensor_action(h, mats, [], 2, 1)
    with pytest.raises(ValueError):
        solve_equivariant_bracket(h, act, [])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_jacobi_sampled_above_deep_gate(data):
    # dim 133 sits above the default Jacobi sweep cutoff, so spot-check it
    t = build_tits(cview("Q"), jview("H3(O)"))
    n = t.alg.dim
    i = data.draw(st.integers(0, n - 1))
    j = data.draw(st.integers(0, n - 1))
    k = data.draw(st.integers(0, n - 1))
    assert not any(jacobi_defect(t.alg, i, j, k))
