from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lyalg import io
from lyalg.algebra import Algebra, LYAlgebra
from lyalg.checks import (check_lie, check_ly, jacobi_first_violation_naive,
                          ly3_defect, ly4_defect, ly5_defect, ly6_defect,
                          _first_ly_violation)
from lyalg.envelope import (build_enveloping, ly_from_reductive,
                            ly_from_reductive_indices, is_reductive_split)
from lyalg.fastnum import jacobi_violation, killing_int
from lyalg.linalg import basis_vec

F = Fraction


def sl2() -> Algebra:
    # basis h, e, f
    return Algebra(3, {(0, 1): [(1, F(2))], (0, 2): [(2, F(-2))],
                       (1, 2): [(0, F(1))]}, labels=["h", "e", "f"], name="sl2")


def heisenberg() -> Algebra:
    return Algebra(3, {(0, 1): [(2, F(1))]}, name="heis")


def broken_lie() -> Algebra:
    # [e,f] = e breaks Jacobi against [h,e] = 2e
    return Algebra(3, {(0, 1): [(1, F(2))], (0, 2): [(2, F(-2))],
                       (1, 2): [(1, F(1))]}, name="broken")


def test_bracket_eval():
    g = sl2()
    h, e, f = (basis_vec(3, i) for i in range(3))
    assert g.bracket(h, e) == [F(0), F(2), F(0)]
    assert g.bracket(e, h) == [F(0), F(-2), F(0)]
    assert g.bracket(e, f) == [F(1), F(0), F(0)]
    x = [F(1), F(2), F(3)]
    y = [F(0), F(1), F(-1)]
    lhs = g.bracket(x, y)
    rhs = [-c for c in g.bracket(y, x)]
    assert lhs == rhs


def test_ad_matrix():
    g = sl2()
    adh = g.ad(basis_vec(3, 0))
    assert adh == [[F(0)] * 3, [F(0), F(2), F(0)], [F(0), F(0), F(-2)]]


def test_check_lie_pass():
    for g in (sl2(), heisenberg()):
        rep = check_lie(g)
        assert rep.passed and rep.complete
    assert jacobi_violation(sl2()) is None


def test_check_lie_fail_matches_naive():
    g = broken_lie()
    w = jacobi_violation(g)
    assert w is not None
    assert w == jacobi_first_violation_naive(g)
    rep = check_lie(g)
    assert not rep.passed
    assert rep.items[1].witness == w


def test_killing_sl2():
    K = killing_int(sl2())
    expect = np.array([[8, 0, 0], [0, 0, 4], [0, 4, 0]])
    assert (K == expect).all()


def test_killing_heisenberg_zero():
    assert (killing_int(heisenberg()) == 0).all()


def sl2_lts() -> LYAlgebra:
    g = sl2()
    return ly_from_reductive_indices(g, [0], [1, 2], name="sl2-lts")


def test_ly_from_reductive_indices():
    ly = sl2_lts()
    assert ly.binary == {}
    assert ly.t(0, 1, 0) == [(0, F(2))]
    assert ly.t(0, 1, 1) == [(1, F(-2))]
    assert is_reductive_split(sl2(), [0], [1, 2])


def test_ly_from_reductive_vectors_agrees():
    g = sl2()
    ly = ly_from_reductive(g, [basis_vec(3, 0)], [basis_vec(3, 1), basis_vec(3, 2)])
    ref = sl2_lts()
    assert ly.binary == ref.binary and ly.ternary == ref.ternary


def test_check_ly_pass():
    rep = check_ly(sl2_lts())
    assert rep.passed and rep.complete


def test_enveloping_of_sl2_lts_is_sl2():
    pair = build_enveloping(sl2_lts())
    assert pair.h_index == [0] and pair.m_index == [1, 2]
    assert pair.g.table == sl2().table
    back = ly_from_reductive_indices(pair.g, pair.h_index, pair.m_index)
    ref = sl2_lts()
    assert back.binary == ref.binary and back.ternary == ref.ternary


def test_check_ly_detects_broken_axioms():
    ref = sl2_lts()
    # scale one ternary slice: [e,f,e] = 2f is inconsistent
    bad = LYAlgebra(2, dict(ref.binary),
                    {(0, 1, 0): [(1, F(2))], (0, 1, 1): [(1, F(-2))]})
    rep = check_ly(bad)
    assert not rep.passed
    by_name = {it.name: it for it in rep.items}
    for ax, scan in (("LY3", _first_ly_violation(bad, "LY3")),
                     ("LY4", _first_ly_violation(bad, "LY4")),
                     ("LY5", _first_ly_violation(bad, "LY5")),
                     ("LY6", _first_ly_violation(bad, "LY6"))):
        assert (by_name[ax].status == "fail") == (scan is not None)
        assert by_name[ax].witness == scan


def test_io_roundtrip_bytes():
    g = sl2()
    obj = io.algebra_to_obj(g)
    s = io.dumps(obj)
    g2 = io.obj_to_algebra(io_load_str(s))
    assert g2.table == g.table and g2.labels == g.labels
    assert io.dumps(io.algebra_to_obj(g2)) == s

    ly = sl2_lts()
    obj = io.ly_to_obj(ly)
    s = io.dumps(obj)
    ly2 = io.obj_to_ly(io_load_str(s))
    assert ly2.binary == ly.binary and ly2.ternary == ly.ternary
    assert io.dumps(io.ly_to_obj(ly2)) == s


def io_load_str(s: str):
    import json
    return json.loads(s)


def test_io_fraction_strings(tmp_path):
    g = Algebra(2, {(0, 1): [(0, F(-3, 4)), (1, F(5))]})
    path = tmp_path / "a.json"
    io.save(str(path), g)
    text = path.read_text()
    assert '"-3/4"' in text and '"5"' in text
    g2 = io.load(str(path))
    assert isinstance(g2, Algebra)
    assert g2.table == g.table


coeff = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def random_algebra(draw, maxdim=4):
    n = draw(st.integers(2, maxdim))
    table = {}
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                k = draw(st.integers(0, n - 1))
                c = draw(coeff)
                if c != 0:
                    table[(i, j)] = [(k, c)]
    return Algebra(n, table)


@given(random_algebra())
@settings(max_examples=80, deadline=None)
def test_sweep_matches_naive_on_random(alg):
    assert jacobi_violation(alg) == jacobi_first_violation_naive(alg)


@st.composite
def random_ly(draw, maxdim=3):
    n = draw(st.integers(2, maxdim))
    binary = {}
    ternary = {}
    for i in range(n):
        for j in range(i + 1, n):
            if draw(st.booleans()):
                binary[(i, j)] = [(draw(st.integers(0, n - 1)), draw(coeff))]
            for k in range(n):
                if draw(st.integers(0, 3)) == 0:
                    ternary[(i, j, k)] = [(draw(st.integers(0, n - 1)), draw(coeff))]
    return LYAlgebra(n, binary, ternary)


@given(random_ly())
@settings(max_examples=60, deadline=None)
def test_check_ly_agrees_with_direct_scans(ly):
    rep = check_ly(ly)
    by_name = {it.name: it.status for it in rep.items}
    for ax in ("LY3", "LY4", "LY5", "LY6"):
        direct = _first_ly_violation(ly, ax)
        assert (by_name[ax] == "fail") == (direct is not None)


def test_ly_defect_functions_zero_on_valid():
    ly = sl2_lts()
    n = ly.dim
    for i in range(n):
        for j in range(n):
            for k in range(n):
                assert all(x == 0 for x in ly3_defect(ly, i, j, k))
                for l in range(n):
                    assert all(x == 0 for x in ly4_defect(ly, i, j, k, l))
                    assert all(x == 0 for x in ly5_defect(ly, i, j, k, l))
                    for w in range(n):
                        assert all(x == 0 for x in ly6_defect(ly, i, j, k, l, w))
