"""Killing form, centroid, commutant and derivation solvers on small
algebras where every answer is known by hand."""

from fractions import Fraction

import pytest

from lyalg import linalg as la
from lyalg.algebra import Algebra
from lyalg.buildtools import (NotClosedError, direct_sum,
                              operator_algebra_from_basis,
                              rational_eigensplit, simultaneous_eigenbasis)
from lyalg.invariants import (centroid_basis, centroid_dim, derivation_basis,
                              is_semisimple, is_simple, killing_gram,
                              killing_radical, commutant_dim)

fr = Fraction


def sl2():
    # basis h, e, f with [h,e] = 2e, [h,f] = -2f, [e,f] = h
    table = {
        (0, 1): [(1, fr(2))],
        (0, 2): [(2, fr(-2))],
        (1, 2): [(0, fr(1))],
    }
    a = Algebra(3, table, labels=["h", "e", "f"], name="sl2")
    a.weights = [(fr(0),), (fr(2),), (fr(-2),)]
    a.cartan = [[fr(1), fr(0), fr(0)]]
    return a


def heisenberg():
    return Algebra(3, {(0, 1): [(2, fr(1))]}, labels=["x", "y", "z"])


def test_killing_sl2():
    g = sl2()
    assert killing_gram(g) == [[fr(8), fr(0), fr(0)],
                               [fr(0), fr(0), fr(4)],
                               [fr(0), fr(4), fr(0)]]
    assert killing_radical(g) == []
    assert is_semisimple(g)
    assert is_simple(g)


def test_killing_heisenberg():
    h = heisenberg()
    rad = killing_radical(h)
    assert len(rad) == 3
    assert not is_semisimple(h)
    assert not is_simple(h)


def test_centroid_sl2_is_scalars():
    g = sl2()
    cb = centroid_basis(g)
    assert len(cb) == 1
    phi = cb[0]
    lead = next(v for row in phi for v in row if v != 0)
    assert [[v / lead for v in row] for row in phi] == la.eye(3)


def test_centroid_direct_sum():
    g = direct_sum(sl2(), sl2(), name="sl2+sl2")
    assert g.weights is not None and g.cartan is not None
    assert centroid_dim(g) == 2
    assert is_semisimple(g)
    assert not is_simple(g)
    # same answer without the weight-block shortcut
    g2 = direct_sum(sl2(), sl2())
    g2.weights = None
    assert centroid_dim(g2) == 2


def test_derivations_sl2_all_inner():
    g = sl2()
    der = derivation_basis(g)
    assert len(der) == 3
    ads = [la.transpose([g.bracket(la.basis_vec(3, i), la.basis_vec(3, j))
                         for j in range(3)]) for i in range(3)]
    span = la.SpanTracker(9)
    for d in der:
        span.add([v for row in d for v in row])
    for m in ads:
        assert span.contains([v for row in m for v in row])


def test_derivations_abelian():
    a = Algebra(2, {})
    assert len(derivation_basis(a)) == 4


def test_commutant_of_irreducible_action():
    g = sl2()
    ops = []
    for i in range(3):
        m = g.ad(la.basis_vec(3, i))
        ops.append({(r, c): m[r][c] for r in range(3) for c in range(3)
                    if m[r][c] != 0})
    assert commutant_dim(ops, 3) == 1
    assert commutant_dim(ops, 3, weights=g.weights) == 1


def test_operator_algebra_round_trip():
    e = {(0, 1): fr(1)}
    f = {(1, 0): fr(1)}
    h = {(0, 0): fr(1), (1, 1): fr(-1)}
    alg = operator_algebra_from_basis([h, e, f], labels=["h", "e", "f"])
    assert alg.table == sl2().table


def test_operator_algebra_not_closed():
    e = {(0, 1): fr(1)}
    f = {(1, 0): fr(1)}
    with pytest.raises(NotClosedError):
        operator_algebra_from_basis([e, f])


def test_eigensplit_swap():
    m = [[fr(0), fr(1)], [fr(1), fr(0)]]
    split = rational_eigensplit(m)
    assert [lam for lam, _ in split] == [fr(-1), fr(1)]
    for lam, vecs in split:
        for v in vecs:
            assert la.mat_vec(m, v) == la.vec_scale(lam, v)


def test_eigensplit_rejects_irrational():
    rot = [[fr(0), fr(-1)], [fr(1), fr(0)]]
    with pytest.raises(ArithmeticError):
        rational_eigensplit(rot)


def test_simultaneous_eigenbasis():
    a = [[fr(0), fr(1), fr(0)], [fr(1), fr(0), fr(0)], [fr(0), fr(0), fr(2)]]
    b = [[fr(3), fr(0), fr(0)], [fr(0), fr(3), fr(0)], [fr(0), fr(0), fr(5)]]
    vecs, tups = simultaneous_eigenbasis([a, b])
    assert len(vecs) == 3
    assert sorted(tups) == [(fr(-1), fr(3)), (fr(1), fr(3)), (fr(2), fr(5))]
    for v, t in zip(vecs, tups):
        assert la.mat_vec(a, v) == la.vec_scale(t[0], v)
        assert la.mat_vec(b, v) == la.vec_scale(t[1], v)
