"""Classifier edge cases beyond the happy paths exercised elsewhere."""

from fractions import Fraction

import pytest

from lyalg import linalg as la
from lyalg.algebra import Algebra
from lyalg.buildtools import direct_sum
from lyalg.matrixalg import build_matrix_lie
from lyalg.roots import (ClassifyError, classify, check_grading,
                         saturate_torus, split_ideals, verify_weights,
                         verify_split_maximal)

fr = Fraction


def test_classify_rejects_nonsemisimple():
    h = Algebra(3, {(0, 1): [(2, fr(1))]})
    h.weights = [(fr(0),)] * 3
    h.cartan = [[fr(0), fr(0), fr(1)]]
    with pytest.raises(ClassifyError):
        classify(h)


def test_verify_weights_catches_lies():
    g = build_matrix_lie("sl", 2)
    g.weights = [g.weights[0], g.weights[2], g.weights[1]]
    with pytest.raises(ClassifyError):
        verify_weights(g)


def test_grading_check():
    g = build_matrix_lie("sl", 3)
    assert check_grading(g) == 2
    g2 = build_matrix_lie("sl", 3)
    g2.weights = [g2.weights[0]] * g2.dim
    with pytest.raises(ClassifyError):
        verify_weights(g2)


def test_composite_classification():
    s = direct_sum(build_matrix_lie("sl", 3), build_matrix_lie("sl", 3))
    assert classify(s) == "A2+A2"
    t = direct_sum(build_matrix_lie("so", 5), build_matrix_lie("sl", 2))
    assert classify(t) == "A1+C2"


def test_split_ideals_dims():
    s = direct_sum(build_matrix_lie("sl", 2), build_matrix_lie("so", 7))
    parts = split_ideals(s)
    assert sorted(p.dim for p in parts) == [3, 21]
    for p in parts:
        verify_split_maximal(p)


def test_saturate_already_saturated():
    g = build_matrix_lie("sp", 4)
    assert saturate_torus(g) is g


def test_split_maximal_rejects_fat_zero_block():
    g = build_matrix_lie("sl", 3)
    # drop one torus element: zero-weight space now exceeds the rank
    g.cartan = g.cartan[:1]
    g.weights = [(w[0],) for w in g.weights]
    with pytest.raises(ClassifyError):
        verify_split_maximal(g)
