"""Exact echelon spans and small dense matrix helpers."""

from fractions import Fraction

from qaffine.linalg import (
    EchelonSpan, mat_identity, mat_inv, mat_mul, nullspace, rref, solve,
)

F = Fraction


def test_span_membership_and_rank():
    s = EchelonSpan()
    assert s.add({0: F(1), 1: F(2)})
    assert s.add({1: F(1)})
    assert not s.add({0: F(3), 1: F(1)})  # dependent
    assert len(s) == 2
    assert s.contains({0: F(5), 1: F(-7)})
    assert not s.contains({2: F(1)})


def test_span_reduce_is_idempotent():
    s = EchelonSpan()
    s.add({0: F(1), 2: F(1)})
    r = s.reduce({0: F(2), 1: F(1), 2: F(2)})
    assert r == {1: F(1)}
    assert s.reduce(r) == r


def test_span_coefficients_track_all_adds():
    s = EchelonSpan(track=True)
    s.add({0: F(1)})
    s.add({0: F(1)})          # dependent, still counted as generator 1
    s.add({1: F(1)})
    coeffs = s.coefficients({0: F(2), 1: F(3)})
    total = {}
    gens = [{0: F(1)}, {0: F(1)}, {1: F(1)}]
    for i, c in coeffs.items():
        for k, v in gens[i].items():
            total[k] = total.get(k, F(0)) + c * v
    assert total == {0: F(2), 1: F(3)}
    assert s.coefficients({2: F(1)}) is None


def test_span_equals_is_basis_independent():
    a = EchelonSpan()
    a.add({0: F(1), 1: F(1)})
    a.add({1: F(1)})
    b = EchelonSpan()
    b.add({0: F(1)})
    b.add({0: F(2), 1: F(7)})
    assert a.equals(b)


def test_matrix_inverse_and_solve():
    m = [[F(2), F(1)], [F(1), F(1)]]
    inv = mat_inv(m)
    assert mat_mul(m, inv) == mat_identity(2)
    x = solve(m, [F(3), F(2)])
    assert x == [F(1), F(1)]
    assert solve([[F(1), F(1)], [F(1), F(1)]], [F(0), F(1)]) is None


def test_rref_and_nullspace():
    m = [[F(1), F(2), F(3)], [F(2), F(4), F(6)]]
    red, pivots = rref(m)
    assert pivots == [0]
    ns = nullspace(m)
    assert len(ns) == 2
    for v in ns:
        assert sum(m[0][j] * v[j] for j in range(3)) == 0
