from fractions import Fraction

import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st
from oracles import forward_solve, pairing_matrix, set_partitions

from windmill.symfunc import SymmetricFunction, h_vector, make_named
from windmill.windability import (
    build_A,
    closed_form_edge_cover,
    double_factorial,
    is_2_decomposable,
    is_windable,
    mixed_pairs,
    parity_split,
    partitions,
    pdecom_identity,
    reduce_odd_to_even,
    solve_triangular,
    verify_com_identity,
    witness_B,
)


def test_double_factorial_conventions():
    assert [double_factorial(n) for n in (-1, 0, 1, 2, 5, 6)] == [1, 1, 1, 2, 15, 48]


@pytest.mark.parametrize("m", range(1, 11))
def test_matrix_matches_pairing_enumeration(m):
    A = build_A(m)
    assert [[int(v) for v in row] for row in A.entries] == pairing_matrix(m)


def test_small_matrices():
    assert build_A(2).to_json() == [["1", "0"], ["0", "1"]]
    assert build_A(3).to_json() == [["3", "0"], ["1", "2"]]
    assert build_A(4).to_json() == [["3", "0", "0"], ["0", "3", "0"], ["1", "0", "2"]]
    with pytest.raises(ValueError):
        build_A(0)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12), st.data())
def test_solution_substitutes_back(m, data):
    A = build_A(m)
    h = data.draw(st.lists(st.fractions(-50, 50, max_denominator=9), min_size=A.size, max_size=A.size))
    x = solve_triangular(A, h)
    assert A.apply(x) == tuple(h)
    assert list(x) == forward_solve([list(r) for r in A.entries], h)


def test_two_decomposition_returns_none_when_negative():
    assert is_2_decomposable([10, 1], 3) is None
    dec = is_2_decomposable([3, 1], 3)
    assert dec.d_values == (1, 0)


def test_windability_report_order_and_counterexample():
    rep = is_windable(make_named("atleast", 11, k=3))
    assert rep.verdict == "NotWindable"
    assert rep.counterexample == (0, 0)
    keys = [(r.zeros, r.ones) for r in rep.per_pinning]
    assert keys == sorted(keys)
    assert rep.record(0, 0).solution[-1] == Fraction(-1, 10080)


def test_edge_gadget_windable():
    for w in (0, 1, Fraction(7, 2), 100):
        assert is_windable(make_named("edge", 2, w=w)).windable


positive = st.fractions(Fraction(1, 5), 5, max_denominator=7)


@settings(max_examples=40, deadline=None)
@given(positive, positive, positive, positive, st.integers(1, 9))
@example(Fraction(1, 5), Fraction(1, 5), Fraction(1, 5), Fraction(4, 5), 3)
def test_geometric_even_odd_subsequences_windable(a, r, b, s, d):
    # independent ratios for the even and the odd subsequence; [1,1,1,4]
    # (d=3) already gives h=[4,1] and a negative solution, so this fails
    vals = [a * r ** (i // 2) if i % 2 == 0 else b * s ** (i // 2) for i in range(d + 1)]
    assert is_windable(SymmetricFunction(vals)).windable


@settings(max_examples=100, deadline=None)
@given(positive, positive, positive, st.integers(1, 12))
def test_geometric_with_common_ratio_windable(a, b, r, d):
    vals = [(a if i % 2 == 0 else b) * r ** (i // 2) for i in range(d + 1)]
    assert is_windable(SymmetricFunction(vals)).windable


@pytest.mark.parametrize("b", [1, 2])
@pytest.mark.parametrize("m", range(2, 41, 2))
def test_closed_forms_match_solver(b, m):
    h_even, h_odd = parity_split(h_vector(make_named("atleast", m, k=b)), m)
    A = build_A(m)
    assert closed_form_edge_cover(b, m, "even") == solve_triangular(A, h_even)
    assert closed_form_edge_cover(b, m, "odd") == solve_triangular(A, h_odd)


def test_com_identity_grid():
    assert verify_com_identity(2, 5)
    assert all(verify_com_identity(m, n) for n in range(2, 31) for m in range(1, n))


def test_pdecom_identity():
    assert all(pdecom_identity(n) for n in range(1, 7))


def _nonneg(h, m):
    return all(v >= 0 for v in solve_triangular(build_A(m), h))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).map(lambda n: 2 * n), st.data())
def test_parity_split_verdicts_agree(m, data):
    g = data.draw(st.lists(st.fractions(0, 6, max_denominator=5), min_size=m + 1, max_size=m + 1))
    h = h_vector(SymmetricFunction(g))
    h_even, h_odd = parity_split(h, m)
    assert _nonneg(h, m) == (_nonneg(h_even, m) and _nonneg(h_odd, m))


def test_reduce_odd_to_even_preserves_verdict():
    for n in range(1, 7):
        m = 2 * n - 1
        for vals in ([1, 1, 2, 2, 1, 1, 3][:n], [2, 2, 1, 1, 5, 5, 1][:n]):
            out = reduce_odd_to_even(vals, m, "odd")
            assert _nonneg(vals, m) == _nonneg(out, m + 1)
    with pytest.raises(ValueError):
        reduce_odd_to_even([1, 2], 3, "odd")


def test_partitions_match_independent_enumeration():
    for k in range(7):
        ours = sorted(partitions(range(k)))
        theirs = sorted(tuple(sorted(p)) for p in set_partitions(list(range(k))))
        assert ours == theirs


def test_witness_same_input_is_square():
    f = make_named("atmost", 4, k=2)
    assert witness_B(f, (1, 1, 0, 0), (1, 1, 0, 0)) == {(): 1}


def test_witness_rejects_non_windable():
    with pytest.raises(ValueError):
        witness_B(SymmetricFunction([10, 1, 1, 1]), (0, 0, 0), (1, 1, 1))


def test_mixed_pairs():
    assert mixed_pairs((1, 0, 1, 1), ((0, 1), (2, 3))) == 1
