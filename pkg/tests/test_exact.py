from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from confblocks.exact import (
    CutoffMismatch,
    DimensionMismatch,
    EchelonBasis,
    GradedSpace,
    LaurentJet,
    QSeries,
    bareiss_rank,
    binomial,
    format_fraction,
    as_fraction,
    nullspace,
    quotient_dim,
    rank_of_span,
    solve_linear,
)

small = st.integers(min_value=-4, max_value=4)
fractions = st.builds(Fraction, small, st.integers(min_value=1, max_value=3))


def matrices(max_rows=5, max_cols=5, elements=small):
    return st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(elements, min_size=n, max_size=n), min_size=1, max_size=max_rows)
    )


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_bareiss_matches_sympy_rank(rows):
    assert bareiss_rank(rows) == sympy.Matrix(rows).rank()


@settings(max_examples=100, deadline=None)
@given(matrices(elements=fractions))
def test_rational_rank_matches_sympy(rows):
    expected = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows]).rank()
    assert rank_of_span(rows) == expected


def test_rank_examples():
    assert rank_of_span([[1, 0], [0, 1]]) == 2
    assert rank_of_span([[1, 2], [2, 4]]) == 1
    assert quotient_dim(3, [[1, 1, 0], [0, 1, 1], [1, 2, 1]]) == 1
    assert quotient_dim(4, []) == 4


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        quotient_dim(3, [[1, 0]])
    with pytest.raises(DimensionMismatch):
        rank_of_span([[1, 0], [1, 0, 0]])


@settings(max_examples=100, deadline=None)
@given(matrices(elements=fractions))
def test_echelon_basis_rank_and_membership(rows):
    eb = EchelonBasis(track=True)
    for n, r in enumerate(rows):
        eb.add({j: x for j, x in enumerate(r)}, tag=n)
    assert eb.rank == rank_of_span(rows)
    for r in rows:
        assert eb.contains({j: x for j, x in enumerate(r)})
    # tracked combinations reproduce every basis row
    for pivot, row in eb.rows.items():
        combo = eb._combos[pivot]
        rebuilt: dict = {}
        for tag, c in combo.items():
            for j, x in enumerate(rows[tag]):
                rebuilt[j] = rebuilt.get(j, 0) + c * x
        assert {j: x for j, x in rebuilt.items() if x} == row


def test_echelon_rejects_dependent_vectors():
    eb = EchelonBasis()
    assert eb.add({"a": 1, "b": 2})
    assert not eb.add({"a": 2, "b": 4})
    assert eb.add({"b": 1})
    assert eb.contains({"a": 5})


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=4, max_cols=4), st.lists(small, min_size=4, max_size=4))
def test_solve_linear_against_sympy(rows, x0):
    n = len(rows[0])
    x0 = x0[:n]
    rhs = [sum(a * b for a, b in zip(r, x0)) for r in rows]
    sol = solve_linear([{j: x for j, x in enumerate(r)} for r in rows], rhs, n)
    assert sol is not None
    for r, b in zip(rows, rhs):
        assert sum(a * x for a, x in zip(r, sol)) == b


def test_solve_linear_inconsistent():
    assert solve_linear([{0: 1}, {0: 1}], [1, 2], 1) is None


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=4, max_cols=5))
def test_nullspace_dimension(rows):
    n = len(rows[0])
    basis = nullspace([{j: x for j, x in enumerate(r)} for r in rows], n)
    assert len(basis) == n - sympy.Matrix(rows).rank()
    for x in basis:
        for r in rows:
            assert sum(a * b for a, b in zip(r, x)) == 0


# q-series

qseries = st.lists(fractions, min_size=5, max_size=5).map(lambda c: QSeries(4, tuple(c)))


@settings(max_examples=100, deadline=None)
@given(qseries, qseries, qseries)
def test_qseries_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    one = QSeries(4, (1,))
    assert a * one == a
    assert a - a == QSeries(4, ())


def test_qseries_product_truncates():
    x = QSeries.from_terms({1: 1}, 3)
    assert (x * x * x).coefficients == (0, 0, 0, 1)
    assert (x * x * x * x).coefficients == (0, 0, 0, 0)


def test_qseries_cutoff_mismatch():
    with pytest.raises(CutoffMismatch):
        QSeries(2, (1,)) + QSeries(3, (1,))
    with pytest.raises(CutoffMismatch):
        QSeries(2, (1,)) * QSeries(3, (1,))


def test_geometric_series_inverse():
    geo = QSeries(6, (1,) * 7)
    assert (geo * QSeries(6, (1, -1))).coefficients == (1, 0, 0, 0, 0, 0, 0)


# Laurent jets


def test_jet_product_tail():
    a = LaurentJet("s", {-1: 1, 0: 2}, 2)
    b = LaurentJet("s", {0: 1, 1: 3}, 3)
    p = a * b
    # unknown terms start at s^2 * s^0 and s^3 * s^-1
    assert p.tail_order == 2
    assert p.terms == {-1: 1, 0: 5, 1: 6}


def test_jet_coeff_beyond_tail_raises():
    with pytest.raises(ValueError):
        LaurentJet("s", {0: 1}, 2).coeff(2)
    with pytest.raises(ValueError):
        LaurentJet("s", {3: 1}, 2)


def test_jet_equal_mod():
    a = LaurentJet("s", {0: 1, 2: 5}, 4)
    b = LaurentJet("s", {0: 1, 3: 7}, 5)
    assert a.equal_mod(b, 2)
    assert not a.equal_mod(b, 3)
    with pytest.raises(ValueError):
        a.equal_mod(b, 5)


def test_jet_order():
    assert LaurentJet("s", {-2: 1, 3: 1}, 5).order() == -2
    assert LaurentJet("s", {}, 5).order() == 5


# misc


def test_graded_space():
    g = GradedSpace({0: ("a",), 1: ("b", "c")})
    assert g.dims == {0: 1, 1: 2}
    assert g.dim == 3
    assert g.labels(0) == ["a"]
    assert g.degree_of("c") == 1
    with pytest.raises(ValueError):
        GradedSpace({0: ("a",), 1: ("a",)})


@pytest.mark.parametrize("n,k", [(5, 2), (7, 0), (4, 4), (3, 5)])
def test_binomial_integers(n, k):
    assert binomial(n, k) == sympy.binomial(n, k)


def test_binomial_negative_upper():
    assert binomial(-1, 3) == -1
    assert binomial(-2, 2) == 3
    assert binomial(Fraction(1, 2), 2) == Fraction(-1, 8)


def test_fraction_round_trip():
    for x in (Fraction(-3, 4), Fraction(5), Fraction(0)):
        assert as_fraction(format_fraction(x)) == x
    assert format_fraction(Fraction(-22, 5)) == "-22/5"
    with pytest.raises(TypeError):
        as_fraction(0.5)
