from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from confblocks.exact import LaurentJet
from confblocks.fock import FockVOA
from confblocks.nodal import (
    INF,
    ChiralJetElement,
    InfeasibleSystem,
    KDifferentialJet,
    OrderViolation,
    RationalSection,
    glue_check,
    k_residue,
    nodal_chiral_check,
    prescribe_jets_p1,
)
from confblocks.verify import check_rr, random_jet, rr_instances

H = (0, (1,))
OMEGA = (0, (1, 1))


def jet(terms, tail=4):
    return LaurentJet("s", {e: Fraction(c) for e, c in terms.items()}, tail)


def test_k_residue_examples():
    assert k_residue(jet({-1: 1}), 1) == 1
    assert k_residue(jet({-2: 1, -1: 3}), 2) == 1
    assert k_residue(jet({0: 5, 1: 1}), 0) == 5
    assert k_residue(jet({1: 1}), 1) == 0


def test_k_residue_order_violation():
    with pytest.raises(OrderViolation):
        k_residue(jet({-3: 1}), 2)


def test_glue_examples():
    assert glue_check(KDifferentialJet(0, jet({0: 2, 1: 1}), jet({0: 2, 1: -1})))
    assert glue_check(KDifferentialJet(1, jet({-1: 1}), jet({-1: -1})))
    assert glue_check(KDifferentialJet(2, jet({-2: 1}), jet({-2: 1})))
    assert not glue_check(KDifferentialJet(2, jet({-2: 1}), jet({-2: -1})))
    assert not glue_check(KDifferentialJet(1, jet({-2: 1}), jet({})))


@pytest.mark.parametrize("k", [0, 1])
def test_glue_matches_classical_description(k):
    rng = random.Random(k)
    for n in range(50):
        plus, minus = random_jet(rng, -k, 3), random_jet(rng, -k, 3)
        if n % 2:
            terms = dict(minus.terms)
            terms[-k] = (-1 if k % 2 else 1) * plus.coeff(-k)
            minus = LaurentJet("s", terms, 3)
        if k == 0:
            expected = plus.coeff(0) == minus.coeff(0)
        else:
            expected = plus.coeff(-1) + minus.coeff(-1) == 0
        assert glue_check(KDifferentialJet(k, plus, minus)) == expected


@settings(max_examples=200, deadline=None)
@given(st.integers(-3, 4), st.integers(0, 10**6))
def test_glue_swap_symmetry(k, seed):
    rng = random.Random(seed)
    low = -max(k, 0) - rng.randint(0, 1)
    plus, minus = random_jet(rng, low, 3), random_jet(rng, low, 3)
    if rng.random() < 0.5 and k >= -2:
        terms = dict(minus.terms)
        terms[-k] = (-1 if k % 2 else 1) * plus.coeff(-k)
        minus = LaurentJet("s", terms, 3)
    assert glue_check(KDifferentialJet(k, plus, minus)) == glue_check(KDifferentialJet(k, minus, plus))


# chiral data at a node


@pytest.fixture(scope="module")
def voa():
    return FockVOA(3, k=1)


def test_degree_one_theta_matched(voa):
    # h pairs with functions; its degree-0 mode is h_[0] and theta fixes it
    sigma = ChiralJetElement({H: KDifferentialJet(0, jet({0: 3, 2: 1}), jet({0: 3}))})
    assert nodal_chiral_check(sigma, voa)
    sigma = ChiralJetElement({H: KDifferentialJet(0, jet({0: 3}), jet({0: -3}))})
    assert not nodal_chiral_check(sigma, voa)


def test_order_gate(voa):
    sigma = ChiralJetElement({H: KDifferentialJet(0, jet({-1: 1, 0: 3}), jet({0: 3}))})
    assert not nodal_chiral_check(sigma, voa)


def test_omega_sign_flip(voa):
    plus = jet({1: 2})
    assert nodal_chiral_check(ChiralJetElement({OMEGA: KDifferentialJet(-1, plus, jet({1: -2}))}), voa)
    assert not nodal_chiral_check(ChiralJetElement({OMEGA: KDifferentialJet(-1, plus, jet({1: 2}))}), voa)


def test_deep_perturbation_is_invisible(voa):
    base = {OMEGA: KDifferentialJet(-1, jet({1: 2}, 6), jet({1: -2}, 6))}
    deep = {
        H: KDifferentialJet(0, jet({4: 7}, 6), jet({5: -1}, 6)),
        OMEGA: KDifferentialJet(-1, jet({1: 2, 5: 9}, 6), jet({1: -2, 4: 1}, 6)),
    }
    assert nodal_chiral_check(ChiralJetElement(base), voa)
    assert nodal_chiral_check(ChiralJetElement(deep), voa)


def test_wrong_differential_degree(voa):
    with pytest.raises(ValueError):
        nodal_chiral_check(ChiralJetElement({H: KDifferentialJet(1, jet({0: 1}), jet({0: 1}))}), voa)


# rational sections


z, s = sympy.symbols("z s")


def _sympy_function(sec: RationalSection):
    f = sum(
        (sympy.Rational(c.numerator, c.denominator) * (z - sympy.Rational(p.numerator, p.denominator)) ** (-m)
         for p, orders in sec.poles.items() for m, c in orders.items()),
        sympy.Integer(0),
    )
    f += sum((sympy.Rational(c.numerator, c.denominator) * z**e for e, c in sec.polynomial.items()), sympy.Integer(0))
    return f


def _sympy_jet(sec: RationalSection, point, upto: int) -> dict:
    f = _sympy_function(sec)
    if point == INF:
        g = f.subs(z, 1 / s) * (-(s**-2)) ** sec.k
    else:
        g = f.subs(z, sympy.Rational(point.numerator, point.denominator) + s)
    low = -20
    ser = sympy.series(sympy.together(g), s, 0, upto).removeO()
    ser = sympy.expand(ser)
    out = {}
    for e in range(low, upto):
        c = ser.coeff(s, e)
        if c:
            out[e] = Fraction(int(c.p), int(c.q))
    return out


SECTIONS = [
    RationalSection(1, {Fraction(1): {1: Fraction(-1)}}, {}),
    RationalSection(0, {Fraction(0): {2: Fraction(3)}, Fraction(-1): {1: Fraction(1, 2)}}, {2: Fraction(1)}),
    RationalSection(2, {Fraction(1, 2): {3: Fraction(1)}}, {0: Fraction(-2)}),
    RationalSection(-1, {}, {0: Fraction(1), 1: Fraction(2), 2: Fraction(5)}),
]


@pytest.mark.parametrize("sec", SECTIONS)
@pytest.mark.parametrize("point", [Fraction(0), Fraction(1), Fraction(-2), Fraction(1, 2), INF])
def test_expansion_matches_sympy(sec, point):
    got = sec.expand(point, 4)
    assert {e: c for e, c in got.terms.items() if c} == _sympy_jet(sec, point, 4)


def test_residue_example():
    sec = prescribe_jets_p1([Fraction(0)], 1, (0, -1), 1, pole_points=[Fraction(1)])
    assert sec.expand(Fraction(0), 1).coeff(-1) == 1
    res = sec.residues()
    assert res[Fraction(0)] == 1
    assert sum(res.values()) == 0


def test_function_with_prescribed_values():
    sec = prescribe_jets_p1([Fraction(1), Fraction(2)], 0, (0, 0), 2)
    f = _sympy_function(sec)
    assert f.subs(z, 1) == 1
    assert f.subs(z, 2) == 0
    assert sympy.diff(f, z).subs(z, 1) == 0
    assert sympy.diff(f, z).subs(z, 2) == 0


@pytest.mark.parametrize("case", rr_instances(30, seed=7), ids=lambda c: f"k{c[1]}-n{len(c[0])}")
def test_prescribed_jets_round_trip(case):
    assert check_rr(*case)


def test_prescribed_jets_checked_by_sympy():
    pts = [Fraction(0), Fraction(2), Fraction(-1)]
    for k in (0, 1, 2):
        sec = prescribe_jets_p1(pts, k, (1, 1), 3)
        for n, q in enumerate(pts):
            want = {1: Fraction(1)} if n == 1 else {}
            assert _sympy_jet(sec, q, 3) == want


def test_no_pole_allowance_is_infeasible():
    # a regular function with a simple zero at 0 and value 1 at 1 needs a pole
    with pytest.raises(InfeasibleSystem):
        prescribe_jets_p1([Fraction(0), Fraction(1)], 0, (0, 1), 2, pole_points=[Fraction(5)], pole_bound=0)


def test_points_must_be_distinct():
    with pytest.raises(ValueError):
        prescribe_jets_p1([Fraction(0), INF], 0, (0, 0), 1)
