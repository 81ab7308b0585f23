from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confblocks.catalog import FusionRing, lattice_catalog, minimal_model
from confblocks.fock import FockModule, FockVOA
from confblocks.genus_zero import (
    InsufficientPointsError,
    StrayPoleError,
    truncated_coinvariant_dim,
    oracle_vs_fusion,
    zhu_element,
)
from confblocks.nodal import INF, RationalSection
from confblocks.voa import ModeElement

H = (0, (1,))
VAC = (0, ())
OMEGA = (0, (1, 1))
PTS = (0, 1, -1)


@pytest.fixture(scope="module")
def voa():
    return FockVOA(4, k=1)


@pytest.fixture(scope="module")
def voa2():
    return FockVOA(4, k=2)


# Zhu Lie algebra elements


def test_h_with_inverse_z(voa):
    mu = RationalSection(0, {Fraction(0): {1: Fraction(1)}}, {})
    el = zhu_element({H: Fraction(1)}, mu, (0, INF), voa)
    at0, atinf = el.per_point
    assert at0 == ModeElement.single(H, -1)
    assert atinf == ModeElement.single(H, 1)


@pytest.mark.parametrize("poles", [{0: 1}, {0: 2, 1: -1}, {0: Fraction(1, 3), -1: 5}])
def test_residues_of_h_components_cancel(voa, poles):
    # f dz has residue f_{-1} at a finite point and -(w-coefficient of f) at infinity
    mu = RationalSection(0, {Fraction(p): {1: Fraction(c)} for p, c in poles.items()}, {1: Fraction(2)})
    pts = [Fraction(p) for p in poles] + [INF]
    el = zhu_element({H: Fraction(1)}, mu, pts, voa)
    finite = sum(comp.terms.get((H, -1), 0) for comp in el.per_point[:-1])
    assert finite - el.per_point[-1].terms.get((H, 1), 0) == 0


def test_vacuum_components_act_as_zero(voa):
    # dz / z^2 is regular at infinity and has no residue anywhere
    mu = RationalSection(1, {Fraction(0): {2: Fraction(1)}}, {})
    el = zhu_element({VAC: Fraction(1)}, mu, PTS, voa)
    assert el.per_point[0] == ModeElement.single(VAC, -2)
    mod = FockModule(voa, 1, 3)
    for comp in el.per_point:
        assert all(m != -1 for _, m in comp.terms)
        for v in mod.basis(2):
            assert mod.act(comp, {v: Fraction(1)}) == {}


def test_omega_with_constant_vector_field_translates(voa):
    mu = RationalSection(-1, {}, {0: Fraction(1)})
    el = zhu_element(voa.omega, mu, PTS, voa)
    mod = FockModule(voa, 0, 4)
    for comp in el.per_point:
        for v in mod.basis(3):
            assert mod.act(comp, {v: Fraction(1)}) == mod.L(-1, {v: Fraction(1)})


def test_stray_pole(voa):
    mu = RationalSection(0, {Fraction(2): {1: Fraction(1)}}, {})
    with pytest.raises(StrayPoleError):
        zhu_element({H: Fraction(1)}, mu, PTS, voa)


def test_wrong_differential_degree(voa):
    with pytest.raises(ValueError):
        zhu_element({H: Fraction(1)}, RationalSection(1, {}, {0: Fraction(1)}), PTS, voa)


def test_infinity_needs_quasi_primary(voa):
    # h_{-2} 1 is not quasi-primary: L_1 of it is a multiple of h
    B = {(0, (2,)): Fraction(1)}
    mu = RationalSection(-1, {Fraction(0): {1: Fraction(1)}}, {})
    with pytest.raises(ValueError):
        zhu_element(B, mu, (0, INF), voa)


# coinvariant estimates


def test_examples(voa, voa2):
    est = truncated_coinvariant_dim([0, 1, 1], PTS, voa, 4)
    assert est.estimate == 1 and est.stabilized
    assert truncated_coinvariant_dim([1, 1, 1], PTS, voa, 4).estimate == 0
    assert truncated_coinvariant_dim([1, 1, 2], PTS, voa2, 4).estimate == 1


def test_estimate_bookkeeping(voa):
    est = truncated_coinvariant_dim([1, 1, 0], PTS, voa, 3)
    assert est.estimate == est.ambient_dim - est.relation_rank
    assert est.estimate >= 0
    assert set(est.history) == {2, 3}
    assert est.stabilized == (est.history[2] == est.history[3])


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=3, max_size=3), st.integers(0, 3))
def test_charge_violation_gives_zero(labels, D):
    voa = FockVOA(4, k=2)
    est = truncated_coinvariant_dim(labels, PTS, voa, D)
    if sum(labels) % 4:
        assert est.estimate == 0


def test_insufficient_points(voa):
    with pytest.raises(InsufficientPointsError):
        truncated_coinvariant_dim([0, 0], (0, 1), voa, 2)


def test_points_must_be_finite_and_distinct(voa):
    with pytest.raises(ValueError):
        truncated_coinvariant_dim([0, 0, 0], (0, 1, INF), voa, 2)
    with pytest.raises(ValueError):
        truncated_coinvariant_dim([0, 0, 0], (0, 1, 1), voa, 2)


def test_point_placement_does_not_matter(voa):
    for labels in ([0, 1, 1], [1, 0, 0], [0, 0, 0]):
        a = truncated_coinvariant_dim(labels, PTS, voa, 3).estimate
        b = truncated_coinvariant_dim(labels, (2, Fraction(1, 2), -3), voa, 3).estimate
        assert a == b


# oracle


def test_oracle_lattice1():
    rep = oracle_vs_fusion(lattice_catalog(1), 4)
    assert len(rep.rows) == 8
    assert rep.ok, rep.mismatches


def test_oracle_lattice2_small_cutoff():
    rep = oracle_vs_fusion(lattice_catalog(2), 3)
    assert len(rep.rows) == 64
    assert rep.ok, rep.mismatches


def test_oracle_detects_corrupted_entry():
    ring = lattice_catalog(1).ring
    fusion = dict(ring.fusion)
    fusion[("0", "1", "1")] = 0
    fusion[("1", "0", "1")] = 0
    fusion[("1", "1", "0")] = 0
    bad = FusionRing(ring.labels, ring.vacuum, ring.dual, ring.weights, fusion, ring.central_charge)
    rep = oracle_vs_fusion(lattice_catalog(1), 3, ring=bad)
    assert {r[0] for r in rep.mismatches} == {("0", "1", "1"), ("1", "0", "1"), ("1", "1", "0")}


def test_oracle_rejects_non_lattice():
    with pytest.raises(ValueError):
        oracle_vs_fusion(minimal_model(3, 4), 2)
