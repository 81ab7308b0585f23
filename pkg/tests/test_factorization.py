from __future__ import annotations

import random
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confblocks.catalog import affine_sl2, lattice_catalog, minimal_model
from confblocks.factorization import (
    RankEngine,
    RankQuery,
    StableGraph,
    UnstableQueryError,
    UnstableVertexError,
    engine_for,
    enumerate_stable_graphs,
    invariance_check,
    random_full_degeneration,
    rank,
    rank_via_graph,
    trivalent_closed_graph,
)
from confblocks.verify import nonassociative_control_ring

RINGS = {
    "lattice1": lattice_catalog(1).ring,
    "lattice2": lattice_catalog(2).ring,
    "sl2_2": affine_sl2(2).ring,
    "lee_yang": minimal_model(2, 5).ring,
    "ising": minimal_model(3, 4).ring,
}


def test_base_cases():
    ring = RINGS["ising"]
    eng = RankEngine(ring)
    assert eng.rank(0, ["sigma", "sigma", "epsilon"]) == 1
    assert eng.rank(0, ["sigma", "sigma"]) == 1
    assert eng.rank(0, ["sigma", "epsilon"]) == 0
    assert eng.rank(0, ["V"]) == 1
    assert eng.rank(0, ["sigma"]) == 0
    assert eng.rank(0, []) == 1


def test_lee_yang_four_point():
    assert rank(RankQuery(0, ("X",) * 4, RINGS["lee_yang"])) == 2


def test_ising_values():
    eng = engine_for(RINGS["ising"])
    assert eng.rank(2, []) == 10
    assert eng.rank(0, ["sigma"] * 4) == 2


@pytest.mark.parametrize("name", sorted(RINGS))
def test_genus_one_counts_labels(name):
    ring = RINGS[name]
    assert engine_for(ring).rank(1, []) == len(ring.labels)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("g", range(5))
def test_group_like_closed_form(k, g):
    ring = lattice_catalog(k).ring
    assert engine_for(ring).rank(g, []) == (2 * k) ** g
    assert rank_via_graph(trivalent_closed_graph(g, ring.vacuum), ring) == (2 * k) ** g


def test_negative_genus():
    with pytest.raises(UnstableQueryError):
        engine_for(RINGS["ising"]).rank(-1, [])


def test_memo_off_agrees():
    ring = RINGS["sl2_2"]
    a, b = RankEngine(ring, memoize=True), RankEngine(ring, memoize=False)
    for g in range(3):
        for ins in combinations_with_replacement(ring.labels, 2):
            assert a.rank(g, ins) == b.rank(g, ins)


# properties


@pytest.mark.parametrize("name", sorted(RINGS))
def test_vacuum_insertion_is_free(name):
    ring = RINGS[name]
    eng = engine_for(ring)
    for g in range(3):
        for n in range(3):
            for ins in combinations_with_replacement(ring.labels, n):
                assert eng.rank(g, list(ins) + [ring.vacuum]) == eng.rank(g, ins)


@pytest.mark.parametrize("name", sorted(RINGS))
def test_duality_invariance(name):
    ring = RINGS[name]
    eng = engine_for(ring)
    for g in range(2):
        for ins in combinations_with_replacement(ring.labels, 3):
            assert eng.rank(g, ins) == eng.rank(g, [ring.dual[x] for x in ins])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(RINGS)), st.integers(0, 2), st.lists(st.integers(0, 10), max_size=4), st.integers(0, 10**6))
def test_random_degeneration_agrees(name, g, picks, seed):
    ring = RINGS[name]
    ins = [ring.labels[p % len(ring.labels)] for p in picks]
    graph = random_full_degeneration(g, ins, ring.vacuum, random.Random(seed))
    assert graph.is_stable() and graph.is_connected()
    assert all(gv == 0 and graph.valence(v) == 3 for v, gv in enumerate(graph.vertices))
    assert rank_via_graph(graph, ring) == engine_for(ring).rank(g, ins)


@pytest.mark.parametrize("g,n", [(0, 4), (0, 5), (1, 1), (1, 2), (2, 0), (2, 1)])
def test_every_stable_graph_gives_the_same_rank(g, n):
    for name in ("ising", "sl2_2", "lattice2"):
        ring = RINGS[name]
        ins = [ring.labels[i % len(ring.labels)] for i in range(1, n + 1)]
        expected = engine_for(ring).rank(g, ins)
        graphs = enumerate_stable_graphs(g, ins, ring.vacuum)
        assert graphs
        for graph in graphs:
            assert graph.genus == g
            assert rank_via_graph(graph, ring) == expected


def test_stable_graph_counts():
    # closed genus 2 has 7 stable graphs; M_{0,4} has 1 + 3; M_{1,1} has 2
    assert len(enumerate_stable_graphs(2, [])) == 7
    assert len(enumerate_stable_graphs(0, list("abcd"))) == 4
    assert len(enumerate_stable_graphs(1, ["a"])) == 2


def test_canonical_form_is_isomorphism_invariant():
    g1 = StableGraph((0, 1), ((0, 1),), ((0, "a"), (0, "b")))
    g2 = StableGraph((1, 0), ((1, 0),), ((1, "a"), (1, "b")))
    assert g1.canonical() == g2.canonical()


def test_unstable_vertex_rejected():
    with pytest.raises(UnstableVertexError):
        rank_via_graph(StableGraph((0,), (), ((0, "1"),)), RINGS["lattice1"])


def test_disconnected_graph_is_a_product():
    ring = RINGS["ising"]
    graph = StableGraph((1, 1), (), ((0, "sigma"), (1, "sigma")))
    assert not graph.is_connected()
    one = engine_for(ring).rank(1, ["sigma"])
    assert rank_via_graph(graph, ring) == one * one


def test_invariance_check_passes_on_catalogs():
    for ring in RINGS.values():
        rep = invariance_check(RankQuery(2, (ring.labels[-1],), ring), trials=5, seed=1)
        assert rep.agree
        assert len(rep.values) == 5


def test_invariance_check_witnesses_nonassociative_ring():
    bad = nonassociative_control_ring()
    rep = invariance_check(RankQuery(0, ("V", "V", "X", "X"), bad), trials=20, seed=0)
    assert not rep.agree
    assert {val for _, _, val in rep.witnesses} == {2}
