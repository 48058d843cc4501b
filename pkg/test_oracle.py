#!/usr/bin/env python3
"""
Oracle tests: exhaustive searches, delay enumeration, scale guard.
"""
import os

import networkx as nx

from generators import random_gnp, random_weights
from graph_core import ContractError, Graph, members, parse_graph
from oracle import (
    ScaleGuardError,
    clique_minimal_separators,
    enum_minimal_separators_bruteforce,
    enum_minimal_separators_delay,
    is_maximal_independent,
    max_connected_cut_bruteforce,
    max_minimal_separator_bruteforce,
    max_minimal_separator_enum,
    maximal_bicliques_bruteforce,
    min_independent_dominating_set_bruteforce,
    oracle_max_n,
    upper_bound,
)
from testkit import C, K, Kab, P, S, exit_with, expect_raises, grid3x3

TWO_K4 = Graph.from_edges(
    7, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)]
)


def _sets(seps):
    return [sep.members for sep in seps]


# ---- minimal separators ----------------------------------------------------
def test_bruteforce_enumeration_examples():
    c5 = enum_minimal_separators_bruteforce(C(5))
    assert _sets(c5) == [S(0, 2), S(0, 3), S(1, 3), S(1, 4), S(2, 4)]
    assert _sets(enum_minimal_separators_bruteforce(P(4))) == [S(1), S(2)]
    assert enum_minimal_separators_bruteforce(K(4)) == []


def test_delay_enumeration_examples():
    assert sorted(_sets(enum_minimal_separators_delay(C(5)))) == sorted(_sets(enum_minimal_separators_bruteforce(C(5))))
    assert list(enum_minimal_separators_delay(K(4))) == []
    assert _sets(enum_minimal_separators_delay(P(3))) == [S(1)]


def test_delay_matches_bruteforce_on_random_graphs():
    for seed in range(30):
        g = random_gnp(4 + seed % 6, 0.45, seed=seed)
        delay = _sets(enum_minimal_separators_delay(g))
        assert len(delay) == len(set(delay)), f"seed {seed}: duplicate output"
        assert sorted(delay) == sorted(_sets(enum_minimal_separators_bruteforce(g))), f"seed {seed}"


def test_delay_handles_disconnected_graph():
    g = parse_graph("0 1\n1 2\n3 4\n")
    assert sorted(_sets(enum_minimal_separators_delay(g))) == sorted([0, S(1)])


def test_cycle_separator_count():
    for n in range(4, 10):
        assert len(list(enum_minimal_separators_delay(C(n)))) == n * (n - 3) // 2


def test_max_separator_examples():
    sep, value = max_minimal_separator_bruteforce(C(4))
    assert value == 2 and sep.members in (S(0, 2), S(1, 3))
    assert max_minimal_separator_bruteforce(grid3x3())[1] == 3
    # side B = {2,3,4} separates the two vertices of side A
    sep, value = max_minimal_separator_bruteforce(Kab(2, 3))
    assert value == 3 and sep.members == S(2, 3, 4)
    assert max_minimal_separator_bruteforce(K(5)) is None


def test_enum_optimum_matches_bruteforce():
    for seed in range(20):
        g = random_gnp(5 + seed % 5, 0.5, seed=100 + seed)
        for weighted, h in ((False, g), (True, random_weights(g, 1, 5, seed=seed))):
            brute = max_minimal_separator_bruteforce(h, weighted)
            enum = max_minimal_separator_enum(h, weighted)
            if brute is None:
                assert enum is None
                continue
            assert brute[1] == enum[1], f"seed {seed} weighted={weighted}"
            assert brute[0].members == enum[0].members


def test_weighted_optimum_prefers_heavy_set():
    g = Graph.from_edges(4, C(4).edges(), weights=[1, 5, 1, 5])
    sep, value = max_minimal_separator_bruteforce(g, weighted=True)
    assert sep.members == S(1, 3) and value == 10


def test_upper_bound():
    assert upper_bound(P(2)) == -1
    assert upper_bound(P(3)) == 1
    g = Graph.from_edges(4, C(4).edges(), weights=[1, 5, 2, 5])
    assert upper_bound(g, weighted=True) == 10


def test_clique_minimal_separators():
    assert _sets(clique_minimal_separators(TWO_K4)) == [S(3)]
    assert clique_minimal_separators(C(4)) == []
    assert _sets(clique_minimal_separators(P(4))) == [S(1), S(2)]


# ---- scale guard -----------------------------------------------------------
def test_scale_guard_refuses_large_inputs():
    err = expect_raises(ScaleGuardError, enum_minimal_separators_bruteforce, P(6), 5)
    assert "6 vertices" in str(err)
    assert isinstance(err, ValueError)
    assert len(enum_minimal_separators_bruteforce(P(6), 6)) == 4


def test_guard_resolution_order():
    saved = os.environ.get("SEPKIT_ORACLE_MAX_N")
    try:
        os.environ["SEPKIT_ORACLE_MAX_N"] = "7"
        assert oracle_max_n() == 7
        assert oracle_max_n(3) == 3
        os.environ["SEPKIT_ORACLE_MAX_N"] = "lots"
        assert oracle_max_n() == 20
    finally:
        if saved is None:
            os.environ.pop("SEPKIT_ORACLE_MAX_N", None)
        else:
            os.environ["SEPKIT_ORACLE_MAX_N"] = saved


# ---- cuts ------------------------------------------------------------------
def test_connected_cut_examples():
    cut = max_connected_cut_bruteforce(K(4))
    assert cut.cutset_size == 4 and cut.connected
    assert max_connected_cut_bruteforce(C(4), require_nontrivial=True).cutset_size == 2
    assert max_connected_cut_bruteforce(P(2), require_nontrivial=True) is None
    expect_raises(ContractError, max_connected_cut_bruteforce, parse_graph("0 1\n2 3\n"))


def test_connected_cut_matches_networkx_count():
    g = random_gnp(8, 0.5, seed=7, connected=True)
    cut = max_connected_cut_bruteforce(g)
    G = g.to_networkx()
    a = set(members(cut.side_a))
    assert nx.is_connected(G.subgraph(a)) and nx.is_connected(G.subgraph(set(G) - a))
    assert nx.cut_size(G, a) == cut.cutset_size


# ---- independent sets / bicliques ------------------------------------------
def test_min_independent_dominating_set_examples():
    for g, size in ((C(6), 2), (P(4), 2), (K(3), 1)):
        x = min_independent_dominating_set_bruteforce(g)
        assert bin(x).count("1") == size
        assert is_maximal_independent(g, x)


def test_min_mis_must_hit_both_sides():
    x = min_independent_dominating_set_bruteforce(C(6), must_hit=(S(0, 2, 4), S(1, 3, 5)))
    assert x & S(0, 2, 4) and x & S(1, 3, 5)
    assert bin(x).count("1") == 2


def test_bicliques_examples():
    matching = Graph.from_edges(6, [(0, 3), (1, 4), (2, 5)])
    found = maximal_bicliques_bruteforce(matching, (S(0, 1, 2), S(3, 4, 5)))
    assert [b.members for b in found] == [S(0, 1, 2), S(0, 3), S(1, 4), S(2, 5), S(3, 4, 5)]
    assert [b.two_sided for b in found] == [False, True, True, True, False]

    found = maximal_bicliques_bruteforce(Kab(2, 2), (S(0, 1), S(2, 3)))
    assert [b.members for b in found] == [S(0, 1, 2, 3)]

    empty = Graph.from_edges(4, [])
    assert [b.members for b in maximal_bicliques_bruteforce(empty, (S(0, 1), S(2, 3)))] == [S(0, 1), S(2, 3)]


def test_bicliques_reject_bad_bipartition():
    expect_raises(ContractError, maximal_bicliques_bruteforce, Kab(2, 2), (S(0, 2), S(1, 3)))
    expect_raises(ContractError, maximal_bicliques_bruteforce, Kab(2, 2), (S(0, 1), S(2)))


if __name__ == "__main__":
    exit_with(globals(), "ORACLE")
