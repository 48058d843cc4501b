#!/usr/bin/env python3
"""
Reduction tests: constructions, threshold maps, translations, verification reports.
"""
import copy

import networkx as nx

from generators import complete_bipartite, cube, prism
from graph_core import Graph, is_cobipartite_split, is_minimal_separator, make_cut, parse_graph, two_coloring
from oracle import max_minimal_separator_bruteforce
from reductions import (
    DegenerateInstanceError,
    ReductionError,
    ThresholdMap,
    cobipartite_reduction,
    compose_universal,
    line_graph,
    linegraph_reduction,
    subdivide_cubic,
    verify_reduction,
)
from testkit import C, K, Kab, P, S, exit_with, expect_raises

C6_PLUS = Graph.from_edges(
    8,
    [(0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (0, 5), (6, 3), (6, 4), (6, 5)],
)


# ---- threshold maps --------------------------------------------------------
def test_threshold_maps():
    assert ThresholdMap("identity").apply(4) == 4
    assert ThresholdMap("shift", {"offset": 1}).apply(4) == 5
    complement = ThresholdMap("complement", {"total": 6})
    assert complement.apply(2) == 4 and complement.direction == "min->max"
    assert ThresholdMap("identity").to_dict()["direction"] == "max->max"


# ---- subdivision -----------------------------------------------------------
def test_subdivide_k4():
    cert = subdivide_cubic(K(4))
    assert cert.target.order == 10 and cert.target.edge_count == 12
    assert two_coloring(cert.target) is not None
    report = verify_reduction(cert)
    assert report.passed, report.notes
    assert report.source_optimum == 4 and report.target_optimum == 4


def test_subdivide_other_cubic_graphs():
    for g, order in ((complete_bipartite(3, 3), 15), (prism(), 15), (cube(), 20)):
        cert = subdivide_cubic(g)
        assert cert.target.order == order
        report = verify_reduction(cert)
        assert report.passed, report.notes
        assert report.source_optimum == report.target_optimum


def test_subdivision_translations():
    cert = subdivide_cubic(K(4))
    cut = make_cut(K(4), S(0, 1))
    forward = cert.translate_forward(cut)
    assert bin(forward).count("1") == 4
    assert is_minimal_separator(cert.target, forward)
    back = cert.translate_back(forward)
    assert back.cutset_size == 4 and back.connected
    # {0, 1} cuts off the subdivision vertex of edge 01 and cannot be exchanged
    assert is_minimal_separator(cert.target, S(0, 1))
    back = cert.translate_back(S(0, 1))
    assert back.connected and back.cutset_size == 3


def test_subdivision_rejects_bad_input():
    err = expect_raises(ReductionError, subdivide_cubic, P(4))
    assert "not cubic" in str(err)
    two = parse_graph("\n".join(f"{u + o} {v + o}" for o in (0, 4) for u, v in K(4).edges()))
    expect_raises(ReductionError, subdivide_cubic, two)


# ---- co-bipartite ----------------------------------------------------------
def test_cobipartite_c6():
    cert = cobipartite_reduction(C(6))
    side_a, side_b = cert.sides
    assert is_cobipartite_split(cert.target, side_a, side_b)
    assert all(cert.target.degree(v) == 4 for v in cert.target.vertices)
    report = verify_reduction(cert)
    assert report.passed, report.notes
    assert report.source_optimum == 2 and report.target_optimum == 4
    assert report.target_optimum == cert.source.order - report.source_optimum


def test_cobipartite_c8():
    cert = cobipartite_reduction(C(8))
    report = verify_reduction(cert)
    assert report.passed, report.notes
    assert report.target_optimum == 8 - report.source_optimum


def test_cobipartite_preprocessing():
    # 6 sees every vertex of the other side; 7 sees none
    cert = cobipartite_reduction(C6_PLUS, (S(0, 1, 2, 6), S(3, 4, 5, 7)))
    assert cert.forced == [7] and cert.dropped == [6]
    assert cert.source.order == 6 and list(cert.origin) == [0, 1, 2, 3, 4, 5]
    report = verify_reduction(cert)
    assert report.passed, report.notes
    assert report.target_optimum == 6 - report.source_optimum


def test_cobipartite_errors():
    expect_raises(ReductionError, cobipartite_reduction, C(5))
    expect_raises(ReductionError, cobipartite_reduction, C(6), (S(0, 1, 2), S(3, 4, 5)))
    expect_raises(DegenerateInstanceError, cobipartite_reduction, Kab(2, 3))


# ---- line graph ------------------------------------------------------------
def test_line_graph_examples():
    for g, expected in ((C(4), C(4)), (Kab(1, 3), K(3)), (P(4), P(3))):
        L, index = line_graph(g)
        assert nx.is_isomorphic(L.to_networkx(), expected.to_networkx())
        assert len(index) == g.edge_count
    L, _ = line_graph(P(3))
    assert L.label(0) == "0-1"
    expect_raises(ReductionError, line_graph, Graph.from_edges(3, []))


def test_linegraph_reduction_examples():
    cert = linegraph_reduction(C(4))
    assert cert.plus.order == 8
    report = verify_reduction(cert)
    assert report.passed, report.notes
    assert report.source_optimum == 2 and report.target_optimum == 2
    assert report.out_of_range == [0, 1]
    assert report.extra["pendant_check"]["mismatched_thresholds"] == []

    report = verify_reduction(linegraph_reduction(K(4)))
    assert report.passed and report.source_optimum == 4 and report.target_optimum == 4

    report = verify_reduction(linegraph_reduction(P(2)))
    assert report.passed and report.source_optimum == 1 and report.target_optimum <= 1


def test_linegraph_rejects_disconnected():
    expect_raises(ReductionError, linegraph_reduction, parse_graph("0 1\n2 3\n"))


# ---- composition -----------------------------------------------------------
def test_compose_examples():
    cert = compose_universal([C(4), C(4)])
    assert cert.target.order == 9 and cert.target.label(cert.universal) == "universal"
    report = verify_reduction(cert)
    assert report.passed and report.target_optimum == 3 and report.source_optimum == 2

    report = verify_reduction(compose_universal([K(3)]))
    assert report.passed and report.source_optimum is None and report.target_optimum is None

    report = verify_reduction(compose_universal([P(3), K(5)]))
    assert report.passed and report.target_optimum == 2


def test_compose_back_translation_localises():
    cert = compose_universal([P(3), C(4)])
    i, mask = cert.translate_back(S(4, 6, 7))
    assert i == 1 and mask == S(1, 3)
    assert is_minimal_separator(cert.sources[i], mask)
    expect_raises(ReductionError, compose_universal, [])


def test_corrupted_certificate_fails():
    cert = copy.copy(compose_universal([P(3)]))
    cert.target = Graph.from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 3)])
    report = verify_reduction(cert)
    assert not report.passed
    assert not report.structure_ok
    assert report.first_violation == 1
    assert report.to_dict()["result"] == "FAIL"


def test_certificate_dicts():
    data = subdivide_cubic(K(4)).to_dict()
    assert data["kind"] == "subdivision" and len(data["vertex_map"]["edge_vertices"]) == 6
    data = cobipartite_reduction(C(6)).to_dict()
    assert data["threshold_map"]["params"] == {"total": 6}
    assert "input" in data


def test_composed_optimum_is_part_optimum_plus_one():
    parts = [C(5), P(4)]
    cert = compose_universal(parts)
    part_best = max(max_minimal_separator_bruteforce(p)[1] for p in parts)
    assert max_minimal_separator_bruteforce(cert.target)[1] == part_best + 1


if __name__ == "__main__":
    exit_with(globals(), "REDUCTIONS")
