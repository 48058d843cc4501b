#!/usr/bin/env python3
"""
Acceptance corpora for sepkit
Seeded random graphs plus the fixed families, checked end to end against the
exhaustive oracles: solver decisions, DP optima, decomposition widths,
enumeration, and every reduction at every threshold.
"""
import json
from functools import lru_cache
from pathlib import Path

import numpy as np

from fpt_solver import DecompositionTree, find_sep, solve
from generators import (
    complete,
    complete_bipartite,
    cube,
    cycle,
    grid,
    path,
    prism,
    random_bipartite,
    random_cubic,
    random_gnp,
    random_weights,
)
from graph_core import is_claw_free, is_clique, is_minimal_separator, max_degree
from oracle import (
    enum_minimal_separators_bruteforce,
    enum_minimal_separators_delay,
    max_minimal_separator_bruteforce,
)
from reductions import (
    DegenerateInstanceError,
    cobipartite_reduction,
    compose_universal,
    linegraph_reduction,
    subdivide_cubic,
    verify_reduction,
)
from td_engine import assemble_td, heuristic_td, max_minimal_separator_dp, validate_td
from testkit import exit_with


def _corpus_seed() -> int:
    try:
        return json.loads((Path(__file__).resolve().parent / "config.json").read_text())["corpus_seed"]
    except Exception:
        return 20260226


@lru_cache(maxsize=None)
def random_corpus():
    rng = np.random.default_rng(_corpus_seed())
    graphs = []
    for _ in range(200):
        n = int(rng.integers(4, 13))
        p = float(rng.choice([0.2, 0.4, 0.6]))
        graphs.append(random_gnp(n, p, seed=int(rng.integers(1 << 31)), connected=True))
    return tuple(graphs)


@lru_cache(maxsize=None)
def family_corpus():
    graphs = [path(n) for n in range(2, 9)]
    graphs += [cycle(n) for n in range(4, 10)]
    graphs += [grid(r, c) for r in range(2, 4) for c in range(2, 5)]
    graphs += [complete(n) for n in range(1, 7)]
    graphs += [complete_bipartite(a, b) for a in range(1, 4) for b in range(1, 5)]
    return tuple(graphs)


def all_graphs():
    return family_corpus() + random_corpus()


@lru_cache(maxsize=None)
def optimum(g, weighted=False):
    best = max_minimal_separator_bruteforce(g, weighted)
    return best[1] if best is not None else -1


# ---- solver and DP ---------------------------------------------------------
def test_solve_agrees_with_bruteforce():
    for idx, g in enumerate(all_graphs()):
        opt = optimum(g)
        for k in range(0, g.order + 1):
            res = solve(g, k)
            assert res.decision == (opt >= k), f"graph {idx}: k={k}, optimum {opt}"
            if res.decision:
                assert res.certificate.size >= k
                assert is_minimal_separator(g, res.certificate.members)
            assert res.stats.clique_splits <= g.order, f"graph {idx}: {res.stats.clique_splits} splits"


def test_dp_agrees_with_bruteforce():
    for idx, g in enumerate(all_graphs()):
        dp = max_minimal_separator_dp(g, heuristic_td(g))
        assert (dp[1] if dp else -1) == optimum(g), f"graph {idx}"


def test_assembled_width_bound():
    for idx, g in enumerate(all_graphs()):
        if is_clique(g, g.vertex_mask):
            continue
        for k in (3, 4, 5):
            outcome = find_sep(g, 0, k)
            if not isinstance(outcome, DecompositionTree):
                continue
            for refine in (False, True):
                td = assemble_td(outcome, refine=refine)
                assert td.width <= 2 * k - 2, f"graph {idx}, k={k}: width {td.width}"
                assert validate_td(g, td), f"graph {idx}, k={k}, refine={refine}"
            dp = max_minimal_separator_dp(g, td)
            assert (dp[1] if dp else -1) == optimum(g), f"graph {idx}, k={k}"


def test_weighted_agrees_with_bruteforce():
    for idx, g in enumerate(random_corpus()):
        h = random_weights(g, 1, 5, seed=idx)
        opt = optimum(h, True)
        for k in range(0, h.weight_of(h.vertex_mask) + 1):
            res = solve(h, k, weighted=True)
            assert res.decision == (opt >= k), f"graph {idx}: k={k}, optimum {opt}"
            if res.decision:
                assert res.value >= k and h.weight_of(res.certificate.members) == res.value


# ---- enumeration -----------------------------------------------------------
def test_delay_enumeration_agrees_with_bruteforce():
    for idx, g in enumerate(all_graphs()[:120]):
        delay = sorted(sep.members for sep in enum_minimal_separators_delay(g))
        brute = [sep.members for sep in enum_minimal_separators_bruteforce(g)]
        assert delay == sorted(brute), f"graph {idx}"


def test_cycle_counts():
    for n in range(4, 13):
        assert len(list(enum_minimal_separators_delay(cycle(n)))) == n * (n - 3) // 2
    for n in range(1, 9):
        assert list(enum_minimal_separators_delay(complete(n))) == []


# ---- reductions ------------------------------------------------------------
def _assert_pass(cert, label):
    report = verify_reduction(cert)
    assert report.passed, f"{label}: {report.notes}"
    return report


def test_cubic_reductions():
    fixed = [complete(4), complete_bipartite(3, 3), prism(), cube()]
    rng = np.random.default_rng(_corpus_seed() + 1)
    randoms = [random_cubic(int(rng.choice([4, 6, 8, 10])), seed=s) for s in range(20)]
    for idx, g in enumerate(fixed + randoms):
        cert = subdivide_cubic(g)
        assert max_degree(cert.target) <= 3, f"cubic {idx}"
        report = _assert_pass(cert, f"cubic {idx}")
        assert report.source_optimum == report.target_optimum


def test_cobipartite_reductions():
    certs = [cobipartite_reduction(cycle(6)), cobipartite_reduction(cycle(8))]
    seed = 0
    while len(certs) < 22 and seed < 500:
        a, b = 3 + seed % 3, 3 + (seed // 3) % 3
        g = random_bipartite(a, b, 0.5, seed=seed)
        seed += 1
        try:
            certs.append(cobipartite_reduction(g))
        except DegenerateInstanceError:
            continue
    assert len(certs) == 22
    for idx, cert in enumerate(certs):
        report = _assert_pass(cert, f"cobipartite {idx}")
        if report.source_optimum is not None:
            assert cert.source.order - report.source_optimum == report.target_optimum


def test_linegraph_reductions():
    graphs = [cycle(4), complete(4), path(5)]
    rng = np.random.default_rng(_corpus_seed() + 2)
    for s in range(20):
        n = int(rng.integers(3, 8))
        graphs.append(random_gnp(n, 0.45, seed=s, connected=True))
    for idx, g in enumerate(graphs):
        cert = linegraph_reduction(g)
        assert is_claw_free(cert.target), f"linegraph {idx}"
        report = _assert_pass(cert, f"linegraph {idx}")
        assert report.extra["pendant_check"]["mismatched_thresholds"] == []


def test_composition_reductions():
    rng = np.random.default_rng(_corpus_seed() + 3)
    for s in range(20):
        parts = [
            random_gnp(int(rng.integers(3, 6)), float(rng.choice([0.3, 0.6, 0.9])), seed=100 * s + i)
            for i in range(int(rng.integers(1, 4)))
        ]
        cert = compose_universal(parts)
        report = _assert_pass(cert, f"composition {s}")
        best = max((optimum(p) for p in parts), default=-1)
        if best >= 0:
            assert report.target_optimum == best + 1


if __name__ == "__main__":
    exit_with(globals(), "ACCEPTANCE")
