"""
Graph Generators for sepkit
Deterministic graph families for `sepkit gen` and the seeded test corpora.
Equal parameters and seed always give byte-identical serialized output.
"""
import logging
from typing import Optional, Tuple

import networkx as nx
import numpy as np

from graph_core import Graph, is_connected

logger = logging.getLogger(__name__)

FAMILIES = (
    "path",
    "cycle",
    "grid",
    "complete",
    "complete-bipartite",
    "random-gnp",
    "random-cubic",
    "random-bipartite",
)
MAX_ATTEMPTS = 10000


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_networkx(nx.path_graph(n))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_networkx(nx.cycle_graph(n))


def grid(rows: int, cols: int) -> Graph:
    """Vertex (i, j) gets id i * cols + j."""
    if rows < 1 or cols < 1:
        raise ValueError("grid needs rows, cols >= 1")
    return Graph.from_networkx(nx.grid_2d_graph(rows, cols))


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete graph needs n >= 1")
    return Graph.from_networkx(nx.complete_graph(n))


def complete_bipartite(a: int, b: int) -> Graph:
    """Side A is 0..a-1, side B is a..a+b-1."""
    if a < 1 or b < 1:
        raise ValueError("complete bipartite graph needs both sides >= 1")
    return Graph.from_networkx(nx.complete_bipartite_graph(a, b))


def prism() -> Graph:
    return Graph.from_networkx(nx.circular_ladder_graph(3))


def cube() -> Graph:
    return Graph.from_networkx(nx.hypercube_graph(3))


def random_gnp(n: int, p: float, seed: int = 0, connected: bool = False) -> Graph:
    if n < 1 or not 0.0 <= p <= 1.0:
        raise ValueError("random-gnp needs n >= 1 and 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_ATTEMPTS):
        upper = np.triu(rng.random((n, n)) < p, k=1)
        edges = [(int(u), int(v)) for u, v in zip(*np.nonzero(upper))]
        g = Graph.from_edges(n, edges)
        if not connected or is_connected(g):
            logger.debug(f"G({n}, {p}) seed={seed}: accepted after {attempt + 1} draws")
            return g
    raise ValueError(f"no connected G({n}, {p}) found in {MAX_ATTEMPTS} draws")


def random_cubic(n: int, seed: int = 0) -> Graph:
    """Pairing model: shuffle 3n stubs, pair them up, reject until simple and connected."""
    if n < 4 or n % 2:
        raise ValueError(f"random-cubic needs an even n >= 4, got {n}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), 3)
    for attempt in range(MAX_ATTEMPTS):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {(int(min(u, v)), int(max(u, v))) for u, v in pairs}
        if len(edges) != len(pairs):
            continue
        g = Graph.from_edges(n, sorted(edges))
        if is_connected(g):
            logger.debug(f"cubic n={n} seed={seed}: accepted after {attempt + 1} pairings")
            return g
    raise ValueError(f"no simple connected cubic pairing for n={n} in {MAX_ATTEMPTS} attempts")


def random_bipartite(a: int, b: int, p: float, seed: int = 0) -> Graph:
    """Side A is 0..a-1, side B is a..a+b-1; each cross pair is an edge with probability p."""
    if a < 1 or b < 1 or not 0.0 <= p <= 1.0:
        raise ValueError("random-bipartite needs sides >= 1 and 0 <= p <= 1")
    rng = np.random.default_rng(seed)
    hits = rng.random((a, b)) < p
    edges = [(int(i), int(a + j)) for i, j in zip(*np.nonzero(hits))]
    return Graph.from_edges(a + b, edges)


def bipartite_sides(a: int, b: int) -> Tuple[int, int]:
    return (1 << a) - 1, ((1 << (a + b)) - 1) & ~((1 << a) - 1)


def random_weights(g: Graph, low: int = 1, high: int = 5, seed: int = 0) -> Graph:
    rng = np.random.default_rng(seed)
    weights = [int(w) for w in rng.integers(low, high + 1, size=g.n)]
    return Graph(g.n, g.adj, weights=weights, labels=g.labels, vertex_mask=g.vertex_mask)


def generate(
    family: str,
    n: Optional[int] = None,
    rows: Optional[int] = None,
    cols: Optional[int] = None,
    a: Optional[int] = None,
    b: Optional[int] = None,
    p: float = 0.5,
    seed: int = 0,
    connected: bool = False,
) -> Graph:
    """Dispatch by family name; missing or infeasible parameters raise ValueError."""

    def need(value, name):
        if value is None:
            raise ValueError(f"family {family!r} needs --{name}")
        return value

    if family == "path":
        return path(need(n, "n"))
    if family == "cycle":
        return cycle(need(n, "n"))
    if family == "grid":
        return grid(need(rows, "rows"), need(cols, "cols"))
    if family == "complete":
        return complete(need(n, "n"))
    if family == "complete-bipartite":
        return complete_bipartite(need(a, "a"), need(b, "b"))
    if family == "random-gnp":
        return random_gnp(need(n, "n"), p, seed, connected)
    if family == "random-cubic":
        return random_cubic(need(n, "n"), seed)
    if family == "random-bipartite":
        return random_bipartite(need(a, "a"), need(b, "b"), p, seed)
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
