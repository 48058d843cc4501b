"""
Graph Core for sepkit
Graph representation, edge-list / DIMACS parsing, and the separator and cut
primitives (components, neighborhoods, full components, minimality, saturation)
that every other module builds on.

Vertex sets are plain ints used as bitsets: bit v is set iff vertex v is a member.
"""
import hashlib
import itertools
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
from filelock import FileLock

logger = logging.getLogger(__name__)

FORMATS = ("edgelist", "dimacs")


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------
class GraphParseError(ValueError):
    """Malformed graph or decomposition text. Carries the 1-based line number."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class GraphValidationError(ValueError):
    pass


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class NoSeparatorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Bitset helpers
# ---------------------------------------------------------------------------
def bits(mask: int) -> Iterator[int]:
    """Yield the members of a bitset in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def members(mask: int) -> List[int]:
    return list(bits(mask))


def set_key(mask: int) -> Tuple[int, ...]:
    """Canonical sort key: sets compare by their sorted member lists."""
    return tuple(bits(mask))


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------
class Graph:
    """Simple undirected graph over ids 0..n-1 with optional weights and labels.

    ``vertex_mask`` selects the live vertices, so induced subgraphs keep the ids
    (and labels) of the graph they were cut from. ``fill_edges`` records edges
    that were added by saturation rather than present in the input.
    Instances are treated as immutable.
    """

    __slots__ = ("n", "adj", "vertex_mask", "weights", "labels", "fill_edges", "_fingerprint")

    def __init__(
        self,
        n: int,
        adj: Sequence[int],
        weights: Optional[Sequence[int]] = None,
        labels: Optional[Sequence[str]] = None,
        vertex_mask: Optional[int] = None,
        fill_edges: Iterable[Tuple[int, int]] = (),
    ):
        self.n = n
        self.adj = tuple(adj)
        self.vertex_mask = (1 << n) - 1 if vertex_mask is None else vertex_mask
        self.weights = tuple(weights) if weights is not None else None
        self.labels = tuple(labels) if labels is not None else None
        self.fill_edges = frozenset(fill_edges)
        self._fingerprint = None
        self._check()

    def _check(self):
        if len(self.adj) != self.n:
            raise GraphValidationError(f"adjacency has {len(self.adj)} rows for n={self.n}")
        if self.vertex_mask >> self.n:
            raise GraphValidationError("vertex mask references ids >= n")
        for v in range(self.n):
            row = self.adj[v]
            if not (self.vertex_mask >> v) & 1:
                if row:
                    raise GraphValidationError(f"removed vertex {v} still has neighbors")
                continue
            if (row >> v) & 1:
                raise GraphValidationError(f"self-loop at vertex {v}")
            if row & ~self.vertex_mask:
                raise GraphValidationError(f"vertex {v} is adjacent to a removed vertex")
            for u in bits(row):
                if not (self.adj[u] >> v) & 1:
                    raise GraphValidationError(f"asymmetric adjacency between {v} and {u}")
        if self.weights is not None:
            if len(self.weights) != self.n:
                raise GraphValidationError(f"{len(self.weights)} weights for n={self.n}")
            for v, w in enumerate(self.weights):
                if w < 1:
                    raise GraphValidationError(f"weight of vertex {v} is {w}; weights must be >= 1")
        if self.labels is not None and len(self.labels) != self.n:
            raise GraphValidationError(f"{len(self.labels)} labels for n={self.n}")

    # ---- Construction ----
    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int]],
        weights: Union[None, Sequence[int], Dict[int, int]] = None,
        labels: Optional[Sequence[str]] = None,
    ) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphValidationError(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                raise GraphValidationError(f"self-loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        if isinstance(weights, dict):
            weights = [weights.get(v, 1) for v in range(n)]
        return cls(n, adj, weights=weights, labels=labels)

    @classmethod
    def from_networkx(cls, G: nx.Graph, keep_labels: bool = False) -> "Graph":
        nodes = sorted(G.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in G.edges() if u != v]
        labels = [str(node) for node in nodes] if keep_labels else None
        return cls.from_edges(len(nodes), edges, labels=labels)

    def to_networkx(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(self.vertices)
        G.add_edges_from(self.edges())
        return G

    # ---- Queries ----
    @property
    def vertices(self) -> List[int]:
        return members(self.vertex_mask)

    @property
    def order(self) -> int:
        return popcount(self.vertex_mask)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u in bits(self.vertex_mask) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    @property
    def edge_count(self) -> int:
        return sum(popcount(self.adj[v]) for v in bits(self.vertex_mask)) // 2

    def neighbors(self, v: int) -> int:
        return self.adj[v]

    def adjacent(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def weight(self, v: int) -> int:
        return self.weights[v] if self.weights is not None else 1

    def weight_of(self, mask: int) -> int:
        if self.weights is None:
            return popcount(mask)
        return sum(self.weights[v] for v in bits(mask))

    def measure(self, mask: int, weighted: bool = False) -> int:
        """Size of a vertex set: total weight in weighted mode, cardinality otherwise."""
        return self.weight_of(mask) if weighted else popcount(mask)

    def label(self, v: int) -> str:
        if self.labels is not None and self.labels[v]:
            return self.labels[v]
        return str(v)

    def is_fill(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.fill_edges

    # ---- Derived graphs ----
    def induced(self, mask: int) -> "Graph":
        """Induced subgraph on ``mask`` in the same id space."""
        mask &= self.vertex_mask
        adj = [self.adj[v] & mask if (mask >> v) & 1 else 0 for v in range(self.n)]
        fill = [(u, v) for u, v in self.fill_edges if (mask >> u) & 1 and (mask >> v) & 1]
        return Graph(self.n, adj, self.weights, self.labels, mask, fill)

    def relabel(self, mask: Optional[int] = None) -> Tuple["Graph", List[int]]:
        """Dense copy of the induced subgraph on ``mask``; returns (graph, origin ids)."""
        mask = self.vertex_mask if mask is None else mask & self.vertex_mask
        origin = members(mask)
        index = {v: i for i, v in enumerate(origin)}
        adj = [mask_of(index[u] for u in bits(self.adj[v] & mask)) for v in origin]
        weights = [self.weights[v] for v in origin] if self.weights is not None else None
        labels = [self.label(v) for v in origin]
        return Graph(len(origin), adj, weights, labels), origin

    # ---- Serialization ----
    def to_dict(self) -> Dict:
        data = {"n": self.n, "edges": [list(e) for e in self.edges()]}
        if self.vertex_mask != (1 << self.n) - 1:
            data["vertices"] = self.vertices
        if self.weights is not None:
            data["weights"] = list(self.weights)
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "Graph":
        g = cls.from_edges(
            data["n"],
            [tuple(e) for e in data.get("edges", [])],
            weights=data.get("weights"),
            labels=data.get("labels"),
        )
        if "vertices" in data:
            g = g.induced(mask_of(data["vertices"]))
        return g

    def fingerprint(self) -> str:
        if self._fingerprint is None:
            digest = hashlib.md5(serialize_graph(self).encode()).hexdigest()[:12]
            object.__setattr__(self, "_fingerprint", digest)
        return self._fingerprint

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.vertex_mask == other.vertex_mask
            and self.adj == other.adj
            and self.weights == other.weights
        )

    def __hash__(self) -> int:
        return hash((self.n, self.vertex_mask, self.adj, self.weights))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, order={self.order}, m={self.edge_count})"


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------
def _int_tokens(tokens: List[str], line_no: int) -> List[int]:
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise GraphParseError(line_no, f"expected integers, got {' '.join(tokens)!r}")
    if any(v < 0 for v in values):
        raise GraphParseError(line_no, "negative id or weight")
    return values


def _parse_edgelist(lines: List[str]) -> Graph:
    edges = set()
    weights: Dict[int, int] = {}
    declared = set()
    top = -1
    for line_no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "w":
            if len(parts) != 3:
                raise GraphParseError(line_no, "weight line must be 'w <vertex> <weight>'")
            v, w = _int_tokens(parts[1:], line_no)
            if w < 1:
                raise GraphValidationError(f"line {line_no}: weight of vertex {v} is {w}; weights must be >= 1")
            weights[v] = w
            top = max(top, v)
        elif parts[0] == "v":
            if len(parts) != 2:
                raise GraphParseError(line_no, "vertex line must be 'v <vertex>'")
            (v,) = _int_tokens(parts[1:], line_no)
            declared.add(v)
            top = max(top, v)
        else:
            if len(parts) != 2:
                raise GraphParseError(line_no, f"expected 'u v', got {line!r}")
            u, v = _int_tokens(parts, line_no)
            if u == v:
                raise GraphValidationError(f"line {line_no}: self-loop at vertex {u}")
            edges.add((min(u, v), max(u, v)))
            top = max(top, u, v)
    n = top + 1
    return Graph.from_edges(n, sorted(edges), weights=weights or None)


def _parse_dimacs(lines: List[str]) -> Graph:
    n = None
    edges = set()
    weights: Dict[int, int] = {}
    for line_no, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphParseError(line_no, "duplicate 'p' line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise GraphParseError(line_no, "header must be 'p edge <n> <m>'")
            n, _ = _int_tokens(parts[2:], line_no)
        elif parts[0] in ("e", "n"):
            if n is None:
                raise GraphParseError(line_no, f"'{parts[0]}' line before 'p' header")
            if len(parts) != 3:
                raise GraphParseError(line_no, f"malformed '{parts[0]}' line")
            a, b = _int_tokens(parts[1:], line_no)
            if parts[0] == "e":
                if not (1 <= a <= n and 1 <= b <= n):
                    raise GraphParseError(line_no, f"vertex outside 1..{n}")
                if a == b:
                    raise GraphValidationError(f"line {line_no}: self-loop at vertex {a}")
                edges.add((min(a, b) - 1, max(a, b) - 1))
            else:
                if not 1 <= a <= n:
                    raise GraphParseError(line_no, f"vertex outside 1..{n}")
                if b < 1:
                    raise GraphValidationError(f"line {line_no}: weight of vertex {a} is {b}; weights must be >= 1")
                weights[a - 1] = b
        else:
            raise GraphParseError(line_no, f"unknown line type {parts[0]!r}")
    if n is None:
        raise GraphParseError(max(len(lines), 1), "missing 'p edge' header")
    return Graph.from_edges(n, sorted(edges), weights=weights or None)


def _normalize_format(fmt: str) -> str:
    fmt = fmt.lower().replace("-", "").replace("_", "")
    if fmt not in FORMATS:
        raise ValueError(f"unknown graph format {fmt!r}; expected one of {', '.join(FORMATS)}")
    return fmt


def detect_format(text: str) -> str:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("c"):
            continue
        return "dimacs" if line.startswith("p ") else "edgelist"
    return "edgelist"


def parse_graph(text: Union[bytes, str], fmt: str = "edgelist") -> Graph:
    """Parse edge-list ("u v", "w u x", "v u") or DIMACS ("p edge n m", "e u v") text."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.splitlines()
    if _normalize_format(fmt) == "dimacs":
        g = _parse_dimacs(lines)
    else:
        g = _parse_edgelist(lines)
    logger.debug(f"Parsed {fmt} graph: {g}")
    return g


def serialize_graph(g: Graph, fmt: str = "edgelist") -> str:
    """Canonical text form: edges sorted lexicographically."""
    edges = g.edges()
    if _normalize_format(fmt) == "dimacs":
        out = [f"p edge {g.n} {len(edges)}"]
        out += [f"e {u + 1} {v + 1}" for u, v in edges]
        if g.weights is not None:
            out += [f"n {v + 1} {g.weight(v)}" for v in g.vertices]
        return "\n".join(out) + "\n"
    out = [f"# n={g.order} m={len(edges)}"]
    touched = 0
    for u, v in edges:
        touched |= (1 << u) | (1 << v)
    out += [f"v {v}" for v in bits(g.vertex_mask & ~touched)]
    out += [f"{u} {v}" for u, v in edges]
    if g.weights is not None:
        out += [f"w {v} {g.weight(v)}" for v in g.vertices]
    return "\n".join(out) + "\n"


def atomic_write_text(path: Union[str, Path], text: str):
    """Write via temp file + rename under a file lock so concurrent runs never interleave."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)


def atomic_write_json(path: Union[str, Path], data) -> None:
    atomic_write_text(path, json.dumps(data, indent=2, ensure_ascii=False) + "\n")


def load_graph(path: Union[str, Path], fmt: Optional[str] = None) -> Graph:
    text = Path(path).read_text(encoding="utf-8")
    return parse_graph(text, fmt or detect_format(text))


def save_graph(g: Graph, path: Union[str, Path], fmt: str = "edgelist"):
    atomic_write_text(path, serialize_graph(g, fmt))
    logger.info(f"Graph written to {path} ({fmt}, {g.order} vertices, {g.edge_count} edges)")


# ---------------------------------------------------------------------------
# Separator / cut types
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Separator:
    """A vertex set with the full components that certify its minimality."""

    members: int
    full_components: Tuple[int, ...]
    host: str

    @property
    def size(self) -> int:
        return popcount(self.members)

    @property
    def vertices(self) -> List[int]:
        return members(self.members)

    def to_dict(self, g: Optional[Graph] = None) -> Dict:
        data = {
            "separator": self.vertices,
            "full_components": [members(c) for c in self.full_components],
            "size": self.size,
            "weight": g.weight_of(self.members) if g is not None else self.size,
        }
        if g is not None and g.labels is not None:
            data["labels"] = [g.label(v) for v in self.vertices]
        return data


@dataclass(frozen=True)
class Cut:
    side_a: int
    side_b: int
    cutset_size: int
    connected: bool
    nontrivial: bool

    def to_dict(self) -> Dict:
        return {
            "side_a": members(self.side_a),
            "side_b": members(self.side_b),
            "cutset_size": self.cutset_size,
            "connected": self.connected,
            "nontrivial": self.nontrivial,
        }


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------
def _require_subset(g: Graph, mask: int, what: str):
    if mask & ~g.vertex_mask:
        raise ContractError(f"{what} contains vertices outside the graph: {members(mask & ~g.vertex_mask)}")


def _grow(g: Graph, seed: int, allowed: int) -> int:
    comp = frontier = seed
    while frontier:
        reach = 0
        for v in bits(frontier):
            reach |= g.adj[v]
        frontier = reach & allowed & ~comp
        comp |= frontier
    return comp


def components(g: Graph, removed: int = 0) -> List[int]:
    """Connected components of G - removed, ordered by smallest member."""
    _require_subset(g, removed, "removed set")
    remaining = g.vertex_mask & ~removed
    comps = []
    while remaining:
        comp = _grow(g, remaining & -remaining, remaining)
        comps.append(comp)
        remaining &= ~comp
    return comps


def component_of(g: Graph, v: int, removed: int = 0) -> int:
    allowed = g.vertex_mask & ~removed
    if not (allowed >> v) & 1:
        return 0
    return _grow(g, 1 << v, allowed)


def is_connected(g: Graph, mask: Optional[int] = None) -> bool:
    """True iff ``mask`` (default: all vertices) is nonempty and induces a connected subgraph."""
    mask = g.vertex_mask if mask is None else mask
    if not mask:
        return False
    return _grow(g, mask & -mask, mask) == mask


def neighborhood(g: Graph, x: int) -> int:
    """N(X): vertices outside X adjacent to some vertex of X."""
    _require_subset(g, x, "vertex set")
    nb = 0
    for v in bits(x):
        nb |= g.adj[v]
    return nb & ~x & g.vertex_mask


def full_components(g: Graph, s: int) -> List[int]:
    return [c for c in components(g, s) if neighborhood(g, c) == s]


def is_minimal_separator(g: Graph, s: int) -> Optional[Separator]:
    """Separator with its full-component witness iff S has at least two full components."""
    full = full_components(g, s)
    if len(full) < 2:
        return None
    return Separator(s, tuple(full), g.fingerprint())


def close_minimal_separator(g: Graph, a: int, b: int) -> Separator:
    """Minimal a,b-separator N(C_b), where C_b is the component of b in G - N(a)."""
    live = g.vertex_mask
    if a == b or not (live >> a) & 1 or not (live >> b) & 1:
        raise NoSeparatorError(f"no separator between {a} and {b}: need two distinct vertices of the graph")
    if g.adjacent(a, b):
        raise NoSeparatorError(f"no separator between adjacent vertices {a} and {b}")
    if not (component_of(g, a) >> b) & 1:
        raise NoSeparatorError(f"{a} and {b} lie in different components")
    comp_b = component_of(g, b, g.adj[a])
    sep = is_minimal_separator(g, neighborhood(g, comp_b))
    if sep is None:
        raise RuntimeError(f"close separator for ({a}, {b}) failed the full-component check")
    return sep


def saturate(g: Graph, c: int, s: int) -> Graph:
    """G(C, S): the subgraph induced by C | S with S completed into a clique."""
    if c not in components(g, s):
        raise ContractError(f"{members(c)} is not a component of G - {members(s)}")
    keep = c | s
    adj = [g.adj[v] & keep if (keep >> v) & 1 else 0 for v in range(g.n)]
    fill = {(u, v) for u, v in g.fill_edges if (keep >> u) & 1 and (keep >> v) & 1}
    for u in bits(s):
        missing = s & ~adj[u] & ~(1 << u)
        for v in bits(missing):
            fill.add((min(u, v), max(u, v)))
        adj[u] |= s & ~(1 << u)
    return Graph(g.n, adj, g.weights, g.labels, keep, fill)


def is_clique(g: Graph, x: int) -> bool:
    for v in bits(x):
        if (x & ~(1 << v)) & ~g.adj[v]:
            return False
    return True


def first_nonadjacent_pair(g: Graph, within: Optional[int] = None) -> Optional[Tuple[int, int]]:
    """Lexicographically smallest pair u < v of nonadjacent vertices inside ``within``."""
    within = g.vertex_mask if within is None else within & g.vertex_mask
    for u in bits(within):
        rest = within & ~g.adj[u] & ~((1 << (u + 1)) - 1)
        if rest:
            return u, lowest(rest)
    return None


def make_cut(g: Graph, side_a: int) -> Cut:
    _require_subset(g, side_a, "cut side")
    side_b = g.vertex_mask & ~side_a
    size = sum(popcount(g.adj[v] & side_b) for v in bits(side_a))
    return Cut(
        side_a=side_a,
        side_b=side_b,
        cutset_size=size,
        connected=is_connected(g, side_a) and is_connected(g, side_b),
        nontrivial=popcount(side_a) >= 2 and popcount(side_b) >= 2,
    )


# ---------------------------------------------------------------------------
# Graph-class predicates
# ---------------------------------------------------------------------------
def two_coloring(g: Graph) -> Optional[Tuple[int, int]]:
    """Bipartition (A, B) with the smallest vertex of each component in A; None if not bipartite."""
    try:
        color = nx.bipartite.color(g.to_networkx())
    except nx.NetworkXError:
        return None
    side_a = side_b = 0
    for comp in components(g):
        flip = color.get(lowest(comp), 0) == 1
        for v in bits(comp):
            if (color.get(v, 0) == 1) != flip:
                side_b |= 1 << v
            else:
                side_a |= 1 << v
    return side_a, side_b


def is_claw_free(g: Graph) -> bool:
    for center in g.vertices:
        nbrs = members(g.adj[center])
        for x, y, z in itertools.combinations(nbrs, 3):
            if not g.adjacent(x, y) and not g.adjacent(x, z) and not g.adjacent(y, z):
                return False
    return True


def max_degree(g: Graph) -> int:
    return max((g.degree(v) for v in g.vertices), default=0)


def is_cobipartite_split(g: Graph, side_a: int, side_b: int) -> bool:
    return (
        side_a & side_b == 0
        and side_a | side_b == g.vertex_mask
        and is_clique(g, side_a)
        and is_clique(g, side_b)
    )
