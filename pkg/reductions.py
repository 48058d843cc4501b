"""
Reductions for sepkit
The four constructive transformations around maximum minimal separators.
Each one returns a certificate that rebuilds its target, translates solutions
in both directions, and can be re-checked against the oracles threshold by
threshold with verify_reduction.

  subdivision  - connected max cut on cubic graphs -> separators of the subdivision
  cobipartite  - min maximal independent set on bipartite graphs -> co-bipartite graphs
  linegraph    - non-trivial connected cut (pendant gadget) -> separators of the line graph
  composition  - universal-vertex OR-composition of several instances
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from graph_core import (
    Cut,
    Graph,
    Separator,
    bits,
    is_connected,
    is_minimal_separator,
    lowest,
    make_cut,
    mask_of,
    members,
    popcount,
    two_coloring,
)
from oracle import (
    ScaleGuardError,
    is_maximal_independent,
    max_connected_cut_bruteforce,
    max_minimal_separator_bruteforce,
    max_minimal_separator_enum,
    min_independent_dominating_set_bruteforce,
    oracle_max_n,
)

logger = logging.getLogger(__name__)


class ReductionError(ValueError):
    """Input violates the precondition of a reduction."""


class DegenerateInstanceError(ReductionError):
    pass


# ---------------------------------------------------------------------------
# Threshold maps
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ThresholdMap:
    """k -> k' description: identity, shift (k + offset) or complement (total - k)."""

    name: str
    params: Dict[str, int] = field(default_factory=dict)
    valid_from: int = 0

    def apply(self, k: int) -> int:
        if self.name == "shift":
            return k + self.params["offset"]
        if self.name == "complement":
            return self.params["total"] - k
        return k

    @property
    def direction(self) -> str:
        return "min->max" if self.name == "complement" else "max->max"

    def to_dict(self) -> Dict:
        return {"name": self.name, "params": dict(self.params), "direction": self.direction, "valid_from": self.valid_from}


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------
class ReductionCertificate:
    """Source instance(s), target graph, vertex correspondence and threshold map."""

    kind = "base"

    def __init__(self, sources: List[Graph], target: Graph, threshold: ThresholdMap):
        self.sources = sources
        self.target = target
        self.threshold = threshold

    @property
    def source(self) -> Graph:
        return self.sources[0]

    # Overridden per kind
    def rebuild_target(self) -> Graph:
        raise NotImplementedError

    def source_optimum(self, max_n: Optional[int] = None):
        """(optimum, witness) on the source side, or (None, None) when no solution exists."""
        raise NotImplementedError

    def source_holds(self, optimum: Optional[int], k: int) -> bool:
        return optimum is not None and optimum >= k

    def threshold_range(self) -> range:
        return range(self.threshold.valid_from, self.target.order + 2)

    def translate_forward(self, solution) -> int:
        raise NotImplementedError

    def translate_back(self, separator: int):
        raise NotImplementedError

    def check_forward(self, witness) -> bool:
        return is_minimal_separator(self.target, self.translate_forward(witness)) is not None

    def target_in_range(self, value: int) -> bool:
        return value >= self.threshold.apply(self.threshold.valid_from)

    def check_back(self, separator: Separator) -> bool:
        raise NotImplementedError

    def vertex_map(self) -> Dict:
        return {}

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "sources": [g.to_dict() for g in self.sources],
            "target": self.target.to_dict(),
            "vertex_map": self.vertex_map(),
            "threshold_map": self.threshold.to_dict(),
        }


def _dense(g: Graph) -> Graph:
    return g if g.vertex_mask == (1 << g.n) - 1 else g.relabel()[0]


# ---- subdivision -----------------------------------------------------------
def _subdivision(g: Graph) -> Tuple[Graph, List[Tuple[int, int, int]]]:
    edges = g.edges()
    n = g.n
    target_edges = []
    edge_vertices = []
    for i, (u, v) in enumerate(edges):
        target_edges += [(u, n + i), (v, n + i)]
        edge_vertices.append((u, v, n + i))
    labels = [g.label(v) for v in range(n)] + [f"e({g.label(u)},{g.label(v)})" for u, v in edges]
    return Graph.from_edges(n + len(edges), target_edges, labels=labels), edge_vertices


class SubdivisionCertificate(ReductionCertificate):
    kind = "subdivision"

    def __init__(self, source: Graph, target: Graph, edge_vertices: List[Tuple[int, int, int]]):
        super().__init__([source], target, ThresholdMap("identity"))
        self.edge_vertices = edge_vertices

    @property
    def original_mask(self) -> int:
        return self.source.vertex_mask

    def rebuild_target(self) -> Graph:
        return _subdivision(self.source)[0]

    def source_optimum(self, max_n=None):
        cut = max_connected_cut_bruteforce(self.source, max_n=max_n)
        return (cut.cutset_size, cut) if cut is not None else (None, None)

    def translate_forward(self, cut) -> int:
        side = cut.side_a if isinstance(cut, Cut) else cut
        return mask_of(x for u, v, x in self.edge_vertices if ((side >> u) & 1) != ((side >> v) & 1))

    def _exchange(self, current: int, v: int) -> Optional[int]:
        """Swap original vertex v for its only neighbour x in a full component, if x's other end is there too."""
        for comp in is_minimal_separator(self.target, current).full_components:
            step = self.target.adj[v] & comp
            if popcount(step) == 1 and self.target.adj[lowest(step)] & comp:
                return (current & ~(1 << v)) | step
        return None

    def _star_cut(self) -> Cut:
        cut_vertices = set(nx.articulation_points(self.source.to_networkx()))
        u = next(v for v in self.source.vertices if v not in cut_vertices)
        return make_cut(self.source, 1 << u)

    def translate_back(self, separator: int) -> Cut:
        """Exchange original vertices for subdivision vertices, then read the cut off the components.

        The only separator that admits no exchange is {v, w} around the single
        subdivision vertex of edge vw; any non-cut vertex then gives a connected
        cut of size 3.
        """
        if is_minimal_separator(self.target, separator) is None:
            raise ValueError(f"{members(separator)} is not a minimal separator of the subdivision")
        current = separator
        while current & self.original_mask:
            v = lowest(current & self.original_mask)
            nxt = self._exchange(current, v)
            if nxt is None:
                if popcount(current) != 2:
                    raise RuntimeError(f"no exchange available for vertex {v} in {members(current)}")
                return self._star_cut()
            if is_minimal_separator(self.target, nxt) is None:
                raise RuntimeError(f"exchange at vertex {v} broke minimality")
            current = nxt
        cert = is_minimal_separator(self.target, current)
        return make_cut(self.source, cert.full_components[0] & self.original_mask)

    def check_forward(self, cut) -> bool:
        fwd = self.translate_forward(cut)
        return is_minimal_separator(self.target, fwd) is not None and popcount(fwd) == cut.cutset_size

    def check_back(self, separator: Separator) -> bool:
        cut = self.translate_back(separator.members)
        return cut.connected and cut.cutset_size >= separator.size

    def vertex_map(self) -> Dict:
        return {"edge_vertices": [list(t) for t in self.edge_vertices]}


def subdivide_cubic(g: Graph) -> SubdivisionCertificate:
    g = _dense(g)
    if g.order == 0 or not is_connected(g):
        raise ReductionError("subdivision needs a connected graph")
    for v in g.vertices:
        if g.degree(v) != 3:
            raise ReductionError(f"input is not cubic: vertex {v} has degree {g.degree(v)}")
    target, edge_vertices = _subdivision(g)
    logger.info(f"Subdivided cubic graph: {g.order} -> {target.order} vertices")
    return SubdivisionCertificate(g, target, edge_vertices)


# ---- co-bipartite ----------------------------------------------------------
def _cobipartite_target(g: Graph, side_a: int, side_b: int) -> Graph:
    adj = []
    for v in range(g.n):
        own, other = (side_a, side_b) if (side_a >> v) & 1 else (side_b, side_a)
        adj.append((g.adj[v] & other) | (own & ~(1 << v)))
    return Graph(g.n, adj, labels=[g.label(v) for v in range(g.n)])


class CobipartiteCertificate(ReductionCertificate):
    """Source is the preprocessed bipartite graph; ``origin`` maps its ids back to the input."""

    kind = "cobipartite"

    def __init__(self, input_graph, source, target, sides, origin, forced, dropped):
        total = source.order
        super().__init__([source], target, ThresholdMap("complement", {"total": total}))
        self.input_graph = input_graph
        self.sides = sides
        self.origin = origin
        self.forced = forced
        self.dropped = dropped

    def rebuild_target(self) -> Graph:
        return _cobipartite_target(self.source, *self.sides)

    def source_optimum(self, max_n=None):
        best = min_independent_dominating_set_bruteforce(self.source, max_n=max_n, must_hit=self.sides)
        return (popcount(best), best) if best is not None else (None, None)

    def source_holds(self, optimum, k) -> bool:
        return optimum is not None and optimum <= k

    def threshold_range(self) -> range:
        return range(0, self.source.order + 1)

    def target_in_range(self, value: int) -> bool:
        return True

    def translate_forward(self, independent_set: int) -> int:
        return self.source.vertex_mask & ~independent_set

    def translate_back(self, separator: int) -> int:
        return self.target.vertex_mask & ~separator

    def check_back(self, separator: Separator) -> bool:
        u = self.translate_back(separator.members)
        side_a, side_b = self.sides
        return is_maximal_independent(self.source, u) and bool(u & side_a) and bool(u & side_b)

    def vertex_map(self) -> Dict:
        return {
            "origin": list(self.origin),
            "sides": [members(self.sides[0]), members(self.sides[1])],
            "removed": {"forced": self.forced, "dropped": self.dropped},
        }

    def to_dict(self) -> Dict:
        data = super().to_dict()
        data["input"] = self.input_graph.to_dict()
        return data


def cobipartite_reduction(g: Graph, bipartition: Optional[Tuple[int, int]] = None) -> CobipartiteCertificate:
    if bipartition is not None and g.vertex_mask != (1 << g.n) - 1:
        if bipartition[0] & bipartition[1] or bipartition[0] | bipartition[1] != g.vertex_mask:
            raise ReductionError("bipartition must split the vertex set")
        g, ids = g.relabel()
        bipartition = tuple(mask_of(i for i, v in enumerate(ids) if (side >> v) & 1) for side in bipartition)
    g = _dense(g)
    coloring = two_coloring(g)
    if coloring is None:
        raise ReductionError("input is not bipartite")
    side_a, side_b = bipartition if bipartition is not None else coloring
    if side_a & side_b or side_a | side_b != g.vertex_mask:
        raise ReductionError("bipartition must split the vertex set")
    for side in (side_a, side_b):
        if any(g.adj[v] & side for v in bits(side)):
            raise ReductionError("bipartition has an edge inside one side")

    # Isolated vertices (forced) and vertices adjacent to the whole live other
    # side (dropped) are removed until none remain.
    forced: List[int] = []
    dropped: List[int] = []
    live_a, live_b = side_a, side_b
    changed = True
    while changed:
        changed = False
        for v in bits(live_a | live_b):
            other = live_b if (live_a >> v) & 1 else live_a
            nb = g.adj[v] & other
            if nb == 0:
                forced.append(v)
            elif nb == other:
                dropped.append(v)
            else:
                continue
            live_a &= ~(1 << v)
            live_b &= ~(1 << v)
            changed = True
            break
    if not live_a or not live_b:
        raise DegenerateInstanceError("a side of the bipartition is empty after preprocessing")

    source, origin = g.relabel(live_a | live_b)
    new_a = mask_of(i for i, v in enumerate(origin) if (side_a >> v) & 1)
    new_b = source.vertex_mask & ~new_a
    target = _cobipartite_target(source, new_a, new_b)
    if forced or dropped:
        logger.info(f"Co-bipartite preprocessing removed forced={forced} dropped={dropped}")
    return CobipartiteCertificate(g, source, target, (new_a, new_b), origin, forced, dropped)


# ---- line graph ------------------------------------------------------------
def line_graph(g: Graph) -> Tuple[Graph, Dict[Tuple[int, int], int]]:
    """L(g) with vertices numbered in sorted edge order; returns (graph, edge -> vertex)."""
    edges = g.edges()
    if not edges:
        raise ReductionError("line graph of an edgeless graph is empty")
    index = {e: i for i, e in enumerate(edges)}
    L = nx.line_graph(g.to_networkx())
    pairs = []
    for e, f in L.edges():
        pairs.append((index[tuple(sorted(e))], index[tuple(sorted(f))]))
    labels = [f"{g.label(u)}-{g.label(v)}" for u, v in edges]
    return Graph.from_edges(len(edges), pairs, labels=labels), index


def _with_pendants(g: Graph) -> Graph:
    n = g.n
    edges = g.edges() + [(v, n + v) for v in range(n)]
    labels = [g.label(v) for v in range(n)] + [f"pendant({g.label(v)})" for v in range(n)]
    return Graph.from_edges(2 * n, edges, labels=labels)


class LineGraphCertificate(ReductionCertificate):
    """Source is the input graph; the cut problem lives on ``plus`` (input plus pendants)."""

    kind = "linegraph"

    def __init__(self, source: Graph, plus: Graph, target: Graph, edge_index: Dict[Tuple[int, int], int]):
        super().__init__([source], target, ThresholdMap("identity", valid_from=2))
        self.plus = plus
        self.edge_index = edge_index

    def rebuild_target(self) -> Graph:
        return line_graph(_with_pendants(self.source))[0]

    def source_optimum(self, max_n=None):
        cut = max_connected_cut_bruteforce(self.plus, require_nontrivial=True, max_n=max_n)
        return (cut.cutset_size, cut) if cut is not None else (None, None)

    def lift_cut(self, side_a: int) -> int:
        """A side of the input graph as a side of the pendant graph."""
        return side_a | (side_a << self.source.n)

    def translate_forward(self, cut) -> int:
        side = cut.side_a if isinstance(cut, Cut) else cut
        return mask_of(x for (u, v), x in self.edge_index.items() if ((side >> u) & 1) != ((side >> v) & 1))

    def translate_back(self, separator: int) -> Cut:
        cert = is_minimal_separator(self.target, separator)
        if cert is None:
            raise ValueError(f"{members(separator)} is not a minimal separator of the line graph")
        edges = self.plus.edges()
        side = 0
        for x in bits(cert.full_components[0]):
            u, v = edges[x]
            side |= (1 << u) | (1 << v)
        return make_cut(self.plus, side)

    def check_forward(self, cut) -> bool:
        if cut.cutset_size < 2:
            return True
        fwd = self.translate_forward(cut)
        return is_minimal_separator(self.target, fwd) is not None and popcount(fwd) == cut.cutset_size

    def check_back(self, separator: Separator) -> bool:
        cut = self.translate_back(separator.members)
        return cut.connected and cut.nontrivial and cut.cutset_size == separator.size

    def pendant_check(self, max_n=None) -> Dict:
        """Connected cuts of the input vs non-trivial connected cuts of the pendant graph, for k >= 2."""
        plain = max_connected_cut_bruteforce(self.source, max_n=max_n)
        plus = max_connected_cut_bruteforce(self.plus, require_nontrivial=True, max_n=max_n)
        plain_opt = plain.cutset_size if plain else 0
        plus_opt = plus.cutset_size if plus else 0
        top = max(plain_opt, plus_opt) + 1
        mismatch = [k for k in range(2, top + 1) if (plain_opt >= k) != (plus_opt >= k)]
        return {"input_optimum": plain_opt, "pendant_optimum": plus_opt, "mismatched_thresholds": mismatch}

    def vertex_map(self) -> Dict:
        n = self.source.n
        return {
            "pendants": [[v, n + v] for v in range(n)],
            "edge_vertices": [[u, v, x] for (u, v), x in sorted(self.edge_index.items(), key=lambda item: item[1])],
        }


def linegraph_reduction(g: Graph) -> LineGraphCertificate:
    g = _dense(g)
    if g.order < 2 or not is_connected(g):
        raise ReductionError("line-graph reduction needs a connected graph with at least 2 vertices")
    plus = _with_pendants(g)
    target, edge_index = line_graph(plus)
    return LineGraphCertificate(g, plus, target, edge_index)


# ---- universal-vertex composition -----------------------------------------
def _composition(parts: Sequence[Graph]) -> Tuple[Graph, List[int]]:
    offsets = []
    edges = []
    labels = []
    total = 0
    for i, part in enumerate(parts):
        offsets.append(total)
        edges += [(u + total, v + total) for u, v in part.edges()]
        labels += [f"g{i}:{part.label(v)}" for v in range(part.n)]
        total += part.n
    edges += [(v, total) for v in range(total)]
    labels.append("universal")
    return Graph.from_edges(total + 1, edges, labels=labels), offsets


class CompositionCertificate(ReductionCertificate):
    kind = "composition"

    def __init__(self, parts: List[Graph], target: Graph, offsets: List[int]):
        super().__init__(parts, target, ThresholdMap("shift", {"offset": 1}, valid_from=1))
        self.offsets = offsets

    @property
    def universal(self) -> int:
        return self.target.n - 1

    def rebuild_target(self) -> Graph:
        return _composition(self.sources)[0]

    def source_optimum(self, max_n=None):
        best = None
        for i, part in enumerate(self.sources):
            found = max_minimal_separator_bruteforce(part, max_n=max_n)
            if found is not None and (best is None or found[1] > best[0]):
                best = (found[1], (i, found[0].members))
        return best if best is not None else (None, None)

    def part_of(self, v: int) -> int:
        return max(i for i, off in enumerate(self.offsets) if off <= v)

    def translate_forward(self, solution: Tuple[int, int]) -> int:
        i, mask = solution
        return (mask << self.offsets[i]) | (1 << self.universal)

    def translate_back(self, separator: int) -> Tuple[int, int]:
        cert = is_minimal_separator(self.target, separator)
        if cert is None:
            raise ValueError(f"{members(separator)} is not a minimal separator of the composition")
        i = self.part_of(lowest(cert.full_components[0]))
        return i, (separator & ~(1 << self.universal)) >> self.offsets[i]

    def check_back(self, separator: Separator) -> bool:
        i, mask = self.translate_back(separator.members)
        return is_minimal_separator(self.sources[i], mask) is not None

    def vertex_map(self) -> Dict:
        return {"offsets": list(self.offsets), "universal": self.universal}


def compose_universal(graphs: Sequence[Graph]) -> CompositionCertificate:
    if not graphs:
        raise ReductionError("composition needs at least one graph")
    parts = [_dense(g) for g in graphs]
    target, offsets = _composition(parts)
    return CompositionCertificate(parts, target, offsets)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------
@dataclass
class ReductionReport:
    kind: str
    passed: bool
    structure_ok: bool
    source_optimum: Optional[int]
    target_optimum: Optional[int]
    thresholds: List[int]
    first_violation: Optional[int]
    out_of_range: List[int]
    translation_ok: bool
    notes: List[str] = field(default_factory=list)
    extra: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "kind": self.kind,
            "result": "PASS" if self.passed else "FAIL",
            "structure_ok": self.structure_ok,
            "source_optimum": self.source_optimum,
            "target_optimum": self.target_optimum,
            "thresholds": [self.thresholds[0], self.thresholds[-1]] if self.thresholds else [],
            "first_violation": self.first_violation,
            "out_of_range": self.out_of_range,
            "translation_ok": self.translation_ok,
            "notes": self.notes,
            **self.extra,
        }


def verify_reduction(cert: ReductionCertificate, max_n: Optional[int] = None) -> ReductionReport:
    """Check the reduction's biconditional at every threshold with the oracles on both sides."""
    limit = oracle_max_n(max_n)
    for g in cert.sources:
        if g.order > limit:
            raise ScaleGuardError(f"source graph has {g.order} vertices, guard is {limit}")
    notes = []
    structure_ok = cert.rebuild_target() == cert.target
    if not structure_ok:
        notes.append("target does not match the construction applied to the source")

    src_opt, src_witness = cert.source_optimum(max_n)
    best = max_minimal_separator_enum(cert.target)
    tgt_sep, tgt_opt = best if best is not None else (None, None)

    thresholds = list(cert.threshold_range())
    first_violation = None
    for k in thresholds:
        lhs = cert.source_holds(src_opt, k)
        rhs = tgt_opt is not None and tgt_opt >= cert.threshold.apply(k)
        if lhs != rhs:
            first_violation = k
            notes.append(f"threshold {k}: source {'holds' if lhs else 'fails'}, target {'holds' if rhs else 'fails'}")
            break
    out_of_range = list(range(0, cert.threshold.valid_from))

    translation_ok = True
    try:
        if src_witness is not None and not cert.check_forward(src_witness):
            translation_ok = False
            notes.append("forward translation of the source optimum does not certify")
        if tgt_sep is not None and cert.target_in_range(tgt_opt) and not cert.check_back(tgt_sep):
            translation_ok = False
            notes.append("backward translation of the target optimum does not certify")
    except (ValueError, RuntimeError, StopIteration) as e:
        translation_ok = False
        notes.append(f"translation failed: {e}")

    extra = {}
    if isinstance(cert, LineGraphCertificate):
        extra["pendant_check"] = cert.pendant_check(max_n)
        if extra["pendant_check"]["mismatched_thresholds"]:
            notes.append("pendant gadget changed the connected-cut answer")
    if isinstance(cert, CobipartiteCertificate):
        plain = min_independent_dominating_set_bruteforce(cert.source, max_n=max_n)
        extra["min_maximal_independent_set"] = popcount(plain) if plain is not None else None

    passed = structure_ok and first_violation is None and translation_ok
    report = ReductionReport(
        kind=cert.kind,
        passed=passed,
        structure_ok=structure_ok,
        source_optimum=src_opt,
        target_optimum=tgt_opt,
        thresholds=thresholds,
        first_violation=first_violation,
        out_of_range=out_of_range,
        translation_ok=translation_ok,
        notes=notes,
        extra=extra,
    )
    logger.info(f"verify {cert.kind}: {'PASS' if passed else 'FAIL'} (source {src_opt}, target {tgt_opt})")
    return report
