"""
FPT Solver for sepkit
Decides "is there a minimal separator of size (or weight) >= k" in time
exponential only in k.

FindSep recurses on saturated components of small minimal separators. It
ends in one of three ways: it finds a large separator, it builds a recursion
tree of width <= 2k-2 that the DP finishes, or it hits a complete graph that
is also complete in the original (a clique minimal separator). Clique splits
are handled by the driver, which splits the graph and starts again on both parts.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from graph_core import (
    ContractError,
    Graph,
    Separator,
    close_minimal_separator,
    components,
    first_nonadjacent_pair,
    is_clique,
    is_minimal_separator,
    members,
    popcount,
    saturate,
)
from oracle import upper_bound
from td_engine import (
    RecursionLeaf,
    RecursionNode,
    RecursionTree,
    TreeDecomposition,
    assemble_td,
    max_minimal_separator_dp,
    validate_td,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Lineage
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LineageStep:
    graph: Graph
    separator: int
    component: int


class Lineage:
    """Chain G_0, (S_0, C_0), G_1, ... along one recursion path, G_{i+1} = G_i(C_i, S_i).

    Persistent: ``extend`` returns a new lineage and leaves this one untouched,
    so sibling recursions share their common prefix.
    """

    __slots__ = ("steps",)

    def __init__(self, steps: Tuple[LineageStep, ...] = ()):
        self.steps = tuple(steps)

    def extend(self, graph: Graph, separator: int, component: int) -> "Lineage":
        return Lineage(self.steps + (LineageStep(graph, separator, component),))

    @property
    def original(self) -> Optional[Graph]:
        return self.steps[0].graph if self.steps else None

    def final_graph(self) -> Optional[Graph]:
        if not self.steps:
            return None
        last = self.steps[-1]
        return saturate(last.graph, last.component, last.separator)

    def graphs(self) -> List[Graph]:
        """G_0 .. G_m, the last one being the saturated graph the chain leads to."""
        if not self.steps:
            return []
        return [step.graph for step in self.steps] + [self.final_graph()]

    def __len__(self) -> int:
        return len(self.steps)


# ---------------------------------------------------------------------------
# Outcomes
# ---------------------------------------------------------------------------
@dataclass
class LargeSeparator:
    separator: Separator
    value: int


@dataclass
class DecompositionTree:
    root: RecursionTree
    graph: Graph
    k: int


@dataclass
class CliqueSplit:
    separator: int
    component: int


FindSepOutcome = Union[LargeSeparator, DecompositionTree, CliqueSplit]


@dataclass
class SolveStats:
    find_sep_calls: int = 0
    clique_splits: int = 0
    parts: int = 0
    dp_runs: int = 0
    max_width: int = -1
    decompositions: List[TreeDecomposition] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "find_sep_calls": self.find_sep_calls,
            "clique_splits": self.clique_splits,
            "parts": self.parts,
            "dp_runs": self.dp_runs,
            "max_width": self.max_width,
        }


@dataclass
class SolveResult:
    decision: bool
    certificate: Optional[Separator]
    value: Optional[int]
    stats: SolveStats

    def __iter__(self):
        yield self.decision
        yield self.certificate


# ---------------------------------------------------------------------------
# FindSep
# ---------------------------------------------------------------------------
def _pick_separator(h: Graph) -> Optional[Separator]:
    if len(components(h)) > 1:
        return is_minimal_separator(h, 0)
    pair = first_nonadjacent_pair(h)
    if pair is None:
        return None
    return close_minimal_separator(h, *pair)


def extract_large_separator(lineage: Lineage, k_clique: int, original: Optional[Graph], k: int) -> Separator:
    """Turn a clique that exists only through fill edges into a separator of the original.

    Takes the deepest graph G_j of the chain in which K is not a clique, closes a
    separator around a nonadjacent pair of K there (their common neighbours in K
    keep it large) and certifies it on every earlier graph of the chain.
    """
    graphs = lineage.graphs()
    if not graphs:
        raise ContractError("extract_large_separator needs a non-empty lineage")
    original = original if original is not None else graphs[0]
    if popcount(k_clique) < 2 * k:
        raise ContractError(f"clique of size {popcount(k_clique)} is below 2k = {2 * k}")
    final = graphs[-1]
    if k_clique & ~final.vertex_mask or not is_clique(final, k_clique):
        raise ContractError(f"{members(k_clique)} is not a clique of the saturated graph")
    if is_clique(graphs[0], k_clique):
        raise ContractError(f"{members(k_clique)} is already a clique of the original graph")
    j = max(i for i in range(len(graphs) - 1) if not is_clique(graphs[i], k_clique))
    u, v = first_nonadjacent_pair(graphs[j], within=k_clique)
    sep = close_minimal_separator(graphs[j], u, v)
    for i in range(j - 1, -1, -1):
        if is_minimal_separator(graphs[i], sep.members) is None:
            raise RuntimeError(f"{sep.vertices} stopped being minimal at lineage depth {i}")
    cert = is_minimal_separator(original, sep.members)
    if cert is None:
        raise RuntimeError(f"{sep.vertices} is not a minimal separator of the original graph")
    if cert.size < k:
        raise ContractError(f"clique of size {popcount(k_clique)} produced a separator of size {cert.size} < {k}")
    logger.debug(f"Extracted separator {cert.vertices} from clique {members(k_clique)} at depth {j}")
    return cert


def find_sep(
    h: Graph,
    s: int,
    k: int,
    lineage: Optional[Lineage] = None,
    weighted: bool = False,
    stats: Optional[SolveStats] = None,
) -> FindSepOutcome:
    """Search H for a minimal separator of the original graph of size >= k.

    ``s`` is the separator H was saturated on (0 at the top level); it is
    always below the threshold.
    """
    lineage = lineage if lineage is not None else Lineage()
    original = lineage.original or h
    if k < 1:
        raise ContractError(f"find_sep needs k >= 1, got {k}")
    if s & ~h.vertex_mask:
        raise ContractError("the incoming separator must lie inside H")
    if h.measure(s, weighted) >= k:
        raise ContractError(f"incoming separator already reaches k={k}")
    if stats is not None:
        stats.find_sep_calls += 1

    if h.order <= 2 * k - 1:
        return DecompositionTree(RecursionLeaf(h.vertex_mask, h), h, k)

    pick = _pick_separator(h)
    if pick is None:
        clique = h.vertex_mask
        if not is_clique(original, clique):
            sep = extract_large_separator(lineage, clique, original, k)
            return LargeSeparator(sep, original.measure(sep.members, weighted))
        if not lineage.steps:
            raise ContractError("complete graphs have no minimal separator")
        last = lineage.steps[-1]
        cert = is_minimal_separator(original, last.separator)
        if cert is None:
            raise RuntimeError(f"lineage separator {members(last.separator)} is not minimal in the original")
        logger.debug(f"Clique split on {members(last.separator)}")
        return CliqueSplit(last.separator, cert.full_components[0])

    if h.measure(pick.members, weighted) >= k:
        cert = is_minimal_separator(original, pick.members)
        if cert is None:
            raise RuntimeError(f"{pick.vertices} is minimal in H but not in the original graph")
        return LargeSeparator(cert, original.measure(pick.members, weighted))

    children = []
    for comp in components(h, pick.members):
        child = saturate(h, comp, pick.members)
        outcome = find_sep(child, pick.members, k, lineage.extend(h, pick.members, comp), weighted, stats)
        if not isinstance(outcome, DecompositionTree):
            return outcome
        children.append(outcome.root)
    return DecompositionTree(RecursionNode(pick.members, tuple(children)), h, k)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------
def _solve_zero(g: Graph, weighted: bool, stats: SolveStats) -> SolveResult:
    comps = components(g)
    if len(comps) > 1:
        return SolveResult(True, is_minimal_separator(g, 0), g.measure(0, weighted), stats)
    pair = first_nonadjacent_pair(g)
    if pair is None:
        return SolveResult(False, None, None, stats)
    sep = close_minimal_separator(g, *pair)
    return SolveResult(True, sep, g.measure(sep.members, weighted), stats)


def _solve_part(part: Graph, k: int, weighted: bool, stats: SolveStats) -> Optional[Separator]:
    pending = deque([part])
    while pending:
        h = pending.popleft()
        stats.parts += 1
        if h.order < 3 or is_clique(h, h.vertex_mask) or upper_bound(h, weighted) < k:
            continue
        outcome = find_sep(h, 0, k, None, weighted, stats)
        if isinstance(outcome, LargeSeparator):
            return outcome.separator
        if isinstance(outcome, DecompositionTree):
            td = assemble_td(outcome, refine=True)
            if td.width > 2 * k - 2:
                raise RuntimeError(f"decomposition width {td.width} exceeds 2k-2 = {2 * k - 2}")
            if not validate_td(h, td):
                raise RuntimeError("assembled decomposition failed validation")
            stats.dp_runs += 1
            stats.max_width = max(stats.max_width, td.width)
            stats.decompositions.append(td)
            best = max_minimal_separator_dp(h, td, weighted)
            if best is not None and best[1] >= k:
                return best[0]
            continue
        stats.clique_splits += 1
        rest = h.vertex_mask & ~outcome.component
        pending.append(h.induced(outcome.component | outcome.separator))
        pending.append(h.induced(rest))
    return None


def solve(g: Graph, k: int, weighted: bool = False) -> SolveResult:
    """Decide whether ``g`` has a minimal separator of size (weight) >= k.

    Unpacks as ``decision, certificate``; ``stats`` carries the recursion counters.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    stats = SolveStats()
    if k == 0:
        return _solve_zero(g, weighted, stats)
    for comp in components(g):
        found = _solve_part(g.induced(comp), k, weighted, stats)
        if found is None:
            continue
        cert = is_minimal_separator(g, found.members)
        if cert is None:
            raise RuntimeError(f"certificate {found.vertices} failed re-certification on the input")
        value = g.measure(cert.members, weighted)
        logger.info(f"k={k}: YES via separator of size {cert.size} (value {value})")
        return SolveResult(True, cert, value, stats)
    if stats.clique_splits > g.order:
        logger.warning(f"{stats.clique_splits} clique splits on {g.order} vertices")
    logger.info(f"k={k}: NO after {stats.find_sep_calls} FindSep calls, {stats.clique_splits} clique splits")
    return SolveResult(False, None, None, stats)
