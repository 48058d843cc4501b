"""
Tree Decomposition Engine for sepkit
Turns FindSep recursion trees into tree decompositions, validates them,
reads and writes the PACE .td format, and runs the maximum minimal separator
dynamic program over a decomposition.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from graph_core import (
    ContractError,
    Graph,
    GraphParseError,
    Separator,
    bits,
    is_minimal_separator,
    mask_of,
    members,
    popcount,
    set_key,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Recursion tree produced by FindSep
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class RecursionLeaf:
    vertices: int
    graph: Optional[Graph] = field(default=None, compare=False)


@dataclass(frozen=True)
class RecursionNode:
    separator: int
    children: Tuple[Union["RecursionNode", RecursionLeaf], ...]


RecursionTree = Union[RecursionNode, RecursionLeaf]


# ---------------------------------------------------------------------------
# Tree decompositions
# ---------------------------------------------------------------------------
@dataclass
class TreeDecomposition:
    bags: Dict[int, int] = field(default_factory=dict)
    edges: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def width(self) -> int:
        return max((popcount(b) for b in self.bags.values()), default=0) - 1

    def to_networkx(self) -> nx.Graph:
        T = nx.Graph()
        T.add_nodes_from(self.bags)
        T.add_edges_from(self.edges)
        return T

    def to_dict(self) -> Dict:
        return {
            "width": self.width,
            "bags": {str(i): members(b) for i, b in sorted(self.bags.items())},
            "edges": [list(e) for e in self.edges],
        }


def single_bag_td(g: Graph) -> TreeDecomposition:
    return TreeDecomposition({0: g.vertex_mask}, [])


def heuristic_td(g: Graph) -> TreeDecomposition:
    """Min-fill-in elimination decomposition (networkx); bags numbered in canonical order."""
    if g.order == 0:
        return TreeDecomposition({0: 0}, [])
    _, decomposition = treewidth_min_fill_in(g.to_networkx())
    nodes = sorted(decomposition.nodes(), key=lambda bag: set_key(mask_of(bag)))
    index = {bag: i for i, bag in enumerate(nodes)}
    bags = {i: mask_of(bag) for bag, i in index.items()}
    edges = sorted((min(index[a], index[b]), max(index[a], index[b])) for a, b in decomposition.edges())
    return TreeDecomposition(bags, edges)


def assemble_td(tree, refine: bool = False) -> TreeDecomposition:
    """Bags from a recursion tree: leaves give V(H), internal nodes give S'.

    Each internal bag is joined to the first bag of every child subtree that
    contains its separator. With ``refine``, a leaf whose graph is known is
    replaced by a heuristic decomposition of that graph; its incoming separator
    is a clique there, so some bag still contains it and the width bound holds.
    """
    root = getattr(tree, "root", tree)
    bags: Dict[int, int] = {}
    edges: List[Tuple[int, int]] = []

    def build(node: RecursionTree) -> List[int]:
        if isinstance(node, RecursionLeaf):
            offset = len(bags)
            if refine and node.graph is not None:
                sub = heuristic_td(node.graph)
                for i, bag in sorted(sub.bags.items()):
                    bags[offset + i] = bag
                edges.extend((offset + a, offset + b) for a, b in sub.edges)
                return [offset + i for i in sorted(sub.bags)]
            bags[offset] = node.vertices
            return [offset]
        own = len(bags)
        bags[own] = node.separator
        ids = [own]
        for child in node.children:
            child_ids = build(child)
            attach = next((i for i in child_ids if bags[i] & node.separator == node.separator), None)
            if attach is None:
                raise ContractError(f"no bag in child subtree contains separator {members(node.separator)}")
            edges.append((own, attach))
            ids.extend(child_ids)
        return ids

    build(root)
    td = TreeDecomposition(bags, edges)
    logger.debug(f"Assembled decomposition: {len(bags)} bags, width {td.width}")
    return td


def validate_td(g: Graph, t: TreeDecomposition) -> bool:
    """Tree shape, vertex and edge coverage, running intersection."""
    if not t.bags:
        return g.order == 0
    T = t.to_networkx()
    if T.number_of_nodes() != len(t.bags) or not nx.is_tree(T):
        logger.debug("Decomposition is not a tree")
        return False
    covered = 0
    for bag in t.bags.values():
        if bag & ~g.vertex_mask:
            logger.debug(f"Bag holds non-vertices {members(bag & ~g.vertex_mask)}")
            return False
        covered |= bag
    if covered != g.vertex_mask:
        logger.debug(f"Uncovered vertices {members(g.vertex_mask & ~covered)}")
        return False
    for u, v in g.edges():
        pair = (1 << u) | (1 << v)
        if not any(bag & pair == pair for bag in t.bags.values()):
            logger.debug(f"Edge ({u}, {v}) not covered by any bag")
            return False
    for v in g.vertices:
        holders = [i for i, bag in t.bags.items() if (bag >> v) & 1]
        if not nx.is_connected(T.subgraph(holders)):
            logger.debug(f"Bags containing {v} are not connected")
            return False
    return True


# ---------------------------------------------------------------------------
# PACE .td format
# ---------------------------------------------------------------------------
def td_to_pace(t: TreeDecomposition, n: int) -> str:
    order = sorted(t.bags)
    index = {node: i + 1 for i, node in enumerate(order)}
    out = [f"s td {len(order)} {t.width + 1} {n}"]
    for node in order:
        out.append(" ".join(["b", str(index[node])] + [str(v + 1) for v in bits(t.bags[node])]))
    out += [f"{index[a]} {index[b]}" for a, b in t.edges]
    return "\n".join(out) + "\n"


def parse_pace_td(text: str) -> TreeDecomposition:
    bags: Dict[int, int] = {}
    edges: List[Tuple[int, int]] = []
    declared = None
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td":
                    raise GraphParseError(line_no, "header must be 's td <bags> <width+1> <n>'")
                declared = int(parts[2])
            elif parts[0] == "b":
                if declared is None:
                    raise GraphParseError(line_no, "bag before 's td' header")
                node = int(parts[1]) - 1
                mask = 0
                for tok in parts[2:]:
                    mask |= 1 << (int(tok) - 1)
                bags[node] = mask
            else:
                if len(parts) != 2:
                    raise GraphParseError(line_no, f"expected tree edge 'i j', got {line!r}")
                edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
        except ValueError as e:
            if isinstance(e, GraphParseError):
                raise
            raise GraphParseError(line_no, f"expected integers in {line!r}")
    if declared is None:
        raise GraphParseError(1, "missing 's td' header")
    if len(bags) != declared:
        logger.warning(f"Header declares {declared} bags, found {len(bags)}")
    return TreeDecomposition(bags, edges)


# ---------------------------------------------------------------------------
# Maximum minimal separator DP
# ---------------------------------------------------------------------------
# A state colours the current bag: SEP (the separator), A and B (two full
# components) and OUT (every other component). Blocks are the connectivity
# classes of A (resp. B) vertices already merged through forgotten paths.
# state = (sep, a, b, a_blocks, b_blocks, touched_by_a, touched_by_b, flags)
A_SEEN, A_CLOSED, B_SEEN, B_CLOSED = 1, 2, 4, 8
EMPTY_STATE = (0, 0, 0, (), (), 0, 0, 0)


def _swap(state: tuple) -> tuple:
    sep, a, b, ab, bb, ta, tb, fl = state
    return (sep, b, a, bb, ab, tb, ta, ((fl & 3) << 2) | ((fl >> 2) & 3))


def _canon(state: tuple) -> tuple:
    other = _swap(state)
    return other if other < state else state


def _merge_block(blocks: tuple, vbit: int, touching: int) -> tuple:
    merged = vbit
    keep = []
    for blk in blocks:
        if blk & touching:
            merged |= blk
        else:
            keep.append(blk)
    keep.append(merged)
    return tuple(sorted(keep, key=lambda m: m & -m))


def _union_blocks(p1: tuple, p2: tuple) -> tuple:
    blocks = list(p1)
    for blk in p2:
        merged = blk
        keep = []
        for other in blocks:
            if other & merged:
                merged |= other
            else:
                keep.append(other)
        keep.append(merged)
        blocks = keep
    return tuple(sorted(blocks, key=lambda m: m & -m))


class _SeparatorDP:
    """Introduce/forget/join tables over the implicit nice form of a decomposition.

    Table entries map a canonical state to (value, witness) where the witness is
    the mask of forgotten SEP vertices that realises the value.
    """

    def __init__(self, g: Graph, weighted: bool):
        self.g = g
        self.weighted = weighted

    @staticmethod
    def _put(table: dict, state: tuple, value: int, witness: int):
        key = _canon(state)
        current = table.get(key)
        if current is None or value > current[0]:
            table[key] = (value, witness)

    def introduce(self, table: dict, bag: int, v: int) -> dict:
        vbit = 1 << v
        nb = self.g.adj[v] & bag
        out: dict = {}
        for state, (value, wit) in table.items():
            sep, a, b, ab, bb, ta, tb, fl = state
            outside = bag & ~(sep | a | b)
            if not fl & (A_CLOSED | B_CLOSED):
                nta = ta | (vbit if nb & a else 0)
                ntb = tb | (vbit if nb & b else 0)
                self._put(out, (sep | vbit, a, b, ab, bb, nta, ntb, fl), value, wit)
            if not fl & A_CLOSED and not nb & (b | outside):
                self._put(
                    out,
                    (sep, a | vbit, b, _merge_block(ab, vbit, nb & a), bb, ta | (nb & sep), tb, fl | A_SEEN),
                    value,
                    wit,
                )
            if not fl & B_CLOSED and not nb & (a | outside):
                self._put(
                    out,
                    (sep, a, b | vbit, ab, _merge_block(bb, vbit, nb & b), ta, tb | (nb & sep), fl | B_SEEN),
                    value,
                    wit,
                )
            if not nb & (a | b):
                self._put(out, state, value, wit)
        return out

    def forget(self, table: dict, v: int) -> dict:
        vbit = 1 << v
        weight = self.g.weight(v) if self.weighted else 1
        out: dict = {}
        for state, (value, wit) in table.items():
            sep, a, b, ab, bb, ta, tb, fl = state
            if sep & vbit:
                if not (ta & vbit and tb & vbit):
                    continue
                self._put(out, (sep & ~vbit, a, b, ab, bb, ta & ~vbit, tb & ~vbit, fl), value + weight, wit | vbit)
            elif a & vbit:
                nxt = self._forget_side(sep, a, ab, ta, fl, vbit, A_CLOSED)
                if nxt is not None:
                    a2, ab2, fl2 = nxt
                    self._put(out, (sep, a2, b, ab2, bb, ta, tb, fl2), value, wit)
            elif b & vbit:
                nxt = self._forget_side(sep, b, bb, tb, fl, vbit, B_CLOSED)
                if nxt is not None:
                    b2, bb2, fl2 = nxt
                    self._put(out, (sep, a, b2, ab, bb2, ta, tb, fl2), value, wit)
            else:
                self._put(out, state, value, wit)
        return out

    @staticmethod
    def _forget_side(sep, side, blocks, touched, fl, vbit, closed_flag):
        block = next(blk for blk in blocks if blk & vbit)
        rest = block & ~vbit
        others = tuple(blk for blk in blocks if blk != block)
        if rest:
            return side & ~vbit, tuple(sorted(others + (rest,), key=lambda m: m & -m)), fl
        if others:
            # a block with no bag vertex left can never reconnect
            return None
        if sep & ~touched:
            return None
        return side & ~vbit, (), fl | closed_flag

    def join(self, t1: dict, t2: dict) -> dict:
        index = defaultdict(list)
        for state, entry in t2.items():
            index[state[:3]].append((state, entry))
        out: dict = {}
        for s1, (v1, w1) in t1.items():
            sep, a, b = s1[:3]
            candidates = list(index.get((sep, a, b), ()))
            candidates += [(_swap(s), e) for s, e in index.get((sep, b, a), ())]
            for s2, (v2, w2) in candidates:
                if s2[:3] != (sep, a, b):
                    continue
                f1, f2 = s1[7], s2[7]
                if (f1 & A_CLOSED and f2 & A_SEEN) or (f2 & A_CLOSED and f1 & A_SEEN):
                    continue
                if (f1 & B_CLOSED and f2 & B_SEEN) or (f2 & B_CLOSED and f1 & B_SEEN):
                    continue
                merged = (
                    sep,
                    a,
                    b,
                    _union_blocks(s1[3], s2[3]),
                    _union_blocks(s1[4], s2[4]),
                    s1[5] | s2[5],
                    s1[6] | s2[6],
                    f1 | f2,
                )
                self._put(out, merged, v1 + v2, w1 | w2)
        return out

    def run(self, t: TreeDecomposition) -> Optional[Tuple[int, int]]:
        T = t.to_networkx()
        root = min(t.bags)
        order = []
        parent = {root: None}
        stack = [root]
        while stack:
            node = stack.pop()
            order.append(node)
            for nxt in sorted(T.neighbors(node)):
                if nxt not in parent:
                    parent[nxt] = node
                    stack.append(nxt)
        children = defaultdict(list)
        for node in order[1:]:
            children[parent[node]].append(node)

        tables: Dict[int, dict] = {}
        for node in reversed(order):
            bag = t.bags[node]
            if not children[node]:
                table, cur = {EMPTY_STATE: (0, 0)}, 0
                for v in bits(bag):
                    table = self.introduce(table, cur, v)
                    cur |= 1 << v
            else:
                table = None
                for child in sorted(children[node]):
                    ct, cur = tables.pop(child), t.bags[child]
                    for v in bits(cur & ~bag):
                        ct = self.forget(ct, v)
                        cur &= ~(1 << v)
                    for v in bits(bag & ~cur):
                        ct = self.introduce(ct, cur, v)
                        cur |= 1 << v
                    table = ct if table is None else self.join(table, ct)
            tables[node] = table
            logger.debug(f"DP node {node}: bag size {popcount(bag)}, {len(table)} states")

        table = tables[root]
        for v in bits(t.bags[root]):
            table = self.forget(table, v)
        best = None
        for state, (value, wit) in table.items():
            fl = state[7]
            if fl & A_CLOSED and fl & B_CLOSED:
                if best is None or value > best[0]:
                    best = (value, wit)
        return best


def max_minimal_separator_dp(
    g: Graph, t: TreeDecomposition, weighted: bool = False
) -> Optional[Tuple[Separator, int]]:
    """Maximum (weight) minimal separator, in time exponential only in the width of ``t``."""
    if not validate_td(g, t):
        raise ContractError("tree decomposition is not valid for this graph")
    best = _SeparatorDP(g, weighted).run(t)
    if best is None:
        return None
    value, witness = best
    sep = is_minimal_separator(g, witness)
    if sep is None:
        raise RuntimeError(f"DP witness {members(witness)} is not a minimal separator")
    return sep, value
