"""
Oracle for sepkit
Exhaustive and polynomial-delay reference answers for separators, cuts,
independent sets and bicliques. Brute-force entry points refuse graphs above
the scale guard.
"""
import itertools
import json
import logging
import os
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple

from tqdm import tqdm

from graph_core import (
    ContractError,
    Cut,
    Graph,
    Separator,
    bits,
    components,
    is_clique,
    is_connected,
    is_minimal_separator,
    make_cut,
    members,
    neighborhood,
    popcount,
    set_key,
)

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent
CONFIG_PATH = BASE_DIR / "config.json"
DEFAULT_ORACLE_MAX_N = 20
DEFAULT_PROGRESS_MIN_N = 16


class ScaleGuardError(ValueError):
    """Exhaustive search refused: the input is above the configured size guard."""


def _load_config() -> dict:
    try:
        return json.loads(CONFIG_PATH.read_text())
    except Exception:
        return {}


def oracle_max_n(explicit: Optional[int] = None) -> int:
    """Resolve the guard: explicit argument > SEPKIT_ORACLE_MAX_N > config.json > 20."""
    if explicit is not None:
        return explicit
    env = os.environ.get("SEPKIT_ORACLE_MAX_N")
    if env:
        try:
            value = int(env)
            if value >= 1:
                return value
        except ValueError:
            pass
        logger.warning(f"Ignoring invalid SEPKIT_ORACLE_MAX_N={env!r}")
    value = _load_config().get("oracle_max_n")
    if isinstance(value, int) and value >= 1:
        return value
    return DEFAULT_ORACLE_MAX_N


def _progress_min_n() -> int:
    value = _load_config().get("progress_min_n")
    return value if isinstance(value, int) else DEFAULT_PROGRESS_MIN_N


def _guard(g: Graph, max_n: Optional[int], what: str):
    limit = oracle_max_n(max_n)
    if g.order > limit:
        raise ScaleGuardError(
            f"{what}: graph has {g.order} vertices, exhaustive guard is {limit} "
            f"(raise it with SEPKIT_ORACLE_MAX_N)"
        )


def _subsets(vertices: Sequence[int], desc: str) -> Iterator[int]:
    """All subsets of ``vertices`` as masks, by increasing size then lexicographically."""
    weights = [1 << v for v in vertices]

    def gen():
        for r in range(len(weights) + 1):
            for combo in itertools.combinations(weights, r):
                yield sum(combo)

    show = len(vertices) >= _progress_min_n()
    return iter(tqdm(gen(), total=1 << len(weights), desc=desc, disable=not show, leave=False))


def upper_bound(g: Graph, weighted: bool = False) -> int:
    """No minimal separator outweighs total minus the two lightest vertices; -1 below three vertices."""
    if g.order < 3:
        return -1
    w = sorted(g.weight(v) if weighted else 1 for v in g.vertices)
    return sum(w) - w[0] - w[1]


# ---------------------------------------------------------------------------
# Minimal separators
# ---------------------------------------------------------------------------
def enum_minimal_separators_bruteforce(g: Graph, max_n: Optional[int] = None) -> List[Separator]:
    _guard(g, max_n, "enum_minimal_separators_bruteforce")
    found = []
    for s in _subsets(g.vertices, "minimal separators"):
        sep = is_minimal_separator(g, s)
        if sep is not None:
            found.append(sep)
    found.sort(key=lambda sep: set_key(sep.members))
    return found


def _certified(g: Graph, s: int) -> Separator:
    sep = is_minimal_separator(g, s)
    if sep is None:
        raise RuntimeError(f"enumeration produced non-minimal separator {members(s)}")
    return sep


def enum_minimal_separators_delay(g: Graph) -> Iterator[Separator]:
    """Yield every minimal separator exactly once.

    Seeds are N(C) for components C of G - N[v]; each separator S is expanded
    through the components of G - (S | N(x)) for every x in S. Each output costs
    polynomial work, so the total is bounded by the number of separators.
    """
    live = g.vertex_mask
    seen = set()
    queue = deque()
    for v in bits(live):
        closed = (g.adj[v] | (1 << v)) & live
        for comp in components(g, closed):
            s = neighborhood(g, comp)
            if s not in seen:
                seen.add(s)
                queue.append(s)
                yield _certified(g, s)
    while queue:
        s = queue.popleft()
        for x in bits(s):
            for comp in components(g, s | (g.adj[x] & live)):
                t = neighborhood(g, comp)
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
                    yield _certified(g, t)
    logger.debug(f"Delay enumeration finished: {len(seen)} minimal separators")


def max_minimal_separator_bruteforce(
    g: Graph, weighted: bool = False, max_n: Optional[int] = None
) -> Optional[Tuple[Separator, int]]:
    """Maximum (weight) minimal separator by exhaustive search; ties go to the canonically first set."""
    _guard(g, max_n, "max_minimal_separator_bruteforce")
    bound = upper_bound(g, weighted)
    best = None
    for s in _subsets(g.vertices, "max separator"):
        sep = is_minimal_separator(g, s)
        if sep is None:
            continue
        value = g.measure(s, weighted)
        if best is None or value > best[1]:
            best = (sep, value)
            if value >= bound:
                break
    return best


def max_minimal_separator_enum(g: Graph, weighted: bool = False) -> Optional[Tuple[Separator, int]]:
    """Same answer as the brute force, through delay enumeration (no scale guard)."""
    best = None
    for sep in enum_minimal_separators_delay(g):
        value = g.measure(sep.members, weighted)
        if (
            best is None
            or value > best[1]
            or (value == best[1] and (popcount(sep.members), set_key(sep.members)) < (best[0].size, set_key(best[0].members)))
        ):
            best = (sep, value)
    return best


def clique_minimal_separators(g: Graph) -> List[Separator]:
    seps = [sep for sep in enum_minimal_separators_delay(g) if is_clique(g, sep.members)]
    seps.sort(key=lambda sep: set_key(sep.members))
    return seps


# ---------------------------------------------------------------------------
# Cuts
# ---------------------------------------------------------------------------
def max_connected_cut_bruteforce(
    g: Graph, require_nontrivial: bool = False, max_n: Optional[int] = None
) -> Optional[Cut]:
    """Largest cut whose two sides both induce connected subgraphs."""
    _guard(g, max_n, "max_connected_cut_bruteforce")
    if not is_connected(g):
        raise ContractError("connected cuts need a connected graph")
    vs = g.vertices
    if len(vs) < 2:
        return None
    anchor = 1 << vs[0]
    best = None
    for rest in _subsets(vs[1:], "connected cuts"):
        side_a = anchor | rest
        if side_a == g.vertex_mask:
            continue
        side_b = g.vertex_mask & ~side_a
        if require_nontrivial and (popcount(side_a) < 2 or popcount(side_b) < 2):
            continue
        if not is_connected(g, side_a) or not is_connected(g, side_b):
            continue
        cut = make_cut(g, side_a)
        if best is None or cut.cutset_size > best.cutset_size:
            best = cut
    return best


# ---------------------------------------------------------------------------
# Independent sets and bicliques
# ---------------------------------------------------------------------------
def is_independent(g: Graph, x: int) -> bool:
    return all(not (g.adj[v] & x) for v in bits(x))


def is_maximal_independent(g: Graph, x: int) -> bool:
    return is_independent(g, x) and (x | neighborhood(g, x)) == g.vertex_mask


def min_independent_dominating_set_bruteforce(
    g: Graph, max_n: Optional[int] = None, must_hit: Sequence[int] = ()
) -> Optional[int]:
    """Smallest maximal independent set, optionally meeting every set in ``must_hit``."""
    _guard(g, max_n, "min_independent_dominating_set_bruteforce")
    for x in _subsets(g.vertices, "independent dominating sets"):
        if any(not (x & side) for side in must_hit):
            continue
        if is_maximal_independent(g, x):
            return x
    return None


@dataclass(frozen=True)
class Biclique:
    members: int
    two_sided: bool

    def to_dict(self):
        return {"members": members(self.members), "two_sided": self.two_sided}


def _check_bipartition(g: Graph, side_a: int, side_b: int):
    if side_a & side_b or side_a | side_b != g.vertex_mask:
        raise ContractError("bipartition must split the vertex set into two disjoint sides")
    for side in (side_a, side_b):
        for v in bits(side):
            if g.adj[v] & side:
                raise ContractError(f"vertex {v} has a neighbor on its own side")


def maximal_bicliques_bruteforce(
    g: Graph, bipartition: Tuple[int, int], max_n: Optional[int] = None
) -> List[Biclique]:
    """All maximal bicliques (U meets each side completely-bipartitely), one-sided ones flagged."""
    _guard(g, max_n, "maximal_bicliques_bruteforce")
    side_a, side_b = bipartition
    _check_bipartition(g, side_a, side_b)

    def is_biclique(u: int) -> bool:
        ub = u & side_b
        return all(not (ub & ~g.adj[a]) for a in bits(u & side_a))

    found = []
    for u in _subsets(g.vertices, "bicliques"):
        if not u or not is_biclique(u):
            continue
        if any(is_biclique(u | (1 << v)) for v in bits(g.vertex_mask & ~u)):
            continue
        found.append(Biclique(u, bool(u & side_a) and bool(u & side_b)))
    found.sort(key=lambda b: set_key(b.members))
    return found
