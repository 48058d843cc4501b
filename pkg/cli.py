#!/usr/bin/env python3
"""
sepkit command line
Subcommands: solve, enumerate, reduce, gen, verify, oracle.
Exit codes: 0 = YES / PASS, 1 = NO / FAIL, 2 = error.
"""
import argparse
import json
import logging
import os
import sys
import time
from collections import deque
from pathlib import Path
from typing import List, Optional

import psutil
from dotenv import load_dotenv

from fpt_solver import CliqueSplit, LargeSeparator, find_sep, solve
from generators import FAMILIES, generate
from graph_core import (
    FORMATS,
    Graph,
    atomic_write_json,
    atomic_write_text,
    components,
    is_clique,
    is_minimal_separator,
    load_graph,
    mask_of,
    members,
    save_graph,
    serialize_graph,
    two_coloring,
)
from oracle import (
    clique_minimal_separators,
    enum_minimal_separators_bruteforce,
    enum_minimal_separators_delay,
    max_connected_cut_bruteforce,
    max_minimal_separator_bruteforce,
    max_minimal_separator_enum,
    maximal_bicliques_bruteforce,
    min_independent_dominating_set_bruteforce,
)
from reductions import (
    cobipartite_reduction,
    compose_universal,
    linegraph_reduction,
    subdivide_cubic,
    verify_reduction,
)
from td_engine import assemble_td, max_minimal_separator_dp, single_bag_td, td_to_pace

logger = logging.getLogger("sepkit")

BASE_DIR = Path(__file__).resolve().parent
CONFIG_PATH = BASE_DIR / "config.json"
LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2
ENGINES = ("fpt", "dp", "oracle", "enum")
REDUCTIONS = {
    "subdivide": subdivide_cubic,
    "cobipartite": cobipartite_reduction,
    "linegraph": linegraph_reduction,
}


def _load_config() -> dict:
    try:
        return json.loads(CONFIG_PATH.read_text())
    except Exception:
        return {}


def setup_logging(verbose: bool = False, quiet: bool = False):
    config = _load_config()
    level_name = os.environ.get("SEPKIT_LOG_LEVEL") or config.get("log_level", "WARNING")
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        level = logging.WARNING
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.ERROR
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.get("log_file"):
        handlers.append(logging.FileHandler(config["log_file"]))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)
    if not isinstance(getattr(logging, str(level_name).upper(), None), int):
        logger.warning(f"Ignoring unknown log level {level_name!r}")


def _emit(data):
    print(json.dumps(data, ensure_ascii=False))
    sys.stdout.flush()


def _read_graph(args) -> Graph:
    return load_graph(args.input, args.format)


def _parse_vertex_list(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise ValueError(f"vertex list must be comma-separated integers, got {text!r}")


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------
def _solve_dp(g: Graph, k: int, weighted: bool):
    """Build a decomposition through find_sep, then let the DP answer.

    Clique splits are followed; a direct YES from find_sep is an error since no
    decomposition exists for the DP to run on.
    """
    if k == 0:
        decompositions = [single_bag_td(g)]
        parts = [g]
    else:
        decompositions, parts = [], []
        pending = deque(g.induced(comp) for comp in components(g))
        while pending:
            part = pending.popleft()
            if part.order < 3 or is_clique(part, part.vertex_mask):
                continue
            outcome = find_sep(part, 0, k, None, weighted)
            if isinstance(outcome, LargeSeparator):
                raise ValueError(
                    f"find_sep answered YES directly on {members(part.vertex_mask)} "
                    f"(separator {outcome.separator.vertices}); no decomposition for the dp engine"
                )
            if isinstance(outcome, CliqueSplit):
                logger.info(f"Clique split on {members(outcome.separator)}")
                pending.append(part.induced(outcome.component | outcome.separator))
                pending.append(part.induced(part.vertex_mask & ~outcome.component))
                continue
            decompositions.append(assemble_td(outcome, refine=True))
            parts.append(part)
    best = None
    for part, td in zip(parts, decompositions):
        found = max_minimal_separator_dp(part, td, weighted)
        if found is not None and (best is None or found[1] > best[1]):
            best = found
    if best is not None:
        best = (is_minimal_separator(g, best[0].members), best[1])
    decision = best is not None and best[0] is not None and best[1] >= k
    return decision, (best[0] if decision else None), (best[1] if decision else None), decompositions


def cmd_solve(args) -> int:
    g = _read_graph(args)
    if args.k < 0:
        raise ValueError("--k must be >= 0")
    engine = args.engine or _load_config().get("default_engine", "fpt")
    started = time.perf_counter()
    stats = None
    decompositions = []
    if engine == "fpt":
        result = solve(g, args.k, args.weighted)
        decision, cert, value = result.decision, result.certificate, result.value
        stats = result.stats.to_dict()
        decompositions = result.stats.decompositions
    elif engine == "dp":
        decision, cert, value, decompositions = _solve_dp(g, args.k, args.weighted)
    else:
        if engine == "oracle":
            best = max_minimal_separator_bruteforce(g, args.weighted)
        else:
            best = max_minimal_separator_enum(g, args.weighted)
        decision = best is not None and best[1] >= args.k
        cert, value = (best if decision else (None, None))
    elapsed_ms = round((time.perf_counter() - started) * 1000, 3)

    if args.emit_td:
        if not decompositions:
            logger.warning("No decomposition was built on this run; --emit-td writes nothing")
        else:
            td = decompositions[-1]
            atomic_write_text(args.emit_td, td_to_pace(td, g.n))
            logger.info(f"Decomposition of width {td.width} written to {args.emit_td}")

    out = {
        "decision": "YES" if decision else "NO",
        "k": args.k,
        "engine": engine,
        "weighted": args.weighted,
        "elapsed_ms": elapsed_ms,
        "rss_mb": round(psutil.Process().memory_info().rss / 2 ** 20, 1),
    }
    if cert is not None:
        out["certificate"] = cert.to_dict(g)
        out["value"] = value
    if stats is not None:
        out["stats"] = stats
    _emit(out)
    return EXIT_YES if decision else EXIT_NO


# ---------------------------------------------------------------------------
# enumerate / verify / oracle
# ---------------------------------------------------------------------------
def cmd_enumerate(args) -> int:
    g = _read_graph(args)
    if args.engine == "bruteforce":
        stream = iter(enum_minimal_separators_bruteforce(g))
    else:
        stream = enum_minimal_separators_delay(g)
    count = 0
    for sep in stream:
        if args.limit is not None and count >= args.limit:
            break
        _emit(sep.to_dict(g))
        count += 1
    _emit({"count": count})
    return EXIT_YES


def cmd_verify(args) -> int:
    g = _read_graph(args)
    vertices = _parse_vertex_list(args.separator)
    unknown = [v for v in vertices if v < 0 or v >= g.n or not (g.vertex_mask >> v) & 1]
    if unknown:
        raise ValueError(f"unknown vertex ids {unknown}")
    s = mask_of(vertices)
    sep = is_minimal_separator(g, s)
    if sep is None:
        out = {"minimal": False, "separator": members(s), "components": [members(c) for c in components(g, s)]}
        _emit(out)
        return EXIT_NO
    _emit({"minimal": True, **sep.to_dict(g)})
    return EXIT_YES


def _bipartition(g: Graph, choice: str):
    if choice == "auto":
        sides = two_coloring(g)
        if sides is None:
            raise ValueError("graph is not bipartite")
        return sides
    side_a = mask_of(_parse_vertex_list(choice))
    return side_a, g.vertex_mask & ~side_a


def cmd_oracle(args) -> int:
    g = _read_graph(args)
    problem = args.problem
    if problem == "max-separator":
        best = max_minimal_separator_bruteforce(g, args.weighted)
        out = {"value": None} if best is None else {"value": best[1], **best[0].to_dict(g)}
        found = best is not None
    elif problem == "connected-cut":
        cut = max_connected_cut_bruteforce(g, require_nontrivial=args.nontrivial)
        out = cut.to_dict() if cut is not None else {"cutset_size": None}
        found = cut is not None
    elif problem == "min-mis":
        best = min_independent_dominating_set_bruteforce(g)
        out = {"set": members(best), "size": len(members(best))}
        found = True
    elif problem == "bicliques":
        found_list = maximal_bicliques_bruteforce(g, _bipartition(g, args.bipartition))
        out = {"bicliques": [b.to_dict() for b in found_list], "count": len(found_list)}
        found = bool(found_list)
    else:
        seps = clique_minimal_separators(g)
        out = {"clique_separators": [s.to_dict(g) for s in seps], "count": len(seps)}
        found = bool(seps)
    _emit({"problem": problem, **out})
    return EXIT_YES if found else EXIT_NO


# ---------------------------------------------------------------------------
# reduce / gen
# ---------------------------------------------------------------------------
def cmd_reduce(args) -> int:
    graphs = [load_graph(path, args.format) for path in args.input]
    if args.kind == "compose":
        cert = compose_universal(graphs)
    else:
        if len(graphs) != 1:
            raise ValueError(f"--kind {args.kind} takes exactly one --input")
        if args.kind == "cobipartite" and args.bipartition != "auto":
            cert = cobipartite_reduction(graphs[0], _bipartition(graphs[0], args.bipartition))
        else:
            cert = REDUCTIONS[args.kind](graphs[0])
    out = {"kind": cert.kind, "target_vertices": cert.target.order, "target_edges": cert.target.edge_count}
    if args.output:
        atomic_write_json(args.output, cert.to_dict())
        out["certificate_path"] = str(args.output)
        logger.info(f"{cert.kind} certificate written to {args.output}")
    else:
        out["certificate"] = cert.to_dict()
    code = EXIT_YES
    if args.verify:
        report = verify_reduction(cert)
        out["verification"] = report.to_dict()
        code = EXIT_YES if report.passed else EXIT_NO
    _emit(out)
    return code


def cmd_gen(args) -> int:
    g = generate(
        args.family,
        n=args.n,
        rows=args.rows,
        cols=args.cols,
        a=args.a,
        b=args.b,
        p=args.p,
        seed=args.seed,
        connected=args.connected,
    )
    fmt = args.format or _load_config().get("default_format", "edgelist")
    if args.output:
        save_graph(g, args.output, fmt)
    else:
        sys.stdout.write(serialize_graph(g, fmt))
    return EXIT_YES


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepkit", description="Maximum minimal separators: solve, enumerate, reduce")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    parser.add_argument("--quiet", "-q", action="store_true", help="errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_input(p, required=True):
        p.add_argument("--input", "-i", required=required, help="graph file")
        p.add_argument("--format", "-f", choices=FORMATS, default=None, help="graph format (auto-detected if omitted)")

    p = sub.add_parser("solve", help="is there a minimal separator of size >= k")
    graph_input(p)
    p.add_argument("--k", "-k", type=int, required=True)
    p.add_argument("--weighted", action="store_true", help="compare vertex weights instead of cardinality")
    p.add_argument("--engine", choices=ENGINES, default=None)
    p.add_argument("--emit-td", default=None, metavar="PATH", help="write the DP decomposition in PACE .td format")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="stream all minimal separators as JSON lines")
    graph_input(p)
    p.add_argument("--engine", choices=("delay", "bruteforce"), default="delay")
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("reduce", help="build a reduction certificate")
    p.add_argument("--kind", required=True, choices=("subdivide", "cobipartite", "linegraph", "compose"))
    p.add_argument("--input", "-i", action="append", required=True, help="graph file (repeat for compose)")
    p.add_argument("--format", "-f", choices=FORMATS, default=None)
    p.add_argument("--output", "-o", default=None, help="certificate JSON path")
    p.add_argument("--verify", action="store_true", help="check the reduction with the oracles")
    p.add_argument("--bipartition", default="auto", help="cobipartite: 'auto' or side A as comma-separated ids")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("gen", help="generate a graph")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("-n", type=int, default=None)
    p.add_argument("-r", "--rows", type=int, default=None)
    p.add_argument("-c", "--cols", type=int, default=None)
    p.add_argument("-a", type=int, default=None)
    p.add_argument("-b", type=int, default=None)
    p.add_argument("-p", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--connected", action="store_true", help="random-gnp: resample until connected")
    p.add_argument("--format", "-f", choices=FORMATS, default=None)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check a separator certificate")
    graph_input(p)
    p.add_argument("--separator", "-s", required=True, help="comma-separated vertex ids")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive reference answers")
    graph_input(p)
    p.add_argument(
        "--problem",
        required=True,
        choices=("max-separator", "connected-cut", "min-mis", "bicliques", "clique-separators"),
    )
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--nontrivial", action="store_true", help="connected-cut: both sides >= 2 vertices")
    p.add_argument("--bipartition", default="auto", help="bicliques: 'auto' or side A as comma-separated ids")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv(BASE_DIR / ".env")
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except RuntimeError as e:
        logger.exception(f"Internal error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
