"""
Test helpers for sepkit
PASS/FAIL reporting so every test_*.py can also run as a plain script,
plus the small named graphs the suites share.
"""
import sys
import traceback

from generators import complete, complete_bipartite, cycle, grid, path
from graph_core import Graph, mask_of

PASS = FAIL = 0


def result(name, status, detail=""):
    global PASS, FAIL
    icon = {"PASS": "\033[32mPASS\033[0m", "FAIL": "\033[31mFAIL\033[0m"}
    print(f"  [{icon[status]}] {name}{': ' + detail if detail else ''}", flush=True)
    if status == "PASS":
        PASS += 1
    else:
        FAIL += 1


def expect_raises(exc_type, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc_type as e:
        return e
    raise AssertionError(f"{fn.__name__} did not raise {exc_type.__name__}")


def run_module(namespace: dict, title: str) -> int:
    print("\n" + "=" * 70)
    print(title)
    print("=" * 70, flush=True)
    for name, fn in list(namespace.items()):
        if not name.startswith("test_") or not callable(fn):
            continue
        try:
            fn()
            result(name, "PASS")
        except Exception as e:
            result(name, "FAIL", f"{type(e).__name__}: {e}")
            traceback.print_exc(limit=3)
    print("=" * 70)
    print(f"RESULTS: {PASS} PASS | {FAIL} FAIL | {PASS + FAIL} TOTAL")
    return 0 if FAIL == 0 else 1


def exit_with(namespace: dict, title: str):
    sys.exit(run_module(namespace, title))


# ---- shared graphs ---------------------------------------------------------
def P(n: int) -> Graph:
    return path(n)


def C(n: int) -> Graph:
    return cycle(n)


def K(n: int) -> Graph:
    return complete(n)


def Kab(a: int, b: int) -> Graph:
    return complete_bipartite(a, b)


def grid3x3() -> Graph:
    return grid(3, 3)


def S(*vertices: int) -> int:
    """Vertex set literal."""
    return mask_of(vertices)
