import itertools
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tscu.core import Graph, Instance  # noqa: E402
from tscu.generators import base_seed  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0])):
        ok, detail = _ACCEPTANCE[name]
        terminalreporter.write_line(f"criterion {name}: {'PASS' if ok else 'FAIL'} ({detail})")


def seeds(count: int, salt: int) -> list[int]:
    """Fixture seeds; TSCU_SEED shifts the whole family."""
    base = base_seed(0)
    return [base * 1_000_003 + salt * 10_007 + i for i in range(count)]


def make_instance(n, edges, S, T, ell=None) -> Instance:
    """Build from 1-based ids, as in the worked examples."""
    g = Graph.from_edges(n, [(u - 1, v - 1) for u, v in edges])
    return Instance(g, frozenset(s - 1 for s in S), frozenset(t - 1 for t in T), ell)


def cycle_edges(n):
    return [(i, i % n + 1) for i in range(1, n + 1)]


def complete_edges(n):
    return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]


def exhaustive_cut(g: Graph, A, B) -> int:
    """Minimum crossing weight over all bipartitions separating A from B."""
    free = [v for v in range(g.n) if v not in A and v not in B]
    best = None
    for bits in itertools.product((0, 1), repeat=len(free)):
        side = set(A) | {v for v, b in zip(free, bits) if b}
        w = g.cut_weight(side)
        best = w if best is None else min(best, w)
    return best


def sat_brute(f) -> bool:
    return any(f.satisfied_by(a) for a in itertools.product((False, True), repeat=f.num_vars))


def random_weighted_graph(rng: random.Random, n: int, p: float, max_w: int = 3) -> Graph:
    order = list(range(n))
    rng.shuffle(order)
    edges = {}
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        edges[(min(a, b), max(a, b))] = rng.randint(1, max_w)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.setdefault((u, v), rng.randint(1, max_w))
    return Graph.from_edges(n, [(u, v, w) for (u, v), w in edges.items()])


@pytest.fixture
def fixtures_dir():
    return FIXTURES
