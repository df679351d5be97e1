"""Instance generators: the hardness constructions (3,4-SAT with max degree
three, Regular Multicolored Clique with a dominating vertex, the bipartite
bisection-width-one transform) and seeded random families."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .core import Graph, Instance, TscuError, connected_components

__all__ = [
    "CnfFormula",
    "MccInput",
    "MccInstance",
    "GeneratorError",
    "gen_sat34",
    "gen_mcc",
    "mcc_witness",
    "transform_bipartite",
    "gen_random",
    "parse_dimacs_cnf",
    "base_seed",
]


class GeneratorError(TscuError, ValueError):
    pass


def base_seed(default: int) -> int:
    """Fixture seed, overridable through ``TSCU_SEED``."""
    env = os.environ.get("TSCU_SEED")
    return int(env) if env else default


# --------------------------------------------------------------------------
# 3,4-SAT


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))

    def check_34(self) -> None:
        """Raise unless every clause has 1..3 literals and every variable
        occurs in at most four clauses."""
        occurs = [0] * (self.num_vars + 1)
        for j, clause in enumerate(self.clauses):
            lits = set(clause)
            if not lits:
                raise GeneratorError(f"clause {j + 1} is empty")
            if len(lits) > 3:
                raise GeneratorError(f"clause {j + 1} has {len(lits)} literals")
            for lit in lits:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise GeneratorError(f"literal {lit} out of range")
            for var in {abs(lit) for lit in lits}:
                occurs[var] += 1
                if occurs[var] > 4:
                    raise GeneratorError(f"variable {var} occurs in more than four clauses")

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """``assignment[i]`` is the value of variable ``i + 1``."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)


def parse_dimacs_cnf(text: str) -> CnfFormula:
    num_vars = None
    clauses, current = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise GeneratorError(f"bad cnf header {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        raise GeneratorError("missing 'p cnf' header")
    return CnfFormula(num_vars, tuple(clauses))


def sat34_layout(num_vars: int, num_clauses: int):
    """Vertex ids used by :func:`gen_sat34`: ``pos(i, p)`` and ``neg(i, p)``
    for variable ``i`` in ``1..n`` and path position ``p`` in ``1..6``,
    ``clause(j)`` for ``j`` in ``1..m``, then ``f1`` and ``f2``."""

    def pos(i, p):
        return 12 * (i - 1) + p - 1

    def neg(i, p):
        return 12 * (i - 1) + 5 + p

    def clause(j):
        return 12 * num_vars + j - 1

    f1 = 12 * num_vars + num_clauses
    return pos, neg, clause, f1, f1 + 1


def gen_sat34(f: CnfFormula) -> Instance:
    """2-DCS instance of maximum degree three that is a yes-instance exactly
    when ``f`` is satisfiable."""
    f.check_34()
    nv, mc = f.num_vars, len(f.clauses)
    pos, neg, clause, f1, f2 = sat34_layout(nv, mc)
    edges = []
    for i in range(1, nv + 1):
        for p in range(1, 6):
            edges.append((pos(i, p), pos(i, p + 1)))
            edges.append((neg(i, p), neg(i, p + 1)))
    next_slot = {}
    for j, c in enumerate(f.clauses, 1):
        for lit in sorted(set(c), key=lambda l: (abs(l), l < 0)):
            path = pos if lit > 0 else neg
            slot = next_slot.get(lit, 2)
            next_slot[lit] = slot + 1
            edges.append((clause(j), path(abs(lit), slot)))
    for i in range(1, nv):
        edges += [
            (pos(i, 6), neg(i + 1, 1)),
            (neg(i, 6), pos(i + 1, 1)),
            (pos(i, 6), pos(i + 1, 1)),
            (neg(i, 6), neg(i + 1, 1)),
        ]
    if nv:
        edges += [(f1, pos(1, 1)), (f1, neg(1, 1)), (f2, pos(nv, 6)), (f2, neg(nv, 6))]
    g = Graph.from_edges(12 * nv + mc + 2, edges)
    return Instance(g, frozenset({f1, f2}), frozenset(clause(j) for j in range(1, mc + 1)), None)


# --------------------------------------------------------------------------
# Regular Multicolored Clique


@dataclass(frozen=True)
class MccInput:
    graph: Graph
    classes: tuple[tuple[int, ...], ...]
    d: int

    def validate(self) -> None:
        g = self.graph
        k = len(self.classes)
        if k == 0:
            raise GeneratorError("no color classes")
        seen = sorted(v for c in self.classes for v in c)
        if seen != list(range(g.n)):
            raise GeneratorError("color classes must partition the vertex set")
        if len({len(c) for c in self.classes}) != 1:
            raise GeneratorError("color classes must have equal size")
        for v in range(g.n):
            if g.degree(v) != self.d:
                raise GeneratorError(f"vertex {v} has degree {g.degree(v)}, expected {self.d}")
        for c in self.classes:
            cs = set(c)
            for v in c:
                if cs & set(g.adjacency[v]):
                    raise GeneratorError("color classes must be independent sets")


class MccInstance(NamedTuple):
    instance: Instance
    c1: int
    c2: int


def _mcc_ids(n: int, m: int, k: int):
    s = n
    t = [n + 1 + i for i in range(k)]
    base = n + 1 + k
    width = n + 2 * m

    def copy(v, j):  # j in 1..n+2m
        return base + v * width + j - 1

    return s, t, copy, base + n * width


def gen_mcc(mi: MccInput) -> MccInstance:
    mi.validate()
    g = mi.graph
    n, m, k, d = g.n, g.m, len(mi.classes), mi.d
    s, t, copy, total = _mcc_ids(n, m, k)
    width = n + 2 * m
    edges = [(u, v) for u, v, _ in g.edges]
    for i, cls in enumerate(mi.classes):
        edges += [(t[i], v) for v in cls]
        edges += [(u, v) for a, u in enumerate(cls) for v in cls[a + 1:]]
    edges += [(s, v) for v in range(n)]
    edges += [(s, ti) for ti in t]
    copies = [copy(v, j) for v in range(n) for j in range(1, width + 1)]
    for v in range(n):
        edges += [(v, copy(v, j)) for j in range(1, width + 1)]
    edges += [(s, c) for c in copies]
    edges += [(a, b) for i, a in enumerate(copies) for b in copies[i + 1:]]
    ell = 2 * n + k * (n + 2 * m + d - k + 1)
    inst = Instance(Graph.from_edges(total, edges), frozenset({s}), frozenset(t), ell)
    return MccInstance(inst, 2 * n, n + 2 * m + d + 1)


def mcc_witness(mi: MccInput, clique: Sequence[int]) -> frozenset:
    """Red side ``V(H) - (T + clique)`` induced by a multicolored clique."""
    g = mi.graph
    s, t, copy, total = _mcc_ids(g.n, g.m, len(mi.classes))
    blue = set(t) | set(clique)
    return frozenset(v for v in range(total) if v not in blue)


def clique_cover(mi: MccInput) -> list[frozenset]:
    """The ``k + 1`` cliques covering the :func:`gen_mcc` graph."""
    g = mi.graph
    s, t, copy, total = _mcc_ids(g.n, g.m, len(mi.classes))
    cover = [frozenset(cls) | {t[i]} for i, cls in enumerate(mi.classes)]
    cover.append(frozenset(range(g.n + 1 + len(t), total)) | {s})
    return cover


# --------------------------------------------------------------------------
# bipartite transform


def transform_bipartite(inst: Instance) -> Instance:
    """Attach a terminal-free copy of the graph to the smallest S-vertex and
    subdivide every edge once."""
    if inst.ell is not None:
        raise GeneratorError("transform_bipartite only applies to 2-DCS instances (no budget)")
    if not inst.S:
        raise GeneratorError("transform_bipartite needs a nonempty S")
    g = inst.graph
    n = g.n
    s0 = min(inst.S)
    doubled = list(g.edges) + [(u + n, v + n, w) for u, v, w in g.edges] + [(s0, s0 + n, 1)]
    edges = []
    nxt = 2 * n
    for u, v, w in doubled:
        edges += [(u, nxt, w), (nxt, v, w)]
        nxt += 1
    return Instance(Graph.from_edges(nxt, edges), inst.S, inst.T, None)


def is_bipartite(g: Graph) -> bool:
    color = [-1] * g.n
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return False
    return True


# --------------------------------------------------------------------------
# random families


def _random_tree_edges(rng: random.Random, vertices: list[int]) -> list[tuple[int, int]]:
    order = vertices[:]
    rng.shuffle(order)
    return [(order[i], order[rng.randrange(i)]) for i in range(1, len(order))]


def _pick_terminals(rng: random.Random, n: int, s: int, t: int):
    if s + t > n:
        raise GeneratorError(f"cannot place {s}+{t} terminals on {n} vertices")
    chosen = rng.sample(range(n), s + t)
    return frozenset(chosen[:s]), frozenset(chosen[s:])


def _random_cograph_edges(rng: random.Random, vertices: list[int], top: str) -> list[tuple[int, int]]:
    if len(vertices) == 1:
        return []
    cut = rng.randint(1, len(vertices) - 1)
    left, right = vertices[:cut], vertices[cut:]
    edges = []
    for part in (left, right):
        edges += _random_cograph_edges(rng, part, rng.choice(("union", "join")))
    if top == "join":
        edges += [(u, v) for u in left for v in right]
    return edges


@dataclass
class RandomParams:
    n: int = 8
    p: float = 0.3
    s: int = 1
    t: int = 1
    ell: int | None = None
    j: int = 0
    rows: int = 3
    cols: int = 3
    extra: dict = field(default_factory=dict)


def gen_random(kind: str, params: RandomParams | dict | None = None, seed: int = 0) -> Instance:
    """Seeded random instance.

    kinds: ``connected`` (spanning tree plus G(n, p) edges), ``cograph_plus_modulator``
    (random cotree on ``n - j`` vertices joined at the root, plus ``j`` vertices
    with random edges), ``low_independence`` (complement of a sparse G(n, p)
    graph, made connected), ``grid`` (``rows x cols``).
    """
    if params is None:
        params = RandomParams()
    elif isinstance(params, dict):
        params = RandomParams(**params)
    rng = random.Random(seed)
    n = params.n
    if not 0.0 <= params.p <= 1.0:
        raise GeneratorError("edge probability outside [0, 1]")
    if kind == "connected":
        if n < 1:
            raise GeneratorError("need n >= 1")
        edges = set(tuple(sorted(e)) for e in _random_tree_edges(rng, list(range(n))))
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < params.p:
                    edges.add((u, v))
    elif kind == "cograph_plus_modulator":
        core_n = n - params.j
        if core_n < 2 or params.j < 0:
            raise GeneratorError("need n - j >= 2")
        verts = list(range(core_n))
        rng.shuffle(verts)
        edges = set(tuple(sorted(e)) for e in _random_cograph_edges(rng, verts, "join"))
        for x in range(core_n, n):
            nbrs = [v for v in range(x) if rng.random() < params.p]
            if not nbrs:
                nbrs = [rng.randrange(x)]
            edges.update((v, x) for v in nbrs)
    elif kind == "low_independence":
        if n < 2:
            raise GeneratorError("need n >= 2")
        sparse = {(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < params.p}
        edges = {(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in sparse}
        g = Graph.from_edges(n, edges)
        comps = connected_components(g)
        for a, b in zip(comps, comps[1:]):
            edges.add((min(a), min(b)))
    elif kind == "grid":
        r, c = params.rows, params.cols
        if r < 1 or c < 1:
            raise GeneratorError("grid needs positive dimensions")
        n = r * c
        edges = set()
        for i in range(r):
            for j in range(c):
                v = i * c + j
                if j + 1 < c:
                    edges.add((v, v + 1))
                if i + 1 < r:
                    edges.add((v, v + c))
    else:
        raise GeneratorError(f"unknown kind {kind!r}")
    S, T = _pick_terminals(rng, n, params.s, params.t)
    return Instance(Graph.from_edges(n, sorted(edges)), S, T, params.ell)
