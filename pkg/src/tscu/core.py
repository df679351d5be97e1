"""Graph and instance model, the instance/solution file formats, normalization
and the solution verifier shared by every solver."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence


class TscuError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TscuError, ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class VertexRangeError(ParseError):
    pass


class SelfLoopError(ParseError):
    pass


class ContractError(TscuError, ValueError):
    pass


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1`` with positive integer
    edge weights.

    Build it with :meth:`from_edges`, which merges parallel edges by summing
    their weights. ``edges`` holds ``(u, v, w)`` triples with ``u < v`` in
    sorted order.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    weights: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adj: list[list[int]] = [[] for _ in range(self.n)]
        weights: dict[tuple[int, int], int] = {}
        prev = None
        for u, v, w in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
            if prev is not None and (u, v) <= prev:
                raise ValueError("edges must be sorted and free of duplicates")
            prev = (u, v)
            adj[u].append(v)
            adj[v].append(u)
            weights[(u, v)] = w
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Accepts ``(u, v)`` or ``(u, v, w)`` items in any order/orientation."""
        merged: dict[tuple[int, int], int] = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = int(e[2]) if len(e) > 2 else 1
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = _edge_key(u, v)
            merged[key] = merged.get(key, 0) + w
        return cls(n, tuple((u, v, w) for (u, v), w in sorted(merged.items())))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def weight(self, u: int, v: int) -> int:
        return self.weights.get(_edge_key(u, v), 0)

    def has_edge(self, u: int, v: int) -> bool:
        return _edge_key(u, v) in self.weights

    def bitmasks(self) -> list[int]:
        """Neighborhoods as integer bitmasks."""
        masks = [0] * self.n
        for u, v, _ in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; returns it with the list
        mapping new ids to old ids."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v], w) for u, v, w in self.edges if u in index and v in index]
        return Graph.from_edges(len(keep), edges), keep

    def cut_weight(self, red: Iterable[int]) -> int:
        red = set(red)
        return sum(w for u, v, w in self.edges if (u in red) != (v in red))

    def is_connected(self) -> bool:
        return len(connected_components(self)) <= 1


@dataclass(frozen=True)
class Instance:
    """A TSCU instance. ``ell is None`` means the 2-DCS budget (total edge weight)."""

    graph: Graph
    S: frozenset
    T: frozenset
    ell: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "T", frozenset(self.T))
        for v in self.S | self.T:
            if not 0 <= v < self.graph.n:
                raise ValueError(f"terminal {v} out of range")
        if self.ell is not None and self.ell < 0:
            raise ValueError("budget must be nonnegative")

    @property
    def budget(self) -> int:
        return self.graph.total_weight if self.ell is None else self.ell

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def is_2dcs(self) -> bool:
        return self.ell is None


@dataclass(frozen=True)
class SolutionCut:
    red: frozenset
    blue: frozenset
    cut_edges: tuple[tuple[int, int], ...]
    cut_weight: int

    @classmethod
    def from_red(cls, graph: Graph, red: Iterable[int]) -> "SolutionCut":
        red = frozenset(red)
        blue = frozenset(range(graph.n)) - red
        cut = [(u, v, w) for u, v, w in graph.edges if (u in red) != (v in red)]
        return cls(red, blue, tuple((u, v) for u, v, _ in cut), sum(w for *_, w in cut))


@dataclass(frozen=True)
class Verdict:
    answer: bool
    optimum: int | None = None
    witness: SolutionCut | None = None
    stats: dict = field(default_factory=dict, compare=False)

    def line(self) -> str:
        return f"YES {self.optimum}" if self.answer else "NO"


class Check(NamedTuple):
    valid: bool
    reason: str
    cut_weight: int


def verify_solution(inst: Instance, sol: SolutionCut | Iterable[int]) -> Check:
    """Literal TSCU acceptance check of a red set (or a :class:`SolutionCut`).

    ``G[red]`` itself need not be connected; only the terminals of each side
    must share a component.
    """
    g = inst.graph
    red = frozenset(sol.red if isinstance(sol, SolutionCut) else sol)
    if any(not 0 <= v < g.n for v in red):
        return Check(False, "red vertex out of range", 0)
    blue = frozenset(range(g.n)) - red
    weight = g.cut_weight(red)
    if not inst.S <= red:
        return Check(False, "S not red", weight)
    if not inst.T <= blue:
        return Check(False, "T not blue", weight)
    if not _within_one_component(g, red, inst.S):
        return Check(False, "S not connected in red", weight)
    if not _within_one_component(g, blue, inst.T):
        return Check(False, "T not connected in blue", weight)
    if weight > inst.budget:
        return Check(False, f"cut weight {weight} exceeds budget {inst.budget}", weight)
    return Check(True, "ok", weight)


def _within_one_component(g: Graph, side: frozenset, terminals: frozenset) -> bool:
    if len(terminals) <= 1:
        return True
    start = min(terminals)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in g.adjacency[u]:
            if w in side and w not in seen:
                seen.add(w)
                stack.append(w)
    return terminals <= seen


def connected_components(g: Graph, restrict_to: Iterable[int] | None = None) -> list[frozenset]:
    """Components of the subgraph induced by ``restrict_to`` (default: all
    vertices), ordered by smallest vertex."""
    allowed = set(range(g.n)) if restrict_to is None else set(restrict_to)
    comps = []
    seen: set[int] = set()
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                if w in allowed and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def contract_components(g: Graph, parts: Sequence[Iterable[int]]) -> tuple[Graph, list[int]]:
    """Contract each (connected, pairwise disjoint) part to a single vertex.

    New ids follow the order of each class's smallest old vertex. Parallel
    edges merge with summed weights; edges inside a part vanish.
    """
    owner = list(range(g.n))
    seen: set[int] = set()
    for part in parts:
        part = frozenset(part)
        if not part:
            continue
        if part & seen:
            raise ContractError("parts overlap")
        seen |= part
        if len(connected_components(g, part)) != 1:
            raise ContractError(f"part {sorted(part)} is not connected")
        rep = min(part)
        for v in part:
            owner[v] = rep
    reps = sorted(set(owner))
    new_id = {r: i for i, r in enumerate(reps)}
    mapping = [new_id[owner[v]] for v in range(g.n)]
    edges = [(mapping[u], mapping[v], w) for u, v, w in g.edges if mapping[u] != mapping[v]]
    return Graph.from_edges(len(reps), edges), mapping


# --------------------------------------------------------------------------
# normalization


@dataclass(frozen=True)
class Reduced:
    """A connected instance with nonempty disjoint terminal sets. ``keep[i]``
    is the original id of reduced vertex ``i``."""

    instance: Instance
    keep: tuple[int, ...]

    def lift(self, red: Iterable[int]) -> frozenset:
        return frozenset(self.keep[v] for v in red)


@dataclass(frozen=True)
class Trivial:
    verdict: Verdict


def normalize(inst: Instance) -> Reduced | Trivial:
    g = inst.graph
    S, T = inst.S, inst.T
    if S & T:
        return Trivial(Verdict(False))
    comps = connected_components(g)
    comp_of = {}
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i
    s_comps = {comp_of[v] for v in S}
    t_comps = {comp_of[v] for v in T}
    if len(s_comps) > 1 or len(t_comps) > 1:
        return Trivial(Verdict(False))
    if not S or not T or s_comps != t_comps:
        # S (possibly empty) takes its whole component, everything else is blue
        red = comps[s_comps.pop()] if s_comps else frozenset()
        return Trivial(Verdict(True, 0, SolutionCut.from_red(g, red)))
    (ci,) = s_comps
    if len(comps) == 1:
        return Reduced(inst, tuple(range(g.n)))
    sub, keep = g.induced(comps[ci])
    index = {v: i for i, v in enumerate(keep)}
    ell = inst.ell
    reduced = Instance(sub, frozenset(index[v] for v in S), frozenset(index[v] for v in T), ell)
    return Reduced(reduced, tuple(keep))


def lift_verdict(inst: Instance, red: Reduced, verdict: Verdict) -> Verdict:
    """Map a verdict on ``red.instance`` back to ``inst``'s vertex ids."""
    if verdict.witness is None:
        return verdict
    sol = SolutionCut.from_red(inst.graph, red.lift(verdict.witness.red))
    return Verdict(verdict.answer, verdict.optimum, sol, verdict.stats)


# --------------------------------------------------------------------------
# file formats


def _tokens(text: str | bytes):
    if isinstance(text, bytes):
        text = text.decode("ascii")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        yield lineno, line.split()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


def parse_instance(text: str | bytes) -> Instance:
    n = m = None
    edges: list[tuple[int, int]] = []
    S: set[int] = set()
    T: set[int] = set()
    ell = None

    def vertex(tok, lineno):
        v = _int(tok, lineno)
        if not 1 <= v <= n:
            raise VertexRangeError(f"vertex {v} outside 1..{n}", lineno)
        return v - 1

    for lineno, parts in _tokens(text):
        kind = parts[0]
        if n is None:
            if kind != "p" or len(parts) != 4 or parts[1] != "tscu":
                raise ParseError("first line must be 'p tscu <n> <m>'", lineno)
            n, m = _int(parts[2], lineno), _int(parts[3], lineno)
            if n < 0 or m < 0:
                raise ParseError("negative size in header", lineno)
            continue
        if kind == "p":
            raise ParseError("duplicate header", lineno)
        if kind == "e":
            if len(parts) != 3:
                raise ParseError("edge line must be 'e <u> <v>'", lineno)
            u, v = vertex(parts[1], lineno), vertex(parts[2], lineno)
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u + 1}", lineno)
            edges.append((u, v))
        elif kind in ("s", "t"):
            target = S if kind == "s" else T
            target.update(vertex(tok, lineno) for tok in parts[1:])
        elif kind == "l":
            if len(parts) != 2:
                raise ParseError("budget line must be 'l <ell>'", lineno)
            if ell is not None:
                raise ParseError("duplicate budget line", lineno)
            ell = _int(parts[1], lineno)
            if ell < 0:
                raise ParseError("negative budget", lineno)
        else:
            raise ParseError(f"unknown line type {kind!r}", lineno)
    if n is None:
        raise ParseError("missing 'p tscu' header")
    if len(edges) != m:
        raise ParseError(f"header announces {m} edges, found {len(edges)}")
    return Instance(Graph.from_edges(n, edges), frozenset(S), frozenset(T), ell)


def serialize_instance(inst: Instance) -> str:
    g = inst.graph
    lines = [f"p tscu {g.n} {g.total_weight}"]
    for u, v, w in g.edges:
        lines.extend([f"e {u + 1} {v + 1}"] * w)
    if inst.S:
        lines.append("s " + " ".join(str(v + 1) for v in sorted(inst.S)))
    if inst.T:
        lines.append("t " + " ".join(str(v + 1) for v in sorted(inst.T)))
    if inst.ell is not None:
        lines.append(f"l {inst.ell}")
    return "\n".join(lines) + "\n"


def parse_solution(text: str | bytes, n: int) -> frozenset:
    red = set()
    for lineno, parts in _tokens(text):
        if parts[0] != "r" or len(parts) != 2:
            raise ParseError("solution lines must be 'r <u>'", lineno)
        v = _int(parts[1], lineno)
        if not 1 <= v <= n:
            raise VertexRangeError(f"vertex {v} outside 1..{n}", lineno)
        red.add(v - 1)
    return frozenset(red)


def serialize_solution(sol: SolutionCut | Iterable[int]) -> str:
    red = sol.red if isinstance(sol, SolutionCut) else sol
    return "".join(f"r {v + 1}\n" for v in sorted(red))


def read_instance(path) -> Instance:
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


def write_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_instance(inst))
