"""Connectivity dynamic program over a nice tree decomposition.

A state at a node is a coloring of the bag, the partition of the red (blue)
bag vertices into the red (blue) components of the processed subgraph, and a
flag per color recording that some component of that color has already been
forgotten entirely. Since each side must induce a connected graph, a closed
color admits no further vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cograph import _merge
from .core import Graph, Instance, SolutionCut, Trivial, TscuError, Verdict, lift_verdict, normalize

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


class DecompositionError(TscuError, ValueError):
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


def validate_td(g: Graph, td: TreeDecomposition) -> None:
    """Raise :class:`DecompositionError` naming the first violated axiom."""
    nb = len(td.bags)
    if nb == 0:
        raise DecompositionError("tree: decomposition has no bags")
    if len(td.edges) != nb - 1:
        raise DecompositionError(f"tree: {nb} bags need {nb - 1} tree edges, got {len(td.edges)}")
    adj: list[list[int]] = [[] for _ in range(nb)]
    for a, b in td.edges:
        if not (0 <= a < nb and 0 <= b < nb) or a == b:
            raise DecompositionError(f"tree: bad tree edge ({a}, {b})")
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for b in adj[stack.pop()]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    if len(seen) != nb:
        raise DecompositionError("tree: bag graph is not connected")
    for b in td.bags:
        if any(not 0 <= v < g.n for v in b):
            raise DecompositionError("vertex coverage: bag holds a vertex outside the graph")
    covered = set().union(*td.bags)
    missing = set(range(g.n)) - covered
    if missing:
        raise DecompositionError(f"vertex coverage: vertex {min(missing) + 1} in no bag")
    for u, v, _ in g.edges:
        if not any(u in b and v in b for b in td.bags):
            raise DecompositionError(f"edge coverage: edge {u + 1}-{v + 1} in no bag")
    for v in range(g.n):
        holding = {i for i, b in enumerate(td.bags) if v in b}
        start = min(holding)
        reach = {start}
        stack = [start]
        while stack:
            for b in adj[stack.pop()]:
                if b in holding and b not in reach:
                    reach.add(b)
                    stack.append(b)
        if reach != holding:
            raise DecompositionError(f"coherence: bags holding vertex {v + 1} are not connected")


def elimination_td(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Decomposition induced by eliminating vertices in ``order``."""
    if sorted(order) != list(range(g.n)):
        raise DecompositionError("elimination order must be a permutation of the vertices")
    if g.n == 0:
        return TreeDecomposition((frozenset(),), ())
    adj = [set(g.adjacency[v]) for v in range(g.n)]
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    for v in order:
        nb = adj[v]
        bags.append(frozenset(nb | {v}))
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        adj[v] = set()
    edges = []
    roots = []
    for i, v in enumerate(order):
        later = [pos[u] for u in bags[i] if u != v]
        if later:
            edges.append((i, min(later)))
        else:
            roots.append(i)
    # one tree per connected component; chain the roots together
    edges += [(a, b) for a, b in zip(roots, roots[1:])]
    return TreeDecomposition(tuple(bags), tuple(edges))


def min_degree_order(g: Graph) -> list[int]:
    adj = [set(g.adjacency[v]) for v in range(g.n)]
    alive = set(range(g.n))
    order = []
    while alive:
        v = min(alive, key=lambda x: (len(adj[x]), x))
        nb = adj[v]
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        alive.discard(v)
        order.append(v)
    return order


def heuristic_td(g: Graph) -> TreeDecomposition:
    """Min-degree elimination decomposition, validated before it is returned."""
    td = elimination_td(g, min_degree_order(g))
    validate_td(g, td)
    return td


# --------------------------------------------------------------------------
# nice decompositions


@dataclass(frozen=True)
class NiceDecomposition:
    kinds: tuple[str, ...]
    vertex: tuple[int, ...]  # introduced/forgotten vertex, -1 otherwise
    children: tuple[tuple[int, ...], ...]
    bags: tuple[frozenset, ...]
    root: int

    def postorder(self) -> list[int]:
        out, stack = [], [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                out.append(t)
                continue
            stack.append((t, True))
            stack.extend((c, False) for c in reversed(self.children[t]))
        return out

    def as_td(self) -> TreeDecomposition:
        edges = [(t, c) for t in range(len(self.kinds)) for c in self.children[t]]
        return TreeDecomposition(self.bags, tuple(edges))

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1


def nice_decomposition(td: TreeDecomposition, g: Graph | None = None) -> NiceDecomposition:
    """Root at bag 0 and refine into leaf/introduce/forget/join nodes. The
    leaves and the root have empty bags."""
    if g is not None:
        validate_td(g, td)
    nb = len(td.bags)
    adj: list[list[int]] = [[] for _ in range(nb)]
    for a, b in td.edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [-1] * nb
    order = [0]
    seen = {0}
    for b in order:
        for c in sorted(adj[b]):
            if c not in seen:
                seen.add(c)
                parent[c] = b
                order.append(c)
    if len(order) != nb:
        raise DecompositionError("tree: bag graph is not connected")

    kinds: list[str] = []
    vertex: list[int] = []
    children: list[tuple[int, ...]] = []
    bags: list[frozenset] = []

    def node(kind, v, kids, bag):
        kinds.append(kind)
        vertex.append(v)
        children.append(tuple(kids))
        bags.append(frozenset(bag))
        return len(kinds) - 1

    def morph(t: int, target: frozenset) -> int:
        bag = set(bags[t])
        for v in sorted(bag - target):
            bag.discard(v)
            t = node(FORGET, v, (t,), bag)
        for v in sorted(target - bag):
            bag.add(v)
            t = node(INTRODUCE, v, (t,), bag)
        return t

    top: dict[int, int] = {}
    for b in reversed(order):
        target = td.bags[b]
        kids = [morph(top.pop(c), target) for c in order if parent[c] == b]
        if not kids:
            kids = [morph(node(LEAF, -1, (), ()), target)]
        t = kids[0]
        for other in kids[1:]:
            t = node(JOIN, -1, (t, other), target)
        top[b] = t
    root = morph(top[0], frozenset())
    return NiceDecomposition(tuple(kinds), tuple(vertex), tuple(children), tuple(bags), root)


# --------------------------------------------------------------------------
# PACE td files


def parse_td(text: str) -> TreeDecomposition:
    header = None
    bags: dict[int, frozenset] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td":
                    raise DecompositionError(f"line {lineno}: header must be 's td <bags> <maxbag> <n>'")
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "b":
                bags[int(parts[1]) - 1] = frozenset(int(x) - 1 for x in parts[2:])
            elif len(parts) == 2:
                edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
            else:
                raise DecompositionError(f"line {lineno}: unrecognized line")
        except ValueError as exc:
            if isinstance(exc, DecompositionError):
                raise
            raise DecompositionError(f"line {lineno}: expected integers") from None
    if header is None:
        raise DecompositionError("missing 's td' header")
    if sorted(bags) != list(range(header[0])):
        raise DecompositionError("bag ids must be 1..<bags>")
    return TreeDecomposition(tuple(bags[i] for i in range(header[0])), tuple(edges))


def serialize_td(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, b in enumerate(td.bags, 1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in sorted(b)]))
    lines += [f"{a + 1} {b + 1}" for a, b in td.edges]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# the dynamic program
#
# state = (red bag mask, red blocks, blue blocks, red closed, blue closed);
# masks are over global vertex ids, blocks use cograph's canonical partitions


def _block_of(blocks, bit):
    for b in blocks:
        if b & bit:
            return b
    raise AssertionError("bag vertex missing from its blocks")


def _drop(blocks, bit):
    """Remove ``bit`` from its block; report whether that block became empty."""
    out = []
    emptied = False
    for b in blocks:
        if b & bit:
            b &= ~bit
            if not b:
                emptied = True
                continue
        out.append(b)
    return tuple(sorted(out, key=lambda b: b & -b)), emptied


def _run_dp(g: Graph, nice: NiceDecomposition, S: frozenset, T: frozenset, bound: int):
    wt = [dict() for _ in range(g.n)]
    for u, v, w in g.edges:
        wt[u][v] = w
        wt[v][u] = w
    tables: dict[int, dict] = {}
    back: dict[int, dict] = {}
    for t in nice.postorder():
        kind = nice.kinds[t]
        table: dict = {}
        ptr: dict = {}

        def offer(state, value, how):
            if value > bound:
                return
            old = table.get(state)
            if old is None or value < old:
                table[state] = value
                ptr[state] = how

        if kind == LEAF:
            offer((0, (), (), False, False), 0, None)
        elif kind == INTRODUCE:
            v = nice.vertex[t]
            bit = 1 << v
            (child,) = nice.children[t]
            bag_nb = [u for u in wt[v] if u in nice.bags[child]]
            for state, val in tables[child].items():
                red, rb, bb, rc, bc = state
                for into_red in (True, False):
                    if (v in T) if into_red else (v in S):
                        continue
                    if rc if into_red else bc:
                        continue
                    same = bit
                    cost = 0
                    for u in bag_nb:
                        if bool(red >> u & 1) == into_red:
                            same |= 1 << u
                        else:
                            cost += wt[v][u]
                    if into_red:
                        new = (red | bit, _merge(rb, (same,)), bb, rc, bc)
                    else:
                        new = (red, rb, _merge(bb, (same,)), rc, bc)
                    offer(new, val + cost, state)
        elif kind == FORGET:
            v = nice.vertex[t]
            bit = 1 << v
            (child,) = nice.children[t]
            for state, val in tables[child].items():
                red, rb, bb, rc, bc = state
                if red & bit:
                    rb2, emptied = _drop(rb, bit)
                    if emptied and (rc or rb2):
                        continue
                    offer((red & ~bit, rb2, bb, rc or emptied, bc), val, state)
                else:
                    bb2, emptied = _drop(bb, bit)
                    if emptied and (bc or bb2):
                        continue
                    offer((red, rb, bb2, rc, bc or emptied), val, state)
        else:
            left, right = nice.children[t]
            bag = sorted(nice.bags[t])
            groups: dict[int, list] = {}
            for state, val in tables[right].items():
                groups.setdefault(state[0], []).append((state, val))
            shared_cache: dict[int, int] = {}
            for s1, v1 in tables[left].items():
                red = s1[0]
                if red not in shared_cache:
                    shared_cache[red] = sum(
                        w for i, a in enumerate(bag) for b in bag[i + 1:]
                        if (w := wt[a].get(b)) and bool(red >> a & 1) != bool(red >> b & 1)
                    )
                shared = shared_cache[red]
                for s2, v2 in groups.get(red, ()):
                    if (s1[3] and s2[3]) or (s1[4] and s2[4]):
                        continue
                    new = (red, _merge(s1[1], s2[1]), _merge(s1[2], s2[2]), s1[3] or s2[3], s1[4] or s2[4])
                    offer(new, v1 + v2 - shared, (s1, s2))
        tables[t] = table
        back[t] = ptr
        # children tables are only needed for reconstruction through back pointers
    return tables, back


def _reconstruct(nice: NiceDecomposition, back, state) -> set[int]:
    red: set[int] = set()
    stack = [(nice.root, state)]
    while stack:
        t, st = stack.pop()
        kind = nice.kinds[t]
        if kind == LEAF:
            continue
        how = back[t][st]
        if kind == INTRODUCE:
            v = nice.vertex[t]
            if st[0] >> v & 1:
                red.add(v)
            stack.append((nice.children[t][0], how))
        elif kind == FORGET:
            stack.append((nice.children[t][0], how))
        else:
            stack.append((nice.children[t][0], how[0]))
            stack.append((nice.children[t][1], how[1]))
    return red


def dp_solve_td(inst: Instance, td: TreeDecomposition) -> Verdict:
    """Run the DP on ``inst`` as given (no normalization)."""
    g = inst.graph
    validate_td(g, td)
    nice = nice_decomposition(td)
    tables, back = _run_dp(g, nice, inst.S, inst.T, inst.budget)
    root = tables[nice.root]
    stats = {"width": td.width, "nodes": len(nice.kinds)}
    if not root:
        return Verdict(False, None, None, stats)
    # ties broken by the smallest red set, so results do not depend on dict order
    best = min(root.values())
    cands = [st for st, val in root.items() if val == best]
    reds = sorted(tuple(sorted(_reconstruct(nice, back, st))) for st in cands)
    return Verdict(True, best, SolutionCut.from_red(g, reds[0]), stats)


def restrict_td(td: TreeDecomposition, keep: Sequence[int]) -> TreeDecomposition:
    index = {v: i for i, v in enumerate(keep)}
    bags = tuple(frozenset(index[v] for v in b if v in index) for b in td.bags)
    return TreeDecomposition(bags, td.edges)


def solve_treewidth(inst: Instance, td: TreeDecomposition | None = None) -> Verdict:
    """Normalize, then run the DP. Without ``td`` a min-degree decomposition
    is used."""
    if td is not None:
        validate_td(inst.graph, td)
    red = normalize(inst)
    if isinstance(red, Trivial):
        return red.verdict
    sub = red.instance
    sub_td = heuristic_td(sub.graph) if td is None else restrict_td(td, red.keep)
    return lift_verdict(inst, red, dp_solve_td(sub, sub_td))
