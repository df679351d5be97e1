"""Distance-to-cograph algorithm.

A modulator ``X`` (vertices whose removal leaves a P4-free graph) is found by
branching on induced P4s. For every coloring of ``X`` the bichromatic edges
inside ``X`` are paid up front, each monochromatic component of ``G[X]`` is
contracted, and a dynamic program runs over the cotree of ``G - X``. A table
entry is keyed by ``(node, red count, red blocks, blue blocks)`` where the
blocks are the traces on ``X`` of the red/blue components that contain a
vertex of the subtree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .core import (
    Graph,
    Instance,
    SolutionCut,
    Trivial,
    TscuError,
    Verdict,
    connected_components,
    contract_components,
    lift_verdict,
    normalize,
)

LEAF, UNION, JOIN = "leaf", "union", "join"


class NotCographError(TscuError):
    pass


# --------------------------------------------------------------------------
# block partitions (blocks are bitmasks; 0 is the empty block)


def _low(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _canon(blocks: Iterable[int]) -> tuple[int, ...]:
    nonempty = sorted({b for b in blocks if b}, key=_low)
    if any(b == 0 for b in blocks):
        nonempty.append(0)
    return tuple(nonempty)


def _merge(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out: list[int] = []
    empty = False
    for blk in a + b:
        if not blk:
            empty = True
            continue
        rest = []
        for o in out:
            if o & blk:
                blk |= o
            else:
                rest.append(o)
        rest.append(blk)
        out = rest
    if empty:
        out.append(0)
    return _canon(out)


def _join(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if not b:
        return a
    if not a:
        return b
    union = 0
    for blk in a + b:
        union |= blk
    return (union,)


def _to_masks(parts, index):
    return tuple(sum(1 << index[v] for v in blk) for blk in parts)


def _from_masks(blocks, universe):
    return tuple(frozenset(universe[i] for i in range(len(universe)) if blk >> i & 1) for blk in blocks)


def _partition_op(op, A, B):
    universe = sorted({v for blk in list(A) + list(B) for v in blk})
    index = {v: i for i, v in enumerate(universe)}
    a = _canon(_to_masks(A, index))
    b = _canon(_to_masks(B, index))
    return _from_masks(op(a, b), universe)


def pmerge(A, B) -> tuple[frozenset, ...]:
    """Union of two families of components: blocks sharing an element merge.

    Arguments are iterables of vertex sets; the result is canonical (blocks
    ordered by smallest element, the empty block last and at most once).
    """
    return _partition_op(_merge, A, B)


def pjoin(A, B) -> tuple[frozenset, ...]:
    """``A`` if ``B`` is empty, ``B`` if ``A`` is empty, otherwise the single
    union of all blocks."""
    return _partition_op(_join, A, B)


def canonical_partition(A) -> tuple[frozenset, ...]:
    return _partition_op(lambda a, b: _canon(a + b), A, ())


# --------------------------------------------------------------------------
# cotrees


@dataclass(frozen=True)
class Cotree:
    kind: tuple[str, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]
    vertex: tuple[int, ...]
    size: tuple[int, ...]
    root: int

    def leaves(self, t: int | None = None) -> list[int]:
        t = self.root if t is None else t
        out, stack = [], [t]
        while stack:
            u = stack.pop()
            if self.kind[u] == LEAF:
                out.append(self.vertex[u])
            else:
                stack += [self.right[u], self.left[u]]
        return out

    def postorder(self) -> list[int]:
        order, stack = [], [(self.root, False)]
        while stack:
            u, done = stack.pop()
            if done or self.kind[u] == LEAF:
                order.append(u)
            else:
                stack += [(u, True), (self.right[u], False), (self.left[u], False)]
        return order

    def edges(self) -> set[tuple[int, int]]:
        """Edge set of the cograph the tree evaluates to."""
        out = set()
        for t in self.postorder():
            if self.kind[t] == JOIN:
                for u in self.leaves(self.left[t]):
                    for v in self.leaves(self.right[t]):
                        out.add((min(u, v), max(u, v)))
        return out


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _components(masks, alive: int, complement: bool) -> list[int]:
    comps = []
    rest = alive
    while rest:
        start = rest & -rest
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nb = masks[v] & alive
                if complement:
                    nb = alive & ~nb & ~(1 << v)
                nxt |= nb
            nxt &= ~seen
            seen |= nxt
            frontier = nxt
        comps.append(seen)
        rest &= ~seen
    return comps


def _find_p4_in_prime(masks, part: int):
    for b in _bits(part):
        nb = masks[b] & part
        for c in _bits(nb):
            if c < b:
                continue
            nc = masks[c] & part
            for (x, y, nx, ny) in ((b, c, nb, nc), (c, b, nc, nb)):
                A = nx & ~ny & ~(1 << y)
                D = ny & ~nx & ~(1 << x)
                if not A or not D:
                    continue
                for a in _bits(A):
                    dd = D & ~masks[a]
                    if dd:
                        return (a, x, y, _low(dd))
    raise AssertionError("prime part without an induced P4")


def _decompose(masks, alive: int):
    """Return ``(nodes, None)`` with cotree node tuples, or ``(None, p4)``."""
    kind, left, right, vertex, size = [], [], [], [], []

    def new(k, l, r, v, s):
        kind.append(k)
        left.append(l)
        right.append(r)
        vertex.append(v)
        size.append(s)
        return len(kind) - 1

    result = {}  # vertex mask -> node id
    work = [("build", alive, None)]
    while work:
        op, mask, info = work.pop()
        if op == "build":
            if mask & (mask - 1) == 0:
                result[mask] = new(LEAF, -1, -1, _low(mask), 1)
                continue
            parts = _components(masks, mask, False)
            k = UNION
            if len(parts) == 1:
                parts = _components(masks, mask, True)
                k = JOIN
                if len(parts) == 1:
                    return None, _find_p4_in_prime(masks, mask)
            parts.sort(key=_low)
            work.append(("chain", mask, (k, parts)))
            for p in parts:
                work.append(("build", p, None))
        else:
            k, parts = info
            # right-deep chain: parts[0] k (parts[1] k (...))
            node = result[parts[-1]]
            acc = parts[-1]
            for p in reversed(parts[:-1]):
                acc |= p
                node = new(k, result[p], node, -1, bin(acc).count("1"))
            result[mask] = node
    return (kind, left, right, vertex, size, result[alive]), None


def build_cotree(g: Graph, vertices: Iterable[int] | None = None) -> Cotree | None:
    """Cotree of ``g`` (or of the subgraph induced by ``vertices``); ``None``
    when the graph contains an induced P4."""
    masks = g.bitmasks()
    alive = sum(1 << v for v in (range(g.n) if vertices is None else vertices))
    if not alive:
        return None
    nodes, _ = _decompose(masks, alive)
    if nodes is None:
        return None
    kind, left, right, vertex, size, root = nodes
    return Cotree(tuple(kind), tuple(left), tuple(right), tuple(vertex), tuple(size), root)


def find_p4(g: Graph, vertices: Iterable[int] | None = None):
    """An induced P4 ``(a, b, c, d)`` of the induced subgraph, or ``None``."""
    masks = g.bitmasks()
    alive = sum(1 << v for v in (range(g.n) if vertices is None else vertices))
    if not alive:
        return None
    return _decompose(masks, alive)[1]


def find_modulator(g: Graph, cap: int) -> frozenset | None:
    """Smallest ``X`` with ``|X| <= cap`` such that ``g - X`` is P4-free."""
    masks = g.bitmasks()
    full = (1 << g.n) - 1

    def search(alive: int, budget: int, seen: set) -> int | None:
        if alive in seen:
            return None
        seen.add(alive)
        p4 = _decompose(masks, alive)[1] if alive else None
        if p4 is None:
            return full & ~alive
        if budget == 0:
            return None
        for v in p4:
            found = search(alive & ~(1 << v), budget - 1, seen)
            if found is not None:
                return found
        return None

    for k in range(cap + 1):
        found = search(full, k, set())
        if found is not None:
            return frozenset(_bits(found))
    return None


# --------------------------------------------------------------------------
# dynamic program


def augment_modulator(inst: Instance, X: Iterable[int]) -> frozenset:
    X = set(X)
    if inst.S and not X & inst.S:
        X.add(min(inst.S))
    if inst.T and not X & inst.T:
        X.add(min(inst.T))
    return frozenset(X)


def join_crossings(n1: int, r1: int, n2: int, r2: int) -> int:
    """Edges a join node adds between differently colored vertices of its
    children (sizes ``n1``, ``n2`` with ``r1``, ``r2`` red vertices)."""
    return r1 * (n2 - r2) + r2 * (n1 - r1)


class _CotreeDP:
    """Tables for one coloring of the modulator.

    ``leaf_data[a]`` holds the red and blue leaf entries of vertex ``a`` as
    ``(key, cost)`` pairs, or ``None`` where the color is forbidden. Entries
    above ``bound`` are dropped.
    """

    def __init__(self, tree: Cotree, leaf_data, bound: int):
        self.tree = tree
        self.leaf_data = leaf_data
        self.bound = bound
        self.tables: dict[int, dict] = {}

    def run(self) -> dict:
        tree = self.tree
        bound = self.bound
        tables = self.tables
        for t in tree.postorder():
            k = tree.kind[t]
            if k == LEAF:
                table = {}
                red, blue = self.leaf_data[tree.vertex[t]]
                for entry, r in ((red, 1), (blue, 0)):
                    if entry is not None and entry[1] <= bound:
                        table[entry[0]] = {r: entry[1]}
                tables[t] = table
                continue
            t1, t2 = tree.left[t], tree.right[t]
            n1, n2 = tree.size[t1], tree.size[t2]
            join = k == JOIN
            op = _join if join else _merge
            out: dict = {}
            for (cr1, cb1), rows1 in tables[t1].items():
                for (cr2, cb2), rows2 in tables[t2].items():
                    key = (op(cr1, cr2), op(cb1, cb2))
                    rows = out.setdefault(key, {})
                    for r1, v1 in rows1.items():
                        for r2, v2 in rows2.items():
                            val = v1 + v2
                            if join:
                                val += join_crossings(n1, r1, n2, r2)
                            if val > bound:
                                continue
                            r = r1 + r2
                            old = rows.get(r)
                            if old is None or val < old:
                                rows[r] = val
            tables[t] = {key: rows for key, rows in out.items() if rows}
        return tables[tree.root]

    def reconstruct(self, key, r: int) -> set[int]:
        """Red vertices of ``G - X`` in a coloring realizing ``D[root, r, key]``.

        Children are searched by smallest ``r1`` first, then canonical key order.
        """
        tree = self.tree
        red: set[int] = set()
        todo = [(tree.root, key, r)]
        while todo:
            t, key, r = todo.pop()
            target = self.tables[t][key][r]
            k = tree.kind[t]
            if k == LEAF:
                if r == 1:
                    red.add(tree.vertex[t])
                continue
            t1, t2 = tree.left[t], tree.right[t]
            n1, n2 = tree.size[t1], tree.size[t2]
            op = _join if k == JOIN else _merge
            keys1 = sorted(self.tables[t1])
            keys2 = sorted(self.tables[t2])
            found = None
            for r1 in range(max(0, r - n2), min(n1, r) + 1):
                r2 = r - r1
                extra = join_crossings(n1, r1, n2, r2) if k == JOIN else 0
                for key1 in keys1:
                    v1 = self.tables[t1][key1].get(r1)
                    if v1 is None:
                        continue
                    for key2 in keys2:
                        v2 = self.tables[t2][key2].get(r2)
                        if v2 is None or v1 + v2 + extra != target:
                            continue
                        if (op(key1[0], key2[0]), op(key1[1], key2[1])) == key:
                            found = (key1, r1, key2, r2)
                            break
                    if found:
                        break
                if found:
                    break
            assert found is not None, "table entry without a realizing child pair"
            key1, r1, key2, r2 = found
            todo.append((t2, key2, r2))
            todo.append((t1, key1, r1))
        return red


def dp_solve(inst: Instance, X: Iterable[int], upper: int | None = None) -> Verdict:
    """Run the cotree DP for every admissible coloring of ``X``.

    ``inst`` must be connected with nonempty disjoint terminal sets, and
    ``G - X`` a cograph. Returns the best connected-sides solution whose
    weight is at most the budget (and below ``upper`` when given).
    """
    g = inst.graph
    X = frozenset(X)
    rest = [v for v in range(g.n) if v not in X]
    tree = build_cotree(g, rest) if rest else None
    if rest and tree is None:
        raise NotCographError("G - X contains an induced P4")
    xs = sorted(X)
    free = [x for x in xs if x not in inst.S and x not in inst.T]
    x_nbrs = {a: [(x, g.weight(a, x)) for x in g.adjacency[a] if x in X] for a in rest}
    x_edges = [(u, v, w) for u, v, w in g.edges if u in X and v in X]

    bound = inst.budget
    if upper is not None:
        bound = min(bound, upper)
    best = None  # (total, red set)
    colorings = 0
    for bits in product((True, False), repeat=len(free)):
        red_x = set(inst.S & X) | {x for x, b in zip(free, bits) if b}
        blue_x = X - red_x
        colorings += 1
        cross = sum(w for u, v, w in x_edges if (u in red_x) != (v in red_x))
        limit = bound if best is None else min(bound, best[0] - 1)
        if cross > limit:
            continue
        # contract monochromatic components of G[X] minus bichromatic edges
        kept = Graph.from_edges(g.n, [(u, v, w) for u, v, w in g.edges
                                      if not (u in X and v in X and (u in red_x) != (v in red_x))])
        parts = connected_components(kept, X)
        _, mapping = contract_components(kept, parts)
        cids = sorted({mapping[x] for x in X})
        cindex = {c: i for i, c in enumerate(cids)}
        bit = {x: 1 << cindex[mapping[x]] for x in X}
        red_all = 0
        for x in red_x:
            red_all |= bit[x]
        blue_all = 0
        for x in blue_x:
            blue_all |= bit[x]
        n_red_parts = bin(red_all).count("1")
        n_blue_parts = bin(blue_all).count("1")
        if not rest:
            if n_red_parts == 1 and n_blue_parts == 1 and cross <= limit:
                best = (cross, set(red_x))
            continue
        leaf_data = {}
        for a in rest:
            nr = nb = 0
            cost_red = cost_blue = 0
            for x, w in x_nbrs[a]:
                if x in red_x:
                    nr |= bit[x]
                    cost_blue += w
                else:
                    nb |= bit[x]
                    cost_red += w
            red_entry = None if a in inst.T else (((nr,), ()), cost_red)
            blue_entry = None if a in inst.S else (((), (nb,)), cost_blue)
            leaf_data[a] = (red_entry, blue_entry)
        dp = _CotreeDP(tree, leaf_data, limit - cross)
        root_table = dp.run()
        n_root = tree.size[tree.root]
        choice = None
        for r in range(n_root + 1):
            if r == 0 and n_red_parts != 1:
                continue
            if r == n_root and n_blue_parts != 1:
                continue
            key = (() if r == 0 else (red_all,), () if r == n_root else (blue_all,))
            val = root_table.get(key, {}).get(r)
            if val is not None and (choice is None or val < choice[0]):
                choice = (val, key, r)
        if choice is None:
            continue
        total = cross + choice[0]
        if total <= limit:
            red_rest = dp.reconstruct(choice[1], choice[2])
            best = (total, set(red_x) | red_rest)
    stats = {"modulator": len(X), "colorings": colorings}
    if best is None:
        return Verdict(False, stats=stats)
    return Verdict(True, best[0], SolutionCut.from_red(g, best[1]), stats)


def solve_cograph(inst: Instance, cap: int) -> Verdict | None:
    """Normalize, find a modulator within ``cap`` and run :func:`dp_solve`.

    Returns ``None`` when ``G`` has no modulator of size at most ``cap``.
    """
    norm = normalize(inst)
    if isinstance(norm, Trivial):
        return norm.verdict
    red = norm.instance
    X = find_modulator(red.graph, cap)
    if X is None:
        return None
    X = augment_modulator(red, X)
    return lift_verdict(inst, norm, dp_solve(red, X))
