"""Kernelizations: degree-one / degree-two reduction rules (linear in the
feedback edge number) and a marking kernel for 2-DCS parameterized by vertex
cover."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

from .core import Graph, Instance, Trivial, TscuError, Verdict, connected_components, normalize

RULES = ("R1", "R2", "R3", "R4", "R5", "R6")


class CoverError(TscuError, ValueError):
    pass


class ModeError(TscuError, ValueError):
    pass


def feedback_edge_number(g: Graph) -> int:
    return g.m - g.n + len(connected_components(g))


def _stats(inst: Instance) -> dict:
    g = inst.graph
    return {"n": g.n, "m": g.m, "s": len(inst.S), "t": len(inst.T), "ell": inst.ell}


@dataclass
class KernelReport:
    input_stats: dict
    output_stats: dict | None = None
    parameter: int | None = None
    input_parameter: int | None = None
    rules_applied: dict = field(default_factory=dict)
    trivial: Verdict | None = None
    keep: tuple = ()

    def flat(self) -> dict:
        out = {f"input_{k}": v for k, v in self.input_stats.items()}
        for k, v in (self.output_stats or {}).items():
            out[f"output_{k}"] = v
        out["parameter"] = self.parameter
        out["input_parameter"] = self.input_parameter
        for rule, cnt in self.rules_applied.items():
            out[f"rule_{rule}"] = cnt
        out["trivial"] = None if self.trivial is None else self.trivial.line()
        return out


@dataclass(frozen=True)
class Kernel:
    instance: Instance
    report: KernelReport


@dataclass(frozen=True)
class KernelTrivial(Trivial):
    report: KernelReport | None = None


# --------------------------------------------------------------------------
# feedback edge number rules


class _Work:
    """Mutable weighted graph keyed by original vertex ids."""

    def __init__(self, inst: Instance, keep):
        g = inst.graph
        self.adj: dict[int, dict[int, int]] = {keep[v]: {} for v in range(g.n)}
        for u, v, w in g.edges:
            self.adj[keep[u]][keep[v]] = w
            self.adj[keep[v]][keep[u]] = w
        self.S = {keep[v] for v in inst.S}
        self.T = {keep[v] for v in inst.T}
        self.ell = inst.ell

    def deg(self, v):
        return len(self.adj[v])

    def remove(self, v):
        for u in self.adj.pop(v):
            del self.adj[u][v]
        self.S.discard(v)
        self.T.discard(v)

    def link(self, u, v, w):
        self.adj[u][v] = w
        self.adj[v][u] = w

    def unlink(self, u, v):
        del self.adj[u][v]
        del self.adj[v][u]

    def min_weight(self):
        return min((w for nb in self.adj.values() for w in nb.values()), default=0)

    def to_instance(self):
        verts = sorted(self.adj)
        index = {v: i for i, v in enumerate(verts)}
        edges = [(index[u], index[v], w) for u in verts for v, w in self.adj[u].items() if u < v]
        g = Graph(len(verts), tuple(sorted(edges)))
        inst = Instance(g, frozenset(index[v] for v in self.S), frozenset(index[v] for v in self.T), self.ell)
        return inst, tuple(verts)

    def paths(self):
        """Maximal paths through degree-2 vertices as (v0, internal, vp)."""
        for a in sorted(self.adj):
            if self.deg(a) == 2:
                continue
            for b in sorted(self.adj[a]):
                if self.deg(b) != 2:
                    continue
                internal = [b]
                prev, cur = a, b
                while True:
                    (nxt,) = [x for x in self.adj[cur] if x != prev] or [prev]
                    if self.deg(nxt) != 2:
                        break
                    internal.append(nxt)
                    prev, cur = cur, nxt
                yield a, internal, nxt

    def cycle(self):
        """The vertex order around the graph when it is a single cycle."""
        start = min(self.adj)
        order = [start]
        prev, cur = None, start
        while True:
            nxt = min(x for x in self.adj[cur] if x != prev)
            if nxt == start:
                return order
            order.append(nxt)
            prev, cur = cur, nxt


def _first_stretch(seq, S, T):
    """First pair of consecutive terminals of opposite sets along ``seq``;
    returns positions (i, j)."""
    last = None
    for pos, v in enumerate(seq):
        if v in S or v in T:
            if last is not None and (seq[last] in S) != (v in S):
                return last, pos
            last = pos
    return None


def kernelize_fes(inst: Instance) -> Kernel | KernelTrivial:
    report = KernelReport(_stats(inst), input_parameter=feedback_edge_number(inst.graph))
    report.rules_applied = {r: 0 for r in RULES}

    def trivial(answer: bool):
        report.trivial = Verdict(answer)
        return KernelTrivial(report.trivial, report)

    if inst.ell is not None and inst.ell < 0:
        return trivial(False)
    red = normalize(inst)
    if isinstance(red, Trivial):
        return trivial(red.verdict.answer)
    work = _Work(red.instance, red.keep)

    while True:
        if work.ell is not None and work.ell < 0:
            return trivial(False)
        rule = _apply_one(work)
        if rule is None:
            break
        if isinstance(rule, tuple):
            name, answer = rule
            report.rules_applied[name] += 1
            return trivial(answer)
        report.rules_applied[rule] += 1
        if rule == "R6":
            if work.ell is not None and work.ell < 0:
                return trivial(False)
            cur, keep = work.to_instance()
            nr = normalize(cur)
            if isinstance(nr, Trivial):
                return trivial(nr.verdict.answer)
            work = _Work(nr.instance, [keep[v] for v in nr.keep])

    out, keep = work.to_instance()
    report.output_stats = _stats(out)
    report.parameter = feedback_edge_number(out.graph)
    report.keep = keep
    return Kernel(out, report)


def _apply_one(work: _Work):
    """Apply the first applicable rule. Returns its name, ``(name, answer)``
    when the rule decides the instance, or None."""
    S, T = work.S, work.T
    verts = sorted(work.adj)
    # R1: non-terminal of degree at most one
    for v in verts:
        if v not in S and v not in T and work.deg(v) <= 1:
            work.remove(v)
            return "R1"
    # R2: the only terminal of its set has degree one
    for v in verts:
        if work.deg(v) == 1 and ((v in S and len(S) == 1) or (v in T and len(T) == 1)):
            (u,) = work.adj[v]
            w = work.adj[v][u]
            # every solution cuts at least one edge; the leaf edge is optimal
            # when it is of minimum weight
            if w == work.min_weight():
                return "R2", work.ell is None or work.ell >= w
    # R3: degree-one terminal in a set of size at least two
    for v in verts:
        if work.deg(v) == 1 and (v in S or v in T):
            own, other = (S, T) if v in S else (T, S)
            if len(own) < 2:
                continue
            (u,) = work.adj[v]
            if u in other:
                return "R3", False
            work.remove(v)
            own.add(u)
            return "R3"
    if any(work.deg(v) <= 1 for v in verts):
        return None  # only weighted leaves left that R2 could not decide
    if all(work.deg(v) == 2 for v in verts):
        order = work.cycle()
        k = order.index(min(v for v in order if v in S or v in T))
        ring = order[k:] + order[:k] + [order[k]]
        stretch = _first_stretch(ring, S, T)
        if stretch is None:
            return None
        return _cut_stretch(work, ring, *stretch)
    for v0, internal, vp in work.paths():
        has_s = any(v in S for v in internal)
        has_t = any(v in T for v in internal)
        seq = [v0] + internal + [vp]
        weights = [work.adj[a][b] for a, b in zip(seq, seq[1:])]
        if not has_s and not has_t:
            if v0 == vp:
                for v in internal:
                    work.remove(v)
                return "R4"
            if len(internal) >= 2:
                _compress(work, v0, internal, vp, min(weights), min(weights))
                return "R4"
        elif has_s != has_t:
            own = S if has_s else T
            pos = [i for i, v in enumerate(seq) if 0 < i < len(seq) - 1 and v in own]
            a = min(weights[: pos[0]])
            b = min(weights[pos[-1]:])
            if v0 == vp:
                if len(internal) >= 3:
                    v1, v2 = internal[0], internal[-1]
                    for v in internal[1:-1]:
                        work.remove(v)
                    work.link(v0, v1, a)
                    work.link(v1, v2, 1)
                    work.link(v2, v0, b)
                    own.update((v1, v2))
                    return "R5"
            elif len(internal) >= 2:
                _compress(work, v0, internal, vp, a, b)
                own.add(internal[0])
                return "R5"
        else:
            stretch = _first_stretch(internal, S, T)
            return _cut_stretch(work, internal, *stretch)
    return None


def _compress(work: _Work, v0, internal, vp, a, b):
    v1 = internal[0]
    for v in internal[1:]:
        work.remove(v)
    work.link(v0, v1, a)
    work.link(v1, vp, b)


def _cut_stretch(work: _Work, seq, i, j):
    """Delete a minimum-weight edge between ``seq[i]`` and ``seq[j]``; every
    solution cuts one of them."""
    weights = [work.adj[seq[p]][seq[p + 1]] for p in range(i, j)]
    p = i + weights.index(min(weights))
    work.unlink(seq[p], seq[p + 1])
    if work.ell is not None:
        work.ell -= min(weights)
    return "R6"


# --------------------------------------------------------------------------
# vertex cover marking kernel for 2-DCS


def greedy_vertex_cover(g: Graph) -> frozenset:
    """Both endpoints of a maximal matching taken over the sorted edge list."""
    cover: set[int] = set()
    for u, v, _ in g.edges:
        if u not in cover and v not in cover:
            cover.update((u, v))
    return frozenset(cover)


def kernelize_vc_2dcs(inst: Instance, cover=None) -> Kernel:
    """Keep the cover, the terminals, and ``2k`` common non-terminal
    neighbors for every pair of cover vertices (``k = ceil(|cover| / 2)``);
    delete every other vertex."""
    g = inst.graph
    if inst.ell is not None and inst.ell < g.total_weight:
        raise ModeError("the vertex cover kernel applies only to 2-DCS instances (no budget)")
    if cover is None:
        cover = greedy_vertex_cover(g)
    else:
        cover = frozenset(cover)
        for u, v, _ in g.edges:
            if u not in cover and v not in cover:
                raise CoverError(f"edge {u + 1}-{v + 1} is not covered")
    k = ceil(len(cover) / 2)
    quota = 2 * k
    terminals = inst.S | inst.T
    nbr = [set(g.adjacency[v]) for v in range(g.n)]
    marked: set[int] = set()
    cs = sorted(cover)
    for i, a in enumerate(cs):
        for b in cs[i + 1:]:
            common = sorted(v for v in nbr[a] & nbr[b] if v not in cover and v not in terminals)
            marked.update(common[:quota])
    keep_set = set(cover) | set(terminals) | marked
    sub, keep = g.induced(sorted(keep_set))
    index = {v: i for i, v in enumerate(keep)}
    out = Instance(sub, frozenset(index[v] for v in inst.S), frozenset(index[v] for v in inst.T), None)
    report = KernelReport(_stats(inst), _stats(out), parameter=len(cover), input_parameter=len(cover))
    report.rules_applied = {"marked": len(marked), "deleted": g.n - sub.n, "k": k}
    report.keep = tuple(keep)
    return Kernel(out, report)
