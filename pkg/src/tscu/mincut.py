"""Weighted minimum edge cut between two anchor sets via Dinic max-flow."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .core import Graph, TscuError


class AnchorError(TscuError, ValueError):
    pass


@dataclass(frozen=True)
class CutResult:
    value: int
    source_side: frozenset


class _FlowNetwork:
    # arcs stored in parallel lists; arc i and i ^ 1 are mutual reverses
    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_pair(self, u: int, v: int, cap_uv: int, cap_vu: int) -> None:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap_uv)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(cap_vu)

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for a in self.head[u]:
                v = self.to[a]
                if self.cap[a] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _blocking(self, s: int, t: int, level: list[int]) -> int:
        ptr = [0] * self.n
        total = 0
        while True:
            # iterative DFS along the level graph
            path: list[int] = []
            u = s
            while u != t:
                arcs = self.head[u]
                while ptr[u] < len(arcs):
                    a = arcs[ptr[u]]
                    v = self.to[a]
                    if self.cap[a] > 0 and level[v] == level[u] + 1:
                        break
                    ptr[u] += 1
                else:
                    if u == s:
                        return total
                    level[u] = -1  # dead end
                    a = path.pop()
                    u = self.to[a ^ 1]
                    ptr[u] += 1
                    continue
                path.append(a)
                u = self.to[a]
            push = min(self.cap[a] for a in path)
            for a in path:
                self.cap[a] -= push
                self.cap[a ^ 1] += push
            total += push

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while (level := self._levels(s, t)) is not None:
            flow += self._blocking(s, t, level)
        return flow

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for a in self.head[u]:
                v = self.to[a]
                if self.cap[a] > 0 and v not in seen:
                    seen.add(v)
                    q.append(v)
        return seen


def min_cut(g: Graph, A: Iterable[int], B: Iterable[int]) -> CutResult:
    """Minimum total weight of edges separating ``A`` from ``B``.

    The source side is the residual-reachable set from ``A`` after a maximum
    flow, i.e. the inclusion-minimal minimum cut.
    """
    A, B = frozenset(A), frozenset(B)
    if not A or not B:
        raise AnchorError("anchor sets must be nonempty")
    if A & B:
        raise AnchorError(f"anchor sets overlap in {sorted(A & B)}")
    n = g.n
    src, snk = n, n + 1
    net = _FlowNetwork(n + 2)
    for u, v, w in g.edges:
        net.add_pair(u, v, w, w)
    inf = g.total_weight + 1
    for a in sorted(A):
        net.add_pair(src, a, inf, 0)
    for b in sorted(B):
        net.add_pair(b, snk, inf, 0)
    value = net.max_flow(src, snk)
    side = frozenset(v for v in net.reachable(src) if v < n)
    return CutResult(value, side)
