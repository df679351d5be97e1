"""XP algorithm parameterized by the independence number ``k``.

Guess red and blue connector sets ``R'``, ``B'`` of at most ``(k-1)(2k-2)``
non-terminals each so that ``S + R'`` and ``T + B'`` induce connected graphs,
then take a minimum cut between the two anchor sets. Only inclusion-minimal
connectors are tried: enlarging an anchor set never lowers the min-cut value,
so every larger guess is dominated by a minimal one inside it.
"""

from __future__ import annotations

from itertools import combinations

from .core import Graph, Instance, SolutionCut, Trivial, TscuError, Verdict, lift_verdict, normalize
from .mincut import min_cut
from .oracle import _reach, _red_key


class ParameterError(TscuError, ValueError):
    pass


class _AboveCap(Exception):
    pass


def max_independent_set(g: Graph, cap: int | None = None) -> int | None:
    """Independence number, or None once it is known to exceed ``cap``."""
    masks = g.bitmasks()
    best = [0]

    def popcount(x):
        return bin(x).count("1")

    def rec(alive: int, size: int):
        if size + popcount(alive) <= best[0]:
            return
        if not alive:
            best[0] = size
            if cap is not None and size > cap:
                raise _AboveCap
            return
        # vertices of degree <= 1 are always safe to take
        v, deg = -1, -1
        rest = alive
        while rest:
            low = rest & -rest
            u = low.bit_length() - 1
            d = popcount(masks[u] & alive)
            if d <= 1:
                rec(alive & ~(low | masks[u]), size + 1)
                return
            if d > deg:
                v, deg = u, d
            rest ^= low
        vb = 1 << v
        rec(alive & ~(vb | masks[v]), size + 1)
        rec(alive & ~vb, size)

    try:
        rec((1 << g.n) - 1, 0)
    except _AboveCap:
        return None
    return best[0]


def guess_budget(k: int) -> int:
    if k < 1:
        raise ParameterError(f"independence bound k must be >= 1, got {k}")
    return (k - 1) * (2 * k - 2)


def minimal_connectors(g: Graph, anchors: frozenset, candidates, budget: int) -> list[int]:
    """Inclusion-minimal masks ``R`` of at most ``budget`` candidates with
    ``G[anchors + R]`` connected."""
    masks = g.bitmasks()
    base = sum(1 << v for v in anchors)
    root = min(anchors)
    found: list[int] = []
    cand = sorted(candidates)
    for size in range(min(budget, len(cand)) + 1):
        for combo in combinations(cand, size):
            extra = sum(1 << v for v in combo)
            if any(f & extra == f for f in found):
                continue
            allowed = base | extra
            if _reach(masks, root, allowed) == allowed:
                found.append(extra)
    return found


def indset_solve(inst: Instance, k: int) -> Verdict:
    """Run on a normalized connected instance with nonempty S and T."""
    budget = guess_budget(k)
    g = inst.graph
    free = [v for v in range(g.n) if v not in inst.S and v not in inst.T]
    reds = minimal_connectors(g, inst.S, free, budget)
    blues = minimal_connectors(g, inst.T, free, budget)
    examined = 0
    best = None  # (value, red key)
    for r in reds:
        r_set = frozenset(_red_key(r))
        for b in blues:
            if r & b:
                continue
            examined += 1
            res = min_cut(g, inst.S | r_set, inst.T | frozenset(_red_key(b)))
            cand = (res.value, tuple(sorted(res.source_side)))
            if best is None or cand < best:
                best = cand
    stats = {"k": k, "guesses": examined, "red_connectors": len(reds), "blue_connectors": len(blues)}
    if best is None or best[0] > inst.budget:
        return Verdict(False, None, None, stats)
    return Verdict(True, best[0], SolutionCut.from_red(g, best[1]), stats)


def solve_indset(inst: Instance, k: int | None = None, cap: int = 6) -> Verdict:
    """With ``k`` None the independence number is computed (refused above ``cap``)."""
    if k is not None:
        guess_budget(k)
    red = normalize(inst)
    if isinstance(red, Trivial):
        return red.verdict
    if k is None:
        k = max_independent_set(red.instance.graph, cap)
        if k is None:
            raise ParameterError(f"independence number exceeds cap {cap}")
    return lift_verdict(inst, red, indset_solve(red.instance, k))
