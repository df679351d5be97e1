"""Exhaustive ground-truth solver.

``brute_force_solve`` walks every red/blue coloring of the free vertices in
Gray-code order and evaluates both the literal TSCU condition (terminals of a
side share a component) and the stricter one (each side induces a connected
graph). ``search_solve`` is an exact branch and bound over the connected-sides
formulation for graphs beyond enumeration range.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Instance, SolutionCut, TscuError, Verdict

DEFAULT_CAP = 24


class CapacityError(TscuError):
    pass


@dataclass(frozen=True)
class OracleResult:
    literal: Verdict
    connected: Verdict


def _reach(masks: list[int], start: int, allowed: int) -> int:
    """Bitmask of vertices reachable from ``start`` inside ``allowed``."""
    seen = 1 << start
    frontier = seen
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= masks[low.bit_length() - 1]
            frontier ^= low
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _red_key(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def brute_force_solve(inst: Instance, cap: int = DEFAULT_CAP) -> OracleResult:
    g = inst.graph
    n = g.n
    if n > cap:
        raise CapacityError(f"brute force refuses n={n} > cap {cap}")
    masks = g.bitmasks()
    full = (1 << n) - 1
    s_mask = sum(1 << v for v in inst.S)
    t_mask = sum(1 << v for v in inst.T)
    if s_mask & t_mask:
        no = Verdict(False)
        return OracleResult(no, no)
    free = [v for v in range(n) if not (s_mask | t_mask) >> v & 1]
    # weighted adjacency rows for incremental cut updates
    wrow = [dict() for _ in range(n)]
    for u, v, w in g.edges:
        wrow[u][v] = w
        wrow[v][u] = w

    red = s_mask
    cut = g.cut_weight(inst.S)
    s0 = _lowest(s_mask) if s_mask else None
    t0 = _lowest(t_mask) if t_mask else None

    best = {"literal": None, "connected": None}  # (cut, key, mask)

    def consider(which, red_mask):
        cur = best[which]
        if cur is not None and cut > cur[0]:
            return
        key = _red_key(red_mask)
        if cur is None or cut < cur[0] or key < cur[1]:
            best[which] = (cut, key, red_mask)

    for step in range(1 << len(free)):
        if step:
            # flip the vertex given by the lowest set bit of the step counter
            bit = (step & -step).bit_length() - 1
            v = free[bit]
            vb = 1 << v
            for u, w in wrow[v].items():
                same_before = bool(red >> u & 1) == bool(red & vb)
                cut += w if same_before else -w
            red ^= vb
        blue = full & ~red
        cur_lit, cur_con = best["literal"], best["connected"]
        if cur_lit is not None and cur_con is not None and cut > cur_con[0]:
            continue
        s_ok = s0 is None or (_reach(masks, s0, red) & s_mask) == s_mask
        if not s_ok:
            continue
        t_ok = t0 is None or (_reach(masks, t0, blue) & t_mask) == t_mask
        if not t_ok:
            continue
        consider("literal", red)
        red_conn = red == 0 or _reach(masks, _lowest(red), red) == red
        blue_conn = blue == 0 or _reach(masks, _lowest(blue), blue) == blue
        if red_conn and blue_conn:
            consider("connected", red)

    def verdict(entry):
        if entry is None or entry[0] > inst.budget:
            return Verdict(False, None if entry is None else entry[0])
        return Verdict(True, entry[0], SolutionCut.from_red(g, entry[1]))

    lit, con = verdict(best["literal"]), verdict(best["connected"])
    return OracleResult(_strip(lit), _strip(con))


def _strip(v: Verdict) -> Verdict:
    return v if v.answer else Verdict(False)


def oracle_optimum(inst: Instance, cap: int = DEFAULT_CAP) -> int | None:
    """Minimum literal cut weight ignoring the budget (None if infeasible)."""
    relaxed = Instance(inst.graph, inst.S, inst.T, None)
    v = brute_force_solve(relaxed, cap).literal
    return v.optimum if v.answer else None


def search_solve(inst: Instance, first_feasible: bool = False) -> Verdict:
    """Exact branch and bound for the connected-sides formulation.

    Vertices are colored in BFS order from the terminals. A partial coloring
    is pruned when its decided cut already exceeds the incumbent, or when the
    decided red (blue) vertices cannot all lie in one component of the graph
    minus the decided blue (red) vertices. Articulation points of those
    graphs that separate decided vertices are forced. With
    ``first_feasible`` the search stops at the first solution within budget.
    """
    g = inst.graph
    n = g.n
    if inst.S & inst.T:
        return Verdict(False)
    masks = g.bitmasks()
    full = (1 << n) - 1
    wrow = [dict() for _ in range(n)]
    for u, v, w in g.edges:
        wrow[u][v] = w
        wrow[v][u] = w

    starts = sorted(inst.S | inst.T) or [0]
    order = []
    seen = set(starts)
    queue = list(starts)
    while queue:
        u = queue.pop(0)
        order.append(u)
        for w in g.adjacency[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    order += [v for v in range(n) if v not in seen]

    budget = inst.budget
    incumbent = [budget + 1, None]

    def feasible_side(decided: int, other: int) -> bool:
        if not decided:
            return True
        allowed = full & ~other
        return _reach(masks, _lowest(decided), allowed) & decided == decided

    def forced(decided: int, other: int) -> int:
        """Undecided cut vertices of G - other whose removal splits ``decided``."""
        if decided & (decided - 1) == 0:
            return 0
        allowed = full & ~other
        cand = allowed & ~decided
        out = 0
        root = _lowest(decided)
        comp = _reach(masks, root, allowed)
        cand &= comp
        for v in _articulation_points(masks, comp, root):
            if cand >> v & 1:
                if _reach(masks, root, comp & ~(1 << v)) & decided != decided:
                    out |= 1 << v
        return out

    def rec(red: int, blue: int, cut: int, idx: int):
        # propagate forced vertices
        while True:
            if not feasible_side(red, blue) or not feasible_side(blue, red):
                return
            fr = forced(red, blue)
            fb = forced(blue, red)
            if fr & fb:
                return
            new = (fr | fb) & ~(red | blue)
            if not new:
                break
            for v, into_red in [(v, True) for v in _bits(fr & new)] + [(v, False) for v in _bits(fb & new)]:
                for u, w in wrow[v].items():
                    if (blue if into_red else red) >> u & 1:
                        cut += w
                if into_red:
                    red |= 1 << v
                else:
                    blue |= 1 << v
            if cut >= incumbent[0]:
                return
        if cut >= incumbent[0]:
            return
        while idx < n and (red | blue) >> order[idx] & 1:
            idx += 1
        if idx == n:
            if (red | blue) != full:
                return
            incumbent[0] = cut
            incumbent[1] = red
            return
        v = order[idx]
        vb = 1 << v
        for into_red in (True, False):
            if first_feasible and incumbent[1] is not None:
                return
            add = 0
            other = blue if into_red else red
            for u, w in wrow[v].items():
                if other >> u & 1:
                    add += w
            if into_red:
                rec(red | vb, blue, cut + add, idx + 1)
            else:
                rec(red, blue | vb, cut + add, idx + 1)

    s_mask = sum(1 << v for v in inst.S)
    t_mask = sum(1 << v for v in inst.T)
    base = sum(w for u, v, w in g.edges if (u in inst.S and v in inst.T) or (v in inst.S and u in inst.T))
    if base <= budget:
        rec(s_mask, t_mask, base, 0)
    if incumbent[1] is None:
        return Verdict(False)
    return Verdict(True, incumbent[0], SolutionCut.from_red(g, _red_key(incumbent[1])))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _articulation_points(masks: list[int], allowed: int, root: int) -> list[int]:
    """Iterative Tarjan over the subgraph induced by ``allowed``."""
    disc: dict[int, int] = {root: 0}
    low: dict[int, int] = {root: 0}
    parent: dict[int, int] = {root: -1}
    points = set()
    children_of_root = 0
    counter = 1
    stack = [(root, iter(list(_bits(masks[root] & allowed))))]
    while stack:
        u, it = stack[-1]
        advanced = False
        for w in it:
            if w not in disc:
                disc[w] = low[w] = counter
                counter += 1
                parent[w] = u
                if u == root:
                    children_of_root += 1
                stack.append((w, iter(list(_bits(masks[w] & allowed)))))
                advanced = True
                break
            if w != parent[u]:
                low[u] = min(low[u], disc[w])
        if advanced:
            continue
        stack.pop()
        if stack:
            p = stack[-1][0]
            low[p] = min(low[p], low[u])
            if p != root and low[u] >= disc[p]:
                points.add(p)
    if children_of_root > 1:
        points.add(root)
    return sorted(points)
