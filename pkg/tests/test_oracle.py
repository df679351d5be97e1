import random

import pytest

from conftest import complete_edges, cycle_edges, make_instance, seeds
from tscu.core import Graph, Instance, verify_solution
from tscu.generators import RandomParams, gen_random
from tscu.oracle import CapacityError, brute_force_solve, oracle_optimum, search_solve


def test_p3_bridge():
    res = brute_force_solve(make_instance(3, [(1, 2), (2, 3)], {1}, {3}))
    assert res.literal.line() == res.connected.line() == "YES 1"


def test_k4():
    res = brute_force_solve(make_instance(4, complete_edges(4), {1}, {2}))
    assert res.literal.optimum == 3


def test_c6():
    res = brute_force_solve(make_instance(6, cycle_edges(6), {1}, {4}))
    assert res.literal.optimum == 2


def test_budget_decides():
    inst = make_instance(4, complete_edges(4), {1}, {2}, 2)
    assert brute_force_solve(inst).literal.line() == "NO"
    assert oracle_optimum(inst) == 3


def test_lexicographic_witness():
    # both {1} and {1,2} cost 1 on P3; the smaller red tuple wins
    res = brute_force_solve(make_instance(3, [(1, 2), (2, 3)], {1}, {3}))
    assert res.literal.witness.red == {0}


def test_overlap_is_no():
    assert not brute_force_solve(make_instance(2, [(1, 2)], {1}, {1, 2})).literal.answer


def test_capacity_error():
    inst = gen_random("connected", RandomParams(n=26, s=1, t=1), 1)
    with pytest.raises(CapacityError):
        brute_force_solve(inst)


def test_interleaved_cycle_is_no():
    res = brute_force_solve(make_instance(4, cycle_edges(4), {1, 3}, {2, 4}))
    assert not res.literal.answer and not res.connected.answer


@pytest.mark.parametrize("seed", seeds(60, 1))
def test_witnesses_verify(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 9)
    inst = gen_random("connected", RandomParams(n=n, p=0.3, s=1, t=1, ell=rng.choice([None, 2])), seed)
    res = brute_force_solve(inst)
    for v in (res.literal, res.connected):
        if v.answer:
            check = verify_solution(inst, v.witness)
            assert check.valid and check.cut_weight == v.optimum


@pytest.mark.parametrize("seed", seeds(40, 2))
def test_search_matches_brute(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 11)
    s = rng.randint(1, min(3, n - 1))
    t = rng.randint(1, min(3, n - s))
    inst = gen_random("connected", RandomParams(n=n, p=rng.choice([0.1, 0.3, 0.5]), s=s, t=t), seed)
    brute = brute_force_solve(inst).connected
    v = search_solve(inst)
    assert (v.answer, v.optimum) == (brute.answer, brute.optimum)
    if v.answer:
        assert search_solve(inst, first_feasible=True).answer


@pytest.mark.parametrize("seed", seeds(20, 3))
def test_adding_edge_inside_color_class_keeps_optimum(seed):
    rng = random.Random(seed)
    inst = gen_random("connected", RandomParams(n=rng.randint(4, 9), p=0.2, s=1, t=1), seed)
    res = brute_force_solve(inst).literal
    red = res.witness.red
    g = inst.graph
    missing = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)
               if not g.has_edge(u, v) and (u in red) == (v in red)]
    if not missing:
        return
    u, v = rng.choice(missing)
    g2 = Graph.from_edges(g.n, [e for e in g.edges] + [(u, v)])
    res2 = brute_force_solve(Instance(g2, inst.S, inst.T)).literal
    assert res2.optimum <= res.optimum
