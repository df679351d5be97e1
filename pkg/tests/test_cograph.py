import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cycle_edges, make_instance, seeds
from tscu.cograph import (
    JOIN,
    LEAF,
    UNION,
    NotCographError,
    augment_modulator,
    build_cotree,
    canonical_partition,
    dp_solve,
    find_modulator,
    find_p4,
    join_crossings,
    pjoin,
    pmerge,
    solve_cograph,
)
from tscu.core import Graph, verify_solution
from tscu.generators import RandomParams, gen_random
from tscu.oracle import brute_force_solve

E = frozenset()


def fs(*blocks):
    return tuple(frozenset(b) for b in blocks)


# partition operators


def test_pmerge_examples():
    assert pmerge(fs({1}, {2}), fs({1, 3})) == fs({1, 3}, {2})
    assert pmerge(fs({1}, {2}), ()) == fs({1}, {2})
    assert pmerge((E,), (E,)) == (E,)


def test_pjoin_examples():
    assert pjoin(fs({1}), ()) == fs({1})
    assert pjoin(fs({1}), fs({2})) == fs({1, 2})
    assert pjoin(fs({1}, {2}), (E,)) == fs({1, 2})


def test_canonical_order_puts_empty_block_last():
    assert canonical_partition([E, {3}, {1, 2}]) == fs({1, 2}, {3}, set())


@st.composite
def partitions(draw, universe=range(6)):
    elems = draw(st.lists(st.sampled_from(list(universe)), unique=True, max_size=6))
    labels = draw(st.lists(st.integers(0, 3), min_size=len(elems), max_size=len(elems)))
    blocks: dict[int, set] = {}
    for e, lab in zip(elems, labels):
        blocks.setdefault(lab, set()).add(e)
    out = [frozenset(b) for b in blocks.values()]
    if draw(st.booleans()):
        out.append(E)
    return canonical_partition(out)


@settings(max_examples=200, deadline=None)
@given(partitions(), partitions(), partitions())
def test_pmerge_commutative_associative(a, b, c):
    assert pmerge(a, b) == pmerge(b, a)
    assert pmerge(a, pmerge(b, c)) == pmerge(pmerge(a, b), c)


@settings(max_examples=200, deadline=None)
@given(partitions(), partitions(), partitions())
def test_pjoin_commutative_and_collapses(a, b, c):
    assert pjoin(a, b) == pjoin(b, a)
    if a and b and c:
        union = frozenset().union(*a, *b, *c)
        assert pjoin(a, pjoin(b, c)) == pjoin(pjoin(a, b), c) == (union,)


@settings(max_examples=100, deadline=None)
@given(partitions(), partitions())
def test_pmerge_blocks_are_disjoint(a, b):
    out = pmerge(a, b)
    seen = set()
    for blk in out:
        assert not (blk & seen)
        seen |= blk


def test_join_crossings_example():
    assert join_crossings(2, 1, 3, 1) == 3


# cotrees and modulators


def test_cotree_small_cases():
    single = build_cotree(Graph.from_edges(1, []))
    assert single.kind[single.root] == LEAF
    k2 = build_cotree(Graph.from_edges(2, [(0, 1)]))
    assert k2.kind[k2.root] == JOIN
    two = build_cotree(Graph.from_edges(2, []))
    assert two.kind[two.root] == UNION
    assert build_cotree(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])) is None


def test_find_p4_is_induced():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    a, b, c, d = find_p4(g)
    for u, v in [(a, b), (b, c), (c, d)]:
        assert g.has_edge(u, v)
    for u, v in [(a, c), (b, d), (a, d)]:
        assert not g.has_edge(u, v)


@pytest.mark.parametrize("seed", seeds(25, 21))
def test_cotree_reproduces_cograph(seed):
    inst = gen_random("cograph_plus_modulator", RandomParams(n=random.Random(seed).randint(2, 14), j=0, p=0.3), seed)
    tree = build_cotree(inst.graph)
    assert tree is not None
    assert tree.edges() == {(u, v) for u, v, _ in inst.graph.edges}
    assert sorted(tree.leaves()) == list(range(inst.graph.n))


def test_modulator_examples():
    cograph = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert find_modulator(cograph, 0) == frozenset()
    p4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert len(find_modulator(p4, 3)) == 1
    c5 = Graph.from_edges(5, [(u - 1, v - 1) for u, v in cycle_edges(5)])
    assert find_modulator(c5, 1) is None
    X = find_modulator(c5, 2)
    assert len(X) == 2 and build_cotree(c5, set(range(5)) - X) is not None


def test_augment_adds_terminals():
    inst = make_instance(4, [(1, 2), (2, 3), (3, 4)], {1, 2}, {4})
    assert augment_modulator(inst, {1}) == {1, 3}  # internal ids; vertex 2 is already in S
    assert augment_modulator(inst, set()) == {0, 3}


# the dynamic program


def test_dp_complete_bipartite():
    # C4 = K_{2,2} with sides {a1, a2} = {1, 2} and {b1, b2} = {3, 4}
    inst = make_instance(4, [(1, 3), (1, 4), (2, 3), (2, 4)], {1}, {3})
    expected = brute_force_solve(inst).literal
    v = dp_solve(inst, {0, 2})
    assert (v.answer, v.optimum) == (expected.answer, expected.optimum) == (True, 2)


def test_dp_p3():
    inst = make_instance(3, [(1, 2), (2, 3)], {1}, {3})
    assert dp_solve(inst, {0, 2}).line() == "YES 1"


def test_dp_rejects_non_cograph_rest():
    inst = make_instance(5, [(1, 2), (2, 3), (3, 4), (4, 5)], {1}, {5})
    with pytest.raises(NotCographError):
        dp_solve(inst, {0})


def test_solve_cograph_cap_zero_on_cograph():
    inst = make_instance(4, [(1, 3), (1, 4), (2, 3), (2, 4)], {1}, {3})
    v = solve_cograph(inst, 0)
    assert v.answer and v.stats["modulator"] == 2


def test_solve_cograph_cap_exceeded():
    inst = make_instance(6, cycle_edges(6), {1}, {4})
    assert solve_cograph(inst, 0) is None


def test_all_x_red_side_must_be_connected():
    # every non-X vertex blue, red X part {1, 3} is not connected: the r = 0 guard
    inst = make_instance(4, [(1, 2), (2, 3), (3, 4), (4, 1)], {1, 3}, {2, 4})
    assert not dp_solve(inst, {0, 1, 2, 3}).answer


@pytest.mark.parametrize("seed", seeds(40, 22))
def test_matches_oracle_and_witness_recount(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 11)
    s = rng.randint(1, min(3, n - 1))
    t = rng.randint(1, min(3, n - s))
    params = RandomParams(n=n, j=rng.randint(0, min(3, n - 2)), p=0.4, s=s, t=t, ell=rng.choice([None, 3, 6]))
    inst = gen_random("cograph_plus_modulator", params, seed)
    v = solve_cograph(inst, 3)
    o = brute_force_solve(inst).literal
    assert (v.answer, v.optimum) == (o.answer, o.optimum)
    if v.answer:
        check = verify_solution(inst, v.witness)
        assert check.valid and check.cut_weight == v.optimum
