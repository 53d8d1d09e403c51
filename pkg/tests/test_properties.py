import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mrflist.algorithms import Access, det_serve, new_state, rand_serve
from mrflist.dag import build_dag, direct_dependency, is_linear_extension, transitive_closure
from mrflist.listcore import ListState, inversions, move_to, potential_det, potential_rand
from mrflist.offline import opt_cost
from mrflist.verify import random_linear_extension
from mrflist.workloads import all_forward_dags


@st.composite
def dags(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    perm = draw(st.permutations(range(n)))
    # relabel so edges no longer follow index order
    return build_dag(range(n), [(perm[u], perm[v]) for (u, v), c in zip(pairs, chosen) if c])


@st.composite
def dag_and_lists(draw, max_n=7):
    dag = draw(dags(max_n))
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    return dag, random_linear_extension(dag, rng), random_linear_extension(dag, rng), rng


# exhaustive over every DAG on up to 5 nodes, paired with every list order


def test_exhaustive_dag_properties():
    for n in range(1, 6):
        perms = list(itertools.permutations(range(n)))
        for dag in all_forward_dags(n):
            closed = transitive_closure(dag)
            assert transitive_closure(closed) == closed
            r = dag._reach
            assert not (r @ r & ~r).any()  # reachable(u,v) and reachable(v,w) => reachable(u,w)
            for order in perms:
                lst = ListState(order)
                ok = is_linear_extension(dag, lst)
                assert ok == is_linear_extension(closed, lst)
                if not ok:
                    continue
                for y in range(n):
                    z = direct_dependency(dag, lst, y)
                    anc = [v for v in range(n) if r[y, v]]
                    if z is None:
                        assert not anc
                    else:
                        assert lst.position(z) < lst.position(y)
                        assert all(lst.position(v) <= lst.position(z) for v in anc)


@given(dag_and_lists())
def test_inversion_symmetry_and_zero(data):
    dag, a, b, rng = data
    assert inversions(a, b).total == inversions(b, a).total
    assert (inversions(a, b).total == 0) == (a == b)
    bits = {u: int(rng.integers(2)) for u in a.order}
    total = inversions(a, b).total
    rep = inversions(a, b, bits=bits)
    assert sum(rep.typed) == total
    assert potential_det(a, b) == 4 * total
    assert 5 * total <= potential_rand(a, b, bits) <= 7 * total


@given(dag_and_lists(), st.lists(st.tuples(st.integers(0, 6), st.integers(1, 7)), max_size=15))
def test_feasible_moves_keep_extension(data, moves):
    dag, lst, _, _ = data
    lst = lst.copy()
    for y, p in moves:
        if y >= len(lst) or p > lst.position(y):
            continue
        try:
            move_to(lst, dag, y, p)
        except Exception:
            continue
        assert is_linear_extension(dag, lst)


@given(dag_and_lists(), st.lists(st.integers(0, 6), min_size=1, max_size=20))
def test_mrf_event_invariants(data, accesses):
    dag, lst, _, _ = data
    s = new_state(dag, lst)
    for y in accesses:
        y %= len(lst)
        before = ListState(s.list.order)
        rec = det_serve(s, Access(y))
        chain = rec.d_chain
        assert chain[-1] == y
        pos = [before.position(u) for u in chain]
        assert pos == sorted(set(pos))
        for prev, cur in zip(chain, chain[1:]):
            assert direct_dependency(dag, before, cur) == prev
        first = direct_dependency(dag, before, chain[0])
        assert first is None
        assert s.list.position(chain[0]) == 1
        # replay: when each node moves it lands at the front or right behind its dependency
        replay = list(before.order)
        for j in range(len(chain) - 1, -1, -1):
            u = chain[j]
            replay.remove(u)
            slot = replay.index(chain[j - 1]) + 1 if j else 0
            replay.insert(slot, u)
        assert tuple(replay) == rec.list_after
        assert rec.rearrangement_cost <= rec.access_cost
        assert is_linear_extension(dag, s.list)
        if not dag.edges:
            assert chain == (y,) and s.list.position(y) == 1


@given(dag_and_lists(), st.lists(st.integers(0, 6), min_size=1, max_size=20))
def test_rand_flips_only_accessed_bit(data, accesses):
    dag, lst, _, rng = data
    s = new_state(dag, lst, bits={u: int(rng.integers(2)) for u in lst.order})
    for y in accesses:
        y %= len(lst)
        prev = dict(s.bits)
        rand_serve(s, Access(y))
        assert {u for u in s.bits if s.bits[u] != prev[u]} == {y}


@settings(max_examples=40, deadline=None)
@given(dag_and_lists(max_n=5), st.lists(st.integers(0, 4), min_size=1, max_size=6))
def test_opt_lower_bound(data, accesses):
    dag, lst, _, rng = data
    seq = [Access(y % len(lst)) for y in accesses]
    opt = opt_cost(dag, lst, seq).total_cost
    s = new_state(dag, lst)
    assert opt <= sum(det_serve(s, r).cost for r in seq)
    s = new_state(dag, lst, bits={u: int(rng.integers(2)) for u in lst.order})
    assert opt <= sum(rand_serve(s, r).cost for r in seq)
    assert opt_cost(dag, lst, seq[:-1]).total_cost <= opt
