import pytest

from mrflist.algorithms import INSERT, det_serve, new_state, rand_serve
from mrflist.dag import is_linear_extension, is_transitive
from mrflist.errors import BadSpec
from mrflist.workloads import (
    WorkloadSpec,
    all_forward_dags,
    gen_dag,
    gen_quadratic_insert_instance,
    gen_instance,
    gen_sequence,
    min_insertion_rearrangement,
)


def _longest_path(dag):
    memo = {}

    def depth(u):
        if u not in memo:
            memo[u] = max((1 + depth(v) for v in dag.dependencies(u)), default=0)
        return memo[u]

    return max(depth(u) for u in dag.nodes)


def test_chain_and_empty():
    assert gen_dag(WorkloadSpec("chain", n=4)).edges == {(1, 0), (2, 1), (3, 2)}
    assert not gen_dag(WorkloadSpec("empty", n=5)).edges


def test_random_kinds_deterministic():
    spec = WorkloadSpec("transitive-random", n=6, edge_p=0.3, seed=7)
    assert gen_dag(spec).edges == gen_dag(spec).edges
    assert is_transitive(gen_dag(spec))
    spec = WorkloadSpec("random", n=8, edge_p=0.5, seed=2)
    assert all(u > v for u, v in gen_dag(spec).edges)


def test_layered_depth():
    dag = gen_dag(WorkloadSpec("layered", n=12, width=3, depth=4, seed=1))
    assert _longest_path(dag) == 3
    with pytest.raises(BadSpec):
        gen_dag(WorkloadSpec("layered", n=5, width=2, depth=2))


def test_sequences_deterministic():
    spec = WorkloadSpec("empty", n=10, distribution="zipf", length=100, seed=1)
    assert gen_sequence(spec) == gen_sequence(spec)
    assert all(r.kind == "access" for r in gen_sequence(spec))
    other = WorkloadSpec("empty", n=10, distribution="zipf", length=100, seed=2)
    assert gen_sequence(spec) != gen_sequence(other)


def test_round_robin_and_repeat_tail():
    seq = gen_sequence(WorkloadSpec("empty", n=3, distribution="round-robin", length=6))
    assert [r.node for r in seq] == [0, 1, 2, 0, 1, 2]
    inst = gen_instance(WorkloadSpec("chain", n=4, distribution="repeat-tail", length=10, seed=3))
    s = new_state(inst.dag, inst.initial)
    for r in inst.requests:
        assert r.node == s.list.order[-1]
        det_serve(s, r)


def test_bad_specs():
    for spec in (WorkloadSpec("bogus"), WorkloadSpec(distribution="x"), WorkloadSpec(n=0),
                 WorkloadSpec(update_mix=2.0), WorkloadSpec(edge_p=-1)):
        with pytest.raises(BadSpec):
            spec.validate()


@pytest.mark.parametrize("seed", range(10))
def test_updates_admit_zero_swap_inserts(seed):
    spec = WorkloadSpec("random", n=4, future=3, length=20, update_mix=0.5, seed=seed, edge_p=0.5)
    inst = gen_instance(spec)
    assert is_transitive(inst.universe)
    for serve, bits in ((det_serve, None), (rand_serve, {u: 0 for u in inst.initial.order})):
        s = new_state(inst.dag, inst.initial, bits=bits, seed=seed)
        for r in inst.requests:
            rec = serve(s, r)
            if r.kind == INSERT:
                assert rec.rearrangement_cost == 0
            assert is_linear_extension(s.dag, s.list)


def test_quadratic_insert_costs():
    for n in (2, 4, 6, 8):
        universe, initial, req = gen_quadratic_insert_instance(n)
        assert min_insertion_rearrangement(universe.restricted(initial.order), initial, req) == (n // 2) ** 2
    with pytest.raises(BadSpec):
        gen_quadratic_insert_instance(3)


def test_forward_dag_count():
    dags = list(all_forward_dags(4))
    assert len(dags) == 64
    assert len({d.edges for d in dags}) == 64
