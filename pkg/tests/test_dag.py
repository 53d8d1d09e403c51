import itertools

import pytest

from mrflist.dag import (
    build_dag,
    direct_dependency,
    is_linear_extension,
    is_transitive,
    reachable,
    transitive_closure,
)
from mrflist.errors import CycleDetected, DuplicateNode, NotFeasible, SelfEdge, UnknownNode
from mrflist.listcore import ListState

A, B, C = 0, 1, 2


def test_build_single_constraint():
    dag = build_dag({A, B, C}, [(C, A)])
    assert dag.edges == {(C, A)}
    assert dag.must_precede(A, C)
    assert not dag.must_precede(C, A)


def test_two_cycle_rejected():
    with pytest.raises(CycleDetected):
        build_dag({A, B}, [(A, B), (B, A)])


def test_single_node():
    dag = build_dag({A}, [])
    assert len(dag) == 1 and not dag.edges


def test_bad_endpoints():
    with pytest.raises(UnknownNode):
        build_dag({A}, [(A, B)])
    with pytest.raises(SelfEdge):
        build_dag({A, B}, [(A, A)])


def test_longer_cycle_rejected():
    with pytest.raises(CycleDetected):
        build_dag(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])


def test_reachable_chain():
    dag = build_dag({A, B, C}, [(C, B), (B, A)])
    assert reachable(dag, C, A)
    assert not reachable(dag, A, C)
    assert not reachable(dag, A, A)
    with pytest.raises(UnknownNode):
        reachable(dag, A, 9)


def test_direct_dependency():
    lst = ListState([A, B, C])
    assert direct_dependency(build_dag({A, B, C}, [(C, A)]), lst, C) == A
    assert direct_dependency(build_dag({A, B, C}, [(C, A), (C, B)]), lst, C) == B
    assert direct_dependency(build_dag({A, B, C}, [(C, A)]), lst, B) is None


def test_direct_dependency_behind_raises():
    dag = build_dag({A, B, C}, [(A, C)])
    with pytest.raises(NotFeasible):
        direct_dependency(dag, ListState([A, B, C]), A)


def test_closure():
    chain = build_dag({A, B, C}, [(C, B), (B, A)])
    closed = transitive_closure(chain)
    assert closed.edges == {(C, B), (B, A), (C, A)}
    assert transitive_closure(closed).edges == closed.edges
    assert transitive_closure(build_dag({A, B}, [])).edges == frozenset()


def test_is_transitive():
    assert not is_transitive(build_dag({A, B, C}, [(C, B), (B, A)]))
    assert is_transitive(build_dag({A, B, C}, [(C, B), (B, A), (C, A)]))


def test_linear_extension():
    dag = build_dag({A, B, C}, [(C, A)])
    assert is_linear_extension(dag, ListState([A, B, C]))
    assert not is_linear_extension(dag, ListState([C, B, A]))
    empty = build_dag({A, B, C}, [])
    assert all(is_linear_extension(empty, p) for p in itertools.permutations([A, B, C]))
    with pytest.raises(DuplicateNode):
        is_linear_extension(dag, [A, A, C])


def test_with_without_node():
    dag = build_dag({A, B}, [])
    bigger = dag.with_node(C, preds=[A], succs=[B])
    assert bigger.edges == {(C, A), (B, C)}
    assert bigger.reachable(B, A)
    assert bigger.without_node(C) == dag
