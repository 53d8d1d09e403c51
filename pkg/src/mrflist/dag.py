"""Precedence-constraint DAGs.

An edge ``(u, v)`` records that ``v`` is a dependency of ``u``: ``v`` must sit
in front of ``u`` in every list configuration. Node ids are non-negative
integer handles; names live at the I/O boundary (see :mod:`mrflist.trace`).
"""

from collections import deque

import numpy as np

from .errors import CycleDetected, DuplicateNode, NotFeasible, SelfEdge, UnknownNode


class DependencyDag:
    """Immutable validated DAG with a precomputed reachability matrix."""

    __slots__ = ("nodes", "edges", "_out", "_reach", "_size")

    def __init__(self, nodes, edges, _out, _reach):
        self.nodes = nodes
        self.edges = edges
        self._out = _out
        self._reach = _reach
        self._size = _reach.shape[0]

    def __repr__(self):
        return f"DependencyDag(nodes={sorted(self.nodes)}, edges={sorted(self.edges)})"

    def __eq__(self, other):
        if not isinstance(other, DependencyDag):
            return NotImplemented
        return self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self):
        return hash((self.nodes, self.edges))

    def __contains__(self, node):
        return node in self.nodes

    def __len__(self):
        return len(self.nodes)

    def dependencies(self, u):
        """Direct out-neighbours of ``u`` (nodes that must precede ``u``)."""
        self._check(u)
        return self._out.get(u, ())

    def reachable(self, u, v):
        self._check(u)
        self._check(v)
        return bool(self._reach[u, v])

    def must_precede(self, v, u):
        """True iff ``v`` has to be in front of ``u``."""
        return self.reachable(u, v)

    def _check(self, u):
        if u not in self.nodes:
            raise UnknownNode(u)

    def with_node(self, x, preds=(), succs=()):
        """Return a new DAG with ``x`` added.

        ``preds`` must precede ``x`` (edges ``(x, p)``), ``x`` must precede
        every node of ``succs`` (edges ``(s, x)``).
        """
        if x in self.nodes:
            raise DuplicateNode(x)
        edges = set(self.edges)
        edges.update((x, p) for p in preds)
        edges.update((s, x) for s in succs)
        return build_dag(self.nodes | {x}, edges)

    def without_node(self, x):
        self._check(x)
        return build_dag(self.nodes - {x}, [e for e in self.edges if x not in e])

    def restricted(self, keep):
        keep = frozenset(keep)
        return build_dag(keep, [(u, v) for u, v in self.edges if u in keep and v in keep])


def _topological_order(nodes, out):
    indeg = {u: 0 for u in nodes}
    for u in nodes:
        for v in out.get(u, ()):
            indeg[v] += 1
    ready = deque(sorted(u for u, d in indeg.items() if d == 0))
    order = []
    while ready:
        u = ready.popleft()
        order.append(u)
        for v in out.get(u, ()):
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    if len(order) != len(nodes):
        cyclic = sorted(u for u, d in indeg.items() if d > 0)
        raise CycleDetected(f"edges form a directed cycle through {cyclic}")
    return order


def build_dag(nodes, edges):
    """Validate ``nodes``/``edges`` and return a :class:`DependencyDag`."""
    nodes = frozenset(nodes)
    for u in nodes:
        if not isinstance(u, (int, np.integer)) or u < 0:
            raise UnknownNode(f"node ids must be non-negative integers, got {u!r}")
    edge_set = set()
    out = {}
    for u, v in edges:
        if u not in nodes:
            raise UnknownNode(u)
        if v not in nodes:
            raise UnknownNode(v)
        if u == v:
            raise SelfEdge(u)
        if (u, v) not in edge_set:
            edge_set.add((u, v))
            out.setdefault(u, []).append(v)
    out = {u: tuple(sorted(vs)) for u, vs in out.items()}
    order = _topological_order(nodes, out)
    size = max(nodes) + 1 if nodes else 0
    reach = np.zeros((size, size), dtype=bool)
    # sinks first: every out-neighbour is finished before its source
    for u in reversed(order):
        for v in out.get(u, ()):
            reach[u, v] = True
            reach[u] |= reach[v]
    return DependencyDag(nodes, frozenset(edge_set), out, reach)


def reachable(dag, u, v):
    return dag.reachable(u, v)


def direct_dependency(dag, lst, y):
    """The present dependency of ``y`` at the furthest list position, or None."""
    pos = lst.position(y)
    best = None
    best_pos = 0
    for v in dag.dependencies(y) if y in dag.nodes else ():
        if v in lst:
            p = lst.position(v)
            if p > best_pos:
                best, best_pos = v, p
    if best is not None and best_pos >= pos:
        raise NotFeasible(f"list violates the DAG: dependency {best} of {y} is behind it")
    return best


def transitive_closure(dag):
    r = dag._reach
    edges = [(u, v) for u in dag.nodes for v in np.flatnonzero(r[u]).tolist()]
    return build_dag(dag.nodes, edges)


def is_transitive(dag):
    n_reach = int(dag._reach.sum())
    return n_reach == len(dag.edges)


def is_linear_extension(dag, lst):
    """True iff ``lst`` orders every edge with both endpoints present correctly.

    ``lst`` may be a :class:`~mrflist.listcore.ListState` or any sequence.
    """
    order = list(lst.order) if hasattr(lst, "order") else list(lst)
    pos = {}
    for i, u in enumerate(order):
        if u in pos:
            raise DuplicateNode(u)
        pos[u] = i
    for u, v in dag.edges:
        pu = pos.get(u)
        pv = pos.get(v)
        if pu is not None and pv is not None and pv > pu:
            return False
    return True


def empty_dag(nodes):
    return build_dag(nodes, ())
