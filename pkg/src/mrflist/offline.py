"""Brute-force offline optimum over the space of linear extensions."""

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .algorithms import ACCESS, DELETE, INSERT
from .dag import is_linear_extension
from .errors import InfeasibleInsert, NodeAbsent, NodePresent, NodeSetMismatch, NotFeasible, TooLarge
from .listcore import ListState

DEFAULT_MAX_NODES = 7
DEFAULT_MAX_CONFIGS = 5040
BFS_MAX_NODES = 6


def _extensions(nodes, edges, max_nodes):
    """Lexicographic linear extensions of the DAG on ``nodes``."""
    nodes = sorted(nodes)
    if max_nodes is not None and len(nodes) > max_nodes:
        raise TooLarge(f"{len(nodes)} nodes exceeds the limit of {max_nodes}")
    index = {u: i for i, u in enumerate(nodes)}
    need = [0] * len(nodes)  # bitmask of dependencies per node
    for u, v in edges:
        if u in index and v in index:
            need[index[u]] |= 1 << index[v]
    full = (1 << len(nodes)) - 1
    out = []
    buf = []

    def rec(placed):
        if placed == full:
            out.append(tuple(buf))
            return
        for i, u in enumerate(nodes):
            bit = 1 << i
            if not placed & bit and need[i] & placed == need[i]:
                buf.append(u)
                rec(placed | bit)
                buf.pop()

    rec(0)
    return out


def enumerate_linear_extensions(dag, max_nodes=DEFAULT_MAX_NODES):
    """All orderings of ``dag.nodes`` consistent with it, lexicographically."""
    return [ListState(t) for t in _extensions(dag.nodes, dag.edges, max_nodes)]


def _check_pair(dag, a, b):
    a = a if isinstance(a, ListState) else ListState(a)
    b = b if isinstance(b, ListState) else ListState(b)
    if a.nodes() != b.nodes():
        raise NodeSetMismatch(f"{a.order} vs {b.order}")
    for x in (a, b):
        if not is_linear_extension(dag, x):
            raise NotFeasible(f"{x.order} violates the DAG")
    return a, b


def transposition_distance(dag, frm, to):
    """Minimum number of feasible adjacent swaps turning ``frm`` into ``to``.

    Oppositely ordered pairs are never constrained when both lists are
    feasible, so this is the Kendall-tau distance.
    """
    a, b = _check_pair(dag, frm, to)
    seq = np.fromiter((b.position(u) for u in a.order), dtype=np.int64, count=len(a))
    return int(kernels.count_inversions(seq))


def bfs_distances(dag, frm, max_nodes=BFS_MAX_NODES):
    """Feasible-swap distances from ``frm`` to every reachable configuration."""
    frm = frm if isinstance(frm, ListState) else ListState(frm)
    if len(frm) > max_nodes:
        raise TooLarge(f"BFS oracle limited to {max_nodes} nodes")
    if not is_linear_extension(dag, frm):
        raise NotFeasible(f"{frm.order} violates the DAG")
    start = frm.as_tuple()
    dist = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for i in range(len(cur) - 1):
            u, v = cur[i], cur[i + 1]
            # v would move ahead of u: forbidden if u must precede v
            if dag.reachable(v, u):
                continue
            nxt = cur[:i] + (v, u) + cur[i + 2 :]
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist


def bfs_distance_oracle(dag, frm, to, max_nodes=BFS_MAX_NODES):
    """Shortest path in the graph of feasible adjacent swaps (independent oracle)."""
    a, b = _check_pair(dag, frm, to)
    return bfs_distances(dag, a, max_nodes)[b.as_tuple()]


@dataclass
class OptStep:
    configuration: ListState
    transposition_cost: int
    service_cost: int


@dataclass
class OptTrace:
    total_cost: int
    per_step: list


class _ConfigSpace:
    __slots__ = ("configs", "index", "pos", "dist")

    def __init__(self, configs):
        self.configs = configs
        self.index = {c: i for i, c in enumerate(configs)}
        nodes = sorted(configs[0]) if configs and configs[0] else []
        col = {u: i for i, u in enumerate(nodes)}
        pos = np.zeros((len(configs), len(nodes)), dtype=np.int64)
        for r, c in enumerate(configs):
            for p, u in enumerate(c):
                pos[r, col[u]] = p + 1
        self.pos = pos
        self.dist = kernels.kendall_matrix(pos) if len(configs) > 1 else np.zeros((1, 1), dtype=np.int64)

    def position(self, node):
        nodes = sorted(self.configs[0])
        return self.pos[:, nodes.index(node)]


@lru_cache(maxsize=512)
def _space(nodes, edges, max_nodes, max_configs):
    configs = _extensions(nodes, edges, max_nodes)
    if len(configs) > max_configs:
        raise TooLarge(f"{len(configs)} configurations exceed the cap of {max_configs}")
    return _ConfigSpace(configs)


def _active_edges(edges, nodes):
    return frozenset((u, v) for u, v in edges if u in nodes and v in nodes)


def opt_cost(dag, initial, sequence, max_nodes=DEFAULT_MAX_NODES, max_configs=DEFAULT_MAX_CONFIGS,
             allow_rearranged_insert=False):
    """Exact offline optimum by dynamic programming over configurations.

    OPT pays its swaps immediately before serving each request. Insertions
    cost the pre-insert list length and may splice anywhere feasible;
    deletions cost the number of nodes in front of the deleted node. With
    ``allow_rearranged_insert`` an insertion that has no zero-swap slot in
    some configuration is served by paying to reach one that does.
    Ties go to the lexicographically smallest configuration sequence.
    """
    initial = initial if isinstance(initial, ListState) else ListState(initial)
    if initial.nodes() != dag.nodes:
        raise NodeSetMismatch(f"initial {initial.order} vs DAG nodes {sorted(dag.nodes)}")
    if not is_linear_extension(dag, initial):
        raise NotFeasible(f"initial list {initial.order} violates the DAG")

    # Forward pass over node sets / active constraints, building step models.
    nodes = frozenset(dag.nodes)
    edges = frozenset(dag.edges)
    spaces = [_space(nodes, edges, max_nodes, max_configs)]
    steps = []  # (service_from_u, target_index_of_u or candidates)
    for t, req in enumerate(sequence, 1):
        pre = spaces[-1]
        x = req.node
        if req.kind == ACCESS:
            if x not in nodes:
                raise NodeAbsent(f"step {t}: access to absent node {x}")
            svc = pre.position(x)
            targets = np.arange(len(pre.configs))
            post = pre
        elif req.kind == DELETE:
            if x not in nodes:
                raise NodeAbsent(f"step {t}: delete of absent node {x}")
            svc = pre.position(x) - 1
            nodes = nodes - {x}
            edges = _active_edges(edges, nodes)
            post = _space(nodes, edges, max_nodes, max_configs)
            targets = np.array([post.index[tuple(u for u in c if u != x)] for c in pre.configs], dtype=np.int64)
        else:
            if x in nodes:
                raise NodePresent(f"step {t}: insert of present node {x}")
            missing = (req.preds | req.succs) - nodes
            if missing:
                raise NodeAbsent(f"step {t}: insert {x} references absent {sorted(missing)}")
            n_before = len(nodes)
            nodes = nodes | {x}
            edges = edges | {(x, p) for p in req.preds} | {(s, x) for s in req.succs}
            post = _space(nodes, edges, max_nodes, max_configs)
            # an insertion step is modelled from the post side: s came from s \ x
            source = np.array([pre.index[tuple(u for u in c if u != x)] for c in post.configs], dtype=np.int64)
            if not allow_rearranged_insert:
                blocked = sorted(set(range(len(pre.configs))) - set(source.tolist()))
                if blocked:
                    raise InfeasibleInsert(
                        f"step {t}: configuration {pre.configs[blocked[0]]} has no zero-swap slot for {x}"
                    )
            svc = np.full(len(post.configs), n_before, dtype=np.int64)
            targets = source
        steps.append((req.kind, pre, post, svc, targets))
        spaces.append(post)

    # Backward pass: g[s] = cheapest cost of the remaining suffix from state s.
    g = np.zeros(len(spaces[-1].configs), dtype=np.int64)
    go = [None] * len(steps)
    for t in range(len(steps) - 1, -1, -1):
        kind, pre, post, svc, targets = steps[t]
        go[t] = g
        if kind == INSERT:
            # u = source[s]; cost(s') = min_s D[s', source[s]] + n + g[s]
            mat = pre.dist[:, targets]
            g, _ = kernels.minplus_rows(mat, svc + g)
        else:
            g, _ = kernels.minplus_rows(pre.dist, svc + g[targets])
    start = spaces[0].index[initial.as_tuple()]
    total = int(g[start])

    # Forward greedy along optimal moves, lexicographic tie-breaking.
    per_step = []
    cur = start
    for t, (kind, pre, post, svc, targets) in enumerate(steps):
        gt = go[t]
        if kind == INSERT:
            cand = pre.dist[cur, targets] + svc + gt
            best = cand.min()
            s = min(np.flatnonzero(cand == best), key=lambda i: post.configs[i])
            u = int(targets[s])
            per_step.append(OptStep(ListState(post.configs[s]), int(pre.dist[cur, u]), int(svc[s])))
        else:
            cand = pre.dist[cur] + svc + gt[targets]
            best = cand.min()
            u = min(np.flatnonzero(cand == best), key=lambda i: (post.configs[targets[i]], pre.configs[i]))
            s = int(targets[u])
            per_step.append(OptStep(ListState(post.configs[s]), int(pre.dist[cur, u]), int(svc[u])))
        cur = int(s)
    assert sum(p.transposition_cost + p.service_cost for p in per_step) == total
    return OptTrace(total, per_step)

