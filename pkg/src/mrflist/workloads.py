"""Seeded, replayable generators for DAGs, request sequences and named instances."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algorithms import Access, Delete, Insert, det_serve, new_state
from .dag import build_dag, transitive_closure
from .errors import BadSpec
from .listcore import ListState
from .offline import _extensions

DAG_KINDS = ("empty", "chain", "layered", "random", "transitive-random")
DISTRIBUTIONS = ("uniform", "zipf", "repeat-tail", "round-robin")


@dataclass(frozen=True)
class WorkloadSpec:
    """Everything a generator needs; identical specs give identical instances.

    ``future`` nodes exist in the hidden universe DAG but only enter the list
    through insert requests; ``max_updates`` caps inserts plus deletes.
    """

    dag_kind: str = "empty"
    n: int = 4
    distribution: str = "uniform"
    length: int = 8
    update_mix: float = 0.0
    seed: int = 0
    edge_p: float = 0.3
    width: int = 2
    depth: int = 2
    zipf_exponent: float = 1.0
    future: int = 0
    max_updates: int = None

    def validate(self):
        if self.dag_kind not in DAG_KINDS:
            raise BadSpec(f"dag kind must be one of {DAG_KINDS}, got {self.dag_kind!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise BadSpec(f"distribution must be one of {DISTRIBUTIONS}, got {self.distribution!r}")
        if self.n < 1 or self.length < 0 or self.future < 0:
            raise BadSpec("n must be >= 1, length and future >= 0")
        if not 0.0 <= self.update_mix <= 1.0:
            raise BadSpec("update_mix must lie in [0, 1]")
        if not 0.0 <= self.edge_p <= 1.0:
            raise BadSpec("edge_p must lie in [0, 1]")
        if self.dag_kind == "layered":
            if self.width < 1 or self.depth < 1:
                raise BadSpec("layered DAGs need width, depth >= 1")
            if self.width * self.depth != self.n + self.future:
                raise BadSpec(f"layered DAG has width*depth={self.width * self.depth} nodes, spec has {self.n + self.future}")


@dataclass
class Instance:
    dag: object
    initial: ListState
    requests: list
    universe: object = None


def _rng(spec, stream):
    return np.random.default_rng([spec.seed, stream])


def _universe_dag(spec, size):
    rng = _rng(spec, 0)
    kind = spec.dag_kind
    nodes = range(size)
    if kind == "empty":
        return build_dag(nodes, ())
    if kind == "chain":
        return build_dag(nodes, [(i, i - 1) for i in range(1, size)])
    if kind == "layered":
        edges = []
        w = spec.width
        for layer in range(1, spec.depth):
            below = list(range((layer - 1) * w, layer * w))
            for u in range(layer * w, (layer + 1) * w):
                mask = rng.random(w) < spec.edge_p
                mask[rng.integers(w)] = True
                edges.extend((u, below[i]) for i in np.flatnonzero(mask))
        return build_dag(nodes, edges)
    mask = rng.random((size, size)) < spec.edge_p
    edges = [(u, v) for u in range(size) for v in range(u) if mask[u, v]]
    dag = build_dag(nodes, edges)
    return transitive_closure(dag) if kind == "transitive-random" else dag


def _universe(spec):
    universe = _universe_dag(spec, spec.n + spec.future)
    # revealed constraints must come from a transitive poset once updates exist
    if spec.update_mix > 0:
        universe = transitive_closure(universe)
    return universe


def gen_dag(spec):
    """The DAG of the initially present nodes ``0..n-1``.

    Edges always go from a later to an earlier index, so the identity order
    is a linear extension.
    """
    spec.validate()
    return _universe(spec).restricted(range(spec.n))


def _zipf_weights(n, s):
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


def gen_instance(spec, universe=None):
    """Initial DAG, identity initial list and request sequence for ``spec``.

    A caller-supplied ``universe`` (over ``n + future`` nodes) replaces the
    generated one.
    """
    spec.validate()
    size = spec.n + spec.future
    if universe is None:
        universe = _universe(spec)
    elif universe.nodes != frozenset(range(size)):
        raise BadSpec(f"universe must cover nodes 0..{size - 1}")
    dag = universe.restricted(range(spec.n))
    initial = ListState(range(spec.n))
    rng = _rng(spec, 1)
    present = list(range(spec.n))
    pending = list(range(spec.n, size))
    updates_left = spec.max_updates if spec.max_updates is not None else spec.length
    requests = []
    shadow = None
    if spec.distribution == "repeat-tail":
        shadow = new_state(dag, initial)
    rr = 0
    for _ in range(spec.length):
        if spec.update_mix > 0 and updates_left > 0 and rng.random() < spec.update_mix:
            can_insert = bool(pending)
            can_delete = len(present) > 1
            if can_insert and (not can_delete or rng.random() < 0.5):
                x = pending.pop(0)
                preds = frozenset(v for v in present if universe.reachable(x, v))
                succs = frozenset(v for v in present if universe.reachable(v, x))
                req = Insert(x, preds, succs)
                present.append(x)
                updates_left -= 1
            elif can_delete:
                x = present.pop(int(rng.integers(len(present))))
                req = Delete(x)
                updates_left -= 1
            else:
                req = None
            if req is not None:
                requests.append(req)
                if shadow is not None:
                    det_serve(shadow, req)
                continue
        if spec.distribution == "uniform":
            y = present[int(rng.integers(len(present)))]
        elif spec.distribution == "zipf":
            ranked = sorted(present)
            y = ranked[int(rng.choice(len(ranked), p=_zipf_weights(len(ranked), spec.zipf_exponent)))]
        elif spec.distribution == "round-robin":
            ranked = sorted(present)
            y = ranked[rr % len(ranked)]
            rr += 1
        else:
            y = shadow.list.order[-1]
        req = Access(y)
        requests.append(req)
        if shadow is not None:
            det_serve(shadow, req)
    return Instance(dag, initial, requests, universe)


def gen_sequence(spec):
    return gen_instance(spec).requests


def gen_quadratic_insert_instance(n):
    """Reds ``0..n/2-1`` then whites ``n/2..n-1``; inserting ``n`` forces whites < x < reds."""
    if n < 2 or n % 2:
        raise BadSpec("quadratic-insert instance needs an even n >= 2")
    h = n // 2
    reds = range(h)
    whites = range(h, n)
    x = n
    universe = build_dag(range(n + 1), [(x, w) for w in whites] + [(r, x) for r in reds])
    return universe, ListState(range(n)), Insert(x, preds=whites, succs=reds)


def min_insertion_rearrangement(dag, lst, req, max_nodes=None):
    """Fewest swaps on ``lst`` needed before ``req.node`` can be spliced in for free.

    Enumerates the feasible post-insert configurations and takes the nearest
    one (Kendall distance) after removing the new node.
    """
    x = req.node
    nodes = frozenset(lst.order) | {x}
    edges = set(dag.edges if dag is not None else ()) | {(x, p) for p in req.preds} | {(s, x) for s in req.succs}
    edges = {(u, v) for u, v in edges if u in nodes and v in nodes}
    ref = {u: i for i, u in enumerate(lst.order)}
    best = None
    for c in _extensions(nodes, edges, max_nodes):
        seq = np.array([ref[u] for u in c if u != x], dtype=np.int64)
        d = int(kernels.count_inversions(seq))
        if best is None or d < best:
            best = d
    return best


def all_forward_dags(n):
    """Every DAG on ``0..n-1`` whose edges point from higher to lower index.

    Paired with the identity initial list this covers every (DAG, initial
    linear extension) pair up to relabelling.
    """
    pairs = [(u, v) for u in range(n) for v in range(u)]
    for mask in range(1 << len(pairs)):
        yield build_dag(range(n), [p for i, p in enumerate(pairs) if mask >> i & 1])
