"""Online list algorithms: MRF, DET, RAND, and the MTF/BIT/static baselines."""

from dataclasses import dataclass, field

import numpy as np

from .dag import direct_dependency, is_linear_extension
from .errors import (
    InfeasibleInsert,
    MissingBit,
    NodeAbsent,
    NodePresent,
    NonEmptyDag,
    ValidationError,
)
from .listcore import CostLedger, ListState, move_to

ACCESS = "access"
INSERT = "insert"
DELETE = "delete"


@dataclass(frozen=True)
class Request:
    kind: str
    node: int
    preds: frozenset = frozenset()
    succs: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in (ACCESS, INSERT, DELETE):
            raise ValueError(f"unknown request kind {self.kind!r}")
        object.__setattr__(self, "preds", frozenset(self.preds))
        object.__setattr__(self, "succs", frozenset(self.succs))
        if self.kind != INSERT and (self.preds or self.succs):
            raise ValueError("only insert requests carry constraint sets")
        if self.preds & self.succs:
            raise ValueError(f"node(s) {sorted(self.preds & self.succs)} both before and after {self.node}")


def Access(node):
    return Request(ACCESS, node)


def Insert(node, preds=(), succs=()):
    return Request(INSERT, node, frozenset(preds), frozenset(succs))


def Delete(node):
    return Request(DELETE, node)


@dataclass
class AlgorithmState:
    """Mutable per-trial state.

    ``bits`` is only used by RAND/BIT. New nodes inserted under RAND take
    their bit from ``insert_bits`` when it is non-empty, else from ``rng``.
    """

    list: ListState
    dag: object
    bits: dict = None
    rng: object = None
    insert_bits: list = None
    ledger: CostLedger = field(default_factory=CostLedger)

    def copy(self):
        return AlgorithmState(
            self.list.copy(),
            self.dag,
            None if self.bits is None else dict(self.bits),
            self.rng,
            None if self.insert_bits is None else list(self.insert_bits),
            CostLedger(self.ledger.access_cost, self.ledger.transposition_cost),
        )


def new_state(dag, initial, bits=None, seed=None, insert_bits=None):
    """Build a validated state. With ``seed`` and no ``bits``, draw RAND bits."""
    lst = initial.copy() if isinstance(initial, ListState) else ListState(initial)
    if lst.nodes() != dag.nodes:
        raise ValidationError(f"initial list {lst.order} does not cover DAG nodes {sorted(dag.nodes)}")
    if not is_linear_extension(dag, lst):
        raise ValidationError(f"initial list {lst.order} violates the DAG")
    rng = None
    if seed is not None:
        rng = np.random.default_rng(seed)
        if bits is None:
            draws = rng.integers(0, 2, size=len(lst))
            bits = {u: int(b) for u, b in zip(sorted(lst.order), draws)}
    if bits is not None:
        bits = dict(bits)
    return AlgorithmState(lst, dag, bits, rng, None if insert_bits is None else list(insert_bits))


@dataclass
class EventRecord:
    request: Request
    access_cost: int
    rearrangement_cost: int
    d_chain: tuple
    list_before: tuple
    list_after: tuple
    bit_before: int = None
    bit_after: int = None

    @property
    def cost(self):
        return self.access_cost + self.rearrangement_cost


def mrf(state, y):
    """Move-Recursively-Forward from ``y``.

    Returns ``(swaps, chain)`` where ``chain`` lists the nodes MRF was called
    for, head side first; ``chain[-1] == y``.
    """
    lst, dag = state.list, state.dag
    if y not in lst:
        raise NodeAbsent(y)
    chain = []
    cost = 0
    cur = y
    while True:
        chain.append(cur)
        z = direct_dependency(dag, lst, cur) if cur in dag.nodes else None
        if z is None:
            cost += move_to(lst, dag, cur, 1)
            break
        cost += move_to(lst, dag, cur, lst.position(z) + 1)
        cur = z
    state.ledger.transposition_cost += cost
    chain.reverse()
    return cost, tuple(chain)


def insert_position(lst, dag, x):
    """Earliest zero-swap slot for ``x``: just after its last predecessor.

    ``dag`` must already contain ``x`` and its revealed constraints.
    """
    deps = [v for v in dag.dependencies(x) if v in lst]
    p = max((lst.position(v) for v in deps), default=0) + 1
    for u in lst.order[: p - 1]:
        if u in dag.nodes and dag.reachable(u, x):
            raise InfeasibleInsert(
                f"{x} must precede {u} (position {lst.position(u)}) but follow a node at position {p - 1}"
            )
    return p


def _validate_insert(state, req):
    x = req.node
    if x in state.list or x in state.dag.nodes:
        raise NodePresent(x)
    for v in req.preds | req.succs:
        if v not in state.list:
            raise NodeAbsent(v)


def _serve_update(state, req, assign_bit):
    lst = state.list
    before = lst.as_tuple()
    x = req.node
    if req.kind == INSERT:
        _validate_insert(state, req)
        cost = len(lst)
        dag = state.dag.with_node(x, req.preds, req.succs)
        p = insert_position(lst, dag, x)
        lst.insert_at(x, p)
        state.dag = dag
        bit = None
        if assign_bit:
            if state.insert_bits:
                bit = int(state.insert_bits.pop(0))
            elif state.rng is not None:
                bit = int(state.rng.integers(0, 2))
            else:
                raise MissingBit(f"no bit source for inserted node {x}")
            state.bits[x] = bit
        state.ledger.access_cost += cost
        return EventRecord(req, cost, 0, (), before, lst.as_tuple(), None, bit)
    cost = lst.position(x) - 1
    lst.remove(x)
    state.dag = state.dag.without_node(x)
    bit = None
    if assign_bit:
        bit = state.bits.pop(x, None)
    state.ledger.access_cost += cost
    return EventRecord(req, cost, 0, (), before, lst.as_tuple(), bit, None)


def _charge_access(state, y):
    c = state.list.position(y)
    state.ledger.access_cost += c
    return c


def det_serve(state, req):
    if req.kind != ACCESS:
        return _serve_update(state, req, False)
    before = state.list.as_tuple()
    c = _charge_access(state, req.node)
    swaps, chain = mrf(state, req.node)
    return EventRecord(req, c, swaps, chain, before, state.list.as_tuple())


def rand_serve(state, req):
    if state.bits is None:
        raise MissingBit("RAND needs a bit vector")
    if req.kind != ACCESS:
        return _serve_update(state, req, True)
    y = req.node
    before = state.list.as_tuple()
    c = _charge_access(state, y)
    try:
        b = state.bits[y]
    except KeyError:
        raise MissingBit(y) from None
    swaps, chain = (0, ())
    if b == 0:
        swaps, chain = mrf(state, y)
    state.bits[y] = 1 - b
    return EventRecord(req, c, swaps, chain, before, state.list.as_tuple(), b, 1 - b)


def static_serve(state, req):
    """Never rearranges; updates behave as in DET."""
    if req.kind != ACCESS:
        return _serve_update(state, req, False)
    before = state.list.as_tuple()
    c = _charge_access(state, req.node)
    return EventRecord(req, c, 0, (), before, before)


def _require_empty(state):
    if state.dag.edges:
        raise NonEmptyDag("reference algorithms only run on constraint-free lists")


def _move_to_front(order, y):
    i = order.index(y)
    order.insert(0, order.pop(i))
    return i


def mtf_reference(state, req):
    """Textbook Move-To-Front, paid exchange: access i, then i-1 swaps."""
    _require_empty(state)
    if req.kind != ACCESS:
        return _serve_update(state, req, False)
    order = state.list.order
    before = tuple(order)
    i = order.index(req.node) + 1
    _move_to_front(order, req.node)
    state.list = ListState(order)
    state.ledger.access_cost += i
    state.ledger.transposition_cost += i - 1
    return EventRecord(req, i, i - 1, (req.node,), before, tuple(order))


def bit_reference(state, req):
    """Textbook BIT: move to front when the bit is 0, always flip it."""
    _require_empty(state)
    if req.kind != ACCESS:
        return _serve_update(state, req, True)
    order = state.list.order
    before = tuple(order)
    y = req.node
    i = order.index(y) + 1
    b = state.bits[y]
    swaps = 0
    chain = ()
    if b == 0:
        _move_to_front(order, y)
        state.list = ListState(order)
        swaps = i - 1
        chain = (y,)
    state.bits[y] ^= 1
    state.ledger.access_cost += i
    state.ledger.transposition_cost += swaps
    return EventRecord(req, i, swaps, chain, before, tuple(order), b, 1 - b)


SERVERS = {
    "det": det_serve,
    "rand": rand_serve,
    "static": static_serve,
    "mtf": mtf_reference,
    "bit": bit_reference,
}


def run(serve, state, requests):
    """Serve every request; returns the list of event records."""
    return [serve(state, r) for r in requests]


def total_cost(records):
    return sum(r.access_cost + r.rearrangement_cost for r in records)
