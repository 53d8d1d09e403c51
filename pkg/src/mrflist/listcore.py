"""List state, paid-exchange cost accounting, inversions and the K/L/S sets.

Positions are 1-based. Potentials are integers in half-units so the 5/2 and
7/2 weights of the randomized potential stay exact.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    DuplicateNode,
    InfeasibleMove,
    MissingBit,
    NodeAbsent,
    NodePresent,
    NodeSetMismatch,
    UnorderedChain,
)


class ListState:
    """An ordering of node ids with a position index."""

    __slots__ = ("order", "_pos")

    def __init__(self, order=()):
        self.order = list(order)
        self._pos = {}
        self._reindex(0)
        if len(self._pos) != len(self.order):
            raise DuplicateNode(f"duplicate node in {self.order}")

    def _reindex(self, start):
        pos = self._pos
        order = self.order
        for i in range(start, len(order)):
            pos[order[i]] = i + 1

    def __repr__(self):
        return f"ListState({self.order})"

    def __len__(self):
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def __contains__(self, node):
        return node in self._pos

    def __eq__(self, other):
        if isinstance(other, ListState):
            return self.order == other.order
        if isinstance(other, (list, tuple)):
            return self.order == list(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.order))

    def as_tuple(self):
        return tuple(self.order)

    def nodes(self):
        return frozenset(self._pos)

    def copy(self):
        new = ListState.__new__(ListState)
        new.order = list(self.order)
        new._pos = dict(self._pos)
        return new

    def position(self, node):
        try:
            return self._pos[node]
        except KeyError:
            raise NodeAbsent(node) from None

    def at(self, p):
        return self.order[p - 1]

    def insert_at(self, node, p):
        """Splice ``node`` in at position ``p`` (no swap cost)."""
        if node in self._pos:
            raise NodePresent(node)
        if not 1 <= p <= len(self.order) + 1:
            raise IndexError(f"insert position {p} outside 1..{len(self.order) + 1}")
        self.order.insert(p - 1, node)
        self._reindex(p - 1)

    def remove(self, node):
        p = self.position(node)
        del self.order[p - 1]
        del self._pos[node]
        self._reindex(p - 1)
        return p


@dataclass
class CostLedger:
    access_cost: int = 0
    transposition_cost: int = 0

    @property
    def total(self):
        return self.access_cost + self.transposition_cost


@dataclass
class InversionReport:
    total: int
    typed: tuple = None
    pairs: frozenset = None


@dataclass
class KLSReport:
    d: tuple
    K: list
    L: list
    S: list
    k: int = field(init=False)
    l: int = field(init=False)  # noqa: E741

    def __post_init__(self):
        self.k = len(self.K[-1])
        self.l = len(self.L[-1])


def access(lst, y):
    """Access cost of ``y``: its position."""
    return lst.position(y)


def move_to(lst, dag, y, p, ledger=None):
    """Move ``y`` forward to position ``p`` by adjacent swaps.

    Returns the number of swaps. Raises :class:`InfeasibleMove` when ``y``
    would pass one of its dependencies.
    """
    cur = lst.position(y)
    if p > cur or p < 1:
        raise InfeasibleMove(f"cannot move {y} from {cur} to {p}: only forward moves")
    if p == cur:
        return 0
    must_precede = dag._reach[y] if y in dag.nodes else None
    if must_precede is not None:
        for v in lst.order[p - 1 : cur - 1]:
            if v < must_precede.shape[0] and must_precede[v]:
                raise InfeasibleMove(f"{y} cannot pass its dependency {v}")
    del lst.order[cur - 1]
    lst.order.insert(p - 1, y)
    lst._reindex(p - 1)
    cost = cur - p
    if ledger is not None:
        ledger.transposition_cost += cost
    return cost


def _ref_seq(subject, reference):
    if len(subject) != len(reference) or subject.nodes() != reference.nodes():
        raise NodeSetMismatch(f"{subject.order} vs {reference.order}")
    return np.fromiter((reference.position(u) for u in subject.order), dtype=np.int64, count=len(subject))


def _bit_vector(subject, bits):
    try:
        return np.fromiter((bits[u] for u in subject.order), dtype=np.uint8, count=len(subject))
    except KeyError as exc:
        raise MissingBit(exc.args[0]) from None


def inversions(subject, reference, bits=None, with_pairs=False):
    """Pairs ``(u, v)`` with ``u`` before ``v`` in subject, after it in reference.

    With ``bits`` the inversion's type is the bit of its second element ``v``.
    """
    seq = _ref_seq(subject, reference)
    typed = None
    if bits is not None:
        i0, i1 = kernels.typed_inversions(seq, _bit_vector(subject, bits))
        typed = (int(i0), int(i1))
        total = typed[0] + typed[1]
    else:
        total = int(kernels.count_inversions(seq))
    pairs = None
    if with_pairs:
        order = subject.order
        pairs = frozenset(
            (order[i], order[j])
            for i in range(len(order))
            for j in range(i + 1, len(order))
            if seq[i] > seq[j]
        )
    return InversionReport(total, typed, pairs)


def potential_det(subject, reference):
    """Twice the inversion count, in half-units."""
    return 4 * int(kernels.count_inversions(_ref_seq(subject, reference)))


def potential_rand(subject, reference, bits):
    """5/2 per type-0 inversion plus 7/2 per type-1 inversion, in half-units."""
    seq = _ref_seq(subject, reference)
    i0, i1 = kernels.typed_inversions(seq, _bit_vector(subject, bits))
    return 5 * int(i0) + 7 * int(i1)


def kls_sets(subject, reference, d):
    """The K_j, L_j, S_j sets for the chain ``d`` (ordered head to tail)."""
    if subject.nodes() != reference.nodes():
        raise NodeSetMismatch(f"{subject.order} vs {reference.order}")
    d = tuple(d)
    if not d:
        raise UnorderedChain("empty chain")
    dpos = [subject.position(x) for x in d]
    if any(a >= b for a, b in zip(dpos, dpos[1:])):
        raise UnorderedChain(f"chain {d} not increasing in subject positions {dpos}")
    K, L, S = [], [], []
    prev = 0
    for x, px in zip(d, dpos):
        rx = reference.position(x)
        before = subject.order[: px - 1]
        K.append(frozenset(u for u in before if reference.position(u) < rx))
        L.append(frozenset(u for u in before if reference.position(u) > rx))
        S.append(frozenset(subject.order[prev:px]))
        prev = px
    return KLSReport(d, K, L, S)
