"""Event-level checks of the analysis and empirical competitive ratios.

Every check returns a :class:`CheckReport`. Costs that involve the
randomized potential are handled in half-units, expectations as exact
:class:`~fractions.Fraction` values.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algorithms import (
    ACCESS,
    INSERT,
    Access,
    AlgorithmState,
    bit_reference,
    det_serve,
    mrf,
    mtf_reference,
    new_state,
    rand_serve,
)
from .dag import build_dag, is_transitive
from .errors import TooLarge
from .listcore import ListState, inversions, kls_sets, potential_det, potential_rand
from .offline import _extensions, bfs_distances, opt_cost, transposition_distance
from .workloads import WorkloadSpec, all_forward_dags, gen_quadratic_insert_instance, gen_instance, min_insertion_rearrangement

RAND_ENUM_MAX_NODES = 12


@dataclass
class CheckReport:
    name: str
    instances: int = 0
    violations: int = 0
    worst_slack: Fraction = None
    witness: object = None
    exact: bool = True
    stats: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.violations == 0

    def observe(self, slack, witness=None):
        """Record one bound evaluation; ``slack < 0`` is a violation."""
        slack = Fraction(slack)
        if self.worst_slack is None or slack < self.worst_slack:
            self.worst_slack = slack
        if slack < 0:
            self.violations += 1
            if self.witness is None:
                self.witness = witness

    def fail(self, witness):
        self.violations += 1
        if self.witness is None:
            self.witness = witness

    def merge(self, other):
        out = CheckReport(self.name, self.instances + other.instances, self.violations + other.violations,
                          exact=self.exact and other.exact)
        slacks = [s for s in (self.worst_slack, other.worst_slack) if s is not None]
        out.worst_slack = min(slacks) if slacks else None
        out.witness = self.witness if self.witness is not None else other.witness
        out.stats = {**other.stats, **self.stats}
        return out

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        slack = "-" if self.worst_slack is None else str(self.worst_slack)
        text = f"{status} {self.name}: instances={self.instances} violations={self.violations} worst_slack={slack}"
        if self.stats:
            text += " " + " ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
        if not self.exact:
            text += " (estimated)"
        if self.witness is not None:
            text += f" witness={self.witness}"
        return text

    def as_row(self):
        return {
            "check": self.name,
            "instances": self.instances,
            "violations": self.violations,
            "worst_slack": "" if self.worst_slack is None else str(self.worst_slack),
            "exact": int(self.exact),
            "witness": "" if self.witness is None else repr(self.witness),
        }


# --------------------------------------------------------------------------
# random single events: (dag, subject, reference, accessed node)


def random_dag(rng, n, p=None):
    if p is None:
        p = float(rng.random())
    edges = [(u, v) for u in range(n) for v in range(u) if rng.random() < p]
    return build_dag(range(n), edges)


def random_linear_extension(dag, rng):
    remaining = {u: set(dag.dependencies(u)) for u in dag.nodes}
    order = []
    while remaining:
        ready = sorted(u for u, deps in remaining.items() if not deps)
        u = ready[int(rng.integers(len(ready)))]
        order.append(u)
        del remaining[u]
        for deps in remaining.values():
            deps.discard(u)
    return ListState(order)


def random_events(trials, seed, max_n=8):
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        n = int(rng.integers(1, max_n + 1))
        dag = random_dag(rng, n)
        subject = random_linear_extension(dag, rng)
        reference = random_linear_extension(dag, rng)
        y = int(rng.integers(n))
        yield dag, subject, reference, y


def _mrf_on(dag, subject, y):
    state = AlgorithmState(subject.copy(), dag)
    cost, chain = mrf(state, y)
    return state.list, cost, chain


def check_set_relations(trials=10_000, seed=0, max_n=8):
    """Both set equalities on the K/L/S sets, plus the partition structure of S."""
    rep = CheckReport("set_relations")
    for dag, subject, reference, y in random_events(trials, seed, max_n):
        rep.instances += 1
        _, _, chain = _mrf_on(dag, subject, y)
        kls = kls_sets(subject, reference, chain)
        witness = (sorted(dag.edges), subject.order, reference.order, y)
        if frozenset().union(*kls.K) != kls.K[-1]:
            rep.fail(("union K", witness))
        if frozenset().union(*(s & l for s, l in zip(kls.S, kls.L))) != frozenset().union(*kls.L):
            rep.fail(("union S&L", witness))
        covered = frozenset().union(*kls.S)
        if sum(map(len, kls.S)) != len(covered) or covered != frozenset(subject.order[: subject.position(y)]):
            rep.fail(("S partition", witness))
        if y not in kls.S[-1] or any(chain[j - 1] in kls.S[j] for j in range(1, len(chain))):
            rep.fail(("S membership", witness))
        rep.observe(0)
    return rep


def check_inversion_change(trials=10_000, seed=0, max_n=8):
    """created <= k, destroyed >= l and net change <= k - l for every event."""
    rep = CheckReport("inversion_change")
    for dag, subject, reference, y in random_events(trials, seed, max_n):
        rep.instances += 1
        after, _, chain = _mrf_on(dag, subject, y)
        kls = kls_sets(subject, reference, chain)
        k, l = kls.k, kls.l
        before_pairs = inversions(subject, reference, with_pairs=True).pairs
        after_pairs = inversions(after, reference, with_pairs=True).pairs
        created = len(after_pairs - before_pairs)
        destroyed = len(before_pairs - after_pairs)
        witness = (sorted(dag.edges), subject.order, reference.order, y)
        rep.observe(k - created, ("created", witness))
        rep.observe(destroyed - l, ("destroyed", witness))
        rep.observe((k - l) - (created - destroyed), ("net", witness))
    return rep


def _replay_chain(dag, order, y):
    """Independent MRF replay on a plain tuple: chain and final order."""
    pos = {u: i + 1 for i, u in enumerate(order)}
    chain = [y]
    while True:
        deps = [v for v in dag.dependencies(chain[-1])]
        if not deps:
            break
        chain.append(max(deps, key=pos.__getitem__))
    chain.reverse()
    final = list(order)
    for j in range(len(chain) - 1, -1, -1):
        target = pos[chain[j - 1]] + 1 if j > 0 else 1
        final.remove(chain[j])
        final.insert(target - 1, chain[j])
    return tuple(chain), tuple(final)


def check_rearrangement_bound(trials=10_000, seed=0, max_n=8):
    """MRF swaps <= pos(y), equal to pos(y) - len(chain), and match a replay."""
    rep = CheckReport("rearrangement_bound")
    for dag, subject, reference, y in random_events(trials, seed, max_n):
        rep.instances += 1
        after, cost, chain = _mrf_on(dag, subject, y)
        p = subject.position(y)
        witness = (sorted(dag.edges), subject.order, y)
        rep.observe(p - cost, ("bound", witness))
        if cost != p - len(chain):
            rep.fail(("telescoping", witness, cost, p, chain))
        want_chain, want_final = _replay_chain(dag, subject.order, y)
        if want_chain != chain or want_final != after.as_tuple():
            rep.fail(("replay", witness, chain, after.order))
    return rep


# --------------------------------------------------------------------------
# DET against OPT


def _half(x):
    return Fraction(x, 2)


def check_det_amortized(dag, initial, sequence, trace=None, report=None):
    """Per-event C_DET + dPhi <= 4 C_OPT with Phi = 2 * inversions vs OPT's list."""
    rep = report if report is not None else CheckReport("det_amortized")
    initial = initial if isinstance(initial, ListState) else ListState(initial)
    if trace is None:
        trace = opt_cost(dag, initial, sequence)
    state = new_state(dag, initial)
    opt_prev = initial
    det_total = 0
    for t, (req, step) in enumerate(zip(sequence, trace.per_step)):
        before = state.list.copy()
        rec = det_serve(state, req)
        opt_cur = step.configuration
        c_opt = step.transposition_cost + step.service_cost
        phi_before = potential_det(before, opt_prev)
        phi_after = potential_det(state.list, opt_cur)
        lhs = 2 * rec.cost + (phi_after - phi_before)
        rep.observe(_half(8 * c_opt - lhs), ("amortized", t, req, before.order, opt_prev.order))
        if req.kind == ACCESS:
            phi_mid = potential_det(before, opt_cur)
            rep.observe(_half(4 * step.transposition_cost - (phi_mid - phi_before)), ("paid exchange", t))
        if req.kind == INSERT and rec.rearrangement_cost:
            rep.fail(("insert swapped", t))
        det_total += rec.cost
        opt_prev = opt_cur
    rep.instances += 1
    rep.observe(4 * trace.total_cost - det_total, ("total", sequence))
    if trace.total_cost > det_total:
        rep.fail(("opt above det", trace.total_cost, det_total))
    return rep


# --------------------------------------------------------------------------
# RAND


def _bit_vectors(nodes):
    nodes = sorted(nodes)
    for combo in itertools.product((0, 1), repeat=len(nodes)):
        yield dict(zip(nodes, combo))


@lru_cache(maxsize=200_000)
def _rand_event_expectations(edges, subject, reference, y):
    nodes = frozenset(subject)
    dag = build_dag(nodes, edges)
    subj = ListState(subject)
    ref = ListState(reference)
    others = sorted(nodes - {y})
    sums = [0, 0]
    count = 0
    for combo in itertools.product((0, 1), repeat=len(others)):
        count += 1
        for b in (0, 1):
            bits = dict(zip(others, combo))
            bits[y] = b
            state = AlgorithmState(subj.copy(), dag, dict(bits))
            phi_before = potential_rand(subj, ref, bits)
            rec = rand_serve(state, Access(y))
            phi_after = potential_rand(state.list, ref, state.bits)
            sums[b] += 2 * rec.cost + phi_after - phi_before
    e0 = Fraction(sums[0], 2 * count)
    e1 = Fraction(sums[1], 2 * count)
    k = sum(1 for u in subject[: subject.index(y)] if ref.position(u) < ref.position(y))
    return e0, e1, k


def rand_event_expectations(dag, subject, reference, y):
    """Exact E_0 and E_1 of C_RAND + dPhi for one fixed event, and k."""
    subject = subject if isinstance(subject, ListState) else ListState(subject)
    reference = reference if isinstance(reference, ListState) else ListState(reference)
    if len(subject) > RAND_ENUM_MAX_NODES:
        raise TooLarge(f"bit enumeration limited to {RAND_ENUM_MAX_NODES} nodes")
    edges = frozenset((u, v) for u, v in dag.edges if u in subject and v in subject)
    return _rand_event_expectations(edges, subject.as_tuple(), reference.as_tuple(), y)


def check_rand_expectation(dag, subject, reference, y, report=None):
    """E_1 <= k+1, E_0 <= 5(k+1) and their average <= 3(k+1), by exact enumeration."""
    rep = report if report is not None else CheckReport("rand_expectation")
    e0, e1, k = rand_event_expectations(dag, subject, reference, y)
    w = (sorted(dag.edges), tuple(subject), tuple(reference), y)
    rep.instances += 1
    rep.observe(k + 1 - e1, ("E1", w, e1, k))
    rep.observe(5 * (k + 1) - e0, ("E0", w, e0, k))
    rep.observe(3 * (k + 1) - (e0 + e1) / 2, ("E", w, e0, e1, k))
    return rep


def check_rand_events(trials=1_000, seed=0, max_n=8):
    rep = CheckReport("rand_expectation")
    for dag, subject, reference, y in random_events(trials, seed, max_n):
        check_rand_expectation(dag, subject, reference, y, rep)
    return rep


def rand_runs(dag, initial, sequence):
    """RAND on every initial bit vector and every bit stream for inserted nodes.

    Yields ``(initial_bits, insert_bits, state, records)``.
    """
    initial = initial if isinstance(initial, ListState) else ListState(initial)
    n_ins = sum(1 for r in sequence if r.kind == INSERT)
    if len(initial) + n_ins > RAND_ENUM_MAX_NODES:
        raise TooLarge("too many bits to enumerate exactly")
    for bits in _bit_vectors(initial.order):
        for ins in itertools.product((0, 1), repeat=n_ins):
            state = new_state(dag, initial, bits=bits, insert_bits=ins)
            records = [rand_serve(state, r) for r in sequence]
            yield bits, ins, state, records


def rand_expected_cost(dag, initial, sequence):
    costs = [sum(r.cost for r in recs) for _, _, _, recs in rand_runs(dag, initial, sequence)]
    return Fraction(sum(costs), len(costs)), costs


def rand_monte_carlo_cost(dag, initial, sequence, trials, seed):
    seeds = np.random.SeedSequence(seed).spawn(trials)
    costs = []
    for s in seeds:
        state = new_state(dag, initial, seed=s)
        costs.append(sum(rand_serve(state, r).cost for r in sequence))
    return Fraction(sum(costs), len(costs)), costs


@dataclass
class RatioResult:
    algorithm: str
    alg_cost: Fraction
    opt_cost: int
    ratio: Fraction
    exact: bool = True


def competitive_ratio(algorithm, dag, initial, sequence, exact=True, trials=100, seed=0, trace=None):
    """ALG(sigma)/OPT(sigma); for RAND the expectation is exact unless ``exact`` is False."""
    initial = initial if isinstance(initial, ListState) else ListState(initial)
    if trace is None:
        trace = opt_cost(dag, initial, sequence)
    if algorithm == "det":
        state = new_state(dag, initial)
        alg = Fraction(sum(det_serve(state, r).cost for r in sequence))
    elif algorithm == "rand":
        if exact:
            alg, _ = rand_expected_cost(dag, initial, sequence)
        else:
            alg, _ = rand_monte_carlo_cost(dag, initial, sequence, trials, seed)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    opt = trace.total_cost
    ratio = alg / opt if opt else Fraction(1 if alg == 0 else 0)
    if opt == 0 and alg:
        raise ZeroDivisionError("OPT paid nothing but the algorithm did")
    return RatioResult(algorithm, alg, opt, ratio, exact or algorithm == "det")


def check_bit_uniformity(dag, initial, sequence, report=None):
    """Over all initial bit vectors the present bits stay exactly uniform and independent."""
    rep = report if report is not None else CheckReport("bit_uniformity")
    initial = initial if isinstance(initial, ListState) else ListState(initial)
    runs = []
    for bits in _bit_vectors(initial.order):
        state = new_state(dag, initial, bits=bits, insert_bits=[0] * len(sequence))
        snapshots = []
        for r in sequence:
            prev = dict(state.bits)
            rand_serve(state, r)
            if r.kind == ACCESS:
                changed = {u for u in state.bits if state.bits[u] != prev[u]}
                if changed != {r.node}:
                    rep.fail(("flip", bits, r, changed))
            snapshots.append(tuple(sorted(state.bits.items())))
        runs.append(snapshots)
    rep.instances += 1
    for t in range(len(sequence)):
        counts = {}
        for snaps in runs:
            counts[snaps[t]] = counts.get(snaps[t], 0) + 1
        vals = set(counts.values())
        nodes = [u for u, _ in runs[0][t]]
        if len(counts) != 2 ** len(nodes) or len(vals) != 1:
            rep.fail(("joint law", t, counts))
    return rep


# --------------------------------------------------------------------------
# sweeps behind the acceptance criteria


def _random_access_sequences(rng, n, count, length):
    for _ in range(count):
        yield [Access(int(u)) for u in rng.integers(0, n, size=length)]


def sweep_det(n=4, sequences=200, length=8, seed=0):
    """All DAGs on ``n`` nodes x random access sequences: DET <= 4 OPT, per event too."""
    rep = CheckReport("det_4_competitive")
    rng = np.random.default_rng(seed)
    worst = Fraction(0)
    for dag in all_forward_dags(n):
        initial = ListState(range(n))
        for seq in _random_access_sequences(rng, n, sequences, length):
            trace = opt_cost(dag, initial, seq)
            check_det_amortized(dag, initial, seq, trace, rep)
            state = new_state(dag, initial)
            det = sum(det_serve(state, r).cost for r in seq)
            worst = max(worst, Fraction(det, trace.total_cost))
    rep.stats["max_ratio"] = worst
    return rep


def sweep_rand(n=4, sequences=200, length=8, seed=0):
    """Same instances as :func:`sweep_det`: exact E[RAND] <= 3 OPT, the
    conditional bounds at every event, and OPT below every fixed-bit run."""
    ratio = CheckReport("rand_3_competitive")
    events = CheckReport("rand_event_bounds")
    below = CheckReport("opt_below_rand_runs")
    rng = np.random.default_rng(seed)
    worst = Fraction(0)
    for dag in all_forward_dags(n):
        initial = ListState(range(n))
        for seq in _random_access_sequences(rng, n, sequences, length):
            trace = opt_cost(dag, initial, seq)
            opt = trace.total_cost
            total = 0
            runs = 0
            seen = set()
            for _, _, _, records in rand_runs(dag, initial, seq):
                cost = sum(r.cost for r in records)
                total += cost
                runs += 1
                below.instances += 1
                below.observe(cost - opt, ("run", sorted(dag.edges), seq))
                for t, rec in enumerate(records):
                    key = (rec.list_before, t)
                    if key in seen:
                        continue
                    seen.add(key)
                    ref = trace.per_step[t].configuration
                    check_rand_expectation(dag, ListState(rec.list_before), ref, rec.request.node, events)
            expected = Fraction(total, runs)
            ratio.instances += 1
            ratio.observe(3 * opt - expected, (sorted(dag.edges), [r.node for r in seq]))
            worst = max(worst, expected / opt)
    ratio.stats["max_ratio"] = worst
    return ratio, events, below


def check_reductions(sequences=1_000, seed=0, max_n=8, max_length=20):
    """Empty DAG: DET matches MTF and RAND matches BIT event for event."""
    rep = CheckReport("empty_dag_reductions")
    rng = np.random.default_rng(seed)
    for _ in range(sequences):
        n = int(rng.integers(1, max_n + 1))
        length = int(rng.integers(1, max_length + 1))
        dag = build_dag(range(n), ())
        initial = ListState(rng.permutation(n).tolist())
        seq = [Access(int(u)) for u in rng.integers(0, n, size=length)]
        bits = {u: int(b) for u, b in zip(range(n), rng.integers(0, 2, size=n))}
        rep.instances += 1
        for alg, ref, b in ((det_serve, mtf_reference, None), (rand_serve, bit_reference, bits)):
            s1 = new_state(dag, initial, bits=b)
            s2 = new_state(dag, initial, bits=b)
            for r in seq:
                e1, e2 = alg(s1, r), ref(s2, r)
                if (e1.access_cost, e1.rearrangement_cost, e1.list_after) != (
                    e2.access_cost, e2.rearrangement_cost, e2.list_after
                ):
                    rep.fail((alg.__name__, initial.order, [q.node for q in seq], b))
                    break
        rep.observe(0)
    return rep


def check_opt_oracle(dags=50, seed=0, max_n=5):
    """Kendall distance equals BFS over feasible swaps on every extension pair."""
    rep = CheckReport("distance_oracle")
    rng = np.random.default_rng(seed)
    pairs = 0
    for _ in range(dags):
        n = int(rng.integers(2, max_n + 1))
        dag = random_dag(rng, n, p=float(rng.random()) * 0.6)
        exts = [ListState(t) for t in _extensions(dag.nodes, dag.edges, None)]
        rep.instances += 1
        for a in exts:
            dist = bfs_distances(dag, a)
            for b in exts:
                pairs += 1
                got = transposition_distance(dag, a, b)
                if got != dist[b.as_tuple()]:
                    rep.fail((sorted(dag.edges), a.order, b.order, got, dist[b.as_tuple()]))
        rep.observe(0)
    rep.stats["pairs"] = pairs
    return rep


def check_quadratic_insert(ns=(2, 4, 6, 8)):
    rep = CheckReport("quadratic_insert")
    costs = {}
    for n in ns:
        universe, initial, req = gen_quadratic_insert_instance(n)
        pre = universe.restricted(initial.order)
        cost = min_insertion_rearrangement(pre, initial, req)
        costs[n] = cost
        rep.instances += 1
        if cost != (n // 2) ** 2:
            rep.fail((n, cost))
        rep.observe(0)
    rep.stats["costs"] = costs
    return rep


def transitive_forward_dags(n):
    return [d for d in all_forward_dags(n) if is_transitive(d)]


def sweep_updates(universe_n=4, sequences=20, max_length=8, max_updates=2, seed=0):
    """Insert/delete workloads over every transitive universe on ``universe_n`` nodes."""
    det = CheckReport("det_4_competitive_updates")
    rnd = CheckReport("rand_4_competitive_updates")
    worst_det = Fraction(0)
    worst_rand = Fraction(0)
    rng = np.random.default_rng(seed)
    for universe in transitive_forward_dags(universe_n):
        for n0 in range(1, universe_n + 1):
            for _ in range(sequences):
                spec = WorkloadSpec(
                    n=n0,
                    future=universe_n - n0,
                    length=int(rng.integers(1, max_length + 1)),
                    update_mix=0.35,
                    max_updates=max_updates,
                    seed=int(rng.integers(2**31)),
                )
                inst = gen_instance(spec, universe=universe)
                trace = opt_cost(inst.dag, inst.initial, inst.requests)
                check_det_amortized(inst.dag, inst.initial, inst.requests, trace, det)
                state = new_state(inst.dag, inst.initial)
                det_cost = sum(det_serve(state, r).cost for r in inst.requests)
                if trace.total_cost:
                    worst_det = max(worst_det, Fraction(det_cost, trace.total_cost))
                total = 0
                runs = 0
                for _, _, _, recs in rand_runs(inst.dag, inst.initial, inst.requests):
                    runs += 1
                    total += sum(r.cost for r in recs)
                    if any(r.request.kind == INSERT and r.rearrangement_cost for r in recs):
                        rnd.fail(("insert swapped", inst.requests))
                expected = Fraction(total, runs)
                rnd.instances += 1
                rnd.observe(4 * trace.total_cost - expected, (sorted(universe.edges), n0, inst.requests))
                if trace.total_cost:
                    worst_rand = max(worst_rand, expected / trace.total_cost)
    det.stats["max_ratio"] = worst_det
    rnd.stats["max_ratio"] = worst_rand
    return det, rnd
