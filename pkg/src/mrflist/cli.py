"""Command-line front end.

Exit status: 0 when everything passes, 1 when a check finds violations,
2 on bad input. All output is a pure function of inputs, flags and
``--seed``.
"""

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import verify
from .algorithms import SERVERS, Access, new_state
from .dag import is_transitive
from .errors import BadSpec, MrfError, NoMatch
from .listcore import ListState, inversions, potential_det, potential_rand
from .offline import opt_cost
from .pktclass import SAMPLE_RULES, classify, extract_dependencies, parse_packets, parse_rules
from .trace import Trace, format_request, parse_trace, serialize_trace, trace_from_instance
from .workloads import DAG_KINDS, DISTRIBUTIONS, Instance, WorkloadSpec, gen_quadratic_insert_instance, gen_instance

RUN_COLUMNS = (
    "trial", "t", "request", "access_cost", "rearrangement_cost", "list_length",
    "inversions_vs_opt", "potential", "cum_access", "cum_rearrangement", "cum_total",
)
OPT_COLUMNS = ("t", "request", "configuration", "transposition_cost", "service_cost", "cum_total")
RATIO_COLUMNS = ("algorithm", "alg_cost", "opt_cost", "ratio", "exact")
REPORT_COLUMNS = ("check", "instances", "violations", "worst_slack", "exact", "witness")
CLASSIFY_COLUMNS = ("t", "packet", "rule", "action", "cost", "rearrangement_cost", "cum_total")


class Sink:
    """Row writer for CSV or JSON lines."""

    def __init__(self, stream, columns, fmt):
        self.stream = stream
        self.columns = columns
        self.fmt = fmt
        if fmt == "csv":
            self.writer = csv.writer(stream, lineterminator="\n")
            self.writer.writerow(columns)

    def write(self, row):
        values = ["" if row.get(c) is None else row[c] for c in self.columns]
        if self.fmt == "csv":
            self.writer.writerow([str(v) for v in values])
        else:
            self.stream.write(json.dumps(dict(zip(self.columns, map(_jsonable, values)))) + "\n")


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _fmt_frac(x):
    x = Fraction(x)
    return str(x)


class _Output:
    def __init__(self, path):
        self.path = path
        self.buf = io.StringIO()

    def __enter__(self):
        return self.buf

    def __exit__(self, *exc):
        if exc[0] is None:
            text = self.buf.getvalue()
            if self.path in (None, "-"):
                sys.stdout.write(text)
            else:
                Path(self.path).write_text(text)
        return False


def _read(path):
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_trace(args):
    if not args.trace:
        raise BadSpec("--trace is required")
    return parse_trace(_read(args.trace))


def _names(trace, order):
    return " ".join(trace.names[h] for h in order)


# --------------------------------------------------------------------------
# run


def _trial_states(trace, alg, seed, trials):
    if trials < 1:
        raise BadSpec("trials must be >= 1")
    if alg in ("rand", "bit"):
        for s in np.random.SeedSequence(seed).spawn(trials):
            yield new_state(trace.dag, trace.initial, seed=s)
    else:
        # deterministic algorithms give the same run every time
        yield new_state(trace.dag, trace.initial)


def cmd_run(args):
    trace = _load_trace(args)
    serve = SERVERS[args.alg]
    opt = opt_cost(trace.dag, trace.initial, trace.requests) if args.with_opt else None
    totals = []
    with _Output(args.out) as out:
        sink = Sink(out, RUN_COLUMNS, args.format)
        for trial, state in enumerate(_trial_states(trace, args.alg, args.seed, args.trials)):
            cum_a = cum_r = 0
            for t, req in enumerate(trace.requests, 1):
                rec = serve(state, req)
                cum_a += rec.access_cost
                cum_r += rec.rearrangement_cost
                row = {
                    "trial": trial,
                    "t": t,
                    "request": format_request(req, trace.names),
                    "access_cost": rec.access_cost,
                    "rearrangement_cost": rec.rearrangement_cost,
                    "list_length": len(rec.list_after),
                    "cum_access": cum_a,
                    "cum_rearrangement": cum_r,
                    "cum_total": cum_a + cum_r,
                }
                if opt is not None:
                    ref = opt.per_step[t - 1].configuration
                    subject = ListState(rec.list_after)
                    row["inversions_vs_opt"] = inversions(subject, ref).total
                    if state.bits is not None:
                        row["potential"] = _fmt_frac(Fraction(potential_rand(subject, ref, state.bits), 2))
                    else:
                        row["potential"] = _fmt_frac(Fraction(potential_det(subject, ref), 2))
                sink.write(row)
            totals.append(cum_a + cum_r)
    mean = Fraction(sum(totals), len(totals))
    summary = f"alg={args.alg} trials={len(totals)} mean={_fmt_frac(mean)} min={min(totals)} max={max(totals)}"
    if opt is not None:
        summary += f" opt={opt.total_cost}"
    print(summary, file=sys.stderr)
    return 0


# --------------------------------------------------------------------------
# opt and ratio


def cmd_opt(args):
    trace = _load_trace(args)
    result = opt_cost(trace.dag, trace.initial, trace.requests, allow_rearranged_insert=args.allow_rearranged_insert)
    with _Output(args.out) as out:
        sink = Sink(out, OPT_COLUMNS, args.format)
        cum = 0
        for t, (req, step) in enumerate(zip(trace.requests, result.per_step), 1):
            cum += step.transposition_cost + step.service_cost
            sink.write({
                "t": t,
                "request": format_request(req, trace.names),
                "configuration": _names(trace, step.configuration.order),
                "transposition_cost": step.transposition_cost,
                "service_cost": step.service_cost,
                "cum_total": cum,
            })
    print(f"opt_total={result.total_cost}", file=sys.stderr)
    return 0


def cmd_ratio(args):
    trace = _load_trace(args)
    if args.alg not in ("det", "rand"):
        raise BadSpec("ratio supports --alg det or rand")
    if args.trials < 1:
        raise BadSpec("trials must be >= 1")
    res = verify.competitive_ratio(
        args.alg, trace.dag, trace.initial, trace.requests,
        exact=args.exact_expectation, trials=args.trials, seed=args.seed,
    )
    with _Output(args.out) as out:
        Sink(out, RATIO_COLUMNS, args.format).write({
            "algorithm": res.algorithm,
            "alg_cost": str(res.alg_cost),
            "opt_cost": res.opt_cost,
            "ratio": str(res.ratio),
            "exact": int(res.exact),
        })
    return 0


# --------------------------------------------------------------------------
# verify


def _suite_rule_table(args):
    rep = verify.CheckReport("rule_table_dependencies")
    dag = extract_dependencies(parse_rules(SAMPLE_RULES))
    expected = {(3, 0), (3, 1), (3, 2), (4, 3), (5, 3), (6, 3)}
    rep.instances = 1
    if set(dag.edges) != expected:
        rep.fail(("edges", sorted(dag.edges)))
    if is_transitive(dag):
        rep.fail("extracted DAG is transitive")
    rep.observe(0)
    return [rep]


def _suite_uniformity(args):
    rep = verify.CheckReport("bit_uniformity")
    rng = np.random.default_rng(args.seed)
    for _ in range(args.trials or 200):
        n = int(rng.integers(1, 6))
        dag = verify.random_dag(rng, n)
        initial = verify.random_linear_extension(dag, rng)
        seq = [Access(int(u)) for u in rng.integers(0, n, size=int(rng.integers(1, 9)))]
        verify.check_bit_uniformity(dag, initial, seq, rep)
    rep.observe(0)
    return [rep]


def _n(args, default):
    return args.trials if args.trials else default


SUITES = {
    "set-relations": lambda a: [verify.check_set_relations(_n(a, 10_000), a.seed)],
    "inversion-change": lambda a: [verify.check_inversion_change(_n(a, 10_000), a.seed)],
    "rearrangement": lambda a: [verify.check_rearrangement_bound(_n(a, 10_000), a.seed)],
    "rand-events": lambda a: [verify.check_rand_events(_n(a, 1_000), a.seed)],
    "det": lambda a: [verify.sweep_det(sequences=_n(a, 200), seed=a.seed)],
    "rand": lambda a: list(verify.sweep_rand(sequences=_n(a, 200), seed=a.seed)),
    "reductions": lambda a: [verify.check_reductions(_n(a, 1_000), a.seed)],
    "oracle": lambda a: [verify.check_opt_oracle(_n(a, 50), a.seed)],
    "quadratic-insert": lambda a: [verify.check_quadratic_insert()],
    "rule-table": _suite_rule_table,
    "updates": lambda a: list(verify.sweep_updates(sequences=_n(a, 20), seed=a.seed)),
    "uniformity": _suite_uniformity,
}


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in names:
        for rep in SUITES[name](args):
            reports.append(rep)
            print(rep.line())
    if args.out:
        with _Output(args.out) as out:
            sink = Sink(out, REPORT_COLUMNS, args.format)
            for rep in reports:
                sink.write(rep.as_row())
    return 0 if all(r.ok for r in reports) else 1


# --------------------------------------------------------------------------
# gen


def cmd_gen(args):
    if args.kind == "quadratic-insert":
        universe, initial, req = gen_quadratic_insert_instance(args.n)
        inst = Instance(universe.restricted(initial.order), initial, [req], universe)
    else:
        spec = WorkloadSpec(
            dag_kind=args.kind,
            n=args.n,
            distribution=args.distribution,
            length=args.length,
            update_mix=args.update_mix,
            seed=args.seed,
            edge_p=args.edge_p,
            width=args.width,
            depth=args.depth,
            zipf_exponent=args.zipf_exponent,
            future=args.future,
            max_updates=args.max_updates,
        )
        inst = gen_instance(spec)
    with _Output(args.out) as out:
        out.write(serialize_trace(trace_from_instance(inst)))
    return 0


# --------------------------------------------------------------------------
# pkt


def _rule_names(table):
    for rid in table.ids:
        if not rid or any(c.isspace() or c in ",#=" for c in rid):
            raise BadSpec(f"rule id {rid!r} cannot be used as a trace name")
    return list(table.ids)


def cmd_pkt(args):
    table = parse_rules(_read(args.rules))
    dag = extract_dependencies(table, strict=args.strict)
    ids = table.ids
    if args.action == "extract":
        with _Output(args.out) as out:
            if args.as_trace:
                out.write(serialize_trace(Trace(_rule_names(table), dag, ListState(range(len(ids))), [])))
            else:
                sink = Sink(out, ("rule", "depends_on"), args.format)
                for u, v in sorted(dag.edges):
                    sink.write({"rule": ids[u], "depends_on": ids[v]})
        print(f"rules={len(ids)} edges={len(dag.edges)} transitive={str(is_transitive(dag)).lower()}",
              file=sys.stderr)
        return 0

    if not args.packets:
        raise BadSpec("classify needs --packets")
    if args.alg not in ("det", "rand", "static"):
        raise BadSpec("classify supports --alg det, rand or static")
    packets = parse_packets(_read(args.packets))
    serve = SERVERS[args.alg]
    state = new_state(dag, ListState(range(len(ids))), seed=args.seed if args.alg == "rand" else None)
    cum = 0
    with _Output(args.out) as out:
        sink = Sink(out, CLASSIFY_COLUMNS, args.format)
        for t, pkt in enumerate(packets, 1):
            text = f"{pkt.proto} {pkt.src}:{pkt.sport}->{pkt.dst}:{pkt.dport}"
            try:
                idx, _ = classify(pkt, state.list, table)
            except NoMatch:
                sink.write({"t": t, "packet": text, "rule": "", "action": "DEFAULT", "cost": 0,
                            "rearrangement_cost": 0, "cum_total": cum})
                continue
            rec = serve(state, Access(idx))
            cum += rec.cost
            sink.write({"t": t, "packet": text, "rule": ids[idx], "action": table.rules[idx].action,
                        "cost": rec.access_cost, "rearrangement_cost": rec.rearrangement_cost,
                        "cum_total": cum})
    return 0


# --------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p = argparse.ArgumentParser(prog="mrflist", description="Self-adjusting lists with precedence constraints.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="serve a trace and emit one row per event")
    r.add_argument("--trace", required=True)
    r.add_argument("--alg", choices=sorted(SERVERS), default="det")
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--with-opt", action="store_true", help="add inversion and potential columns against OPT")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("opt", parents=[common], help="offline optimum of a small trace")
    o.add_argument("--trace", required=True)
    o.add_argument("--allow-rearranged-insert", action="store_true")
    o.set_defaults(func=cmd_opt)

    q = sub.add_parser("ratio", parents=[common], help="ALG/OPT for one trace")
    q.add_argument("--trace", required=True)
    q.add_argument("--alg", choices=("det", "rand"), default="det")
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--exact-expectation", action="store_true",
                   help="enumerate every bit vector instead of sampling")
    q.set_defaults(func=cmd_ratio)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=[*SUITES, "all"])
    v.add_argument("--trials", type=int, default=0, help="override the suite's instance count")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", parents=[common], help="write a generated trace")
    g.add_argument("kind", choices=[*DAG_KINDS, "quadratic-insert"])
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--length", type=int, default=8)
    g.add_argument("--distribution", choices=DISTRIBUTIONS, default="uniform")
    g.add_argument("--update-mix", type=float, default=0.0)
    g.add_argument("--edge-p", type=float, default=0.3)
    g.add_argument("--width", type=int, default=2)
    g.add_argument("--depth", type=int, default=2)
    g.add_argument("--zipf-exponent", type=float, default=1.0)
    g.add_argument("--future", type=int, default=0)
    g.add_argument("--max-updates", type=int, default=None)
    g.set_defaults(func=cmd_gen)

    k = sub.add_parser("pkt", parents=[common], help="packet-classification rule tables")
    k.add_argument("action", choices=("extract", "classify"))
    k.add_argument("--rules", required=True)
    k.add_argument("--packets")
    k.add_argument("--strict", action="store_true", help="any overlap orders rules, regardless of action")
    k.add_argument("--alg", choices=("det", "rand", "static"), default="det")
    k.add_argument("--as-trace", action="store_true", help="extract: write the DAG as a trace file")
    k.set_defaults(func=cmd_pkt)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MrfError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
