"""Line-oriented trace files.

Grammar (one directive per line, ``#`` starts a comment)::

    nodes <name>+                 declare initially present nodes
    edge <u> <v>                  v must precede u
    init <name>+                  initial order (all declared nodes)
    access <name>
    insert <name> before=<a,b> after=<c,d>
    delete <name>

For ``insert``, ``before=`` lists nodes that must come before the new node
and ``after=`` lists nodes that must come after it. Either list may be
empty or omitted.
"""

from dataclasses import dataclass

from .algorithms import ACCESS, DELETE, INSERT, Access, Delete, Insert
from .dag import build_dag, is_linear_extension
from .errors import MrfError, ParseError, ValidationError
from .listcore import ListState


@dataclass
class Trace:
    names: list  # handle -> name
    dag: object
    initial: ListState
    requests: list

    def name(self, handle):
        return self.names[handle]

    def handles(self):
        return {n: i for i, n in enumerate(self.names)}


def _csv_names(value):
    return [v for v in value.split(",") if v]


def parse_trace(text):
    names = []
    index = {}
    edges = []
    init = None
    requests = []
    present = set()
    gone = set()

    def lookup(name, lineno, must_be_present=True):
        if name not in index:
            raise ValidationError(f"line {lineno}: unknown node {name!r}")
        h = index[name]
        if must_be_present and h not in present:
            raise ValidationError(f"line {lineno}: node {name!r} is not in the list at this point")
        return h

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, *args = line.split()
        if word == "nodes":
            if init is not None or requests:
                raise ParseError("nodes must be declared before init and requests", lineno)
            if not args:
                raise ParseError("nodes needs at least one name", lineno)
            for a in args:
                if a in index:
                    raise ValidationError(f"line {lineno}: node {a!r} declared twice")
                index[a] = len(names)
                names.append(a)
                present.add(index[a])
        elif word == "edge":
            if len(args) != 2:
                raise ParseError("edge takes exactly two names", lineno)
            if init is not None or requests:
                raise ParseError("edges must come before init and requests", lineno)
            edges.append((lookup(args[0], lineno), lookup(args[1], lineno)))
        elif word == "init":
            if init is not None:
                raise ParseError("duplicate init", lineno)
            if requests:
                raise ParseError("init must precede requests", lineno)
            init = [lookup(a, lineno) for a in args]
        elif word in ("access", "delete"):
            if len(args) != 1:
                raise ParseError(f"{word} takes exactly one name", lineno)
            h = lookup(args[0], lineno)
            if word == "delete":
                present.discard(h)
                gone.add(h)
                requests.append(Delete(h))
            else:
                requests.append(Access(h))
        elif word == "insert":
            if not args:
                raise ParseError("insert needs a name", lineno)
            name = args[0]
            if name in index:
                raise ValidationError(f"line {lineno}: node {name!r} already used")
            before, after = [], []
            for a in args[1:]:
                key, sep, value = a.partition("=")
                if not sep or key not in ("before", "after"):
                    raise ParseError(f"unexpected insert argument {a!r}", lineno)
                target = before if key == "before" else after
                target.extend(lookup(v, lineno) for v in _csv_names(value))
            h = len(names)
            index[name] = h
            names.append(name)
            try:
                requests.append(Insert(h, before, after))
            except ValueError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from None
            present.add(h)
        else:
            raise ParseError(f"unknown directive {word!r}", lineno)

    declared = [h for h in range(len(names)) if h not in {r.node for r in requests if r.kind == INSERT}]
    if not declared:
        raise ParseError("trace declares no nodes")
    if init is None:
        init = declared
    if sorted(init) != sorted(declared):
        raise ValidationError("init must list every declared node exactly once")
    try:
        dag = build_dag(declared, edges)
    except MrfError as exc:
        raise ValidationError(str(exc)) from None
    initial = ListState(init)
    if not is_linear_extension(dag, initial):
        raise ValidationError("initial order violates an edge")
    return Trace(names, dag, initial, requests)


def serialize_trace(trace):
    names = trace.names
    declared = sorted(trace.initial.order)
    lines = ["nodes " + " ".join(names[h] for h in declared)]
    for u, v in sorted(trace.dag.edges):
        lines.append(f"edge {names[u]} {names[v]}")
    lines.append("init " + " ".join(names[h] for h in trace.initial.order))
    for r in trace.requests:
        lines.append(format_request(r, names))
    return "\n".join(lines) + "\n"


def format_request(r, names):
    if r.kind == ACCESS:
        return f"access {names[r.node]}"
    if r.kind == DELETE:
        return f"delete {names[r.node]}"
    parts = [f"insert {names[r.node]}"]
    if r.preds:
        parts.append("before=" + ",".join(names[h] for h in sorted(r.preds)))
    if r.succs:
        parts.append("after=" + ",".join(names[h] for h in sorted(r.succs)))
    return " ".join(parts)


def trace_from_instance(inst, prefix="v"):
    """Trace for a generated instance, handles renumbered in order of appearance."""
    remap = {u: i for i, u in enumerate(sorted(inst.initial.order))}
    for r in inst.requests:
        if r.kind == INSERT:
            remap[r.node] = len(remap)
    dag = build_dag([remap[u] for u in inst.dag.nodes], [(remap[u], remap[v]) for u, v in inst.dag.edges])
    requests = []
    for r in inst.requests:
        if r.kind == INSERT:
            requests.append(Insert(remap[r.node], [remap[v] for v in r.preds], [remap[v] for v in r.succs]))
        elif r.kind == DELETE:
            requests.append(Delete(remap[r.node]))
        else:
            requests.append(Access(remap[r.node]))
    names = [f"{prefix}{i + 1}" for i in range(len(remap))]
    return Trace(names, dag, ListState([remap[u] for u in inst.initial.order]), requests)
