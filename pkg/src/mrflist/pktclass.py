"""Firewall-style rule tables as dependency DAGs.

Rules are read from CSV with the header ``N,Proto,SrcIP,DstIP,SrcPort,DstPort,Action``.
Row order is priority order. Match fields accept ``ANY``; IP fields take a
dotted address or an IPv4 CIDR prefix, port fields an exact value.
"""

import csv
import io
import ipaddress
from dataclasses import dataclass

from .dag import build_dag
from .errors import BadCidr, BadPort, NoMatch, ParseError

HEADER = ("N", "Proto", "SrcIP", "DstIP", "SrcPort", "DstPort", "Action")
ACTIONS = ("ACCEPT", "DENY")
ANY_NET = ipaddress.IPv4Network("0.0.0.0/0")

# x overlaps 1-3 and 4-6 with a different action, while 1-3 and 4-6 are disjoint
SAMPLE_RULES = """\
N,Proto,SrcIP,DstIP,SrcPort,DstPort,Action
1,TCP,10.1.1.1,20.1.1.1,ANY,80,ACCEPT
2,TCP,10.1.1.2,20.1.1.1,ANY,80,ACCEPT
3,TCP,10.1.1.3,20.1.1.1,ANY,80,ACCEPT
x,TCP,10.1.1.0/24,20.1.1.1,ANY,ANY,DENY
4,TCP,0.0.0.0/0,0.0.0.0/0,ANY,445,ACCEPT
5,TCP,0.0.0.0/0,0.0.0.0/0,ANY,17,ACCEPT
6,TCP,0.0.0.0/0,0.0.0.0/0,ANY,18,ACCEPT
"""


@dataclass(frozen=True)
class Rule:
    id: str
    proto: str  # None = any
    src: ipaddress.IPv4Network
    dst: ipaddress.IPv4Network
    sport: int  # None = any
    dport: int  # None = any
    action: str

    def matches(self, pkt):
        return (
            (self.proto is None or self.proto == pkt.proto)
            and pkt.src in self.src
            and pkt.dst in self.dst
            and (self.sport is None or self.sport == pkt.sport)
            and (self.dport is None or self.dport == pkt.dport)
        )


@dataclass(frozen=True)
class RuleTable:
    rules: tuple

    def __post_init__(self):
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise ParseError(f"duplicate rule ids in {ids}")

    def __len__(self):
        return len(self.rules)

    @property
    def ids(self):
        return [r.id for r in self.rules]


@dataclass(frozen=True)
class Packet:
    proto: str
    src: ipaddress.IPv4Address
    dst: ipaddress.IPv4Address
    sport: int
    dport: int


def _is_any(text):
    return text.strip().upper() in ("ANY", "*", "")


def _net(text, line):
    if _is_any(text):
        return ANY_NET
    try:
        return ipaddress.IPv4Network(text.strip(), strict=True)
    except ValueError as exc:
        raise BadCidr(f"bad IPv4 prefix {text!r}: {exc}", line) from None


def _port(text, line, allow_any=True):
    if allow_any and _is_any(text):
        return None
    try:
        value = int(text.strip())
    except ValueError:
        raise BadPort(f"bad port {text!r}", line) from None
    if not 0 <= value <= 65535:
        raise BadPort(f"port {value} outside 0..65535", line)
    return value


def _rows(text):
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or row[0].lstrip().startswith("#"):
            continue
        yield lineno, [c.strip() for c in row]


def parse_rules(text):
    rows = _rows(text)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise ParseError("empty rule table") from None
    if tuple(h.lower() for h in header) != tuple(h.lower() for h in HEADER):
        raise ParseError(f"expected header {','.join(HEADER)}", lineno)
    rules = []
    for lineno, row in rows:
        if len(row) != len(HEADER):
            raise ParseError(f"expected {len(HEADER)} fields, got {len(row)}", lineno)
        rid, proto, src, dst, sport, dport, action = row
        action = action.upper()
        if action not in ACTIONS:
            raise ParseError(f"action must be one of {ACTIONS}, got {action!r}", lineno)
        rules.append(
            Rule(
                rid,
                None if _is_any(proto) else proto.upper(),
                _net(src, lineno),
                _net(dst, lineno),
                _port(sport, lineno),
                _port(dport, lineno),
                action,
            )
        )
    try:
        return RuleTable(tuple(rules))
    except ParseError as exc:
        raise ParseError(str(exc)) from None


def format_rules(table):
    def ip(net):
        if net == ANY_NET:
            return "0.0.0.0/0"
        return str(net.network_address) if net.prefixlen == 32 else str(net)

    lines = [",".join(HEADER)]
    for r in table.rules:
        lines.append(",".join([
            r.id,
            r.proto or "ANY",
            ip(r.src),
            ip(r.dst),
            "ANY" if r.sport is None else str(r.sport),
            "ANY" if r.dport is None else str(r.dport),
            r.action,
        ]))
    return "\n".join(lines) + "\n"


def _eq_or_any(a, b):
    return a is None or b is None or a == b


def match_regions_intersect(r1, r2):
    return (
        _eq_or_any(r1.proto, r2.proto)
        and r1.src.overlaps(r2.src)
        and r1.dst.overlaps(r2.dst)
        and _eq_or_any(r1.sport, r2.sport)
        and _eq_or_any(r1.dport, r2.dport)
    )


def rules_overlap(r1, r2, strict=False):
    """True when the two rules must keep their relative order.

    By default that needs intersecting match regions and different actions;
    ``strict`` drops the action condition.
    """
    if not match_regions_intersect(r1, r2):
        return False
    return strict or r1.action != r2.action


def extract_dependencies(table, strict=False):
    """DAG on rule indices: lower-priority rule -> overlapping higher-priority rule."""
    rules = table.rules
    edges = [
        (j, i)
        for j in range(len(rules))
        for i in range(j)
        if rules_overlap(rules[i], rules[j], strict)
    ]
    return build_dag(range(len(rules)), edges)


def parse_packet(fields, line=None):
    if len(fields) != 5:
        raise ParseError(f"packet needs proto,src,dst,sport,dport; got {len(fields)} fields", line)
    proto, src, dst, sport, dport = (f.strip() for f in fields)
    try:
        s = ipaddress.IPv4Address(src)
        d = ipaddress.IPv4Address(dst)
    except ValueError as exc:
        raise ParseError(str(exc), line) from None
    return Packet(proto.upper(), s, d, _port(sport, line, False), _port(dport, line, False))


def parse_packets(text):
    return [parse_packet(row, lineno) for lineno, row in _rows(text)]


def classify(packet, lst, table):
    """First matching rule in list order: ``(rule index, cost = its position)``."""
    if len(lst) != len(table.rules):
        raise ValueError("list must order exactly the table's rules")
    for p, idx in enumerate(lst.order, 1):
        if table.rules[idx].matches(packet):
            return idx, p
    raise NoMatch(f"no rule matches {packet}")
