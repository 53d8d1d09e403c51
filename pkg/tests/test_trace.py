from pathlib import Path

import pytest

from mrflist.algorithms import Access, Delete, Insert
from mrflist.errors import ParseError, ValidationError
from mrflist.trace import parse_trace, serialize_trace, trace_from_instance
from mrflist.workloads import WorkloadSpec, gen_instance

DATA = Path(__file__).resolve().parents[1] / "data"

T1 = """\
nodes a b c
edge c a
init a b c
access c
"""


def test_minimal_trace():
    tr = parse_trace(T1)
    assert tr.names == ["a", "b", "c"]
    assert tr.dag.edges == {(2, 0)}
    assert tr.initial == [0, 1, 2]
    assert tr.requests == [Access(2)]
    assert serialize_trace(tr) == T1


def test_insert_direction():
    tr = parse_trace(T1 + "insert x before=a after=c\ndelete b\naccess x\n")
    ins = tr.requests[1]
    assert ins == Insert(3, preds={0}, succs={2})
    assert tr.requests[2:] == [Delete(1), Access(3)]


def test_comments_and_default_init():
    tr = parse_trace("# header\nnodes a b  # two\n\naccess b\n")
    assert tr.initial == [0, 1] and tr.requests == [Access(1)]


@pytest.mark.parametrize("text,exc", [
    ("nodes a b c\nedge c a\ninit c b a\n", ValidationError),
    ("nodes a b\nedge a b\nedge b a\n", ValidationError),
    ("nodes a\naccess z\n", ValidationError),
    ("nodes a b\ndelete b\naccess b\n", ValidationError),
    ("nodes a\nfrobnicate a\n", ParseError),
    ("nodes a\ninsert a\n", ValidationError),
    ("nodes a\ninsert y sideways=a\n", ParseError),
    ("nodes a b\ninit a\n", ValidationError),
    ("access a\n", ValidationError),
])
def test_rejects(text, exc):
    with pytest.raises(exc):
        parse_trace(text)


def test_parse_error_line_number():
    with pytest.raises(ParseError) as e:
        parse_trace("nodes a\n\nedge a\n")
    assert e.value.line == 3


@pytest.mark.parametrize("path", sorted(DATA.glob("*.trace")), ids=lambda p: p.name)
def test_bundled_round_trip(path):
    tr = parse_trace(path.read_text())
    again = parse_trace(serialize_trace(tr))
    assert serialize_trace(again) == serialize_trace(tr)
    assert (again.names, again.dag, again.initial, again.requests) == (tr.names, tr.dag, tr.initial, tr.requests)


@pytest.mark.parametrize("seed", range(5))
def test_generated_round_trip(seed):
    spec = WorkloadSpec("random", n=4, future=3, length=15, update_mix=0.4, seed=seed, edge_p=0.4)
    tr = trace_from_instance(gen_instance(spec))
    text = serialize_trace(tr)
    back = parse_trace(text)
    assert (back.dag, back.initial, back.requests) == (tr.dag, tr.initial, tr.requests)
    assert serialize_trace(back) == text
