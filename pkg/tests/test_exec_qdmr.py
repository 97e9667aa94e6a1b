"""Step-decomposition parsing: marker handling, reference edges, normal form."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symgen.executors import QdmrParseError, exec_qdmr, parse_qdmr


def test_basic_parse_and_edges() -> None:
    graph = parse_qdmr(
        "1#) return dogs 2#) return #1 that are brown 3#) return count of #2"
    )
    assert graph.steps == ("dogs", "#1 that are brown", "count of #2")
    assert graph.edges == ((2, 1), (3, 2))


def test_leading_return_stripped_and_lowercased() -> None:
    graph = parse_qdmr("1#) Return Dogs 2#) return   #1  that are BROWN")
    assert graph.steps == ("dogs", "#1 that are brown")


def test_reference_must_point_backward() -> None:
    with pytest.raises(QdmrParseError):
        parse_qdmr("1#) return #2 2#) return dogs")
    with pytest.raises(QdmrParseError):
        parse_qdmr("1#) return #1")


def test_marker_numbers_remap_to_positions() -> None:
    # Non-contiguous markers mean the same thing once remapped.
    sparse = parse_qdmr("1#) return dogs 3#) return count of #1")
    dense = parse_qdmr("1#) return dogs 2#) return count of #1")
    assert sparse.steps == dense.steps
    assert sparse.edges == dense.edges


def test_duplicate_marker_rejected() -> None:
    with pytest.raises(QdmrParseError):
        parse_qdmr("1#) return dogs 1#) return cats")


@pytest.mark.parametrize(
    "text",
    [
        "",
        "return dogs",             # no marker at all
        "dogs 1#) return cats",    # text before first marker
        "1#) 2#) return cats",     # empty step
    ],
)
def test_malformed_rejected(text: str) -> None:
    with pytest.raises(QdmrParseError):
        parse_qdmr(text)


def test_exec_digest_ignores_case_and_spacing() -> None:
    a = exec_qdmr("1#) return dogs 2#) return count of #1")
    b = exec_qdmr("1#) Return  DOGS 2#) return count  of #1")
    assert a.status == b.status == "ok"
    assert a.digest == b.digest
    assert a.payload == ["dogs", "count of #1"]


def test_exec_failure_reports_reason() -> None:
    out = exec_qdmr("no markers here")
    assert out.status == "fail"
    assert out.fail_reason is not None


_STEP_WORDS = st.lists(
    st.sampled_from(["dogs", "cats", "brown", "count", "size", "largest"]),
    min_size=1,
    max_size=4,
)


@st.composite
def _programs(draw: st.DrawFn) -> str:
    n = draw(st.integers(1, 5))
    parts = []
    for i in range(1, n + 1):
        # Lead with a per-step token so no two steps normalize identically.
        words = [f"s{i}"] + list(draw(_STEP_WORDS))
        if i > 1 and draw(st.booleans()):
            words.append(f"#{draw(st.integers(1, i - 1))}")
        parts.append(f"{i}#) return {' '.join(words)}")
    return " ".join(parts)


@given(_programs())
def test_reconstruction_is_stable(text: str) -> None:
    graph = parse_qdmr(text)
    rebuilt = " ".join(f"{i}#) return {s}" for i, s in enumerate(graph.steps, 1))
    again = parse_qdmr(rebuilt)
    assert again.steps == graph.steps
    assert again.edges == graph.edges


@given(_programs())
def test_edges_match_references(text: str) -> None:
    graph = parse_qdmr(text)
    for src, dst in graph.edges:
        assert 1 <= dst < src <= len(graph.steps)
        assert f"#{dst}" in graph.steps[src - 1]
