"""Intent/slot tree parsing, canonical serialization, and template extraction."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symgen.executors import (
    TopParseError,
    exec_top,
    parse_top,
    serialize_top,
    top_template,
)

# Serialized trees taken from hand-built parses; canonical form puts one
# space before every closing bracket.
ROUND_TRIPS = [
    "[IN:GET_ALARM ]",
    "[IN:GET_ALARM [SL:PERIOD every day ] ]",
    "[IN:GET_CONTACT [SL:CONTACT_RELATED my ] [SL:TYPE_RELATION uncle ] ]",
    "[IN:GET_WEATHER [SL:WEATHER_ATTRIBUTE plants ] [SL:DATE_TIME in tonight ] ]",
    "[IN:A [SL:B [IN:C [SL:D x y ] ] ] ]",
]


@pytest.mark.parametrize("text", ROUND_TRIPS)
def test_canonical_round_trip(text: str) -> None:
    assert serialize_top(parse_top(text)) == text


def test_whitespace_insensitive() -> None:
    variants = [
        "[IN:GET_ALARM [SL:PERIOD every day ] ]",
        "[IN:GET_ALARM [SL:PERIOD every day] ]",
        "[IN:GET_ALARM[SL:PERIOD every day]]",
        "  [IN:GET_ALARM   [SL:PERIOD   every   day ]   ] ",
    ]
    canon = {serialize_top(parse_top(v)) for v in variants}
    assert canon == {"[IN:GET_ALARM [SL:PERIOD every day ] ]"}


def test_template_strips_slot_text() -> None:
    tree = parse_top("[IN:GET_WEATHER [SL:ATTRIBUTE plants ] [SL:DATE_TIME in tonight ] ]")
    assert top_template(tree) == "[IN:GET_WEATHER [SL:ATTRIBUTE ] [SL:DATE_TIME ] ]"


def test_template_keeps_nested_structure() -> None:
    tree = parse_top("[IN:A [SL:B [IN:C [SL:D x ] ] ] ]")
    assert top_template(tree) == "[IN:A [SL:B [IN:C [SL:D ] ] ] ]"


@pytest.mark.parametrize(
    "text",
    [
        "",
        "plain words",
        "[IN:GET_ALARM",               # unclosed
        "[IN:GET_ALARM ] ]",           # extra close
        "[SL:PERIOD every day ]",      # slot at root
        "[IN:GET_ALARM stray ]",       # bare token directly under intent
        "[IN:GET_ALARM [IN:OTHER ] ]", # intent directly under intent
        "[IN:lower ]",                 # label case
        "[XX:GET_ALARM ]",             # unknown prefix
        "[IN:GET_ALARM ] trailing",
    ],
)
def test_malformed_trees_rejected(text: str) -> None:
    with pytest.raises(TopParseError):
        parse_top(text)


def test_exec_outcome_digest_ignores_spacing() -> None:
    a = exec_top("[IN:GET_ALARM [SL:PERIOD every day ] ]")
    b = exec_top("[IN:GET_ALARM[SL:PERIOD every   day]]")
    assert a.status == b.status == "ok"
    assert a.digest == b.digest


def test_exec_failure_reports_reason() -> None:
    out = exec_top("[IN:GET_ALARM")
    assert out.status == "fail"
    assert out.fail_reason is not None


_LABEL = st.from_regex(r"[A-Z][A-Z0-9_]{0,8}", fullmatch=True)
_WORD = st.from_regex(r"[a-z][a-z0-9]{0,6}", fullmatch=True)


@st.composite
def _trees(draw: st.DrawFn, depth: int = 0) -> str:
    intent = draw(_LABEL)
    n_slots = draw(st.integers(0, 2 if depth < 2 else 1))
    slots = []
    for _ in range(n_slots):
        label = draw(_LABEL)
        if depth < 2 and draw(st.booleans()):
            body = draw(_trees(depth + 1))  # type: ignore[call-arg]
        else:
            body = " ".join(draw(st.lists(_WORD, min_size=1, max_size=3)))
        slots.append(f"[SL:{label} {body} ]")
    inner = " ".join(slots)
    return f"[IN:{intent} {inner} ]" if inner else f"[IN:{intent} ]"


@given(_trees())
def test_serialization_is_idempotent(text: str) -> None:
    once = serialize_top(parse_top(text))
    assert serialize_top(parse_top(once)) == once
