"""Shell tokenizer behavior, pinned against hand-checked token streams."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symgen.executors import exec_bash, tokenize_command

GOLDEN = [
    ("find . -maxdepth 1 -empty", ["find", ".", "-maxdepth", "1", "-empty"]),
    ('echo "a b"', ["echo", "a b"]),
    (
        "find . -name '*.tmp' | xargs rm",
        ["find", ".", "-name", "*.tmp", "|", "xargs", "rm"],
    ),
    ("tar --exclude=.git -cf a.tar .", ["tar", "--exclude=.git", "-cf", "a.tar", "."]),
    ("sort x > y && cat y", ["sort", "x", ">", "y", "&&", "cat", "y"]),
    ("rm -fr {} \\;", ["rm", "-fr", "{}", ";"]),
    ("a|b", ["a", "|", "b"]),
    ("(ls)", ["(", "ls", ")"]),
]


@pytest.mark.parametrize("text,tokens", GOLDEN)
def test_golden_token_streams(text: str, tokens: list[str]) -> None:
    assert tokenize_command(text) == tokens


def test_quoted_span_is_one_token() -> None:
    toks = tokenize_command('ssh -o ControlPath="$SOCK" "$HOST"')
    assert toks == ["ssh", "-o", "ControlPath=$SOCK", "$HOST"]


def test_unclosed_quote_fails() -> None:
    with pytest.raises(ValueError):
        tokenize_command('echo "unclosed')
    out = exec_bash('echo "unclosed')
    assert out.status == "fail"
    assert "tokenize" in (out.fail_reason or "")


def test_unbalanced_parens_fail() -> None:
    assert exec_bash("echo (").status == "fail"
    assert exec_bash("echo )").status == "fail"
    assert exec_bash("(ls)").status == "ok"


def test_empty_command_fails() -> None:
    for text in ("", "   ", "\n"):
        out = exec_bash(text)
        assert out.status == "fail"
        assert out.fail_reason == "empty command"


def test_spacing_does_not_change_digest() -> None:
    a = exec_bash("ls  -a   /tmp")
    b = exec_bash("ls -a /tmp")
    assert a.status == b.status == "ok"
    assert a.digest == b.digest


def test_distinct_commands_distinct_digests() -> None:
    a = exec_bash("ls -a")
    b = exec_bash("ls -la")
    assert a.digest != b.digest


@given(st.lists(st.sampled_from(["ls", "-a", "/tmp", "x.txt", "grep", "foo"]), min_size=1, max_size=8))
def test_plain_words_round_trip(words: list[str]) -> None:
    # Unquoted plain words come back exactly as written.
    assert tokenize_command(" ".join(words)) == words


def test_ok_payload_is_token_list() -> None:
    out = exec_bash("du -sh *")
    assert out.status == "ok"
    assert out.payload == ["du", "-sh", "*"]
    assert out.digest is not None and out.fail_reason is None
