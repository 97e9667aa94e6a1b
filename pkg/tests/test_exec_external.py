"""External-command executor: substitution, stdin mode, failure taxonomy."""

from __future__ import annotations

from symgen.executors import exec_external


def test_placeholder_substitution() -> None:
    out = exec_external("hello world", "echo {input}")
    assert out.status == "ok"
    assert out.payload == "hello world"


def test_placeholder_is_single_argument() -> None:
    # The candidate text must stay one argv entry, not be re-split.
    out = exec_external("a  b", "printf %s {input}")
    assert out.status == "ok"
    assert out.payload == "a  b"


def test_stdin_mode_without_placeholder() -> None:
    out = exec_external("line one\nline two", "cat")
    assert out.status == "ok"
    assert out.payload == "line one\nline two"


def test_digest_tracks_stdout() -> None:
    a = exec_external("same", "echo {input}")
    b = exec_external("same", "cat")
    assert a.digest == b.digest
    c = exec_external("other", "cat")
    assert a.digest != c.digest


def test_empty_template_fails() -> None:
    out = exec_external("x", "")
    assert out.status == "fail"
    assert "not configured" in (out.fail_reason or "")


def test_nonzero_exit_fails() -> None:
    out = exec_external("x", "false")
    assert out.status == "fail"


def test_missing_command_fails() -> None:
    out = exec_external("x", "no-such-binary-here")
    assert out.status == "fail"


def test_timeout_fails() -> None:
    out = exec_external("x", "sleep 2", timeout_s=0.2)
    assert out.status == "fail"
    assert "timeout" in (out.fail_reason or "")
