"""Generic external-command execution slot.

Ships unconfigured: point ``command_template`` at an interpreter for
the task's symbolic language and candidates are judged on its stdout.
A ``{input}`` placeholder receives the candidate text as an argument;
without one the text arrives on stdin.  No shell is involved.
"""

from __future__ import annotations

import shlex
import subprocess

from ..core import ExecOutcome, exec_fail, exec_ok


def exec_external(
    text: str, command_template: str, timeout_s: float = 10.0
) -> ExecOutcome:
    if not command_template.strip():
        return exec_fail("external command not configured")
    try:
        argv = shlex.split(command_template)
    except ValueError as err:
        return exec_fail(f"bad command template: {err}")
    use_stdin = not any("{input}" in arg for arg in argv)
    argv = [arg.replace("{input}", text) for arg in argv]
    try:
        proc = subprocess.run(
            argv,
            input=text if use_stdin else "",
            capture_output=True,
            text=True,
            timeout=timeout_s,
        )
    except FileNotFoundError:
        return exec_fail(f"command not found: {argv[0]}")
    except subprocess.TimeoutExpired:
        return exec_fail(f"timeout after {timeout_s}s")
    if proc.returncode != 0:
        return exec_fail(f"exit {proc.returncode}: {proc.stderr.strip()[:200]}")
    return exec_ok(proc.stdout.strip())
