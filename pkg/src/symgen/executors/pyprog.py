"""Candidate-program execution through the external sandboxed runner.

Candidates arrive as code followed by top-level assertion lines (the
``assert f(args) == expected`` style).  We strip the assertions out,
keep the call expression from each one, and ship code plus calls to
the runner over its JSON stdin/stdout protocol.  Any two candidates
agree only when they carry the same calls and produce the same result
representations, so the call list is part of the payload.
"""

from __future__ import annotations

import ast
import json
import subprocess
from dataclasses import dataclass
from typing import Optional

from ..core import ExecOutcome, exec_fail, exec_ok

# Margin on top of the runner's own wall clock before we give up on it.
_HOST_GRACE_S = 5.0
_ERROR_MARK = "<error>"


@dataclass(frozen=True)
class RunnerConfig:
    command: tuple[str, ...] = ("pyrunner",)
    timeout_ms: int = 5000
    memory_limit_mb: int = 512


def split_candidate(text: str) -> tuple[str, list[str]]:
    """Separate code from zero-indent assertion lines, preserving order."""
    code_lines: list[str] = []
    assertions: list[str] = []
    for line in text.splitlines():
        if line.startswith("assert ") or line.strip() == "assert":
            assertions.append(line.strip())
        else:
            code_lines.append(line)
    return "\n".join(code_lines), assertions


def extract_call(assertion: str) -> str:
    """Call expression from one assertion; the left side of a top-level ==."""
    tree = ast.parse(assertion)
    if len(tree.body) != 1 or not isinstance(tree.body[0], ast.Assert):
        raise ValueError(f"not a single assertion: {assertion!r}")
    test = tree.body[0].test
    if (
        isinstance(test, ast.Compare)
        and len(test.ops) == 1
        and isinstance(test.ops[0], ast.Eq)
    ):
        return ast.unparse(test.left)
    return ast.unparse(test)


def run_request(
    request: dict, config: RunnerConfig
) -> tuple[Optional[dict], Optional[str]]:
    """One runner round trip; returns (result, error_reason)."""
    timeout_s = request.get("timeout_ms", config.timeout_ms) / 1000.0 + _HOST_GRACE_S
    try:
        proc = subprocess.run(
            list(config.command),
            input=json.dumps(request),
            capture_output=True,
            text=True,
            timeout=timeout_s,
        )
    except FileNotFoundError:
        return None, f"runner unavailable: {config.command[0]} not found"
    except subprocess.TimeoutExpired:
        return None, "runner unavailable: no response within grace period"
    if proc.returncode != 0:
        detail = proc.stdout.strip() or proc.stderr.strip()
        return None, f"runner unavailable: exit {proc.returncode}: {detail[:200]}"
    try:
        return json.loads(proc.stdout), None
    except json.JSONDecodeError:
        return None, "runner unavailable: bad result JSON"


def exec_python(candidate_text: str, config: RunnerConfig) -> ExecOutcome:
    code, assertions = split_candidate(candidate_text)
    if not assertions:
        return exec_fail("no assertions found")
    try:
        calls = [extract_call(a) for a in assertions]
    except (SyntaxError, ValueError) as err:
        return exec_fail(f"bad assertion: {err}")

    request = {
        "code": code,
        "calls": calls,
        "assertions": [],
        "timeout_ms": config.timeout_ms,
        "memory_limit_mb": config.memory_limit_mb,
    }
    result, error = run_request(request, config)
    if result is None:
        return exec_fail(error)
    status = result.get("status")
    if status != "ok":
        return exec_fail(f"runner status: {status}")
    results = [
        entry["repr"] if entry.get("ok") else _ERROR_MARK
        for entry in result.get("per_call", [])
    ]
    return exec_ok({"calls": calls, "results": results})
