"""Request validation and child supervision."""

from __future__ import annotations

import json
import subprocess
import sys
import time
from typing import Optional, Sequence

# Backstop margin for loops the child's own timer cannot interrupt; kept
# under the protocol's 500ms grace so reported elapsed stays inside it.
_KILL_MARGIN_S = 0.4


class BadRequest(ValueError):
    pass


def parse_request(raw: str) -> dict:
    try:
        request = json.loads(raw)
    except json.JSONDecodeError as err:
        raise BadRequest(f"not valid JSON: {err}")
    if not isinstance(request, dict):
        raise BadRequest("request must be a JSON object")
    code = request.get("code")
    if not isinstance(code, str) or not code.strip():
        raise BadRequest("code must be a non-empty string")
    calls = request.get("calls", [])
    assertions = request.get("assertions", [])
    for name, items in (("calls", calls), ("assertions", assertions)):
        if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
            raise BadRequest(f"{name} must be a list of strings")
    if bool(calls) == bool(assertions):
        raise BadRequest("exactly one of calls/assertions must be non-empty")
    timeout_ms = request.get("timeout_ms")
    if not isinstance(timeout_ms, int) or timeout_ms < 100:
        raise BadRequest("timeout_ms must be an integer of at least 100")
    memory_limit_mb = request.get("memory_limit_mb")
    if not isinstance(memory_limit_mb, int) or memory_limit_mb < 1:
        raise BadRequest("memory_limit_mb must be a positive integer")
    return {
        "code": code,
        "calls": calls,
        "assertions": assertions,
        "timeout_ms": timeout_ms,
        "memory_limit_mb": memory_limit_mb,
    }


def run_child(request: dict) -> dict:
    """Run the sandbox child; always returns a well-formed result."""
    import os

    env = dict(os.environ)
    env["PYTHONHASHSEED"] = "0"  # identical requests must give identical reprs
    started = time.monotonic()
    deadline_s = request["timeout_ms"] / 1000.0 + _KILL_MARGIN_S
    try:
        proc = subprocess.run(
            [sys.executable, "-m", "pyrunner._child"],
            input=json.dumps(request),
            capture_output=True,
            text=True,
            timeout=deadline_s,
            env=env,
        )
    except subprocess.TimeoutExpired:
        elapsed_ms = int((time.monotonic() - started) * 1000)
        return {"status": "timeout", "per_call": [], "elapsed_ms": elapsed_ms}
    elapsed_ms = int((time.monotonic() - started) * 1000)
    for line in proc.stdout.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            result = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(result, dict) and "status" in result:
            result.setdefault("elapsed_ms", elapsed_ms)
            return result
    # Child died without reporting (hard OOM, signal): still a valid outcome.
    return {"status": "crashed", "per_call": [], "elapsed_ms": elapsed_ms}


def main(argv: Optional[Sequence[str]] = None) -> int:
    raw = sys.stdin.read()
    try:
        request = parse_request(raw)
    except BadRequest as err:
        print(json.dumps({"error": str(err)}))
        return 2
    print(json.dumps(run_child(request)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
