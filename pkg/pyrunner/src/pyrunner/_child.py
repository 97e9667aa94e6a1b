"""Sandbox child: confine, compile, evaluate, report once.

Runs as its own process so resource limits and the working-directory jail
die with it. The result JSON goes to the saved real stdout; everything the
candidate prints is swallowed by /dev/null.
"""

from __future__ import annotations

import json
import os
import shutil
import signal
import sys
import tempfile
import time


class _TimedOut(BaseException):
    # BaseException so a candidate's bare `except Exception` cannot eat it.
    pass


def _alarm(_signo: int, _frame: object) -> None:
    raise _TimedOut


def _block_network() -> None:
    import socket

    def blocked(*_args: object, **_kwargs: object) -> None:
        raise OSError("network access is disabled")

    socket.socket = blocked  # type: ignore[misc,assignment]
    socket.create_connection = blocked  # type: ignore[assignment]
    socket.socketpair = blocked  # type: ignore[assignment]


def _confine(memory_limit_mb: int) -> str:
    workdir = tempfile.mkdtemp(prefix="pyrunner-")
    os.chdir(workdir)
    try:
        import resource

        limit = memory_limit_mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    except (ImportError, ValueError, OSError):
        pass  # no rlimit support; timeout and temp dir still hold
    _block_network()
    return workdir


def _evaluate(request: dict) -> tuple[str, list[dict]]:
    try:
        program = compile(request["code"], "<candidate>", "exec")
    except (SyntaxError, ValueError):
        return "compile_error", []
    namespace: dict = {}
    try:
        exec(program, namespace)
    except _TimedOut:
        raise
    except BaseException:
        return "crashed", []

    mode = "calls" if request["calls"] else "assertions"
    per_call: list[dict] = []
    for item in request[mode]:
        try:
            if mode == "calls":
                value = eval(compile(item, "<call>", "eval"), namespace)
                per_call.append({"ok": True, "repr": repr(value)})
            else:
                exec(compile(item, "<assertion>", "exec"), namespace)
                per_call.append({"ok": True, "repr": "True"})
        except _TimedOut:
            raise
        except BaseException as err:
            per_call.append({"ok": False, "error": f"{type(err).__name__}: {err}"})
    return "ok", per_call


def main() -> int:
    request = json.loads(sys.stdin.read())

    # Candidate output must not reach the protocol stream.
    real_stdout = os.dup(1)
    devnull = os.open(os.devnull, os.O_WRONLY)
    os.dup2(devnull, 1)
    os.dup2(devnull, 2)

    workdir = _confine(int(request["memory_limit_mb"]))
    signal.signal(signal.SIGALRM, _alarm)
    signal.setitimer(signal.ITIMER_REAL, request["timeout_ms"] / 1000.0)

    started = time.monotonic()
    per_call: list[dict] = []
    try:
        status, per_call = _evaluate(request)
    except _TimedOut:
        status = "timeout"
    signal.setitimer(signal.ITIMER_REAL, 0.0)
    elapsed_ms = int((time.monotonic() - started) * 1000)

    os.chdir("/")
    shutil.rmtree(workdir, ignore_errors=True)
    payload = {"status": status, "per_call": per_call, "elapsed_ms": elapsed_ms}
    os.write(real_stdout, (json.dumps(payload) + "\n").encode("utf-8"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
