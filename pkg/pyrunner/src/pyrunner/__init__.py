"""One-shot sandboxed execution of a candidate Python program.

The process reads a single JSON request from stdin:

    {"code": "...", "calls": ["f(1)"], "assertions": [],
     "timeout_ms": 5000, "memory_limit_mb": 512}

Exactly one of ``calls``/``assertions`` must be non-empty. The program is
compiled and run in a child process confined to a fresh temp directory,
with an address-space cap and wall-clock limit; each call or assertion is
then evaluated in order, and one result JSON is written to stdout:

    {"status": "ok", "per_call": [{"ok": true, "repr": "5"}], "elapsed_ms": 12}

``status`` is one of ok, compile_error, timeout, crashed. A failing call
reports {"ok": false, "error": "..."} without stopping the batch. Exit
code 0 means the protocol ran (whatever the candidate did); 2 means the
request itself was malformed.
"""

__version__ = "0.1.0"
