from __future__ import annotations

import os
import shutil

import pytest


def runner_command() -> list[str] | None:
    """Locate the sandboxed Python runner, if installed."""
    override = os.environ.get("SYMGEN_PYRUNNER")
    if override:
        return override.split()
    path = shutil.which("pyrunner")
    if path:
        return [path]
    return None


requires_runner = pytest.mark.skipif(
    runner_command() is None,
    reason="python-task executor needs the external 'pyrunner' tool on PATH",
)
