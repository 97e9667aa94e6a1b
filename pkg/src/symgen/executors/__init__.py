"""Per-task execution adapters producing comparable outcomes."""

from .bashtok import exec_bash, tokenize_command
from .external import exec_external
from .pyprog import RunnerConfig, exec_python, extract_call, run_request, split_candidate
from .qdmr import QdmrGraph, QdmrParseError, exec_qdmr, parse_qdmr
from .sqlrun import create_fixture, exec_sql, is_ordered
from .toptree import (
    TopParseError,
    TopSlot,
    TopTree,
    exec_top,
    parse_top,
    serialize_top,
    top_template,
)

__all__ = [
    "QdmrGraph",
    "QdmrParseError",
    "RunnerConfig",
    "TopParseError",
    "TopSlot",
    "TopTree",
    "create_fixture",
    "exec_bash",
    "exec_external",
    "exec_python",
    "exec_qdmr",
    "exec_sql",
    "exec_top",
    "extract_call",
    "is_ordered",
    "parse_qdmr",
    "parse_top",
    "run_request",
    "serialize_top",
    "split_candidate",
    "tokenize_command",
    "top_template",
]
