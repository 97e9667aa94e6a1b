"""Shell command tokenizer used as the execution step for bash tasks.

Commands are not run; agreement is judged on the token stream.  Quotes
are stripped with quoted spans kept as single tokens, operator
characters become their own tokens, and words like --max-depth=1 stay
whole.  Unbalanced quoting or parentheses fail the candidate.
"""

from __future__ import annotations

import shlex

from ..core import ExecOutcome, exec_fail, exec_ok

_PAREN_OPEN = "("
_PAREN_CLOSE = ")"


def tokenize_command(text: str) -> list[str]:
    """Token list for one shell command; raises ValueError when unparseable."""
    lex = shlex.shlex(text, posix=True, punctuation_chars=True)
    lex.whitespace_split = True
    lex.commenters = ""
    tokens = list(lex)
    opens = sum(tok.count(_PAREN_OPEN) for tok in tokens)
    closes = sum(tok.count(_PAREN_CLOSE) for tok in tokens)
    if opens != closes:
        raise ValueError("unbalanced parentheses")
    return tokens


def exec_bash(text: str) -> ExecOutcome:
    try:
        tokens = tokenize_command(text)
    except ValueError as err:
        return exec_fail(f"tokenize: {err}")
    if not tokens:
        return exec_fail("empty command")
    return exec_ok(tokens)
