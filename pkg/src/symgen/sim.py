"""Similarity functions used for candidate agreement and evaluation.

Exact match compares execution digests.  BLEU-4 here is sentence level
with uniform weights over the n-gram orders the hypothesis actually
has, add-one smoothing on zero precisions, and the standard brevity
penalty; an empty hypothesis scores 0.  The n-gram counting kernel is
compiled when the extension built, with a pure Python twin otherwise
(force the twin with SYMGEN_NGRAM=pure).
"""

from __future__ import annotations

import math
import os
from array import array
from typing import Sequence

from .core import ExecOutcome

from . import _ngram_py

if os.environ.get("SYMGEN_NGRAM") == "pure":
    _compiled = None
else:
    try:
        from . import _ngram as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

KERNEL_BACKEND = "compiled" if _compiled is not None else "pure"

# Packed 64-bit gram keys limit the compiled kernel's vocabulary.
_MAX_PACKED_VOCAB = 50000
_MAX_ORDER = 4


def _to_ids(a: Sequence[str], b: Sequence[str]) -> tuple[list[int], list[int], int]:
    ids: dict[str, int] = {}
    a_ids = [ids.setdefault(tok, len(ids)) for tok in a]
    b_ids = [ids.setdefault(tok, len(ids)) for tok in b]
    return a_ids, b_ids, len(ids)


def _stats(hyp: Sequence[str], ref: Sequence[str]) -> list[tuple[int, int]]:
    hyp_ids, ref_ids, vocab = _to_ids(hyp, ref)
    if _compiled is not None and vocab <= _MAX_PACKED_VOCAB:
        return _compiled.ngram_stats(
            array("q", hyp_ids), array("q", ref_ids), vocab, _MAX_ORDER
        )
    return _ngram_py.ngram_stats(hyp_ids, ref_ids, vocab, _MAX_ORDER)


def _bleu_from_stats(
    stats: Sequence[tuple[int, int]], hyp_len: int, ref_len: int
) -> float:
    if hyp_len == 0:
        return 0.0
    log_sum = 0.0
    orders = 0
    for num, den in stats:
        if den == 0:
            continue
        p = num / den if num > 0 else 1.0 / (den + 1)
        log_sum += math.log(p)
        orders += 1
    if orders == 0:
        return 0.0
    mean = math.exp(log_sum / orders)
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * mean


def sentence_bleu4(hyp_tokens: Sequence[str], ref_tokens: Sequence[str]) -> float:
    return _bleu_from_stats(
        _stats(hyp_tokens, ref_tokens), len(hyp_tokens), len(ref_tokens)
    )


def sim_em(a: ExecOutcome, b: ExecOutcome) -> float:
    """1.0 iff both outcomes succeeded with equal digests."""
    if not (a.ok and b.ok):
        raise ValueError("sim_em needs two successful outcomes")
    return 1.0 if a.digest == b.digest else 0.0


def sim_token_bleu4(a: Sequence[str], b: Sequence[str]) -> float:
    """Sentence BLEU-4 over token lists; the first argument is the hypothesis."""
    return sentence_bleu4(list(a), list(b))


def char_bleu4(hyp: str, ref: str) -> float:
    """Sentence BLEU-4 over character sequences."""
    return sentence_bleu4(list(hyp), list(ref))


def sim_bleu_outcomes(a: ExecOutcome, b: ExecOutcome) -> float:
    """Token BLEU-4 over executor payloads (token lists)."""
    if not (a.ok and b.ok):
        raise ValueError("similarity needs two successful outcomes")
    return sim_token_bleu4(a.payload, b.payload)


__all__ = [
    "KERNEL_BACKEND",
    "char_bleu4",
    "sentence_bleu4",
    "sim_bleu_outcomes",
    "sim_em",
    "sim_token_bleu4",
]
