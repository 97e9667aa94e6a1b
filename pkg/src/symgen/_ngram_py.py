"""Pure Python n-gram match counting; twin of the compiled kernel.

Both kernels return, for each order n in 1..max_n, the clipped match
count against the reference and the number of hypothesis n-grams.
Orders longer than the hypothesis report (0, 0).
"""

from collections import Counter
from typing import Sequence


def ngram_stats(
    hyp: Sequence[int], ref: Sequence[int], vocab: int, max_n: int = 4
) -> list[tuple[int, int]]:
    # vocab is unused here; the compiled kernel needs it to pack grams.
    out: list[tuple[int, int]] = []
    hyp = list(hyp)
    ref = list(ref)
    for n in range(1, max_n + 1):
        den = len(hyp) - n + 1
        if den <= 0:
            out.append((0, 0))
            continue
        ref_counts = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
        num = 0
        for i in range(den):
            gram = tuple(hyp[i : i + n])
            if ref_counts[gram] > 0:
                num += 1
                ref_counts[gram] -= 1
        out.append((num, den))
    return out
