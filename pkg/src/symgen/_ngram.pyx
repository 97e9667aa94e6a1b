# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled n-gram match counting; twin of the pure Python kernel.

Grams are packed into 64-bit keys base ``vocab``, so callers must keep
vocab small enough that vocab**max_n fits in a signed 64-bit integer.
The Python wrapper falls back to the pure kernel beyond that bound.
"""

from libcpp.unordered_map cimport unordered_map


def ngram_stats(hyp_ids, ref_ids, long long vocab, int max_n=4):
    cdef long long[::1] hyp = hyp_ids
    cdef long long[::1] ref = ref_ids
    cdef Py_ssize_t hlen = hyp.shape[0]
    cdef Py_ssize_t rlen = ref.shape[0]
    cdef long long base = vocab if vocab > 1 else 2
    cdef unordered_map[long long, long long] ref_counts
    cdef long long key, num
    cdef Py_ssize_t den, i, j
    cdef int n
    out = []
    for n in range(1, max_n + 1):
        den = hlen - n + 1
        if den <= 0:
            out.append((0, 0))
            continue
        ref_counts.clear()
        for i in range(rlen - n + 1):
            key = 0
            for j in range(n):
                key = key * base + ref[i + j]
            ref_counts[key] += 1
        num = 0
        for i in range(den):
            key = 0
            for j in range(n):
                key = key * base + hyp[i + j]
            if ref_counts[key] > 0:
                num += 1
                ref_counts[key] -= 1
        out.append((num, int(den)))
    return out
