#!/usr/bin/env python3
"""Time the two n-gram counting kernels behind sentence BLEU.

The agreement step scores every ordered candidate pair, so one verified
question costs up to n*(n-1) BLEU calls for token-valued tasks. This
script times the compiled kernel against its pure twin on workloads with
that shape and prints the per-pair costs.

Usage: python benchmarks/bench_bleu.py [--pairs 2000] [--seed 7]
"""

from __future__ import annotations

import argparse
import random
import time
from array import array

from symgen import _ngram_py, sim

_WORDS = (
    "find . -type f -name ls -la grep -r xargs sort uniq -c wc -l awk sed "
    "cat head tail cut -d / tmp var log txt csv print echo du -h df"
).split()


def token_pairs(count: int, rng: random.Random) -> list[tuple[list[str], list[str]]]:
    pairs = []
    for _ in range(count):
        base = [rng.choice(_WORDS) for _ in range(rng.randint(5, 20))]
        edited = list(base)
        for _ in range(rng.randint(0, 3)):
            edited[rng.randrange(len(edited))] = rng.choice(_WORDS)
        pairs.append((edited, base))
    return pairs


def char_pairs(count: int, rng: random.Random) -> list[tuple[list[str], list[str]]]:
    pairs = []
    for _ in range(count):
        base = " ".join(rng.choice(_WORDS) for _ in range(rng.randint(6, 18)))
        cut = rng.randrange(len(base))
        edited = base[:cut] + rng.choice("abcdefgh") + base[cut + 1 :]
        pairs.append((list(edited), list(base)))
    return pairs


def _as_ids(pairs: list[tuple[list[str], list[str]]]) -> list[tuple[list[int], list[int], int]]:
    return [sim._to_ids(hyp, ref) for hyp, ref in pairs]


def bench_pure(ids: list[tuple[list[int], list[int], int]], repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        for hyp, ref, vocab in ids:
            _ngram_py.ngram_stats(hyp, ref, vocab, 4)
        best = min(best, time.perf_counter() - started)
    return best


def bench_compiled(ids: list[tuple[list[int], list[int], int]], repeats: int) -> float:
    compiled = sim._compiled
    assert compiled is not None
    packed = [(array("q", hyp), array("q", ref), vocab) for hyp, ref, vocab in ids]
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        for hyp, ref, vocab in packed:
            compiled.ngram_stats(hyp, ref, vocab, 4)
        best = min(best, time.perf_counter() - started)
    return best


def bench_end_to_end(pairs: list[tuple[list[str], list[str]]], repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        for hyp, ref in pairs:
            sim.sentence_bleu4(hyp, ref)
        best = min(best, time.perf_counter() - started)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    workloads = {
        "bash tokens": token_pairs(args.pairs, rng),
        "characters": char_pairs(args.pairs, rng),
    }

    print(f"n-gram kernel benchmark: {args.pairs} pairs per workload, "
          f"best of {args.repeats}, active backend: {sim.KERNEL_BACKEND}")
    header = f"{'workload':<14} {'pure':>10} {'compiled':>10} {'speedup':>8}  per-pair"
    print(header)
    print("-" * len(header))
    for name, pairs in workloads.items():
        ids = _as_ids(pairs)
        pure_s = bench_pure(ids, args.repeats)
        if sim._compiled is not None:
            compiled_s = bench_compiled(ids, args.repeats)
            speedup = f"{pure_s / compiled_s:7.1f}x"
            per_pair = f"{compiled_s / len(pairs) * 1e6:8.1f}us"
            compiled_col = f"{compiled_s:9.3f}s"
        else:
            speedup = "      --"
            per_pair = f"{pure_s / len(pairs) * 1e6:8.1f}us"
            compiled_col = f"{'n/a':>10}"
        print(f"{name:<14} {pure_s:9.3f}s {compiled_col} {speedup}  {per_pair}")

    sample = workloads["characters"][: max(1, args.pairs // 4)]
    full = bench_end_to_end(sample, args.repeats)
    print(f"\nsentence_bleu4 end to end ({sim.KERNEL_BACKEND}): "
          f"{full / len(sample) * 1e6:.1f}us per pair over {len(sample)} char pairs")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
