"""Agreement-based answer verification.

Every candidate is weighted by how strongly its execution result
agrees with the other candidates' results (self included); the
heaviest candidate becomes the answer, log-likelihood then lowest
index breaking ties; pairs and questions are kept when their score
clears a threshold.  Candidates whose execution failed take no part
in scoring.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .core import Candidate, ExecOutcome, Question, VerifiedPair

__all__ = [
    "SimFn",
    "WeightMatrixRow",
    "build_pair",
    "filter_pairs",
    "filter_questions",
    "score_candidates",
    "select_best",
]

SimFn = Callable[[ExecOutcome, ExecOutcome], float]


@dataclass(frozen=True)
class WeightMatrixRow:
    """Per-question agreement weights, keyed by candidate position."""

    question_id: str
    weights: Mapping[int, float] = field(default_factory=dict)
    discarded: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if set(self.weights) & set(self.discarded):
            raise ValueError("a candidate cannot be both weighted and discarded")
        for position, weight in self.weights.items():
            if position < 0:
                raise ValueError(f"negative candidate position: {position}")
            if not math.isfinite(weight) or weight < 0.0:
                raise ValueError(f"bad weight at {position}: {weight!r}")

    @property
    def top_weight(self) -> float:
        return max(self.weights.values(), default=0.0)


def score_candidates(
    outcomes: Sequence[ExecOutcome],
    simfn: SimFn,
    question_id: str = "",
) -> WeightMatrixRow:
    """Weight each surviving candidate by summed similarity to all survivors.

    Similarity calls are memoized per digest pair, which is sound
    because equal digests imply equal payload bases; both shipped
    similarity functions depend on nothing else.  ``simfn(a, b)``
    treats ``a`` as the candidate being scored.
    """
    if not outcomes:
        raise ValueError("need at least one candidate outcome")
    surviving = [i for i, out in enumerate(outcomes) if out.status == "ok"]
    discarded = tuple(i for i, out in enumerate(outcomes) if out.status != "ok")

    clusters: dict[str, list[int]] = {}
    for i in surviving:
        digest = outcomes[i].digest
        assert digest is not None  # guaranteed for ok outcomes
        clusters.setdefault(digest, []).append(i)

    sim_cache: dict[tuple[str, str], float] = {}

    def sim(d_a: str, d_b: str) -> float:
        key = (d_a, d_b)
        if key not in sim_cache:
            rep_a = outcomes[clusters[d_a][0]]
            rep_b = outcomes[clusters[d_b][0]]
            sim_cache[key] = simfn(rep_a, rep_b)
        return sim_cache[key]

    weights: dict[int, float] = {}
    for digest, members in clusters.items():
        total = sum(len(other) * sim(digest, d) for d, other in clusters.items())
        for i in members:
            weights[i] = total
    return WeightMatrixRow(question_id=question_id, weights=weights, discarded=discarded)


def select_best(
    candidates: Sequence[Candidate], row: WeightMatrixRow
) -> Optional[tuple[int, float]]:
    """(position, weight) of the winning candidate, or None with no survivors."""
    if not row.weights:
        return None
    best = max(
        row.weights,
        key=lambda i: (row.weights[i], candidates[i].logprob, -i),
    )
    return best, row.weights[best]


def build_pair(
    question: Question,
    candidates: Sequence[Candidate],
    simfn: SimFn,
    threshold: float,
) -> tuple[VerifiedPair, WeightMatrixRow]:
    """Score one question's candidates and assemble its verified pair."""
    outcomes = []
    for candidate in candidates:
        if candidate.exec is None:
            raise ValueError(f"candidate {candidate.index} has no execution outcome")
        outcomes.append(candidate.exec)
    row = score_candidates(outcomes, simfn, question_id=question.id)
    choice = select_best(candidates, row)
    if choice is None:
        pair = VerifiedPair(
            question_id=question.id,
            question_text=question.text,
            best_index=None,
            answer_text=None,
            score=0.0,
            kept=False,
            threshold=threshold,
        )
    else:
        position, weight = choice
        pair = VerifiedPair(
            question_id=question.id,
            question_text=question.text,
            best_index=position,
            answer_text=candidates[position].text,
            score=weight,
            kept=weight >= threshold,
            threshold=threshold,
            weights=dict(row.weights),
        )
    return pair, row


def filter_pairs(pairs: Sequence[VerifiedPair], threshold: float) -> list[VerifiedPair]:
    """Re-stamp kept flags against a threshold; nothing is removed."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return [
        dataclasses.replace(
            pair,
            kept=pair.best_index is not None and pair.score >= threshold,
            threshold=threshold,
        )
        for pair in pairs
    ]


def filter_questions(
    questions: Sequence[Question],
    rows: Mapping[str, WeightMatrixRow],
    threshold: float,
) -> list[Question]:
    """Questions whose top agreement weight clears the threshold."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    kept = []
    for question in questions:
        row = rows.get(question.id)
        if row is None:
            raise KeyError(f"no scored row for question {question.id}")
        if row.weights and row.top_weight >= threshold:
            kept.append(question)
    return kept
