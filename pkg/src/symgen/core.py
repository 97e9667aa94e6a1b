"""Domain types and JSONL persistence for the generation pipeline.

Every record that crosses a process boundary lives here: questions,
answer candidates, execution outcomes and verified pairs, plus the
generation parameter block they all reference.  Serialization is
line-oriented JSON with a fixed field order per type so that repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence, Type, TypeVar, Union

_WS = re.compile(r"\s+")

# Sampling setup used across the pipeline.
ANSWER_TEMPERATURE = 0.8
ANSWER_SAMPLE_COUNT = 30
QUESTION_TEMPERATURES = (0.6, 0.8, 1.0)
DEFAULT_CONTEXT_BUDGET = 7000


class Task(str, enum.Enum):
    SQL = "sql"
    BASH = "bash"
    PYTHON = "python"
    TOP = "top"
    QDMR = "qdmr"
    EXTERNAL = "external"


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    type: str
    primary_key: bool = False
    foreign_key: Optional[tuple[str, str]] = None


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[ColumnSpec, ...]
    sample_rows: tuple[tuple, ...] = ()

    def __post_init__(self) -> None:
        if len(self.sample_rows) > 3:
            raise ValueError(f"table {self.name}: at most 3 sample rows")
        for row in self.sample_rows:
            if len(row) != len(self.columns):
                raise ValueError(f"table {self.name}: row width mismatch")


@dataclass(frozen=True)
class RelationalSchema:
    tables: tuple[TableSchema, ...]

    def __post_init__(self) -> None:
        columns = {t.name: {c.name for c in t.columns} for t in self.tables}
        for table in self.tables:
            for col in table.columns:
                if col.foreign_key is None:
                    continue
                ref_table, ref_col = col.foreign_key
                if ref_table not in columns or ref_col not in columns[ref_table]:
                    raise ValueError(
                        f"{table.name}.{col.name}: foreign key targets "
                        f"unknown column {ref_table}.{ref_col}"
                    )


@dataclass(frozen=True)
class Ontology:
    """Intent/slot label inventory; labels keep their IN:/SL: prefixes."""

    intents: Mapping[str, tuple[str, ...]]
    slots: Mapping[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        for label in self.intents:
            if not label or not label.startswith("IN:"):
                raise ValueError(f"bad intent label: {label!r}")
        for label in self.slots:
            if not label or not label.startswith("SL:"):
                raise ValueError(f"bad slot label: {label!r}")


@dataclass(frozen=True)
class TextBlock:
    text: str


SymbolicKnowledge = Union[RelationalSchema, Ontology, TextBlock]


def normalize_text(text: str) -> str:
    """Lowercase and collapse runs of whitespace; used for ids and dedup."""
    return _WS.sub(" ", text).strip().lower()


def canonical_json(value: Any) -> str:
    """Key-sorted, separator-pinned JSON; the digest basis for payloads."""
    return json.dumps(value, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def stable_digest(value: Any) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def question_id(task: Task, text: str) -> str:
    """Deterministic id from the task and normalized question text."""
    basis = f"{task.value}\x1f{normalize_text(text)}"
    return hashlib.sha256(basis.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ExecOutcome:
    """Result of running one candidate through a task executor.

    ``payload`` is the comparable execution result and stays in memory;
    only status, digest and failure reason are serialized.  Outcomes
    rehydrated from disk therefore carry ``payload=None``.
    """

    status: str
    payload: Any = None
    digest: Optional[str] = None
    fail_reason: Optional[str] = None

    def __post_init__(self) -> None:
        if self.status not in ("ok", "fail"):
            raise ValueError(f"bad exec status: {self.status!r}")
        if self.status == "fail" and not self.fail_reason:
            raise ValueError("failed outcome needs a reason")

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def exec_ok(payload: Any, digest_basis: Any = None) -> ExecOutcome:
    """Successful outcome; the digest covers ``digest_basis`` when the
    comparable form differs from the reported payload (e.g. row multisets)."""
    basis = payload if digest_basis is None else digest_basis
    return ExecOutcome("ok", payload=payload, digest=stable_digest(basis))


def exec_fail(reason: str) -> ExecOutcome:
    return ExecOutcome("fail", fail_reason=reason)


@dataclass(frozen=True)
class Question:
    id: str
    task: Task
    text: str
    source_prompt_id: str
    temperature: float
    sample_logprob: float

    def __post_init__(self) -> None:
        if not normalize_text(self.text):
            raise ValueError("question text is empty")

    @classmethod
    def create(
        cls,
        task: Task,
        text: str,
        source_prompt_id: str,
        temperature: float,
        sample_logprob: float,
    ) -> "Question":
        return cls(
            id=question_id(task, text),
            task=task,
            text=text,
            source_prompt_id=source_prompt_id,
            temperature=temperature,
            sample_logprob=sample_logprob,
        )


@dataclass(frozen=True)
class Candidate:
    question_id: str
    index: int
    text: str
    logprob: float
    exec: Optional[ExecOutcome] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.logprob):
            raise ValueError("candidate logprob must be finite")
        if self.index < 0:
            raise ValueError("candidate index must be non-negative")


@dataclass(frozen=True)
class VerifiedPair:
    """One question with its selected answer and agreement score.

    ``best_index`` refers into the question's candidate list; ``weights``
    holds the per-candidate agreement totals for surviving candidates.
    Both are process-local; the serialized record keeps the answer text.
    """

    question_id: str
    question_text: str
    best_index: Optional[int]
    answer_text: Optional[str]
    score: float
    kept: bool
    threshold: float
    weights: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if (self.best_index is None) != (self.answer_text is None):
            raise ValueError("best_index and answer_text must be set together")
        if self.best_index is None and self.kept:
            raise ValueError("pair without a surviving answer cannot be kept")
        if self.weights and self.best_index is not None:
            top = max(self.weights.values())
            if not math.isclose(self.score, top, rel_tol=0.0, abs_tol=1e-9):
                raise ValueError("score must equal the maximum candidate weight")


@dataclass(frozen=True)
class GenerationParams:
    temperature: float
    n_samples: int
    max_tokens: int = 512
    stop_sequences: tuple[str, ...] = ()
    context_budget_tokens: int = DEFAULT_CONTEXT_BUDGET

    def __post_init__(self) -> None:
        if not (0.0 < self.temperature <= 2.0):
            raise ValueError(f"temperature out of range: {self.temperature}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be at least 1")
        if self.context_budget_tokens < 1:
            raise ValueError("context budget must be positive")


Record = TypeVar("Record", Question, Candidate, VerifiedPair)


def to_record(obj: Union[Question, Candidate, VerifiedPair]) -> dict:
    """Fixed-order JSON mapping for one serializable type."""
    if isinstance(obj, Question):
        return {
            "id": obj.id,
            "task": obj.task.value,
            "text": obj.text,
            "source_prompt_id": obj.source_prompt_id,
            "temperature": obj.temperature,
            "sample_logprob": obj.sample_logprob,
        }
    if isinstance(obj, Candidate):
        out = obj.exec
        return {
            "question_id": obj.question_id,
            "index": obj.index,
            "text": obj.text,
            "logprob": obj.logprob,
            "exec_status": None if out is None else out.status,
            "exec_digest": None if out is None else out.digest,
            "fail_reason": None if out is None else out.fail_reason,
        }
    if isinstance(obj, VerifiedPair):
        return {
            "question_id": obj.question_id,
            "question_text": obj.question_text,
            "answer_text": obj.answer_text,
            "score": obj.score,
            "kept": obj.kept,
            "threshold": obj.threshold,
        }
    raise TypeError(f"not a serializable record: {type(obj).__name__}")


def from_record(cls: Type[Record], record: Mapping[str, Any]) -> Record:
    if cls is Question:
        return Question(
            id=record["id"],
            task=Task(record["task"]),
            text=record["text"],
            source_prompt_id=record["source_prompt_id"],
            temperature=record["temperature"],
            sample_logprob=record["sample_logprob"],
        )
    if cls is Candidate:
        status = record.get("exec_status")
        if status is None:
            outcome = None
        elif status == "ok":
            outcome = ExecOutcome("ok", digest=record.get("exec_digest"))
        else:
            outcome = ExecOutcome("fail", fail_reason=record.get("fail_reason"))
        return Candidate(
            question_id=record["question_id"],
            index=record["index"],
            text=record["text"],
            logprob=record["logprob"],
            exec=outcome,
        )
    if cls is VerifiedPair:
        answer = record["answer_text"]
        return VerifiedPair(
            question_id=record["question_id"],
            question_text=record["question_text"],
            best_index=None if answer is None else -1,
            answer_text=answer,
            score=record["score"],
            kept=record["kept"],
            threshold=record["threshold"],
        )
    raise TypeError(f"not a deserializable record type: {cls!r}")


def dumps_record(obj: Union[Question, Candidate, VerifiedPair]) -> str:
    return json.dumps(to_record(obj), ensure_ascii=False)


def write_jsonl(
    records: Iterable[Union[Question, Candidate, VerifiedPair]],
    path: Union[str, Path],
    append: bool = False,
) -> int:
    """Write records one JSON object per line; returns the count written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    first_type: Optional[type] = None
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for obj in records:
            if first_type is None:
                first_type = type(obj)
            elif type(obj) is not first_type:
                raise TypeError(
                    f"mixed record types: {first_type.__name__} then {type(obj).__name__}"
                )
            fh.write(dumps_record(obj))
            fh.write("\n")
            count += 1
    return count


def read_jsonl(path: Union[str, Path], cls: Type[Record]) -> list[Record]:
    out: list[Record] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise ValueError(f"{path}:{line_no}: bad JSON: {err}") from err
            out.append(from_record(cls, record))
    return out


def dedup_questions(questions: Sequence[Question]) -> list[Question]:
    """Drop later questions whose normalized text was already seen."""
    seen: set[str] = set()
    kept = []
    for q in questions:
        key = normalize_text(q.text)
        if key in seen:
            continue
        seen.add(key)
        kept.append(q)
    return kept


__all__ = [
    "ANSWER_SAMPLE_COUNT",
    "ANSWER_TEMPERATURE",
    "Candidate",
    "ColumnSpec",
    "DEFAULT_CONTEXT_BUDGET",
    "ExecOutcome",
    "GenerationParams",
    "Ontology",
    "QUESTION_TEMPERATURES",
    "Question",
    "RelationalSchema",
    "SymbolicKnowledge",
    "TableSchema",
    "Task",
    "TextBlock",
    "VerifiedPair",
    "canonical_json",
    "dedup_questions",
    "dumps_record",
    "exec_fail",
    "exec_ok",
    "from_record",
    "normalize_text",
    "question_id",
    "read_jsonl",
    "stable_digest",
    "to_record",
    "write_jsonl",
]
