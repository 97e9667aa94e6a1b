"""Command-line pipeline: generate questions, sample answers, verify, report.

Configuration is a JSON file; flags override file values. Schema, with
defaults:

    {
      "task": "sql",                      // sql | bash | python | top | qdmr | external
      "seed": 42,
      "workers": 1,
      "workdir": "runs",                  // default location for pipeline files
      "backend": {
        "kind": "mock",                   // mock | http
        "endpoint": "http://localhost:8000/v1/completions",
        "model": "local-completions",
        "rpm": 60,
        "timeout_s": 60.0
      },
      "question": {
        "prompt_count": 200,
        "shots": 10,
        "temperatures": [0.6, 0.8, 1.0],
        "samples_per_prompt": 100,
        "max_questions": 60000,
        "per_database_quota": 200,
        "instruction": null,              // null = task default wording
        "context_budget_tokens": 7000
      },
      "answer": {
        "temperature": 0.8,
        "samples": 30,
        "shots": 10,
        "max_tokens": 512,
        "retrieval": false,               // lexical retrieval instead of random demos
        "instruction": null,
        "context_budget_tokens": 7000
      },
      "thresholds": {"answer": 0.0, "question": 0.0},
      "databases": [                      // relational tasks only
        {"name": "college", "fixture": "college.sqlite", "schema": {...inline...}}
      ],
      "knowledge": null,                  // {"kind": "ontology"|"text", ...} for other tasks
      "demos": {"questions": [...], "pairs": [["input", "output"], ...]},
      "runner": {"command": ["pyrunner"], "timeout_ms": 5000, "memory_limit_mb": 512},
      "external": {"command_template": "", "timeout_s": 10.0}
    }

A database entry's inline "schema" lists tables, columns, and up to three
sample rows; when the fixture file is missing it is materialized from the
schema, so the sample rows double as the toy database contents.

Exit codes: 0 success, 1 scoring/backend error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterator, Mapping, Optional, Sequence

from .core import (
    ANSWER_SAMPLE_COUNT,
    ANSWER_TEMPERATURE,
    Candidate,
    ColumnSpec,
    DEFAULT_CONTEXT_BUDGET,
    ExecOutcome,
    GenerationParams,
    Ontology,
    QUESTION_TEMPERATURES,
    Question,
    RelationalSchema,
    SymbolicKnowledge,
    TableSchema,
    Task,
    TextBlock,
    VerifiedPair,
    canonical_json,
    dedup_questions,
    normalize_text,
    read_jsonl,
    write_jsonl,
)
from .evalstats import (
    EvalError,
    build_report,
    emit_training_manifest,
    eval_char_bleu,
    eval_exact_set_match_sql,
    eval_execution_sql,
    eval_python_pass,
    eval_surface_em,
    eval_template_accuracy,
    format_report,
    report_json,
)
from .executors import (
    RunnerConfig,
    create_fixture,
    exec_bash,
    exec_external,
    exec_python,
    exec_qdmr,
    exec_sql,
    exec_top,
)
from .genclient import (
    AuthenticationError,
    CompletionRequest,
    GenerationError,
    build_backend,
)
from .prompt import (
    Demonstration,
    PromptBudgetError,
    TASK_FORMATS,
    assemble_answer_prompt,
    assemble_question_prompt,
    retrieve_demonstrations,
)
from .sim import sim_bleu_outcomes, sim_em
from .verify import SimFn, WeightMatrixRow, build_pair, filter_questions


class ConfigError(ValueError):
    """Configuration problem; maps to exit code 2."""


# --- configuration -----------------------------------------------------------


def default_config() -> dict:
    return {
        "task": "sql",
        "seed": 42,
        "workers": 1,
        "workdir": "runs",
        "backend": {
            "kind": "mock",
            "endpoint": "http://localhost:8000/v1/completions",
            "model": "local-completions",
            "rpm": 60,
            "timeout_s": 60.0,
        },
        "question": {
            "prompt_count": 200,
            "shots": 10,
            "temperatures": list(QUESTION_TEMPERATURES),
            "samples_per_prompt": 100,
            "max_questions": 60000,
            "per_database_quota": 200,
            "instruction": None,
            "context_budget_tokens": DEFAULT_CONTEXT_BUDGET,
        },
        "answer": {
            "temperature": ANSWER_TEMPERATURE,
            "samples": ANSWER_SAMPLE_COUNT,
            "shots": 10,
            "max_tokens": 512,
            "retrieval": False,
            "instruction": None,
            "context_budget_tokens": DEFAULT_CONTEXT_BUDGET,
        },
        "thresholds": {"answer": 0.0, "question": 0.0},
        "databases": [],
        "knowledge": None,
        "demos": {"questions": [], "pairs": []},
        "runner": {"command": ["pyrunner"], "timeout_ms": 5000, "memory_limit_mb": 512},
        "external": {"command_template": "", "timeout_s": 10.0},
    }


_DEMO_SCHEMA = {
    "tables": [
        {
            "name": "department",
            "columns": [
                {"name": "Department_ID", "type": "int", "primary_key": True},
                {"name": "Name", "type": "text"},
                {"name": "Creation", "type": "text"},
                {"name": "Ranking", "type": "int"},
                {"name": "Budget_in_Billions", "type": "real"},
                {"name": "Num_Employees", "type": "real"},
            ],
            "sample_rows": [
                [7, "Commerce", "1903", 7, 6.2, 36000.0],
                [3, "Defense", "1947", 3, 439.3, 3000000.0],
                [15, "Homeland Security", "2002", 15, 44.6, 208000.0],
            ],
        },
        {
            "name": "head",
            "columns": [
                {"name": "head_ID", "type": "int", "primary_key": True},
                {"name": "name", "type": "text"},
                {"name": "born_state", "type": "text"},
                {"name": "age", "type": "real"},
            ],
            "sample_rows": [
                [8, "Nick Faldo", "California", 56.0],
                [7, "Stewart Cink", "Florida", 50.0],
                [5, "Jeff Maggert", "Delaware", 53.0],
            ],
        },
        {
            "name": "management",
            "columns": [
                {
                    "name": "department_ID",
                    "type": "int",
                    "foreign_key": ["department", "Department_ID"],
                },
                {"name": "head_ID", "type": "int", "foreign_key": ["head", "head_ID"]},
                {"name": "temporary_acting", "type": "text"},
            ],
            "sample_rows": [[7, 3, "No"], [15, 4, "Yes"], [11, 10, "No"]],
        },
    ]
}

_DEMO_QUESTIONS = [
    "How many heads of the departments are older than 56 ?",
    "List the name, born state and age of the heads of departments ordered by age.",
    "What are the maximum and minimum budget of the departments?",
    "What is the average number of employees of the departments whose rank is between 10 and 15?",
    "What are the names of the heads who are born outside the California state?",
]

_DEMO_PAIRS = [
    ["How many heads of the departments are older than 56 ?",
     "SELECT count(*) FROM head WHERE age > 56"],
    ["List the name, born state and age of the heads of departments ordered by age.",
     "SELECT name, born_state, age FROM head ORDER BY age"],
    ["What are the maximum and minimum budget of the departments?",
     "SELECT max(Budget_in_Billions), min(Budget_in_Billions) FROM department"],
    ["What is the average number of employees of the departments whose rank is between 10 and 15?",
     "SELECT avg(Num_Employees) FROM department WHERE Ranking BETWEEN 10 AND 15"],
    ["What are the names of the heads who are born outside the California state?",
     "SELECT name FROM head WHERE born_state != 'California'"],
]


def demo_config(workdir: str = "runs") -> dict:
    """Self-contained offline demo: a toy relational fixture plus seed demos."""
    config = default_config()
    config["workdir"] = workdir
    config["question"].update(
        {"prompt_count": 3, "shots": 5, "samples_per_prompt": 4, "max_questions": 60}
    )
    config["answer"]["shots"] = 5
    config["databases"] = [
        {
            "name": "college",
            "fixture": str(Path(workdir) / "college.sqlite"),
            "schema": _DEMO_SCHEMA,
        }
    ]
    config["demos"] = {"questions": list(_DEMO_QUESTIONS), "pairs": [list(p) for p in _DEMO_PAIRS]}
    return config


def _merge(base: dict, override: Mapping) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: Optional[Path], args: argparse.Namespace) -> dict:
    """Effective configuration: defaults <- file <- flags."""
    if path is not None:
        try:
            file_values = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file {path} is not valid JSON: {err}")
        if not isinstance(file_values, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        config = _merge(default_config(), file_values)
    elif getattr(args, "mock", False):
        config = demo_config()
    else:
        config = default_config()
    if getattr(args, "mock", False):
        config["backend"]["kind"] = "mock"
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    if getattr(args, "workers", None) is not None:
        config["workers"] = args.workers
    if getattr(args, "threshold_answer", None) is not None:
        config["thresholds"]["answer"] = args.threshold_answer
    if getattr(args, "threshold_question", None) is not None:
        config["thresholds"]["question"] = args.threshold_question
    _validate_config(config)
    return config


def _validate_config(config: dict) -> None:
    try:
        Task(config["task"])
    except ValueError:
        raise ConfigError(f"unknown task: {config['task']!r}")
    if config["workers"] < 1:
        raise ConfigError("workers must be at least 1")
    for key in ("answer", "question"):
        if config["thresholds"][key] < 0:
            raise ConfigError(f"threshold {key} must be non-negative")
    if config["backend"]["kind"] not in ("mock", "http"):
        raise ConfigError(f"unknown backend kind: {config['backend']['kind']!r}")


def _schema_from_dict(data: Mapping) -> RelationalSchema:
    tables = []
    for table in data.get("tables", []):
        columns = tuple(
            ColumnSpec(
                name=col["name"],
                type=col["type"],
                primary_key=bool(col.get("primary_key", False)),
                foreign_key=tuple(col["foreign_key"]) if col.get("foreign_key") else None,
            )
            for col in table["columns"]
        )
        rows = tuple(tuple(row) for row in table.get("sample_rows", []))
        tables.append(TableSchema(name=table["name"], columns=columns, sample_rows=rows))
    if not tables:
        raise ConfigError("schema has no tables")
    return RelationalSchema(tables=tuple(tables))


def _knowledge_from_config(config: dict) -> Optional[SymbolicKnowledge]:
    data = config.get("knowledge")
    if data is None:
        return None
    kind = data.get("kind")
    if kind == "ontology":
        return Ontology(
            intents={k: tuple(v) for k, v in data.get("intents", {}).items()},
            slots={k: tuple(v) for k, v in data.get("slots", {}).items()},
        )
    if kind == "text":
        return TextBlock(text=data.get("text", ""))
    raise ConfigError(f"unknown knowledge kind: {kind!r}")


@dataclasses.dataclass(frozen=True)
class DatabaseEntry:
    name: str
    fixture: Path
    schema: RelationalSchema


def _databases(config: dict, materialize: bool = True) -> list[DatabaseEntry]:
    entries = []
    for raw in config.get("databases", []):
        try:
            name = raw["name"]
            fixture = Path(raw["fixture"])
            schema = _schema_from_dict(raw["schema"])
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"bad database entry: {err}")
        if materialize and not fixture.exists():
            fixture.parent.mkdir(parents=True, exist_ok=True)
            create_fixture(schema, fixture)
        entries.append(DatabaseEntry(name=name, fixture=fixture, schema=schema))
    return entries


# --- task wiring -------------------------------------------------------------


def _exec_fn(config: dict, fixture: Optional[Path]) -> Callable[[str], ExecOutcome]:
    task = Task(config["task"])
    if task is Task.SQL:
        if fixture is None:
            raise ConfigError("sql task needs a database fixture")
        return lambda text: exec_sql(text, fixture)
    if task is Task.BASH:
        return exec_bash
    if task is Task.PYTHON:
        runner = config["runner"]
        runner_config = RunnerConfig(
            command=tuple(runner["command"]),
            timeout_ms=int(runner["timeout_ms"]),
            memory_limit_mb=int(runner["memory_limit_mb"]),
        )
        return lambda text: exec_python(text, runner_config)
    if task is Task.TOP:
        return exec_top
    if task is Task.QDMR:
        return exec_qdmr
    external = config["external"]
    template = external.get("command_template", "")
    timeout_s = float(external.get("timeout_s", 10.0))
    return lambda text: exec_external(text, template, timeout_s)


def _sim_fn(task: Task) -> SimFn:
    # Token streams carry partial credit; everything else is all-or-nothing.
    if task is Task.BASH:
        return sim_bleu_outcomes
    return sim_em


def _fixture_for(question: Question, databases: Sequence[DatabaseEntry]) -> Optional[Path]:
    if not databases:
        return None
    name = question.source_prompt_id.split("/", 1)[0]
    for entry in databases:
        if entry.name == name:
            return entry.fixture
    return databases[0].fixture


def _paths(config: dict) -> dict[str, Path]:
    workdir = Path(config["workdir"])
    return {
        "questions": workdir / "questions.jsonl",
        "candidates": workdir / "candidates.jsonl",
        "verified": workdir / "verified.jsonl",
        "kept": workdir / "questions.kept.jsonl",
        "report": workdir / "report.json",
    }


def _demo_pool(config: dict) -> list[Demonstration]:
    return [Demonstration(input_text=q) for q in config["demos"]["questions"]]


def _pair_pool(config: dict) -> list[Demonstration]:
    pool = []
    for item in config["demos"]["pairs"]:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ConfigError(f"demo pair must be [input, output]: {item!r}")
        pool.append(Demonstration(input_text=item[0], output_text=item[1]))
    return pool


def _warn(message: str) -> None:
    print(f"symgen: {message}", file=sys.stderr)


# --- commands ----------------------------------------------------------------


def cmd_gen_questions(config: dict, out_path: Path) -> int:
    task = Task(config["task"])
    backend = build_backend(_backend_config(config), seed=config["seed"])
    section = config["question"]
    fmt_pool = _demo_pool(config)
    shots = min(int(section["shots"]), len(fmt_pool))

    databases = _databases(config)
    if task is Task.SQL and not databases:
        raise ConfigError("sql task needs at least one database entry")
    sources: list[tuple[str, Optional[SymbolicKnowledge]]]
    if databases:
        sources = [(entry.name, entry.schema) for entry in databases]
    else:
        sources = [("", _knowledge_from_config(config))]

    existing: list[Question] = []
    if out_path.exists():
        existing = read_jsonl(out_path, Question)
    seen_texts = {normalize_text(q.text) for q in existing}
    per_source = {name: 0 for name, _ in sources}
    for q in existing:
        name = q.source_prompt_id.split("/", 1)[0] if "/" in q.source_prompt_id else ""
        if name in per_source:
            per_source[name] += 1
    total = len(existing)

    cap = int(section["max_questions"])
    quota = int(section["per_database_quota"])
    fresh: list[Question] = []
    failure: Optional[GenerationError] = None
    try:
        for source_name, knowledge in sources:
            rng = random.Random(f"{config['seed']}|questions|{source_name}")
            for prompt_index in range(int(section["prompt_count"])):
                demos = rng.sample(fmt_pool, shots) if shots else []
                source_id = f"{source_name}/p{prompt_index}" if source_name else f"p{prompt_index}"
                for temperature in section["temperatures"]:
                    params = GenerationParams(
                        temperature=float(temperature),
                        n_samples=int(section["samples_per_prompt"]),
                        context_budget_tokens=int(section["context_budget_tokens"]),
                    )
                    prompt = assemble_question_prompt(
                        knowledge, section["instruction"], demos, params, task
                    )
                    samples = backend.complete(CompletionRequest(prompt.text, params))
                    for sample in samples:
                        text = sample.text.strip()
                        if not text:
                            continue
                        fresh.append(
                            Question.create(
                                task,
                                text=text,
                                source_prompt_id=source_id,
                                temperature=float(temperature),
                                sample_logprob=sample.total_logprob,
                            )
                        )
    except GenerationError as err:
        failure = err  # partial output below is still written

    accepted: list[Question] = []
    for question in dedup_questions(fresh):
        key = normalize_text(question.text)
        if key in seen_texts:
            continue
        source = question.source_prompt_id.split("/", 1)[0] if "/" in question.source_prompt_id else ""
        if source and databases and per_source.get(source, 0) >= quota:
            continue
        if total >= cap:
            break
        seen_texts.add(key)
        if source in per_source:
            per_source[source] += 1
        total += 1
        accepted.append(question)

    write_jsonl(accepted, out_path, append=out_path.exists())
    print(f"questions: wrote {len(accepted)} new ({total} total) to {out_path}")
    if failure is not None:
        _warn(f"generation aborted early: {failure}")
        return 1
    return 0


def _backend_config(config: dict) -> dict:
    section = config["backend"]
    return {
        "backend": section["kind"],
        "endpoint": section["endpoint"],
        "model": section["model"],
        "rpm": section["rpm"],
        "timeout_s": section["timeout_s"],
    }


def cmd_gen_answers(config: dict, questions_path: Path, out_path: Path) -> int:
    task = Task(config["task"])
    backend = build_backend(_backend_config(config), seed=config["seed"])
    section = config["answer"]
    fmt = TASK_FORMATS[task]
    pool = _pair_pool(config)
    shots = min(int(section["shots"]), len(pool))
    databases = _databases(config)
    knowledge_default = _knowledge_from_config(config)

    questions = read_jsonl(questions_path, Question)
    done: set[str] = set()
    if out_path.exists():
        done = {c.question_id for c in read_jsonl(out_path, Candidate)}
    pending = [q for q in questions if q.id not in done]

    params = GenerationParams(
        temperature=float(section["temperature"]),
        n_samples=int(section["samples"]),
        max_tokens=int(section["max_tokens"]),
        context_budget_tokens=int(section["context_budget_tokens"]),
    )

    def work(question: Question) -> tuple[Question, Optional[list[Candidate]], Optional[str]]:
        try:
            if section["retrieval"]:
                demos = retrieve_demonstrations(pool, question.text, shots)
            else:
                demos = random.Random(f"{config['seed']}|answers|{question.id}").sample(
                    pool, shots
                )
            if databases:
                entry = next(
                    (e for e in databases if question.source_prompt_id.startswith(e.name + "/")),
                    databases[0],
                )
                knowledge: Optional[SymbolicKnowledge] = entry.schema
            else:
                knowledge = knowledge_default
            prompt = assemble_answer_prompt(
                knowledge, section["instruction"], demos, question.text, params, task
            )
            samples = backend.complete(CompletionRequest(prompt.text, params))
        except AuthenticationError:
            raise
        except (GenerationError, PromptBudgetError, ValueError) as err:
            return question, None, str(err)
        candidates = [
            Candidate(
                question_id=question.id,
                index=j,
                text=fmt.answer_primer + sample.text,
                logprob=sample.total_logprob,
            )
            for j, sample in enumerate(samples)
        ]
        return question, candidates, None

    written = 0
    skipped = 0
    with _pool(config["workers"]) as run:
        for question, candidates, error in run(work, pending):
            if candidates is None:
                _warn(f"question {question.id}: skipped ({error})")
                skipped += 1
                continue
            write_jsonl(candidates, out_path, append=out_path.exists() or written > 0)
            written += len(candidates)
    if not out_path.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.touch()
    print(
        f"answers: wrote {written} candidates for {len(pending) - skipped} questions "
        f"({skipped} skipped, {len(done)} already done) to {out_path}"
    )
    return 0


class _pool:
    """Ordered map over a worker pool; sequential when workers == 1."""

    def __init__(self, workers: int) -> None:
        self.workers = workers
        self._executor: Optional[ThreadPoolExecutor] = None

    def __enter__(self) -> Callable[..., Iterator]:
        if self.workers > 1:
            self._executor = ThreadPoolExecutor(max_workers=self.workers)
            return self._executor.map
        return map

    def __exit__(self, *exc_info: object) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)


def cmd_verify(
    config: dict,
    candidates_path: Path,
    questions_path: Path,
    out_path: Path,
    no_verify: bool = False,
) -> int:
    task = Task(config["task"])
    threshold = float(config["thresholds"]["answer"])
    databases = _databases(config)
    simfn = _sim_fn(task)

    questions = {q.id: q for q in read_jsonl(questions_path, Question)}
    records = read_jsonl(candidates_path, Candidate)
    groups: dict[str, list[Candidate]] = {}
    for candidate in records:
        groups.setdefault(candidate.question_id, []).append(candidate)

    done: set[str] = set()
    if out_path.exists():
        done = {p.question_id for p in read_jsonl(out_path, VerifiedPair)}
    pending = [qid for qid in groups if qid not in done]

    def work(qid: str) -> tuple[str, Optional[VerifiedPair], list[Candidate], Optional[str]]:
        question = questions.get(qid)
        if question is None:
            return qid, None, groups[qid], "not in questions file"
        fixture = _fixture_for(question, databases)
        exec_fn = _exec_fn(config, fixture)
        stamped = [
            dataclasses.replace(c, exec=exec_fn(c.text))
            for c in sorted(groups[qid], key=lambda c: c.index)
        ]
        if no_verify:
            survivors = [c for c in stamped if c.exec is not None and c.exec.status == "ok"]
            if survivors:
                best = max(survivors, key=lambda c: (c.logprob, -c.index))
                pair = VerifiedPair(
                    question_id=qid,
                    question_text=question.text,
                    best_index=best.index,
                    answer_text=best.text,
                    score=0.0,
                    kept=True,
                    threshold=0.0,
                )
            else:
                pair = VerifiedPair(
                    question_id=qid,
                    question_text=question.text,
                    best_index=None,
                    answer_text=None,
                    score=0.0,
                    kept=False,
                    threshold=0.0,
                )
        else:
            pair, _ = build_pair(question, stamped, simfn, threshold)
        return qid, pair, stamped, None

    stamped_by_id: dict[str, list[Candidate]] = {}
    pairs: list[VerifiedPair] = []
    skipped = 0
    with _pool(config["workers"]) as run:
        for qid, pair, stamped, error in run(work, pending):
            if pair is None:
                _warn(f"candidates for {qid}: skipped ({error})")
                skipped += 1
                continue
            stamped_by_id[qid] = stamped
            pairs.append(pair)

    write_jsonl(pairs, out_path, append=out_path.exists())

    # Stamp execution outcomes back so the candidate file carries them.
    by_key = {
        (c.question_id, c.index): c
        for group in stamped_by_id.values()
        for c in group
    }
    restamped = [by_key.get((c.question_id, c.index), c) for c in records]
    write_jsonl(restamped, candidates_path)

    kept = sum(1 for p in pairs if p.kept)
    print(
        f"verified: {len(pairs)} questions ({kept} kept, {skipped} skipped,"
        f" {len(done)} already done) to {out_path}"
    )
    return 0


def cmd_filter_questions(
    config: dict, questions_path: Path, verified_path: Path, out_path: Path
) -> int:
    threshold = float(config["thresholds"]["question"])
    questions = read_jsonl(questions_path, Question)
    pairs = {p.question_id: p for p in read_jsonl(verified_path, VerifiedPair)}

    scored = []
    rows = {}
    for question in questions:
        pair = pairs.get(question.id)
        if pair is None:
            _warn(f"question {question.id}: no verified row, dropped")
            continue
        scored.append(question)
        # Only the winning weight survives serialization; that is the one
        # the question-level threshold reads.
        weights = {0: pair.score} if pair.answer_text is not None else {}
        rows[question.id] = WeightMatrixRow(question_id=question.id, weights=weights)

    kept = filter_questions(scored, rows, threshold)
    write_jsonl(kept, out_path)
    print(f"filtered: kept {len(kept)} of {len(questions)} questions to {out_path}")
    return 0


def cmd_stats(config: dict, verified_path: Path, out_path: Optional[Path], fmt: str) -> int:
    records = read_jsonl(verified_path, VerifiedPair)
    report = build_report(records, task=Task(config["task"]))
    rendered = report_json(report) if fmt == "json" else format_report(report)
    if out_path is None:
        print(rendered)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(rendered + "\n", encoding="utf-8")
        print(f"stats: wrote report to {out_path}")
    return 0


_EVAL_METRICS = ("surface-em", "exact-set-match", "execution", "char-bleu", "template", "pass")


def cmd_eval(
    config: dict,
    metric: str,
    pairs_path: Path,
    fixture: Optional[Path],
    out_path: Optional[Path],
    fmt: str,
) -> int:
    task = Task(config["task"])
    rows = []
    with open(pairs_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as err:
                raise ConfigError(f"{pairs_path}:{line_no}: bad JSON: {err}")

    if metric == "execution" and fixture is None:
        raise ConfigError("execution metric needs --fixture")
    runner = config["runner"]
    runner_config = RunnerConfig(
        command=tuple(runner["command"]),
        timeout_ms=int(runner["timeout_ms"]),
        memory_limit_mb=int(runner["memory_limit_mb"]),
    )

    def score(row: Mapping) -> float:
        pred = row["pred"]
        if metric == "surface-em":
            return float(eval_surface_em(pred, row["gold"], task))
        if metric == "exact-set-match":
            return float(eval_exact_set_match_sql(pred, row["gold"]))
        if metric == "execution":
            return float(eval_execution_sql(pred, row["gold"], fixture))
        if metric == "char-bleu":
            return eval_char_bleu(pred, row["gold"])
        if metric == "template":
            return float(eval_template_accuracy(pred, row["gold"]))
        return float(eval_python_pass(pred, list(row["assertions"]), runner_config))

    scores = []
    for line_no, row in enumerate(rows, 1):
        try:
            scores.append(score(row))
        except KeyError as err:
            raise ConfigError(f"{pairs_path} row {line_no}: missing field {err}")

    mean = sum(scores) / len(scores) if scores else 0.0
    result = {"metric": metric, "count": len(scores), "mean": mean, "scores": scores}
    rendered = (
        canonical_json(result)
        if fmt == "json"
        else f"{metric} over {len(scores)} pairs: mean {mean:.4f}"
    )
    if out_path is None:
        print(rendered)
    else:
        out_path.write_text(rendered + "\n", encoding="utf-8")
        print(f"eval: wrote {metric} results to {out_path}")
    return 0


def cmd_manifest(
    gold: Path, synthetic: Path, strategy: str, out_path: Optional[Path]
) -> int:
    try:
        manifest = emit_training_manifest(gold, synthetic, strategy)
    except (ValueError, FileNotFoundError) as err:
        raise ConfigError(str(err))
    rendered = canonical_json(manifest)
    if out_path is None:
        print(rendered)
    else:
        out_path.write_text(rendered + "\n", encoding="utf-8")
        print(f"manifest: wrote {strategy} plan to {out_path}")
    return 0


def cmd_e2e(config: dict, no_verify: bool = False, fmt: str = "json") -> int:
    paths = _paths(config)
    for stale in ("questions", "candidates", "verified", "kept"):
        paths[stale].unlink(missing_ok=True)
    code = cmd_gen_questions(config, paths["questions"])
    if code:
        return code
    code = cmd_gen_answers(config, paths["questions"], paths["candidates"])
    if code:
        return code
    code = cmd_verify(
        config, paths["candidates"], paths["questions"], paths["verified"], no_verify
    )
    if code:
        return code
    code = cmd_filter_questions(config, paths["questions"], paths["verified"], paths["kept"])
    if code:
        return code
    return cmd_stats(config, paths["verified"], paths["report"], fmt)


# --- argument parsing --------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--seed", type=int, help="seed for sampling and demo selection")
    common.add_argument("--mock", action="store_true", help="use the offline mock backend")
    common.add_argument("--workers", type=int, help="worker pool size")
    common.add_argument("--threshold-answer", type=float, dest="threshold_answer")
    common.add_argument("--threshold-question", type=float, dest="threshold_question")
    common.add_argument(
        "--print-config", action="store_true", help="print the effective config and exit"
    )
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(
        prog="symgen",
        description="Generate, verify, and report on synthetic symbolic-language data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-questions", parents=[common], help="sample new questions")
    p.add_argument("--out", type=Path, help="questions file (default workdir/questions.jsonl)")

    p = sub.add_parser("gen-answers", parents=[common], help="sample candidate answers")
    p.add_argument("--in", dest="in_path", type=Path, help="questions file")
    p.add_argument("--out", type=Path, help="candidates file")

    p = sub.add_parser("verify", parents=[common], help="execute, score, and select answers")
    p.add_argument("--in", dest="in_path", type=Path, help="candidates file")
    p.add_argument("--questions", type=Path, help="questions file")
    p.add_argument("--out", type=Path, help="verified pairs file")
    p.add_argument(
        "--no-verify",
        action="store_true",
        help="take the top-logprob surviving candidate instead of scoring",
    )

    p = sub.add_parser("filter-questions", parents=[common], help="threshold questions")
    p.add_argument("--questions", type=Path)
    p.add_argument("--verified", type=Path)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("stats", parents=[common], help="dataset report")
    p.add_argument("--in", dest="in_path", type=Path, help="verified pairs file")
    p.add_argument("--out", type=Path, help="report file (default stdout)")

    p = sub.add_parser("eval", parents=[common], help="score predictions against references")
    p.add_argument("--metric", choices=_EVAL_METRICS, required=True)
    p.add_argument("--pairs", type=Path, required=True, help="JSONL of {pred, gold|assertions}")
    p.add_argument("--fixture", type=Path, help="database file for the execution metric")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("manifest", parents=[common], help="emit a training-mixture plan")
    p.add_argument("--gold", type=Path, required=True)
    p.add_argument("--synthetic", type=Path, required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("e2e", parents=[common], help="full pipeline into the workdir")
    p.add_argument(
        "--no-verify",
        action="store_true",
        help="take the top-logprob surviving candidate instead of scoring",
    )

    return parser


def _dispatch(args: argparse.Namespace, config: dict) -> int:
    paths = _paths(config)
    command = args.command
    if command == "gen-questions":
        return cmd_gen_questions(config, args.out or paths["questions"])
    if command == "gen-answers":
        return cmd_gen_answers(
            config, args.in_path or paths["questions"], args.out or paths["candidates"]
        )
    if command == "verify":
        return cmd_verify(
            config,
            args.in_path or paths["candidates"],
            args.questions or paths["questions"],
            args.out or paths["verified"],
            no_verify=args.no_verify,
        )
    if command == "filter-questions":
        return cmd_filter_questions(
            config,
            args.questions or paths["questions"],
            args.verified or paths["verified"],
            args.out or paths["kept"],
        )
    if command == "stats":
        return cmd_stats(config, args.in_path or paths["verified"], args.out, args.format)
    if command == "eval":
        return cmd_eval(config, args.metric, args.pairs, args.fixture, args.out, args.format)
    if command == "manifest":
        return cmd_manifest(args.gold, args.synthetic, args.strategy, args.out)
    if command == "e2e":
        return cmd_e2e(config, no_verify=args.no_verify, fmt=args.format)
    raise ConfigError(f"unknown command: {command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args)
        if args.print_config:
            print(canonical_json(config))
            return 0
        return _dispatch(args, config)
    except ConfigError as err:
        _warn(str(err))
        return 2
    except FileNotFoundError as err:
        _warn(f"missing file: {err}")
        return 2
    except AuthenticationError as err:
        _warn(f"authentication: {err}")
        return 2
    except EvalError as err:
        _warn(f"scoring: {err}")
        return 1
    except GenerationError as err:
        _warn(f"backend: {err}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
