"""Evaluation metrics and dataset reporting.

Surface metrics (exact match, clause-set match, template match,
character BLEU), execution-based metrics (SQL result equality, Python
assertion pass), a SQL hardness ladder, dataset reports, and training
manifests.  Everything here is read-only over finished pipeline
output.
"""

from __future__ import annotations

import re
from collections import Counter
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .core import Task, VerifiedPair, canonical_json
from .executors import (
    QdmrParseError,
    RunnerConfig,
    TopParseError,
    exec_sql,
    parse_qdmr,
    parse_top,
    run_request,
    serialize_top,
    top_template,
)
from .sim import char_bleu4

__all__ = [
    "EvalError",
    "build_report",
    "emit_training_manifest",
    "eval_char_bleu",
    "eval_exact_set_match_sql",
    "eval_execution_sql",
    "eval_python_pass",
    "eval_surface_em",
    "eval_template_accuracy",
    "format_report",
    "sql_hardness",
]

MANIFEST_STRATEGIES = ("gold", "mix_1_1", "mix_1_3", "two_stage")


class EvalError(Exception):
    """Scoring cannot proceed (bad gold data, runner missing)."""


def _collapse(text: str) -> str:
    return " ".join(text.split())


# --- surface metrics --------------------------------------------------------


def eval_surface_em(pred: str, gold: str, task: Task) -> int:
    """1 iff the two answers agree in the task's canonical surface form."""
    if task == Task.TOP:
        try:
            return int(serialize_top(parse_top(pred)) == serialize_top(parse_top(gold)))
        except TopParseError:
            return 0
    if task == Task.QDMR:
        try:
            a, b = parse_qdmr(pred), parse_qdmr(gold)
        except QdmrParseError:
            return 0
        return int(a.steps == b.steps)
    return int(_collapse(pred) == _collapse(gold))


def eval_template_accuracy(pred: str, gold: str) -> int:
    """1 iff both parse as intent/slot trees with identical templates."""
    try:
        return int(top_template(parse_top(pred)) == top_template(parse_top(gold)))
    except TopParseError:
        return 0


def eval_char_bleu(pred: str, gold: str) -> float:
    return char_bleu4(pred, gold)


# --- SQL clause-set match ---------------------------------------------------

_CLAUSE_HEADS = ("select", "from", "where", "group by", "having", "order by", "limit")
_CLAUSE_RE = re.compile(
    r"\b(select|from|where|group\s+by|having|order\s+by|limit)\b", re.IGNORECASE
)


def _split_top_level(text: str, separator: re.Pattern) -> list[str]:
    """Split on a separator pattern, ignoring matches inside parentheses
    or single-quoted strings."""
    parts, depth, start, i = [], 0, 0, 0
    in_string = False
    while i < len(text):
        ch = text[i]
        if in_string:
            if ch == "'":
                in_string = False
        elif ch == "'":
            in_string = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0:
            m = separator.match(text, i)
            if m:
                parts.append(text[start : i])
                i = m.end()
                start = i
                continue
        i += 1
    parts.append(text[start:])
    return parts


_COMMA = re.compile(r",")
_AND = re.compile(r"\bAND\b", re.IGNORECASE)


def _sql_clauses(query: str) -> Optional[dict[str, str]]:
    text = _collapse(query).rstrip(";").strip()
    if not text.lower().startswith("select"):
        return None
    clauses: dict[str, str] = {}
    matches = [
        m
        for m in _CLAUSE_RE.finditer(text)
        if _paren_depth(text, m.start()) == 0
    ]
    if not matches or matches[0].start() != 0:
        return None
    for pos, match in enumerate(matches):
        head = " ".join(match.group(1).lower().split())
        end = matches[pos + 1].start() if pos + 1 < len(matches) else len(text)
        body = text[match.end() : end].strip()
        if head in clauses:
            # set operations / multiple selects are outside this
            # approximation; bail to plain normalized comparison
            return None
        clauses[head] = body
    if "from" not in clauses:
        return None
    return clauses


def _paren_depth(text: str, limit: int) -> int:
    depth = 0
    in_string = False
    for ch in text[:limit]:
        if in_string:
            if ch == "'":
                in_string = False
        elif ch == "'":
            in_string = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
    return depth


def _normalized_multiset(body: str, separator: re.Pattern) -> Counter:
    return Counter(_collapse(part.lower()) for part in _split_top_level(body, separator))


def eval_exact_set_match_sql(pred: str, gold: str) -> int:
    """Clause-level surface match: SELECT columns and WHERE/HAVING
    conjuncts compare as order-insensitive multisets, remaining clauses
    as normalized text.  A deliberate approximation of component-wise
    set match; queries it cannot decompose fall back to whole-string
    comparison."""
    pred_clauses = _sql_clauses(pred)
    gold_clauses = _sql_clauses(gold)
    if pred_clauses is None or gold_clauses is None:
        if pred_clauses is gold_clauses is None:
            return int(_collapse(pred.lower()) == _collapse(gold.lower()))
        return 0
    if pred_clauses.keys() != gold_clauses.keys():
        return 0
    for head in pred_clauses:
        a, b = pred_clauses[head], gold_clauses[head]
        if head == "select":
            if _normalized_multiset(a, _COMMA) != _normalized_multiset(b, _COMMA):
                return 0
        elif head in ("where", "having"):
            if _normalized_multiset(a, _AND) != _normalized_multiset(b, _AND):
                return 0
        else:
            if _collapse(a.lower()) != _collapse(b.lower()):
                return 0
    return 1


# --- execution metrics ------------------------------------------------------


def eval_execution_sql(pred: str, gold: str, fixture: Union[str, Path]) -> int:
    """1 iff both queries run and produce the same result digest."""
    gold_out = exec_sql(gold, fixture)
    if gold_out.status != "ok":
        raise EvalError(f"gold query failed: {gold_out.fail_reason}")
    pred_out = exec_sql(pred, fixture)
    if pred_out.status != "ok":
        return 0
    return int(pred_out.digest == gold_out.digest)


def eval_python_pass(
    pred_code: str, test_assertions: Sequence[str], config: RunnerConfig
) -> int:
    """1 iff every assertion holds when run against the candidate code."""
    if not test_assertions:
        raise EvalError("no test assertions supplied")
    request = {
        "code": pred_code,
        "calls": [],
        "assertions": list(test_assertions),
        "timeout_ms": config.timeout_ms,
        "memory_limit_mb": config.memory_limit_mb,
    }
    result, error = run_request(request, config)
    if result is None:
        raise EvalError(error or "runner unavailable")
    if result.get("status") != "ok":
        return 0
    per_call = result.get("per_call", [])
    if len(per_call) != len(test_assertions):
        return 0
    return int(all(entry.get("ok") for entry in per_call))


# --- SQL hardness -----------------------------------------------------------

_AGG_RE = re.compile(r"\b(count|sum|avg|min|max)\s*\(", re.IGNORECASE)
_WORD = {
    "where": re.compile(r"\bwhere\b", re.IGNORECASE),
    "group": re.compile(r"\bgroup\s+by\b", re.IGNORECASE),
    "order": re.compile(r"\border\s+by\b", re.IGNORECASE),
    "limit": re.compile(r"\blimit\b", re.IGNORECASE),
    "join": re.compile(r"\bjoin\b", re.IGNORECASE),
    "or": re.compile(r"\bor\b", re.IGNORECASE),
    "like": re.compile(r"\blike\b", re.IGNORECASE),
    "setop": re.compile(r"\b(union|intersect|except)\b", re.IGNORECASE),
    "nested": re.compile(r"\(\s*select\b", re.IGNORECASE),
}


def sql_hardness(query: str) -> str:
    """easy/medium/hard/extra from keyword-component counts.

    The ladder counts three groups: structural keywords (WHERE,
    GROUP BY, ORDER BY, LIMIT, JOIN, OR, LIKE), plural components
    (more than one selected column, aggregate, WHERE conjunct, or
    grouping column), and nesting (subqueries, set operations).
    """
    text = _collapse(query).rstrip(";")
    if not text.lower().startswith("select"):
        raise ValueError(f"not a query: {query[:50]!r}")

    comp1 = (
        bool(_WORD["where"].search(text))
        + bool(_WORD["group"].search(text))
        + bool(_WORD["order"].search(text))
        + bool(_WORD["limit"].search(text))
        + len(_WORD["join"].findall(text))
        + len(_WORD["or"].findall(text))
        + len(_WORD["like"].findall(text))
    )
    comp2 = len(_WORD["nested"].findall(text)) + len(_WORD["setop"].findall(text))

    clauses = _sql_clauses(text) or {}
    select_cols = len(_split_top_level(clauses.get("select", ""), _COMMA))
    where_conds = (
        len(_split_top_level(clauses["where"], _AND)) if "where" in clauses else 0
    )
    group_cols = (
        len(_split_top_level(clauses["group by"], _COMMA)) if "group by" in clauses else 0
    )
    aggs = len(_AGG_RE.findall(text))
    others = (
        (aggs > 1) + (select_cols > 1) + (where_conds > 1) + (group_cols > 1)
    )

    if comp1 <= 1 and others == 0 and comp2 == 0:
        return "easy"
    if (others <= 2 and comp1 <= 1 and comp2 == 0) or (
        comp1 <= 2 and others < 2 and comp2 == 0
    ):
        return "medium"
    if (
        (others > 2 and comp1 <= 2 and comp2 == 0)
        or (2 < comp1 <= 3 and others <= 2 and comp2 == 0)
        or (comp1 <= 1 and others == 0 and comp2 <= 1)
    ):
        return "hard"
    return "extra"


# --- dataset report ---------------------------------------------------------


def _histogram(values: Sequence[int]) -> dict[str, int]:
    counts = Counter(values)
    return {str(key): counts[key] for key in sorted(counts)}


def build_report(
    records: Sequence[VerifiedPair], task: Optional[Task] = None
) -> dict:
    """Counts, length histograms, hardness split, and threshold totals.

    Histogram mass always equals the record count: records without an
    answer land in the 0 bucket.  Hardness covers kept answers that
    parse as queries, as percentages of that subset.
    """
    kept = sum(1 for r in records if r.kept)
    question_tokens = [len(r.question_text.split()) for r in records]
    answer_tokens = [
        len(r.answer_text.split()) if r.answer_text else 0 for r in records
    ]
    answer_lines = [
        len(r.answer_text.splitlines()) if r.answer_text else 0 for r in records
    ]

    report = {
        "counts": {
            "records": len(records),
            "kept": kept,
            "dropped": len(records) - kept,
        },
        "length_histograms": {
            "question_tokens": _histogram(question_tokens),
            "answer_tokens": _histogram(answer_tokens),
            "answer_lines": _histogram(answer_lines),
        },
        "hardness": {},
        "thresholds": {
            "T": records[0].threshold if records else 0.0,
            "kept": kept,
            "dropped": len(records) - kept,
        },
    }

    if task == Task.SQL:
        labels = []
        for record in records:
            if not (record.kept and record.answer_text):
                continue
            try:
                labels.append(sql_hardness(record.answer_text))
            except ValueError:
                continue
        tally = Counter(labels)
        total = sum(tally.values())
        report["hardness"] = {
            level: (100.0 * tally[level] / total) if total else 0.0
            for level in ("easy", "medium", "hard", "extra")
        }
    return report


def format_report(report: Mapping) -> str:
    """Plain-text rendering of a report dict."""
    lines = []
    counts = report.get("counts", {})
    lines.append(
        f"records {counts.get('records', 0)}  kept {counts.get('kept', 0)}"
        f"  dropped {counts.get('dropped', 0)}"
    )
    thresholds = report.get("thresholds", {})
    lines.append(f"threshold T={thresholds.get('T', 0)}")
    hardness = report.get("hardness") or {}
    if hardness:
        parts = [f"{level} {hardness[level]:.2f}%" for level in ("easy", "medium", "hard", "extra")]
        lines.append("hardness: " + "  ".join(parts))
    for name, histogram in report.get("length_histograms", {}).items():
        total = sum(histogram.values())
        lines.append(f"{name}: {total} records over {len(histogram)} buckets")
    return "\n".join(lines)


def report_json(report: Mapping) -> str:
    """Canonical JSON for a report; byte-identical for identical input."""
    return canonical_json(report)


# --- training manifest ------------------------------------------------------


def emit_training_manifest(
    gold_path: Union[str, Path],
    synthetic_path: Union[str, Path],
    strategy: str,
) -> dict:
    """Stage list an external trainer can follow.

    gold: one stage, gold only.  mix_1_1 / mix_1_3: one stage mixing
    gold and synthetic at the named ratio.  two_stage: mix 1:1 first,
    then gold alone.
    """
    gold = str(gold_path)
    synthetic = str(synthetic_path)
    if strategy not in MANIFEST_STRATEGIES:
        raise ValueError(f"unknown strategy: {strategy!r}")
    for path in (gold, synthetic):
        if not Path(path).exists():
            raise FileNotFoundError(path)
    if strategy == "gold":
        stages = [{"files": [gold], "ratio": [1]}]
    elif strategy == "mix_1_1":
        stages = [{"files": [gold, synthetic], "ratio": [1, 1]}]
    elif strategy == "mix_1_3":
        stages = [{"files": [gold, synthetic], "ratio": [1, 3]}]
    else:
        stages = [
            {"files": [gold, synthetic], "ratio": [1, 1]},
            {"files": [gold], "ratio": [1]},
        ]
    return {"strategy": strategy, "stages": stages}
