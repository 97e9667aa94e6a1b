"""Metrics and reporting: hardness ladder goldens, clause-set match, reports."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

import _fixtures
from conftest import requires_runner, runner_command
from symgen.core import Task, VerifiedPair
from symgen.evalstats import (
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
    sql_hardness,
)
from symgen.executors import RunnerConfig, create_fixture

# Hand-labeled by walking the documented ladder; frozen as goldens.
HARDNESS_GOLDENS = [
    ("SELECT name FROM head WHERE age > 56", "easy"),
    ("SELECT * FROM department", "easy"),
    ("SELECT count(*) FROM head", "easy"),
    (
        "SELECT count(*), T1.name FROM head AS T1 JOIN management AS T2"
        " ON T1.head_ID = T2.head_ID GROUP BY T1.name",
        "medium",
    ),
    ("SELECT name, age FROM head ORDER BY age", "medium"),
    ("SELECT name FROM head WHERE age > (SELECT avg(age) FROM head)", "hard"),
    ("SELECT name FROM head WHERE age > 50 ORDER BY age LIMIT 3", "hard"),
    (
        "SELECT name FROM head WHERE age > (SELECT avg(age) FROM head)"
        " UNION SELECT name FROM head",
        "extra",
    ),
    (
        "SELECT avg(age), count(*), min(age) FROM head GROUP BY born_state"
        " HAVING count(*) > 1 ORDER BY avg(age)",
        "extra",
    ),
]


@pytest.mark.parametrize("query,level", HARDNESS_GOLDENS)
def test_hardness_goldens(query: str, level: str) -> None:
    assert sql_hardness(query) == level


def test_hardness_rejects_non_queries() -> None:
    with pytest.raises(ValueError):
        sql_hardness("DROP TABLE head")
    with pytest.raises(ValueError):
        sql_hardness("")


def test_hardness_ignores_trailing_semicolon_and_case() -> None:
    assert sql_hardness("select name from head where age > 56;") == "easy"


@given(st.sampled_from(HARDNESS_GOLDENS))
def test_hardness_total_over_goldens(case: tuple[str, str]) -> None:
    assert sql_hardness(case[0]) in ("easy", "medium", "hard", "extra")


# --- surface EM ---


def test_surface_em_plain_text() -> None:
    assert eval_surface_em("ls  -a", "ls -a", Task.BASH) == 1
    assert eval_surface_em("LS", "ls", Task.BASH) == 0
    assert eval_surface_em("SELECT 1", "SELECT 1", Task.SQL) == 1


def test_surface_em_top_canonicalizes() -> None:
    a = "[IN:GET_ALARM [SL:PERIOD every day ] ]"
    b = "[IN:GET_ALARM[SL:PERIOD every   day]]"
    assert eval_surface_em(a, b, Task.TOP) == 1
    assert eval_surface_em(a, "[IN:GET_ALARM ]", Task.TOP) == 0
    assert eval_surface_em("[broken", a, Task.TOP) == 0


def test_surface_em_qdmr_remaps_markers() -> None:
    a = "1#) return dogs 3#) return count of #1"
    b = "1#) return dogs 2#) return count of #1"
    assert eval_surface_em(a, b, Task.QDMR) == 1
    assert eval_surface_em("1#) return cats", b, Task.QDMR) == 0
    assert eval_surface_em("no markers", b, Task.QDMR) == 0


# --- template accuracy ---


def test_template_accuracy_ignores_leaf_text() -> None:
    a = "[IN:GET_WEATHER [SL:DATE_TIME tonight ] ]"
    b = "[IN:GET_WEATHER [SL:DATE_TIME next week ] ]"
    assert eval_template_accuracy(a, b) == 1


def test_template_accuracy_sees_structure() -> None:
    a = "[IN:GET_WEATHER [SL:DATE_TIME tonight ] ]"
    b = "[IN:GET_WEATHER [SL:LOCATION tonight ] ]"
    assert eval_template_accuracy(a, b) == 0
    assert eval_template_accuracy("[broken", a) == 0


_LABELS = st.from_regex(r"[A-Z][A-Z0-9_]{0,5}", fullmatch=True)
_WORDS = st.lists(st.from_regex(r"[a-z]{1,5}", fullmatch=True), min_size=1, max_size=3)


@given(_LABELS, _LABELS, _WORDS)
def test_em_implies_template_match(intent: str, slot: str, words: list[str]) -> None:
    tree = f"[IN:{intent} [SL:{slot} {' '.join(words)} ] ]"
    if eval_surface_em(tree, tree, Task.TOP) == 1:
        assert eval_template_accuracy(tree, tree) == 1


# --- SQL clause-set match ---


@pytest.mark.parametrize(
    "pred,gold,expected",
    [
        ("SELECT a, b FROM t", "select b , a from t", 1),
        ("SELECT a FROM t WHERE x = 1 AND y = 2", "SELECT a FROM t WHERE y = 2 AND x = 1", 1),
        ("SELECT a FROM t WHERE x = 1", "SELECT a FROM t WHERE x = 2", 0),
        ("SELECT a FROM t", "SELECT a FROM t ORDER BY a", 0),
        ("SELECT a FROM t;", "SELECT a FROM t", 1),
        ("SELECT count(*), a FROM t", "SELECT a, count(*) FROM t", 1),
        ("SELECT a FROM t LIMIT 1", "SELECT a FROM t LIMIT 2", 0),
        ("SELECT a FROM t UNION SELECT b FROM u", "select a from t union select b from u", 1),
        ("SELECT a FROM t UNION SELECT b FROM u", "SELECT a FROM t", 0),
        ("not sql at all", "SELECT a FROM t", 0),
    ],
)
def test_exact_set_match_cases(pred: str, gold: str, expected: int) -> None:
    assert eval_exact_set_match_sql(pred, gold) == expected


def test_exact_set_match_is_reflexive_on_goldens() -> None:
    for query, _ in HARDNESS_GOLDENS:
        assert eval_exact_set_match_sql(query, query) == 1


# --- execution match ---


@pytest.fixture(scope="module")
def db(tmp_path_factory: pytest.TempPathFactory) -> Path:
    path = tmp_path_factory.mktemp("evalfix") / "college.sqlite"
    return create_fixture(_fixtures.department_schema(), path)


def test_execution_match_identity(db: Path) -> None:
    assert eval_execution_sql("SELECT name FROM head", "SELECT name FROM head", db) == 1


def test_execution_match_across_surface_forms(db: Path) -> None:
    assert (
        eval_execution_sql(
            "SELECT h.name AS x FROM head h", "SELECT name FROM head", db
        )
        == 1
    )


def test_execution_match_wrong_result(db: Path) -> None:
    assert eval_execution_sql("SELECT born_state FROM head", "SELECT name FROM head", db) == 0


def test_execution_match_pred_failure(db: Path) -> None:
    assert eval_execution_sql("SELEC name FROM head", "SELECT name FROM head", db) == 0


def test_execution_match_bad_gold_raises(db: Path) -> None:
    with pytest.raises(EvalError):
        eval_execution_sql("SELECT 1", "SELECT * FROM nowhere", db)


def test_execution_goldens_self_match(db: Path) -> None:
    for query, _ in HARDNESS_GOLDENS:
        assert eval_execution_sql(query, query, db) == 1


# --- python pass rate ---


def test_python_pass_runner_missing() -> None:
    config = RunnerConfig(command=("no-such-runner-binary",))
    with pytest.raises(EvalError):
        eval_python_pass("def f():\n    return 1", ["assert f() == 1"], config)


def test_python_pass_requires_assertions() -> None:
    with pytest.raises(EvalError):
        eval_python_pass("x = 1", [], RunnerConfig(command=("missing",)))


@requires_runner
def test_python_pass_correct_code() -> None:
    config = RunnerConfig(command=tuple(runner_command() or ()))
    code = "def is_odd(n):\n    return n % 2 == 1"
    asserts = ["assert is_odd(1) == True", "assert is_odd(2) == False", "assert is_odd(7)"]
    assert eval_python_pass(code, asserts, config) == 1


@requires_runner
def test_python_pass_failing_assert() -> None:
    config = RunnerConfig(command=tuple(runner_command() or ()))
    code = "def is_odd(n):\n    return True"
    assert eval_python_pass(code, ["assert is_odd(2) == False"], config) == 0


@requires_runner
def test_python_pass_timeout_is_zero() -> None:
    config = RunnerConfig(command=tuple(runner_command() or ()), timeout_ms=300)
    code = "def spin():\n    while True:\n        pass"
    assert eval_python_pass(code, ["assert spin() == 1"], config) == 0


# --- char BLEU ---


def test_char_bleu_bounds() -> None:
    assert eval_char_bleu("ls -a", "ls -a") == 1.0
    assert 0.0 < eval_char_bleu("ls -a", "ls -la") < 1.0
    assert eval_char_bleu("", "ls") == 0.0


# --- report ---


def _pair(question: str, answer: str | None, kept: bool, threshold: float = 0.0) -> VerifiedPair:
    return VerifiedPair(
        question_id=f"id-{abs(hash(question)) % 10**8}",
        question_text=question,
        best_index=0 if answer is not None else None,
        answer_text=answer,
        score=3.0 if answer is not None else 0.0,
        kept=kept,
        threshold=threshold,
    )


def test_report_empty_dataset() -> None:
    report = build_report([])
    assert report["counts"] == {"records": 0, "kept": 0, "dropped": 0}
    assert report["length_histograms"]["question_tokens"] == {}
    assert report["hardness"] == {}


def test_report_hardness_quarters() -> None:
    queries = [
        "SELECT name FROM head WHERE age > 56",
        "SELECT name, age FROM head ORDER BY age",
        "SELECT name FROM head WHERE age > (SELECT avg(age) FROM head)",
        "SELECT avg(age), count(*), min(age) FROM head GROUP BY born_state"
        " HAVING count(*) > 1 ORDER BY avg(age)",
    ]
    records = [_pair(f"question {i}", q, kept=True) for i, q in enumerate(queries)]
    report = build_report(records, task=Task.SQL)
    assert report["hardness"] == {"easy": 25.0, "medium": 25.0, "hard": 25.0, "extra": 25.0}
    assert sum(report["hardness"].values()) == pytest.approx(100.0, abs=0.01)


def test_report_hardness_skips_dropped_and_unparseable() -> None:
    records = [
        _pair("good", "SELECT name FROM head", kept=True),
        _pair("dropped", "SELECT * FROM head", kept=False),
        _pair("garbled", "not a query", kept=True),
        _pair("dead", None, kept=False),
    ]
    report = build_report(records, task=Task.SQL)
    assert report["hardness"]["easy"] == 100.0


def test_report_histogram_mass_is_record_count() -> None:
    records = [
        _pair("one two three", "a b", kept=True),
        _pair("four", None, kept=False),
        _pair("five six", "c\nd e", kept=True),
    ]
    report = build_report(records)
    for histogram in report["length_histograms"].values():
        assert sum(histogram.values()) == len(records)
    assert report["length_histograms"]["answer_tokens"]["0"] == 1  # null answer bucket
    assert report["length_histograms"]["answer_lines"]["2"] == 1


@given(
    st.lists(
        st.tuples(st.text(" ab\n", min_size=1, max_size=12), st.booleans()),
        max_size=10,
    )
)
def test_report_mass_property(rows: list[tuple[str, bool]]) -> None:
    records = []
    for i, (text, has_answer) in enumerate(rows):
        if not text.strip():
            continue
        records.append(_pair(f"question {i} {text}", text if has_answer else None, kept=has_answer))
    report = build_report(records)
    for histogram in report["length_histograms"].values():
        assert sum(histogram.values()) == len(records)


def test_report_counts_and_thresholds() -> None:
    records = [
        _pair("q1", "a", kept=True, threshold=3.0),
        _pair("q2", "b", kept=False, threshold=3.0),
    ]
    report = build_report(records)
    assert report["counts"] == {"records": 2, "kept": 1, "dropped": 1}
    assert report["thresholds"] == {"T": 3.0, "kept": 1, "dropped": 1}


def test_report_json_deterministic() -> None:
    records = [_pair("q1", "SELECT 1 FROM t", kept=True)]
    a = report_json(build_report(records, task=Task.SQL))
    b = report_json(build_report(list(records), task=Task.SQL))
    assert a == b
    json.loads(a)  # well-formed


def test_format_report_mentions_counts() -> None:
    records = [_pair("q1", "SELECT name FROM head", kept=True)]
    text = format_report(build_report(records, task=Task.SQL))
    assert "records 1" in text
    assert "easy" in text


# --- manifest ---


@pytest.fixture()
def two_files(tmp_path: Path) -> tuple[Path, Path]:
    gold = tmp_path / "gold.jsonl"
    synthetic = tmp_path / "synthetic.jsonl"
    gold.write_text("{}\n")
    synthetic.write_text("{}\n")
    return gold, synthetic


def test_manifest_two_stage(two_files: tuple[Path, Path]) -> None:
    gold, synthetic = two_files
    manifest = emit_training_manifest(gold, synthetic, "two_stage")
    assert manifest == {
        "strategy": "two_stage",
        "stages": [
            {"files": [str(gold), str(synthetic)], "ratio": [1, 1]},
            {"files": [str(gold)], "ratio": [1]},
        ],
    }


def test_manifest_single_stages(two_files: tuple[Path, Path]) -> None:
    gold, synthetic = two_files
    assert emit_training_manifest(gold, synthetic, "gold")["stages"] == [
        {"files": [str(gold)], "ratio": [1]}
    ]
    assert emit_training_manifest(gold, synthetic, "mix_1_3")["stages"] == [
        {"files": [str(gold), str(synthetic)], "ratio": [1, 3]}
    ]


def test_manifest_unknown_strategy(two_files: tuple[Path, Path]) -> None:
    with pytest.raises(ValueError):
        emit_training_manifest(*two_files, "mix_9_9")


def test_manifest_missing_file(tmp_path: Path, two_files: tuple[Path, Path]) -> None:
    gold, _ = two_files
    with pytest.raises(FileNotFoundError):
        emit_training_manifest(gold, tmp_path / "absent.jsonl", "gold")
