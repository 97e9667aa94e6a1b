"""SQLite execution: result digests, ordering rules, failure modes."""

from __future__ import annotations

from pathlib import Path

import pytest

import _fixtures
from symgen.executors import create_fixture, exec_sql, is_ordered


@pytest.fixture(scope="module")
def db(tmp_path_factory: pytest.TempPathFactory) -> Path:
    path = tmp_path_factory.mktemp("sqlfix") / "college.sqlite"
    return create_fixture(_fixtures.department_schema(), path)


@pytest.fixture(scope="module")
def db_permuted(tmp_path_factory: pytest.TempPathFactory) -> Path:
    path = tmp_path_factory.mktemp("sqlfix") / "college_permuted.sqlite"
    order = {"department": (2, 0, 1), "head": (1, 2, 0), "management": (2, 1, 0)}
    return create_fixture(_fixtures.department_schema(), path, row_order=order)


def test_simple_query(db: Path) -> None:
    out = exec_sql("SELECT count(*) FROM head WHERE age > 52", db)
    assert out.status == "ok"
    assert out.payload == {"columns": ["count(*)"], "rows": [[2]], "ordered": False}


def test_column_aliases_do_not_change_digest(db: Path) -> None:
    a = exec_sql("SELECT name FROM head", db)
    b = exec_sql("SELECT h.name AS chief FROM head h", db)
    assert a.status == b.status == "ok"
    assert a.payload["columns"] != b.payload["columns"]
    assert a.digest == b.digest


def test_unordered_digest_ignores_storage_order(db: Path, db_permuted: Path) -> None:
    a = exec_sql("SELECT name FROM head", db)
    b = exec_sql("SELECT name FROM head", db_permuted)
    assert a.payload["rows"] != b.payload["rows"]
    assert a.digest == b.digest


def test_ordered_query_is_storage_independent(db: Path, db_permuted: Path) -> None:
    q = "SELECT name FROM head ORDER BY age"
    a = exec_sql(q, db)
    b = exec_sql(q, db_permuted)
    assert a.payload["rows"] == b.payload["rows"]
    assert a.digest == b.digest


def test_order_by_direction_changes_digest(db: Path) -> None:
    asc = exec_sql("SELECT name FROM head ORDER BY age ASC", db)
    desc = exec_sql("SELECT name FROM head ORDER BY age DESC", db)
    assert asc.payload["rows"] == desc.payload["rows"][::-1]
    assert asc.digest != desc.digest


def test_unordered_variants_agree(db: Path) -> None:
    # Same multiset produced by different surface forms.
    a = exec_sql("SELECT Department_ID FROM department", db)
    b = exec_sql("SELECT Department_ID FROM department WHERE Ranking > 0", db)
    assert a.digest == b.digest


def test_empty_result_is_ok(db: Path) -> None:
    out = exec_sql("SELECT name FROM head WHERE age > 99", db)
    assert out.status == "ok"
    assert out.payload["rows"] == []
    assert out.digest is not None


def test_float_cells_round_for_digest(db: Path) -> None:
    a = exec_sql("SELECT 1.0000000004", db)
    b = exec_sql("SELECT 1.0", db)
    assert a.digest == b.digest
    c = exec_sql("SELECT avg(age) FROM head", db)
    assert c.payload["rows"] == [[53.0]]


def test_syntax_error_fails(db: Path) -> None:
    out = exec_sql("SELEC name FROM head", db)
    assert out.status == "fail"
    assert "sqlite" in (out.fail_reason or "")


def test_missing_table_fails(db: Path) -> None:
    assert exec_sql("SELECT * FROM nowhere", db).status == "fail"


def test_writes_rejected(db: Path) -> None:
    out = exec_sql("INSERT INTO head VALUES (1, 'x', 'y', 2.0)", db)
    assert out.status == "fail"
    check = exec_sql("SELECT count(*) FROM head", db)
    assert check.payload["rows"] == [[3]]


def test_missing_fixture_fails(tmp_path: Path) -> None:
    out = exec_sql("SELECT 1", tmp_path / "nope.sqlite")
    assert out.status == "fail"
    assert "fixture missing" in (out.fail_reason or "")


def test_runaway_query_times_out(db: Path) -> None:
    query = (
        "WITH RECURSIVE c(x) AS (SELECT 1 UNION ALL SELECT x + 1 FROM c) "
        "SELECT count(*) FROM c"
    )
    out = exec_sql(query, db, timeout_s=0.2)
    assert out.status == "fail"
    assert "timeout" in (out.fail_reason or "")


@pytest.mark.parametrize(
    "query,expected",
    [
        ("SELECT 1", False),
        ("SELECT name FROM head ORDER BY age", True),
        ("select x from t order   by x desc", True),
        ("SELECT * FROM orders", False),
        ("SELECT * FROM t WHERE x = 'order by'", True),  # textual check, known coarse
    ],
)
def test_is_ordered(query: str, expected: bool) -> None:
    assert is_ordered(query) == expected
