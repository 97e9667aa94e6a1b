"""SQLite execution for SQL candidates plus fixture construction.

Queries run read-only against a fixture database with a wall-clock
cutoff.  Result rows are normalized (floats rounded to 6 decimals,
blobs hex-encoded) and digested as a sorted multiset unless the query
says ORDER BY, in which case row order is part of the result.  Column
names never enter the digest; equivalent queries may label columns
differently.
"""

from __future__ import annotations

import re
import sqlite3
import time
from pathlib import Path
from typing import Optional, Sequence, Union

from ..core import ExecOutcome, RelationalSchema, canonical_json, exec_fail, exec_ok

_ORDER_BY = re.compile(r"\border\s+by\b", re.IGNORECASE)
_PROGRESS_OPCODES = 2000


def is_ordered(query: str) -> bool:
    return bool(_ORDER_BY.search(query))


def _normalize_cell(value):
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, bytes):
        return "0x" + value.hex()
    return value


def exec_sql(
    query: str, fixture: Union[str, Path], timeout_s: float = 5.0
) -> ExecOutcome:
    fixture = Path(fixture)
    if not fixture.exists():
        return exec_fail(f"fixture missing: {fixture}")
    started = time.monotonic()
    timed_out = False

    def watchdog() -> int:
        nonlocal timed_out
        if time.monotonic() - started > timeout_s:
            timed_out = True
            return 1
        return 0

    conn = sqlite3.connect(f"file:{fixture}?mode=ro", uri=True)
    try:
        conn.set_progress_handler(watchdog, _PROGRESS_OPCODES)
        try:
            cursor = conn.execute(query)
            rows = cursor.fetchall()
            columns = [d[0] for d in cursor.description] if cursor.description else []
        except sqlite3.Error as err:
            if timed_out:
                return exec_fail(f"timeout after {timeout_s}s")
            return exec_fail(f"sqlite: {err}")
        except Warning as err:
            return exec_fail(f"sqlite: {err}")
    finally:
        conn.close()

    ordered = is_ordered(query)
    normalized = [[_normalize_cell(v) for v in row] for row in rows]
    digest_rows = normalized if ordered else sorted(normalized, key=canonical_json)
    payload = {"columns": columns, "rows": normalized, "ordered": ordered}
    return exec_ok(payload, digest_basis=digest_rows)


def create_fixture(
    schema: RelationalSchema,
    path: Union[str, Path],
    row_order: Optional[dict[str, Sequence[int]]] = None,
) -> Path:
    """Materialize a relational schema (with its sample rows) as a SQLite file.

    ``row_order`` optionally permutes each table's rows by index, which
    lets tests check that unordered digests ignore storage order.
    """
    path = Path(path)
    if path.exists():
        path.unlink()
    conn = sqlite3.connect(path)
    try:
        for table in schema.tables:
            cols = []
            for col in table.columns:
                decl = f'"{col.name}" {col.type}'
                if col.primary_key:
                    decl += " PRIMARY KEY"
                cols.append(decl)
            for col in table.columns:
                if col.foreign_key is not None:
                    ref_table, ref_col = col.foreign_key
                    cols.append(
                        f'FOREIGN KEY ("{col.name}") REFERENCES "{ref_table}"("{ref_col}")'
                    )
            conn.execute(f'CREATE TABLE "{table.name}" ({", ".join(cols)})')
            rows = list(table.sample_rows)
            order = (row_order or {}).get(table.name)
            if order is not None:
                rows = [rows[i] for i in order]
            if rows:
                slots = ", ".join("?" for _ in table.columns)
                conn.executemany(
                    f'INSERT INTO "{table.name}" VALUES ({slots})', rows
                )
        conn.commit()
    finally:
        conn.close()
    return path
