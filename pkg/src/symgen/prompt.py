"""Knowledge rendering, demonstration handling and prompt assembly.

Prompts are built from up to four sections (knowledge, instruction,
demonstrations, query) laid out by a per-task template file.  All
functions here are pure; byte-identical inputs give byte-identical
prompts.  Token counts are a deliberate over-estimate so the context
budget is honored for any real tokenizer.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Sequence

from .core import (
    GenerationParams,
    Ontology,
    RelationalSchema,
    SymbolicKnowledge,
    TableSchema,
    Task,
    TextBlock,
)


class PromptBudgetError(ValueError):
    """Raised when knowledge + instruction alone exceed the context budget."""


@dataclass(frozen=True)
class Demonstration:
    input_text: str
    output_text: Optional[str] = None
    source: str = "seed"


@dataclass(frozen=True)
class PromptText:
    text: str
    token_estimate: int
    included_demo_count: int


@dataclass(frozen=True)
class TaskFormat:
    input_marker: str
    output_marker: Optional[str]
    question_instruction: str
    answer_instruction: str
    demo_separator: str = "\n\n"
    answer_primer: str = ""
    docstring_demos: bool = False


TASK_FORMATS: dict[Task, TaskFormat] = {
    Task.SQL: TaskFormat(
        input_marker="-- Question:",
        output_marker=None,
        question_instruction="-- Write a question that can be answered based on the above tables.",
        answer_instruction="-- Using valid SQLite, answer the following questions for the tables provided above.",
        demo_separator="\n\n ** EXAMPLE SEPARATOR **\n\n",
        answer_primer="SELECT",
    ),
    Task.BASH: TaskFormat(
        input_marker="Natural Language:",
        output_marker="Bash commands:",
        question_instruction="Translate the natural language description to bash commands.",
        answer_instruction="Translate the natural language description to bash commands.",
    ),
    Task.PYTHON: TaskFormat(
        input_marker="Natural Language Instruction for Python Code:",
        output_marker=None,
        question_instruction="Translate the natural language instructions to Python codes.",
        answer_instruction="",
        docstring_demos=True,
    ),
    Task.TOP: TaskFormat(
        input_marker="Natural Language:",
        output_marker="Logical Form:",
        question_instruction="Translate the natural language description to logical form with the above arguments.",
        answer_instruction="Translate the natural language description to logical form with the above arguments.",
    ),
    Task.QDMR: TaskFormat(
        input_marker="Question:",
        output_marker="Answer Steps:",
        question_instruction="Break down a question into the requisite steps for computing its answer.",
        answer_instruction="Break down a question into the requisite steps for computing its answer.",
        answer_primer="1#)",
    ),
    Task.EXTERNAL: TaskFormat(
        input_marker="Input:",
        output_marker="Output:",
        question_instruction="Write a new input for the program above.",
        answer_instruction="Answer the following inputs with the program above.",
    ),
}


def estimate_tokens(text: str) -> int:
    """Over-estimate: max of whitespace token count and ceil(chars / 4)."""
    if not text:
        return 0
    return max(len(text.split()), math.ceil(len(text) / 4))


def _float_decimals(value: float) -> int:
    text = repr(value)
    if "e" in text or "E" in text:
        return 6
    _, _, frac = text.partition(".")
    return max(len(frac.rstrip("0")), 1)


def _column_display(values: list) -> list[str]:
    floats = [v for v in values if isinstance(v, float)]
    decimals = max((_float_decimals(v) for v in floats), default=0)
    out = []
    for v in values:
        if isinstance(v, float):
            out.append(f"{v:.{decimals}f}")
        elif v is None:
            out.append("")
        else:
            out.append(str(v))
    return out


def _render_rows(table: TableSchema) -> list[str]:
    headers = [c.name for c in table.columns]
    columns = list(zip(*table.sample_rows))
    rendered = [_column_display(list(col)) for col in columns]
    widths = []
    for header, col, raw in zip(headers, rendered, columns):
        width = max(len(header), *(len(c) for c in col))
        # Numeric columns reserve a sign slot, as in the reference layout.
        if all(isinstance(v, (int, float)) for v in raw if v is not None) and any(
            v is not None for v in raw
        ):
            width += 1
        widths.append(width)
    lines = [" ".join(h.rjust(w) for h, w in zip(headers, widths))]
    for row_idx in range(len(table.sample_rows)):
        cells = [rendered[c][row_idx] for c in range(len(headers))]
        lines.append(" ".join(c.rjust(w) for c, w in zip(cells, widths)))
    return lines


def _render_table(table: TableSchema) -> str:
    decls = []
    for col in table.columns:
        decl = f'"{col.name}" {col.type}'
        if col.primary_key:
            decl += " PRIMARY KEY"
        decls.append(decl)
    for col in table.columns:
        if col.foreign_key is not None:
            ref_table, ref_col = col.foreign_key
            decls.append(
                f'FOREIGN KEY ("{col.name}") REFERENCES `{ref_table}`("{ref_col}")'
            )
    lines = [f'CREATE TABLE "{table.name}" ({", ".join(decls)})', "/*"]
    lines.append(f"3 example rows from table {table.name}:")
    lines.append(f"SELECT * FROM {table.name} LIMIT 3;")
    if table.sample_rows:
        lines.extend(_render_rows(table))
    lines.append("*/")
    return "\n".join(lines)


def render_knowledge(knowledge: SymbolicKnowledge) -> str:
    if isinstance(knowledge, RelationalSchema):
        return "\n\n".join(_render_table(t) for t in knowledge.tables)
    if isinstance(knowledge, Ontology):
        intents = " | ".join(
            f"{label}: {', '.join(suffixes)}"
            for label, suffixes in knowledge.intents.items()
        )
        slots = " | ".join(
            f"{label}: {', '.join(suffixes)}"
            for label, suffixes in knowledge.slots.items()
        )
        return f"{intents}\n{slots}"
    if isinstance(knowledge, TextBlock):
        return knowledge.text
    raise TypeError(f"unknown knowledge variant: {type(knowledge).__name__}")


def load_template(task: Task, mode: str, path: Optional[str] = None) -> str:
    """Template text for a task/mode pair; mode is question or answer."""
    if path is not None:
        return Path(path).read_text(encoding="utf-8").rstrip("\n")
    name = f"{task.value}_{mode}.txt"
    ref = resources.files("symgen.templates").joinpath(name)
    return ref.read_text(encoding="utf-8").rstrip("\n")


def _question_demo(fmt: TaskFormat, demo: Demonstration) -> str:
    return f"{fmt.input_marker} {demo.input_text}"


def _answer_demo(fmt: TaskFormat, demo: Demonstration) -> str:
    if demo.output_text is None:
        raise ValueError("answer demonstrations need outputs")
    if fmt.docstring_demos:
        return f'"""\n{demo.input_text}\n"""\n{demo.output_text}'
    if fmt.output_marker is None:
        return f"{fmt.input_marker} {demo.input_text}\n{demo.output_text}"
    return f"{fmt.input_marker} {demo.input_text}\n{fmt.output_marker} {demo.output_text}"


def _question_invite(fmt: TaskFormat) -> str:
    return f"{fmt.input_marker} "


def _answer_invite(fmt: TaskFormat, question: str) -> str:
    if fmt.docstring_demos:
        return f'"""\n{question}\n"""\n{fmt.answer_primer}'
    if fmt.output_marker is None:
        return f"{fmt.input_marker} {question}\n{fmt.answer_primer}"
    return f"{fmt.input_marker} {question}\n{fmt.output_marker} {fmt.answer_primer}"


def _assemble(
    task: Task,
    mode: str,
    knowledge: Optional[SymbolicKnowledge],
    instruction: Optional[str],
    demo_blocks: list[str],
    query: str,
    params: GenerationParams,
    template: Optional[str],
) -> PromptText:
    fmt = TASK_FORMATS[task]
    template_text = template if template is not None else load_template(task, mode)
    knowledge_text = render_knowledge(knowledge) if knowledge is not None else ""
    if instruction is None:
        instruction = (
            fmt.question_instruction if mode == "question" else fmt.answer_instruction
        )

    def build(blocks: list[str]) -> str:
        demos = "".join(block + fmt.demo_separator for block in blocks)
        text = template_text.format(
            knowledge=knowledge_text,
            instruction=instruction,
            demos=demos,
            query=query,
        )
        return text.lstrip("\n")

    blocks = list(demo_blocks)
    text = build(blocks)
    while estimate_tokens(text) > params.context_budget_tokens and blocks:
        blocks = blocks[1:]
        text = build(blocks)
    estimate = estimate_tokens(text)
    if estimate > params.context_budget_tokens:
        raise PromptBudgetError(
            f"prompt needs {estimate} tokens with no demonstrations; "
            f"budget is {params.context_budget_tokens}"
        )
    return PromptText(text=text, token_estimate=estimate, included_demo_count=len(blocks))


def assemble_question_prompt(
    knowledge: Optional[SymbolicKnowledge],
    instruction: Optional[str],
    demos: Sequence[Demonstration],
    params: GenerationParams,
    task: Task,
    template: Optional[str] = None,
) -> PromptText:
    fmt = TASK_FORMATS[task]
    blocks = [_question_demo(fmt, d) for d in demos]
    return _assemble(
        task, "question", knowledge, instruction, blocks, _question_invite(fmt),
        params, template,
    )


def assemble_answer_prompt(
    knowledge: Optional[SymbolicKnowledge],
    instruction: Optional[str],
    demo_pairs: Sequence[Demonstration],
    new_question: str,
    params: GenerationParams,
    task: Task,
    template: Optional[str] = None,
) -> PromptText:
    fmt = TASK_FORMATS[task]
    blocks = [_answer_demo(fmt, d) for d in demo_pairs]
    return _assemble(
        task, "answer", knowledge, instruction, blocks,
        _answer_invite(fmt, new_question), params, template,
    )


_TOKEN_SPLIT = re.compile(r"\s+")


def token_overlap_cosine(a: str, b: str) -> float:
    """Cosine over lowercased whitespace-token count vectors."""
    from collections import Counter

    ca = Counter(_TOKEN_SPLIT.split(a.lower().strip()) if a.strip() else [])
    cb = Counter(_TOKEN_SPLIT.split(b.lower().strip()) if b.strip() else [])
    if not ca or not cb:
        return 0.0
    dot = sum(count * cb[tok] for tok, count in ca.items())
    norm_a = math.sqrt(sum(c * c for c in ca.values()))
    norm_b = math.sqrt(sum(c * c for c in cb.values()))
    return dot / (norm_a * norm_b)


def retrieve_demonstrations(
    pool: Sequence[Demonstration],
    query: str,
    k: int,
    scorer: Optional[Callable[[str, str], float]] = None,
) -> list[Demonstration]:
    """Top-k most similar demonstrations, returned least similar first."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if scorer is None:
        scorer = token_overlap_cosine
    scored = [
        (scorer(d.input_text, query), idx, d) for idx, d in enumerate(pool)
    ]
    top = sorted(scored, key=lambda t: (-t[0], t[1]))[:k]
    ordered = sorted(top, key=lambda t: (t[0], t[1]))
    return [d for _, _, d in ordered]


__all__ = [
    "Demonstration",
    "PromptBudgetError",
    "PromptText",
    "TASK_FORMATS",
    "TaskFormat",
    "assemble_answer_prompt",
    "assemble_question_prompt",
    "estimate_tokens",
    "load_template",
    "render_knowledge",
    "retrieve_demonstrations",
    "token_overlap_cosine",
]
