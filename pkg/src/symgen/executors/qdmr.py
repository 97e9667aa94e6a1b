"""Step-decomposition parser for question breakdown tasks.

Input is a flat string of numbered steps, ``1#) return dogs 2#) return
number of #1``.  Steps normalize to lowercase collapsed text with the
leading "return" dropped; ``#k`` tokens must point at earlier steps and
are remapped to step positions so differently numbered but structurally
identical decompositions compare equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..core import ExecOutcome, exec_fail, exec_ok, normalize_text

_MARK = re.compile(r"(\d+)#\)")
_REF = re.compile(r"#(\d+)")


class QdmrParseError(ValueError):
    pass


@dataclass(frozen=True)
class QdmrGraph:
    steps: tuple[str, ...]
    # (step, referenced earlier step), both 1-based positions
    edges: tuple[tuple[int, int], ...]


def parse_qdmr(text: str) -> QdmrGraph:
    text = text.strip()
    marks = list(_MARK.finditer(text))
    if not marks:
        raise QdmrParseError("no step markers")
    if marks[0].start() != 0:
        raise QdmrParseError("text before first step marker")

    numbers = []
    bodies = []
    for i, mark in enumerate(marks):
        end = marks[i + 1].start() if i + 1 < len(marks) else len(text)
        numbers.append(int(mark.group(1)))
        bodies.append(text[mark.end() : end])

    position: dict[int, int] = {}
    steps: list[str] = []
    edges: list[tuple[int, int]] = []
    for pos, (number, body) in enumerate(zip(numbers, bodies), start=1):
        if number in position:
            raise QdmrParseError(f"duplicate step marker {number}")
        step = normalize_text(body)
        if step.startswith("return "):
            step = step[len("return ") :]
        if not step or step == "return":
            raise QdmrParseError(f"empty step {number}")

        def remap(match: re.Match) -> str:
            ref = int(match.group(1))
            if ref not in position:
                raise QdmrParseError(
                    f"step {number} references step {ref} which is not an earlier step"
                )
            edges.append((pos, position[ref]))
            return f"#{position[ref]}"

        steps.append(_REF.sub(remap, step))
        position[number] = pos
    return QdmrGraph(tuple(steps), tuple(edges))


def exec_qdmr(text: str) -> ExecOutcome:
    try:
        graph = parse_qdmr(text)
    except QdmrParseError as err:
        return exec_fail(f"parse: {err}")
    return exec_ok(list(graph.steps))
