"""Parser and canonical form for bracketed intent/slot trees.

Inputs look like ``[IN:GET_ALARM [SL:PERIOD Every day ] ]``.  A tree is
an intent whose children are slots; each slot holds utterance tokens
and/or nested intents.  The canonical serialization uses single spaces
with a space before every closing bracket, so surface whitespace
differences wash out.  Templates drop the utterance tokens and keep
the label structure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from ..core import ExecOutcome, exec_fail, exec_ok

_INTENT_RE = re.compile(r"^IN:[A-Z0-9_]+$")
_SLOT_RE = re.compile(r"^SL:[A-Z0-9_]+$")


class TopParseError(ValueError):
    pass


@dataclass(frozen=True)
class TopSlot:
    label: str
    parts: tuple[Union[str, "TopTree"], ...]


@dataclass(frozen=True)
class TopTree:
    label: str
    slots: tuple[TopSlot, ...]


def _lex(text: str) -> list[str]:
    return text.replace("[", " [ ").replace("]", " ] ").split()


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str:
        if self.pos >= len(self.tokens):
            raise TopParseError("unexpected end of input")
        return self.tokens[self.pos]

    def take(self) -> str:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise TopParseError(f"expected {tok!r}, got {got!r}")

    def parse_intent(self) -> TopTree:
        self.expect("[")
        label = self.take()
        if not _INTENT_RE.match(label):
            raise TopParseError(f"bad intent label {label!r}")
        slots = []
        while self.peek() != "]":
            if self.peek() != "[":
                raise TopParseError(
                    f"intent {label} may only contain slots, got {self.peek()!r}"
                )
            slots.append(self.parse_slot())
        self.expect("]")
        return TopTree(label, tuple(slots))

    def parse_slot(self) -> TopSlot:
        self.expect("[")
        label = self.take()
        if not _SLOT_RE.match(label):
            raise TopParseError(f"bad slot label {label!r}")
        parts: list[Union[str, TopTree]] = []
        while self.peek() != "]":
            if self.peek() == "[":
                parts.append(self.parse_intent())
            else:
                parts.append(self.take())
        self.expect("]")
        return TopSlot(label, tuple(parts))


def parse_top(text: str) -> TopTree:
    parser = _Parser(_lex(text))
    tree = parser.parse_intent()
    if parser.pos != len(parser.tokens):
        raise TopParseError("trailing tokens after tree")
    return tree


def serialize_top(tree: TopTree) -> str:
    pieces = [f"[{tree.label}"]
    for slot in tree.slots:
        pieces.append(_serialize_slot(slot))
    pieces.append("]")
    return " ".join(pieces)


def _serialize_slot(slot: TopSlot) -> str:
    pieces = [f"[{slot.label}"]
    for part in slot.parts:
        pieces.append(serialize_top(part) if isinstance(part, TopTree) else part)
    pieces.append("]")
    return " ".join(pieces)


def top_template(tree: TopTree) -> str:
    """Canonical form with all utterance tokens removed."""
    return serialize_top(_strip(tree))


def _strip(tree: TopTree) -> TopTree:
    slots = tuple(
        TopSlot(
            slot.label,
            tuple(_strip(p) for p in slot.parts if isinstance(p, TopTree)),
        )
        for slot in tree.slots
    )
    return TopTree(tree.label, slots)


def exec_top(text: str) -> ExecOutcome:
    try:
        canonical = serialize_top(parse_top(text))
    except TopParseError as err:
        return exec_fail(f"parse: {err}")
    return exec_ok(canonical)
