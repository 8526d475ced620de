"""Belief-span edit codec: diff, apply, render and parse of agreement-state deltas.

A span pairs a bracketed domain prefix with slot-level edit operations that
turn one agreement state into the next. The wire grammar (version
``LEV_GRAMMAR_VERSION``, bit-exact, shared with the trainer) is::

    span  ::= "[" domain "]" ( " " op ( " ; " op )* )?
    op    ::= "insert" slot " = " value
            | "substitute" slot " = " value
            | "delete" slot

All tokens are canonical lowercase. Ops are ordered by ontology slot order so
equal spans render to equal strings. Slots and values must not contain ";" or
"="; the ontology never produces such names and the parser treats them as
malformed ops.

Parsing has two modes. Strict mode (for gold data) raises
:class:`LevParseError` on any malformation; the error classes are:
``missing domain prefix``, ``unknown domain``, ``empty op``, ``unknown op
keyword``, ``missing slot``, ``missing value``, ``unexpected value`` (on
delete), and ``duplicate slot``. Lenient mode (for model output) never
raises: bad fragments are dropped and reported, unknown slots and values are
kept as-is so the metrics, not the parser, penalize hallucination.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .ontology import Ontology

__all__ = [
    "LEV_GRAMMAR_VERSION",
    "DOMAINS",
    "INSERT",
    "DELETE",
    "SUBSTITUTE",
    "LevParseError",
    "EditOp",
    "LevSpan",
    "LevParseReport",
    "diff",
    "apply_span",
    "render",
    "parse",
    "parse_report",
    "render_state",
    "parse_state",
    "random_state",
    "random_span",
]

LEV_GRAMMAR_VERSION = "1"

DOMAINS = ("gpt-negochat", "multiwoz")

INSERT = "insert"
DELETE = "delete"
SUBSTITUTE = "substitute"
_OP_KINDS = (INSERT, DELETE, SUBSTITUTE)

_PREFIX = re.compile(r"^\[([^\[\]]+)\]\s*(.*)$", re.DOTALL)


class LevParseError(ValueError):
    pass


@dataclass(frozen=True)
class EditOp:
    kind: str
    slot: str
    value: str | None = None

    def __post_init__(self):
        if self.kind not in _OP_KINDS:
            raise ValueError("unknown op kind %r" % self.kind)
        if self.kind == DELETE and self.value is not None:
            raise ValueError("delete op must not carry a value")
        if self.kind != DELETE and not self.value:
            raise ValueError("%s op requires a value" % self.kind)
        if not self.slot:
            raise ValueError("op requires a slot")

    def rendered(self) -> str:
        if self.kind == DELETE:
            return "delete %s" % self.slot
        return "%s %s = %s" % (self.kind, self.slot, self.value)


@dataclass(frozen=True)
class LevSpan:
    """Domain prefix plus an ordered tuple of edit ops, at most one per slot."""

    domain: str
    ops: tuple[EditOp, ...] = ()

    def __post_init__(self):
        slots = [op.slot for op in self.ops]
        if len(slots) != len(set(slots)):
            raise ValueError("a slot appears in more than one op")

    @property
    def is_empty(self) -> bool:
        return not self.ops


def _sorted_ops(ops: Iterable[EditOp], ontology: Ontology | None) -> tuple[EditOp, ...]:
    if ontology is None:
        return tuple(sorted(ops, key=lambda op: op.slot))
    return tuple(sorted(ops, key=lambda op: ontology.slot_sort_key(op.slot)))


def diff(
    prev: Mapping[str, str],
    cur: Mapping[str, str],
    domain: str = "gpt-negochat",
    ontology: Ontology | None = None,
) -> LevSpan:
    """Edit ops turning ``prev`` into ``cur``: insert new slots, delete vanished
    ones, substitute changed values. ``apply_span(prev, diff(prev, cur))`` always
    reproduces ``cur``."""
    ops = []
    for slot, value in cur.items():
        if slot not in prev:
            ops.append(EditOp(INSERT, slot, value))
        elif prev[slot] != value:
            ops.append(EditOp(SUBSTITUTE, slot, value))
    for slot in prev:
        if slot not in cur:
            ops.append(EditOp(DELETE, slot))
    return LevSpan(domain, _sorted_ops(ops, ontology))


def apply_span(
    prev: Mapping[str, str], lev: LevSpan, strict: bool = False
) -> dict[str, str]:
    """Apply ``lev`` to ``prev`` and return the new state.

    Lenient by default: delete of a missing slot is a no-op, substitute of a
    missing slot inserts, insert over an existing slot overwrites. With
    ``strict=True`` each of those conflicts raises instead, naming the op.
    """
    state = dict(prev)
    for op in lev.ops:
        if op.kind == INSERT:
            if strict and op.slot in state:
                raise ValueError("insert on existing slot: %s" % op.rendered())
            state[op.slot] = op.value
        elif op.kind == SUBSTITUTE:
            if strict and op.slot not in state:
                raise ValueError("substitute on missing slot: %s" % op.rendered())
            state[op.slot] = op.value
        else:
            if strict and op.slot not in state:
                raise ValueError("delete on missing slot: %s" % op.rendered())
            state.pop(op.slot, None)
    return state


def render(lev: LevSpan) -> str:
    """Deterministic textual form; the empty span renders to just the prefix."""
    prefix = "[%s]" % lev.domain
    if not lev.ops:
        return prefix
    return prefix + " " + " ; ".join(op.rendered() for op in lev.ops)


@dataclass
class LevParseReport:
    """Outcome of a lenient parse: the span plus what had to be discarded."""

    span: LevSpan
    dropped: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def clean(self) -> bool:
        return not self.dropped and self.error is None


def _parse_op(fragment: str) -> EditOp:
    body = fragment.strip()
    if not body:
        raise LevParseError("empty op")
    head, _, rest = body.partition(" ")
    if head not in _OP_KINDS:
        raise LevParseError("unknown op keyword %r" % head)
    if head == DELETE:
        slot = rest.strip()
        if "=" in slot:
            raise LevParseError("unexpected value on delete: %r" % body)
        if not slot:
            raise LevParseError("missing slot: %r" % body)
        return EditOp(DELETE, slot)
    slot, eq, value = rest.partition("=")
    slot = slot.strip()
    value = value.strip()
    if not eq or not value:
        raise LevParseError("missing value on %s: %r" % (head, body))
    if not slot:
        raise LevParseError("missing slot: %r" % body)
    return EditOp(head, slot, value)


def parse_report(
    text: str,
    ontology: Ontology | None = None,
    strict: bool = False,
    domains: tuple[str, ...] = DOMAINS,
    default_domain: str = "gpt-negochat",
) -> LevParseReport:
    """Parse a span; in lenient mode malformed fragments are dropped, not fatal."""
    match = _PREFIX.match(text.strip())
    if match is None:
        if strict:
            raise LevParseError("missing domain prefix: %r" % text)
        report = LevParseReport(LevSpan(default_domain, ()))
        if text.strip():
            report.dropped.append(text.strip())
        report.error = "missing domain prefix"
        return report
    domain, rest = match.group(1).strip(), match.group(2).strip()
    if domain not in domains:
        if strict:
            raise LevParseError("unknown domain %r" % domain)
    report = LevParseReport(LevSpan(domain, ()))
    ops: list[EditOp] = []
    seen: set[str] = set()
    if rest:
        for fragment in rest.split(";"):
            try:
                op = _parse_op(fragment)
            except LevParseError:
                if strict:
                    raise
                report.dropped.append(fragment.strip())
                continue
            if op.slot in seen:
                if strict:
                    raise LevParseError("duplicate slot %r" % op.slot)
                report.dropped.append(fragment.strip())
                continue
            seen.add(op.slot)
            ops.append(op)
    report.span = LevSpan(domain, _sorted_ops(ops, ontology))
    return report


def parse(
    text: str,
    ontology: Ontology | None = None,
    strict: bool = False,
    domains: tuple[str, ...] = DOMAINS,
    default_domain: str = "gpt-negochat",
) -> LevSpan:
    return parse_report(text, ontology, strict, domains, default_domain).span


def render_state(state: Mapping[str, str], ontology: Ontology | None = None) -> str:
    """Full-state belief-span form: ``slot = value ; ...`` in ontology order, "none" if empty."""
    if not state:
        return "none"
    if ontology is None:
        slots = sorted(state)
    else:
        slots = sorted(state, key=ontology.slot_sort_key)
    return " ; ".join("%s = %s" % (slot, state[slot]) for slot in slots)


def parse_state(text: str) -> dict[str, str]:
    """Inverse of :func:`render_state`."""
    body = text.strip()
    if not body or body == "none":
        return {}
    state: dict[str, str] = {}
    for fragment in body.split(";"):
        slot, eq, value = fragment.partition("=")
        slot = slot.strip()
        value = value.strip()
        if not eq or not slot or not value:
            raise LevParseError("malformed state fragment %r" % fragment.strip())
        if slot in state:
            raise LevParseError("duplicate slot %r in state span" % slot)
        state[slot] = value
    return state


def random_state(ontology: Ontology, rng: random.Random) -> dict[str, str]:
    """Uniform-ish random agreement state over the ontology (each slot present w.p. 1/2)."""
    state = {}
    for slot in ontology.slots:
        if rng.random() < 0.5:
            state[slot] = rng.choice(ontology.values(slot))
    return state


def random_span(
    ontology: Ontology, rng: random.Random, domain: str = "gpt-negochat"
) -> LevSpan:
    """Random valid span over the ontology, for round-trip and algebra tests."""
    ops = []
    for slot in ontology.slots:
        roll = rng.random()
        if roll < 0.55:
            continue
        if roll < 0.70:
            ops.append(EditOp(DELETE, slot))
        elif roll < 0.85:
            ops.append(EditOp(INSERT, slot, rng.choice(ontology.values(slot))))
        else:
            ops.append(EditOp(SUBSTITUTE, slot, rng.choice(ontology.values(slot))))
    return LevSpan(domain, _sorted_ops(ops, ontology))
