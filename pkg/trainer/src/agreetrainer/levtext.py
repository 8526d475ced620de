"""Grammar-level text handling for edit spans and prompt inputs.

The wire grammar (version "1") is::

    span  ::= "[" domain "]" ( " " op ( " ; " op )* )?
    op    ::= "insert" slot " = " value
            | "substitute" slot " = " value
            | "delete" slot

This module walks that grammar *syntactically only*: no ontology, no slot or
value validation, no canonicalization. Slots and values are opaque strings.
That is all recursive inference needs — rewriting the previous-state region
of a prompt input with the model's own running belief — while every semantic
judgement stays in the evaluating toolkit. Malformed fragments are dropped
and counted, mirroring the evaluator's lenient reading, so a noisy model
cannot derail a prediction run.
"""

from __future__ import annotations

import re

__all__ = [
    "GRAMMAR_VERSION",
    "TextOp",
    "split_domain",
    "parse_ops",
    "apply_ops",
    "render_region",
    "render_span",
    "replace_state_region",
    "state_region",
]

GRAMMAR_VERSION = "1"

INSERT = "insert"
DELETE = "delete"
SUBSTITUTE = "substitute"
_KEYWORDS = (INSERT, SUBSTITUTE, DELETE)

_PREFIX = re.compile(r"^\[([^\[\]]*)\](?:\s+(.*))?$", re.DOTALL)

# A prompt input reads: "<task prefix> [<domain>] <state region> <speaker>: ..."
# The state region ends at the first speaker tag. The tag set is part of the
# prompt layout, not of any ontology.
SPEAKER_TAGS = ("employer", "candidate", "user", "system")

TextOp = tuple  # (kind, slot, value-or-None)


def split_domain(text: str):
    """``"[d] body"`` -> ``("d", "body")``; ``(None, text)`` when unprefixed."""
    match = _PREFIX.match(text.strip())
    if match is None:
        return None, text.strip()
    return match.group(1).strip(), (match.group(2) or "").strip()


def _parse_fragment(fragment: str):
    fragment = fragment.strip()
    if not fragment:
        return None
    keyword, _, rest = fragment.partition(" ")
    if keyword not in _KEYWORDS:
        return None
    rest = rest.strip()
    if keyword == DELETE:
        if not rest or "=" in rest:
            return None
        return (DELETE, rest, None)
    slot, sep, value = rest.partition("=")
    slot, value = slot.strip(), value.strip()
    if not sep or not slot or not value:
        return None
    return (keyword, slot, value)


def parse_ops(span_text: str):
    """``(domain, ops, dropped)`` — ops in textual order, one per slot (first
    wins), malformed fragments counted in ``dropped``, never raised."""
    domain, body = split_domain(span_text)
    if domain is None:
        return None, [], 1 if span_text.strip() else 0
    ops: list[TextOp] = []
    seen: set[str] = set()
    dropped = 0
    if body:
        for fragment in body.split(";"):
            op = _parse_fragment(fragment)
            if op is None or op[1] in seen:
                dropped += 1
                continue
            seen.add(op[1])
            ops.append(op)
    return domain, ops, dropped


def apply_ops(state: dict, ops) -> dict:
    """Fold ops into a copy of ``state``; inserts and substitutes both set,
    deletes pop, silently — lenient by design."""
    new_state = dict(state)
    for kind, slot, value in ops:
        if kind == DELETE:
            new_state.pop(slot, None)
        else:
            new_state[slot] = value
    return new_state


def render_region(state: dict) -> str:
    """State region text: ``"slot = value ; ..."`` in mapping order, or
    ``"none"`` when empty."""
    if not state:
        return "none"
    return " ; ".join("%s = %s" % (slot, value) for slot, value in state.items())


def render_span(domain: str, ops) -> str:
    body = " ; ".join(
        "%s %s" % (kind, slot) if value is None else "%s %s = %s" % (kind, slot, value)
        for kind, slot, value in ops
    )
    return "[%s]" % domain if not body else "[%s] %s" % (domain, body)


def _region_bounds(input_text: str):
    open_at = input_text.find("[")
    close_at = input_text.find("]", open_at + 1)
    if open_at == -1 or close_at == -1:
        raise ValueError("input has no [domain] marker: %r" % input_text[:60])
    start = close_at + 2  # skip "] "
    tag = re.compile(r"\b(?:%s): " % "|".join(SPEAKER_TAGS))
    match = tag.search(input_text, start)
    end = match.start() if match else len(input_text)
    return start, end


def state_region(input_text: str) -> str:
    start, end = _region_bounds(input_text)
    return input_text[start:end].strip()


def replace_state_region(input_text: str, new_region: str) -> str:
    """Swap the previous-state region of a prompt input for ``new_region``,
    leaving prefix, domain marker and context untouched."""
    start, end = _region_bounds(input_text)
    return "%s%s %s" % (input_text[:start], new_region, input_text[end:].lstrip())
