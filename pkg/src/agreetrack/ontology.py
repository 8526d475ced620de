"""Closed slot-value ontology for negotiation domains.

An :class:`Ontology` is the fixed set of negotiable issues (slots) and the
legal values each one can take. Every agreement state, dialogue-act payload
and belief span in this package is expressed over one ontology, so slot
iteration order is pinned to declaration order to keep downstream
serialization deterministic.
"""

from __future__ import annotations

import io
import json
import re
from pathlib import Path
from typing import Iterable, Mapping

__all__ = [
    "OntologyError",
    "Ontology",
    "canonicalize",
    "load_ontology",
    "builtin_ontology",
    "GPT_NEGOCHAT",
]

_WS = re.compile(r"\s+")


class OntologyError(ValueError):
    """Raised for schema violations and lookups that must not fail silently."""


def canonicalize(text: str) -> str:
    """Canonical form of a slot or value: lowercase, trimmed, inner whitespace collapsed.

    Idempotent. Purely lexical: numeric variants like "90,000" and "90k usd"
    stay distinct strings (reconciling surface forms is alias resolution's
    job, see :mod:`agreetrack.dialogue`).
    """
    canon = _WS.sub(" ", text.strip()).lower()
    if not canon:
        raise OntologyError("empty slot or value after trimming: %r" % text)
    return canon


class Ontology:
    """Immutable mapping of slot name -> ordered tuple of legal values."""

    def __init__(self, name: str, slots: Mapping[str, Iterable[str]]):
        self.name = name
        table: dict[str, tuple[str, ...]] = {}
        for slot, values in slots.items():
            slot_c = canonicalize(slot)
            if slot_c in table:
                raise OntologyError("duplicate slot %r" % slot_c)
            vals: list[str] = []
            for value in values:
                value_c = canonicalize(value)
                if value_c in vals:
                    raise OntologyError(
                        "duplicate value %r in slot %r" % (value_c, slot_c)
                    )
                vals.append(value_c)
            if not vals:
                raise OntologyError("slot %r has an empty value list" % slot_c)
            table[slot_c] = tuple(vals)
        if not table:
            raise OntologyError("empty ontology: no slots defined")
        self._slots = table
        self._order = {slot: i for i, slot in enumerate(table)}

    @property
    def slots(self) -> tuple[str, ...]:
        return tuple(self._slots)

    def has_slot(self, slot: str) -> bool:
        try:
            return canonicalize(slot) in self._slots
        except OntologyError:
            return False

    def values(self, slot: str) -> tuple[str, ...]:
        slot_c = canonicalize(slot)
        if slot_c not in self._slots:
            raise OntologyError("unknown slot %r in ontology %r" % (slot_c, self.name))
        return self._slots[slot_c]

    def is_legal(self, slot: str, value: str) -> bool:
        """True iff the canonical slot exists and the canonical value is legal for it."""
        try:
            slot_c = canonicalize(slot)
            value_c = canonicalize(value)
        except OntologyError:
            return False
        return value_c in self._slots.get(slot_c, ())

    def slot_position(self, slot: str) -> int:
        """Declaration index of ``slot``; unknown slots sort after all known ones."""
        return self._order.get(slot, len(self._order))

    def slot_sort_key(self, slot: str):
        return (self.slot_position(slot), slot)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "slots": [
                {"name": slot, "values": list(values)}
                for slot, values in self._slots.items()
            ],
        }

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Ontology)
            and self.name == other.name
            and self._slots == other._slots
        )

    def __repr__(self) -> str:
        return "Ontology(%r, %d slots)" % (self.name, len(self._slots))


def load_ontology(source) -> Ontology:
    """Build an :class:`Ontology` from a parsed document, a JSON file path, or a file object.

    Document shape: ``{"name": str, "slots": [{"name": str, "values": [str, ...]}, ...]}``.
    Schema violations raise :class:`OntologyError` naming the offending slot.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        doc = json.load(source)
    else:
        doc = source
    if not isinstance(doc, Mapping):
        raise OntologyError("ontology document must be a JSON object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise OntologyError("ontology document missing non-empty 'name'")
    raw_slots = doc.get("slots")
    if not isinstance(raw_slots, list):
        raise OntologyError("ontology document missing 'slots' list")
    slots: dict[str, list[str]] = {}
    for i, entry in enumerate(raw_slots):
        if not isinstance(entry, Mapping) or "name" not in entry or "values" not in entry:
            raise OntologyError("slot entry %d must have 'name' and 'values'" % i)
        slot = entry["name"]
        values = entry["values"]
        if not isinstance(slot, str):
            raise OntologyError("slot entry %d: name must be a string" % i)
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise OntologyError("slot %r: values must be a list of strings" % slot)
        if canonicalize(slot) in {canonicalize(s) for s in slots}:
            raise OntologyError("duplicate slot %r at entry %d" % (slot, i))
        slots[slot] = values
    return Ontology(name, slots)


# The job-offer negotiation ontology: six issues, each with its closed value set.
_GPT_NEGOCHAT_DOC = {
    "name": "gpt-negochat",
    "slots": [
        {"name": "working hours", "values": ["8 hours", "9 hours", "10 hours"]},
        {"name": "pension fund", "values": ["10%", "20%"]},
        {
            "name": "job description",
            "values": ["programmer", "team manager", "project manager"],
        },
        {
            "name": "promotion possibilities",
            "values": ["slow promotion track", "fast promotion track"],
        },
        {"name": "salary", "values": ["90k usd", "60k usd", "120k usd"]},
        {
            "name": "leased car",
            "values": ["with leased car", "without leased car", "no agreement"],
        },
    ],
}

GPT_NEGOCHAT = load_ontology(_GPT_NEGOCHAT_DOC)


def builtin_ontology(name: str = "gpt-negochat") -> Ontology:
    if name != "gpt-negochat":
        raise OntologyError("no builtin ontology named %r" % name)
    return GPT_NEGOCHAT
