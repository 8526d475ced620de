"""Data model and ingestion for annotated negotiation dialogues.

Corpus schema (one JSON document per corpus)::

    {"name": str?, "dialogues": [
        {"id": str, "turns": [
            {"speaker": "employer"|"candidate",
             "text": str,
             "acts": [{"kind": "offer"|"accept"|"reject"|"other",
                       "pairs": [[slot, value], ...]?}, ...]?,
             "state": {slot: value, ...}?},
        ...]},
    ...]}

Schema "turns" are raw utterances; loading merges consecutive same-speaker
utterances into alternating turns (acts concatenate, the merged turn's gold
state is the last annotated state in the run). Annotated slots and values go
through alias resolution (surface spellings like "90,000" or slot "company
car" map onto the ontology's "90k usd" / "leased car"); in strict mode any
annotation that is still out-of-ontology afterwards is an error, in lenient
mode it is kept and flagged in the load report.
"""

from __future__ import annotations

import io
import json
import statistics
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .ontology import Ontology, OntologyError, canonicalize

__all__ = [
    "EMPLOYER",
    "CANDIDATE",
    "SPEAKERS",
    "ACT_KINDS",
    "OFFER",
    "ACCEPT",
    "REJECT",
    "OTHER",
    "CorpusError",
    "Utterance",
    "DialogueAct",
    "Turn",
    "AnnotatedDialogue",
    "AliasTable",
    "CorpusReport",
    "StatsReport",
    "other_speaker",
    "merge_consecutive",
    "load_aliases",
    "default_aliases",
    "resolve_slot",
    "resolve_alias",
    "load_corpus",
    "serialize_corpus",
    "builtin_corpus_path",
    "load_builtin_corpus",
    "dialogue_stats",
]

EMPLOYER = "employer"
CANDIDATE = "candidate"
SPEAKERS = (EMPLOYER, CANDIDATE)

OFFER = "offer"
ACCEPT = "accept"
REJECT = "reject"
OTHER = "other"
ACT_KINDS = (OFFER, ACCEPT, REJECT, OTHER)


class CorpusError(ValueError):
    pass


def other_speaker(speaker: str) -> str:
    if speaker == EMPLOYER:
        return CANDIDATE
    if speaker == CANDIDATE:
        return EMPLOYER
    raise CorpusError("unknown speaker %r" % speaker)


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str
    index: int = 0

    def __post_init__(self):
        if self.speaker not in SPEAKERS:
            raise CorpusError("unknown speaker %r" % self.speaker)
        if not self.text.strip():
            raise CorpusError("empty utterance text at index %d" % self.index)


@dataclass(frozen=True)
class DialogueAct:
    """One dialogue act; offers always carry slot-value pairs, accept/reject
    may carry them to scope a partial acceptance/rejection, other never does."""

    kind: str
    pairs: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        if self.kind not in ACT_KINDS:
            raise CorpusError("unknown act kind %r" % self.kind)
        if self.kind == OFFER:
            if not self.pairs:
                raise CorpusError("offer act requires at least one slot-value pair")
        if self.kind == OTHER and self.pairs:
            raise CorpusError("other act must not carry a payload")
        if self.pairs is not None:
            slots = [slot for slot, _ in self.pairs]
            if len(slots) != len(set(slots)):
                raise CorpusError("act payload repeats a slot: %r" % (self.pairs,))


@dataclass(frozen=True)
class Turn:
    """A merged turn: the utterance, its acts (None when unannotated), and the
    full gold agreement state as of the end of this turn."""

    utterance: Utterance
    acts: tuple[DialogueAct, ...] | None
    gold_state: dict[str, str]


@dataclass
class AnnotatedDialogue:
    id: str
    turns: list[Turn]
    raw_utterance_count: int
    has_gold_states: bool = True


def merge_consecutive(utterances: list[Utterance]) -> list[Utterance]:
    """Collapse consecutive same-speaker utterances (texts joined by one space)
    so output speakers strictly alternate; re-indexed from 0. Idempotent."""
    if not utterances:
        raise CorpusError("cannot merge an empty utterance list")
    merged: list[Utterance] = []
    for utt in utterances:
        if merged and merged[-1].speaker == utt.speaker:
            prev = merged[-1]
            merged[-1] = Utterance(prev.speaker, prev.text + " " + utt.text, prev.index)
        else:
            merged.append(Utterance(utt.speaker, utt.text, len(merged)))
    return merged


@dataclass
class AliasTable:
    """Slot and per-slot value aliases, loaded from a JSON data file."""

    slots: dict[str, str] = field(default_factory=dict)
    values: dict[str, dict[str, str]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AliasTable":
        slots = {canonicalize(k): canonicalize(v) for k, v in doc.get("slots", {}).items()}
        values = {
            canonicalize(slot): {canonicalize(k): canonicalize(v) for k, v in table.items()}
            for slot, table in doc.get("values", {}).items()
        }
        return cls(slots=slots, values=values)


def load_aliases(source) -> AliasTable:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = source
    return AliasTable.from_dict(doc)


def default_aliases() -> AliasTable:
    ref = resources.files("agreetrack.data").joinpath("gpt_negochat_aliases.json")
    return AliasTable.from_dict(json.loads(ref.read_text(encoding="utf-8")))


_DEFAULT_ALIASES: AliasTable | None = None


def _aliases_or_default(aliases: AliasTable | None) -> AliasTable:
    global _DEFAULT_ALIASES
    if aliases is not None:
        return aliases
    if _DEFAULT_ALIASES is None:
        _DEFAULT_ALIASES = default_aliases()
    return _DEFAULT_ALIASES


def resolve_slot(
    ontology: Ontology, surface: str, aliases: AliasTable | None = None
) -> str:
    """Canonical ontology slot for a surface slot spelling; raises on unknown slots."""
    aliases = _aliases_or_default(aliases)
    slot = canonicalize(surface)
    slot = aliases.slots.get(slot, slot)
    if not ontology.has_slot(slot):
        raise OntologyError("unknown slot %r" % surface)
    return slot


def resolve_alias(
    ontology: Ontology, slot: str, surface: str, aliases: AliasTable | None = None
) -> str:
    """Ontology value for a surface value spelling under ``slot``.

    The slot itself may be a surface spelling. If neither the canonicalized
    surface nor a registered alias matches a legal value, the canonicalized
    surface is returned unchanged (out-of-ontology handling is the caller's
    strictness decision).
    """
    aliases = _aliases_or_default(aliases)
    slot_c = resolve_slot(ontology, slot, aliases)
    value = canonicalize(surface)
    value = aliases.values.get(slot_c, {}).get(value, value)
    return value


@dataclass
class CorpusReport:
    """Lenient-mode load diagnostics."""

    dialogue_count: int = 0
    raw_utterance_count: int = 0
    violations: list[dict] = field(default_factory=list)

    def flag(self, dialogue_id: str, turn_index: int, slot: str, value: str | None, where: str):
        self.violations.append(
            {
                "dialogue_id": dialogue_id,
                "turn": turn_index,
                "slot": slot,
                "value": value,
                "where": where,
            }
        )

    def emit(self, stream=None):
        stream = stream if stream is not None else sys.stderr
        for v in self.violations:
            print(
                "out-of-ontology %s: dialogue=%s turn=%d slot=%r value=%r"
                % (v["where"], v["dialogue_id"], v["turn"], v["slot"], v["value"]),
                file=stream,
            )

    def to_dict(self) -> dict:
        return {
            "dialogue_count": self.dialogue_count,
            "raw_utterance_count": self.raw_utterance_count,
            "violation_count": len(self.violations),
            "violations": self.violations,
        }


def _resolve_pair(
    ontology: Ontology,
    aliases: AliasTable,
    dialogue_id: str,
    turn_index: int,
    slot: str,
    value: str,
    where: str,
    strict: bool,
    report: CorpusReport,
) -> tuple[str, str]:
    try:
        slot_c = resolve_slot(ontology, slot, aliases)
    except OntologyError:
        if strict:
            raise CorpusError(
                "dialogue %r turn %d: unknown slot %r in %s"
                % (dialogue_id, turn_index, slot, where)
            )
        report.flag(dialogue_id, turn_index, canonicalize(slot), canonicalize(value), where)
        return canonicalize(slot), canonicalize(value)
    value_c = resolve_alias(ontology, slot_c, value, aliases)
    if not ontology.is_legal(slot_c, value_c):
        if strict:
            raise CorpusError(
                "dialogue %r turn %d: illegal value %r for slot %r in %s"
                % (dialogue_id, turn_index, value, slot_c, where)
            )
        report.flag(dialogue_id, turn_index, slot_c, value_c, where)
    return slot_c, value_c


def _parse_act(raw: Mapping, dialogue_id: str, turn_index: int) -> tuple[str, list]:
    if not isinstance(raw, Mapping) or "kind" not in raw:
        raise CorpusError(
            "dialogue %r turn %d: act entry must be an object with 'kind'"
            % (dialogue_id, turn_index)
        )
    kind = raw["kind"]
    if not isinstance(kind, str) or kind.lower() not in ACT_KINDS:
        raise CorpusError(
            "dialogue %r turn %d: unknown act kind %r" % (dialogue_id, turn_index, kind)
        )
    pairs = raw.get("pairs")
    if pairs is not None and (
        not isinstance(pairs, list)
        or not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in pairs)
    ):
        raise CorpusError(
            "dialogue %r turn %d: act pairs must be [slot, value] lists"
            % (dialogue_id, turn_index)
        )
    return kind.lower(), pairs


def load_corpus(
    source,
    ontology: Ontology,
    strict: bool = True,
    aliases: AliasTable | None = None,
    report: CorpusReport | None = None,
) -> list[AnnotatedDialogue]:
    """Load and validate a corpus document (parsed dict, JSON file path, or file object).

    Returns merged, alternating-turn dialogues with alias-resolved annotations.
    Pass a :class:`CorpusReport` to collect lenient-mode diagnostics.
    """
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        doc = json.load(source)
    else:
        doc = source
    if not isinstance(doc, Mapping) or not isinstance(doc.get("dialogues"), list):
        raise CorpusError("corpus document must be an object with a 'dialogues' list")
    aliases = _aliases_or_default(aliases)
    report = report if report is not None else CorpusReport()

    dialogues: list[AnnotatedDialogue] = []
    seen_ids: set[str] = set()
    for d_idx, raw_dialogue in enumerate(doc["dialogues"]):
        if not isinstance(raw_dialogue, Mapping):
            raise CorpusError("dialogue entry %d is not an object" % d_idx)
        dialogue_id = raw_dialogue.get("id")
        if not isinstance(dialogue_id, str) or not dialogue_id:
            raise CorpusError("dialogue entry %d missing non-empty 'id'" % d_idx)
        if dialogue_id in seen_ids:
            raise CorpusError("duplicate dialogue id %r" % dialogue_id)
        seen_ids.add(dialogue_id)
        raw_turns = raw_dialogue.get("turns")
        if not isinstance(raw_turns, list) or not raw_turns:
            raise CorpusError("empty dialogue %r" % dialogue_id)

        # Parse raw utterances, then merge same-speaker runs into turns.
        group_key = None
        groups: list[dict] = []
        any_state = False
        any_acts = False
        for u_idx, raw_turn in enumerate(raw_turns):
            if not isinstance(raw_turn, Mapping):
                raise CorpusError("dialogue %r turn %d is not an object" % (dialogue_id, u_idx))
            speaker = raw_turn.get("speaker")
            if speaker not in SPEAKERS:
                raise CorpusError(
                    "dialogue %r turn %d: speaker must be one of %s, got %r"
                    % (dialogue_id, u_idx, "/".join(SPEAKERS), speaker)
                )
            text = raw_turn.get("text")
            if not isinstance(text, str) or not text.strip():
                raise CorpusError("dialogue %r turn %d: empty text" % (dialogue_id, u_idx))
            if speaker != group_key:
                groups.append({"speaker": speaker, "texts": [], "acts": None, "state": None})
                group_key = speaker
            group = groups[-1]
            group["texts"].append(text.strip())
            if "acts" in raw_turn and raw_turn["acts"] is not None:
                any_acts = True
                acts = group["acts"] or []
                for raw_act in raw_turn["acts"]:
                    kind, pairs = _parse_act(raw_act, dialogue_id, u_idx)
                    resolved = None
                    if pairs is not None:
                        resolved = tuple(
                            _resolve_pair(
                                ontology, aliases, dialogue_id, u_idx,
                                slot, value, "act payload", strict, report,
                            )
                            for slot, value in pairs
                        )
                    if kind == OTHER:
                        resolved = None
                    acts.append(DialogueAct(kind, resolved if resolved else None))
                group["acts"] = acts
            if "state" in raw_turn and raw_turn["state"] is not None:
                state_raw = raw_turn["state"]
                if not isinstance(state_raw, Mapping):
                    raise CorpusError(
                        "dialogue %r turn %d: state must be an object" % (dialogue_id, u_idx)
                    )
                any_state = True
                state = {}
                for slot, value in state_raw.items():
                    slot_c, value_c = _resolve_pair(
                        ontology, aliases, dialogue_id, u_idx,
                        slot, str(value), "gold state", strict, report,
                    )
                    state[slot_c] = value_c
                group["state"] = state

        turns: list[Turn] = []
        prev_state: dict[str, str] = {}
        for t_idx, group in enumerate(groups):
            utt = Utterance(group["speaker"], " ".join(group["texts"]), t_idx)
            state = group["state"] if group["state"] is not None else dict(prev_state)
            acts = tuple(group["acts"]) if group["acts"] is not None else None
            turns.append(Turn(utt, acts, state))
            prev_state = state
        dialogues.append(
            AnnotatedDialogue(
                id=dialogue_id,
                turns=turns,
                raw_utterance_count=len(raw_turns),
                has_gold_states=any_state,
            )
        )
        report.raw_utterance_count += len(raw_turns)
        if not any_acts and not any_state:
            # A corpus row with neither annotation layer is almost certainly a
            # conversion bug; surface it in strict mode.
            if strict:
                raise CorpusError("dialogue %r carries no act or state annotations" % dialogue_id)
    report.dialogue_count = len(dialogues)
    return dialogues


def serialize_corpus(dialogues: Iterable[AnnotatedDialogue], name: str = "corpus") -> dict:
    """Corpus-schema document for a list of (merged) dialogues; inverse of load_corpus
    up to merging and alias resolution."""
    out = {"name": name, "dialogues": []}
    for dialogue in dialogues:
        turns = []
        for turn in dialogue.turns:
            entry: dict = {"speaker": turn.utterance.speaker, "text": turn.utterance.text}
            if turn.acts is not None:
                entry["acts"] = [
                    {"kind": act.kind, **({"pairs": [list(p) for p in act.pairs]} if act.pairs else {})}
                    for act in turn.acts
                ]
            if dialogue.has_gold_states:
                entry["state"] = dict(turn.gold_state)
            turns.append(entry)
        out["dialogues"].append({"id": dialogue.id, "turns": turns})
    return out


def builtin_corpus_path() -> Path:
    """Path of the bundled synthetic GPT-Negochat stand-in corpus."""
    ref = resources.files("agreetrack.data").joinpath("gpt_negochat.json")
    return Path(str(ref))


def load_builtin_corpus(
    ontology: Ontology, strict: bool = True, report: CorpusReport | None = None
) -> list[AnnotatedDialogue]:
    return load_corpus(builtin_corpus_path(), ontology, strict=strict, report=report)


def _tokens(text: str) -> int:
    return len(text.split())


@dataclass
class StatsReport:
    """Corpus-level statistics.

    "Turn length" is reported under every defensible definition: turns per
    dialogue (raw utterances vs merged turns) and mean whitespace tokens per
    turn (again raw vs merged), because annotation conventions differ on which
    one a corpus quotes.
    """

    dialogue_count: int
    raw_utterance_count: int
    merged_turn_count: int
    mean_raw_utterances_per_dialogue: float
    mean_merged_turns_per_dialogue: float
    median_merged_turns_per_dialogue: float
    mean_tokens_per_raw_utterance: float
    mean_tokens_per_merged_turn: float
    slot_agreement_dialogues: dict[str, int]
    slot_final_values: dict[str, dict[str, int]]

    def to_dict(self) -> dict:
        return {
            "dialogue_count": self.dialogue_count,
            "raw_utterance_count": self.raw_utterance_count,
            "merged_turn_count": self.merged_turn_count,
            "mean_raw_utterances_per_dialogue": self.mean_raw_utterances_per_dialogue,
            "mean_merged_turns_per_dialogue": self.mean_merged_turns_per_dialogue,
            "median_merged_turns_per_dialogue": self.median_merged_turns_per_dialogue,
            "mean_tokens_per_raw_utterance": self.mean_tokens_per_raw_utterance,
            "mean_tokens_per_merged_turn": self.mean_tokens_per_merged_turn,
            "slot_agreement_dialogues": self.slot_agreement_dialogues,
            "slot_final_values": self.slot_final_values,
        }


def dialogue_stats(corpus: list[AnnotatedDialogue]) -> StatsReport:
    if not corpus:
        raise CorpusError("empty corpus")
    merged_counts = [len(d.turns) for d in corpus]
    raw_counts = [d.raw_utterance_count for d in corpus]
    merged_tokens = [_tokens(t.utterance.text) for d in corpus for t in d.turns]
    # Raw utterance texts are not kept after merging; token totals are
    # identical either way (merging only inserts single spaces), so the raw
    # mean divides the same total by the raw count.
    total_tokens = sum(merged_tokens)
    slot_dialogues: dict[str, int] = {}
    slot_values: dict[str, dict[str, int]] = {}
    for dialogue in corpus:
        seen: set[str] = set()
        for turn in dialogue.turns:
            seen.update(turn.gold_state)
        for slot in seen:
            slot_dialogues[slot] = slot_dialogues.get(slot, 0) + 1
        final = dialogue.turns[-1].gold_state
        for slot, value in final.items():
            slot_values.setdefault(slot, {})
            slot_values[slot][value] = slot_values[slot].get(value, 0) + 1
    return StatsReport(
        dialogue_count=len(corpus),
        raw_utterance_count=sum(raw_counts),
        merged_turn_count=sum(merged_counts),
        mean_raw_utterances_per_dialogue=sum(raw_counts) / len(corpus),
        mean_merged_turns_per_dialogue=sum(merged_counts) / len(corpus),
        median_merged_turns_per_dialogue=float(statistics.median(merged_counts)),
        mean_tokens_per_raw_utterance=total_tokens / sum(raw_counts),
        mean_tokens_per_merged_turn=total_tokens / sum(merged_counts),
        slot_agreement_dialogues=dict(sorted(slot_dialogues.items())),
        slot_final_values={k: dict(sorted(v.items())) for k, v in sorted(slot_values.items())},
    )
