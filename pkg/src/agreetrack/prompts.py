"""Prompt construction for seq2seq agreement tracking (Gen and Clf tasks).

Two example flavours are emitted per turn, sharing one input layout::

    <task prefix> [<domain>] <previous state span> <speaker: utterance ...> [<candidate span>]

* **Gen** ("track agreements:") asks the model to produce the Levenshtein
  belief span that edits the previous agreement state into the current one;
  the target is the rendered edit span (domain prefix included).
* **Clf** ("verify agreements:") appends a candidate edit span to the input —
  the gold span with probability 1/2, otherwise an ontology-based negative
  sample — and the target is "yes"/"no". The candidate's own "[<domain>]"
  prefix delimits it from the context window.

The previous-state region is the full-state belief span ("slot = value ; ..."
in ontology order, "none" when empty); the context window is the last
``w`` merged turns up to and including the current one, each preceded by its
speaker tag. Negative sampling perturbs the gold span with one of five
ontology-consistent edits: value swap, op-kind flip, slot swap, spurious op
insertion, or gold-op drop. Emission is deterministic for a fixed seed; the
per-dialogue RNG is derived from ``seed`` and the dialogue id so parallel or
partial emission cannot reorder randomness.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .dialogue import AnnotatedDialogue, CorpusError
from .lev import (
    DELETE,
    INSERT,
    SUBSTITUTE,
    EditOp,
    LevSpan,
    diff,
    render,
    render_state,
)
from .ontology import Ontology

__all__ = [
    "GEN",
    "CLF",
    "GEN_PREFIX",
    "CLF_PREFIX",
    "DEFAULT_WINDOW",
    "PromptExample",
    "context_window",
    "render_context",
    "build_gen_example",
    "sample_negative",
    "build_clf_example",
    "iter_examples",
    "emit_dataset",
]

GEN = "gen"
CLF = "clf"
GEN_PREFIX = "track agreements:"
CLF_PREFIX = "verify agreements:"
DEFAULT_WINDOW = 3


@dataclass(frozen=True)
class PromptExample:
    task: str
    input_text: str
    target_text: str
    dialogue_id: str
    turn_index: int
    clf_label: bool | None = None
    candidate_is_gold: bool | None = None

    def to_json_dict(self) -> dict:
        record = {
            "task": self.task,
            "input": self.input_text,
            "target": self.target_text,
            "dialogue_id": self.dialogue_id,
            "turn": self.turn_index,
        }
        if self.clf_label is not None:
            record["clf_label"] = self.clf_label
        return record


def _check_turn(dialogue: AnnotatedDialogue, t: int, w: int) -> None:
    if not 0 <= t < len(dialogue.turns):
        raise IndexError(
            "turn %d out of range for dialogue %r (%d turns)"
            % (t, dialogue.id, len(dialogue.turns))
        )
    if w < 1:
        raise ValueError("window size must be >= 1, got %d" % w)
    if not dialogue.has_gold_states:
        raise CorpusError("dialogue %r has no gold states" % dialogue.id)


def context_window(dialogue: AnnotatedDialogue, t: int, w: int = DEFAULT_WINDOW):
    """The last ``min(w, t+1)`` merged turns up to and including turn ``t``."""
    return [turn.utterance for turn in dialogue.turns[max(0, t - w + 1) : t + 1]]


def render_context(utterances) -> str:
    return " ".join("%s: %s" % (u.speaker, u.text) for u in utterances)


def _states_at(dialogue: AnnotatedDialogue, t: int):
    prev = dialogue.turns[t - 1].gold_state if t > 0 else {}
    return prev, dialogue.turns[t].gold_state


def build_gen_example(
    dialogue: AnnotatedDialogue,
    t: int,
    w: int = DEFAULT_WINDOW,
    ontology: Ontology | None = None,
    domain: str = "gpt-negochat",
) -> PromptExample:
    """Gen example for turn ``t``: predict the state-edit span from the
    previous state and the recent context. The state before turn 0 is empty."""
    _check_turn(dialogue, t, w)
    prev, cur = _states_at(dialogue, t)
    input_text = " ".join(
        (
            GEN_PREFIX,
            "[%s]" % domain,
            render_state(prev, ontology),
            render_context(context_window(dialogue, t, w)),
        )
    )
    target = render(diff(prev, cur, domain=domain, ontology=ontology))
    return PromptExample(GEN, input_text, target, dialogue.id, t)


def _ordered(ops: Iterable[EditOp], ontology: Ontology | None) -> tuple[EditOp, ...]:
    if ontology is None:
        return tuple(sorted(ops, key=lambda op: op.slot))
    return tuple(sorted(ops, key=lambda op: ontology.slot_sort_key(op.slot)))


def _other_value(ontology: Ontology, slot: str, avoid: str | None, rng: random.Random) -> str:
    values = [v for v in ontology.values(slot) if v != avoid]
    if not values:
        raise ValueError("slot %r has no alternative value to swap in" % slot)
    return rng.choice(values)


def sample_negative(
    ontology: Ontology, gold: LevSpan, rng: random.Random
) -> LevSpan:
    """An ontology-consistent span guaranteed to render differently from gold.

    One perturbation is chosen uniformly among those applicable:

    * value swap — replace a valued gold op's value with another legal value;
    * kind flip — toggle insert/substitute, or turn a delete into an insert;
    * slot swap — move a gold op onto an unused ontology slot (re-drawing a
      legal value for that slot);
    * spurious op — add an op on a slot gold does not touch;
    * drop — remove one gold op.

    For an empty gold span only the spurious op applies.
    """
    ops = list(gold.ops)
    used = {op.slot for op in ops}
    free_slots = [s for s in ontology.slots if s not in used]
    valued = [i for i, op in enumerate(ops) if op.kind != DELETE]

    choices = []
    if valued:
        choices.append("value_swap")
    if ops:
        choices.append("kind_flip")
    if ops and free_slots:
        choices.append("slot_swap")
    if free_slots:
        choices.append("spurious")
    if ops:
        choices.append("drop")
    kind = rng.choice(choices)

    if kind == "value_swap":
        i = rng.choice(valued)
        op = ops[i]
        ops[i] = EditOp(op.kind, op.slot, _other_value(ontology, op.slot, op.value, rng))
    elif kind == "kind_flip":
        i = rng.randrange(len(ops))
        op = ops[i]
        if op.kind == DELETE:
            ops[i] = EditOp(INSERT, op.slot, _other_value(ontology, op.slot, None, rng))
        else:
            flipped = SUBSTITUTE if op.kind == INSERT else INSERT
            ops[i] = EditOp(flipped, op.slot, op.value)
    elif kind == "slot_swap":
        i = rng.randrange(len(ops))
        op = ops[i]
        slot = rng.choice(free_slots)
        if op.kind == DELETE:
            ops[i] = EditOp(DELETE, slot)
        else:
            ops[i] = EditOp(op.kind, slot, _other_value(ontology, slot, None, rng))
    elif kind == "spurious":
        slot = rng.choice(free_slots)
        op_kind = rng.choice((INSERT, SUBSTITUTE, DELETE))
        if op_kind == DELETE:
            ops.append(EditOp(DELETE, slot))
        else:
            ops.append(EditOp(op_kind, slot, _other_value(ontology, slot, None, rng)))
    else:  # drop
        ops.pop(rng.randrange(len(ops)))

    negative = LevSpan(gold.domain, _ordered(ops, ontology))
    if render(negative) == render(gold):
        raise AssertionError("negative sample collided with gold: %s" % render(gold))
    return negative


def build_clf_example(
    dialogue: AnnotatedDialogue,
    t: int,
    w: int = DEFAULT_WINDOW,
    rng: random.Random | None = None,
    ontology: Ontology | None = None,
    domain: str = "gpt-negochat",
) -> PromptExample:
    """Clf example for turn ``t``: a fair coin picks the gold span or a
    negative sample as the appended candidate; the target says which."""
    _check_turn(dialogue, t, w)
    if rng is None:
        rng = random.Random()
    if ontology is None:
        raise ValueError("clf examples need the ontology for negative sampling")
    prev, cur = _states_at(dialogue, t)
    gold = diff(prev, cur, domain=domain, ontology=ontology)
    positive = rng.random() < 0.5
    candidate = gold if positive else sample_negative(ontology, gold, rng)
    input_text = " ".join(
        (
            CLF_PREFIX,
            "[%s]" % domain,
            render_state(prev, ontology),
            render_context(context_window(dialogue, t, w)),
            render(candidate),
        )
    )
    return PromptExample(
        CLF,
        input_text,
        "yes" if positive else "no",
        dialogue.id,
        t,
        clf_label=positive,
        candidate_is_gold=positive,
    )


def _dialogue_rng(seed: int, dialogue_id: str) -> random.Random:
    # String seeds hash via SHA-512 inside random.Random: stable across runs
    # and interpreters, and independent of emission order.
    return random.Random("%d:%s" % (seed, dialogue_id))


def iter_examples(
    corpus: list[AnnotatedDialogue],
    tasks: Iterable[str] = (GEN, CLF),
    w: int = DEFAULT_WINDOW,
    seed: int = 13,
    ontology: Ontology | None = None,
    domain: str = "gpt-negochat",
):
    """Yield examples dialogue-by-dialogue (sorted by id), turn-by-turn,
    Gen before Clf on each turn when both are requested."""
    task_set = set(tasks)
    unknown = task_set - {GEN, CLF}
    if unknown:
        raise ValueError("unknown tasks: %s" % ", ".join(sorted(unknown)))
    if not task_set:
        raise ValueError("no tasks requested")
    for dialogue in sorted(corpus, key=lambda d: d.id):
        rng = _dialogue_rng(seed, dialogue.id)
        for t in range(len(dialogue.turns)):
            if GEN in task_set:
                yield build_gen_example(dialogue, t, w, ontology=ontology, domain=domain)
            if CLF in task_set:
                yield build_clf_example(
                    dialogue, t, w, rng=rng, ontology=ontology, domain=domain
                )


def emit_dataset(
    corpus: list[AnnotatedDialogue],
    sink,
    tasks: Iterable[str] = (GEN, CLF),
    w: int = DEFAULT_WINDOW,
    seed: int = 13,
    ontology: Ontology | None = None,
    domain: str = "gpt-negochat",
) -> int:
    """Write one JSON object per example to ``sink`` (path or text file
    object); returns the number of lines. Byte-identical for identical
    inputs and seed."""
    lines = 0
    if isinstance(sink, (str, Path)):
        fh = open(sink, "w", encoding="utf-8")
        close = True
    else:
        fh, close = sink, False
    try:
        for example in iter_examples(
            corpus, tasks=tasks, w=w, seed=seed, ontology=ontology, domain=domain
        ):
            fh.write(json.dumps(example.to_json_dict(), ensure_ascii=False) + "\n")
            lines += 1
    finally:
        if close:
            fh.close()
    return lines
