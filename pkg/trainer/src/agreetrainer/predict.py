"""Prediction-file generation: teacher-forced or recursive, plus mock models.

Outputs are edit-span strings, one JSONL row per turn
(``{"dialogue_id", "turn", "output"}``), consumable by the evaluating
toolkit's lev-mode scorer. In teacher-forced mode each prompt input is used
verbatim (its previous-state region is the gold state). In recursive mode
the previous-state region is rewritten with the model's *own* running
belief — the spans it has emitted so far, applied from the empty state —
so errors compound exactly as they would in deployment. Recursion is
sequential within a dialogue and independent across dialogues.

Two mock models close the loop without weights: ``echo-gold`` emits each
prompt's target verbatim (the pipeline-integrity oracle) and ``empty``
emits a bare domain prefix (the no-change floor).
"""

from __future__ import annotations

import json
from pathlib import Path

from .data import PromptRecord
from .levtext import apply_ops, parse_ops, render_region, replace_state_region, split_domain
from .model import TrainerError

__all__ = [
    "MOCKS",
    "echo_gold_fn",
    "empty_span_fn",
    "mock_fn",
    "group_by_dialogue",
    "generate_predictions",
]

MOCKS = ("echo-gold", "empty")


def echo_gold_fn(records):
    """The pipeline-integrity oracle: answer every input with its gold target."""
    answers = {r.input_text: r.target_text for r in records}

    def generate(text: str) -> str:
        try:
            return answers[text]
        except KeyError:
            # Recursive rewrites change the input; an oracle with gold access
            # is only meaningful teacher-forced.
            raise TrainerError(
                "echo-gold mock saw an input it has no gold target for; "
                "run it without --recursive"
            ) from None

    return generate


def empty_span_fn(records):
    """Degenerate predictor: always 'no change', in the input's own domain."""

    def generate(text: str) -> str:
        # The input reads "<prefix> [<domain>] ..." — take the first marker.
        at = text.find("[")
        end = text.find("]", at + 1)
        if at == -1 or end == -1:
            return "[gpt-negochat]"
        return text[at : end + 1]

    return generate


def mock_fn(name: str, records):
    if name == "echo-gold":
        return echo_gold_fn(records)
    if name == "empty":
        return empty_span_fn(records)
    raise TrainerError("unknown mock %r (expected one of %s)" % (name, ", ".join(MOCKS)))


def group_by_dialogue(records) -> dict[str, list[PromptRecord]]:
    """Gen records grouped by dialogue, turn-ordered; turns must be a
    gap-free 0..n-1 range."""
    grouped: dict[str, dict[int, PromptRecord]] = {}
    for record in records:
        if record.task != "gen":
            continue
        per = grouped.setdefault(record.dialogue_id, {})
        if record.turn in per:
            raise TrainerError(
                "duplicate turn %d in dialogue %r" % (record.turn, record.dialogue_id)
            )
        per[record.turn] = record
    if not grouped:
        raise TrainerError("no gen records to predict on")
    ordered: dict[str, list[PromptRecord]] = {}
    for dialogue_id in sorted(grouped):
        per = grouped[dialogue_id]
        if sorted(per) != list(range(len(per))):
            missing = next(i for i in range(len(per)) if i not in per)
            raise TrainerError("dialogue %r: missing turn %d" % (dialogue_id, missing))
        ordered[dialogue_id] = [per[i] for i in range(len(per))]
    return ordered


def generate_predictions(records, generate_fn, out_path, recursive: bool = False) -> int:
    """Run ``generate_fn`` over every gen record and write predictions JSONL;
    returns the number of rows written."""
    grouped = group_by_dialogue(records)
    rows = 0
    with open(out_path, "w", encoding="utf-8") as sink:
        for dialogue_id, turns in grouped.items():
            state: dict[str, str] = {}
            for record in turns:
                if recursive:
                    input_text = replace_state_region(record.input_text, render_region(state))
                else:
                    input_text = record.input_text
                output = generate_fn(input_text)
                if recursive:
                    _, ops, _ = parse_ops(output)
                    state = apply_ops(state, ops)
                sink.write(
                    json.dumps(
                        {"dialogue_id": dialogue_id, "turn": record.turn, "output": output},
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                rows += 1
    return rows
