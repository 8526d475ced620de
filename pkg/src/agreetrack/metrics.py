"""Evaluation metrics for agreement tracking.

Both metrics compare a predicted agreement state against the gold state at
every turn of every dialogue:

* **Joint slot accuracy** — the fraction of turns whose predicted state is an
  exact match of the gold state (same slots, same values). Two empty states
  match. This is the strict, all-or-nothing headline number.
* **Joint F1** — micro-averaged F1 over individual (slot, value) pairs pooled
  across all turns: a pair is a true positive when it appears in both states,
  a false positive when predicted but not gold, a false negative when gold
  but not predicted. A slot present in both states with *different* values
  contributes one false positive and one false negative. F1 =
  2·TP / (2·TP + FP + FN); this partial-credit score separates "missed one
  slot" from "missed everything".

Scoring is a pure fold over (prediction, gold) turn pairs, so results are
invariant to the order in which dialogues or turns are visited. Evaluation
refuses to guess at misaligned inputs: mismatched dialogue ids or turn counts
raise :class:`AlignmentError` naming the first offender.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .lev import apply_span, parse_report, parse_state

__all__ = [
    "AlignmentError",
    "TurnScore",
    "EvalResult",
    "score_turn",
    "evaluate",
    "micro_f1",
    "load_predictions",
    "aggregate_folds",
]

State = dict[str, str]


class AlignmentError(ValueError):
    """Predictions and references do not line up turn-for-turn."""


@dataclass(frozen=True)
class TurnScore:
    tp: int
    fp: int
    fn: int
    exact: bool


def score_turn(pred: State, gold: State) -> TurnScore:
    """Score one turn's predicted state against gold at the pair level."""
    tp = fp = fn = 0
    for slot, value in pred.items():
        if slot in gold:
            if gold[slot] == value:
                tp += 1
            else:
                fp += 1  # wrong value on a gold slot: one fp ...
                fn += 1  # ... and the gold pair itself is missed.
        else:
            fp += 1
    for slot in gold:
        if slot not in pred:
            fn += 1
    return TurnScore(tp=tp, fp=fp, fn=fn, exact=pred == gold)


def micro_f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 1.0  # nothing to find and nothing claimed
    return 2 * tp / denom


@dataclass
class EvalResult:
    turns: int
    exact_matches: int
    tp: int
    fp: int
    fn: int
    joint_slot_accuracy: float
    joint_f1: float
    per_slot: dict[str, dict[str, float]] = field(default_factory=dict)
    degenerate_f1: bool = False

    def to_dict(self) -> dict:
        return {
            "turns": self.turns,
            "exact_matches": self.exact_matches,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "joint_slot_accuracy": self.joint_slot_accuracy,
            "joint_f1": self.joint_f1,
            "per_slot": self.per_slot,
            "degenerate_f1": self.degenerate_f1,
        }


def evaluate(
    predictions: dict[str, list[State]],
    references: dict[str, list[State]],
) -> EvalResult:
    """Score per-turn predicted states against references.

    Both arguments map dialogue id -> list of agreement states, one per
    merged turn. The id sets and per-dialogue turn counts must agree.
    """
    missing = sorted(set(references) - set(predictions))
    if missing:
        raise AlignmentError("no predictions for dialogue %r" % missing[0])
    extra = sorted(set(predictions) - set(references))
    if extra:
        raise AlignmentError("predictions for unknown dialogue %r" % extra[0])

    turns = exact = tp = fp = fn = 0
    slot_counts: dict[str, dict[str, int]] = {}
    for did in sorted(references):
        pred_states = predictions[did]
        gold_states = references[did]
        if len(pred_states) != len(gold_states):
            raise AlignmentError(
                "dialogue %r: %d predicted turns vs %d reference turns"
                % (did, len(pred_states), len(gold_states))
            )
        for pred, gold in zip(pred_states, gold_states):
            score = score_turn(pred, gold)
            turns += 1
            exact += score.exact
            tp += score.tp
            fp += score.fp
            fn += score.fn
            for slot, value in pred.items():
                bucket = slot_counts.setdefault(slot, {"tp": 0, "fp": 0, "fn": 0})
                if gold.get(slot) == value:
                    bucket["tp"] += 1
                else:
                    bucket["fp"] += 1
            for slot, value in gold.items():
                if pred.get(slot) != value:
                    bucket = slot_counts.setdefault(slot, {"tp": 0, "fp": 0, "fn": 0})
                    bucket["fn"] += 1

    if turns == 0:
        raise AlignmentError("nothing to evaluate: no turns")

    per_slot = {
        slot: {
            "tp": float(c["tp"]),
            "fp": float(c["fp"]),
            "fn": float(c["fn"]),
            "f1": micro_f1(c["tp"], c["fp"], c["fn"]),
        }
        for slot, c in sorted(slot_counts.items())
    }
    return EvalResult(
        turns=turns,
        exact_matches=exact,
        tp=tp,
        fp=fp,
        fn=fn,
        joint_slot_accuracy=exact / turns,
        joint_f1=micro_f1(tp, fp, fn),
        per_slot=per_slot,
        degenerate_f1=(2 * tp + fp + fn) == 0,
    )


def load_predictions(
    source,
    mode: str = "state",
    ontology=None,
) -> tuple[dict[str, list[State]], int]:
    """Read model outputs from JSONL into per-turn states.

    Each line is an object with ``dialogue_id`` (str), ``turn`` (0-based int)
    and ``output`` (str). Two decodings are supported:

    * ``mode="state"`` — ``output`` is a full-state span
      (``"slot = value ; ..."`` or ``"none"``).
    * ``mode="lev"`` — ``output`` is a belief-span edit string; the turn
      state is reconstructed by applying each turn's (leniently parsed) edits
      to the previous reconstructed state, starting from empty.

    Malformed output never aborts the run: a turn that fails to decode keeps
    the previous turn's state (lev mode) or decodes to the empty state (state
    mode) and is counted. Returns ``(states, flawed_count)`` where
    ``flawed_count`` is the number of turns whose output was wholly or partly
    dropped. Turns of a dialogue must form a gap-free 0..n-1 range.
    """
    if mode not in ("state", "lev"):
        raise ValueError("mode must be 'state' or 'lev', got %r" % mode)
    raw: dict[str, dict[int, str]] = {}
    text = Path(source).read_text(encoding="utf-8") if not hasattr(source, "read") else source.read()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AlignmentError("line %d: not valid JSON (%s)" % (lineno, exc)) from None
        if not isinstance(record, dict):
            raise AlignmentError("line %d: expected an object" % lineno)
        try:
            did = record["dialogue_id"]
            turn = record["turn"]
            output = record["output"]
        except KeyError as exc:
            raise AlignmentError("line %d: missing key %s" % (lineno, exc)) from None
        if not isinstance(did, str) or not isinstance(turn, int) or not isinstance(output, str):
            raise AlignmentError("line %d: bad field types" % lineno)
        per = raw.setdefault(did, {})
        if turn in per:
            raise AlignmentError("line %d: duplicate turn %d of dialogue %r" % (lineno, turn, did))
        per[turn] = output

    flawed = 0
    states: dict[str, list[State]] = {}
    for did, turn_map in raw.items():
        n = len(turn_map)
        if sorted(turn_map) != list(range(n)):
            missing_turn = next(i for i in range(n) if i not in turn_map)
            raise AlignmentError("dialogue %r: missing turn %d" % (did, missing_turn))
        decoded: list[State] = []
        state: State = {}
        for i in range(n):
            output = turn_map[i]
            if mode == "state":
                try:
                    state = parse_state(output)
                except ValueError:
                    state = {}
                    flawed += 1
            else:
                report = parse_report(output, ontology=ontology, strict=False)
                if not report.clean:
                    flawed += 1
                state = apply_span(state, report.span)
            decoded.append(dict(state))
        states[did] = decoded
    return states, flawed


def aggregate_folds(values: list[float]) -> tuple[float, float]:
    """Mean and population standard deviation across fold-level scores."""
    if not values:
        raise ValueError("no fold scores to aggregate")
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=0))
