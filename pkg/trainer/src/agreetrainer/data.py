"""Prompt JSONL reading, split-manifest handling, tokenization, batching.

The JSONL schema is the training contract: one object per line with ``task``
("gen" or "clf"), ``input``, ``target``, ``dialogue_id``, ``turn`` and, for
clf lines, ``clf_label``. Split manifests map fold indices to train/val/test
dialogue-id lists plus nested fractional train subsets. Both files come from
the emitting toolkit; nothing here interprets targets beyond treating them
as strings.

Tokenization is byte-level and self-contained (:class:`ByteTokenizer`) so
offline runs and tests need no downloaded vocabulary; real T5 runs swap in
the matching pretrained tokenizer via :mod:`agreetrainer.model`.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "PromptError",
    "PromptRecord",
    "read_prompts",
    "read_split_manifest",
    "fold_part_ids",
    "fraction_ids",
    "ByteTokenizer",
    "make_batches",
    "collate",
]


class PromptError(ValueError):
    """A prompt or manifest file does not follow the contract."""


@dataclass(frozen=True)
class PromptRecord:
    task: str
    input_text: str
    target_text: str
    dialogue_id: str
    turn: int
    clf_label: bool | None = None


def read_prompts(source, tasks=None, dialogue_ids=None) -> list[PromptRecord]:
    """Parse prompt JSONL; malformed lines raise :class:`PromptError` naming
    the line number. Optional filters keep only the given tasks and/or
    dialogue ids."""
    text = (
        source.read()
        if hasattr(source, "read")
        else Path(source).read_text(encoding="utf-8")
    )
    task_filter = set(tasks) if tasks is not None else None
    id_filter = set(dialogue_ids) if dialogue_ids is not None else None
    records: list[PromptRecord] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise PromptError("line %d: not valid JSON (%s)" % (lineno, exc)) from None
        if not isinstance(obj, dict):
            raise PromptError("line %d: expected an object" % lineno)
        try:
            task = obj["task"]
            input_text = obj["input"]
            target_text = obj["target"]
            dialogue_id = obj["dialogue_id"]
            turn = obj["turn"]
        except KeyError as exc:
            raise PromptError("line %d: missing key %s" % (lineno, exc)) from None
        if task not in ("gen", "clf"):
            raise PromptError("line %d: unknown task %r" % (lineno, task))
        if not all(isinstance(v, str) for v in (input_text, target_text, dialogue_id)):
            raise PromptError("line %d: input/target/dialogue_id must be strings" % lineno)
        if not isinstance(turn, int) or turn < 0:
            raise PromptError("line %d: turn must be a non-negative integer" % lineno)
        clf_label = obj.get("clf_label")
        if task == "clf" and not isinstance(clf_label, bool):
            raise PromptError("line %d: clf line needs a boolean clf_label" % lineno)
        if task_filter is not None and task not in task_filter:
            continue
        if id_filter is not None and dialogue_id not in id_filter:
            continue
        records.append(PromptRecord(task, input_text, target_text, dialogue_id, turn, clf_label))
    return records


def read_split_manifest(path) -> dict:
    manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(manifest, dict) or "folds" not in manifest:
        raise PromptError("split manifest must be an object with a 'folds' list")
    return manifest


def _fold_entry(manifest: dict, fold: int) -> dict:
    for entry in manifest["folds"]:
        if entry.get("fold") == fold:
            return entry
    raise PromptError("split manifest has no fold %d" % fold)


def fold_part_ids(manifest: dict, fold: int, part: str) -> list[str]:
    entry = _fold_entry(manifest, fold)
    if part not in ("train", "val", "test"):
        raise PromptError("part must be train/val/test, got %r" % part)
    return list(entry[part])


def fraction_ids(manifest: dict, fold: int, fraction: int) -> list[str]:
    entry = _fold_entry(manifest, fold)
    fractions = entry.get("fractions", {})
    key = str(fraction)
    if key not in fractions:
        raise PromptError(
            "fold %d has no %d%% subset (available: %s)"
            % (fold, fraction, ", ".join(sorted(fractions)) or "none")
        )
    return list(fractions[key])


class ByteTokenizer:
    """Deterministic UTF-8 byte tokenizer: id = byte + 2, pad = 0, eos = 1.

    Self-contained stand-in for a pretrained subword vocabulary; adequate for
    offline smoke training and exact round-trips of grammar strings.
    """

    pad_token_id = 0
    eos_token_id = 1
    offset = 2
    vocab_size = 258  # 256 byte values + pad + eos

    def encode(self, text: str, max_length: int | None = None) -> list[int]:
        ids = [b + self.offset for b in text.encode("utf-8")]
        if max_length is not None and len(ids) > max_length - 1:
            ids = ids[: max_length - 1]
        return ids + [self.eos_token_id]

    def decode(self, ids) -> str:
        data = bytes(
            i - self.offset
            for i in ids
            if i not in (self.pad_token_id, self.eos_token_id) and i >= self.offset
        )
        return data.decode("utf-8", errors="replace")


def make_batches(records, batch_size: int, rng: random.Random | None = None):
    """Equal-weight single stream: optionally shuffled, then chunked."""
    order = list(records)
    if rng is not None:
        rng.shuffle(order)
    return [order[i : i + batch_size] for i in range(0, len(order), batch_size)]


def collate(tokenizer, records, max_input_tokens: int, max_target_tokens: int):
    """Pad a batch into ``input_ids``/``attention_mask``/``labels`` tensors;
    label padding is -100 so loss ignores it."""
    import torch

    inputs = [tokenizer.encode(r.input_text, max_input_tokens) for r in records]
    targets = [tokenizer.encode(r.target_text, max_target_tokens) for r in records]
    in_width = max(len(seq) for seq in inputs)
    tgt_width = max(len(seq) for seq in targets)
    pad = tokenizer.pad_token_id
    input_ids = torch.full((len(records), in_width), pad, dtype=torch.long)
    attention = torch.zeros((len(records), in_width), dtype=torch.long)
    labels = torch.full((len(records), tgt_width), -100, dtype=torch.long)
    for row, (seq, tgt) in enumerate(zip(inputs, targets)):
        input_ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
        attention[row, : len(seq)] = 1
        labels[row, : len(tgt)] = torch.tensor(tgt, dtype=torch.long)
    return {"input_ids": input_ids, "attention_mask": attention, "labels": labels}
