"""Training loop: plain teacher-forced cross-entropy with early stopping.

Gen and Clf examples ride one shuffled stream with equal per-example weight;
the loss is the model's token-level cross-entropy over the target string.
After every epoch the model greedily decodes the validation inputs and is
scored by exact string match against the validation targets (for Gen lines
this is turn-level state-edit correctness under teacher forcing; for Clf
lines it is yes/no accuracy). Training stops once the validation score has
not improved by at least ``min_delta`` for ``patience`` consecutive epochs;
the best-scoring checkpoint is kept.
"""

from __future__ import annotations

import random
from pathlib import Path

from .config import TrainConfig
from .data import collate, make_batches
from .manifest import RunManifest
from .model import TrainerError, build_model, generation_fn

__all__ = ["EarlyStopper", "train", "load_checkpoint", "evaluate_exact_match"]


class EarlyStopper:
    """Higher-is-better score tracker: signals stop after ``patience``
    consecutive non-improvements (improvement = gain > ``min_delta``)."""

    def __init__(self, patience: int, min_delta: float = 0.0):
        self.patience = patience
        self.min_delta = min_delta
        self.best: float | None = None
        self.best_index: int | None = None
        self.bad = 0
        self.count = 0

    def update(self, score: float) -> bool:
        """Record a score; returns True while training should continue."""
        index = self.count
        self.count += 1
        if self.best is None or score > self.best + self.min_delta:
            self.best = score
            self.best_index = index
            self.bad = 0
            return True
        self.bad += 1
        return self.bad < self.patience


def evaluate_exact_match(generate, records) -> float:
    """Fraction of records whose greedy decode equals the target string."""
    if not records:
        raise TrainerError("validation set is empty")
    hits = sum(generate(r.input_text) == r.target_text.strip() for r in records)
    return hits / len(records)


def train(
    config: TrainConfig,
    train_records,
    val_records,
    out_dir,
    split_reference: dict | None = None,
    init_from=None,
) -> RunManifest:
    """Fine-tune on ``train_records``, early-stop on ``val_records``, save
    the best checkpoint and a run manifest under ``out_dir``. ``init_from``
    warm-starts the weights from an earlier run's checkpoint."""
    import torch

    if not train_records:
        raise TrainerError("training set is empty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    torch.manual_seed(config.seed)
    tokenizer, model = build_model(config)
    if init_from is not None:
        model.load_state_dict(_checkpoint_payload(init_from)["state_dict"])
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    stopper = EarlyStopper(config.patience, config.min_delta)
    checkpoint_path = out_dir / "checkpoint.pt"
    manifest = RunManifest(
        config=config.to_dict(),
        split_reference=split_reference,
        init_from=None if init_from is None else str(init_from),
    )

    for epoch in range(config.max_epochs):
        rng = random.Random(config.seed * 100_003 + epoch)
        total_loss = 0.0
        batches = make_batches(train_records, config.batch_size, rng)
        for batch in batches:
            tensors = collate(tokenizer, batch, config.max_input_tokens, config.max_target_tokens)
            loss = model(**tensors).loss
            optimizer.zero_grad()
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), config.clip_norm)
            optimizer.step()
            total_loss += loss.item() * len(batch)
        train_loss = total_loss / len(train_records)

        model.eval()
        generate = generation_fn(
            tokenizer, model, config.max_input_tokens, config.max_target_tokens
        )
        val_score = evaluate_exact_match(generate, val_records)
        model.train()
        manifest.epochs.append(
            {"epoch": epoch, "train_loss": train_loss, "val_score": val_score}
        )

        keep_going = stopper.update(val_score)
        if stopper.best_index == epoch:
            torch.save(
                {
                    "state_dict": model.state_dict(),
                    "config": config.to_dict(),
                    "epoch": epoch,
                    "val_score": val_score,
                },
                checkpoint_path,
            )
        if not keep_going:
            break

    manifest.best_epoch = stopper.best_index
    manifest.checkpoint_path = str(checkpoint_path)
    manifest.save(out_dir / "manifest.json")
    return manifest


def _checkpoint_payload(path) -> dict:
    import torch

    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except FileNotFoundError:
        raise TrainerError("checkpoint not found: %s" % path) from None
    except Exception as exc:  # torch raises various unpickling errors
        raise TrainerError("not a trainer checkpoint: %s (%s)" % (path, exc)) from None
    if not isinstance(payload, dict) or "state_dict" not in payload or "config" not in payload:
        raise TrainerError("not a trainer checkpoint: %s" % path)
    return payload


def load_checkpoint(path):
    """Restore ``(tokenizer, model, config)`` from :func:`train`'s output."""
    payload = _checkpoint_payload(path)
    try:
        config = TrainConfig.from_dict(payload["config"])
    except (KeyError, TypeError) as exc:
        raise TrainerError("not a trainer checkpoint: %s (%s)" % (path, exc)) from None
    tokenizer, model = build_model(config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return tokenizer, model, config
