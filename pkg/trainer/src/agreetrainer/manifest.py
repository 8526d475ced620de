"""Run manifests: everything needed to re-run an experiment bit-for-bit.

A manifest snapshots the config, the split it trained on, per-epoch
validation scores, the chosen checkpoint and (once prediction ran) the
predictions file. Torch pins what the config names (seed, precision,
optimizer); kernel-level nondeterminism it cannot pin is listed in
``nondeterminism`` rather than silently ignored.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["RunManifest", "strip_volatile"]

NONDETERMINISM_NOTES = [
    "cudnn/cublas kernel selection may vary across GPU driver versions",
    "thread scheduling of CPU matmul reductions is framework-pinned, not config-pinned",
]


@dataclass
class RunManifest:
    config: dict
    split_reference: dict | None = None
    init_from: str | None = None
    checkpoint_path: str | None = None
    epochs: list = field(default_factory=list)  # {epoch, train_loss, val_score}
    best_epoch: int | None = None
    val_metric: str = "teacher-forced target exact match (string-level)"
    predictions_path: str | None = None
    nondeterminism: list = field(default_factory=lambda: list(NONDETERMINISM_NOTES))
    created_at: str = field(
        default_factory=lambda: time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    )

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "split_reference": self.split_reference,
            "init_from": self.init_from,
            "checkpoint_path": self.checkpoint_path,
            "epochs": self.epochs,
            "best_epoch": self.best_epoch,
            "val_metric": self.val_metric,
            "predictions_path": self.predictions_path,
            "nondeterminism": self.nondeterminism,
            "created_at": self.created_at,
        }

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "RunManifest":
        record = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**record)


def strip_volatile(manifest_dict: dict) -> dict:
    """Drop timestamps and reduce paths to basenames so two runs of the same
    config can be compared for determinism."""
    cleaned = dict(manifest_dict)
    cleaned.pop("created_at", None)
    for key in ("checkpoint_path", "predictions_path", "init_from"):
        if cleaned.get(key):
            cleaned[key] = Path(cleaned[key]).name
    return cleaned
