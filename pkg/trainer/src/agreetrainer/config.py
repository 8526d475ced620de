"""Training configuration.

Defaults are the tuned values this harness was built around and are treated
as fixed-point: learning rate 6e-4, batch size 32, Adam, early-stopping
patience 4 with min-delta 0, gradient clip norm 1.0, 32-bit precision,
context window 3. ``model_size`` picks the T5 backbone (small = 60M,
base = 220M); ``backbone`` overrides it with an explicit checkpoint id or
the offline ``tiny-random`` test model.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

__all__ = ["TrainConfig", "ConfigError", "MODEL_NAMES"]

MODEL_NAMES = {"small": "t5-small", "base": "t5-base"}

GEN = "gen"
CLF = "clf"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    model_size: str = "small"
    backbone: str | None = None
    learning_rate: float = 6e-4
    batch_size: int = 32
    optimizer: str = "adam"
    patience: int = 4
    min_delta: float = 0.0
    clip_norm: float = 1.0
    precision: str = "fp32"
    window: int = 3
    tasks: tuple[str, ...] = (GEN,)
    pretrain_on_multiwoz: bool = False
    seed: int = 13
    train_fraction: int = 100
    max_epochs: int = 50
    max_input_tokens: int = 512
    max_target_tokens: int = 128

    def __post_init__(self):
        if self.model_size not in MODEL_NAMES:
            raise ConfigError(
                "model_size must be one of %s, got %r"
                % (sorted(MODEL_NAMES), self.model_size)
            )
        if self.optimizer != "adam":
            raise ConfigError("optimizer is fixed to 'adam', got %r" % self.optimizer)
        if self.precision != "fp32":
            raise ConfigError("precision is fixed to 'fp32', got %r" % self.precision)
        object.__setattr__(self, "tasks", tuple(self.tasks))
        bad = set(self.tasks) - {GEN, CLF}
        if bad or not self.tasks:
            raise ConfigError(
                "tasks must be a non-empty subset of {gen, clf}, got %r" % (self.tasks,)
            )
        if not 0 < self.train_fraction <= 100:
            raise ConfigError("train_fraction must be in (0, 100]")
        for name in ("learning_rate", "clip_norm"):
            if getattr(self, name) <= 0:
                raise ConfigError("%s must be positive" % name)
        for name in ("batch_size", "max_epochs", "window", "max_input_tokens",
                     "max_target_tokens"):
            if getattr(self, name) < 1:
                raise ConfigError("%s must be >= 1" % name)
        if self.patience < 0 or self.min_delta < 0:
            raise ConfigError("patience and min_delta must be >= 0")

    @property
    def model_name(self) -> str:
        return self.backbone if self.backbone else MODEL_NAMES[self.model_size]

    def to_dict(self) -> dict:
        record = asdict(self)
        record["tasks"] = list(self.tasks)
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(record) - known
        if unknown:
            raise ConfigError("unknown config field %r" % sorted(unknown)[0])
        record = dict(record)
        if "tasks" in record:
            record["tasks"] = tuple(record["tasks"])
        return cls(**record)

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path) -> "TrainConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
