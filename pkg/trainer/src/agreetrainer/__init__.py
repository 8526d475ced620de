"""Seq2seq trainer for dialogue agreement tracking.

Trains text-to-text models on the prompt JSONL emitted by the agreement
toolkit, decodes predictions teacher-forced or recursively, and runs the
transfer / sample-efficiency studies. All coupling to the toolkit is
file-level: prompt JSONL and split manifests in, predictions JSONL and run
manifests out, scoring through the toolkit's ``eval`` command.
"""

from .config import MODEL_NAMES, ConfigError, TrainConfig
from .data import (
    ByteTokenizer,
    PromptError,
    PromptRecord,
    fold_part_ids,
    fraction_ids,
    read_prompts,
    read_split_manifest,
)
from .levtext import GRAMMAR_VERSION
from .manifest import RunManifest, strip_volatile
from .model import TINY_RANDOM, TrainerError, build_model, generation_fn
from .predict import MOCKS, generate_predictions, mock_fn
from .train import EarlyStopper, evaluate_exact_match, load_checkpoint, train

__version__ = "1.0.0"

__all__ = [
    "__version__",
    "GRAMMAR_VERSION",
    "MODEL_NAMES",
    "MOCKS",
    "TINY_RANDOM",
    "ByteTokenizer",
    "ConfigError",
    "EarlyStopper",
    "PromptError",
    "PromptRecord",
    "RunManifest",
    "TrainConfig",
    "TrainerError",
    "build_model",
    "evaluate_exact_match",
    "fold_part_ids",
    "fraction_ids",
    "generate_predictions",
    "generation_fn",
    "load_checkpoint",
    "mock_fn",
    "read_prompts",
    "read_split_manifest",
    "strip_volatile",
    "train",
]
