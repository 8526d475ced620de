"""Deterministic dialogue-level data splits.

Splitting happens at the dialogue level (never at the turn level, which would
leak context between partitions) and is reproducible from a single integer
seed: ids are sorted, shuffled once with a seeded RNG, and partitioned into
near-equal contiguous folds. Each fold's held-out portion is the test set;
the remaining dialogues are divided 85/15 into train and validation.

Fractional training subsets are *nested prefixes* of the shuffled train list:
the 10% subset is contained in the 20% subset, and so on, so sample-efficiency
curves vary only the amount of data, not its identity.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

__all__ = [
    "FoldSplit",
    "DEFAULT_SEED",
    "DEFAULT_FRACTIONS",
    "shuffled_ids",
    "fold_splits",
    "fractional_subsets",
]

DEFAULT_SEED = 13
DEFAULT_FRACTIONS = (10, 20, 30, 40, 50, 75, 100)
VAL_SHARE = 0.15


@dataclass(frozen=True)
class FoldSplit:
    index: int
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "fold": self.index,
            "train": list(self.train),
            "val": list(self.val),
            "test": list(self.test),
        }


def shuffled_ids(ids, seed: int = DEFAULT_SEED) -> list[str]:
    """Canonical shuffle: sort first so the result is independent of input
    order, then apply one seeded Fisher-Yates pass."""
    ordered = sorted(ids)
    if len(set(ordered)) != len(ordered):
        raise ValueError("duplicate dialogue ids")
    rng = random.Random(seed)
    rng.shuffle(ordered)
    return ordered


def _chunk_sizes(n: int, k: int) -> list[int]:
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def fold_splits(ids, n_folds: int = 3, seed: int = DEFAULT_SEED) -> list[FoldSplit]:
    """Cross-validation folds with an inner train/validation split.

    The shuffled id list is cut into ``n_folds`` contiguous chunks whose sizes
    differ by at most one. Fold *i* uses chunk *i* as its test set; of the
    rest, the trailing 15% (rounded) becomes validation and the leading 85%
    training. Every id appears in exactly one test set across folds.
    """
    order = shuffled_ids(ids, seed=seed)
    if n_folds < 2:
        raise ValueError("need at least 2 folds, got %d" % n_folds)
    if len(order) < n_folds:
        raise ValueError("cannot cut %d ids into %d folds" % (len(order), n_folds))
    sizes = _chunk_sizes(len(order), n_folds)
    chunks: list[list[str]] = []
    at = 0
    for size in sizes:
        chunks.append(order[at : at + size])
        at += size

    folds = []
    for i in range(n_folds):
        test = chunks[i]
        trainval = [did for j, chunk in enumerate(chunks) if j != i for did in chunk]
        n_val = round(VAL_SHARE * len(trainval))
        if n_val == 0 or n_val >= len(trainval):
            raise ValueError(
                "fold %d: %d trainval dialogues cannot support a validation split"
                % (i, len(trainval))
            )
        folds.append(
            FoldSplit(
                index=i,
                train=tuple(trainval[:-n_val]),
                val=tuple(trainval[-n_val:]),
                test=tuple(test),
            )
        )
    return folds


def fractional_subsets(
    train_ids,
    fractions=DEFAULT_FRACTIONS,
) -> dict[int, tuple[str, ...]]:
    """Nested training subsets: ``fraction`` percent of the train list,
    rounded up, taken as a prefix so smaller subsets are contained in larger
    ones. The input order is preserved (pass a split's ``train`` unchanged)."""
    train = list(train_ids)
    if not train:
        raise ValueError("empty train list")
    subsets: dict[int, tuple[str, ...]] = {}
    for fraction in fractions:
        if not 0 < fraction <= 100:
            raise ValueError("fraction must be in (0, 100], got %r" % (fraction,))
        k = math.ceil(fraction / 100 * len(train))
        subsets[int(fraction)] = tuple(train[:k])
    return subsets
