"""Command-line interface for the trainer.

Subcommands::

    prepare-multiwoz  convert MultiWOZ 2.4 data.json to prompt JSONL
    train             fine-tune (or pretrain) a seq2seq model on prompt JSONL
    predict           decode predictions (checkpoint or mock) to JSONL
    experiment        run the transfer / sample-efficiency studies

Every input and output crosses a file boundary (prompt JSONL, split
manifests, predictions JSONL, run manifests); scoring always goes through
the evaluating toolkit's own ``eval`` command.
"""

from __future__ import annotations

import argparse
import random
import sys

from .config import ConfigError, TrainConfig
from .data import (
    PromptError,
    fold_part_ids,
    fraction_ids,
    read_prompts,
    read_split_manifest,
)
from .model import TrainerError, generation_fn
from .multiwoz import prepare
from .predict import MOCKS, generate_predictions, mock_fn
from .train import load_checkpoint, train
from . import experiments

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agreetrainer",
        description="Train and run seq2seq agreement trackers on prompt JSONL.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "prepare-multiwoz", help="convert MultiWOZ 2.4 data.json to prompt JSONL"
    )
    p.add_argument("data", help="path to the MultiWOZ 2.4 data.json")
    p.add_argument("--out", required=True, help="prompt JSONL to write")
    p.add_argument("--window", type=int, default=3, help="utterance context window")
    p.add_argument(
        "--max-dialogues", type=int, default=None, help="stop after this many dialogues"
    )
    p.set_defaults(func=_cmd_prepare)

    p = sub.add_parser("train", help="fine-tune a model on prompt JSONL")
    p.add_argument("--prompts", required=True, help="prompt JSONL to train on")
    p.add_argument("--out-dir", required=True, help="directory for checkpoint + manifest")
    p.add_argument("--split", help="split manifest; picks train/val dialogues per fold")
    p.add_argument("--fold", type=int, default=0, help="fold index within --split")
    p.add_argument(
        "--fraction", type=int, default=100, help="nested train fraction within --split"
    )
    p.add_argument(
        "--val-prompts", help="separate validation prompt JSONL (instead of --split)"
    )
    p.add_argument(
        "--pretrained", help="warm-start weights from this checkpoint (transfer setting)"
    )
    _add_config_options(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="decode predictions to JSONL")
    p.add_argument("--prompts", required=True, help="prompt JSONL to predict on (gen task)")
    p.add_argument("--out", required=True, help="predictions JSONL to write")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--checkpoint", help="trained checkpoint to decode with")
    source.add_argument(
        "--mock", choices=MOCKS, help="fixed stand-in predictor (pipeline checks)"
    )
    p.add_argument(
        "--recursive",
        action="store_true",
        help="condition each turn on the model's own previous prediction",
    )
    p.add_argument(
        "--max-new-tokens", type=int, default=None, help="decode length cap (checkpoint mode)"
    )
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser(
        "experiment", help="run the transfer or sample-efficiency study (GPU-scale)"
    )
    p.add_argument("study", choices=("transfer", "sample-efficiency"))
    p.add_argument("--prompts", help="prompt JSONL emitted by the toolkit")
    p.add_argument("--split", help="split manifest emitted by the toolkit")
    p.add_argument("--out-dir", help="directory for per-fold runs and results")
    p.add_argument("--multiwoz", help="prepared MultiWOZ prompt JSONL (transfer study)")
    p.add_argument("--corpus", default="builtin", help="corpus for the evaluator CLI")
    p.add_argument(
        "--agreetrack", default="agreetrack", help="evaluator CLI executable name"
    )
    p.add_argument(
        "--run",
        action="store_true",
        help="actually start training (without it, print the plan and exit)",
    )
    _add_config_options(p)
    p.set_defaults(func=_cmd_experiment)

    return parser


def _add_config_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backbone", help="model checkpoint id, or 'tiny-random' for offline runs")
    p.add_argument("--model-size", choices=("small", "base"), default="small")
    p.add_argument("--tasks", default="gen", help="comma-separated: gen, clf, or gen,clf")
    p.add_argument("--max-epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--patience", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)


def _config_from(args, **extra) -> TrainConfig:
    overrides = {
        "backbone": args.backbone,
        "model_size": args.model_size,
        "tasks": tuple(part.strip() for part in args.tasks.split(",") if part.strip()),
    }
    for name, value in (
        ("max_epochs", args.max_epochs),
        ("batch_size", args.batch_size),
        ("learning_rate", args.lr),
        ("patience", args.patience),
        ("seed", args.seed),
    ):
        if value is not None:
            overrides[name] = value
    overrides.update(extra)
    return TrainConfig(**overrides)


def _cmd_prepare(args) -> int:
    count = prepare(args.data, args.out, window=args.window, max_dialogues=args.max_dialogues)
    print("wrote %d examples to %s" % (count, args.out))
    return 0


def _holdout(records, seed: int):
    """Seeded dialogue-level ~90/10 holdout for runs without a manifest."""
    ids = sorted({r.dialogue_id for r in records})
    random.Random(seed).shuffle(ids)
    if len(ids) > 1:
        val_ids = set(ids[-max(1, len(ids) // 10) :])
        train_records = [r for r in records if r.dialogue_id not in val_ids]
    else:
        val_ids = set(ids)
        train_records = records
    val_records = [r for r in records if r.dialogue_id in val_ids]
    return train_records, val_records


def _cmd_train(args) -> int:
    config = _config_from(args, train_fraction=args.fraction)
    split_reference = None
    if args.split:
        manifest = read_split_manifest(args.split)
        train_ids = fraction_ids(manifest, args.fold, args.fraction)
        val_ids = fold_part_ids(manifest, args.fold, "val")
        train_records = read_prompts(args.prompts, tasks=config.tasks, dialogue_ids=train_ids)
        val_records = read_prompts(args.prompts, tasks=("gen",), dialogue_ids=val_ids)
        split_reference = {"path": args.split, "fold": args.fold, "fraction": args.fraction}
    elif args.val_prompts:
        train_records = read_prompts(args.prompts, tasks=config.tasks)
        val_records = read_prompts(args.val_prompts, tasks=("gen",))
    else:
        records = read_prompts(args.prompts, tasks=config.tasks)
        train_records, val_records = _holdout(records, config.seed)
    manifest = train(
        config,
        train_records,
        val_records,
        args.out_dir,
        split_reference=split_reference,
        init_from=args.pretrained,
    )
    best = manifest.epochs[manifest.best_epoch]
    print(
        "trained %d epoch(s); best epoch %d with val score %.4f; checkpoint %s"
        % (len(manifest.epochs), manifest.best_epoch, best["val_score"], manifest.checkpoint_path)
    )
    return 0


def _cmd_predict(args) -> int:
    records = read_prompts(args.prompts, tasks=("gen",))
    if args.mock:
        generate = mock_fn(args.mock, records)
    else:
        tokenizer, model, config = load_checkpoint(args.checkpoint)
        generate = generation_fn(
            tokenizer,
            model,
            config.max_input_tokens,
            args.max_new_tokens or config.max_target_tokens,
        )
    rows = generate_predictions(records, generate, args.out, recursive=args.recursive)
    print("wrote %d predictions to %s" % (rows, args.out))
    return 0


def _describe_transfer() -> list[str]:
    plan = experiments.transfer_plan()
    return [
        "transfer study plan:",
        "  arms:       %s" % ", ".join(arm.name for arm in plan.arms),
        "  fraction:   %d%% of each fold's training dialogues" % plan.fraction,
        "  folds:      %d" % plan.n_folds,
        "  gate:       pretrained mean beats scratch mean by >= %.1f points"
        % plan.required_margin,
    ]


def _describe_sample_efficiency() -> list[str]:
    plan = experiments.sample_efficiency_plan()
    return [
        "sample-efficiency study plan:",
        "  fractions:  %s (nested)" % ", ".join("%d%%" % f for f in plan.fractions),
        "  folds:      %d" % plan.n_folds,
        "  gate:       mean curve non-decreasing within %s" % plan.tolerance,
    ]


def _cmd_experiment(args) -> int:
    lines = _describe_transfer() if args.study == "transfer" else _describe_sample_efficiency()
    print("\n".join(lines))
    if not args.run:
        print(
            "\nThis is a GPU-scale run (hours on a single GPU). Pass --prompts, "
            "--split, --out-dir%s and --run to start."
            % (", --multiwoz" if args.study == "transfer" else "")
        )
        return 0
    missing = [
        flag
        for flag, value in (
            ("--prompts", args.prompts),
            ("--split", args.split),
            ("--out-dir", args.out_dir),
        )
        if not value
    ]
    if missing:
        raise TrainerError("--run needs %s" % ", ".join(missing))
    config = _config_from(args)
    if args.study == "transfer":
        results = experiments.run_transfer(
            args.prompts,
            args.split,
            args.out_dir,
            multiwoz_prompts=args.multiwoz,
            config=config,
            corpus=args.corpus,
            cli=args.agreetrack,
        )
        print(
            "margin: %.2f points (gate >= %.1f) -> %s"
            % (
                results["margin_points"],
                experiments.transfer_plan().required_margin,
                "PASS" if results["meets_margin"] else "FAIL",
            )
        )
        return 0 if results["meets_margin"] else 1
    results = experiments.run_sample_efficiency(
        args.prompts,
        args.split,
        args.out_dir,
        config=config,
        corpus=args.corpus,
        cli=args.agreetrack,
    )
    verdict = results["non_decreasing_within_fold_std"]
    print("curve non-decreasing within one fold-std -> %s" % ("PASS" if verdict else "FAIL"))
    return 0 if verdict else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (TrainerError, PromptError, ConfigError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
