"""Experiment harness: the transfer and sample-efficiency studies.

Both studies run the full loop per fold — train on a nested fraction of the
fold's training dialogues, predict its test dialogues recursively, and score
through the evaluating toolkit's ``eval`` command — so every number reported
here is exactly what the external evaluator computes. The harness touches
the toolkit only through its published interfaces: prompt JSONL, split
manifests, predictions JSONL, and the CLI; there is no Python-level
coupling.

A full study is GPU-scale (three folds times two arms or seven fractions of
multi-epoch seq2seq training, a multi-hour single-GPU budget). The CLI
therefore prints the plan and refuses to start without ``--run``.
"""

from __future__ import annotations

import json
import random
import statistics
import subprocess
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path

from .config import TrainConfig
from .data import fold_part_ids, fraction_ids, read_prompts, read_split_manifest
from .model import TrainerError, generation_fn
from .predict import generate_predictions
from .train import load_checkpoint, train

__all__ = [
    "Arm",
    "TransferPlan",
    "SampleEfficiencyPlan",
    "transfer_plan",
    "sample_efficiency_plan",
    "evaluate_with_primary",
    "pretrain_multiwoz",
    "run_fold",
    "run_transfer",
    "run_sample_efficiency",
]


@dataclass(frozen=True)
class Arm:
    """One experimental condition of the transfer study."""

    name: str
    pretrain: bool


@dataclass(frozen=True)
class TransferPlan:
    """Pretrained-vs-scratch comparison in the scarce-data regime."""

    fraction: int = 10
    n_folds: int = 3
    required_margin: float = 2.0  # points of joint slot accuracy
    arms: tuple[Arm, ...] = (Arm("scratch", False), Arm("multiwoz-pretrained", True))


@dataclass(frozen=True)
class SampleEfficiencyPlan:
    """Accuracy versus nested training-set fractions, averaged over folds."""

    fractions: tuple[int, ...] = (10, 20, 30, 40, 50, 75, 100)
    n_folds: int = 3
    tolerance: str = "one fold-std"


def transfer_plan() -> TransferPlan:
    return TransferPlan()


def sample_efficiency_plan() -> SampleEfficiencyPlan:
    return SampleEfficiencyPlan()


def evaluate_with_primary(predictions_path, corpus="builtin", ids=None, cli="agreetrack"):
    """Score a predictions file with the toolkit's ``eval`` command and
    return the parsed report. ``ids`` restricts scoring to those dialogue
    ids (fold-wise evaluation)."""
    with tempfile.TemporaryDirectory() as tmp:
        report_path = Path(tmp) / "report.json"
        argv = [
            cli,
            "eval",
            str(predictions_path),
            str(corpus),
            "--mode",
            "lev",
            "--out",
            str(report_path),
        ]
        if ids is not None:
            ids_path = Path(tmp) / "ids.json"
            ids_path.write_text(json.dumps(sorted(ids)), encoding="utf-8")
            argv += ["--ids", str(ids_path)]
        proc = subprocess.run(argv, capture_output=True, text=True)
        if proc.returncode != 0:
            raise TrainerError(
                "evaluator failed (exit %d): %s"
                % (proc.returncode, (proc.stderr or proc.stdout).strip())
            )
        return json.loads(report_path.read_text(encoding="utf-8"))


def _read_prompts_or_explain(path, what: str, **kwargs):
    try:
        return read_prompts(path, **kwargs)
    except FileNotFoundError:
        raise TrainerError(
            "%s prompts not found: %s (emit them first; see the README)" % (what, path)
        ) from None


def pretrain_multiwoz(prompts_path, out_dir, config: TrainConfig | None = None):
    """Pretrain on prepared MultiWOZ prompt JSONL with a seeded 95/5
    dialogue-level holdout for early stopping; returns the run manifest."""
    config = config or TrainConfig(pretrain_on_multiwoz=True)
    if not Path(prompts_path).exists():
        raise TrainerError(
            "MultiWOZ prompts not found: %s; run `agreetrainer prepare-multiwoz "
            "/path/to/MultiWOZ-2.4/data.json --out %s` first" % (prompts_path, prompts_path)
        )
    records = read_prompts(prompts_path, tasks=("gen",))
    if not records:
        raise TrainerError("MultiWOZ prompts are empty: %s" % prompts_path)
    ids = sorted({r.dialogue_id for r in records})
    random.Random(config.seed).shuffle(ids)
    val_ids = set(ids[-max(1, len(ids) // 20) :]) if len(ids) > 1 else set(ids)
    train_records = [r for r in records if r.dialogue_id not in val_ids] or records
    val_records = [r for r in records if r.dialogue_id in val_ids]
    return train(config, train_records, val_records, out_dir)


def run_fold(
    config: TrainConfig,
    prompts_path,
    split_path,
    fold: int,
    fraction: int,
    out_dir,
    init_from=None,
    corpus="builtin",
    cli="agreetrack",
) -> tuple[float, object]:
    """Train on ``fraction``% of one fold, predict its test dialogues
    recursively, and evaluate through the toolkit CLI. Returns the fold's
    joint slot accuracy and the run manifest."""
    manifest = read_split_manifest(split_path)
    train_ids = set(fraction_ids(manifest, fold, fraction))
    val_ids = set(fold_part_ids(manifest, fold, "val"))
    test_ids = set(fold_part_ids(manifest, fold, "test"))
    train_records = _read_prompts_or_explain(
        prompts_path, "training", tasks=config.tasks, dialogue_ids=train_ids
    )
    val_records = read_prompts(prompts_path, tasks=("gen",), dialogue_ids=val_ids)
    test_records = read_prompts(prompts_path, tasks=("gen",), dialogue_ids=test_ids)

    out_dir = Path(out_dir)
    run_manifest = train(
        config,
        train_records,
        val_records,
        out_dir,
        split_reference={"path": str(split_path), "fold": fold, "fraction": fraction},
        init_from=init_from,
    )
    tokenizer, model, _ = load_checkpoint(run_manifest.checkpoint_path)
    generate = generation_fn(tokenizer, model, config.max_input_tokens, config.max_target_tokens)
    predictions_path = out_dir / "predictions.jsonl"
    generate_predictions(test_records, generate, predictions_path, recursive=True)
    run_manifest.predictions_path = str(predictions_path)
    run_manifest.save(out_dir / "manifest.json")
    report = evaluate_with_primary(predictions_path, corpus=corpus, ids=test_ids, cli=cli)
    return float(report["joint_slot_accuracy"]), run_manifest


def _summarize(scores) -> dict:
    return {
        "scores": list(scores),
        "mean": statistics.mean(scores),
        "std": statistics.pstdev(scores) if len(scores) > 1 else 0.0,
    }


def run_transfer(
    prompts_path,
    split_path,
    out_dir,
    multiwoz_prompts=None,
    config: TrainConfig | None = None,
    corpus="builtin",
    cli="agreetrack",
    log=print,
) -> dict:
    """Run the full transfer study; returns per-arm fold scores, means,
    fold-stds, and the observed margin in accuracy points."""
    plan = transfer_plan()
    config = config or TrainConfig()
    out_dir = Path(out_dir)
    needs_pretrain = any(arm.pretrain for arm in plan.arms)
    pretrain_ckpt = None
    if needs_pretrain:
        if multiwoz_prompts is None:
            raise TrainerError(
                "the multiwoz-pretrained arm needs prepared MultiWOZ prompts; "
                "run `agreetrainer prepare-multiwoz ...` and pass --multiwoz"
            )
        log("pretraining on MultiWOZ prompts: %s" % multiwoz_prompts)
        pre_manifest = pretrain_multiwoz(
            multiwoz_prompts, out_dir / "pretrain", replace(config, pretrain_on_multiwoz=True)
        )
        pretrain_ckpt = pre_manifest.checkpoint_path

    results: dict = {"plan": {"fraction": plan.fraction, "n_folds": plan.n_folds}, "arms": {}}
    for arm in plan.arms:
        scores = []
        for fold in range(plan.n_folds):
            log("arm %s, fold %d: training on the %d%% subset" % (arm.name, fold, plan.fraction))
            score, _ = run_fold(
                config,
                prompts_path,
                split_path,
                fold,
                plan.fraction,
                out_dir / arm.name / ("fold%d" % fold),
                init_from=pretrain_ckpt if arm.pretrain else None,
                corpus=corpus,
                cli=cli,
            )
            log("arm %s, fold %d: joint slot accuracy %.4f" % (arm.name, fold, score))
            scores.append(score)
        results["arms"][arm.name] = _summarize(scores)

    margin = 100.0 * (
        results["arms"]["multiwoz-pretrained"]["mean"] - results["arms"]["scratch"]["mean"]
    )
    results["margin_points"] = margin
    results["meets_margin"] = margin >= plan.required_margin
    (out_dir / "transfer_results.json").write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return results


def run_sample_efficiency(
    prompts_path,
    split_path,
    out_dir,
    config: TrainConfig | None = None,
    corpus="builtin",
    cli="agreetrack",
    log=print,
) -> dict:
    """Run the sample-efficiency study; returns per-fraction fold scores,
    means, fold-stds, and whether the curve is non-decreasing within one
    fold-std."""
    plan = sample_efficiency_plan()
    config = config or TrainConfig()
    out_dir = Path(out_dir)
    results: dict = {"plan": {"fractions": list(plan.fractions), "n_folds": plan.n_folds}}
    curve = {}
    for fraction in plan.fractions:
        scores = []
        for fold in range(plan.n_folds):
            log("fraction %d%%, fold %d: training" % (fraction, fold))
            score, _ = run_fold(
                replace(config, train_fraction=fraction),
                prompts_path,
                split_path,
                fold,
                fraction,
                out_dir / ("fraction%03d" % fraction) / ("fold%d" % fold),
                corpus=corpus,
                cli=cli,
            )
            log("fraction %d%%, fold %d: joint slot accuracy %.4f" % (fraction, fold, score))
            scores.append(score)
        curve[fraction] = _summarize(scores)
    results["curve"] = {str(k): v for k, v in curve.items()}
    results["non_decreasing_within_fold_std"] = curve_is_monotone(curve, plan.fractions)
    (out_dir / "sample_efficiency_results.json").write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return results


def curve_is_monotone(curve: dict, fractions) -> bool:
    """True when each step of the mean curve drops by no more than one
    fold-std of the earlier point (the study's success criterion)."""
    for earlier, later in zip(fractions, fractions[1:]):
        if curve[later]["mean"] < curve[earlier]["mean"] - curve[earlier]["std"]:
            return False
    return True
