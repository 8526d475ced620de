"""Command-line interface.

One executable, ``agreetrack``, exposes the toolkit non-interactively::

    agreetrack validate CORPUS [--strict]     check a corpus against the ontology
    agreetrack stats CORPUS [--out FILE]      corpus statistics (JSON + summary)
    agreetrack track CORPUS --out FILE        rule-based tracker -> predictions JSONL
    agreetrack emit CORPUS --out FILE         Gen/Clf prompt JSONL for seq2seq training
    agreetrack split CORPUS --out FILE        fold/fraction manifest (dialogue ids)
    agreetrack eval PRED CORPUS [--mode ...]  score predictions against gold states
    agreetrack ontology-dump                  print the active ontology as JSON

``CORPUS`` is a corpus JSON path, or the literal ``builtin`` for the bundled
synthetic corpus. Exit codes: 0 success, 1 data/validation error, 2 usage
error. All outputs are deterministic given ``--seed`` and sorted by dialogue
id and turn.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .dialogue import (
    CorpusError,
    CorpusReport,
    builtin_corpus_path,
    dialogue_stats,
    load_corpus,
)
from .lev import LevParseError, render_state
from .metrics import AlignmentError, evaluate, load_predictions
from .ontology import GPT_NEGOCHAT, Ontology, OntologyError, load_ontology
from .prompts import CLF, DEFAULT_WINDOW, GEN, emit_dataset
from .splits import DEFAULT_FRACTIONS, DEFAULT_SEED, fold_splits, fractional_subsets
from .tracker import track_dialogue

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agreetrack",
        description="Agreement tracking for two-party negotiation dialogues.",
    )
    parser.add_argument("--version", action="version", version="agreetrack %s" % __version__)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed (default 13)")
    parser.add_argument(
        "--ontology", metavar="PATH", default=None,
        help="ontology JSON path (default: built-in gpt-negochat)",
    )
    parser.add_argument(
        "--strict", action="store_true",
        help="fail on out-of-ontology annotations instead of flagging them",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a corpus file")
    p.add_argument("corpus")

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("corpus")
    p.add_argument("--out", metavar="FILE", default=None, help="also write the report as JSON")

    p = sub.add_parser("track", help="run the rule-based tracker over act annotations")
    p.add_argument("corpus")
    p.add_argument("--out", metavar="FILE", required=True, help="predictions JSONL path")

    p = sub.add_parser("emit", help="emit Gen/Clf prompt examples as JSONL")
    p.add_argument("corpus")
    p.add_argument("--out", metavar="FILE", required=True)
    p.add_argument("--tasks", default="gen,clf", help="comma list of: gen, clf (default both)")
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="context window size")
    p.add_argument(
        "--ids", metavar="FILE", default=None,
        help="restrict to dialogue ids listed in FILE (JSON array or one id per line)",
    )

    p = sub.add_parser("split", help="write a fold/fraction split manifest")
    p.add_argument("corpus")
    p.add_argument("--out", metavar="FILE", required=True)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument(
        "--fractions", default=",".join(str(f) for f in DEFAULT_FRACTIONS),
        help="comma list of train percentages (default %s)" % (",".join(str(f) for f in DEFAULT_FRACTIONS)),
    )

    p = sub.add_parser("eval", help="score a predictions file against gold states")
    p.add_argument("predictions")
    p.add_argument("corpus")
    p.add_argument("--mode", choices=("state", "lev"), default="state",
                   help="decode outputs as full states or as edit spans (default state)")
    p.add_argument(
        "--ids", metavar="FILE", default=None,
        help="score only the dialogue ids listed in FILE (JSON array or one id per line)",
    )
    p.add_argument("--out", metavar="FILE", default=None, help="also write the report as JSON")

    p = sub.add_parser("ontology-dump", help="print the active ontology as JSON")
    p.add_argument("--out", metavar="FILE", default=None)

    return parser


def _ontology(args) -> Ontology:
    if args.ontology is None:
        return GPT_NEGOCHAT
    return load_ontology(args.ontology)


def _corpus_path(token: str):
    return builtin_corpus_path() if token == "builtin" else Path(token)


def _load(args, ontology: Ontology, report: CorpusReport | None = None):
    return load_corpus(
        _corpus_path(args.corpus), ontology, strict=args.strict, report=report
    )


def _gold_states(corpus) -> dict[str, list[dict[str, str]]]:
    return {d.id: [dict(t.gold_state) for t in d.turns] for d in corpus}


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_validate(args) -> int:
    ontology = _ontology(args)
    report = CorpusReport()
    load_corpus(_corpus_path(args.corpus), ontology, strict=args.strict, report=report)
    report.emit()
    print(
        "ok: %d dialogues, %d raw utterances, %d warning(s)"
        % (report.dialogue_count, report.raw_utterance_count, len(report.violations))
    )
    return 0


def _cmd_stats(args) -> int:
    corpus = _load(args, _ontology(args))
    stats = dialogue_stats(corpus)
    payload = stats.to_dict()
    if args.out:
        _write_json(args.out, payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_track(args) -> int:
    ontology = _ontology(args)
    corpus = _load(args, ontology)
    lines = []
    for dialogue in sorted(corpus, key=lambda d: d.id):
        run = track_dialogue(dialogue)
        for t, state in enumerate(run.states):
            lines.append(
                {"dialogue_id": dialogue.id, "turn": t, "output": render_state(state, ontology)}
            )
    with open(args.out, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(json.dumps(line, ensure_ascii=False) + "\n")
    print("wrote %d predictions to %s" % (len(lines), args.out))
    if any(d.has_gold_states for d in corpus):
        preds, _ = load_predictions(args.out, mode="state", ontology=ontology)
        result = evaluate(preds, _gold_states(corpus))
        print(
            "tracker vs gold: joint_slot_accuracy=%.4f joint_f1=%.4f over %d turns"
            % (result.joint_slot_accuracy, result.joint_f1, result.turns)
        )
    return 0


def _cmd_emit(args) -> int:
    ontology = _ontology(args)
    corpus = _load(args, ontology)
    if args.ids:
        wanted = _read_ids(args.ids)
        missing = wanted - {d.id for d in corpus}
        if missing:
            raise CorpusError("unknown dialogue id %r in --ids" % sorted(missing)[0])
        corpus = [d for d in corpus if d.id in wanted]
    tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
    bad = set(tasks) - {GEN, CLF}
    if bad:
        raise CorpusError("unknown task %r (expected gen and/or clf)" % sorted(bad)[0])
    count = emit_dataset(
        corpus, args.out, tasks=tasks, w=args.window, seed=args.seed,
        ontology=ontology, domain=ontology.name,
    )
    print("wrote %d examples to %s" % (count, args.out))
    return 0


def _read_ids(path: str) -> set[str]:
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        ids = json.loads(text)
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise CorpusError("--ids JSON must be an array of strings")
        return set(ids)
    return {line.strip() for line in text.splitlines() if line.strip()}


def _cmd_split(args) -> int:
    corpus = _load(args, _ontology(args))
    ids = [d.id for d in corpus]
    fractions = tuple(int(f) for f in args.fractions.split(",") if f.strip())
    folds = []
    for fold in fold_splits(ids, n_folds=args.folds, seed=args.seed):
        entry = fold.to_dict()
        entry["fractions"] = {
            str(k): list(v) for k, v in fractional_subsets(fold.train, fractions).items()
        }
        folds.append(entry)
    _write_json(args.out, {"seed": args.seed, "n_folds": args.folds, "folds": folds})
    sizes = ["%d/%d/%d" % (len(f["train"]), len(f["val"]), len(f["test"])) for f in folds]
    print("wrote %d folds (train/val/test: %s) to %s" % (len(folds), ", ".join(sizes), args.out))
    return 0


def _cmd_eval(args) -> int:
    ontology = _ontology(args)
    corpus = _load(args, ontology)
    if args.ids:
        wanted = _read_ids(args.ids)
        missing = wanted - {d.id for d in corpus}
        if missing:
            raise CorpusError("unknown dialogue id %r in --ids" % sorted(missing)[0])
        corpus = [d for d in corpus if d.id in wanted]
    preds, flawed = load_predictions(args.predictions, mode=args.mode, ontology=ontology)
    result = evaluate(preds, _gold_states(corpus))
    payload = result.to_dict()
    payload["unparseable_outputs"] = flawed
    payload["mode"] = args.mode
    if args.out:
        _write_json(args.out, payload)
    print(
        "joint_slot_accuracy=%.4f joint_f1=%.4f turns=%d unparseable_outputs=%d"
        % (result.joint_slot_accuracy, result.joint_f1, result.turns, flawed)
    )
    return 0


def _cmd_ontology_dump(args) -> int:
    ontology = _ontology(args)
    if args.out:
        _write_json(args.out, ontology.to_dict())
    print(ontology.dumps())
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "track": _cmd_track,
    "emit": _cmd_emit,
    "split": _cmd_split,
    "eval": _cmd_eval,
    "ontology-dump": _cmd_ontology_dump,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (CorpusError, OntologyError, AlignmentError, LevParseError, OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
