"""The full loop: emit -> split -> train -> predict -> evaluate.

This demo drives the entire two-package pipeline at smoke scale, through
the same file interfaces a real GPU run uses:

1. the toolkit emits Gen prompts and a 3-fold split manifest;
2. the trainer fine-tunes a deliberately tiny random backbone for two
   epochs on fold 0's 10% subset (seconds on a CPU — nothing here is
   expected to be *good*);
3. the trainer decodes three held-out test dialogues recursively, each
   turn conditioned on the model's own previous prediction;
4. the toolkit scores the predictions file — and, as a control, scores the
   echo-gold mock, which must hit exactly 1.0 if the plumbing is lossless.

A real run swaps `--backbone tiny-random` for a pretrained checkpoint and
drops the dialogue cap; nothing else changes.

Run:  python3 demos/07_train_and_evaluate.py
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path


def run(*argv: str) -> None:
    print("$ %s" % " ".join(argv))
    proc = subprocess.run(argv, text=True, capture_output=True)
    for stream in (proc.stdout, proc.stderr):
        for line in stream.strip().splitlines():
            print("  %s" % line)
    if proc.returncode != 0:
        sys.exit("step failed with exit code %d" % proc.returncode)


def main() -> None:
    for tool in ("agreetrack", "agreetrainer"):
        if shutil.which(tool) is None:
            sys.exit("%s is not on PATH; install both packages first "
                     "(pip install -e . -e trainer --no-build-isolation)" % tool)

    with tempfile.TemporaryDirectory(prefix="agree-demo-") as tmp:
        work = Path(tmp)
        prompts = work / "prompts.jsonl"
        splits = work / "splits.json"

        print("== 1. emit prompts and splits ==========================")
        run("agreetrack", "emit", "builtin", "--out", str(prompts), "--tasks", "gen")
        run("agreetrack", "split", "builtin", "--out", str(splits))
        print()

        manifest = json.loads(splits.read_text(encoding="utf-8"))
        fold = manifest["folds"][0]
        test_ids = fold["test"][:3]  # keep the CPU demo quick
        ids_file = work / "test_ids.json"
        ids_file.write_text(json.dumps(test_ids), encoding="utf-8")
        test_prompts = work / "test_prompts.jsonl"
        run("agreetrack", "emit", "builtin", "--out", str(test_prompts),
            "--tasks", "gen", "--ids", str(ids_file))
        print()

        print("== 2. train on fold 0's 10%% subset (%d dialogues) ======"
              % len(fold["fractions"]["10"]))
        run("agreetrainer", "train", "--prompts", str(prompts),
            "--out-dir", str(work / "run"), "--split", str(splits),
            "--fold", "0", "--fraction", "10",
            "--backbone", "tiny-random", "--max-epochs", "2", "--batch-size", "16")
        print()

        print("== 3. recursive prediction on %d test dialogues ========" % len(test_ids))
        predictions = work / "predictions.jsonl"
        run("agreetrainer", "predict", "--prompts", str(test_prompts),
            "--out", str(predictions), "--checkpoint", str(work / "run" / "checkpoint.pt"),
            "--recursive", "--max-new-tokens", "24")
        print()

        print("== 4. evaluate =========================================")
        run("agreetrack", "eval", str(predictions), "builtin",
            "--mode", "lev", "--ids", str(ids_file))
        print()
        print("(A two-epoch random-init toy scores what it deserves; the")
        print(" numbers become meaningful with a pretrained backbone.)")
        print()

        print("== 5. control: the echo-gold mock must score exactly 1.0")
        mock_predictions = work / "mock_predictions.jsonl"
        run("agreetrainer", "predict", "--prompts", str(test_prompts),
            "--out", str(mock_predictions), "--mock", "echo-gold")
        run("agreetrack", "eval", str(mock_predictions), "builtin",
            "--mode", "lev", "--ids", str(ids_file))


if __name__ == "__main__":
    main()
