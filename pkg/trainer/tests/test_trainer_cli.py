"""Command-line interface: exit codes, file outputs, error surfaces."""

import json

import pytest

from agreetrainer.cli import main

from promptlib import smoke_lines, two_turn_lines
from test_multiwoz import mini_corpus


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _rows(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


# ------------------------------------------------------------------- predict

def test_predict_mock_echo_gold(tmp_path, capsys):
    prompts = _write(tmp_path / "p.jsonl", two_turn_lines())
    out = tmp_path / "pred.jsonl"
    assert main(["predict", "--prompts", str(prompts), "--out", str(out),
                 "--mock", "echo-gold"]) == 0
    assert capsys.readouterr().out.strip() == "wrote 2 predictions to %s" % out
    assert [r["output"] for r in _rows(out)] == ["[gpt-negochat]", "[gpt-negochat]"]


def test_predict_mock_empty_recursive(tmp_path):
    prompts = _write(tmp_path / "p.jsonl", smoke_lines(n_dialogues=1))
    out = tmp_path / "pred.jsonl"
    assert main(["predict", "--prompts", str(prompts), "--out", str(out),
                 "--mock", "empty", "--recursive"]) == 0
    assert all(r["output"] == "[gpt-negochat]" for r in _rows(out))


def test_predict_requires_exactly_one_source(tmp_path):
    prompts = _write(tmp_path / "p.jsonl", two_turn_lines())
    with pytest.raises(SystemExit) as excinfo:
        main(["predict", "--prompts", str(prompts), "--out", str(tmp_path / "o.jsonl")])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["predict", "--prompts", str(prompts), "--out", str(tmp_path / "o.jsonl"),
              "--mock", "echo-gold", "--checkpoint", "x.pt"])
    assert excinfo.value.code == 2


def test_predict_unknown_mock_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["predict", "--prompts", "p", "--out", "o", "--mock", "oracle"])
    assert excinfo.value.code == 2


def test_predict_missing_checkpoint_reports_error(tmp_path, capsys):
    prompts = _write(tmp_path / "p.jsonl", two_turn_lines())
    code = main(["predict", "--prompts", str(prompts), "--out", str(tmp_path / "o.jsonl"),
                 "--checkpoint", str(tmp_path / "missing.pt")])
    assert code == 1
    assert capsys.readouterr().err.startswith("error: checkpoint not found")


def test_predict_missing_prompts_reports_error(tmp_path, capsys):
    code = main(["predict", "--prompts", str(tmp_path / "nope.jsonl"),
                 "--out", str(tmp_path / "o.jsonl"), "--mock", "empty"])
    assert code == 1
    assert capsys.readouterr().err.startswith("error:")


# --------------------------------------------------------------------- train

def test_train_smoke_and_predict_from_checkpoint(tmp_path, capsys):
    prompts = _write(tmp_path / "p.jsonl", smoke_lines())
    run_dir = tmp_path / "run"
    assert main(["train", "--prompts", str(prompts), "--out-dir", str(run_dir),
                 "--backbone", "tiny-random", "--max-epochs", "1",
                 "--batch-size", "8"]) == 0
    assert "best epoch 0" in capsys.readouterr().out
    assert (run_dir / "checkpoint.pt").exists()

    out = tmp_path / "pred.jsonl"
    assert main(["predict", "--prompts", str(prompts), "--out", str(out),
                 "--checkpoint", str(run_dir / "checkpoint.pt"),
                 "--max-new-tokens", "8"]) == 0
    assert len(_rows(out)) == 18


def test_train_with_split_manifest(tmp_path):
    prompts = _write(tmp_path / "p.jsonl", smoke_lines())
    split = tmp_path / "splits.json"
    split.write_text(json.dumps({
        "folds": [{"fold": 0, "train": ["sd0", "sd1"], "val": ["sd1"], "test": ["sd2"],
                   "fractions": {"10": ["sd0"], "100": ["sd0", "sd1"]}}],
    }), encoding="utf-8")
    run_dir = tmp_path / "run"
    assert main(["train", "--prompts", str(prompts), "--out-dir", str(run_dir),
                 "--split", str(split), "--fold", "0", "--fraction", "10",
                 "--backbone", "tiny-random", "--max-epochs", "1",
                 "--batch-size", "8"]) == 0
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["split_reference"] == {"path": str(split), "fold": 0, "fraction": 10}
    assert manifest["config"]["train_fraction"] == 10


def test_train_bad_config_reports_error(tmp_path, capsys):
    prompts = _write(tmp_path / "p.jsonl", smoke_lines())
    code = main(["train", "--prompts", str(prompts), "--out-dir", str(tmp_path / "r"),
                 "--backbone", "tiny-random", "--tasks", "gen,qa"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


# ---------------------------------------------------------- prepare-multiwoz

def test_prepare_multiwoz_cli(tmp_path, capsys):
    data = tmp_path / "data.json"
    data.write_text(json.dumps(mini_corpus()), encoding="utf-8")
    out = tmp_path / "mwoz.jsonl"
    assert main(["prepare-multiwoz", str(data), "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "wrote 3 examples to %s" % out

    code = main(["prepare-multiwoz", str(tmp_path / "missing.json"), "--out", str(out)])
    assert code == 1
    assert "MultiWOZ 2.4" in capsys.readouterr().err


# ------------------------------------------------------------------ experiment

def test_experiment_dry_run_prints_plan(capsys):
    assert main(["experiment", "transfer"]) == 0
    out = capsys.readouterr().out
    assert "scratch, multiwoz-pretrained" in out
    assert "10% of each fold's training dialogues" in out
    assert "GPU-scale" in out

    assert main(["experiment", "sample-efficiency"]) == 0
    out = capsys.readouterr().out
    assert "10%, 20%, 30%, 40%, 50%, 75%, 100% (nested)" in out
    assert "one fold-std" in out


def test_experiment_run_requires_paths(capsys):
    assert main(["experiment", "transfer", "--run"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error: --run needs --prompts, --split, --out-dir")


def test_no_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2
