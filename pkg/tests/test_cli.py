import json
import shutil
import subprocess

import pytest

from agreetrack.cli import main

SMALL_CORPUS = {
    "dialogues": [
        {
            "id": "d1",
            "turns": [
                {
                    "speaker": "employer",
                    "text": "We can offer ninety thousand.",
                    "acts": [{"kind": "offer", "pairs": [["salary", "90k usd"]]}],
                    "state": {},
                },
                {
                    "speaker": "candidate",
                    "text": "Ninety thousand works for me.",
                    "acts": [{"kind": "accept", "pairs": [["salary", "90k usd"]]}],
                    "state": {"salary": "90k usd"},
                },
            ],
        },
        {
            "id": "d2",
            "turns": [
                {
                    "speaker": "candidate",
                    "text": "I want a twenty percent pension.",
                    "acts": [{"kind": "offer", "pairs": [["pension fund", "20%"]]}],
                    "state": {},
                },
                {
                    "speaker": "employer",
                    "text": "Twenty percent is too steep for us.",
                    "acts": [{"kind": "reject", "pairs": [["pension fund", "20%"]]}],
                    "state": {},
                },
            ],
        },
        {
            "id": "d3",
            "turns": [
                {
                    "speaker": "employer",
                    "text": "An eight hour day, then.",
                    "acts": [{"kind": "offer", "pairs": [["working hours", "8 hours"]]}],
                    "state": {},
                },
                {
                    "speaker": "candidate",
                    "text": "Deal.",
                    "acts": [{"kind": "accept"}],
                    "state": {"working hours": "8 hours"},
                },
            ],
        },
    ]
}


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL_CORPUS), encoding="utf-8")
    return str(path)


@pytest.fixture
def dirty_corpus_file(tmp_path):
    doc = json.loads(json.dumps(SMALL_CORPUS))
    doc["dialogues"][0]["turns"][1]["state"] = {"salary": "75k usd"}
    path = tmp_path / "dirty.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


class TestValidate:
    def test_builtin_strict_is_clean(self, capsys):
        assert main(["--strict", "validate", "builtin"]) == 0
        out = capsys.readouterr().out
        assert "ok: 105 dialogues, 1484 raw utterances, 0 warning(s)" in out

    def test_lenient_flags_dirty_corpus(self, dirty_corpus_file, capsys):
        assert main(["validate", dirty_corpus_file]) == 0
        captured = capsys.readouterr()
        assert "1 warning(s)" in captured.out
        assert "out-of-ontology" in captured.err and "75k usd" in captured.err

    def test_strict_fails_dirty_corpus(self, dirty_corpus_file, capsys):
        assert main(["--strict", "validate", dirty_corpus_file]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file_is_data_error(self, capsys):
        assert main(["validate", "/nonexistent/corpus.json"]) == 1
        assert "error:" in capsys.readouterr().err


class TestStats:
    def test_builtin_stats_json(self, capsys, tmp_path):
        out_file = tmp_path / "stats.json"
        assert main(["stats", "builtin", "--out", str(out_file)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["dialogue_count"] == 105
        assert payload["raw_utterance_count"] == 1484
        assert abs(payload["mean_tokens_per_merged_turn"] - 34.27) <= 0.5
        assert json.loads(out_file.read_text(encoding="utf-8")) == payload


class TestTrack:
    def test_predictions_sorted_and_scored(self, corpus_file, tmp_path, capsys):
        out_file = tmp_path / "pred.jsonl"
        assert main(["track", corpus_file, "--out", str(out_file)]) == 0
        stdout = capsys.readouterr().out
        assert "wrote 6 predictions" in stdout
        assert "tracker vs gold: joint_slot_accuracy=1.0000 joint_f1=1.0000" in stdout
        records = [json.loads(l) for l in out_file.read_text(encoding="utf-8").splitlines()]
        assert [(r["dialogue_id"], r["turn"]) for r in records] == [
            ("d1", 0), ("d1", 1), ("d2", 0), ("d2", 1), ("d3", 0), ("d3", 1),
        ]
        assert records[1]["output"] == "salary = 90k usd"
        assert records[0]["output"] == "none"

    def test_eval_round_trip(self, corpus_file, tmp_path, capsys):
        out_file = tmp_path / "pred.jsonl"
        main(["track", corpus_file, "--out", str(out_file)])
        capsys.readouterr()
        assert main(["eval", str(out_file), corpus_file]) == 0
        out = capsys.readouterr().out
        assert "joint_slot_accuracy=1.0000" in out
        assert "unparseable_outputs=0" in out


class TestEmit:
    def test_gen_and_clf(self, corpus_file, tmp_path, capsys):
        out_file = tmp_path / "prompts.jsonl"
        assert main(["emit", corpus_file, "--out", str(out_file)]) == 0
        assert "wrote 12 examples" in capsys.readouterr().out
        lines = out_file.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 12
        tasks = [json.loads(l)["task"] for l in lines]
        assert tasks == ["gen", "clf"] * 6

    def test_single_task_and_window(self, corpus_file, tmp_path, capsys):
        out_file = tmp_path / "gen.jsonl"
        assert main(["emit", corpus_file, "--out", str(out_file), "--tasks", "gen",
                     "--window", "1"]) == 0
        lines = [json.loads(l) for l in out_file.read_text(encoding="utf-8").splitlines()]
        assert all(r["task"] == "gen" for r in lines)
        # window 1: exactly one speaker tag in each input's context region
        first = lines[0]["input"]
        assert first.count("employer:") + first.count("candidate:") == 1

    def test_ids_filter(self, corpus_file, tmp_path, capsys):
        ids_file = tmp_path / "ids.txt"
        ids_file.write_text("d2\n", encoding="utf-8")
        out_file = tmp_path / "subset.jsonl"
        assert main(["emit", corpus_file, "--out", str(out_file), "--ids", str(ids_file)]) == 0
        records = [json.loads(l) for l in out_file.read_text(encoding="utf-8").splitlines()]
        assert {r["dialogue_id"] for r in records} == {"d2"}

    def test_ids_filter_json_array(self, corpus_file, tmp_path):
        ids_file = tmp_path / "ids.json"
        ids_file.write_text('["d1", "d3"]', encoding="utf-8")
        out_file = tmp_path / "subset.jsonl"
        assert main(["emit", corpus_file, "--out", str(out_file), "--ids", str(ids_file)]) == 0
        records = [json.loads(l) for l in out_file.read_text(encoding="utf-8").splitlines()]
        assert {r["dialogue_id"] for r in records} == {"d1", "d3"}

    def test_unknown_id_fails(self, corpus_file, tmp_path, capsys):
        ids_file = tmp_path / "ids.txt"
        ids_file.write_text("ghost\n", encoding="utf-8")
        assert main(["emit", corpus_file, "--out", str(tmp_path / "x.jsonl"),
                     "--ids", str(ids_file)]) == 1
        assert "ghost" in capsys.readouterr().err

    def test_unknown_task_fails(self, corpus_file, tmp_path, capsys):
        assert main(["emit", corpus_file, "--out", str(tmp_path / "x.jsonl"),
                     "--tasks", "gen,summarize"]) == 1
        assert "summarize" in capsys.readouterr().err

    def test_seed_flag_changes_output(self, corpus_file, tmp_path):
        a, b, c = (tmp_path / n for n in ("a.jsonl", "b.jsonl", "c.jsonl"))
        main(["emit", corpus_file, "--out", str(a)])
        main(["--seed", "13", "emit", corpus_file, "--out", str(b)])
        main(["--seed", "99", "emit", corpus_file, "--out", str(c)])
        assert a.read_bytes() == b.read_bytes()  # default seed is 13
        assert a.read_bytes() != c.read_bytes()


class TestSplit:
    def test_builtin_manifest(self, tmp_path, capsys):
        out_file = tmp_path / "splits.json"
        assert main(["split", "builtin", "--out", str(out_file)]) == 0
        assert "train/val/test: 60/10/35, 60/10/35, 60/10/35" in capsys.readouterr().out
        manifest = json.loads(out_file.read_text(encoding="utf-8"))
        assert manifest["seed"] == 13 and manifest["n_folds"] == 3
        assert len(manifest["folds"]) == 3
        fold = manifest["folds"][0]
        assert len(fold["test"]) == 35
        assert len(fold["fractions"]["10"]) == 6
        assert fold["fractions"]["100"] == fold["train"]

    def test_custom_fractions(self, corpus_file, tmp_path):
        out_file = tmp_path / "splits.json"
        # 3 dialogues cannot support folds with validation; builtin only
        assert main(["split", "builtin", "--out", str(out_file), "--fractions", "50,100"]) == 0
        manifest = json.loads(out_file.read_text(encoding="utf-8"))
        assert set(manifest["folds"][0]["fractions"]) == {"50", "100"}

    def test_too_small_corpus_fails_cleanly(self, corpus_file, tmp_path, capsys):
        assert main(["split", corpus_file, "--out", str(tmp_path / "s.json")]) == 1
        assert "error:" in capsys.readouterr().err


class TestEvalLevMode:
    def test_lev_predictions_with_malformed_line(self, corpus_file, tmp_path, capsys):
        pred = tmp_path / "lev.jsonl"
        rows = [
            {"dialogue_id": "d1", "turn": 0, "output": "[gpt-negochat]"},
            {"dialogue_id": "d1", "turn": 1, "output": "[gpt-negochat] insert salary = 90k usd"},
            {"dialogue_id": "d2", "turn": 0, "output": "[gpt-negochat]"},
            {"dialogue_id": "d2", "turn": 1, "output": "utter gibberish"},
            {"dialogue_id": "d3", "turn": 0, "output": "[gpt-negochat]"},
            {"dialogue_id": "d3", "turn": 1, "output": "[gpt-negochat] insert working hours = 8 hours"},
        ]
        pred.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
        assert main(["eval", str(pred), corpus_file, "--mode", "lev"]) == 0
        out = capsys.readouterr().out
        # gibberish line decodes to carried-over state, which happens to be
        # gold here (d2 never reaches an agreement); only the flaw count tells.
        assert "joint_slot_accuracy=1.0000" in out
        assert "unparseable_outputs=1" in out

    def test_misaligned_predictions_fail(self, corpus_file, tmp_path, capsys):
        pred = tmp_path / "short.jsonl"
        pred.write_text(
            json.dumps({"dialogue_id": "d1", "turn": 0, "output": "none"}) + "\n",
            encoding="utf-8",
        )
        assert main(["eval", str(pred), corpus_file]) == 1
        assert "no predictions for dialogue 'd2'" in capsys.readouterr().err

    def test_ids_restricts_scoring(self, corpus_file, tmp_path, capsys):
        pred = tmp_path / "one.jsonl"
        pred.write_text(
            json.dumps({"dialogue_id": "d1", "turn": 0, "output": "none"}) + "\n"
            + json.dumps({"dialogue_id": "d1", "turn": 1, "output": "salary = 90k usd"}) + "\n",
            encoding="utf-8",
        )
        ids_file = tmp_path / "ids.txt"
        ids_file.write_text("d1\n", encoding="utf-8")
        assert main(["eval", str(pred), corpus_file, "--ids", str(ids_file)]) == 0
        out = capsys.readouterr().out
        assert "joint_slot_accuracy=1.0000" in out and "turns=2" in out

    def test_report_written_to_file(self, corpus_file, tmp_path, capsys):
        pred = tmp_path / "pred.jsonl"
        main(["track", corpus_file, "--out", str(pred)])
        report = tmp_path / "report.json"
        main(["eval", str(pred), corpus_file, "--out", str(report)])
        payload = json.loads(report.read_text(encoding="utf-8"))
        assert payload["mode"] == "state"
        assert payload["joint_f1"] == 1.0
        assert payload["unparseable_outputs"] == 0


class TestOntologyDump:
    def test_prints_active_ontology(self, capsys):
        assert main(["ontology-dump"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["name"] == "gpt-negochat"
        assert len(payload["slots"]) == 6

    def test_custom_ontology_round_trips(self, tmp_path, capsys):
        assert main(["ontology-dump", "--out", str(tmp_path / "ont.json")]) == 0
        capsys.readouterr()
        assert main(["--ontology", str(tmp_path / "ont.json"), "ontology-dump"]) == 0
        assert json.loads(capsys.readouterr().out)["name"] == "gpt-negochat"


class TestUsageErrors:
    def test_no_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["validate", "builtin", "--frobnicate"])
        assert exc.value.code == 2

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.startswith("agreetrack ")


class TestConsoleScript:
    def test_installed_entry_point(self):
        exe = shutil.which("agreetrack")
        assert exe, "console script not installed"
        proc = subprocess.run(
            [exe, "validate", "builtin"], capture_output=True, text=True, timeout=120
        )
        assert proc.returncode == 0
        assert "ok: 105 dialogues" in proc.stdout
