"""MultiWOZ 2.4 preprocessing into the shared span grammar."""

import json

import pytest

from agreetrainer.data import read_prompts
from agreetrainer.levtext import parse_ops, state_region
from agreetrainer.model import TrainerError
from agreetrainer.multiwoz import flatten_state, prepare, state_diff

HOTEL_TURN = {
    "hotel": {
        "book": {"booked": [{"name": "acorn"}], "day": "monday", "stay": "2", "people": ""},
        "semi": {"area": "north", "pricerange": "cheap", "parking": "not mentioned",
                 "stars": "none", "internet": []},
    },
    "train": {"book": {"booked": []}, "semi": {"destination": ""}},
}


def mini_corpus() -> dict:
    return {
        "MUL0001.json": {
            "log": [
                {"text": "i need a cheap hotel in the north .", "metadata": {}},
                {"text": "sure , what day ?", "metadata": {
                    "hotel": {"book": {}, "semi": {"area": "north", "pricerange": "cheap"}},
                }},
                {"text": "monday , 2 nights .", "metadata": {}},
                {"text": "done !", "metadata": {
                    "hotel": {"book": {"day": "monday", "stay": "2"},
                              "semi": {"area": "north", "pricerange": "moderate"}},
                }},
            ],
        },
        "SNG0002.json": {
            "log": [
                {"text": "find me a museum", "metadata": {}},
                {"text": "ok", "metadata": {
                    "attraction": {"book": {}, "semi": {"type": "museum"}},
                }},
            ],
        },
    }


# ----------------------------------------------------------- state flattening

def test_flatten_state_merges_semi_and_book_and_filters():
    state = flatten_state(HOTEL_TURN)
    assert state == {
        "hotel-area": "north",
        "hotel-pricerange": "cheap",
        "hotel-day": "monday",
        "hotel-stay": "2",
    }
    # "booked" bookkeeping, empty strings, lists, "none" and "not mentioned"
    # markers are all dropped; empty domains vanish entirely.


def test_flatten_state_sanitizes_grammar_collisions():
    state = flatten_state(
        {"hotel": {"semi": {"name": "the = ; house", "foo;bar": "x"}, "book": {}}}
    )
    assert state == {"hotel-name": "the : , house", "hotel-foo,bar": "x"}
    # The sanitized strings survive a grammar round trip.
    _, ops, dropped = parse_ops("[multiwoz] insert hotel-name = the : , house")
    assert ops == [("insert", "hotel-name", "the : , house")] and dropped == 0


def test_state_diff_orders_ops_lexicographically():
    previous = {"hotel-area": "north", "hotel-pricerange": "cheap", "hotel-stay": "2"}
    current = {"hotel-area": "north", "hotel-pricerange": "moderate", "hotel-day": "monday"}
    assert state_diff(previous, current) == [
        ("insert", "hotel-day", "monday"),
        ("substitute", "hotel-pricerange", "moderate"),
        ("delete", "hotel-stay", None),
    ]
    assert state_diff({}, {}) == []
    assert state_diff(current, current) == []


# ------------------------------------------------------------------- prepare

def test_prepare_emits_gen_prompts_in_grammar(tmp_path):
    data = tmp_path / "data.json"
    data.write_text(json.dumps(mini_corpus()), encoding="utf-8")
    out = tmp_path / "mwoz.jsonl"
    assert prepare(data, out) == 3

    records = read_prompts(out)  # the trainer's own reader accepts the file
    assert [(r.dialogue_id, r.turn) for r in records] == [
        ("MUL0001", 0), ("MUL0001", 1), ("SNG0002", 0),
    ]
    assert all(r.task == "gen" for r in records)
    assert all(r.input_text.startswith("track agreements: [multiwoz] ") for r in records)
    assert all(r.target_text.startswith("[multiwoz]") for r in records)

    first, second, _ = records
    assert state_region(first.input_text) == "none"
    assert first.target_text == (
        "[multiwoz] insert hotel-area = north ; insert hotel-pricerange = cheap"
    )
    # The previous-state region of turn 1 is turn 0's resulting state.
    assert state_region(second.input_text) == "hotel-area = north ; hotel-pricerange = cheap"
    assert second.target_text == (
        "[multiwoz] insert hotel-day = monday ; substitute hotel-pricerange = moderate ; "
        "insert hotel-stay = 2"
    )
    # Context is speaker-tagged and windowed.
    assert "user: i need a cheap hotel in the north ." in first.input_text
    assert "system: sure , what day ?" in second.input_text
    assert "user: monday , 2 nights ." in second.input_text


def test_prepare_window_trims_context(tmp_path):
    data = tmp_path / "data.json"
    data.write_text(json.dumps(mini_corpus()), encoding="utf-8")
    out = tmp_path / "mwoz.jsonl"
    prepare(data, out, window=1)
    second = read_prompts(out)[1]
    assert "system: sure , what day ?" not in second.input_text
    assert "user: monday , 2 nights ." in second.input_text


def test_prepare_max_dialogues_stops_early(tmp_path):
    data = tmp_path / "data.json"
    data.write_text(json.dumps(mini_corpus()), encoding="utf-8")
    out = tmp_path / "mwoz.jsonl"
    assert prepare(data, out, max_dialogues=1) == 2  # MUL0001 only (sorted order)
    assert {r.dialogue_id for r in read_prompts(out)} == {"MUL0001"}


def test_prepare_missing_path_is_actionable(tmp_path):
    with pytest.raises(TrainerError, match="MultiWOZ 2.4"):
        prepare(tmp_path / "nowhere" / "data.json", tmp_path / "out.jsonl")


def test_prepare_rejects_malformed_files(tmp_path):
    bad = tmp_path / "data.json"
    bad.write_text("{broken", encoding="utf-8")
    with pytest.raises(TrainerError, match="does not parse"):
        prepare(bad, tmp_path / "out.jsonl")
    bad.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(TrainerError, match="top level"):
        prepare(bad, tmp_path / "out.jsonl")
    bad.write_text(json.dumps({"D1.json": {"log": []}}), encoding="utf-8")
    with pytest.raises(TrainerError, match="no log entries"):
        prepare(bad, tmp_path / "out.jsonl")
