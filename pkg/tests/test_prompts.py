import io
import json
import random

import pytest

from agreetrack.lev import DELETE, LevSpan, apply_span, diff, parse, random_span, render
from agreetrack.ontology import GPT_NEGOCHAT
from agreetrack.prompts import (
    CLF,
    CLF_PREFIX,
    GEN,
    GEN_PREFIX,
    PromptExample,
    build_clf_example,
    build_gen_example,
    context_window,
    emit_dataset,
    iter_examples,
    render_context,
    sample_negative,
)


class TestContextWindow:
    def test_window_of_three(self, excerpt):
        texts = [u.text for u in context_window(excerpt, 9, 3)]
        assert texts == [t.utterance.text for t in excerpt.turns[7:10]]

    def test_truncated_at_dialogue_start(self, excerpt):
        assert len(context_window(excerpt, 0, 3)) == 1
        assert len(context_window(excerpt, 1, 3)) == 2

    def test_render_tags_speakers(self, excerpt):
        rendered = render_context(context_window(excerpt, 1, 3))
        assert rendered == (
            "employer: No company car included? "
            "candidate: Right, no car. Let's move on. "
            "I was hoping for a pension of 20%."
        )


class TestGenExamples:
    def test_final_turn_of_excerpt(self, excerpt, ontology):
        example = build_gen_example(excerpt, 9, ontology=ontology)
        assert example.task == GEN
        assert example.target_text == "[gpt-negochat] insert salary = 90,000"
        assert example.input_text == (
            "track agreements: [gpt-negochat] company car = no "
            "candidate: No, I'm afraid that won't work for me. "
            "employer: Would you be comfortable with a salary of 60 or 90k? "
            "candidate: 90,000 sounds good to me. "
            "Is there anything else we need to discuss?"
        )
        assert (example.dialogue_id, example.turn_index) == ("excerpt", 9)
        assert example.clf_label is None

    def test_first_turn_has_empty_state_and_single_utterance(self, excerpt, ontology):
        example = build_gen_example(excerpt, 0, ontology=ontology)
        assert example.input_text.startswith(
            GEN_PREFIX + " [gpt-negochat] none employer: No company car included?"
        )
        assert example.target_text == "[gpt-negochat]"  # no state change on turn 0

    def test_steady_state_turn_has_empty_edit(self, excerpt, ontology):
        example = build_gen_example(excerpt, 4, ontology=ontology)
        assert example.target_text == "[gpt-negochat]"

    def test_turn_out_of_range(self, excerpt, ontology):
        with pytest.raises(IndexError, match="turn 10 out of range"):
            build_gen_example(excerpt, 10, ontology=ontology)

    def test_bad_window(self, excerpt, ontology):
        with pytest.raises(ValueError, match="window"):
            build_gen_example(excerpt, 1, 0, ontology=ontology)

    def test_targets_replay_to_gold_states(self, builtin_corpus, ontology):
        # Recursive reconstruction: applying each turn's gen target to the
        # running state, starting empty, must recover every gold state.
        mismatches = 0
        for dialogue in builtin_corpus:
            state = {}
            for t in range(len(dialogue.turns)):
                example = build_gen_example(dialogue, t, ontology=ontology)
                state = apply_span(state, parse(example.target_text), strict=True)
                if state != dialogue.turns[t].gold_state:
                    mismatches += 1
        assert mismatches == 0


class TestSampleNegative:
    def test_never_renders_like_gold(self, ontology):
        rng = random.Random(5)
        for _ in range(2500):
            gold = random_span(ontology, rng)
            negative = sample_negative(ontology, gold, rng)
            assert render(negative) != render(gold)
            assert negative.domain == gold.domain

    def test_stays_ontology_legal(self, ontology):
        rng = random.Random(6)
        for _ in range(2500):
            negative = sample_negative(ontology, random_span(ontology, rng), rng)
            slots = [op.slot for op in negative.ops]
            assert len(set(slots)) == len(slots)  # one op per slot
            for op in negative.ops:
                assert op.slot in ontology.slots
                if op.kind == DELETE:
                    assert op.value is None
                else:
                    assert ontology.is_legal(op.slot, op.value)

    def test_ops_sorted_in_ontology_order(self, ontology):
        rng = random.Random(7)
        order = {slot: i for i, slot in enumerate(ontology.slots)}
        for _ in range(500):
            negative = sample_negative(ontology, random_span(ontology, rng), rng)
            positions = [order[op.slot] for op in negative.ops]
            assert positions == sorted(positions)

    def test_empty_gold_yields_single_spurious_op(self, ontology):
        rng = random.Random(8)
        for _ in range(200):
            negative = sample_negative(ontology, LevSpan("gpt-negochat", ()), rng)
            assert len(negative.ops) == 1

    def test_all_five_perturbations_reachable(self, ontology):
        # Fingerprint each negative against its gold; all five families must
        # show up across a modest sample.
        rng = random.Random(9)
        seen = set()
        for _ in range(3000):
            gold = random_span(ontology, rng)
            negative = sample_negative(ontology, gold, rng)
            gold_slots = {op.slot: op for op in gold.ops}
            neg_slots = {op.slot: op for op in negative.ops}
            if len(negative.ops) < len(gold.ops):
                seen.add("drop")
            elif len(negative.ops) > len(gold.ops):
                seen.add("spurious")
            elif set(neg_slots) != set(gold_slots):
                seen.add("slot_swap")
            else:
                (slot,) = [s for s in neg_slots if neg_slots[s] != gold_slots[s]]
                if neg_slots[slot].kind != gold_slots[slot].kind:
                    seen.add("kind_flip")
                else:
                    seen.add("value_swap")
        assert seen == {"drop", "spurious", "slot_swap", "kind_flip", "value_swap"}


class TestClfExamples:
    def test_positive_candidate_is_the_gold_span(self, excerpt, ontology):
        rng = random.Random(0)
        example = None
        while example is None or not example.clf_label:
            example = build_clf_example(excerpt, 9, rng=rng, ontology=ontology)
        gold = render(diff({"company car": "no"},
                           {"company car": "no", "salary": "90,000"},
                           ontology=ontology))
        assert example.target_text == "yes"
        assert example.input_text.endswith(" " + gold)
        assert example.input_text.startswith(CLF_PREFIX + " [gpt-negochat] company car = no ")

    @staticmethod
    def split_candidate(input_text):
        at = input_text.rindex("[gpt-negochat]")
        return input_text[:at].rstrip(), input_text[at:]

    def test_negative_candidate_differs_from_gold(self, excerpt, ontology):
        rng = random.Random(0)
        gold = render(diff({"company car": "no"},
                           {"company car": "no", "salary": "90,000"},
                           ontology=ontology))
        example = None
        while example is None or example.clf_label:
            example = build_clf_example(excerpt, 9, rng=rng, ontology=ontology)
        assert example.target_text == "no"
        assert self.split_candidate(example.input_text)[1] != gold

    def test_candidate_span_sits_after_context(self, excerpt, ontology):
        example = build_clf_example(excerpt, 3, rng=random.Random(1), ontology=ontology)
        head, candidate = self.split_candidate(example.input_text)
        assert head.endswith(excerpt.turns[3].utterance.text)
        parse(candidate, strict=True)  # candidate is a well-formed span

    def test_label_matches_target(self, excerpt, ontology):
        rng = random.Random(2)
        for t in range(10):
            example = build_clf_example(excerpt, t, rng=rng, ontology=ontology)
            assert example.target_text == ("yes" if example.clf_label else "no")
            assert example.candidate_is_gold == example.clf_label

    def test_yes_rate_near_half(self, excerpt, ontology):
        rng = random.Random(3)
        yes = sum(
            build_clf_example(excerpt, 9, rng=rng, ontology=ontology).clf_label
            for _ in range(4000)
        )
        assert 0.45 <= yes / 4000 <= 0.55

    def test_ontology_required(self, excerpt):
        with pytest.raises(ValueError, match="ontology"):
            build_clf_example(excerpt, 0, rng=random.Random(0))


class TestIterAndEmit:
    def test_interleaving_and_counts(self, builtin_corpus, ontology):
        corpus = builtin_corpus[:3]
        examples = list(iter_examples(corpus, ontology=ontology))
        total_turns = sum(len(d.turns) for d in corpus)
        assert len(examples) == 2 * total_turns
        for gen_ex, clf_ex in zip(examples[0::2], examples[1::2]):
            assert (gen_ex.task, clf_ex.task) == (GEN, CLF)
            assert gen_ex.turn_index == clf_ex.turn_index
            assert gen_ex.dialogue_id == clf_ex.dialogue_id

    def test_dialogues_visited_in_sorted_order(self, builtin_corpus, ontology):
        corpus = list(reversed(builtin_corpus[:4]))
        ids = [e.dialogue_id for e in iter_examples(corpus, tasks=(GEN,), ontology=ontology)]
        assert ids == sorted(ids)

    def test_single_task_selection(self, excerpt, ontology):
        gen_only = list(iter_examples([excerpt], tasks=(GEN,), ontology=ontology))
        assert all(e.task == GEN for e in gen_only) and len(gen_only) == 10
        clf_only = list(iter_examples([excerpt], tasks=(CLF,), ontology=ontology))
        assert all(e.task == CLF for e in clf_only) and len(clf_only) == 10

    def test_unknown_task_rejected(self, excerpt, ontology):
        with pytest.raises(ValueError, match="unknown tasks: summarize"):
            list(iter_examples([excerpt], tasks=("summarize",), ontology=ontology))
        with pytest.raises(ValueError, match="no tasks"):
            list(iter_examples([excerpt], tasks=(), ontology=ontology))

    def test_emission_deterministic(self, builtin_corpus, ontology):
        corpus = builtin_corpus[:5]
        a, b = io.StringIO(), io.StringIO()
        assert emit_dataset(corpus, a, seed=13, ontology=ontology) == emit_dataset(
            corpus, b, seed=13, ontology=ontology
        )
        assert a.getvalue() == b.getvalue()

    def test_seed_changes_clf_sampling(self, builtin_corpus, ontology):
        corpus = builtin_corpus[:5]
        a, b = io.StringIO(), io.StringIO()
        emit_dataset(corpus, a, seed=13, ontology=ontology)
        emit_dataset(corpus, b, seed=14, ontology=ontology)
        assert a.getvalue() != b.getvalue()

    def test_partial_emission_matches_full(self, builtin_corpus, ontology):
        # Emitting a single dialogue reproduces exactly its lines from a full
        # run: randomness is keyed per dialogue, not per stream position.
        full = io.StringIO()
        emit_dataset(builtin_corpus[:6], full, seed=13, ontology=ontology)
        target = builtin_corpus[4]
        expected = [
            line
            for line in full.getvalue().splitlines()
            if json.loads(line)["dialogue_id"] == target.id
        ]
        solo = io.StringIO()
        emit_dataset([target], solo, seed=13, ontology=ontology)
        assert solo.getvalue().splitlines() == expected

    def test_jsonl_schema(self, excerpt, ontology):
        sink = io.StringIO()
        emit_dataset([excerpt], sink, seed=13, ontology=ontology)
        for line in sink.getvalue().splitlines():
            record = json.loads(line)
            base = {"task", "input", "target", "dialogue_id", "turn"}
            if record["task"] == CLF:
                assert set(record) == base | {"clf_label"}
                assert record["target"] in ("yes", "no")
                assert record["clf_label"] == (record["target"] == "yes")
            else:
                assert set(record) == base
                assert record["target"].startswith("[gpt-negochat]")
            assert record["input"].split(" ", 2)[:2] in (
                ["track", "agreements:"],
                ["verify", "agreements:"],
            )

    def test_emit_to_path(self, excerpt, ontology, tmp_path):
        path = tmp_path / "prompts.jsonl"
        count = emit_dataset([excerpt], path, seed=13, ontology=ontology)
        assert count == 20
        assert len(path.read_text(encoding="utf-8").splitlines()) == 20


class TestPromptExample:
    def test_gen_json_omits_clf_fields(self):
        record = PromptExample(GEN, "i", "t", "d", 3).to_json_dict()
        assert record == {"task": GEN, "input": "i", "target": "t", "dialogue_id": "d", "turn": 3}

    def test_clf_json_carries_label(self):
        record = PromptExample(CLF, "i", "no", "d", 3, clf_label=False).to_json_dict()
        assert record["clf_label"] is False
