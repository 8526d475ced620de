"""The bundled corpus: shape, statistics, and the tracker as a baseline.

The package ships a synthetic negotiation corpus (105 dialogues of
employer/candidate job-offer talks, act- and state-annotated). This demo
loads it, prints the headline statistics, and then scores the rule-based
tracker against the gold states — the deterministic reference point every
learned model is compared to.

Run:  python3 demos/04_corpus_statistics.py
"""

from agreetrack import (
    builtin_ontology,
    dialogue_stats,
    evaluate,
    load_builtin_corpus,
    track_dialogue,
)


def main() -> None:
    ontology = builtin_ontology()
    corpus = load_builtin_corpus(ontology)
    stats = dialogue_stats(corpus)

    print("corpus shape")
    print("  dialogues:             %d" % stats.dialogue_count)
    print("  raw utterances:        %d" % stats.raw_utterance_count)
    print("  merged turns:          %d  (consecutive same-speaker lines merged)"
          % stats.merged_turn_count)
    print("  mean raw/dialogue:     %.2f" % stats.mean_raw_utterances_per_dialogue)
    print("  mean turns/dialogue:   %.2f" % stats.mean_merged_turns_per_dialogue)
    print("  median turns/dialogue: %.1f" % stats.median_merged_turns_per_dialogue)
    print("  mean tokens/utterance: %.4f" % stats.mean_tokens_per_raw_utterance)
    print("  mean tokens/turn:      %.4f" % stats.mean_tokens_per_merged_turn)
    print()

    print("how often each issue gets settled (dialogues with a final value):")
    for slot in ontology.slots:
        count = stats.slot_agreement_dialogues.get(slot, 0)
        values = stats.slot_final_values.get(slot, {})
        top = max(values.items(), key=lambda item: item[1]) if values else ("-", 0)
        print("  %-24s %3d dialogues   most common: %s (%d)"
              % (slot, count, top[0], top[1]))
    print()

    print("tracker vs gold states (the deterministic baseline):")
    predictions = {d.id: [dict(state) for state in track_dialogue(d).states]
                   for d in corpus}
    references = {d.id: [dict(turn.gold_state) for turn in d.turns] for d in corpus}
    result = evaluate(predictions, references)
    print("  turns scored:          %d" % result.turns)
    print("  joint slot accuracy:   %.4f  (per-turn exact state match)"
          % result.joint_slot_accuracy)
    print("  joint F1 (micro):      %.4f  (over slot-value pairs)" % result.joint_f1)
    print()
    print("The gap to 1.0 is the point of the corpus: annotated acts and")
    print("conversational reality disagree often enough that a learned reader")
    print("of the *text* has real headroom over a reader of the annotations.")


if __name__ == "__main__":
    main()
