"""From dialogues to training prompts.

Seq2seq trackers are trained on two text-to-text tasks built here:

* **Gen** — given the previous agreement state and a short window of the
  conversation, generate the edit span for the current turn;
* **Clf** — given the same context plus a candidate span, answer yes/no:
  is this the right update? Negatives are perturbed gold spans (wrong
  value, flipped op kind, swapped slot, spurious op, dropped op), sampled
  at an exact 50/50 yes rate.

Everything is deterministic per (seed, dialogue), so emitting a subset of
dialogues yields byte-identical lines to emitting the full corpus.

Run:  python3 demos/05_prompt_emission.py
"""

import io
import random

from agreetrack import (
    build_clf_example,
    build_gen_example,
    builtin_ontology,
    diff,
    emit_dataset,
    load_builtin_corpus,
    render,
    sample_negative,
)


def main() -> None:
    ontology = builtin_ontology()
    corpus = load_builtin_corpus(ontology)
    dialogue = corpus[0]
    turn = 4

    gen = build_gen_example(dialogue, turn, ontology=ontology)
    print("GEN example (dialogue %s, turn %d)" % (gen.dialogue_id, gen.turn_index))
    print("  input:  %s" % gen.input_text)
    print("  target: %s" % gen.target_text)
    print()

    rng = random.Random("demo")
    clf = build_clf_example(dialogue, turn, rng=rng, ontology=ontology)
    print("CLF example (label %s, candidate %s gold)"
          % (clf.target_text, "is" if clf.candidate_is_gold else "is not"))
    print("  input:  %s" % clf.input_text)
    print("  target: %s" % clf.target_text)
    print()

    gold = diff({}, {"salary": "90k usd", "working hours": "9 hours"}, ontology=ontology)
    print("Negatives are perturbed gold spans — value swap, kind flip, slot")
    print("swap, spurious op, or dropped op, drawn uniformly among whichever")
    print("apply. Gold span: %s" % render(gold))
    rng = random.Random(7)
    seen = set()
    while len(seen) < 5:
        seen.add(render(sample_negative(ontology, gold, rng)))
    for span_text in sorted(seen):
        print("  negative -> %s" % span_text)
    print()

    sink = io.StringIO()
    count = emit_dataset(corpus[:2], sink, tasks=("gen", "clf"), seed=13, ontology=ontology)
    lines = sink.getvalue().splitlines()
    print("emit_dataset over 2 dialogues wrote %d JSONL lines; the first one:" % count)
    print("  %s" % lines[0][:160])
    print()

    again = io.StringIO()
    emit_dataset(corpus[:2], again, tasks=("gen", "clf"), seed=13, ontology=ontology)
    print("same seed, same dialogues -> byte-identical emission:",
          sink.getvalue() == again.getvalue())


if __name__ == "__main__":
    main()
