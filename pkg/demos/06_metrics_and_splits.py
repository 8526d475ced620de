"""Scoring predictions, and carving the corpus into folds.

Two corpus-level metrics summarize a tracker's quality:

* **Joint Slot Accuracy (JSA)** — the fraction of turns whose predicted
  agreement state matches the gold state *exactly* (two empty states
  match);
* **Joint F1** — micro-averaged F1 over individual slot-value pairs, which
  gives partial credit where JSA gives none. A wrong value on an agreed
  slot counts as one false positive *and* one false negative.

Evaluation splits are deterministic: ids are sorted, shuffled once with a
seed, cut into three equal test folds, with 15% of each fold's remainder
peeled off for validation, and nested fractional subsets of the training
ids for sample-efficiency studies.

Run:  python3 demos/06_metrics_and_splits.py
"""

from agreetrack import evaluate, fold_splits, fractional_subsets, score_turn


def main() -> None:
    predictions = {"d": [{"a": "x"}, {"a": "x", "b": "y"}, {}]}
    references = {"d": [{"a": "x"}, {"a": "x", "b": "z"}, {"c": "w"}]}

    print("three turns, scored pair by pair:")
    for turn, (pred, gold) in enumerate(zip(predictions["d"], references["d"])):
        score = score_turn(pred, gold)
        print("  turn %d: pred=%-22s gold=%-22s tp=%d fp=%d fn=%d exact=%s"
              % (turn, pred, gold, score.tp, score.fp, score.fn, score.exact))
    print()

    result = evaluate(predictions, references)
    print("aggregates:")
    print("  JSA      = %d/%d  = %.4f" % (result.exact_matches, result.turns,
                                          result.joint_slot_accuracy))
    print("  joint F1 = 2*%d/(2*%d+%d+%d) = %.4f"
          % (result.tp, result.tp, result.fp, result.fn, result.joint_f1))
    print()
    print("Note the wrong value at turn 1: slot 'b' predicted 'y' against")
    print("gold 'z' cost one FP and one FN — exactly how a substituted value")
    print("should hurt a pair-level metric.")
    print()

    ids = ["dlg-%03d" % i for i in range(105)]
    folds = fold_splits(ids, n_folds=3, seed=13)
    print("three-fold split of %d dialogues (seed 13):" % len(ids))
    for fold in folds:
        print("  fold %d: train=%d val=%d test=%d"
              % (fold.index, len(fold.train), len(fold.val), len(fold.test)))
    union = sorted(id_ for fold in folds for id_ in fold.test)
    print("  test folds partition the corpus:", union == sorted(ids))
    print()

    subsets = fractional_subsets(folds[0].train)
    print("nested fractional subsets of fold 0's %d training dialogues:"
          % len(folds[0].train))
    for fraction, subset in subsets.items():
        print("  %3d%% -> %2d dialogues" % (fraction, len(subset)))
    nested = all(
        list(subsets[a]) == list(subsets[b][: len(subsets[a])])
        for a, b in zip(sorted(subsets), sorted(subsets)[1:])
    )
    print("  each subset is a prefix of the next:", nested)


if __name__ == "__main__":
    main()
