"""The rule-based oracle tracker, turn by turn.

Gold agreement states are derived from dialogue-act annotations (offer /
accept / reject over slot-value pairs) by a deterministic tracker:

* an *offer* parks its pairs in the offering speaker's pending set;
* an *accept* with a payload seals the matching partner offer — or, with a
  bare accept, everything the partner has pending;
* a *reject* clears the named pairs (or all of them) from the partner's
  pending set;
* re-offering a slot supersedes that speaker's earlier pending value, and
  agreed slots can be reopened by a fresh offer.

Every sealed agreement carries provenance (who offered it when, who
accepted it when), and anything odd — accepting something never offered —
is recorded as a diagnostic instead of being silently guessed.

Run:  python3 demos/03_track_a_dialogue.py
"""

from agreetrack import (
    ACCEPT,
    CANDIDATE,
    EMPLOYER,
    OFFER,
    REJECT,
    DialogueAct,
    TrackerState,
    step,
)

SCRIPT = [
    (EMPLOYER, "We can offer 90k and a 9-hour day.",
     (DialogueAct(OFFER, (("salary", "90k usd"), ("working hours", "9 hours"))),)),
    (CANDIDATE, "The salary works for me; those hours do not.",
     (DialogueAct(ACCEPT, (("salary", "90k usd"),)),
      DialogueAct(REJECT, (("working hours", "9 hours"),)))),
    (EMPLOYER, "Then let's say 8 hours, with the 20% pension.",
     (DialogueAct(OFFER, (("working hours", "8 hours"), ("pension fund", "20%"))),)),
    (CANDIDATE, "Deal on all of that.",
     (DialogueAct(ACCEPT, ()),)),  # bare accept: everything pending
]


def show(state: TrackerState) -> None:
    print("    agreements: %s" % (dict(state.agreements) or "{}"))
    pending = {
        speaker: {slot: offer.value for slot, offer in offers.items()}
        for speaker, offers in state.pending.items()
        if offers
    }
    print("    pending:    %s" % (pending or "{}"))


def main() -> None:
    state = TrackerState()
    for speaker, line, acts in SCRIPT:
        print("turn %d  %s: %s" % (state.turn_index, speaker, line))
        state = step(state, speaker, acts)
        show(state)
        print()

    print("Provenance of the final agreements:")
    for record in state.provenance:
        print(
            "  %s = %s  (offered by %s at turn %d, accepted by %s at turn %d)"
            % (record.slot, record.value, record.offered_by, record.offered_turn,
               record.accepted_by, record.accepted_turn)
        )
    print()

    print("Diagnostics recorded along the way:", list(state.diagnostics) or "none")
    print()

    print("And a deliberately odd move — accepting something never offered —")
    print("is flagged, not guessed:")
    odd = step(TrackerState(), CANDIDATE,
               (DialogueAct(ACCEPT, (("salary", "120k usd"),)),))
    for note in odd.diagnostics:
        print("  diagnostic:", note)


if __name__ == "__main__":
    main()
