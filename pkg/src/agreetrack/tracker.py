"""Rule-based agreement tracker over gold dialogue acts.

Given each turn's annotated acts (offer / accept / reject / other) with their
slot-value payloads, the tracker folds a small state machine over the dialogue
and emits the agreement state after every turn. Acceptances and rejections
bind to the *other* speaker's standing (pending) offers, which is the
multi-turn part of the problem:

* offer: each payload pair becomes the speaker's pending offer on that slot,
  superseding the speaker's own earlier pending offer there. Offering on an
  already-agreed slot reopens it (drops the agreement) unless the tracker is
  configured to freeze agreed slots.
* accept with payload: each pair that matches the other speaker's pending
  offer on that slot becomes an agreement, and the slot's pending offers are
  cleared for both speakers. A pair with no standing match still binds if it
  is identical to the other speaker's last (possibly superseded or rejected)
  offer on that slot; otherwise it is logged and ignored — an acceptance
  cannot introduce a value nobody offered.
* accept without payload: accepts all of the other speaker's pending offers.
* reject with payload: clears those slots from the other speaker's pending
  offers (partial rejection); without payload clears all of them.
* other: no effect.

Counter-offers do not implicitly reject: a new offer by X on slot s replaces
only X's own pending offer on s; the other party's pending offer survives
until explicitly rejected or resolved. Every agreement carries a provenance
record (who offered it when, who accepted it when).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dialogue import (
    ACCEPT,
    OFFER,
    OTHER,
    REJECT,
    SPEAKERS,
    AnnotatedDialogue,
    CorpusError,
    DialogueAct,
    other_speaker,
)

__all__ = [
    "PendingOffer",
    "Provenance",
    "TrackerState",
    "TrackerRun",
    "step",
    "run",
    "track_dialogue",
]


@dataclass(frozen=True)
class PendingOffer:
    value: str
    turn_index: int


@dataclass(frozen=True)
class Provenance:
    slot: str
    value: str
    offered_by: str
    offered_turn: int
    accepted_by: str
    accepted_turn: int


def _empty_by_speaker() -> dict:
    return {s: {} for s in SPEAKERS}


@dataclass(frozen=True)
class TrackerState:
    agreements: dict[str, str] = field(default_factory=dict)
    pending: dict[str, dict[str, PendingOffer]] = field(default_factory=_empty_by_speaker)
    last_offers: dict[str, dict[str, PendingOffer]] = field(default_factory=_empty_by_speaker)
    turn_index: int = 0
    provenance: tuple[Provenance, ...] = ()
    diagnostics: tuple[str, ...] = ()


def step(
    state: TrackerState,
    speaker: str,
    acts: tuple[DialogueAct, ...],
    reopen_agreed: bool = True,
) -> TrackerState:
    """Process one turn's acts in order and return the successor state."""
    agreements = dict(state.agreements)
    pending = {party: dict(offers) for party, offers in state.pending.items()}
    last_offers = {party: dict(offers) for party, offers in state.last_offers.items()}
    provenance = list(state.provenance)
    diagnostics = list(state.diagnostics)
    partner = other_speaker(speaker)
    t = state.turn_index

    def settle(slot: str, offer: PendingOffer) -> None:
        agreements[slot] = offer.value
        provenance.append(
            Provenance(slot, offer.value, partner, offer.turn_index, speaker, t)
        )
        for party in SPEAKERS:
            pending[party].pop(slot, None)

    for act in acts:
        if act.kind == OTHER:
            continue
        if act.kind == OFFER:
            for slot, value in act.pairs:
                if slot in agreements:
                    if reopen_agreed:
                        del agreements[slot]
                    else:
                        diagnostics.append(
                            "turn %d: %s re-offered frozen agreed slot %r" % (t, speaker, slot)
                        )
                        continue
                offer = PendingOffer(value, t)
                pending[speaker][slot] = offer
                last_offers[speaker][slot] = offer
        elif act.kind == ACCEPT:
            if act.pairs:
                for slot, value in act.pairs:
                    standing = pending[partner].get(slot)
                    if standing is not None and standing.value == value:
                        settle(slot, standing)
                        continue
                    last = last_offers[partner].get(slot)
                    if last is not None and last.value == value:
                        # Revives the partner's most recent (since-cleared)
                        # offer: offer-and-accept in one move.
                        settle(slot, last)
                    else:
                        diagnostics.append(
                            "turn %d: %s accepted (%r, %r) with no matching offer"
                            % (t, speaker, slot, value)
                        )
            else:
                for slot, standing in list(pending[partner].items()):
                    settle(slot, standing)
        elif act.kind == REJECT:
            if act.pairs:
                for slot, _value in act.pairs:
                    if pending[partner].pop(slot, None) is None:
                        diagnostics.append(
                            "turn %d: %s rejected %r with no standing offer" % (t, speaker, slot)
                        )
            else:
                pending[partner].clear()

    return TrackerState(
        agreements=agreements,
        pending=pending,
        last_offers=last_offers,
        turn_index=t + 1,
        provenance=tuple(provenance),
        diagnostics=tuple(diagnostics),
    )


@dataclass
class TrackerRun:
    """Per-turn predicted states plus the final machine state."""

    dialogue_id: str
    states: list[dict[str, str]]
    final: TrackerState

    @property
    def diagnostics(self) -> tuple[str, ...]:
        return self.final.diagnostics

    @property
    def provenance(self) -> tuple[Provenance, ...]:
        return self.final.provenance


def track_dialogue(dialogue: AnnotatedDialogue, reopen_agreed: bool = True) -> TrackerRun:
    """Fold :func:`step` over a dialogue from the empty state; one predicted
    agreement state per merged turn. Every turn must carry act annotations."""
    state = TrackerState()
    states: list[dict[str, str]] = []
    for i, turn in enumerate(dialogue.turns):
        if turn.acts is None:
            raise CorpusError(
                "dialogue %r turn %d has no act annotations" % (dialogue.id, i)
            )
        state = step(state, turn.utterance.speaker, turn.acts, reopen_agreed=reopen_agreed)
        states.append(dict(state.agreements))
    return TrackerRun(dialogue.id, states, state)


def run(dialogue: AnnotatedDialogue, reopen_agreed: bool = True) -> list[dict[str, str]]:
    return track_dialogue(dialogue, reopen_agreed=reopen_agreed).states
