"""MultiWOZ 2.4 preprocessing into the shared edit-span grammar.

Input is the corpus' ``data.json`` (dialogues as alternating user/system
``log`` entries, with the running belief state annotated on each system
entry's ``metadata``). Each user turn becomes one Gen example:

* the belief state is flattened to ``"<domain>-<slot>" -> value`` over the
  ``semi`` and ``book`` sections, skipping empty / "not mentioned" / "none"
  markers;
* the target is the textual diff between consecutive belief states,
  rendered as ``"[multiwoz] insert|substitute|delete ..."`` with ops in
  lexicographic slot order (first insertion of structure for a domain with
  no native slot order);
* the input mirrors the negotiation layout: ``"track agreements: [multiwoz]
  <previous state region> <speaker-tagged window>"`` with ``user:`` /
  ``system:`` tags and the same window size.

Slot and value strings are sanitized to stay inside the grammar (";" and
"=" cannot appear in names), otherwise kept verbatim — no ontology or value
normalization happens here; the model learns surface forms.
"""

from __future__ import annotations

import json
from pathlib import Path

from .levtext import render_region, render_span
from .model import TrainerError

__all__ = ["OBTAIN_HINT", "flatten_state", "state_diff", "prepare"]

OBTAIN_HINT = (
    "expected the MultiWOZ 2.4 data.json; obtain it from the MultiWOZ 2.4 "
    "distribution (e.g. the smartyfh/MultiWOZ2.4 repository) and pass its path"
)

EMPTY_MARKERS = {"", "not mentioned", "none", "dontcare-placeholder"}


def _sanitize(text: str) -> str:
    return text.replace(";", ",").replace("=", ":").strip()


def flatten_state(metadata: dict) -> dict[str, str]:
    """``metadata`` -> flat ``"domain-slot" -> value`` map."""
    state: dict[str, str] = {}
    for domain, sections in sorted(metadata.items()):
        if not isinstance(sections, dict):
            continue
        for section in ("semi", "book"):
            for slot, value in sorted(sections.get(section, {}).items()):
                if slot == "booked":
                    continue
                if isinstance(value, list):
                    value = value[0] if value else ""
                if not isinstance(value, str) or value.lower() in EMPTY_MARKERS:
                    continue
                state["%s-%s" % (_sanitize(domain), _sanitize(slot))] = _sanitize(value)
    return state


def state_diff(previous: dict[str, str], current: dict[str, str]):
    """Textual edit ops turning ``previous`` into ``current``, slot-sorted."""
    ops = []
    for slot in sorted(set(previous) | set(current)):
        before, after = previous.get(slot), current.get(slot)
        if before == after:
            continue
        if before is None:
            ops.append(("insert", slot, after))
        elif after is None:
            ops.append(("delete", slot, None))
        else:
            ops.append(("substitute", slot, after))
    return ops


def prepare(data_json_path, out_path, window: int = 3, max_dialogues: int | None = None) -> int:
    """Convert ``data.json`` to prompt JSONL; returns the example count."""
    path = Path(data_json_path)
    if not path.exists():
        raise TrainerError("%s: %s" % (path, OBTAIN_HINT))
    try:
        corpus = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise TrainerError("%s does not parse as MultiWOZ data.json (%s)" % (path, exc)) from None
    if not isinstance(corpus, dict):
        raise TrainerError("%s: top level must map dialogue ids to dialogues" % path)

    count = 0
    with open(out_path, "w", encoding="utf-8") as sink:
        for raw_id in sorted(corpus):
            dialogue = corpus[raw_id]
            log = dialogue.get("log") if isinstance(dialogue, dict) else None
            if not isinstance(log, list) or not log:
                raise TrainerError("dialogue %r has no log entries" % raw_id)
            dialogue_id = raw_id[:-5] if raw_id.endswith(".json") else raw_id
            utterances: list[str] = []
            previous: dict[str, str] = {}
            turn = 0
            for i in range(0, len(log) - 1, 2):
                user = log[i]
                system = log[i + 1]
                utterances.append("user: %s" % " ".join(str(user.get("text", "")).split()))
                current = flatten_state(system.get("metadata", {}) or {})
                context = " ".join(utterances[-window:])
                input_text = "track agreements: [multiwoz] %s %s" % (
                    render_region(previous),
                    context,
                )
                target = render_span("multiwoz", state_diff(previous, current))
                sink.write(
                    json.dumps(
                        {
                            "task": "gen",
                            "input": input_text,
                            "target": target,
                            "dialogue_id": dialogue_id,
                            "turn": turn,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
                count += 1
                turn += 1
                previous = current
                utterances.append("system: %s" % " ".join(str(system.get("text", "")).split()))
            if max_dialogues is not None:
                max_dialogues -= 1
                if max_dialogues == 0:
                    break
    if count == 0:
        raise TrainerError("%s produced no examples" % path)
    return count
