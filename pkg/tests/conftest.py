"""Shared fixtures: the ten-turn negotiation excerpt and corpus helpers.

The excerpt fixture reproduces a canonical annotated dialogue: an employer
(E) and candidate (C) haggle over a company car, pension, working hours,
promotion track and salary; only two agreements are ever reached (no company
car, from turn 2; salary 90,000, at turn 10). Slot and value strings are kept
in raw annotation surface form — the tracker operates on plain strings, so
the fixture doubles as a test that nothing requires premature
canonicalization.
"""

from __future__ import annotations

import pytest

from agreetrack.dialogue import (
    AnnotatedDialogue,
    DialogueAct,
    Turn,
    Utterance,
    load_builtin_corpus,
)
from agreetrack.ontology import GPT_NEGOCHAT

# (speaker, text, acts, gold state) per merged turn; acts are
# (kind, pairs) with raw surface slot/value strings.
EXCERPT_ROWS = [
    (
        "employer",
        "No company car included?",
        [("offer", [("company car", "no")])],
        {},
    ),
    (
        "candidate",
        "Right, no car. Let's move on. I was hoping for a pension of 20%.",
        [("accept", [("company car", "no")]), ("offer", [("pension", "20%")])],
        {"company car": "no"},
    ),
    (
        "employer",
        "If you work 10 hours, I can offer you a 20% pension - what do you think?",
        [("offer", [("working hours", "10 hours"), ("pension", "20%")])],
        {"company car": "no"},
    ),
    (
        "candidate",
        "No thanks. I'm expecting an 8-hour workday and I want a 10% pension",
        [
            ("reject", [("working hours", "10 hours"), ("pension", "20%")]),
            ("offer", [("working hours", "8 hours"), ("pension", "10%")]),
        ],
        {"company car": "no"},
    ),
    (
        "employer",
        "How about a salary of 60K if you agree to the 10% pension?",
        [("offer", [("salary", "60k"), ("pension", "10%")])],
        {"company car": "no"},
    ),
    (
        "candidate",
        "I'm sorry, but I'm looking for a salary of 120,000 and a pension of 20%.",
        [
            ("reject", [("salary", "60k"), ("pension", "10%")]),
            ("offer", [("salary", "120,000"), ("pension", "20%")]),
        ],
        {"company car": "no"},
    ),
    (
        "employer",
        "What about offering you a fast promotion tract with a 90k salary?",
        [("offer", [("promotion", "fast promotion tract"), ("salary", "90k")])],
        {"company car": "no"},
    ),
    (
        "candidate",
        "No, I'm afraid that won't work for me.",
        [("reject", None)],
        {"company car": "no"},
    ),
    (
        "employer",
        "Would you be comfortable with a salary of 60 or 90k?",
        [("offer", [("salary", "90,000")])],
        {"company car": "no"},
    ),
    (
        "candidate",
        "90,000 sounds good to me. Is there anything else we need to discuss?",
        [("accept", [("salary", "90,000")])],
        {"company car": "no", "salary": "90,000"},
    ),
]


def build_excerpt() -> AnnotatedDialogue:
    turns = []
    for i, (speaker, text, acts, state) in enumerate(EXCERPT_ROWS):
        turns.append(
            Turn(
                Utterance(speaker, text, i),
                tuple(
                    DialogueAct(kind, tuple((s, v) for s, v in pairs) if pairs else None)
                    for kind, pairs in acts
                ),
                dict(state),
            )
        )
    return AnnotatedDialogue(id="excerpt", turns=turns, raw_utterance_count=len(turns))


@pytest.fixture
def excerpt() -> AnnotatedDialogue:
    return build_excerpt()


@pytest.fixture(scope="session")
def ontology():
    return GPT_NEGOCHAT


@pytest.fixture(scope="session")
def builtin_corpus():
    return load_builtin_corpus(GPT_NEGOCHAT, strict=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL/SKIP line per acceptance criterion, with measurements."""
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None:
        return
    rank = {"passed": 0, "skipped": 1, "error": 2, "failed": 2}
    label = {"passed": "PASS", "skipped": "SKIP", "error": "FAIL", "failed": "FAIL"}
    outcomes: dict[str, str] = {}
    for key in rank:
        for report in terminalreporter.stats.get(key, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if name not in outcomes or rank[key] > rank[outcomes[name]]:
                outcomes[name] = key
    if not outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, title in module.CRITERIA.items():
        if name not in outcomes:
            continue
        line = "%s  %s" % (label[outcomes[name]], title)
        note = module.NOTES.get(name)
        if note:
            line += "  [%s]" % note
        terminalreporter.write_line(line)
