"""Belief spans: agreement changes as Levenshtein edit programs.

A model that re-emits the whole agreement state every turn wastes most of
its output tokens saying "nothing changed". Instead, each turn's *change*
is serialized as a tiny edit program over the previous state: insert a
newly agreed slot, substitute a renegotiated value, delete a retracted one.
The codec is exact — ``apply(A, diff(A, B)) == B`` for any two states — and
the serialization is canonical, so equality of meaning is equality of
strings.

Run:  python3 demos/02_belief_spans.py
"""

from agreetrack import (
    LEV_GRAMMAR_VERSION,
    LevParseError,
    apply_span,
    builtin_ontology,
    diff,
    parse,
    parse_report,
    render,
)


def main() -> None:
    ontology = builtin_ontology()
    print("grammar version:", LEV_GRAMMAR_VERSION)
    print()

    before = {"salary": "90k usd", "working hours": "9 hours"}
    after = {"salary": "120k usd", "pension fund": "20%"}
    span = diff(before, after, ontology=ontology)
    print("before:", before)
    print("after: ", after)
    print("diff:  ", render(span))
    print()

    print("The algebra closes: applying the diff to `before` returns `after`.")
    print("  apply_span(before, span) ==", apply_span(before, span))
    print()

    print("Operations are sorted by ontology slot order, so the rendering is")
    print("canonical — the same change always serializes to the same bytes:")
    same = diff(after, before, ontology=ontology)
    print("  reverse diff:", render(same))
    print()

    print("Round trip through text:")
    text = render(span)
    print("  parse(%r)" % text)
    print("  -> ops:", [(op.kind, op.slot, op.value) for op in parse(text, ontology).ops])
    print()

    print("Strict parsing rejects malformed spans with a typed error:")
    for bad in (
        "insert salary = 90k usd",  # missing domain prefix
        "[negochat] insert salary = 90k usd",  # unknown domain
        "[gpt-negochat] insert salary",  # missing value
        "[gpt-negochat] delete salary = 90k usd",  # unexpected value
        "[gpt-negochat] insert salary = 90k usd ; delete salary",  # duplicate slot
    ):
        try:
            parse(bad, ontology, strict=True)
        except LevParseError as exc:
            print("  %-58r -> %s" % (bad, exc))
    print()

    print("Lenient parsing (how model output is consumed) drops what it")
    print("cannot read, counts it, and keeps the rest:")
    report = parse_report(
        "[gpt-negochat] insert salary = 90k usd ; blurgh ; insert pension fund = 10%",
        ontology,
        strict=False,
    )
    print("  kept ops:  ", [(op.kind, op.slot, op.value) for op in report.span.ops])
    print("  dropped:   ", report.dropped)
    print("  clean:     ", report.clean)


if __name__ == "__main__":
    main()
