"""A tour of the negotiation ontology.

Every agreement this toolkit tracks lives in a closed ontology: six
job-offer issues, each with a small set of legal values. The ontology is
the single source of truth for slot order (which fixes how edit spans are
serialized), for value legality, and for canonicalization of the surface
forms annotators actually wrote ("Company Car", "90,000", "no").

Run:  python3 demos/01_ontology_tour.py
"""

from agreetrack import builtin_ontology, canonicalize, resolve_alias, resolve_slot


def main() -> None:
    ontology = builtin_ontology()
    print("ontology:", ontology.name)
    print()

    print("The six issues on the table, in canonical slot order:")
    for position, slot in enumerate(ontology.slots):
        print("  %d. %-24s %s" % (position, slot, " | ".join(ontology.values(slot))))
    print()

    print("Slot order is load-bearing: edit spans list their operations in")
    print("this order, so two spans describing the same change are identical")
    print("strings. slot_position('salary') =", ontology.slot_position("salary"))
    print()

    print("Legality checks guard every ingestion path:")
    for slot, value in (("salary", "90k usd"), ("salary", "95k usd"), ("bonus", "10%")):
        print("  is_legal(%r, %r) -> %s" % (slot, value, ontology.is_legal(slot, value)))
    print()

    print("Annotators write surface forms; canonicalize() folds case and")
    print("whitespace, and the alias table maps the result onto the ontology")
    print("once, at corpus load time. The rest of the library never sees them:")
    print("  canonicalize('  Company   Car ') -> %r" % canonicalize("  Company   Car "))
    for raw_slot, raw_value in (
        ("Company Car", "no"),
        ("salary", "90,000"),
        ("promotion", "fast promotion tract"),
        ("working hours", "9"),
    ):
        slot = resolve_slot(ontology, raw_slot)
        value = resolve_alias(ontology, slot, raw_value)
        print("  (%r, %r) -> (%r, %r)" % (raw_slot, raw_value, slot, value))


if __name__ == "__main__":
    main()
