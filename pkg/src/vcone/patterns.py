"""Causal-ordering pattern strings.

A pattern like "A<D<(B~C)" is a chain of groups separated by '<'. Every
member of an earlier group is Before every member of a later group; members
of the same parenthesized group are mutually Unrelated. '~' and the unicode
tilde are interchangeable.
"""
from .errors import InvalidInputError

TILDES = ("~", "∼")


def parse_pattern(pattern: str) -> tuple:
    """Parse into a tuple of groups, each a tuple of party labels."""
    if not isinstance(pattern, str) or not pattern.strip():
        raise InvalidInputError(f"bad ordering pattern {pattern!r}")
    s = pattern.replace(" ", "")
    for t in TILDES[1:]:
        s = s.replace(t, "~")
    groups = []
    seen = set()
    for chunk in s.split("<"):
        if chunk.startswith("(") and chunk.endswith(")"):
            chunk = chunk[1:-1]
        members = chunk.split("~")
        if any(len(m) != 1 or not m.isalpha() or not m.isupper() for m in members):
            raise InvalidInputError(f"bad ordering pattern {pattern!r}")
        for m in members:
            if m in seen:
                raise InvalidInputError(f"duplicate party {m!r} in pattern {pattern!r}")
            seen.add(m)
        groups.append(tuple(members))
    return tuple(groups)


def pattern_labels(groups) -> tuple:
    return tuple(l for g in groups for l in g)


def pattern_relations(groups) -> dict:
    """(l1, l2) -> 'before' or 'unrelated' for every constrained ordered pair."""
    rel = {}
    for i, gi in enumerate(groups):
        for a in gi:
            for b in gi:
                if a != b:
                    rel[(a, b)] = "unrelated"
            for gj in groups[i + 1:]:
                for b in gj:
                    rel[(a, b)] = "before"
                    rel[(b, a)] = "after"
    return rel
