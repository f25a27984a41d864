"""Canonical ordering and naming helpers.

Every iteration order in the library funnels through `sort_key` so that
outputs are reproducible across runs (frozenset iteration order is not).
"""


def sort_key(obj):
    """Deterministic, hash-independent sort key for heterogeneous values."""
    if isinstance(obj, str):
        return ("s", obj)
    if isinstance(obj, bool):
        return ("b", obj)
    if isinstance(obj, int):
        return ("i", obj)
    if isinstance(obj, (frozenset, set)):
        return ("f", tuple(sorted(sort_key(e) for e in obj)))
    if isinstance(obj, tuple):
        return ("t", tuple(sort_key(e) for e in obj))
    key = getattr(obj, "canonical_key", None)
    if key is not None:
        return key
    return ("r", repr(obj))


def csorted(items):
    """Sort by the canonical key."""
    return sorted(items, key=sort_key)


def open_key(subset):
    """Opens sort first by size, then canonically; gives stable open order."""
    return (len(subset), sort_key(subset))


def osorted(opens):
    return sorted(opens, key=open_key)


def open_name(subset):
    """Serialization name of an open: sorted comma-joined point names."""
    return ",".join(str(p) for p in csorted(subset))


def fmt(obj):
    """Compact human-readable rendering used in witnesses and dumps."""
    if isinstance(obj, (frozenset, set)):
        return "{" + ",".join(fmt(p) for p in csorted(obj)) + "}"
    if isinstance(obj, tuple):
        return "(" + "|".join(fmt(p) for p in obj) + ")"
    return str(obj)
