"""Finite direct (inductive) limits of sets over right directed preorders.

Carriers are disjointified by tagging each element with its index, the
limit is the quotient of the tagged union by eventual agreement, and the
universal property is realized as an explicit map with checkable
surjectivity/injectivity criteria.
"""

from dataclasses import dataclass

from .canon import csorted, sort_key
from .errors import (
    CompositionViolated,
    IdentityViolated,
    MissingMap,
    NotACocone,
    NotAPreorder,
    NotDirected,
    TheoremViolation,
)


@dataclass(frozen=True)
class DirectedIndex:
    elements: frozenset
    relation: frozenset  # pairs (a, b) with a <= b

    def leq(self, a, b) -> bool:
        return (a, b) in self.relation

    def upper_bounds(self, a, b):
        return [c for c in csorted(self.elements)
                if self.leq(a, c) and self.leq(b, c)]


@dataclass(frozen=True)
class DirectedSystem:
    index: DirectedIndex
    carriers: dict  # index element -> frozenset
    maps: dict      # (a, b) with a <= b -> dict E_a -> E_b (identities included)

    def map(self, a, b) -> dict:
        return self.maps[(a, b)]

    def tagged(self):
        """The disjoint union: (index, element) pairs, sorted."""
        return [(a, x) for a in csorted(self.index.elements)
                for x in csorted(self.carriers[a])]


def validate_system(elements, relation, carriers, maps) -> DirectedSystem:
    """Check preorder, directedness, identity and composition laws."""
    elements = frozenset(elements)
    relation = frozenset((a, b) for a, b in relation)
    for a, b in relation:
        if a not in elements or b not in elements:
            raise NotAPreorder("over the given elements", (a, b))
    for a in elements:
        if (a, a) not in relation:
            raise NotAPreorder("reflexive", a)
    for a, b in relation:
        for c in elements:
            if (b, c) in relation and (a, c) not in relation:
                raise NotAPreorder("transitive", (a, b, c))
    index = DirectedIndex(elements=elements, relation=relation)
    for a in csorted(elements):
        for b in csorted(elements):
            if not index.upper_bounds(a, b):
                raise NotDirected(a, b)

    carriers = {a: frozenset(carriers[a]) for a in elements}
    full_maps = {}
    maps = dict(maps)
    for a in elements:
        ident = {x: x for x in carriers[a]}
        given = maps.get((a, a))
        if given is not None and dict(given) != ident:
            raise IdentityViolated(a)
        full_maps[(a, a)] = ident
    for a, b in relation:
        if a == b:
            continue
        if (a, b) not in maps:
            raise MissingMap(a, b)
        f = dict(maps[(a, b)])
        for x in carriers[a]:
            if x not in f:
                raise MissingMap(a, b)
            if f[x] not in carriers[b]:
                raise MissingMap(a, b)
        full_maps[(a, b)] = f
    system = DirectedSystem(index=index, carriers=carriers, maps=full_maps)
    for a in csorted(elements):
        for b in csorted(elements):
            if not index.leq(a, b):
                continue
            for c in csorted(elements):
                if not index.leq(b, c):
                    continue
                fba, fcb, fca = system.map(a, b), system.map(b, c), system.map(a, c)
                for x in csorted(carriers[a]):
                    if fcb[fba[x]] != fca[x]:
                        raise CompositionViolated(a, b, c, x)
    return system


@dataclass(frozen=True)
class DirectLimit:
    system: DirectedSystem
    classes: tuple   # sorted tuple of frozensets of tagged elements
    class_of: dict   # tagged element -> its class (a frozenset)

    def canonical(self, a, x):
        """The canonical map E_a -> limit applied to x."""
        return self.class_of[(a, x)]

    def representative(self, cls):
        """Lexicographically least tagged member, for deterministic output."""
        return min(cls, key=sort_key)


def colimit(system: DirectedSystem) -> DirectLimit:
    """Quotient of the tagged union by the eventual-agreement relation.

    Directedness already makes the relation transitive; union-find closes
    it transitively anyway, defensively and at no real cost.
    """
    tagged = system.tagged()
    parent = {t: t for t in tagged}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    for (a, b), f in system.maps.items():
        if a == b:
            continue
        for x in system.carriers[a]:
            ra, rb = find((a, x)), find((b, f[x]))
            if ra != rb:
                parent[rb] = ra
    groups = {}
    for t in tagged:
        groups.setdefault(find(t), set()).add(t)
    classes = tuple(csorted(frozenset(g) for g in groups.values()))
    class_of = {t: c for c in classes for t in c}
    limit = DirectLimit(system=system, classes=classes, class_of=class_of)
    for (a, b), f in system.maps.items():
        for x in system.carriers[a]:
            if limit.canonical(b, f[x]) != limit.canonical(a, x):
                raise TheoremViolation("canonical maps do not commute with the system")
    return limit


@dataclass(frozen=True)
class Cocone:
    target: frozenset
    maps: dict  # index element -> dict E_a -> target


def canonical_cocone(limit: DirectLimit) -> Cocone:
    system = limit.system
    return Cocone(
        target=frozenset(limit.classes),
        maps={a: {x: limit.canonical(a, x) for x in system.carriers[a]}
              for a in system.index.elements})


def universal_map(system: DirectedSystem, limit: DirectLimit, cocone: Cocone) -> dict:
    """The unique map u with u_a = u o f_a; input must be a cocone."""
    for a, b in system.maps:
        if a == b:
            continue
        f = system.map(a, b)
        for x in csorted(system.carriers[a]):
            if cocone.maps[b][f[x]] != cocone.maps[a][x]:
                raise NotACocone(a, b, x)
    u = {}
    for a in csorted(system.index.elements):
        for x in csorted(system.carriers[a]):
            cls = limit.canonical(a, x)
            value = cocone.maps[a][x]
            if cls in u and u[cls] != value:
                raise TheoremViolation("cocone is not constant on a limit class")
            u[cls] = value
    if set(u) != set(limit.classes):
        raise TheoremViolation("limit has a class hit by no carrier")
    return u


def check_surjectivity_criterion(system: DirectedSystem, cocone: Cocone, u: dict):
    """u surjective iff the target is covered by the cocone images."""
    surjective = set(u.values()) == set(cocone.target)
    covered = set()
    for a in system.index.elements:
        covered.update(cocone.maps[a].values())
    criterion = covered == set(cocone.target)
    if surjective != criterion:
        raise TheoremViolation("surjectivity criterion mismatch")
    if surjective:
        return True, None
    missed = csorted(set(cocone.target) - set(u.values()))[0]
    return False, missed


def check_injectivity_criterion(system: DirectedSystem, cocone: Cocone, u: dict):
    """u injective iff cocone-equal elements are eventually identified."""
    seen = {}
    collision = None
    for cls in csorted(u):
        v = u[cls]
        key = sort_key(v)
        if key in seen and seen[key] != cls:
            collision = (seen[key], cls)
            break
        seen[key] = cls
    injective = collision is None
    criterion = True
    witness = None
    for a in csorted(system.index.elements):
        xs = csorted(system.carriers[a])
        for i, x in enumerate(xs):
            for y in xs[i + 1:]:
                if cocone.maps[a][x] != cocone.maps[a][y]:
                    continue
                merged = any(
                    system.map(a, b)[x] == system.map(a, b)[y]
                    for b in csorted(system.index.elements)
                    if system.index.leq(a, b))
                if not merged:
                    criterion = False
                    witness = (a, x, y)
    if injective != criterion:
        raise TheoremViolation("injectivity criterion mismatch")
    if injective:
        return True, None
    return False, collision if witness is None else witness


def dump_limit(limit: DirectLimit) -> str:
    """One line per class: `rep <- [tagged members]`, sorted."""
    from .canon import fmt
    lines = []
    for cls in limit.classes:
        rep = limit.representative(cls)
        members = ", ".join(fmt(t) for t in csorted(cls))
        lines.append(f"{fmt(rep)} <- [{members}]")
    return "\n".join(lines)
