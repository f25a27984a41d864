"""Presheaves of finite sets on a finite space.

Sections are opaque ids per open set; restriction maps may be supplied
for all nested pairs or only for covering (Hasse) pairs, in which case
composites are generated and checked path independent.  Stalks are direct
limits over the neighborhood order and always biject with the section set
of the minimal open, which gives every germ a canonical representative.
"""

from dataclasses import dataclass
from typing import NamedTuple

from .canon import csorted, open_key, osorted, sort_key
from .dirlimit import DirectLimit, colimit, validate_system
from .errors import (
    CompositionViolated,
    IdentityViolated,
    MissingRestriction,
    MissingSectionSet,
    PathDependent,
    PointNotInOpen,
    SquareFails,
    TheoremViolation,
    TooLarge,
    UnknownSection,
)
from .topology import FiniteSpace, min_open, neighborhoods, subspace

COVER_ENUM_GUARD = 10 ** 6
EXHAUSTIVE_OPEN_LIMIT = 20


class Verdict(NamedTuple):
    """Boolean check outcome with a replayable witness when it fails."""

    holds: bool
    witness: object = None

    def __bool__(self):
        return self.holds


class S1Witness(NamedTuple):
    open_set: frozenset
    cover: tuple
    s: object
    t: object


class S2Witness(NamedTuple):
    open_set: frozenset
    cover: tuple
    family: tuple  # ((V, element), ...) aligned with cover


class FlabbyWitness(NamedTuple):
    upper: frozenset
    lower: frozenset
    missed: object


@dataclass(frozen=True, eq=True)
class Presheaf:
    base: FiniteSpace
    sections: dict      # open -> frozenset of element ids
    restrictions: dict  # (U, V), V strictly inside U -> dict

    def elements(self, u) -> frozenset:
        return self.sections[self.base.require_open(u)]

    def rho(self, u, v) -> dict:
        """Restriction map S(U) -> S(V) for V inside U (identity on U=V)."""
        u, v = frozenset(u), frozenset(v)
        if u == v:
            return {s: s for s in self.sections[u]}
        return self.restrictions[(u, v)]

    def restrict_element(self, u, v, s):
        if frozenset(u) == frozenset(v):
            return s
        return self.restrictions[(frozenset(u), frozenset(v))][s]

    def nested_pairs(self):
        """All (U, V) with V strictly inside U, in canonical order."""
        return sorted(self.restrictions,
                      key=lambda p: (open_key(p[0]), open_key(p[1])))


def _normalize_restrictions(raw):
    """Accept a dict or an iterable of ((U, V), map); duplicate claims for
    one pair must agree or they are reported path dependent."""
    items = raw.items() if isinstance(raw, dict) else raw
    table = {}
    for (u, v), mapping in items:
        u, v = frozenset(u), frozenset(v)
        mapping = dict(mapping)
        if (u, v) in table and table[(u, v)] != mapping:
            old, new = table[(u, v)], mapping
            s = next(x for x in csorted(old) if old[x] != new.get(x))
            raise PathDependent(u, v, (old[s], new.get(s)))
        table[(u, v)] = mapping
    return table


def _hasse_pairs(space: FiniteSpace):
    """Covering pairs (U, V): V strictly inside U with nothing between."""
    opens = space.sorted_opens()
    pairs = []
    for u in opens:
        for v in opens:
            if v < u and not any(v < w < u for w in opens):
                pairs.append((u, v))
    return pairs


def validate_presheaf(base: FiniteSpace, sections, restrictions) -> Presheaf:
    """Check the identity and composition laws, completing Hasse-only input."""
    secs = {}
    for u, elems in dict(sections).items():
        u = frozenset(u)
        if not base.is_open(u):
            raise ValueError(f"section set given for a non-open {sorted(u)}")
        secs[u] = frozenset(elems)
    for u in base.sorted_opens():
        if u not in secs:
            raise MissingSectionSet(u)

    given = _normalize_restrictions(restrictions)
    for (u, v), mapping in given.items():
        if not (base.is_open(u) and base.is_open(v) and v <= u):
            raise ValueError(
                f"restriction for a non-nested pair {sorted(u)} -> {sorted(v)}")
        if u == v:
            if mapping != {s: s for s in secs[u]}:
                raise IdentityViolated(u)
            continue
        for s in secs[u]:
            if s not in mapping:
                raise UnknownSection(u, s)
        for s, t in mapping.items():
            if s not in secs[u]:
                raise UnknownSection(u, s)
            if t not in secs[v]:
                raise UnknownSection(v, t)

    for u, v in _hasse_pairs(base):
        if (u, v) not in given:
            raise MissingRestriction(u, v)

    # Fill non-covering pairs by composing along intermediates, smallest
    # gaps first; every route and every explicit claim must agree.
    full = {p: dict(m) for p, m in given.items() if p[0] != p[1]}
    strict = [(u, v) for u in base.sorted_opens()
              for v in base.opens_within(u) if v < u]
    strict.sort(key=lambda p: (len(p[0]) - len(p[1]), open_key(p[0]), open_key(p[1])))
    for u, w in strict:
        routes = []
        for v in base.sorted_opens():
            if w < v < u:
                routes.append({s: full[(v, w)][full[(u, v)][s]] for s in secs[u]})
        if (u, w) in full:
            routes.append(full[(u, w)])
        first = routes[0]
        for other in routes[1:]:
            for s in csorted(secs[u]):
                if first[s] != other[s]:
                    raise PathDependent(u, w, (first[s], other[s]))
        full[(u, w)] = first

    presheaf = Presheaf(base=base, sections=secs, restrictions=full)
    _check_composition_law(presheaf)
    return presheaf


def _check_composition_law(presheaf: Presheaf):
    opens = presheaf.base.sorted_opens()
    for u in opens:
        for v in opens:
            if not v < u:
                continue
            for w in opens:
                if not w < v:
                    continue
                uv, vw, uw = (presheaf.rho(u, v), presheaf.rho(v, w),
                              presheaf.rho(u, w))
                for s in csorted(presheaf.sections[u]):
                    if vw[uv[s]] != uw[s]:
                        raise CompositionViolated(u, v, w, s)


def restrict_presheaf(presheaf: Presheaf, subset) -> Presheaf:
    """The presheaf on the open subspace, reusing sections and restrictions."""
    a = presheaf.base.require_open(subset)
    space = subspace(presheaf.base, a)
    sections = {u: presheaf.sections[u] for u in space.opens}
    restrictions = {(u, v): m for (u, v), m in presheaf.restrictions.items()
                    if u <= a}
    return Presheaf(base=space, sections=sections, restrictions=restrictions)


# -- stalks and germs --------------------------------------------------------

@dataclass(frozen=True)
class Stalk:
    """Direct limit of the section sets over the neighborhoods of a point.

    The limit classes biject with the section set of the minimal open; the
    bijection is verified at construction, so each class has a canonical
    representative there.
    """

    point: object
    min_open: frozenset
    limit: DirectLimit
    reps: tuple       # canonical representatives, sorted
    class_of: dict    # representative -> limit class
    rep_of: dict      # limit class -> representative

    def germ_class(self, u, s):
        """The limit class of an element s of S(U) for a neighborhood U."""
        return self.limit.canonical(frozenset(u), s)


def stalk(presheaf: Presheaf, x) -> Stalk:
    """Compute the stalk at x as a colimit and verify the minimal-open
    bijection that downstream code relies on."""
    presheaf.base.require_point(x)
    nbhd = neighborhoods(presheaf.base, x)
    relation = {(u, v) for u in nbhd for v in nbhd if v <= u}
    system = validate_system(
        elements=nbhd,
        relation=relation,
        carriers={u: presheaf.sections[u] for u in nbhd},
        maps={(u, v): presheaf.rho(u, v) for (u, v) in relation})
    limit = colimit(system)
    m = min_open(presheaf.base, x)
    reps = tuple(csorted(presheaf.sections[m]))
    class_of = {r: limit.canonical(m, r) for r in reps}
    if len(reps) != len(limit.classes):
        raise TheoremViolation(
            f"stalk at {x!r} does not biject with the minimal-open sections")
    rep_of = {}
    for r in reps:
        cls = class_of[r]
        if cls in rep_of:
            raise TheoremViolation(f"two representatives share a class at {x!r}")
        rep_of[cls] = r
    for u in nbhd:
        rho_um = presheaf.rho(u, m)
        for s in presheaf.sections[u]:
            if limit.canonical(u, s) != class_of[rho_um[s]]:
                raise TheoremViolation(
                    f"canonical map at {x!r} disagrees with restriction")
    return Stalk(point=x, min_open=m, limit=limit, reps=reps,
                 class_of=class_of, rep_of=rep_of)


def germ(presheaf: Presheaf, u, s, x):
    """Canonical representative of the germ of s at x: restrict to the
    minimal open of x.  Agrees with the colimit's canonical map."""
    u = presheaf.base.require_open(u)
    presheaf.base.require_point(x)
    if x not in u:
        raise PointNotInOpen(x, u)
    if s not in presheaf.sections[u]:
        raise UnknownSection(u, s)
    return presheaf.restrict_element(u, min_open(presheaf.base, x), s)


# -- morphisms ---------------------------------------------------------------

@dataclass(frozen=True, eq=True)
class PresheafMorphism:
    source: Presheaf
    target: Presheaf
    components: dict  # open -> dict S(U) -> E(U)

    def component(self, u) -> dict:
        return self.components[frozenset(u)]


def validate_morphism(source: Presheaf, target: Presheaf, components) -> PresheafMorphism:
    """Check per-open totality and the naturality squares."""
    if source.base != target.base:
        raise ValueError("morphism endpoints live on different bases")
    comps = {frozenset(u): dict(m) for u, m in dict(components).items()}
    for u in source.base.sorted_opens():
        if u not in comps:
            raise ValueError(f"no component for open {sorted(u)}")
        phi = comps[u]
        for s in source.sections[u]:
            if s not in phi:
                raise UnknownSection(u, s)
            if phi[s] not in target.sections[u]:
                raise UnknownSection(u, phi[s])
    for u, v in source.nested_pairs():
        phi_u, phi_v = comps[u], comps[v]
        rho_s, rho_t = source.rho(u, v), target.rho(u, v)
        for s in csorted(source.sections[u]):
            if rho_t[phi_u[s]] != phi_v[rho_s[s]]:
                raise SquareFails(u, v, s)
    return PresheafMorphism(source=source, target=target, components=comps)


class MorphismClass(NamedTuple):
    injective: bool
    surjective: bool
    isomorphism: bool


def classify_morphism(morphism: PresheafMorphism) -> MorphismClass:
    """Injective/surjective/iso iff every component is."""
    inj = surj = True
    for u in morphism.source.base.sorted_opens():
        values = list(morphism.components[u].values())
        if len(set(values)) != len(values):
            inj = False
        if set(values) != set(morphism.target.sections[u]):
            surj = False
    return MorphismClass(injective=inj, surjective=surj, isomorphism=inj and surj)


def compose_morphisms(outer: PresheafMorphism, inner: PresheafMorphism) -> PresheafMorphism:
    if inner.target != outer.source:
        raise ValueError("morphisms are not composable")
    return validate_morphism(
        inner.source, outer.target,
        {u: {s: outer.components[u][inner.components[u][s]]
             for s in inner.source.sections[u]}
         for u in inner.source.base.opens})


def identity_morphism(presheaf: Presheaf) -> PresheafMorphism:
    return validate_morphism(
        presheaf, presheaf,
        {u: {s: s for s in presheaf.sections[u]} for u in presheaf.base.opens})


def enumerate_morphisms(source: Presheaf, target: Presheaf,
                        guard: int = 10 ** 4):
    """Every morphism from source to target, by exhaustive search.

    Used to confirm uniqueness claims; guarded by the candidate count."""
    import itertools
    if source.base != target.base:
        raise ValueError("morphism endpoints live on different bases")
    opens = source.base.sorted_opens()
    count = 1
    for u in opens:
        count *= max(len(target.sections[u]), 1) ** len(source.sections[u])
        if count > guard:
            raise TooLarge("morphism enumeration guard exceeded")
    per_open = []
    for u in opens:
        src = csorted(source.sections[u])
        tgt = csorted(target.sections[u])
        per_open.append([dict(zip(src, choice))
                         for choice in itertools.product(tgt, repeat=len(src))])
    found = []
    for combo in itertools.product(*per_open):
        components = dict(zip(opens, combo))
        try:
            found.append(validate_morphism(source, target, components))
        except SquareFails:
            continue
    return found


# -- completeness ------------------------------------------------------------

def check_S1(presheaf: Presheaf) -> Verdict:
    """Uniqueness over covers: two elements agreeing on a cover coincide.

    Two elements fail iff the set of all proper opens on which they agree
    covers U, so that maximal agreement set is the canonical witness cover.
    Covers containing U itself are skipped (they cannot fail); the empty
    cover of the empty open is included.
    """
    base = presheaf.base
    for u in base.sorted_opens():
        elems = csorted(presheaf.sections[u])
        candidates = [v for v in base.opens_within(u) if v != u]
        for i, s in enumerate(elems):
            for t in elems[i + 1:]:
                agree = [v for v in candidates
                         if presheaf.rho(u, v)[s] == presheaf.rho(u, v)[t]]
                if frozenset().union(frozenset(), *agree) == u:
                    cover = tuple(v for v in agree if v)
                    return Verdict(False, S1Witness(u, cover, s, t))
    return Verdict(True)


def _antichain_covers(candidates, target):
    """All antichains of the candidate opens whose union is the target.

    Candidates must be sorted; yields covers in that lexicographic order.
    """
    n = len(candidates)
    suffix_union = [frozenset()] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_union[i] = suffix_union[i + 1] | candidates[i]
    out_count = 0

    def extend(i, chosen, union):
        nonlocal out_count
        if union == target:
            out_count += 1
            if out_count > COVER_ENUM_GUARD:
                raise TooLarge("cover enumeration guard exceeded")
            yield tuple(chosen)
        if i == n or not (union | suffix_union[i]) >= target:
            return
        for j in range(i, n):
            c = candidates[j]
            if not (union | suffix_union[j]) >= target:
                return
            if any(c <= b or b <= c for b in chosen):
                continue
            chosen.append(c)
            yield from extend(j + 1, chosen, union | c)
            chosen.pop()

    yield from extend(0, [], frozenset())


def _compatible_families(presheaf: Presheaf, cover):
    """Pairwise-compatible families over a cover, in canonical order."""
    cover = list(cover)
    node_budget = [COVER_ENUM_GUARD]

    def extend(i, chosen):
        if i == len(cover):
            yield tuple(chosen)
            return
        v = cover[i]
        for s in csorted(presheaf.sections[v]):
            node_budget[0] -= 1
            if node_budget[0] < 0:
                raise TooLarge("family enumeration guard exceeded")
            ok = True
            for j in range(i):
                w = cover[j] & v
                if not w:
                    continue
                if presheaf.rho(v, w)[s] != presheaf.rho(cover[j], w)[chosen[j]]:
                    ok = False
                    break
            if ok:
                chosen.append(s)
                yield from extend(i + 1, chosen)
                chosen.pop()

    yield from extend(0, [])


def _glues(presheaf: Presheaf, u, cover, family):
    """Elements of S(U) restricting to the given family on the cover."""
    out = []
    for s in csorted(presheaf.sections[u]):
        if all(presheaf.rho(u, v)[s] == fv for v, fv in zip(cover, family)):
            out.append(s)
    return out


def check_S2(presheaf: Presheaf) -> Verdict:
    """Gluing over covers: every compatible family has a global element.

    Enumeration runs over antichain covers, optionally extended by the
    empty open when S({}) has more than one element; compatible families
    over an arbitrary cover biject with families over that reduction, so
    nothing is lost.  The empty cover of the empty open is included.
    """
    base = presheaf.base
    empty = frozenset()
    for u in base.sorted_opens():
        if not u:
            if not presheaf.sections[empty]:
                return Verdict(False, S2Witness(u, (), ()))
            continue
        candidates = [v for v in base.opens_within(u) if v and v != u]
        empty_variants = [False]
        if len(presheaf.sections[empty]) > 1:
            empty_variants.append(True)
        for cover in _antichain_covers(candidates, u):
            for with_empty in empty_variants:
                full_cover = cover + (empty,) if with_empty else cover
                for family in _compatible_families(presheaf, full_cover):
                    if not _glues(presheaf, u, full_cover, family):
                        return Verdict(False, S2Witness(
                            u, full_cover, tuple(zip(full_cover, family))))
    return Verdict(True)


def is_complete(presheaf: Presheaf) -> bool:
    """Uniqueness and gluing together."""
    return bool(check_S1(presheaf)) and bool(check_S2(presheaf))


def is_flabby(presheaf: Presheaf) -> Verdict:
    """Every restriction map between nested opens is surjective."""
    for u, v in presheaf.nested_pairs():
        image = {sort_key(t) for t in presheaf.restrictions[(u, v)].values()}
        for t in csorted(presheaf.sections[v]):
            if sort_key(t) not in image:
                return Verdict(False, FlabbyWitness(u, v, t))
    return Verdict(True)


# -- exhaustive oracles (slow, used for cross-checking) ----------------------

def _all_covers(base: FiniteSpace, u, include_self):
    """Every subset of the opens inside U whose union is U, deduplicated."""
    candidates = [v for v in base.opens_within(u) if include_self or v != u]
    if len(candidates) > EXHAUSTIVE_OPEN_LIMIT:
        raise TooLarge("exhaustive cover enumeration")
    n = len(candidates)
    for mask in range(1 << n):
        cover = tuple(candidates[i] for i in range(n) if mask >> i & 1)
        if frozenset().union(frozenset(), *cover) == u:
            yield cover


def check_S1_exhaustive(presheaf: Presheaf, include_self=False) -> Verdict:
    """Literal uniqueness check over every cover; oracle for check_S1."""
    base = presheaf.base
    for u in base.sorted_opens():
        elems = csorted(presheaf.sections[u])
        for cover in _all_covers(base, u, include_self):
            for i, s in enumerate(elems):
                for t in elems[i + 1:]:
                    if s == t:
                        continue
                    if all(presheaf.rho(u, v)[s] == presheaf.rho(u, v)[t]
                           for v in cover):
                        return Verdict(False, S1Witness(u, cover, s, t))
    return Verdict(True)


def check_S2_exhaustive(presheaf: Presheaf, include_self=False) -> Verdict:
    """Literal gluing check over every cover; oracle for check_S2."""
    base = presheaf.base
    for u in base.sorted_opens():
        if not u and not presheaf.sections[frozenset()]:
            return Verdict(False, S2Witness(u, (), ()))
        for cover in _all_covers(base, u, include_self):
            for family in _compatible_families(presheaf, cover):
                if not _glues(presheaf, u, cover, family):
                    return Verdict(False, S2Witness(
                        u, cover, tuple(zip(cover, family))))
    return Verdict(True)


def replay_s1_witness(presheaf: Presheaf, witness: S1Witness) -> bool:
    """True iff the witness really exhibits an S1 failure."""
    u = frozenset(witness.open_set)
    if witness.s == witness.t:
        return False
    if frozenset().union(frozenset(), *witness.cover) != u:
        return False
    return all(presheaf.rho(u, v)[witness.s] == presheaf.rho(u, v)[witness.t]
               for v in witness.cover)


def replay_s2_witness(presheaf: Presheaf, witness: S2Witness) -> bool:
    """True iff the witness family is compatible and really fails to glue."""
    u = frozenset(witness.open_set)
    cover = [frozenset(v) for v, _ in witness.family]
    family = [s for _, s in witness.family]
    if not u:
        return not presheaf.sections[frozenset()]
    if frozenset().union(frozenset(), *cover) != u:
        return False
    for i, (v, s) in enumerate(zip(cover, family)):
        for j in range(i):
            w = v & cover[j]
            if w and presheaf.rho(v, w)[s] != presheaf.rho(cover[j], w)[family[j]]:
                return False
    return not _glues(presheaf, u, cover, family)


def terminal_presheaf(base: FiniteSpace) -> Presheaf:
    """All section sets singletons; the terminal object, always complete."""
    star = "*"
    return validate_presheaf(
        base,
        {u: {star} for u in base.opens},
        {(u, v): {star: star} for u in base.opens for v in base.opens if v < u})
