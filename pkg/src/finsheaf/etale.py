"""Etale sheaves: surjective local homeomorphisms between finite spaces.

Local-homeomorphism checking tests the minimal open of each total point
(sound because open embeddings restrict to smaller opens); an exhaustive
all-opens variant is kept as the oracle.  Section enumeration prunes with
the neighborhood-monotonicity characterization of continuity and is
cross-checked against a brute-force fiber-choice filter.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

from .canon import csorted, fmt, open_key, osorted, sort_key
from .errors import (
    ConditionIFails,
    ConditionIIFails,
    ConditionIIIFails,
    EmptyFiber,
    NotLocalHomeo,
    NotSurjective,
    TheoremViolation,
    TooLarge,
    TriangleFails,
    UnknownPoint,
)
from .topology import (
    ContinuousMap,
    FiniteSpace,
    generate_from_basis,
    min_open,
    subspace,
    validate_map,
    validate_space,
)

SECTION_ENUM_GUARD = 10 ** 6
ISO_SEARCH_POINT_LIMIT = 12
ISO_SEARCH_CANDIDATE_LIMIT = 10 ** 5


@dataclass(frozen=True)
class Section:
    """A continuous right inverse of the projection over an open set."""

    domain: frozenset
    graph: tuple  # ((x, value), ...) sorted by point

    def __call__(self, x):
        for p, z in self.graph:
            if p == x:
                return z
        raise UnknownPoint(x, context="section domain")

    @property
    def mapping(self) -> dict:
        return dict(self.graph)

    @property
    def image(self) -> frozenset:
        return frozenset(z for _, z in self.graph)

    def image_of(self, subset) -> frozenset:
        return frozenset(z for x, z in self.graph if x in subset)

    def restrict(self, subset) -> "Section":
        subset = frozenset(subset)
        return Section(domain=subset,
                       graph=tuple((x, z) for x, z in self.graph if x in subset))

    @cached_property
    def canonical_key(self):
        return ("section", sort_key(self.domain), sort_key(self.graph))

    def __str__(self):
        return ", ".join(f"{fmt(x)}->{fmt(z)}" for x, z in self.graph)

    def __repr__(self):
        return f"Section({self})" if self.graph else "Section(<empty>)"


def make_section(domain, mapping) -> Section:
    domain = frozenset(domain)
    graph = tuple(sorted(((x, mapping[x]) for x in domain),
                         key=lambda xz: sort_key(xz[0])))
    return Section(domain=domain, graph=graph)


@dataclass(frozen=True)
class EtaleSheaf:
    total: FiniteSpace
    base: FiniteSpace
    projection: ContinuousMap

    def fiber(self, x) -> frozenset:
        self.base.require_point(x)
        return self.projection.preimage({x})

    def __repr__(self):
        return (f"EtaleSheaf({len(self.total.points)} total points over "
                f"{len(self.base.points)} base points)")


def _open_embedding_on(total: FiniteSpace, base: FiniteSpace,
                       proj: ContinuousMap, b: frozenset) -> bool:
    """Is the projection restricted to the open b injective and open?"""
    image = proj.image(b)
    if len(image) != len(b):
        return False
    for o in total.opens:
        if o <= b and not base.is_open(proj.image(o)):
            return False
    return True


def validate_etale(total: FiniteSpace, base: FiniteSpace, projection,
                   exhaustive: bool = False) -> EtaleSheaf:
    """Check surjectivity and the local-homeomorphism condition.

    The fast path tests only the minimal open of each total point; with
    exhaustive=True every open neighborhood is searched instead.
    """
    if isinstance(projection, ContinuousMap):
        projection = dict(projection.assignment)
    proj = validate_map(total, base, projection)
    hit = proj.image()
    for x in base.points:
        if x not in hit:
            raise NotSurjective(x)
    for z in total.points:
        if exhaustive:
            if not any(_open_embedding_on(total, base, proj, b)
                       for b in total.opens_containing(z)):
                raise NotLocalHomeo(z)
        else:
            if not _open_embedding_on(total, base, proj, min_open(total, z)):
                raise NotLocalHomeo(z)
    return EtaleSheaf(total=total, base=base, projection=proj)


def fiber(sheaf: EtaleSheaf, x) -> frozenset:
    """Total points over x; the fibers partition the total space."""
    return sheaf.fiber(x)


def _enumerate_continuous(domain_space: FiniteSpace, u, candidates_of,
                          target_space: FiniteSpace):
    """Continuous maps s on the open u with s(x) drawn from candidates_of(x).

    Continuity of s between finite spaces is the neighborhood condition:
    y in min_open(x) implies s(y) in min_open(s(x)); the search assigns
    points in canonical order and prunes on every assigned pair.
    """
    u = domain_space.require_open(u)
    points = [p for p in domain_space.points if p in u]
    candidates = {x: csorted(candidates_of(x)) for x in points}
    count = 1
    for x in points:
        count *= max(len(candidates[x]), 1)
        if count > SECTION_ENUM_GUARD:
            raise TooLarge("section enumeration guard exceeded")
    m_dom = {x: min_open(domain_space, x) & u for x in points}
    m_tgt = {z: min_open(target_space, z)
             for z in target_space.points}
    out = []
    chosen = {}

    def extend(i):
        if i == len(points):
            out.append(make_section(u, dict(chosen)))
            return
        x = points[i]
        for z in candidates[x]:
            ok = True
            for y, w in chosen.items():
                if y in m_dom[x] and w not in m_tgt[z]:
                    ok = False
                    break
                if x in m_dom[y] and z not in m_tgt[w]:
                    ok = False
                    break
            if ok:
                chosen[x] = z
                extend(i + 1)
                del chosen[x]

    extend(0)
    return out


def sections(sheaf: EtaleSheaf, u) -> frozenset:
    """All sections over the open u; the empty open has exactly one."""
    found = _enumerate_continuous(
        sheaf.base, u, lambda x: sheaf.fiber(x), sheaf.total)
    return frozenset(found)


def sections_bruteforce(sheaf: EtaleSheaf, u) -> frozenset:
    """Oracle: filter every fiber-choice function by open-preimage continuity."""
    u = sheaf.base.require_open(u)
    points = [p for p in sheaf.base.points if p in u]
    fibers = [csorted(sheaf.fiber(x)) for x in points]
    count = 1
    for f in fibers:
        count *= max(len(f), 1)
        if count > SECTION_ENUM_GUARD:
            raise TooLarge("brute-force section enumeration guard exceeded")
    out = set()
    for choice in itertools.product(*fibers):
        mapping = dict(zip(points, choice))
        if all(sheaf.base.is_open(frozenset(
                x for x in points if mapping[x] in o))
               for o in sheaf.total.opens):
            out.add(make_section(u, mapping))
    return frozenset(out)


def constant_sheaf(base: FiniteSpace, values) -> EtaleSheaf:
    """Product of the base with a discrete fiber set."""
    values = csorted(set(values))
    if not values:
        raise EmptyFiber()
    points = [(x, m) for x in base.points for m in values]
    basis = [frozenset((x, m) for x in u) for u in base.opens for m in values]
    total = generate_from_basis(points, basis)
    projection = {(x, m): x for (x, m) in points}
    return validate_etale(total, base, projection)


def from_fibers_and_sections(base: FiniteSpace, fibers, sigma) -> EtaleSheaf:
    """Assemble a sheaf from prescribed fibers and a family of sections.

    The family must hit every fiber element, stay inside the fibers, and
    agree locally wherever two members share a value; the topology is then
    generated by all images of members restricted to smaller opens.
    """
    fibers = {x: frozenset(fibers.get(x, ())) for x in base.points}
    owner = {}
    for x in base.points:
        for z in fibers[x]:
            if z in owner:
                raise ValueError(f"fiber element {z!r} appears in two fibers")
            owner[z] = x
    family = []
    seen = set()
    for u, assignment in sigma:
        u = base.require_open(u)
        s = make_section(u, dict(assignment))
        if s not in seen:
            seen.add(s)
            family.append(s)
    family.sort(key=sort_key)

    for s in family:
        for x in csorted(s.domain):
            if s(x) not in fibers[x]:
                raise ConditionIFails(s, x)
    covered = frozenset().union(frozenset(), *(s.image for s in family))
    for x in csorted(base.points):
        for z in csorted(fibers[x]):
            if z not in covered:
                raise ConditionIIFails(z)
    for i, s in enumerate(family):
        for t in family[i + 1:]:
            for z in csorted(s.image & t.image):
                x = owner[z]
                if s(x) != z or t(x) != z:
                    raise ConditionIIIFails(s, t, z)
                meet = s.domain & t.domain
                if not any(x in w and w <= meet and
                           s.restrict(w) == t.restrict(w)
                           for w in base.opens):
                    raise ConditionIIIFails(s, t, z)

    points = [z for x in base.points for z in csorted(fibers[x])]
    basis = [s.image_of(v) for s in family for v in base.opens if v <= s.domain]
    total = generate_from_basis(points, basis)
    projection = {z: owner[z] for z in points}
    sheaf = validate_etale(total, base, projection)
    for s in family:
        dom = subspace(base, s.domain)
        validate_map(dom, total, s.mapping)  # continuity of the member
        for v in base.opens:
            if v <= s.domain and not total.is_open(s.image_of(v)):
                raise TheoremViolation("assembled member is not an open map")
    return sheaf


# -- sheaf morphisms ---------------------------------------------------------

@dataclass(frozen=True)
class SheafMorphism:
    source: EtaleSheaf
    target: EtaleSheaf
    mapping: ContinuousMap

    def __call__(self, z):
        return self.mapping(z)


def validate_sheaf_morphism(source: EtaleSheaf, target: EtaleSheaf,
                            mapping) -> SheafMorphism:
    """Check the projection triangle, then the equivalences it implies."""
    if source.base != target.base:
        raise ValueError("sheaf morphism endpoints have different bases")
    if isinstance(mapping, ContinuousMap):
        mapping = dict(mapping.assignment)
    cmap = validate_map(source.total, target.total, mapping)
    for z in source.total.points:
        if target.projection(cmap(z)) != source.projection(z):
            raise TriangleFails(z)
    # Triangle commuting is the same as preserving fibers.
    for x in source.base.points:
        if not cmap.image(source.fiber(x)) <= target.fiber(x):
            raise TheoremViolation("fiber preservation fails despite triangle")
    # A sheaf morphism is itself a local homeomorphism between the totals.
    for z in source.total.points:
        b = min_open(source.total, z)
        img = cmap.image(b)
        if len(img) != len(b):
            raise TheoremViolation("sheaf morphism not locally injective")
        for o in source.total.opens:
            if o <= b and not target.total.is_open(cmap.image(o)):
                raise TheoremViolation("sheaf morphism not locally open")
    return SheafMorphism(source=source, target=target, mapping=cmap)


def identity_sheaf_morphism(sheaf: EtaleSheaf) -> SheafMorphism:
    return validate_sheaf_morphism(
        sheaf, sheaf, {z: z for z in sheaf.total.points})


def compose_sheaf_morphisms(outer: SheafMorphism, inner: SheafMorphism) -> SheafMorphism:
    if inner.target != outer.source:
        raise ValueError("sheaf morphisms are not composable")
    return validate_sheaf_morphism(
        inner.source, outer.target,
        {z: outer(inner(z)) for z in inner.source.total.points})


def morphism_characterizations_agree(source: EtaleSheaf, target: EtaleSheaf,
                                     mapping) -> bool:
    """Three ways to say "sheaf morphism" must give one answer:
    the triangle, post-composition on all sections, and local sections."""
    cmap = validate_map(source.total, target.total, dict(
        mapping.assignment if isinstance(mapping, ContinuousMap) else mapping))
    triangle = all(target.projection(cmap(z)) == source.projection(z)
                   for z in source.total.points)
    source_sections = {u: sections(source, u) for u in source.base.opens}
    target_sections = {u: sections(target, u) for u in target.base.opens}

    def pushed(s):
        return make_section(s.domain, {x: cmap(z) for x, z in s.graph})

    post_composition = all(
        pushed(s) in target_sections[u]
        for u, secs in source_sections.items() for s in secs)
    local = all(
        any(z in s.image and pushed(s) in target_sections[u]
            for u, secs in source_sections.items() for s in secs)
        for z in source.total.points)
    return triangle == post_composition == local


def restrict_sheaf(sheaf: EtaleSheaf, subset) -> EtaleSheaf:
    """The sheaf over an open subspace: restrict the total to the preimage."""
    a = sheaf.base.require_open(subset)
    pre = sheaf.projection.preimage(a)
    total = subspace(sheaf.total, pre)
    base = subspace(sheaf.base, a)
    projection = {z: sheaf.projection(z) for z in total.points}
    return validate_etale(total, base, projection)


def section_from_injective_restriction(sheaf: EtaleSheaf, v) -> Section:
    """Invert the projection on an open total subset where it is injective."""
    v = sheaf.total.require_open(v)
    image = sheaf.projection.image(v)
    if len(image) != len(v):
        raise ValueError("projection is not injective on the given open")
    if not sheaf.base.is_open(image):
        raise ValueError("projection image of the given open is not open")
    inverse = {sheaf.projection(z): z for z in v}
    section = make_section(image, inverse)
    if section not in sections(sheaf, image):
        raise TheoremViolation("inverse of an injective open is not a section")
    return section


def embedding_opens(sheaf: EtaleSheaf):
    """Opens of the total on which the projection is an open embedding."""
    return [b for b in sheaf.total.sorted_opens()
            if _open_embedding_on(sheaf.total, sheaf.base, sheaf.projection, b)]


def is_basis(space: FiniteSpace, family) -> bool:
    """Does the family generate the space's topology by unions?"""
    family = [frozenset(b) for b in family]
    return all(
        any(x in b and b <= u for b in family)
        for u in space.opens for x in u)


def are_isomorphic(sheaf_a: EtaleSheaf, sheaf_b: EtaleSheaf):
    """Search fiber-preserving bijections for a bicontinuous match.

    Returns the isomorphism as a sheaf morphism, or None; raises TooLarge
    past the search guards.
    """
    if sheaf_a.base != sheaf_b.base:
        raise ValueError("isomorphism search needs a common base")
    if len(sheaf_a.total.points) != len(sheaf_b.total.points):
        return None
    if len(sheaf_a.total.points) > ISO_SEARCH_POINT_LIMIT:
        raise TooLarge("isomorphism search beyond the point limit")
    if len(sheaf_a.total.opens) != len(sheaf_b.total.opens):
        return None
    xs = list(sheaf_a.base.points)
    fibers_a = {x: csorted(sheaf_a.fiber(x)) for x in xs}
    fibers_b = {x: csorted(sheaf_b.fiber(x)) for x in xs}
    candidates = 1
    for x in xs:
        if len(fibers_a[x]) != len(fibers_b[x]):
            return None
        for k in range(2, len(fibers_a[x]) + 1):
            candidates *= k
        if candidates > ISO_SEARCH_CANDIDATE_LIMIT:
            raise TooLarge("isomorphism search beyond the candidate limit")
    per_point = [
        [dict(zip(fibers_a[x], perm))
         for perm in itertools.permutations(fibers_b[x])]
        for x in xs]
    for combo in itertools.product(*per_point):
        mapping = {}
        for piece in combo:
            mapping.update(piece)
        if all(sheaf_b.total.is_open(
                frozenset(mapping[z] for z in o))
               for o in sheaf_a.total.opens):
            return validate_sheaf_morphism(sheaf_a, sheaf_b, mapping)
    return None
