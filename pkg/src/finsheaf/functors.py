"""Sheafification, the section functor, and change of base.

Sheafification materializes each stalk through its canonical
representatives in the minimal-open section set, then assembles the
total space from the induced germ sections.  Equalities between a sheaf
and the sheafification of its section presheaf are realized as explicit
canonical isomorphisms, never as set identity.

The pull-back total space is the fiber product {(x, z) : f(x) = pi(z)}
carrying the subspace topology of the rectangle-generated product, with
first-coordinate projection (x, z) -> x.
"""

from dataclasses import dataclass

from .canon import csorted, osorted
from .errors import GlueConflict, NotComplete, TheoremViolation, TooLarge
from .etale import (
    EtaleSheaf,
    SheafMorphism,
    from_fibers_and_sections,
    make_section,
    sections,
    validate_etale,
    validate_sheaf_morphism,
)
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    Stalk,
    is_complete,
    stalk,
    validate_morphism,
    validate_presheaf,
)
from .topology import ContinuousMap, FiniteSpace, generate_from_basis, min_open, validate_map


@dataclass(frozen=True)
class SheafificationResult:
    """The generated sheaf with the maps that relate it to its presheaf."""

    presheaf: Presheaf
    sheaf: EtaleSheaf
    stalks: dict      # point -> Stalk
    rho: dict         # open U -> {element of S(U) -> Section over U}
    germ_table: dict  # (U, element, point) -> canonical stalk representative


def sheafify(presheaf: Presheaf) -> SheafificationResult:
    """Build the sheaf of germs of a presheaf.

    Total points are (x, r) with r the canonical representative of a
    stalk class; the topology is generated by the images of the germ
    sections of the presheaf elements.
    """
    base = presheaf.base
    stalks = {x: stalk(presheaf, x) for x in base.points}
    fibers = {x: frozenset((x, r) for r in stalks[x].reps) for x in base.points}
    germ_table = {}
    rho = {}
    sigma = []
    for u in base.sorted_opens():
        rho_u = {}
        for s in csorted(presheaf.sections[u]):
            assignment = {}
            for x in u:
                r = presheaf.restrict_element(u, stalks[x].min_open, s)
                germ_table[(u, s, x)] = r
                assignment[x] = (x, r)
            tilde = make_section(u, assignment)
            rho_u[s] = tilde
            sigma.append((u, assignment))
        rho[u] = rho_u
    sheaf = from_fibers_and_sections(base, fibers, sigma)
    return SheafificationResult(presheaf=presheaf, sheaf=sheaf, stalks=stalks,
                                rho=rho, germ_table=germ_table)


def section_presheaf(sheaf: EtaleSheaf) -> Presheaf:
    """The presheaf of sections, restricted by plain function restriction."""
    base = sheaf.base
    secs = {u: frozenset(sections(sheaf, u)) for u in base.opens}
    restrictions = {}
    for u in base.sorted_opens():
        for v in base.opens_within(u):
            if v < u:
                restrictions[(u, v)] = {s: s.restrict(v) for s in secs[u]}
    return validate_presheaf(base, secs, restrictions)


def _check_isomorphism(morphism: SheafMorphism) -> SheafMorphism:
    source, target, cmap = morphism.source, morphism.target, morphism.mapping
    values = [cmap(z) for z in source.total.points]
    if len(set(values)) != len(values) or \
            len(values) != len(target.total.points):
        raise TheoremViolation("canonical sheaf map is not bijective")
    for o in source.total.opens:
        if not target.total.is_open(cmap.image(o)):
            raise TheoremViolation("canonical sheaf map is not open")
    if len(source.total.opens) != len(target.total.opens):
        raise TheoremViolation("canonical sheaf map is not bicontinuous")
    return morphism


def counit(sheaf: EtaleSheaf) -> SheafMorphism:
    """Evaluation from the sheafification of the section presheaf back to
    the sheaf: the germ of a section at x goes to its value at x.

    Always an isomorphism; a failure is an internal error.
    """
    result = sheafify(section_presheaf(sheaf))
    mapping = {}
    for (x, rep) in result.sheaf.total.points:
        mapping[(x, rep)] = rep(x)
    morphism = validate_sheaf_morphism(result.sheaf, sheaf, mapping)
    return _check_isomorphism(morphism)


def rho_morphism(presheaf: Presheaf) -> PresheafMorphism:
    """The canonical morphism into the section presheaf of the
    sheafification; an isomorphism exactly for complete presheaves."""
    result = sheafify(presheaf)
    target = section_presheaf(result.sheaf)
    return validate_morphism(presheaf, target, result.rho)


def factor_through(phi: PresheafMorphism) -> PresheafMorphism:
    """Factor a morphism into a complete presheaf through the canonical one.

    Returns the unique psi with psi after the canonical morphism equal to
    phi; values are glued from germ representatives over the minimal-open
    cover, which the completeness of the target makes consistent.
    """
    source, target = phi.source, phi.target
    if not is_complete(target):
        raise NotComplete()
    base = source.base
    result = sheafify(source)
    gamma = section_presheaf(result.sheaf)
    minimal = {x: min_open(base, x) for x in base.points}
    components = {}
    for u in base.sorted_opens():
        comp = {}
        for t in csorted(gamma.sections[u]):
            pushed = {}
            for x in u:
                _, rep = t(x)
                pushed[x] = phi.components[minimal[x]][rep]
            candidates = [
                s for s in csorted(target.sections[u])
                if all(target.restrict_element(u, minimal[x], s) == pushed[x]
                       for x in u)]
            if len(candidates) != 1:
                raise GlueConflict(u, f"{len(candidates)} glueings for {t}")
            comp[t] = candidates[0]
        components[u] = comp
    psi = validate_morphism(gamma, target, components)
    for u in base.sorted_opens():
        for s in csorted(source.sections[u]):
            if psi.components[u][result.rho[u][s]] != phi.components[u][s]:
                raise TheoremViolation("factorization triangle does not commute")
    return psi


def sheafify_morphism(phi: PresheafMorphism) -> SheafMorphism:
    """The induced map on sheafifications, acting on canonical germs."""
    source = sheafify(phi.source)
    target = sheafify(phi.target)
    base = phi.source.base
    mapping = {}
    for (x, rep) in source.sheaf.total.points:
        m = min_open(base, x)
        mapping[(x, rep)] = (x, phi.components[m][rep])
    return validate_sheaf_morphism(source.sheaf, target.sheaf, mapping)


def section_morphism(phi: SheafMorphism) -> PresheafMorphism:
    """Post-composition on all section sets."""
    gs = section_presheaf(phi.source)
    gt = section_presheaf(phi.target)
    components = {
        u: {s: make_section(u, {x: phi(z) for x, z in s.graph})
            for s in gs.sections[u]}
        for u in gs.base.opens}
    return validate_morphism(gs, gt, components)


# -- change of base ----------------------------------------------------------

def pushout_presheaf(f: ContinuousMap, presheaf: Presheaf) -> Presheaf:
    """Transport a presheaf along a map by taking preimages of opens."""
    if f.domain != presheaf.base:
        raise ValueError("push-out needs the presheaf to live on the map domain")
    target = f.codomain
    secs = {v: presheaf.sections[f.preimage(v)] for v in target.opens}
    restrictions = {}
    for v in target.sorted_opens():
        for w in target.opens_within(v):
            if w < v:
                restrictions[(v, w)] = presheaf.rho(f.preimage(v), f.preimage(w))
    return validate_presheaf(target, secs, restrictions)


def pushout_morphism(f: ContinuousMap, phi: PresheafMorphism) -> PresheafMorphism:
    """The pushed-out morphism reuses the component at each preimage."""
    source = pushout_presheaf(f, phi.source)
    target = pushout_presheaf(f, phi.target)
    components = {v: phi.components[f.preimage(v)] for v in f.codomain.opens}
    return validate_morphism(source, target, components)


def pushforward_sheaf(f: ContinuousMap, sheaf: EtaleSheaf) -> EtaleSheaf:
    """Sections, pushed out, then sheafified on the codomain."""
    return sheafify(pushout_presheaf(f, section_presheaf(sheaf))).sheaf


def pullback_sheaf(f: ContinuousMap, sheaf: EtaleSheaf) -> EtaleSheaf:
    """Fiber product total with the restricted product topology.

    The projection is the first coordinate (x, z) -> x (the second
    coordinate would not land in the new base).
    """
    if f.codomain != sheaf.base:
        raise ValueError("pull-back needs the sheaf to live on the map codomain")
    domain = f.domain
    points = [(x, z) for x in domain.points
              for z in sheaf.total.points if f(x) == sheaf.projection(z)]
    dom_min = {x: min_open(domain, x) for x in domain.points}
    tot_min = {z: min_open(sheaf.total, z) for z in sheaf.total.points}
    basis = [
        frozenset((x2, z2) for (x2, z2) in points
                  if x2 in dom_min[x] and z2 in tot_min[z])
        for (x, z) in points]
    total = generate_from_basis(points, basis)
    projection = {(x, z): x for (x, z) in points}
    return validate_etale(total, domain, projection)


def relative_section_presheaf(f: ContinuousMap, sheaf: EtaleSheaf) -> Presheaf:
    """Continuous partial lifts of f through the projection, per open."""
    if f.codomain != sheaf.base:
        raise ValueError("pull-back needs the sheaf to live on the map codomain")
    from .etale import _enumerate_continuous
    domain = f.domain
    secs = {}
    for u in domain.opens:
        lifts = _enumerate_continuous(
            domain, u, lambda x: sheaf.fiber(f(x)), sheaf.total)
        secs[u] = frozenset(lifts)
    restrictions = {}
    for u in domain.sorted_opens():
        for v in domain.opens_within(u):
            if v < u:
                restrictions[(u, v)] = {t: t.restrict(v) for t in secs[u]}
    return validate_presheaf(domain, secs, restrictions)


def pullback_via_presheaf(f: ContinuousMap, sheaf: EtaleSheaf,
                          verify: bool = True) -> EtaleSheaf:
    """Sheafification of the relative-section presheaf; isomorphic to the
    fiber-product pull-back (checked unless the size guard trips)."""
    result = sheafify(relative_section_presheaf(f, sheaf)).sheaf
    if verify:
        from .etale import are_isomorphic
        try:
            direct = pullback_sheaf(f, sheaf)
            if are_isomorphic(result, direct) is None:
                raise TheoremViolation(
                    "pull-back routes disagree: no isomorphism found")
        except TooLarge:
            pass
    return result
