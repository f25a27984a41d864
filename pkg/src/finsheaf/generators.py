"""Deterministic random instances for the check harness.

Spaces are Alexandrov topologies of random preorders; presheaves pick
random maps on the covering pairs of the open-set lattice and reject
non-commuting diagrams (shrinking the section sets if rejection keeps
failing); sheaves are sheafifications of generated presheaves; maps are
random neighborhood-monotone point maps, validated continuous.
"""

import random
from typing import NamedTuple

from .canon import csorted, osorted
from .errors import GenerationExhausted, PathDependent
from .functors import sheafify
from .presheaf import Presheaf, _hasse_pairs, validate_presheaf
from .topology import ContinuousMap, FiniteSpace, min_open, validate_map, validate_space

MAX_GEN_POINTS = 6
MAX_SECTION_CARD = 4
RETRY_BUDGET = 100


class Instance(NamedTuple):
    """One generated bundle: a presheaf and its sheafification on a space,
    plus a continuous map into a second space carrying its own pair."""

    space: FiniteSpace
    presheaf: Presheaf
    sheaf: object
    map: ContinuousMap
    codomain_presheaf: Presheaf
    codomain_sheaf: object


def gen_space(rng: random.Random, max_points: int) -> FiniteSpace:
    """Alexandrov topology of a random preorder: opens are the up-sets."""
    n = rng.randint(1, max_points)
    points = [f"p{i}" for i in range(n)]
    reach = {p: {p} for p in points}
    for _ in range(rng.randint(0, n * n)):
        a, b = rng.choice(points), rng.choice(points)
        reach[a].add(b)
    changed = True
    while changed:
        changed = False
        for p in points:
            extra = set()
            for q in reach[p]:
                extra |= reach[q]
            if not extra <= reach[p]:
                reach[p] |= extra
                changed = True
    opens = []
    for mask in range(1 << n):
        w = {points[i] for i in range(n) if mask >> i & 1}
        if all(reach[p] <= w for p in w):
            opens.append(w)
    return validate_space(points, opens)


def gen_presheaf(rng: random.Random, space: FiniteSpace,
                 max_card: int = MAX_SECTION_CARD) -> Presheaf:
    """Random Hasse-edge maps, rejection-sampled until diagrams commute."""
    hasse = _hasse_pairs(space)
    card = max_card
    while card >= 1:
        for _ in range(RETRY_BUDGET):
            sections = {}
            for i, u in enumerate(space.sorted_opens()):
                size = rng.randint(1, card)
                sections[u] = {f"s{i}_{k}" for k in range(size)}
            restrictions = {}
            for u, v in hasse:
                targets = csorted(sections[v])
                restrictions[(u, v)] = {s: rng.choice(targets)
                                        for s in csorted(sections[u])}
            try:
                return validate_presheaf(space, sections, restrictions)
            except PathDependent:
                continue
        card -= 1  # shrink: singleton sets always commute
    raise GenerationExhausted("presheaf on " + repr(space))


def gen_continuous_map(rng: random.Random, domain: FiniteSpace,
                       codomain: FiniteSpace) -> ContinuousMap:
    """Random monotone assignment; falls back to a constant map."""
    for _ in range(RETRY_BUDGET):
        assignment = {}
        ok = True
        for x in domain.points:
            candidates = []
            for y in codomain.points:
                fine = True
                for x2, y2 in assignment.items():
                    if x in min_open(domain, x2) and y not in min_open(codomain, y2):
                        fine = False
                        break
                    if x2 in min_open(domain, x) and y2 not in min_open(codomain, y):
                        fine = False
                        break
                if fine:
                    candidates.append(y)
            if not candidates:
                ok = False
                break
            assignment[x] = rng.choice(candidates)
        if ok:
            return validate_map(domain, codomain, assignment)
    target = rng.choice(list(codomain.points))
    return validate_map(domain, codomain, {x: target for x in domain.points})


def gen_random_instances(seed: int, count: int, max_points: int):
    """Deterministic stream of generated instances for the given seed."""
    if max_points > MAX_GEN_POINTS:
        raise ValueError(f"max_points bound is {MAX_GEN_POINTS}")
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        space = gen_space(rng, max_points)
        presheaf = gen_presheaf(rng, space)
        sheaf = sheafify(presheaf).sheaf
        codomain = gen_space(rng, max_points)
        cmap = gen_continuous_map(rng, space, codomain)
        codomain_presheaf = gen_presheaf(rng, codomain)
        codomain_sheaf = sheafify(codomain_presheaf).sheaf
        out.append(Instance(space=space, presheaf=presheaf, sheaf=sheaf,
                            map=cmap, codomain_presheaf=codomain_presheaf,
                            codomain_sheaf=codomain_sheaf))
    return out
