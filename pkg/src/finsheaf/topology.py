"""Finite topological spaces and continuous maps.

A space stores its open-set lattice explicitly.  Minimal open
neighborhoods (every point of a finite space has one) are derived, never
input, and drive most constructions downstream.
"""

from dataclasses import dataclass
from functools import lru_cache

from .canon import csorted, open_key, osorted, sort_key
from .errors import (
    MissingEmptyOpen,
    MissingWholeSpace,
    NotABasis,
    NotClosedUnderIntersection,
    NotClosedUnderUnion,
    NotContinuous,
    NotOpen,
    TooLarge,
    UnknownPoint,
)

# Hard guard for subset enumerations (2^n sets).
MAX_GENERATED_POINTS = 16


@dataclass(frozen=True)
class FiniteSpace:
    """A finite point set with a validated topology."""

    points: tuple
    opens: frozenset

    def is_open(self, subset) -> bool:
        return frozenset(subset) in self.opens

    def require_open(self, subset) -> frozenset:
        subset = frozenset(subset)
        if subset not in self.opens:
            raise NotOpen(subset)
        return subset

    def require_point(self, x):
        if x not in self.points:
            raise UnknownPoint(x)
        return x

    @property
    def whole(self) -> frozenset:
        return frozenset(self.points)

    def sorted_opens(self):
        return _sorted_opens(self)

    def opens_within(self, subset):
        subset = frozenset(subset)
        return [u for u in self.sorted_opens() if u <= subset]

    def opens_containing(self, x):
        return [u for u in self.sorted_opens() if x in u]

    def __repr__(self):
        pts = ",".join(str(p) for p in self.points)
        return f"FiniteSpace([{pts}], {len(self.opens)} opens)"


def validate_space(points, raw_opens) -> FiniteSpace:
    """Check the topology axioms and return the canonicalized space."""
    pts = tuple(csorted(set(points)))
    ptset = frozenset(pts)
    opens = set()
    for raw in raw_opens:
        o = frozenset(raw)
        for p in o:
            if p not in ptset:
                raise UnknownPoint(p, context="opens")
        opens.add(o)
    if frozenset() not in opens:
        raise MissingEmptyOpen()
    if ptset not in opens:
        raise MissingWholeSpace()
    _check_closure(opens)
    return FiniteSpace(points=pts, opens=frozenset(opens))


def _check_closure(opens):
    """Union/intersection closure; by finiteness pairwise closure suffices."""
    if len(opens) <= 512:
        ordered = osorted(opens)
        for i, a in enumerate(ordered):
            for b in ordered[i + 1:]:
                if a | b not in opens:
                    raise NotClosedUnderUnion(a, b)
                if a & b not in opens:
                    raise NotClosedUnderIntersection(a, b)
        return
    # Large lattices: a family containing {} and the whole set is a topology
    # iff it equals the up-closed sets of its own minimal-open table.
    points = frozenset().union(*opens)
    if len(points) > MAX_GENERATED_POINTS:
        raise TooLarge(f"topology on {len(points)} points with {len(opens)} opens")
    minimal = {p: _intersect_all(o for o in opens if p in o) for p in points}
    upsets = _all_upsets(points, minimal)
    if opens != upsets:
        _find_closure_witness(opens)
        raise NotClosedUnderIntersection(frozenset(), frozenset())  # pragma: no cover


def _intersect_all(sets):
    result = None
    for s in sets:
        result = s if result is None else result & s
    return frozenset() if result is None else result


def _all_upsets(points, minimal):
    pts = csorted(points)
    out = set()
    for mask in range(1 << len(pts)):
        w = frozenset(pts[i] for i in range(len(pts)) if mask >> i & 1)
        if all(minimal[p] <= w for p in w):
            out.add(w)
    return out


def _find_closure_witness(opens):
    ordered = osorted(opens)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if a | b not in opens:
                raise NotClosedUnderUnion(a, b)
            if a & b not in opens:
                raise NotClosedUnderIntersection(a, b)


@lru_cache(maxsize=4096)
def _sorted_opens(space: FiniteSpace):
    return osorted(space.opens)


@lru_cache(maxsize=4096)
def _min_open_table(space: FiniteSpace):
    table = {}
    for x in space.points:
        table[x] = _intersect_all(o for o in space.opens if x in o)
    return table


def min_open(space: FiniteSpace, x) -> frozenset:
    """The smallest open containing x (the top of its neighborhood order)."""
    space.require_point(x)
    return _min_open_table(space)[x]


def neighborhoods(space: FiniteSpace, x):
    """All opens containing x, sorted; right directed with top min_open(x)."""
    space.require_point(x)
    return space.opens_containing(x)


@dataclass(frozen=True)
class ContinuousMap:
    """A point map whose open-preimages are open."""

    domain: FiniteSpace
    codomain: FiniteSpace
    assignment: tuple  # sorted (x, f(x)) pairs; kept as a tuple for hashing

    def __call__(self, x):
        return self.mapping[x]

    @property
    def mapping(self) -> dict:
        return dict(self.assignment)

    def preimage(self, subset) -> frozenset:
        subset = frozenset(subset)
        return frozenset(x for x, y in self.assignment if y in subset)

    def image(self, subset=None) -> frozenset:
        if subset is None:
            return frozenset(y for _, y in self.assignment)
        return frozenset(y for x, y in self.assignment if x in subset)

    def __repr__(self):
        pairs = ", ".join(f"{x}->{y}" for x, y in self.assignment)
        return f"ContinuousMap({pairs})"


def validate_map(domain: FiniteSpace, codomain: FiniteSpace, assignment) -> ContinuousMap:
    """Check totality and continuity; witness is the first bad open."""
    assignment = dict(assignment)
    for x in domain.points:
        if x not in assignment:
            raise UnknownPoint(x, context="map domain (no image assigned)")
    for x, y in assignment.items():
        if x not in domain.points:
            raise UnknownPoint(x, context="map domain")
        if y not in codomain.points:
            raise UnknownPoint(y, context="map codomain")
    pairs = tuple(sorted(assignment.items(), key=lambda kv: sort_key(kv[0])))
    bad = [v for v in codomain.opens
           if not domain.is_open(frozenset(x for x, y in pairs if y in v))]
    if bad:
        raise NotContinuous(min(bad, key=open_key))
    return ContinuousMap(domain=domain, codomain=codomain, assignment=pairs)


def identity_map(space: FiniteSpace) -> ContinuousMap:
    return validate_map(space, space, {x: x for x in space.points})


def compose_maps(outer: ContinuousMap, inner: ContinuousMap) -> ContinuousMap:
    """outer after inner; revalidated, which must succeed for valid inputs."""
    if inner.codomain != outer.domain:
        raise ValueError("maps are not composable")
    return validate_map(
        inner.domain, outer.codomain,
        {x: outer(inner(x)) for x in inner.domain.points})


def generate_from_basis(points, basis_sets) -> FiniteSpace:
    """Topology generated by a basis: exactly all unions of basis sets."""
    pts = tuple(csorted(set(points)))
    if len(pts) > MAX_GENERATED_POINTS:
        raise TooLarge(f"basis generation over {len(pts)} points")
    ptset = frozenset(pts)
    basis = []
    seen = set()
    for raw in basis_sets:
        b = frozenset(raw)
        for p in b:
            if p not in ptset:
                raise UnknownPoint(p, context="basis")
        if b not in seen:
            seen.add(b)
            basis.append(b)
    basis = osorted(basis)
    covering = {p: [b for b in basis if p in b] for p in pts}
    for p in pts:
        if not covering[p]:
            raise NotABasis(p)
    for i, b1 in enumerate(basis):
        for b2 in basis[i:]:
            inter = b1 & b2
            for x in inter:
                if not any(b3 <= inter for b3 in covering[x]):
                    raise NotABasis(x, b1, b2)
    # W is a union of basis sets iff every point of W has a basis set
    # containing it inside W.
    opens = set()
    for mask in range(1 << len(pts)):
        w = frozenset(pts[i] for i in range(len(pts)) if mask >> i & 1)
        if all(any(b <= w for b in covering[p]) for p in w):
            opens.add(w)
    return validate_space(pts, opens)


def subspace(space: FiniteSpace, subset) -> FiniteSpace:
    """An open subset with the opens of the ambient space it contains."""
    a = space.require_open(subset)
    return FiniteSpace(
        points=tuple(p for p in space.points if p in a),
        opens=frozenset(u for u in space.opens if u <= a))


def connected_components(space: FiniteSpace, subset):
    """Partition of an open set into its connected components.

    Two points are inseparable iff they are linked through minimal opens
    inside the subset, so components are those link-graph components.
    """
    u = space.require_open(subset)
    if not u:
        return ()
    table = _min_open_table(space)
    parent = {x: x for x in u}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in u:
        for y in table[x] & u:
            parent[find(x)] = find(y)
    groups = {}
    for x in u:
        groups.setdefault(find(x), set()).add(x)
    return tuple(osorted(frozenset(g) for g in groups.values()))


def connected_components_bruteforce(space: FiniteSpace, subset):
    """Oracle: split recursively along relatively-open 2-partitions."""
    u = space.require_open(subset)
    rel_opens = {o & u for o in space.opens}

    def split(part):
        if not part:
            return []
        for a in osorted(rel_opens):
            a = a & part
            b = part - a
            if a and b and b in {o & part for o in rel_opens}:
                return split(a) + split(b)
        return [part]

    return tuple(osorted(split(u)))
