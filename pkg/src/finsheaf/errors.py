"""Exception taxonomy for finsheaf.

Every validation failure carries a structured witness on the exception
object so callers (and the CLI) can replay it.
"""


class FinsheafError(Exception):
    """Base class for all finsheaf errors."""


class TooLarge(FinsheafError):
    """An exhaustive enumeration exceeded its hard size guard."""


class TheoremViolation(FinsheafError):
    """An internal consistency check that must hold by theorem failed."""


# -- topology ---------------------------------------------------------------

class TopologyError(FinsheafError):
    pass


class UnknownPoint(TopologyError):
    def __init__(self, point, context=""):
        self.point = point
        super().__init__(f"unknown point {point!r}" + (f" in {context}" if context else ""))


class MissingEmptyOpen(TopologyError):
    def __init__(self):
        super().__init__("the empty set is not among the opens")


class MissingWholeSpace(TopologyError):
    def __init__(self):
        super().__init__("the full point set is not among the opens")


class NotClosedUnderUnion(TopologyError):
    def __init__(self, a, b):
        self.witness = (a, b)
        super().__init__(f"union of opens {sorted(a)} and {sorted(b)} is not open")


class NotClosedUnderIntersection(TopologyError):
    def __init__(self, a, b):
        self.witness = (a, b)
        super().__init__(f"intersection of opens {sorted(a)} and {sorted(b)} is not open")


class NotContinuous(TopologyError):
    def __init__(self, open_set):
        self.witness = open_set
        super().__init__(f"preimage of open {sorted(open_set)} is not open")


class NotABasis(TopologyError):
    def __init__(self, point, b1=None, b2=None):
        self.witness = (point, b1, b2)
        if b1 is None:
            super().__init__(f"basis does not cover point {point!r}")
        else:
            super().__init__(
                f"no basis set around {point!r} inside "
                f"{sorted(b1)} ∩ {sorted(b2)}")


class NotOpen(TopologyError):
    def __init__(self, subset):
        self.witness = subset
        super().__init__(f"{sorted(subset)} is not an open set of the space")


# -- direct limits ----------------------------------------------------------

class DirlimitError(FinsheafError):
    pass


class NotAPreorder(DirlimitError):
    def __init__(self, kind, witness):
        self.witness = witness
        super().__init__(f"index relation is not {kind}: witness {witness!r}")


class NotDirected(DirlimitError):
    def __init__(self, a, b):
        self.witness = (a, b)
        super().__init__(f"indices {a!r}, {b!r} have no upper bound")


class IdentityViolated(DirlimitError):
    def __init__(self, index):
        self.witness = index
        super().__init__(f"map at ({index!r}, {index!r}) is not the identity")


class CompositionViolated(DirlimitError):
    def __init__(self, a, b, c, element):
        self.witness = (a, b, c, element)
        super().__init__(
            f"maps along {a!r} ≤ {b!r} ≤ {c!r} do not compose at {element!r}")


class MissingMap(DirlimitError):
    def __init__(self, a, b):
        self.witness = (a, b)
        super().__init__(f"no map for related pair {a!r} ≤ {b!r}")


class NotACocone(DirlimitError):
    def __init__(self, a, b, element):
        self.witness = (a, b, element)
        super().__init__(
            f"cocone square fails for {a!r} ≤ {b!r} at element {element!r}")


# -- presheaves -------------------------------------------------------------

class PresheafError(FinsheafError):
    pass


class MissingSectionSet(PresheafError):
    def __init__(self, open_set):
        self.witness = open_set
        super().__init__(f"no section set for open {sorted(open_set)}")


class MissingRestriction(PresheafError):
    def __init__(self, u, v):
        self.witness = (u, v)
        super().__init__(
            f"no restriction map {sorted(u)} -> {sorted(v)} (a covering pair)")


class PathDependent(PresheafError):
    def __init__(self, u, w, values):
        self.witness = (u, w, values)
        super().__init__(
            f"restriction {sorted(u)} -> {sorted(w)} is path dependent: "
            f"composites give {values[0]!r} and {values[1]!r}")


class UnknownSection(PresheafError):
    def __init__(self, open_set, element):
        self.witness = (open_set, element)
        super().__init__(f"{element!r} is not a section over {sorted(open_set)}")


class PointNotInOpen(PresheafError):
    def __init__(self, point, open_set):
        self.witness = (point, open_set)
        super().__init__(f"point {point!r} does not lie in open {sorted(open_set)}")


class SquareFails(PresheafError):
    def __init__(self, u, v, element):
        self.witness = (u, v, element)
        super().__init__(
            f"naturality square {sorted(u)} -> {sorted(v)} fails at {element!r}")


class NotComplete(PresheafError):
    def __init__(self, witness=None):
        self.witness = witness
        super().__init__("target presheaf is not complete")


class GlueConflict(TheoremViolation):
    def __init__(self, open_set, detail):
        self.witness = (open_set, detail)
        super().__init__(f"gluing over {sorted(open_set)} failed: {detail}")


# -- etale sheaves ----------------------------------------------------------

class EtaleError(FinsheafError):
    pass


class NotSurjective(EtaleError):
    def __init__(self, base_point):
        self.witness = base_point
        super().__init__(f"projection misses base point {base_point!r}")


class NotLocalHomeo(EtaleError):
    def __init__(self, total_point):
        self.witness = total_point
        super().__init__(
            f"projection is not a local homeomorphism at {total_point!r}")


class EmptyFiber(EtaleError):
    def __init__(self):
        super().__init__("constant sheaf needs a nonempty fiber set")


class TriangleFails(EtaleError):
    def __init__(self, total_point):
        self.witness = total_point
        super().__init__(
            f"projection triangle does not commute at {total_point!r}")


class ConditionIFails(EtaleError):
    def __init__(self, section, point):
        self.witness = (section, point)
        super().__init__(f"section value at {point!r} is not in the fiber over it")


class ConditionIIFails(EtaleError):
    def __init__(self, element):
        self.witness = element
        super().__init__(f"fiber element {element!r} lies on no section")


class ConditionIIIFails(EtaleError):
    def __init__(self, s, t, element):
        self.witness = (s, t, element)
        super().__init__(
            f"sections through {element!r} do not agree on any open around it")


class GenerationExhausted(FinsheafError):
    def __init__(self, what):
        super().__init__(f"random generation exhausted its retry budget: {what}")
