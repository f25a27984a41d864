"""Canonical small instances used in docs, tests, and the check harness.

These ship both as constructors and as JSON data files (see data/); the
two forms are asserted equal in the test suite.

- sierpinski: two points, one of them open.
- disc2: two discrete points.
- point_space: one point.
- mixed4: four points, one limit point over two open ones plus an
  isolated point (two connected components).
- p1: a complete, non-flabby presheaf on sierpinski.
- const2: the identity-restriction two-element presheaf; flabby but not
  complete (uniqueness already fails on the empty open).
- gluefail: uniqueness holds but a compatible family has no glue.
- s1fail: gluing holds but two global elements agree everywhere below.
"""

from importlib import resources

from .presheaf import Presheaf, validate_presheaf
from .topology import FiniteSpace, validate_space


def sierpinski() -> FiniteSpace:
    return validate_space(["a", "b"], [[], ["a"], ["a", "b"]])


def disc2() -> FiniteSpace:
    return validate_space(["p", "q"], [[], ["p"], ["q"], ["p", "q"]])


def point_space() -> FiniteSpace:
    return validate_space(["*"], [[], ["*"]])


def mixed4() -> FiniteSpace:
    return validate_space(
        ["w", "x", "y", "z"],
        [[], ["w"], ["x"], ["z"], ["w", "x"], ["w", "z"], ["x", "z"],
         ["w", "x", "z"], ["w", "x", "y"], ["w", "x", "y", "z"]])


def p1() -> Presheaf:
    space = sierpinski()
    a, x = frozenset({"a"}), frozenset({"a", "b"})
    empty = frozenset()
    return validate_presheaf(
        space,
        {empty: {"*"}, a: {"f", "g"}, x: {"h"}},
        {(x, a): {"h": "f"}, (a, empty): {"f": "*", "g": "*"}})


def const2() -> Presheaf:
    space = disc2()
    ident = {"0": "0", "1": "1"}
    opens = space.sorted_opens()
    return validate_presheaf(
        space,
        {u: {"0", "1"} for u in opens},
        {(u, v): dict(ident) for u in opens for v in opens if v < u})


def gluefail() -> Presheaf:
    space = disc2()
    p, q, x = frozenset({"p"}), frozenset({"q"}), frozenset({"p", "q"})
    empty = frozenset()
    return validate_presheaf(
        space,
        {empty: {"*"}, p: {"0", "1"}, q: {"0", "1"}, x: {"c"}},
        {(x, p): {"c": "0"}, (x, q): {"c": "0"},
         (p, empty): {"0": "*", "1": "*"}, (q, empty): {"0": "*", "1": "*"}})


def s1fail() -> Presheaf:
    space = disc2()
    p, q, x = frozenset({"p"}), frozenset({"q"}), frozenset({"p", "q"})
    empty = frozenset()
    return validate_presheaf(
        space,
        {empty: {"*"}, p: {"*"}, q: {"*"}, x: {"s", "t"}},
        {(x, p): {"s": "*", "t": "*"}, (x, q): {"s": "*", "t": "*"},
         (p, empty): {"*": "*"}, (q, empty): {"*": "*"}})


def fixture_spaces() -> dict:
    return {"sierp": sierpinski(), "disc2": disc2(), "pt": point_space(),
            "mixed4": mixed4()}


def fixture_presheaves() -> dict:
    return {"p1": p1(), "const2": const2(), "gluefail": gluefail(),
            "s1fail": s1fail()}


def data_path(name: str):
    """Filesystem path of a shipped fixture data file, e.g. data_path("p1")."""
    return resources.files("finsheaf.data").joinpath(f"{name}.json")
