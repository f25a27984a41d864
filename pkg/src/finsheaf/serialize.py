"""JSON file formats and canonical serialization.

Space:    {"points": ["a","b"], "opens": [[], ["a"], ["a","b"]]}
Map:      {"domain": <space or path>, "codomain": <space or path>,
           "map": {"a": "p"}}
Presheaf: {"space": <space or path>, "sections": {"": ["*"], "a": ["f"]},
           "restrictions": {"a,b->a": {"h": "f"}}}
Sheaf:    {"total": <space or path>, "base": <space or path>,
           "projection": {"z1": "a"}}

Open-set keys use the canonical name: sorted comma-joined point names,
the empty string for the empty open.  Identity restriction maps may be
omitted; composite maps are completed and cross-checked on load.
Computed objects with structured points (germs, fiber-product pairs) are
relabeled deterministically before writing.
"""

import json
import os
from dataclasses import dataclass

from .canon import csorted, open_key, open_name, osorted, sort_key
from .errors import FinsheafError, NotOpen, UnknownPoint
from .etale import EtaleSheaf, Section, validate_etale
from .presheaf import Presheaf, validate_presheaf
from .topology import ContinuousMap, FiniteSpace, validate_map, validate_space


@dataclass
class ParseError(Exception):
    path: str
    line: int
    col: int
    reason: str

    def __str__(self):
        return f"{self.path}:{self.line}:{self.col}: {self.reason}"


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.colno, exc.msg) from exc


def parse(path):
    """Load and validate whichever object kind the file contains."""
    obj = _load_json(path)
    try:
        return parse_obj(obj, base_dir=os.path.dirname(os.path.abspath(path)))
    except FinsheafError as exc:
        exc.source_path = path
        raise


def parse_obj(obj, base_dir="."):
    if not isinstance(obj, dict):
        raise ValueError("top-level JSON value must be an object")
    keys = set(obj)
    if {"points", "opens"} <= keys:
        return space_from_obj(obj)
    if {"domain", "codomain", "map"} <= keys:
        return map_from_obj(obj, base_dir)
    if {"space", "sections"} <= keys:
        return presheaf_from_obj(obj, base_dir)
    if {"total", "base", "projection"} <= keys:
        return sheaf_from_obj(obj, base_dir)
    raise ValueError(f"unrecognized object with keys {sorted(keys)}")


def _resolve_space(value, base_dir):
    if isinstance(value, str):
        path = value if os.path.isabs(value) else os.path.join(base_dir, value)
        loaded = parse(path)
        if not isinstance(loaded, FiniteSpace):
            raise ValueError(f"{path} does not contain a space")
        return loaded
    return space_from_obj(value)


def space_from_obj(obj) -> FiniteSpace:
    return validate_space(obj["points"], obj["opens"])


def map_from_obj(obj, base_dir=".") -> ContinuousMap:
    domain = _resolve_space(obj["domain"], base_dir)
    codomain = _resolve_space(obj["codomain"], base_dir)
    return validate_map(domain, codomain, dict(obj["map"]))


def resolve_open_name(name: str, space: FiniteSpace) -> frozenset:
    if name == "":
        return frozenset()
    parts = name.split(",")
    for p in parts:
        if p not in space.points:
            raise UnknownPoint(p, context=f"open name {name!r}")
    subset = frozenset(parts)
    if not space.is_open(subset):
        raise NotOpen(subset)
    return subset


def presheaf_from_obj(obj, base_dir=".") -> Presheaf:
    space = _resolve_space(obj["space"], base_dir)
    sections = {resolve_open_name(name, space): set(elems)
                for name, elems in obj["sections"].items()}
    restrictions = []
    for key, mapping in obj.get("restrictions", {}).items():
        if "->" not in key:
            raise ValueError(f"restriction key {key!r} is not of the form U->V")
        uname, vname = key.split("->", 1)
        u = resolve_open_name(uname, space)
        v = resolve_open_name(vname, space)
        restrictions.append(((u, v), dict(mapping)))
    return validate_presheaf(space, sections, restrictions)


def sheaf_from_obj(obj, base_dir=".") -> EtaleSheaf:
    total = _resolve_space(obj["total"], base_dir)
    base = _resolve_space(obj["base"], base_dir)
    return validate_etale(total, base, dict(obj["projection"]))


# -- writing -----------------------------------------------------------------

def stringify_label(value) -> str:
    """Deterministic flat label for a possibly structured value."""
    if isinstance(value, str):
        text = value
    elif isinstance(value, tuple):
        text = "|".join(stringify_label(c) for c in value)
    elif isinstance(value, Section):
        inner = ";".join(f"{stringify_label(x)}:{stringify_label(z)}"
                         for x, z in value.graph)
        text = "{" + inner + "}"
    elif isinstance(value, frozenset):
        text = "{" + ";".join(sorted(stringify_label(v) for v in value)) + "}"
    else:
        text = str(value)
    return text.replace("->", "~").replace(",", ";").replace(" ", "")


def _label_table(values) -> dict:
    """Unique sanitized labels for the given values, collision-suffixed."""
    table = {}
    used = {}
    for v in csorted(values):
        label = stringify_label(v)
        if label in used:
            used[label] += 1
            label = f"{label}#{used[label]}"
        else:
            used[label] = 1
        table[v] = label
    return table


def space_to_obj(space: FiniteSpace, table=None) -> dict:
    table = table or _label_table(space.points)
    return {
        "points": [table[p] for p in csorted(space.points)],
        "opens": [sorted(table[p] for p in u) for u in space.sorted_opens()],
    }


def map_to_obj(cmap: ContinuousMap) -> dict:
    dom = _label_table(cmap.domain.points)
    cod = _label_table(cmap.codomain.points)
    return {
        "domain": space_to_obj(cmap.domain, dom),
        "codomain": space_to_obj(cmap.codomain, cod),
        "map": {dom[x]: cod[y] for x, y in cmap.assignment},
    }


def presheaf_to_obj(presheaf: Presheaf) -> dict:
    pts = _label_table(presheaf.base.points)
    elems = {u: _label_table(presheaf.sections[u]) for u in presheaf.base.opens}

    def oname(u):
        return ",".join(sorted(pts[p] for p in u))

    sections = {oname(u): sorted(elems[u][s] for s in presheaf.sections[u])
                for u in presheaf.base.sorted_opens()}
    restrictions = {}
    for (u, v) in presheaf.nested_pairs():
        mapping = presheaf.restrictions[(u, v)]
        restrictions[f"{oname(u)}->{oname(v)}"] = {
            elems[u][s]: elems[v][t]
            for s, t in sorted(mapping.items(), key=lambda kv: sort_key(kv[0]))}
    return {"space": space_to_obj(presheaf.base, pts),
            "sections": sections, "restrictions": restrictions}


def sheaf_to_obj(sheaf: EtaleSheaf) -> dict:
    tot = _label_table(sheaf.total.points)
    bas = _label_table(sheaf.base.points)
    return {
        "total": space_to_obj(sheaf.total, tot),
        "base": space_to_obj(sheaf.base, bas),
        "projection": {tot[z]: bas[sheaf.projection(z)]
                       for z in csorted(sheaf.total.points)},
    }


def serialize(obj) -> dict:
    if isinstance(obj, FiniteSpace):
        return space_to_obj(obj)
    if isinstance(obj, ContinuousMap):
        return map_to_obj(obj)
    if isinstance(obj, Presheaf):
        return presheaf_to_obj(obj)
    if isinstance(obj, EtaleSheaf):
        return sheaf_to_obj(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(serialize(obj), indent=2, sort_keys=True) + "\n"


def write(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
