"""JSON file formats.

Every file is one JSON object with ``schema_version`` and ``kind`` keys.
Output is canonical (sorted keys, two-space indent, trailing newline) so a
load/dump round trip reproduces the bytes exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import OrdimError, ParseError
from .poset import Label, Poset, cover_relation, poset_from_covers, rank_by_height
from .realizers import BooleanRealizer
from .ramsey import GridColoring, MonoBox, SizeInsufficient
from .structure import TreeDecomposition

SCHEMA_VERSION = 1


def dumps(obj: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, **obj}, sort_keys=True, indent=2) + "\n"


def write(path, obj: dict) -> None:
    Path(path).write_text(dumps(obj))


def read(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def loads(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version}")
    return data


def _expect(data: dict, kind: str):
    got = data.get("kind", kind)
    if got != kind:
        raise ParseError(f"expected a {kind} file, got {got!r}")


def _label(value) -> Label:
    try:
        if isinstance(value, str):
            return Label.parse(value) if value.startswith("(") else Label.of(value)
        return Label.of(*value)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad label {value!r}: {exc}") from exc


def _int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise ParseError(f"{what} must be a list of integers")
    return list(value)


# -- posets -------------------------------------------------------------------

def poset_to_dict(P: Poset) -> dict:
    elements = []
    for i, lab in enumerate(P.labels):
        entry: dict[str, Any] = {"id": i, "label": lab.to_json()}
        if i in P.aliases:
            entry["aliases"] = [a.to_json() for a in P.aliases[i]]
        elements.append(entry)
    return {"kind": "poset", "elements": elements, "covers": [list(c) for c in cover_relation(P)]}


def poset_from_dict(data: dict) -> Poset:
    _expect(data, "poset")
    try:
        elements = data["elements"]
        covers = data["covers"]
    except KeyError as exc:
        raise ParseError(f"poset file lacks {exc}") from exc
    ids = [e.get("id") for e in elements]
    if ids != list(range(len(elements))):
        raise ParseError("element ids must be 0..n-1 in order")
    labels = [_label(e["label"]) for e in elements]
    aliases = {e["id"]: [_label(a) for a in e["aliases"]] for e in elements if e.get("aliases")}
    pairs = []
    for c in covers:
        c = _int_list(c, "cover pair")
        if len(c) != 2:
            raise ParseError("cover pairs have two entries")
        pairs.append((c[0], c[1]))
    return poset_from_covers(labels, pairs, aliases or None)


def dump_poset(P: Poset) -> str:
    return dumps(poset_to_dict(P))


def load_poset(path) -> Poset:
    return poset_from_dict(read(path))


# -- realizers ------------------------------------------------------------------

def realizer_to_dict(orders) -> dict:
    return {"kind": "realizer", "orders": [list(map(int, o)) for o in orders]}


def local_realizer_to_dict(ples) -> dict:
    return {"kind": "local_realizer", "ples": [list(map(int, p)) for p in ples]}


def boolean_realizer_to_dict(B: BooleanRealizer) -> dict:
    return {"kind": "boolean_realizer", "orders": [list(o) for o in B.orders], "tau_ones": sorted(B.tau_ones)}


def realizer_from_dict(data: dict) -> list[list[int]]:
    _expect(data, "realizer")
    return [_int_list(o, "order") for o in data.get("orders", [])]


def local_realizer_from_dict(data: dict) -> list[list[int]]:
    _expect(data, "local_realizer")
    return [_int_list(p, "ple") for p in data.get("ples", [])]


def boolean_realizer_from_dict(data: dict) -> BooleanRealizer:
    _expect(data, "boolean_realizer")
    orders = tuple(tuple(_int_list(o, "order")) for o in data.get("orders", []))
    try:
        return BooleanRealizer(orders, frozenset(data.get("tau_ones", [])))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


# -- grids, boxes, tree decompositions ---------------------------------------------

def grid_to_dict(g: GridColoring) -> dict:
    return {"kind": "grid", "axes": [len(a) for a in g.axes], "colors": [int(c) for c in g.colors.ravel()]}


def grid_from_dict(data: dict) -> GridColoring:
    _expect(data, "grid")
    sizes = _int_list(data.get("axes"), "axes")
    colors = _int_list(data.get("colors"), "colors")
    if not sizes or int(np.prod(sizes)) != len(colors):
        raise ParseError("colors must list one entry per cell")
    try:
        return GridColoring.from_sizes(sizes, colors, data.get("r"))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def box_to_dict(box: MonoBox | SizeInsufficient) -> dict:
    if isinstance(box, MonoBox):
        return {"kind": "mono_box", "color": box.color, "subsets": [list(s) for s in box.subsets]}
    return {"kind": "size_insufficient", "stage": box.stage, "required": box.required}


def td_to_dict(td: TreeDecomposition) -> dict:
    return {"kind": "tree_decomposition", "bags": [sorted(b) for b in td.bags], "edges": [list(e) for e in td.edges]}


def td_from_dict(data: dict) -> TreeDecomposition:
    _expect(data, "tree_decomposition")
    bags = [frozenset(_int_list(b, "bag")) for b in data.get("bags", [])]
    edges = []
    for e in data.get("edges", []):
        e = _int_list(e, "tree edge")
        if len(e) != 2:
            raise ParseError("tree edges have two entries")
        edges.append((e[0], e[1]))
    return TreeDecomposition(bags, edges)


def load_any(path) -> tuple[str, Any]:
    """(kind, parsed object) for any file written by this package."""
    data = read(path)
    kind = data.get("kind")
    parsers = {
        "poset": poset_from_dict,
        "realizer": realizer_from_dict,
        "local_realizer": local_realizer_from_dict,
        "boolean_realizer": boolean_realizer_from_dict,
        "grid": grid_from_dict,
        "tree_decomposition": td_from_dict,
    }
    if kind not in parsers:
        raise ParseError(f"unknown file kind {kind!r}")
    try:
        return kind, parsers[kind](data)
    except OrdimError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind} file: {exc}") from exc


def to_dot(P: Poset) -> str:
    """Cover graph as DOT text, drawn bottom to top with one rank per height."""
    lines = ["digraph poset {", "  rankdir=BT;", "  node [shape=plaintext];"]
    for i, lab in enumerate(P.labels):
        lines.append(f'  {i} [label="{lab}"];')
    ranks: dict[int, list[int]] = {}
    for i, r in enumerate(rank_by_height(P)):
        ranks.setdefault(r, []).append(i)
    for r in sorted(ranks):
        lines.append("  { rank=same; " + " ".join(f"{i};" for i in ranks[r]) + " }")
    for u, v in cover_relation(P):
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
