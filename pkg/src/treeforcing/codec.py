"""File formats: conditions, matched pairs, and DOT export.

Documents are JSON with a fixed field order and sorted contents, so encoding
is canonical: encode(decode(text)) == text for canonical files and
decode(encode(value)) == value always.  Ordinals travel as grammar strings.
"""

from __future__ import annotations

import json
from typing import Any

from .forcing import Condition, MatchedPair
from .ordinals import Ordinal, OrdinalParseError, parse_ordinal
from .separation import RhoOracle
from .treemaps import TreeMap
from .trees import StandardTree


class CodecError(ValueError):
    """The document does not match the schema."""


def _ord(field: str, value: Any) -> Ordinal:
    if not isinstance(value, str):
        raise CodecError(f"field {field!r}: expected an ordinal string, got {value!r}")
    try:
        return parse_ordinal(value)
    except OrdinalParseError as exc:
        raise CodecError(f"field {field!r}: {exc}")


def _nat(field: str, value: Any) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise CodecError(f"field {field!r}: expected a natural number, got {value!r}")
    return value


def _pairs(field: str, value: Any) -> list[tuple[Ordinal, Ordinal]]:
    if not isinstance(value, list):
        raise CodecError(f"field {field!r}: expected a list of pairs")
    out = []
    for k, item in enumerate(value):
        if not isinstance(item, list) or len(item) != 2:
            raise CodecError(f"field {field!r}[{k}]: expected a [source, target] pair")
        out.append((_ord(f"{field}[{k}][0]", item[0]), _ord(f"{field}[{k}][1]", item[1])))
    return out


def condition_to_dict(p: Condition, rho: RhoOracle | None = None) -> dict:
    doc = {
        "nodes": [str(x) for x in sorted(p.tree.nodes)],
        "parents": [[str(c), str(par)] for c, par in sorted(p.tree.parent.items())],
        "indices": sorted(p.family),
        "maps": {
            str(tau): [[str(a), str(b)] for a, b in p.family[tau].pairs]
            for tau in sorted(p.family)
        },
        "rho": [[i, j, str(v)] for i, j, v in (rho.entries() if rho else [])],
    }
    return doc


def condition_from_dict(doc: Any) -> tuple[Condition, RhoOracle]:
    if not isinstance(doc, dict):
        raise CodecError("document root must be an object")
    for field in ("nodes", "parents", "indices", "maps"):
        if field not in doc:
            raise CodecError(f"missing field {field!r}")
    nodes = [_ord(f"nodes[{k}]", v) for k, v in enumerate(doc["nodes"])]
    if len(set(nodes)) != len(nodes):
        raise CodecError("field 'nodes': duplicate node")
    parent = {}
    for k, (c, par) in enumerate(_pairs("parents", doc["parents"])):
        if c in parent:
            raise CodecError(f"field 'parents'[{k}]: duplicate child {c}")
        parent[c] = par
    indices = [_nat(f"indices[{k}]", v) for k, v in enumerate(doc["indices"])]
    if len(set(indices)) != len(indices):
        raise CodecError("field 'indices': duplicate index")
    maps_doc = doc["maps"]
    if not isinstance(maps_doc, dict):
        raise CodecError("field 'maps': expected an object")
    family = {}
    for key, value in maps_doc.items():
        try:
            tau = int(key)
        except ValueError:
            raise CodecError(f"field 'maps': key {key!r} is not an index")
        if tau not in indices:
            raise CodecError(f"field 'maps': index {tau} not declared")
        try:
            family[tau] = TreeMap(_pairs(f"maps[{key}]", value))
        except ValueError as exc:
            raise CodecError(f"field 'maps[{key}]': {exc}")
    for tau in indices:
        family.setdefault(tau, TreeMap())
    entries = []
    for k, item in enumerate(doc.get("rho", [])):
        if not isinstance(item, list) or len(item) != 3:
            raise CodecError(f"field 'rho'[{k}]: expected [i, j, ordinal]")
        entries.append(
            (_nat(f"rho[{k}][0]", item[0]), _nat(f"rho[{k}][1]", item[1]), _ord(f"rho[{k}][2]", item[2]))
        )
    try:
        rho = RhoOracle.from_entries(entries)
    except ValueError as exc:
        raise CodecError(f"field 'rho': {exc}")
    return Condition(StandardTree(frozenset(nodes), parent), family), rho


def encode_condition(p: Condition, rho: RhoOracle | None = None) -> str:
    return json.dumps(condition_to_dict(p, rho), indent=2) + "\n"


def decode_condition(text: str) -> tuple[Condition, RhoOracle]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodecError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}")
    return condition_from_dict(doc)


def encode_matched_pair(mp: MatchedPair, rho: RhoOracle | None = None) -> str:
    doc = {
        "alpha": str(mp.alpha),
        "beta": str(mp.beta),
        "first": condition_to_dict(mp.pa),
        "second": condition_to_dict(mp.pb),
        "common_nodes": [str(x) for x in sorted(mp.common_tree.nodes)],
        "shared_indices": sorted(mp.shared),
        "node_matching": [[str(a), str(b)] for a, b in sorted(mp.iso_f.items())],
        "index_matching": [[i, j] for i, j in sorted(mp.iso_g.items())],
        "anchor_first": str(mp.anchor_a),
        "anchor_second": str(mp.anchor_b),
        "rho": [[i, j, str(v)] for i, j, v in (rho.entries() if rho else [])],
    }
    return json.dumps(doc, indent=2) + "\n"


def decode_matched_pair(text: str) -> tuple[MatchedPair, RhoOracle]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodecError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(doc, dict):
        raise CodecError("document root must be an object")
    for field in (
        "alpha",
        "beta",
        "first",
        "second",
        "common_nodes",
        "shared_indices",
        "node_matching",
        "index_matching",
        "anchor_first",
        "anchor_second",
    ):
        if field not in doc:
            raise CodecError(f"missing field {field!r}")
    pa, _ = condition_from_dict(doc["first"])
    pb, _ = condition_from_dict(doc["second"])
    common_nodes = frozenset(
        _ord(f"common_nodes[{k}]", v) for k, v in enumerate(doc["common_nodes"])
    )
    common = StandardTree(
        common_nodes, {c: p for c, p in pa.tree.parent.items() if c in common_nodes}
    )
    iso_f = dict(_pairs("node_matching", doc["node_matching"]))
    iso_g = {}
    for k, item in enumerate(doc["index_matching"]):
        if not isinstance(item, list) or len(item) != 2:
            raise CodecError(f"field 'index_matching'[{k}]: expected [i, j]")
        iso_g[_nat(f"index_matching[{k}][0]", item[0])] = _nat(
            f"index_matching[{k}][1]", item[1]
        )
    entries = []
    for k, item in enumerate(doc.get("rho", [])):
        if not isinstance(item, list) or len(item) != 3:
            raise CodecError(f"field 'rho'[{k}]: expected [i, j, ordinal]")
        entries.append(
            (_nat(f"rho[{k}][0]", item[0]), _nat(f"rho[{k}][1]", item[1]), _ord(f"rho[{k}][2]", item[2]))
        )
    mp = MatchedPair(
        pa=pa,
        pb=pb,
        alpha=_ord("alpha", doc["alpha"]),
        beta=_ord("beta", doc["beta"]),
        common_tree=common,
        shared=frozenset(_nat(f"shared_indices[{k}]", v) for k, v in enumerate(doc["shared_indices"])),
        iso_f=iso_f,
        iso_g=iso_g,
        anchor_a=_ord("anchor_first", doc["anchor_first"]),
        anchor_b=_ord("anchor_second", doc["anchor_second"]),
    )
    return mp, RhoOracle.from_entries(entries)


def export_dot(p: Condition) -> str:
    """A deterministic DOT digraph: solid tree edges, dashed labelled map edges,
    one rank per level."""
    lines = ["digraph condition {", "  rankdir=BT;", '  node [shape=box, fontname="monospace"];']
    levels = [p.tree.level(h) for h in (p.tree.heights())]
    lines.append('  { rank=same; "0"; }')
    for level in levels:
        names = "; ".join(f'"{x}"' for x in sorted(level))
        lines.append(f"  {{ rank=same; {names}; }}")
    for c, par in sorted(p.tree.parent.items()):
        lines.append(f'  "{par}" -> "{c}" [style=solid];')
    for tau in sorted(p.family):
        for a, b in p.family[tau].pairs:
            if a == b:
                continue  # the structural root pair would only draw a self-loop
            lines.append(f'  "{a}" -> "{b}" [style=dashed, label="{tau}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
