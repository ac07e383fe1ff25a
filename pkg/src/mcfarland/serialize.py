"""JSON formats for groups, element sets, building-set families and difference sets.

Elements are exponent tuples, subgroups are ``{"generators": [...]}`` and
groups are descriptor strings such as ``"Z4xZ2^5"``.
"""

from __future__ import annotations

import json
from typing import Any

from .designs import BuildingSetFamily
from .errors import InvalidArgument
from .groups import ElementSet, FinAbGroup, Subgroup, make_group

__all__ = [
    "dumps",
    "elements_to_json",
    "elements_from_json",
    "subgroup_to_json",
    "subgroup_from_json",
    "family_to_json",
    "family_from_json",
    "dset_to_json",
    "dset_from_json",
    "load_any",
]


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def elements_to_json(es: ElementSet) -> list[list[int]]:
    return [list(t) for t in es.tuples()]


def elements_from_json(group: FinAbGroup, data: list) -> ElementSet:
    try:
        idx = sorted({group.index(tuple(int(x) for x in t)) for t in data})
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"bad element list: {exc}") from exc
    if len(idx) != len(data):
        raise InvalidArgument("element list has repeated entries")
    return ElementSet(group, tuple(idx))


def subgroup_to_json(sub: Subgroup) -> dict:
    return {"generators": [list(g) for g in sub.generator_tuples()]}


def subgroup_from_json(group: FinAbGroup, data: dict) -> Subgroup:
    if not isinstance(data, dict) or "generators" not in data:
        raise InvalidArgument("subgroup must be an object with 'generators'")
    return group.subgroup([tuple(int(x) for x in g) for g in data["generators"]])


def family_to_json(fam: BuildingSetFamily) -> dict:
    return {
        "kind": "building-sets",
        "group": fam.G2.descriptor,
        "m": fam.m,
        "N": subgroup_to_json(fam.N),
        "blocks": [elements_to_json(b) for b in fam.blocks],
        "provenance": fam.provenance,
    }


def family_from_json(data: dict) -> BuildingSetFamily:
    try:
        group = make_group(data["group"])
        N = subgroup_from_json(group, data["N"])
        blocks = tuple(elements_from_json(group, b) for b in data["blocks"])
    except KeyError as exc:
        raise InvalidArgument(f"building-set JSON lacks {exc}") from exc
    m = int(data.get("m", N.order.bit_length() - 1))
    return BuildingSetFamily(group, N, blocks, m, dict(data.get("provenance", {})))


def dset_to_json(d: ElementSet, provenance: dict | None = None) -> dict:
    out = {"kind": "difference-set", "group": d.parent.descriptor, "elements": elements_to_json(d)}
    if provenance:
        out["provenance"] = provenance
    return out


def dset_from_json(data: dict) -> ElementSet:
    try:
        group = make_group(data["group"])
        return elements_from_json(group, data["elements"])
    except KeyError as exc:
        raise InvalidArgument(f"difference-set JSON lacks {exc}") from exc


def load_any(data: dict) -> BuildingSetFamily | ElementSet:
    """Dispatch on the ``kind`` field (or on the keys present)."""
    if not isinstance(data, dict):
        raise InvalidArgument("expected a JSON object")
    kind = data.get("kind")
    if kind == "building-sets" or (kind is None and "blocks" in data):
        return family_from_json(data)
    if kind == "difference-set" or (kind is None and "elements" in data):
        return dset_from_json(data)
    raise InvalidArgument(f"unrecognized JSON object (kind={kind!r})")
