"""JSON mesh files.

Layout::

    {"vertices": [[x, y], ...],
     "curves":   [{"id": "boundary", "kind": "circle-arc", ...params}, ...],
     "edges":    [{"v": [i, j], "curve": id or null, "t": [t0, t1] or null}, ...],
     "elements": [{"edges": [+-(edge_id + 1), ...], "kappa": 1.0}, ...]}

A negative edge reference means the element traverses that edge from its
second vertex to its first.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .curves import curve_from_dict
from .mesh import Edge, Element, Mesh

_NUMBER_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges", "elements"],
    "properties": {
        "vertices": {"type": "array", "items": _NUMBER_PAIR},
        "curves": {
            "type": "array",
            "items": {"type": "object", "required": ["id", "kind"],
                      "properties": {"id": {"type": "string"}, "kind": {"type": "string"}}},
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["v"],
                "properties": {
                    "v": {"type": "array", "items": {"type": "integer", "minimum": 0},
                          "minItems": 2, "maxItems": 2},
                    "curve": {"type": ["string", "null"]},
                    "t": {"oneOf": [_NUMBER_PAIR, {"type": "null"}]},
                },
            },
        },
        "elements": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["edges"],
                "properties": {
                    "edges": {"type": "array", "items": {"type": "integer"}, "minItems": 2},
                    "kappa": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
    },
}


class MeshParseError(ValueError):
    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def mesh_to_dict(mesh: Mesh) -> dict:
    curves = [{"id": cid, **c.to_dict()} for cid, c in mesh.curves.items()]
    edges = [{"v": list(e.v), "curve": e.curve, "t": None if e.t is None else list(e.t)}
             for e in mesh.edges]
    elements = [{"edges": list(el.edges), "kappa": el.kappa} for el in mesh.elements]
    return {"vertices": mesh.vertices.tolist(), "curves": curves,
            "edges": edges, "elements": elements}


def mesh_from_dict(data: dict) -> Mesh:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise MeshParseError(_pointer(exc.absolute_path), exc.message) from None

    curves = {}
    for i, c in enumerate(data.get("curves", [])):
        if c["id"] in curves:
            raise MeshParseError(f"/curves/{i}/id", f"duplicate curve id {c['id']!r}")
        try:
            curves[c["id"]] = curve_from_dict(c)
        except (TypeError, ValueError) as exc:
            raise MeshParseError(f"/curves/{i}", str(exc)) from None

    nv = len(data["vertices"])
    edges = []
    for i, e in enumerate(data["edges"]):
        if max(e["v"]) >= nv:
            raise MeshParseError(f"/edges/{i}/v", "vertex index out of range")
        cid = e.get("curve")
        t = e.get("t")
        if cid is not None and cid not in curves:
            raise MeshParseError(f"/edges/{i}/curve", f"unknown curve id {cid!r}")
        if cid is not None and t is None:
            raise MeshParseError(f"/edges/{i}/t", "curved edge needs a parameter interval")
        edges.append(Edge(tuple(e["v"]), cid, None if cid is None else tuple(map(float, t))))

    ne = len(edges)
    elements = []
    for i, el in enumerate(data["elements"]):
        for j, ref in enumerate(el["edges"]):
            if ref == 0 or abs(ref) > ne:
                raise MeshParseError(f"/elements/{i}/edges/{j}", "edge reference out of range")
        elements.append(Element(tuple(el["edges"]), float(el.get("kappa", 1.0))))
    return Mesh(data["vertices"], edges, elements, curves)


def mesh_write(mesh: Mesh, path) -> None:
    Path(path).write_text(json.dumps(mesh_to_dict(mesh)) + "\n")


def mesh_read(path) -> Mesh:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MeshParseError("", f"invalid JSON: {exc}") from None
    return mesh_from_dict(data)
