"""File formats: triangulation documents, flip scripts, walk queries.

A triangulation document is JSON with ``arcs``, ``boundary_segments`` and
``triangles``; ordinary triangles list their three sides clockwise,
referencing arcs by bare label and boundary segments as ``bd:<label>``.
A flip script is a JSON array of ``{"kind": "standard"|"double",
"target": <label>}`` objects.  Walks are whitespace-separated edge ids in
the shared naming scheme, with the start vertex given separately.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import ParseError
from .flips import DOUBLE, STANDARD, FlipMove
from .triangulation import (
    ARC,
    BOUNDARY,
    OrdinaryTriangle,
    SelfFoldedTriangle,
    Triangulation,
)
from .walks import Walk

BD_PREFIX = "bd:"


def _side_from_text(text: str) -> tuple[str, str]:
    if not isinstance(text, str) or not text:
        raise ParseError(f"bad side reference: {text!r}")
    if text.startswith(BD_PREFIX):
        return (BOUNDARY, text[len(BD_PREFIX) :])
    return (ARC, text)


def _side_to_text(side: tuple[str, str]) -> str:
    kind, label = side
    return f"{BD_PREFIX}{label}" if kind == BOUNDARY else label


def triangulation_from_dict(data: Any) -> Triangulation:
    if not isinstance(data, dict):
        raise ParseError("document root must be an object")
    try:
        arcs = list(data["arcs"])
        segments = list(data["boundary_segments"])
        raw_triangles = list(data["triangles"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field: {exc}")
    for coll, what in ((arcs, "arc"), (segments, "boundary segment")):
        if len(set(coll)) != len(coll):
            raise ParseError(f"duplicate {what} label")
        if not all(isinstance(x, str) and x for x in coll):
            raise ParseError(f"{what} labels must be non-empty strings")
    triangles = []
    for entry in raw_triangles:
        if not isinstance(entry, dict) or "name" not in entry:
            raise ParseError(f"malformed triangle entry: {entry!r}")
        name = entry["name"]
        if not isinstance(name, str) or not name:
            raise ParseError("triangle names must be non-empty strings")
        if "self_folded" in entry:
            sf = entry["self_folded"]
            try:
                triangles.append(SelfFoldedTriangle(name, sf["loop"], sf["radius"]))
            except (KeyError, TypeError):
                raise ParseError(f"malformed self-folded triangle: {entry!r}")
        elif "sides" in entry:
            sides = entry["sides"]
            if not isinstance(sides, list) or len(sides) != 3:
                raise ParseError(f"triangle {name} must list exactly three sides")
            triangles.append(
                OrdinaryTriangle(name, tuple(_side_from_text(s) for s in sides))
            )
        else:
            raise ParseError(f"triangle {name} needs 'sides' or 'self_folded'")
    return Triangulation(frozenset(arcs), frozenset(segments), tuple(triangles))


def triangulation_to_dict(t: Triangulation) -> dict:
    triangles: list[dict] = []
    for tri in t.triangles:
        if tri.self_folded:
            triangles.append(
                {"name": tri.name, "self_folded": {"loop": tri.loop, "radius": tri.radius}}
            )
        else:
            triangles.append(
                {"name": tri.name, "sides": [_side_to_text(s) for s in tri.sides]}
            )
    return {
        "arcs": sorted(t.arcs),
        "boundary_segments": sorted(t.boundary_segments),
        "triangles": triangles,
    }


def load_triangulation(path: str) -> Triangulation:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}")
    return triangulation_from_dict(data)


def flip_script_from_data(data: Any) -> list[FlipMove]:
    if not isinstance(data, list):
        raise ParseError("flip script must be a JSON array")
    moves = []
    for entry in data:
        if not isinstance(entry, dict) or set(entry) != {"kind", "target"}:
            raise ParseError(f"malformed move: {entry!r}")
        if entry["kind"] not in (STANDARD, DOUBLE):
            raise ParseError(f"unknown move kind: {entry['kind']!r}")
        moves.append(FlipMove(entry["kind"], entry["target"]))
    return moves


def load_flip_script(path: str) -> list[FlipMove]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path}: {exc}")
    return flip_script_from_data(data)


EDGE_PREFIXES = ("a:", "b:", "eta1:", "eta2:", "leaf:")
VERTEX_PREFIXES = ("t:", "s:", "w:", "z:")


def parse_walk_query(start: str, edge_text: str) -> Walk:
    """Build a walk from the CLI grammar: a start vertex id and
    whitespace-separated edge ids."""
    if not any(start.startswith(p) for p in VERTEX_PREFIXES):
        raise ParseError(f"bad vertex id: {start!r} (expected t:/s:/w:/z: prefix)")
    edges = tuple(edge_text.split())
    for e in edges:
        if not any(e.startswith(p) for p in EDGE_PREFIXES):
            raise ParseError(f"bad edge id: {e!r} (expected a:/b:/eta1:/eta2:/leaf: prefix)")
    return Walk(start, edges)


def format_walk(walk: Walk) -> str:
    return " ".join((walk.start,) + walk.edges)
