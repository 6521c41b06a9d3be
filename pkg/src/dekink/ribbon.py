"""Dart-based ribbon graphs: a graph plus a clockwise rotation of darts at
each vertex.

Darts are the primitive objects; an edge is an unordered pair of darts
(the involution), and a vertex owns the darts attached to it.  The stored
rotation tuple at a vertex lists its darts in clockwise order, and the two
turn operators step along that cyclic order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import InputError


class Sign(enum.Enum):
    """A turn sign: ``+`` steps to the clockwise successor, ``-`` to the
    predecessor."""

    PLUS = "+"
    MINUS = "-"

    def flipped(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS

    def __str__(self) -> str:
        return self.value

    @staticmethod
    def parse(text: str) -> "Sign":
        if text == "+":
            return Sign.PLUS
        if text == "-":
            return Sign.MINUS
        raise InputError(f"not a sign: {text!r}")


@dataclass(frozen=True)
class Dart:
    """Half of an edge, attached to a single vertex."""

    id: int
    vertex: str
    edge: str


@dataclass(frozen=True)
class Diagnostic:
    """One violated invariant, with the ids involved."""

    code: str
    message: str
    subject: str = ""

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "subject": self.subject}


class RibbonGraph:
    """Immutable graph with a rotation system.

    ``involution`` pairs dart ids into edges and ``rotation`` maps each
    vertex to the clockwise cyclic order of its dart ids.  Loops (both
    darts of an edge at one vertex) are representable; leafy dual graphs
    never contain them but plain dual graphs do.
    """

    __slots__ = (
        "_darts",
        "_involution",
        "_rotation",
        "_vertices",
        "_edge_darts",
        "_edge_ends",
        "_vertex_index",
        "_turn_table",
    )

    def __init__(
        self,
        darts: Iterable[Dart],
        involution: Mapping[int, int],
        rotation: Mapping[str, Sequence[int]],
    ):
        self._darts = {d.id: d for d in darts}
        self._involution = dict(involution)
        self._rotation = {v: tuple(ids) for v, ids in rotation.items()}
        self._vertices = tuple(sorted(self._rotation))
        self._edge_darts: dict[str, tuple[int, ...]] = {}
        for d in self._darts.values():
            self._edge_darts.setdefault(d.edge, ())
            self._edge_darts[d.edge] += (d.id,)
        self._edge_ends: dict[str, tuple[str, ...]] = {
            e: tuple(self._darts[i].vertex for i in ids)
            for e, ids in self._edge_darts.items()
        }
        self._vertex_index = {
            v: {i: pos for pos, i in enumerate(ids)} for v, ids in self._rotation.items()
        }
        self._turn_table: dict[tuple[str, str], tuple[str, str]] | None = None

    @staticmethod
    def build(
        edge_ends: Mapping[str, tuple[str, str]],
        rotation: Mapping[str, Sequence[tuple[str, int]]],
    ) -> "RibbonGraph":
        """Assemble a graph from edge endpoint pairs and per-vertex rotations.

        Rotation entries are ``(edge, side)`` pairs, where ``side`` indexes
        into ``edge_ends[edge]``; this disambiguates loops.
        """
        darts = []
        ids: dict[tuple[str, int], int] = {}
        for edge in sorted(edge_ends):
            u, v = edge_ends[edge]
            for side, vertex in ((0, u), (1, v)):
                ids[(edge, side)] = len(darts)
                darts.append(Dart(len(darts), vertex, edge))
        involution = {}
        for edge in edge_ends:
            a, b = ids[(edge, 0)], ids[(edge, 1)]
            involution[a] = b
            involution[b] = a
        rot = {}
        for vertex, entries in rotation.items():
            try:
                rot[vertex] = tuple(ids[entry] for entry in entries)
            except KeyError as exc:
                raise InputError(f"rotation at {vertex} references unknown dart {exc}")
        return RibbonGraph(darts, involution, rot)

    # -- basic queries ----------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[str, ...]:
        return tuple(sorted(self._edge_darts))

    def has_vertex(self, v: str) -> bool:
        return v in self._rotation

    def has_edge(self, e: str) -> bool:
        return e in self._edge_darts

    def edge_ends(self, e: str) -> tuple[str, str]:
        ends = self._edge_ends.get(e)
        if ends is None or len(ends) != 2:
            raise InputError(f"unknown edge: {e}")
        return ends  # type: ignore[return-value]

    def dart(self, i: int) -> Dart:
        return self._darts[i]

    def dart_side(self, i: int) -> int:
        """0 or 1: this dart's position among its edge's two darts."""
        return self._edge_darts[self._darts[i].edge].index(i)

    def rotation_table(self) -> dict[str, tuple[tuple[str, int], ...]]:
        """Rotations as ``(edge, side)`` pairs, a dart-id-free description."""
        return {
            v: tuple((self._darts[i].edge, self.dart_side(i)) for i in cycle)
            for v, cycle in self._rotation.items()
        }

    def darts_at(self, v: str) -> tuple[Dart, ...]:
        if v not in self._rotation:
            raise InputError(f"unknown vertex: {v}")
        return tuple(self._darts[i] for i in self._rotation[v])

    def edges_at(self, v: str) -> tuple[str, ...]:
        return tuple(d.edge for d in self.darts_at(v))

    def valency(self, v: str) -> int:
        if v not in self._rotation:
            raise InputError(f"unknown vertex: {v}")
        return len(self._rotation[v])

    def other_end(self, e: str, v: str) -> str:
        u, w = self.edge_ends(e)
        if v == u:
            return w
        if v == w:
            return u
        raise InputError(f"edge {e} is not incident to {v}")

    def is_loop(self, e: str) -> bool:
        u, w = self.edge_ends(e)
        return u == w

    def is_loop_free(self) -> bool:
        return not any(self.is_loop(e) for e in self._edge_darts)

    # -- turn operators ----------------------------------------------------

    def turn_dart(self, dart_id: int, sign: Sign) -> Dart:
        d = self._darts[dart_id]
        cycle = self._rotation[d.vertex]
        pos = self._vertex_index[d.vertex][dart_id]
        step = 1 if sign is Sign.PLUS else -1
        return self._darts[cycle[(pos + step) % len(cycle)]]

    def turn(self, e: str, u: str, sign: Sign) -> str:
        """The edge at ``u`` preceded (``+``) or followed (``-``) by ``e``
        in the clockwise rotation.  ``u`` must be trivalent."""
        if self.valency(u) != 3:
            raise InputError(f"turn requires a trivalent vertex, {u} has valency {self.valency(u)}")
        if self._turn_table is None:
            self._build_turn_table()
        entry = self._turn_table.get((e, u))
        if entry is None:
            hits = [d for d in self.darts_at(u) if d.edge == e]
            if len(hits) > 1:
                raise InputError(f"edge {e} is a loop at {u}; turn is ambiguous")
            raise InputError(f"edge {e} is not incident to {u}")
        return entry[0] if sign is Sign.PLUS else entry[1]

    def _build_turn_table(self) -> None:
        # only unambiguous (non-loop) edges at trivalent vertices
        table: dict[tuple[str, str], tuple[str, str]] = {}
        for v, cycle in self._rotation.items():
            if len(cycle) != 3:
                continue
            edges = [self._darts[i].edge for i in cycle]
            for pos, e in enumerate(edges):
                if edges.count(e) > 1:
                    continue
                table[(e, v)] = (edges[(pos + 1) % 3], edges[(pos - 1) % 3])
        self._turn_table = table


def validate(g: RibbonGraph) -> list[Diagnostic]:
    """Check the ribbon-graph invariants; an empty list means all hold."""
    out: list[Diagnostic] = []
    inv = g._involution
    for i, j in inv.items():
        if i == j:
            out.append(Diagnostic("involution-fixed-point", "involution has fixed point", f"dart {i}"))
        elif inv.get(j) != i:
            out.append(Diagnostic("involution-not-involutive", "involution is not an involution", f"dart {i}"))
    for i in g._darts:
        if i not in inv:
            out.append(Diagnostic("involution-missing", "dart has no partner", f"dart {i}"))
    seen: dict[int, str] = {}
    for v in g.vertices:
        cycle = g._rotation[v]
        if not cycle:
            out.append(Diagnostic("empty-vertex", "vertex has no darts", f"vertex {v}"))
        for i in cycle:
            d = g._darts.get(i)
            if d is None:
                out.append(Diagnostic("rotation-unknown-dart", "rotation references unknown dart", f"vertex {v}, dart {i}"))
                continue
            if d.vertex != v:
                out.append(Diagnostic("rotation-foreign-dart", "rotation contains a dart of another vertex", f"vertex {v}, dart {i}"))
            if i in seen:
                out.append(Diagnostic("rotation-duplicate-dart", "dart appears twice in rotations", f"dart {i}"))
            seen[i] = v
    for i, d in g._darts.items():
        if i not in seen:
            out.append(Diagnostic("rotation-missing-dart", "dart missing from its vertex rotation", f"dart {i}"))
    for e, ids in g._edge_darts.items():
        if len(ids) != 2:
            out.append(Diagnostic("edge-dart-count", "edge does not have exactly two darts", f"edge {e}"))
        elif inv.get(ids[0]) != ids[1]:
            out.append(Diagnostic("edge-involution-mismatch", "edge darts are not involution partners", f"edge {e}"))
    return out
