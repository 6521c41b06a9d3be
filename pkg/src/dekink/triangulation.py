"""Signature-zero ideal triangulations and their (leafy) dual graphs.

A triangulation is a list of labeled triangles whose sides reference arcs
and boundary segments.  Ordinary triangles carry their three sides in the
clockwise order induced by the surface orientation; a self-folded triangle
is given by its loop arc and radius arc and encloses exactly one puncture.

The dual graph has one vertex per triangle and per boundary segment, one
edge per arc and per boundary segment.  The leafy dual graph additionally
splits the loop at each self-folded triangle ``v`` into two parallel edges
``eta1:v``/``eta2:v`` through a new trivalent vertex ``w:v`` that carries a
leaf ``leaf:v`` ending at the valency-one vertex ``z:v``.

Naming scheme (shared with the CLI): vertices ``t:<tri>``, ``s:<seg>``,
``w:<tri>``, ``z:<tri>``; edges ``a:<arc>``, ``b:<seg>``, ``eta1:<tri>``,
``eta2:<tri>``, ``leaf:<tri>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import InputError
from .ribbon import Diagnostic, RibbonGraph

ARC = "arc"
BOUNDARY = "bd"

SideRef = tuple[str, str]  # (ARC | BOUNDARY, label)


@dataclass(frozen=True)
class OrdinaryTriangle:
    name: str
    sides: tuple[SideRef, SideRef, SideRef]  # clockwise

    @property
    def self_folded(self) -> bool:
        return False


@dataclass(frozen=True)
class SelfFoldedTriangle:
    name: str
    loop: str
    radius: str

    @property
    def self_folded(self) -> bool:
        return True

    @property
    def sides(self) -> tuple[SideRef, SideRef, SideRef]:
        return ((ARC, self.loop), (ARC, self.radius), (ARC, self.radius))


Triangle = Union[OrdinaryTriangle, SelfFoldedTriangle]


@dataclass(frozen=True)
class Triangulation:
    arcs: frozenset[str]
    boundary_segments: frozenset[str]
    triangles: tuple[Triangle, ...]

    def triangle(self, name: str) -> Triangle:
        for tri in self.triangles:
            if tri.name == name:
                return tri
        raise InputError(f"unknown triangle: {name}")

    @property
    def self_folded_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.triangles if t.self_folded)


def arc_slots(t: Triangulation, arc: str) -> list[tuple[str, int]]:
    """All (triangle name, side position) slots where ``arc`` occurs."""
    out = []
    for tri in t.triangles:
        for pos, (kind, label) in enumerate(tri.sides):
            if kind == ARC and label == arc:
                out.append((tri.name, pos))
    return out


def _corner_classes(t: Triangulation) -> tuple[dict[tuple[str, int], int], int]:
    """Union-find of triangle corners under side gluings.

    Corner ``(T, i)`` sits between sides ``i-1`` and ``i`` of ``T``; side
    ``i`` runs from corner ``i`` to corner ``i+1`` in the clockwise order.
    Gluing two slots of one arc is orientation-reversing, so it matches
    corner ``i`` with corner ``i'+1`` and corner ``i+1`` with corner ``i'``.
    """
    corners = [(tri.name, i) for tri in t.triangles for i in range(3)]
    index = {c: n for n, c in enumerate(corners)}
    parent = list(range(len(corners)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: tuple[str, int], b: tuple[str, int]) -> None:
        ra, rb = find(index[a]), find(index[b])
        if ra != rb:
            parent[ra] = rb

    for arc in sorted(t.arcs):
        slots = arc_slots(t, arc)
        if len(slots) != 2:
            continue  # reported by the validator
        (ta, ia), (tb, ib) = slots
        union((ta, ia), (tb, (ib + 1) % 3))
        union((ta, (ia + 1) % 3), (tb, ib))
    return {c: find(index[c]) for c in corners}, len(corners)


def _boundary_sides(t: Triangulation) -> dict[str, tuple[str, int]]:
    out = {}
    for tri in t.triangles:
        for pos, (kind, label) in enumerate(tri.sides):
            if kind == BOUNDARY:
                out[label] = (tri.name, pos)
    return out


@dataclass(frozen=True)
class SurfaceSummary:
    """Topological invariants recovered from the gluing data."""

    euler_characteristic: int
    boundary_components: tuple[tuple[str, ...], ...]
    punctures: int
    marked_points: int


def surface_summary(t: Triangulation) -> SurfaceSummary:
    """Euler characteristic, boundary structure and vertex counts of the
    glued surface.  Only meaningful once the triangulation validates."""
    classes, _ = _corner_classes(t)
    puncture_tips = {
        classes[(tri.name, 2)] for tri in t.triangles if tri.self_folded
    }
    n_classes = len(set(classes.values()))
    n_edges = len(t.arcs) + len(t.boundary_segments)
    n_faces = len(t.triangles)
    chi = n_classes - n_edges + n_faces

    # Boundary components: starting from a boundary side, walk clockwise
    # around the endpoint corner through glued slots to the next boundary
    # side, until the cycle closes.
    bd = _boundary_sides(t)
    slot_arc: dict[tuple[str, int], str] = {}
    for arc in t.arcs:
        for slot in arc_slots(t, arc):
            slot_arc[slot] = arc

    def next_boundary(seg: str) -> str:
        tri_name, pos = bd[seg]
        # pivot around the corner after this side
        while True:
            pos = (pos + 1) % 3
            ref_kind, ref_label = t.triangle(tri_name).sides[pos]
            if ref_kind == BOUNDARY:
                return ref_label
            slots = arc_slots(t, ref_label)
            (other_tri, other_pos), = [s for s in slots if s != (tri_name, pos)] or [slots[0]]
            tri_name, pos = other_tri, other_pos

    components = []
    seen: set[str] = set()
    for seg in sorted(bd):
        if seg in seen:
            continue
        cycle = [seg]
        seen.add(seg)
        cur = next_boundary(seg)
        while cur != seg:
            cycle.append(cur)
            seen.add(cur)
            cur = next_boundary(cur)
        components.append(tuple(cycle))
    marked = sum(len(c) for c in components)
    return SurfaceSummary(chi, tuple(components), len(puncture_tips), marked)


def validate_signature_zero(t: Triangulation) -> list[Diagnostic]:
    """Check all Triangulation invariants; empty list means valid."""
    out: list[Diagnostic] = []
    names = [tri.name for tri in t.triangles]
    for name in sorted({n for n in names if names.count(n) > 1}):
        out.append(Diagnostic("duplicate-triangle", "triangle name appears twice", name))
    if t.arcs & t.boundary_segments:
        for label in sorted(t.arcs & t.boundary_segments):
            out.append(Diagnostic("label-clash", "label used for both an arc and a boundary segment", label))
    if not t.boundary_segments:
        out.append(Diagnostic("no-boundary", "the surface must have non-empty boundary", ""))

    radii = {tri.radius for tri in t.triangles if tri.self_folded}
    loops = {tri.loop for tri in t.triangles if tri.self_folded}
    for tri in t.triangles:
        if tri.self_folded:
            if tri.loop == tri.radius:
                out.append(Diagnostic("loop-equals-radius", "self-folded loop and radius must differ", tri.name))
            for kind, label in ((ARC, tri.loop), (ARC, tri.radius)):
                if label not in t.arcs:
                    out.append(Diagnostic("unknown-arc", "side references an undeclared arc", f"{tri.name}: {label}"))
        else:
            refs = tri.sides
            if len(set(refs)) != 3:
                out.append(Diagnostic("repeated-side", "ordinary triangle has a repeated side", tri.name))
            for kind, label in refs:
                if kind == ARC and label not in t.arcs:
                    out.append(Diagnostic("unknown-arc", "side references an undeclared arc", f"{tri.name}: {label}"))
                if kind == BOUNDARY and label not in t.boundary_segments:
                    out.append(Diagnostic("unknown-segment", "side references an undeclared boundary segment", f"{tri.name}: {label}"))
            for kind, label in refs:
                if kind == ARC and label in radii:
                    out.append(Diagnostic("radius-outside", "radius arc used outside its self-folded triangle", f"{tri.name}: {label}"))

    for arc in sorted(t.arcs):
        slots = arc_slots(t, arc)
        if len(slots) != 2:
            out.append(Diagnostic("arc-slot-count", f"arc occurs in {len(slots)} side slots, expected 2", arc))
            continue
        owners = {t.triangle(name).self_folded for name, _ in slots}
        if arc in radii:
            tris = {name for name, _ in slots}
            owner = [tri.name for tri in t.triangles if tri.self_folded and tri.radius == arc]
            if len(owner) != 1 or tris != set(owner):
                out.append(Diagnostic("radius-slots", "radius must occupy both remaining slots of its own triangle", arc))
        elif arc in loops:
            if True in owners and False not in owners:
                out.append(Diagnostic("loop-enclosure", "loop arc must also bound an ordinary triangle", arc))
    for seg in sorted(t.boundary_segments):
        n = sum(
            1
            for tri in t.triangles
            for (kind, label) in tri.sides
            if kind == BOUNDARY and label == seg
        )
        if n != 1:
            out.append(Diagnostic("segment-slot-count", f"boundary segment occurs in {n} side slots, expected 1", seg))

    if out:
        return out

    # connectivity of the dual graph
    adjacency: dict[str, set[str]] = {tri.name: set() for tri in t.triangles}
    for arc in t.arcs:
        slots = arc_slots(t, arc)
        if len(slots) == 2:
            (a, _), (b, _) = slots
            adjacency[a].add(b)
            adjacency[b].add(a)
    if t.triangles:
        stack = [t.triangles[0].name]
        reached = {t.triangles[0].name}
        while stack:
            for nxt in adjacency[stack.pop()]:
                if nxt not in reached:
                    reached.add(nxt)
                    stack.append(nxt)
        if len(reached) != len(t.triangles):
            out.append(Diagnostic("disconnected", "the dual graph is not connected", ""))
            return out

    # Signature zero: interior vertices of the glued surface are exactly
    # the self-folded radius tips (the punctures); every other corner
    # class must reach the boundary.
    classes, _ = _corner_classes(t)
    tips = {classes[(tri.name, 2)] for tri in t.triangles if tri.self_folded}
    on_boundary: set[int] = set()
    for seg, (name, pos) in _boundary_sides(t).items():
        on_boundary.add(classes[(name, pos)])
        on_boundary.add(classes[(name, (pos + 1) % 3)])
    for tri in t.triangles:
        for i in range(3):
            c = classes[(tri.name, i)]
            if c in tips and c in on_boundary:
                out.append(Diagnostic("puncture-on-boundary", "a puncture class touches the boundary", tri.name))
            if c not in tips and c not in on_boundary:
                out.append(
                    Diagnostic(
                        "interior-marked-point",
                        "an interior vertex is not enclosed by a self-folded triangle",
                        f"{tri.name} corner {i}",
                    )
                )
    # deduplicate (several corners may witness one bad class)
    unique: list[Diagnostic] = []
    for d in out:
        if d not in unique:
            unique.append(d)
    return unique


def _require_valid(t: Triangulation) -> None:
    problems = validate_signature_zero(t)
    if problems:
        raise InputError(
            "invalid signature-zero triangulation: "
            + "; ".join(f"{d.code}({d.subject})" for d in problems[:5])
        )


EdgeKind = tuple  # ("arc", label) | ("bd", label) | ("eta", tri, 1|2) | ("leaf", tri)
VertexKind = tuple  # ("tri", name) | ("seg", label) | ("w", name) | ("z", name)


@dataclass(frozen=True)
class DualGraph:
    graph: RibbonGraph
    edge_kind: dict[str, EdgeKind] = field(compare=False)
    vertex_kind: dict[str, VertexKind] = field(compare=False)


@dataclass(frozen=True)
class LeafyDualGraph:
    graph: RibbonGraph
    edge_kind: dict[str, EdgeKind] = field(compare=False)
    vertex_kind: dict[str, VertexKind] = field(compare=False)

    def eta_edges(self, tri: str) -> tuple[str, str]:
        return (f"eta1:{tri}", f"eta2:{tri}")

    @property
    def segment_vertices(self) -> tuple[str, ...]:
        return tuple(v for v, k in sorted(self.vertex_kind.items()) if k[0] == "seg")

    @property
    def self_folded_vertices(self) -> tuple[str, ...]:
        return tuple(
            v
            for v, k in sorted(self.vertex_kind.items())
            if k[0] == "tri" and f"eta1:{k[1]}" in self.edge_kind
        )


def _slot_edge_name(t: Triangulation, tri: Triangle, pos: int) -> tuple[str, int]:
    """Edge id crossed by side ``pos`` of ``tri`` and which end belongs here."""
    kind, label = tri.sides[pos]
    if kind == BOUNDARY:
        return f"b:{label}", 0
    slots = arc_slots(t, label)
    here = (tri.name, pos)
    side = slots.index(here)
    return f"a:{label}", side


def dual_graph(t: Triangulation) -> DualGraph:
    """The dual ribbon graph: triangles and boundary segments as vertices,
    arcs and boundary segments as edges.  Radius arcs give loops at their
    self-folded triangles."""
    _require_valid(t)
    edge_ends: dict[str, tuple[str, str]] = {}
    for arc in sorted(t.arcs):
        (ta, _), (tb, _) = arc_slots(t, arc)
        edge_ends[f"a:{arc}"] = (f"t:{ta}", f"t:{tb}")
    for seg in sorted(t.boundary_segments):
        (name, _) = _boundary_sides(t)[seg]
        edge_ends[f"b:{seg}"] = (f"t:{name}", f"s:{seg}")

    rotation: dict[str, list[tuple[str, int]]] = {}
    for tri in t.triangles:
        entries = []
        for pos in range(3):
            edge, side = _slot_edge_name(t, tri, pos)
            entries.append((edge, side))
        rotation[f"t:{tri.name}"] = entries
    for seg in sorted(t.boundary_segments):
        rotation[f"s:{seg}"] = [(f"b:{seg}", 1)]

    graph = RibbonGraph.build(edge_ends, rotation)
    edge_kind: dict[str, EdgeKind] = {}
    for arc in t.arcs:
        edge_kind[f"a:{arc}"] = (ARC, arc)
    for seg in t.boundary_segments:
        edge_kind[f"b:{seg}"] = (BOUNDARY, seg)
    vertex_kind: dict[str, VertexKind] = {}
    for tri in t.triangles:
        vertex_kind[f"t:{tri.name}"] = ("tri", tri.name)
    for seg in t.boundary_segments:
        vertex_kind[f"s:{seg}"] = ("seg", seg)
    return DualGraph(graph, edge_kind, vertex_kind)


def leafy_dual_graph(t: Triangulation) -> LeafyDualGraph:
    """The leafy dual graph: each radius loop ``eta_v`` is split into
    ``eta1:v`` and ``eta2:v`` through the new vertex ``w:v``, which also
    carries the leaf ``leaf:v`` to ``z:v``.

    Conventions (pinned by the sign-sequence regression suite): at the
    self-folded vertex the clockwise rotation is ``(loop-dual, eta1,
    eta2)`` where ``eta1`` replaces the radius slot that follows the loop
    slot clockwise; at ``w:v`` it is ``(eta2, eta1, leaf)``.
    """
    _require_valid(t)
    edge_ends: dict[str, tuple[str, str]] = {}
    rotation: dict[str, list[tuple[str, int]]] = {}

    for arc in sorted(t.arcs):
        if any(tri.self_folded and tri.radius == arc for tri in t.triangles):
            continue
        (ta, _), (tb, _) = arc_slots(t, arc)
        edge_ends[f"a:{arc}"] = (f"t:{ta}", f"t:{tb}")
    for seg in sorted(t.boundary_segments):
        (name, _) = _boundary_sides(t)[seg]
        edge_ends[f"b:{seg}"] = (f"t:{name}", f"s:{seg}")
        rotation[f"s:{seg}"] = [(f"b:{seg}", 1)]

    for tri in t.triangles:
        v = tri.name
        if not tri.self_folded:
            entries = []
            for pos in range(3):
                edge, side = _slot_edge_name(t, tri, pos)
                entries.append((edge, side))
            rotation[f"t:{v}"] = entries
            continue
        edge_ends[f"eta1:{v}"] = (f"t:{v}", f"w:{v}")
        edge_ends[f"eta2:{v}"] = (f"t:{v}", f"w:{v}")
        edge_ends[f"leaf:{v}"] = (f"w:{v}", f"z:{v}")
        loop_edge, loop_side = _slot_edge_name(t, tri, 0)
        rotation[f"t:{v}"] = [(loop_edge, loop_side), (f"eta1:{v}", 0), (f"eta2:{v}", 0)]
        rotation[f"w:{v}"] = [(f"eta2:{v}", 1), (f"eta1:{v}", 1), (f"leaf:{v}", 0)]
        rotation[f"z:{v}"] = [(f"leaf:{v}", 1)]

    graph = RibbonGraph.build(edge_ends, rotation)
    edge_kind: dict[str, EdgeKind] = {}
    vertex_kind: dict[str, VertexKind] = {}
    for arc in t.arcs:
        if f"a:{arc}" in edge_ends:
            edge_kind[f"a:{arc}"] = (ARC, arc)
    for seg in t.boundary_segments:
        edge_kind[f"b:{seg}"] = (BOUNDARY, seg)
        vertex_kind[f"s:{seg}"] = ("seg", seg)
    for tri in t.triangles:
        vertex_kind[f"t:{tri.name}"] = ("tri", tri.name)
        if tri.self_folded:
            v = tri.name
            edge_kind[f"eta1:{v}"] = ("eta", v, 1)
            edge_kind[f"eta2:{v}"] = ("eta", v, 2)
            edge_kind[f"leaf:{v}"] = ("leaf", v)
            vertex_kind[f"w:{v}"] = ("w", v)
            vertex_kind[f"z:{v}"] = ("z", v)
    return LeafyDualGraph(graph, edge_kind, vertex_kind)


def collapse(t: Triangulation, leafy: LeafyDualGraph) -> DualGraph:
    """Undo the leafy construction: fuse each eta pair back into a loop and
    drop the leaf cluster.  Used to check the construction round-trips."""
    edge_ends: dict[str, tuple[str, str]] = {}
    rotation: dict[str, list[tuple[str, int]]] = {}
    g = leafy.graph
    sf = {tri.name: tri for tri in t.triangles if tri.self_folded}
    for e, kind in leafy.edge_kind.items():
        if kind[0] == ARC or kind[0] == BOUNDARY:
            edge_ends[e] = g.edge_ends(e)  # type: ignore[assignment]
        elif kind == ("eta", kind[1], 1):
            radius = sf[kind[1]].radius
            v = f"t:{kind[1]}"
            edge_ends[f"a:{radius}"] = (v, v)
    for v in g.vertices:
        kind = leafy.vertex_kind.get(v)
        if kind is None or kind[0] in ("w", "z"):
            continue
        entries: list[tuple[str, int]] = []
        for d in g.darts_at(v):
            ekind = leafy.edge_kind[d.edge]
            if ekind[0] == "eta":
                radius = sf[ekind[1]].radius
                entries.append((f"a:{radius}", ekind[2] - 1))
            else:
                entries.append((d.edge, g.dart_side(d.id)))
        rotation[v] = entries
    graph = RibbonGraph.build(edge_ends, rotation)
    edge_kind = {}
    vertex_kind = {}
    for e in edge_ends:
        if e.startswith("a:"):
            edge_kind[e] = (ARC, e[2:])
        else:
            edge_kind[e] = (BOUNDARY, e[2:])
    for v in rotation:
        if v.startswith("t:"):
            vertex_kind[v] = ("tri", v[2:])
        else:
            vertex_kind[v] = ("seg", v[2:])
    return DualGraph(graph, edge_kind, vertex_kind)
