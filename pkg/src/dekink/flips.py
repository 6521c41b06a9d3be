"""Flips of signature-zero triangulations and transport of walks.

Two moves preserve signature zero: the standard flip of an arc shared by
two distinct ordinary triangles, and the double flip that re-anchors a
self-folded triangle at the opposite corner of its enclosing digon.  Both
replace a small region of the leafy dual graph and leave everything else
untouched, so a walk is transported by rewriting each maximal subwalk
through the affected region.

Inside the region a crossing is classified by its entry and exit door
slots plus a winding number (around the annulus core when the flipped
quadrilateral has a glued pair of opposite sides, or around the puncture
for the double flip); the rewritten subwalk realizes the same class in
the flipped region.  The rewrite tables below were derived from explicit
embeddings consistent with the pinned rotation conventions and are locked
in by the round-trip, functoriality, and kink-presence test suites.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import InputError, NotFlippableError
from .triangulation import (
    ARC,
    LeafyDualGraph,
    OrdinaryTriangle,
    SelfFoldedTriangle,
    Triangulation,
    leafy_dual_graph,
    validate_signature_zero,
)
from .walks import ClosedWalkClass, Walk, canonical_closed, standard_form, vertex_sequence

Walkish = Union[Walk, ClosedWalkClass]

STANDARD = "standard"
DOUBLE = "double"


@dataclass(frozen=True)
class FlipMove:
    kind: str  # STANDARD | DOUBLE
    target: str  # arc label, or self-folded triangle name

    def __post_init__(self):
        if self.kind not in (STANDARD, DOUBLE):
            raise InputError(f"unknown flip kind: {self.kind}")


def fresh_label(base: str, taken: set[str]) -> str:
    """Derivation-suffixed label: strip any existing counter and bump."""
    m = re.fullmatch(r"(.*)@(\d+)", base)
    stem, n = (m.group(1), int(m.group(2))) if m else (base, 0)
    while True:
        n += 1
        candidate = f"{stem}@{n}"
        if candidate not in taken:
            return candidate


def _rotate_to_front(sides, ref) -> tuple:
    for i in range(3):
        if sides[i] == ref:
            return sides[i:] + sides[:i]
    raise InputError(f"side {ref} not found")


def _standard_flip_data(t: Triangulation, arc: str):
    if arc not in t.arcs:
        raise NotFlippableError(f"unknown arc: {arc}")
    owners = [tri for tri in t.triangles for side in tri.sides if side == (ARC, arc)]
    if len(owners) != 2 or owners[0].name == owners[1].name:
        raise NotFlippableError(f"arc {arc} is not shared by two distinct triangles")
    t1, t2 = owners
    if t1.self_folded or t2.self_folded:
        raise NotFlippableError(f"arc {arc} bounds a self-folded triangle")
    s1 = _rotate_to_front(t1.sides, (ARC, arc))
    s2 = _rotate_to_front(t2.sides, (ARC, arc))
    # T1 = (k, p, q) and T2 = (k, r, s) clockwise; the flipped diagonal
    # joins the corner between p,q to the corner between r,s.
    _, p, q = s1
    _, r, s = s2
    return t1, t2, p, q, r, s


def _apply_standard(t: Triangulation, arc: str) -> Triangulation:
    t1, t2, p, q, r, s = _standard_flip_data(t, arc)
    taken = set(t.arcs) | set(t.boundary_segments)
    new_arc = fresh_label(arc, taken)
    a = OrdinaryTriangle(t1.name, (q, r, (ARC, new_arc)))
    b = OrdinaryTriangle(t2.name, (s, p, (ARC, new_arc)))
    triangles = tuple(
        a if tri.name == t1.name else b if tri.name == t2.name else tri
        for tri in t.triangles
    )
    arcs = (set(t.arcs) - {arc}) | {new_arc}
    return Triangulation(frozenset(arcs), t.boundary_segments, triangles)


def _double_flip_data(t: Triangulation, name: str):
    tri = t.triangle(name)
    if not tri.self_folded:
        raise NotFlippableError(f"{name} is not a self-folded triangle")
    enclosing = [
        o for o in t.triangles if not o.self_folded and (ARC, tri.loop) in o.sides
    ]
    if len(enclosing) != 1:
        raise NotFlippableError(f"loop of {name} has no ordinary enclosing triangle")
    enc = enclosing[0]
    _, s1, s2 = _rotate_to_front(enc.sides, (ARC, tri.loop))
    return tri, enc, s1, s2


def _apply_double(t: Triangulation, name: str) -> Triangulation:
    tri, enc, s1, s2 = _double_flip_data(t, name)
    taken = set(t.arcs) | set(t.boundary_segments)
    new_loop = fresh_label(tri.loop, taken)
    new_radius = fresh_label(tri.radius, taken | {new_loop})
    new_sf = SelfFoldedTriangle(name, new_loop, new_radius)
    new_enc = OrdinaryTriangle(enc.name, ((ARC, new_loop), s2, s1))
    triangles = tuple(
        new_sf if x.name == name else new_enc if x.name == enc.name else x
        for x in t.triangles
    )
    arcs = (set(t.arcs) - {tri.loop, tri.radius}) | {new_loop, new_radius}
    return Triangulation(frozenset(arcs), t.boundary_segments, triangles)


def flip(t: Triangulation, move: FlipMove) -> Triangulation:
    """Apply one flip; the result is again a valid signature-zero
    triangulation with the same arc, segment and puncture counts."""
    problems = validate_signature_zero(t)
    if problems:
        raise InputError(f"triangulation invalid before flip: {problems[0].code}")
    if move.kind == STANDARD:
        result = _apply_standard(t, move.target)
    else:
        result = _apply_double(t, move.target)
    after = validate_signature_zero(result)
    if after:
        raise AssertionError(f"flip produced an invalid triangulation: {after[0].code}")
    return result


def apply_script(t: Triangulation, moves: list[FlipMove]) -> Triangulation:
    for move in moves:
        t = flip(t, move)
    return t


# -- transport --------------------------------------------------------------


def _side_edge(side) -> str:
    kind, label = side
    return f"a:{label}" if kind == ARC else f"b:{label}"


class _StandardRegion:
    """The two old triangles around the flipped arc.  When the
    quadrilateral has a glued pair of opposite sides the region is an
    annulus and crossings carry a winding number; otherwise it is a disk
    and the entry/exit doors determine everything."""

    def __init__(self, t_old: Triangulation, arc: str, t_new: Triangulation):
        t1, t2, p, q, r, s = _standard_flip_data(t_old, arc)
        self.v1, self.v2 = f"t:{t1.name}", f"t:{t2.name}"
        self.vertices = {self.v1, self.v2}
        (new_arc,) = t_new.arcs - t_old.arcs
        self.k_old, self.k_new = f"a:{arc}", f"a:{new_arc}"

        self.glued: str | None = None
        glued_role = None
        if p == r and p[0] == ARC:
            self.glued, glued_role = _side_edge(p), "p"
        elif q == s and q[0] == ARC:
            self.glued, glued_role = _side_edge(q), "q"

        self.attach: dict[tuple[str, str], str] = {}
        for side, old_at, new_at in (
            (p, self.v1, self.v2),  # p re-homes to T2's vertex
            (q, self.v1, self.v1),
            (r, self.v2, self.v1),
            (s, self.v2, self.v2),
        ):
            edge = _side_edge(side)
            if edge != self.glued:
                self.attach[(edge, old_at)] = new_at

        # winding per traversal direction; the flipped graph reverses the
        # positive direction for a glued "p" side but keeps it for "q"
        self.wind_old = {(self.k_old, self.v1): 0, (self.k_old, self.v2): 0}
        self.wind_new = {(self.k_new, self.v1): 0, (self.k_new, self.v2): 0}
        if self.glued:
            self.wind_old[(self.glued, self.v1)] = 1
            self.wind_old[(self.glued, self.v2)] = -1
            pos = self.v2 if glued_role == "p" else self.v1
            neg = self.v1 if glued_role == "p" else self.v2
            self.wind_new[(self.glued, pos)] = 1
            self.wind_new[(self.glued, neg)] = -1

    def crossing_wind(self, pocket: list[tuple[str, str]], entry: str, exit_: str) -> int:
        return sum(self.wind_old.get(step, 0) for step in pocket)

    def build(self, v_in: str, v_out: str, wind: int) -> list[str]:
        if wind == 0:
            return [] if v_in == v_out else [self.k_new]
        if not self.glued:
            raise AssertionError("winding crossing in a simply connected region")
        direction = 1 if wind > 0 else -1
        start = next(v for v in (self.v1, self.v2) if self.wind_new[(self.glued, v)] == direction)
        other = self.v2 if start == self.v1 else self.v1
        word: list[str] = []
        if v_in != start:
            word.append(self.k_new)
        for i in range(abs(wind)):
            if i:
                word.append(self.k_new)
            word.append(self.glued)
        if v_out != other:
            word.append(self.k_new)
        return word

    def pure_cycle(self, g_old: LeafyDualGraph, walk: Walk) -> Walk:
        vseq = vertex_sequence(g_old, walk)
        wind = sum(
            self.wind_old.get((e, vseq[i]), 0) for i, e in enumerate(walk.edges)
        )
        if wind == 0 or not self.glued:
            raise InputError("closed walk confined to the flip region is degenerate")
        direction = 1 if wind > 0 else -1
        start = next(v for v in (self.v1, self.v2) if self.wind_new[(self.glued, v)] == direction)
        word: list[str] = []
        for _ in range(abs(wind)):
            word.extend([self.glued, self.k_new])
        return Walk(start, tuple(word))


class _DoubleRegion:
    """The punctured digon around a self-folded triangle.  Crossings carry
    the winding around the puncture; crossings between the two doors also
    pick up one compensating turn because the direct route passes the
    puncture on the other side after the flip."""

    def __init__(self, t_old: Triangulation, name: str, t_new: Triangulation):
        tri, enc, s1, s2 = _double_flip_data(t_old, name)
        new_tri, _, _, _ = _double_flip_data(t_new, name)
        self.tv, self.wv = f"t:{name}", f"w:{name}"
        self.ev = f"t:{enc.name}"
        self.vertices = {self.tv, self.wv, f"z:{name}", self.ev}
        self.lam_old, self.lam_new = f"a:{tri.loop}", f"a:{new_tri.loop}"
        self.eta1, self.eta2 = f"eta1:{name}", f"eta2:{name}"
        d1, d2 = _side_edge(s1), _side_edge(s2)
        self.attach = {(d1, self.ev): self.ev, (d2, self.ev): self.ev}
        self.role = {d1: 1, d2: -1}  # door listed first after the loop: +1

    def crossing_wind(self, pocket: list[tuple[str, str]], entry: str, exit_: str) -> int:
        etas = [e for e, _ in pocket if e in (self.eta1, self.eta2)]
        wind = (len(etas) // 2) if (etas and etas[0] == self.eta1) else -(len(etas) // 2)
        # crossing bias: first-door to second-door gains a turn, reverse loses
        if self.role[entry] == 1 and self.role[exit_] == -1:
            wind += 1
        elif self.role[entry] == -1 and self.role[exit_] == 1:
            wind -= 1
        return wind

    def build(self, v_in: str, v_out: str, wind: int) -> list[str]:
        if wind == 0:
            return []
        unit = [self.eta1, self.eta2] if wind > 0 else [self.eta2, self.eta1]
        return [self.lam_new] + unit * abs(wind) + [self.lam_new]

    def pure_cycle(self, g_old: LeafyDualGraph, walk: Walk) -> Walk:
        if any(e not in (self.eta1, self.eta2) for e in walk.edges):
            raise InputError("closed walk confined to the flip region is degenerate")
        # pure eta cycles keep their winding verbatim on the new graph
        return Walk(walk.start, walk.edges)


def _transport_open(g_old: LeafyDualGraph, region, walk: Walk) -> Walk:
    vseq = vertex_sequence(g_old, walk)
    if vseq[0] in region.vertices or vseq[-1] in region.vertices:
        raise InputError("walk endpoints must lie outside the flipped region")
    out: list[str] = []
    i = 0
    n = len(walk.edges)
    while i < n:
        e = walk.edges[i]
        if vseq[i + 1] not in region.vertices:
            out.append(e)
            i += 1
            continue
        entry_slot = (e, vseq[i + 1])
        j = i + 1
        pocket: list[tuple[str, str]] = []
        while j < n and vseq[j + 1] in region.vertices:
            pocket.append((walk.edges[j], vseq[j]))
            j += 1
        if j >= n:
            raise InputError("walk ends inside the flipped region")
        exit_edge = walk.edges[j]
        exit_slot = (exit_edge, vseq[j])
        if entry_slot not in region.attach or exit_slot not in region.attach:
            raise InputError("walk crosses the flipped region through a non-door edge")
        wind = region.crossing_wind(pocket, entry_slot[0], exit_slot[0])
        out.append(e)
        out.extend(region.build(region.attach[entry_slot], region.attach[exit_slot], wind))
        out.append(exit_edge)
        i = j + 1
    return Walk(walk.start, tuple(out))


def transport_walk(t: Triangulation, move: FlipMove, w: Walkish) -> Walkish:
    """Carry a walk across a flip: identical labels away from the affected
    region, homotopy-matching rewrites through it.  Round trips restore the
    original standard form and kink presence is invariant."""
    t_new = flip(t, move)
    g_old = leafy_dual_graph(t)
    g_new = leafy_dual_graph(t_new)
    if move.kind == STANDARD:
        region = _StandardRegion(t, move.target, t_new)
    else:
        region = _DoubleRegion(t, move.target, t_new)

    if isinstance(w, ClosedWalkClass):
        rep = w.representative()
        vseq = vertex_sequence(g_old, rep)
        outside = [i for i in range(len(rep.edges)) if vseq[i] not in region.vertices]
        if not outside:
            return canonical_closed(g_new, region.pure_cycle(g_old, rep))
        k = outside[0]
        rotated = Walk(vseq[k], rep.edges[k:] + rep.edges[:k])
        moved = _transport_open(g_old, region, rotated)
        return canonical_closed(g_new, standard_form(g_new, moved.start, moved.edges))

    moved = _transport_open(g_old, region, w)
    return standard_form(g_new, moved.start, moved.edges)
