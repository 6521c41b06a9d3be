"""Backtrack-free walks on a loop-free ribbon graph.

A walk is a start vertex plus an edge sequence in which consecutive edges
differ; on a loop-free graph these are exactly the standard forms of
fundamental-groupoid morphisms.  Closed walks are considered up to
rotation; the canonical representative of a rotation class is the
lexicographically least rotation of its edge sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import ContractibleError, InputError
from .ribbon import RibbonGraph, Sign
from .triangulation import LeafyDualGraph

Graphish = Union[RibbonGraph, LeafyDualGraph]


def _graph(g: Graphish) -> RibbonGraph:
    return g.graph if isinstance(g, LeafyDualGraph) else g


@dataclass(frozen=True)
class Walk:
    """A backtrack-free walk; the empty edge tuple is the identity at
    ``start``."""

    start: str
    edges: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_identity(self) -> bool:
        return not self.edges


@dataclass(frozen=True)
class ClosedWalkClass:
    """A rotation class of closed backtrack-free walks, held by its
    canonical representative."""

    start: str
    edges: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.edges)

    def representative(self) -> Walk:
        return Walk(self.start, self.edges)


@dataclass(frozen=True)
class SignSequence:
    """The turn signs of a walk; cyclic for closed walks."""

    signs: tuple[Sign, ...]
    closed: bool = False

    def __str__(self) -> str:
        return "".join(s.value for s in self.signs)

    def __len__(self) -> int:
        return len(self.signs)

    def cyclically_equal(self, other: "SignSequence") -> bool:
        if len(self.signs) != len(other.signs):
            return False
        if not self.signs:
            return True
        doubled = self.signs + self.signs
        n = len(self.signs)
        return any(doubled[k : k + n] == other.signs for k in range(n))


def vertex_sequence(g: Graphish, walk: Walk | ClosedWalkClass) -> tuple[str, ...]:
    """Vertices visited, starting and ending with the endpoints."""
    graph = _graph(g)
    seq = [walk.start]
    for e in walk.edges:
        seq.append(graph.other_end(e, seq[-1]))
    return tuple(seq)


def end(g: Graphish, walk: Walk) -> str:
    return vertex_sequence(g, walk)[-1]


def identity_walk(start: str) -> Walk:
    return Walk(start, ())


def _check_consecutive(g: Graphish, start: str, word: Sequence[str]) -> None:
    graph = _graph(g)
    if not graph.has_vertex(start):
        raise InputError(f"unknown vertex: {start}")
    here = start
    for e in word:
        if not graph.has_edge(e):
            raise InputError(f"unknown edge: {e}")
        here = graph.other_end(e, here)


def reduce_word(word: Sequence[str]) -> tuple[str, ...]:
    """Free reduction: repeatedly delete adjacent equal edges.  The result
    is independent of deletion order."""
    stack: list[str] = []
    for e in word:
        if stack and stack[-1] == e:
            stack.pop()
        else:
            stack.append(e)
    return tuple(stack)


def standard_form(g: Graphish, start: str, word: Sequence[str]) -> Walk:
    """The backtrack-free representative of the edge word, rel endpoints."""
    graph = _graph(g)
    if not graph.is_loop_free():
        raise InputError("standard forms require a loop-free graph")
    _check_consecutive(g, start, word)
    return Walk(start, reduce_word(word))


def compose(g: Graphish, f: Walk, h: Walk) -> Walk:
    """Concatenation ``f`` then ``h`` in standard form."""
    if end(g, f) != h.start:
        raise InputError(
            f"cannot compose: first walk ends at {end(g, f)}, second starts at {h.start}"
        )
    return Walk(f.start, reduce_word(f.edges + h.edges))


def invert(g: Graphish, f: Walk) -> Walk:
    """The reverse walk; standard forms stay standard under reversal."""
    return Walk(end(g, f), tuple(reversed(f.edges)))


def rotations(g: Graphish, walk: Walk) -> list[Walk]:
    """All rotations of a closed, cyclically reduced walk."""
    verts = vertex_sequence(g, walk)
    if verts[0] != verts[-1]:
        raise InputError("walk is not closed")
    n = len(walk.edges)
    out = []
    for k in range(n):
        out.append(Walk(verts[k], walk.edges[k:] + walk.edges[:k]))
    return out


def cyclic_reduce(g: Graphish, walk: Walk) -> Walk:
    """Conjugate away matching first/last edges until ``e_1 != e_n``."""
    graph = _graph(g)
    here = walk.start
    edges = list(reduce_word(walk.edges))
    vseq = [here]
    for e in edges:
        vseq.append(graph.other_end(e, vseq[-1]))
    if vseq[0] != vseq[-1]:
        raise InputError("walk is not closed")
    start = walk.start
    while len(edges) >= 2 and edges[0] == edges[-1]:
        start = graph.other_end(edges[0], start)
        edges = edges[1:-1]
        reduced = reduce_word(edges)
        if len(reduced) != len(edges):
            # interior pairs exposed by the trim
            edges = list(reduced)
    return Walk(start, tuple(edges))


def canonical_closed(g: Graphish, walk: Walk) -> ClosedWalkClass:
    """Deterministic representative of the rotation class: the
    lexicographically least rotation of the (cyclically reduced) walk."""
    reduced = cyclic_reduce(g, walk)
    if reduced.is_identity:
        raise ContractibleError("closed walk is contractible")
    edges = reduced.edges
    n = len(edges)
    doubled = edges + edges
    best = min(range(n), key=lambda k: doubled[k : k + n])
    verts = vertex_sequence(g, reduced)
    return ClosedWalkClass(verts[best], doubled[best : best + n])


def reverse_class(g: Graphish, c: ClosedWalkClass) -> ClosedWalkClass:
    return canonical_closed(g, invert(g, c.representative()))


def classes_equal_up_to_reversal(
    g: Graphish, a: ClosedWalkClass, b: ClosedWalkClass
) -> bool:
    return a == b or a == reverse_class(g, b)


def sign_sequence(g: LeafyDualGraph, f: Walk | ClosedWalkClass) -> SignSequence:
    """Turn signs along the walk: ``sign[j]`` relates edge ``j+1`` to edge
    ``j`` at the interior vertex between them; closed walks get the extra
    seam sign relating the first edge to the last."""
    closed = isinstance(f, ClosedWalkClass)
    walk = f.representative() if closed else f
    graph = _graph(g)
    verts = vertex_sequence(g, walk)
    n = len(walk.edges)
    if n <= 1 and not closed:
        return SignSequence((), closed=False)
    signs = []
    pairs = [(walk.edges[j], walk.edges[j + 1], verts[j + 1]) for j in range(n - 1)]
    if closed:
        pairs.append((walk.edges[n - 1], walk.edges[0], verts[n]))
    for prev, nxt, at in pairs:
        if graph.valency(at) != 3:
            raise InputError(f"interior vertex {at} is not trivalent")
        if graph.turn(prev, at, Sign.PLUS) == nxt:
            signs.append(Sign.PLUS)
        elif graph.turn(prev, at, Sign.MINUS) == nxt:
            signs.append(Sign.MINUS)
        else:
            raise InputError(f"edges {prev},{nxt} are not consecutive at {at}")
    return SignSequence(tuple(signs), closed=closed)
