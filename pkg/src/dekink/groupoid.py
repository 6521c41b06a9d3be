"""The 2-orbifold fundamental groupoid of a leafy dual graph.

Walks between boundary-segment vertices are taken modulo the normal
multilocular subgroup generated by the squares of the puncture loops
``c * (eta1, eta2) * c^{-1}``; each puncture thereby becomes an orbifold
point of order two.  Equality in the quotient is decided through the
kink-free normal form: a walk is trivial in the quotient exactly when it
normalizes to the identity, and every non-torsion class has a unique
kink-free representative, which the section ``iota`` returns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import InputError, OrderTwoClassError
from .kinks import find_kinks, normalize
from .triangulation import LeafyDualGraph
from .walks import ClosedWalkClass, Walk, compose, end, invert

Walkish = Union[Walk, ClosedWalkClass]


def basepoints(g: LeafyDualGraph) -> frozenset[str]:
    """The eligible objects: one per boundary segment."""
    return frozenset(g.segment_vertices)


def _require_basepoint(g: LeafyDualGraph, v: str) -> None:
    if g.vertex_kind.get(v, ("",))[0] != "seg":
        raise InputError(f"{v} is not a boundary-segment vertex")


def loop_generator(g: LeafyDualGraph, u: str, v: str, c: Walk) -> Walk:
    """The puncture loop ``c * (eta1:v, eta2:v) * c^{-1}`` based at ``u``;
    its class has order two in the quotient."""
    _require_basepoint(g, u)
    if f"t:{v}" not in g.self_folded_vertices:
        raise InputError(f"{v} is not a self-folded triangle")
    if c.start != u or end(g, c) != f"t:{v}":
        raise InputError(f"connecting walk must run from {u} to t:{v}")
    eta1, eta2 = g.eta_edges(v)
    core = Walk(f"t:{v}", (eta1, eta2))
    return compose(g, compose(g, c, core), invert(g, c))


def orbifold_equal(g: LeafyDualGraph, f: Walk, h: Walk) -> bool:
    """Quotient equality of two walks with the same endpoints in the
    basepoint set."""
    for w in (f, h):
        _require_basepoint(g, w.start)
        _require_basepoint(g, end(g, w))
    if f.start != h.start or end(g, f) != end(g, h):
        raise InputError("walks must share both endpoints")
    difference = compose(g, invert(g, h), f)
    nf = normalize(g, difference)
    return isinstance(nf, Walk) and nf.is_identity


def is_order_two(g: LeafyDualGraph, f: Walk) -> bool:
    """Whether the loop's quotient class is a nontrivial involution."""
    _require_basepoint(g, f.start)
    if end(g, f) != f.start:
        raise InputError("order-two detection requires a loop")
    nf = normalize(g, f)
    if isinstance(nf, Walk) and nf.is_identity:
        return False
    square = normalize(g, compose(g, f, f))
    return isinstance(square, Walk) and square.is_identity


def iota(g: LeafyDualGraph, f: Walk) -> Walk:
    """The unique kink-free walk in ``f``'s quotient class.

    Undefined on order-two loop classes (both core orientations are
    kink-free there); those are refused.
    """
    _require_basepoint(g, f.start)
    _require_basepoint(g, end(g, f))
    if end(g, f) == f.start and is_order_two(g, f):
        raise OrderTwoClassError(
            "the class has order two; see order_two_representatives for both kink-free forms"
        )
    result = normalize(g, f)
    assert isinstance(result, Walk)
    return result


def order_two_representatives(g: LeafyDualGraph, f: Walk) -> tuple[Walk, Walk]:
    """The two kink-free representatives of an order-two class: the normal
    forms of the loop and of its inverse (the two core orientations)."""
    _require_basepoint(g, f.start)
    if end(g, f) != f.start or not is_order_two(g, f):
        raise InputError("expected an order-two loop class")
    a = normalize(g, f)
    b = normalize(g, invert(g, f))
    assert isinstance(a, Walk) and isinstance(b, Walk)
    return a, b


def iota_free(g: LeafyDualGraph, f: ClosedWalkClass) -> ClosedWalkClass:
    """Kink-free closed class of ``f``, canonical up to orientation
    reversal (the lexicographically smaller of the two orientations)."""
    from .walks import reverse_class

    nf = normalize(g, f)
    assert isinstance(nf, ClosedWalkClass)
    rev = reverse_class(g, nf)
    return min(nf, rev, key=lambda c: (c.edges, c.start))


@dataclass
class OrbifoldClass:
    """A walk regarded up to the orbifold quotient, with its kink-free
    form cached on first use."""

    graph: LeafyDualGraph = field(repr=False)
    representative: Walkish
    _normal_form: Walkish | None = field(default=None, repr=False, compare=False)

    @property
    def normal_form(self) -> Walkish:
        if self._normal_form is None:
            self._normal_form = normalize(self.graph, self.representative)
        return self._normal_form

    def is_kink_free(self) -> bool:
        return not find_kinks(self.graph, self.representative)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OrbifoldClass):
            return NotImplemented
        a, b = self.representative, other.representative
        if isinstance(a, ClosedWalkClass) != isinstance(b, ClosedWalkClass):
            return False
        if isinstance(a, ClosedWalkClass):
            from .walks import classes_equal_up_to_reversal

            return classes_equal_up_to_reversal(self.graph, self.normal_form, other.normal_form)  # type: ignore[arg-type]
        return orbifold_equal(self.graph, a, b)
