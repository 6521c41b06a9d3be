"""Kink detection, resolution, and normalization to the kink-free form.

A kink is a located pattern around one self-folded triangle's eta pair:
either a single eta pair with mirrored flanks and a three-fold sign
coincidence (multiplicity 1), or an alternating eta run of length
``2r + 2`` flanked by one repeated non-eta edge (multiplicity ``r + 1``).
Resolving a kink swaps two core entries and freely reduces; the total
kink multiplicity strictly decreases, and the rewriting is confluent, so
every walk has a unique kink-free form (for closed walks, unique up to
rotation and orientation reversal).

Indices follow the convention that a walk's edges are numbered from 1; a
kink occupies positions ``j..m`` with ``m = j + 2r + 3``.  On closed walks
indices refer to the canonical representative and wrap cyclically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .errors import InputError
from .ribbon import Sign
from .triangulation import LeafyDualGraph
from .walks import (
    ClosedWalkClass,
    Walk,
    canonical_closed,
    compose,
    end,
    identity_walk,
    invert,
    reduce_word,
    sign_sequence,
    vertex_sequence,
)

Walkish = Union[Walk, ClosedWalkClass]

# When set, every multiplicity > 1 resolution is recomputed with a second
# random core position and the standard forms are asserted equal.
CHECK_SWAP_INDEPENDENCE = False


@dataclass(frozen=True)
class Kink:
    """A kink occurrence on a walk (1-based indices)."""

    j: int
    m: int
    multiplicity: int
    r: int
    triangle: str
    eta_order: tuple[int, int]
    core_start: int
    core_end: int

    @property
    def core_span(self) -> tuple[int, int]:
        return (self.core_start, self.core_end)

    def sort_key(self) -> tuple[int, int, int]:
        return (self.j, self.m, self.multiplicity)


def _eta_info(g: LeafyDualGraph, edge: str):
    kind = g.edge_kind.get(edge)
    if kind and kind[0] == "eta":
        return kind[1], kind[2]
    return None


def _check_open_endpoints(g: LeafyDualGraph, walk: Walk) -> None:
    sf = set(g.self_folded_vertices)
    for v in (walk.start, end(g, walk)):
        kind = g.vertex_kind.get(v)
        if kind is None or kind[0] in ("w", "z") or v in sf:
            raise InputError(
                f"walk endpoint {v} must be a dual-graph vertex away from self-folded triangles"
            )


def _eta_runs(etas: Sequence, n: int, closed: bool) -> list[tuple[int, int]]:
    """Maximal blocks of consecutive eta positions, as (start, length),
    0-based; cyclic blocks may wrap when ``closed``."""
    if n == 0:
        return []
    if closed and all(etas):
        return []  # a pure eta cycle has no flanks, hence no kinks
    runs = []
    if closed:
        z = next(i for i in range(n) if etas[i] is None)
        order = [(z + 1 + k) % n for k in range(n)]
    else:
        order = list(range(n))
    start = None
    length = 0
    for i in order:
        if etas[i] is not None:
            if start is None:
                start = i
                length = 1
            else:
                length += 1
        else:
            if start is not None:
                runs.append((start, length))
                start = None
    if start is not None:
        runs.append((start, length))
    return runs


def find_kinks(g: LeafyDualGraph, f: Walkish) -> list[Kink]:
    """All kink occurrences of ``f``, sorted by position.

    Open walks must run between dual-graph vertices away from the
    self-folded triangles; closed classes are scanned cyclically on their
    canonical representative.
    """
    closed = isinstance(f, ClosedWalkClass)
    walk = f.representative() if closed else f
    if not closed:
        _check_open_endpoints(g, walk)
    edges = walk.edges
    n = len(edges)
    if n == 0:
        return []
    signs = sign_sequence(g, f).signs

    def edge_at(i: int) -> str:
        return edges[i % n] if closed else (edges[i] if 0 <= i < n else "")

    def sign_at(i: int) -> Sign | None:
        # 0-based: the sign between edges i and i+1
        if closed:
            return signs[i % n]
        return signs[i] if 0 <= i < len(signs) else None

    etas = [_eta_info(g, e) for e in edges]
    out: list[Kink] = []
    for a, length in _eta_runs(etas, n, closed):
        v, first_idx = etas[a]
        b = a + length - 1  # may exceed n - 1 for wrapped cyclic runs
        if length == 2:
            # multiplicity 1: grow mirrored flanks around the core (a, a+1)
            r = 1
            while True:
                lo, hi = a - r, a + 1 + r
                if closed:
                    if 2 * r + 4 > n:
                        break
                else:
                    if lo - 1 < 0 or hi + 1 > n - 1:
                        break
                if edge_at(lo) != edge_at(hi):
                    break
                s_j, s_core, s_m1 = sign_at(lo - 1), sign_at(a), sign_at(hi)
                if s_j is not None and s_j == s_core == s_m1:
                    j0 = lo - 1 if not closed else (lo - 1) % n
                    out.append(
                        Kink(
                            j=j0 + 1,
                            m=j0 + 2 * r + 4,
                            multiplicity=1,
                            r=r,
                            triangle=v,
                            eta_order=(first_idx, etas[(a + 1) % n][1]),
                            core_start=(a % n) + 1,
                            core_end=(a % n) + 2,
                        )
                    )
                r += 1
        elif length >= 4 and length % 2 == 0:
            # multiplicity r + 1: one repeated non-eta edge flanks the run
            lo, hi = a - 1, b + 1
            if closed:
                if length + 2 > n:
                    continue
            else:
                if lo < 0 or hi > n - 1:
                    continue
            x, y = edge_at(lo), edge_at(hi)
            if x != y or _eta_info(g, x) is not None:
                continue
            r = (length - 2) // 2
            j0 = lo if not closed else lo % n
            out.append(
                Kink(
                    j=j0 + 1,
                    m=j0 + 2 * r + 4,
                    multiplicity=r + 1,
                    r=r,
                    triangle=v,
                    eta_order=(first_idx, etas[(a + 1) % n][1]),
                    core_start=(a % n) + 1,
                    core_end=(a % n) + 2 * r + 2,
                )
            )
    return sorted(out, key=Kink.sort_key)


def total_multiplicity(kinks: Sequence[Kink]) -> int:
    return sum(k.multiplicity for k in kinks)


def _swap(edges: tuple[str, ...], q: int) -> tuple[str, ...]:
    return edges[:q] + (edges[q + 1], edges[q]) + edges[q + 2 :]


def _resolve_open(g: LeafyDualGraph, f: Walk, kink: Kink, s: int | None) -> Walk:
    edges = f.edges
    if kink.multiplicity == 1:
        q = kink.core_start - 1
    else:
        lo, hi = kink.j + 1, kink.j + 2 * kink.r + 1
        q = (lo if s is None else s) - 1
        if not lo <= q + 1 <= hi:
            raise InputError(f"swap index {q + 1} outside core range {lo}..{hi}")
    return Walk(f.start, reduce_word(_swap(edges, q)))


def _rotate_closed(c: ClosedWalkClass, offset: int, g: LeafyDualGraph) -> Walk:
    verts = vertex_sequence(g, c.representative())
    n = len(c.edges)
    offset %= n
    return Walk(verts[offset], c.edges[offset:] + c.edges[:offset])


def _resolve_closed(
    g: LeafyDualGraph, c: ClosedWalkClass, kink: Kink, s: int | None
) -> ClosedWalkClass:
    n = len(c.edges)
    offset = (kink.j - 1) % n
    rotated = _rotate_closed(c, offset, g)
    span = kink.m - kink.j  # segment occupies rotated positions 1..span+1
    shifted = Kink(
        j=1,
        m=span + 1,
        multiplicity=kink.multiplicity,
        r=kink.r,
        triangle=kink.triangle,
        eta_order=kink.eta_order,
        core_start=((kink.core_start - 1 - offset) % n) + 1,
        core_end=((kink.core_start - 1 - offset) % n) + (kink.core_end - kink.core_start) + 1,
    )
    s_shift = None if s is None else ((s - 1 - offset) % n) + 1
    resolved = _resolve_open(g, rotated, shifted, s_shift)
    return canonical_closed(g, resolved)


def resolve_kink(g: LeafyDualGraph, f: Walkish, kink: Kink, s: int | None = None) -> Walkish:
    """Resolve one kink: swap two core entries and take the standard form.

    For multiplicity 1 the two core entries are swapped; for higher
    multiplicity any adjacent pair inside the core may be swapped (``s``
    picks the 1-based left position; the result does not depend on it).
    """
    if kink not in find_kinks(g, f):
        raise InputError(f"not a current kink of the walk: {kink}")
    resolved = _resolve(g, f, kink, s)
    if CHECK_SWAP_INDEPENDENCE and kink.multiplicity > 1:
        lo, hi = kink.j + 1, kink.j + 2 * kink.r + 1
        alt = random.Random(0xC0FFEE + kink.j).randint(lo, hi)
        assert _resolve(g, f, kink, alt) == resolved, "swap position changed the resolution"
    return resolved


def _resolve(g: LeafyDualGraph, f: Walkish, kink: Kink, s: int | None) -> Walkish:
    if isinstance(f, ClosedWalkClass):
        return _resolve_closed(g, f, kink, s)
    return _resolve_open(g, f, kink, s)


PickStrategy = Callable[[Sequence[Kink]], Kink]


def leftmost_innermost(kinks: Sequence[Kink]) -> Kink:
    return min(kinks, key=lambda k: (k.j, k.m - k.j, k.multiplicity))


def random_strategy(rng: random.Random) -> PickStrategy:
    def pick(kinks: Sequence[Kink]) -> Kink:
        return rng.choice(list(kinks))

    return pick


@dataclass(frozen=True)
class ResolutionStep:
    kink: Kink
    length_before: int
    length_after: int
    result: Walkish


def normalize_with_trace(
    g: LeafyDualGraph, f: Walkish, pick: PickStrategy | None = None
) -> tuple[Walkish, list[ResolutionStep]]:
    """Resolve kinks until none remain, recording each step.

    Resolving a kink can merge two eta runs into a new kink, so the total
    multiplicity does not always decrease; termination is guarded by a
    step cap instead (a resolution of multiplicity > 1 shortens the walk
    by at least 4, and same-length steps only reorient cores).
    """
    pick = pick or leftmost_innermost
    steps: list[ResolutionStep] = []
    current = f
    remaining = find_kinks(g, current)
    cap = 4 * (len(f) + 2) ** 2
    while remaining:
        if len(steps) > cap:
            raise RuntimeError(f"normalization exceeded {cap} steps; input {f}")
        chosen = pick(remaining)
        nxt = _resolve(g, current, chosen, None)
        if CHECK_SWAP_INDEPENDENCE and chosen.multiplicity > 1:
            lo, hi = chosen.j + 1, chosen.j + 2 * chosen.r + 1
            alt = random.Random(0xC0FFEE ^ len(steps)).randint(lo, hi)
            assert _resolve(g, current, chosen, alt) == nxt
        steps.append(ResolutionStep(chosen, len(current), len(nxt), nxt))
        current, remaining = nxt, find_kinks(g, nxt)
    return current, steps


def normalize(g: LeafyDualGraph, f: Walkish, pick: PickStrategy | None = None) -> Walkish:
    """The unique kink-free form of ``f`` (up to rotation and reversal for
    closed classes); independent of the resolution order."""
    result, _ = normalize_with_trace(g, f, pick)
    return result


# -- key lemma -------------------------------------------------------------


@dataclass(frozen=True)
class KeyLemmaInstance:
    kink: Kink
    predicted: Walk
    computed: Walk
    shape_ok: bool
    kink_prime: Kink | None
    equation_ok: bool
    length_drop: int


@dataclass(frozen=True)
class KeyLemmaReport:
    passed: bool
    instances: tuple[KeyLemmaInstance, ...]
    direct_product: Walk


def check_key_lemma(g: LeafyDualGraph, f: Walk, h: Walk) -> KeyLemmaReport:
    """Verify, on one instance, the composed-resolution identity: resolving
    a kink of ``f``'s interior before composing with the near-inverse ``h``
    leaves a single multiplicity-2 kink whose resolution recovers the
    composition's standard form.
    """
    if f.is_identity or h.is_identity:
        raise InputError("both walks must be non-identity")
    _check_open_endpoints(g, f)
    _check_open_endpoints(g, h)
    n = len(f.edges)
    expected_h = tuple(reversed(f.edges[1:]))
    if h.start != end(g, f) or h.edges[: n - 1] != expected_h or len(h.edges) != n:
        raise InputError("second walk must retrace the first back to its second vertex")
    d1 = h.edges[-1]
    if d1 == f.edges[0]:
        raise InputError("the diverging edge must differ from the first edge")

    interior = [k for k in find_kinks(g, f) if k.j >= 2 and k.m <= n]
    if not interior:
        raise InputError("the interior of the first walk has no kink")

    direct = compose(g, f, h)
    instances = []
    for kink in interior:
        resolved = _resolve_open(g, f, kink, None)
        computed = compose(g, resolved, h)
        e = f.edges
        # 1-based position of the repeated edge flanking the surviving core
        p = kink.j + kink.r if kink.multiplicity == 1 else kink.j
        middle = (e[p - 1], e[p + 1], e[p], e[p + 1], e[p], e[p - 1])
        predicted = Walk(f.start, e[: p - 1] + middle + tuple(reversed(e[1 : p - 1])) + (d1,))
        shape_ok = computed == predicted
        prime = None
        for cand in find_kinks(g, computed):
            if cand.multiplicity == 2 and cand.j == p and cand.m == p + 5:
                prime = cand
                break
        equation_ok = False
        if prime is not None:
            equation_ok = _resolve_open(g, computed, prime, None) == direct
        instances.append(
            KeyLemmaInstance(
                kink=kink,
                predicted=predicted,
                computed=computed,
                shape_ok=shape_ok,
                kink_prime=prime,
                equation_ok=equation_ok,
                length_drop=len(f) - len(resolved),
            )
        )
    passed = bool(instances) and all(i.shape_ok and i.equation_ok for i in instances)
    expected_direct = Walk(f.start, (f.edges[0], d1))
    passed = passed and direct == expected_direct
    return KeyLemmaReport(passed, tuple(instances), direct)


# -- orbifold helpers shared with the groupoid module ----------------------


def is_orbifold_trivial(g: LeafyDualGraph, f: Walk) -> bool:
    """Whether the walk lies in the kernel of the orbifold quotient: its
    kink-free form is the identity walk."""
    nf = normalize(g, f)
    return isinstance(nf, Walk) and nf.is_identity
