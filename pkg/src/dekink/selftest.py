"""Seeded random generators and the property suites behind ``selftest``.

Triangulations are generated as triangulated polygons, optionally glued
along boundary-segment pairs into annuli (or more holes), punctured with
self-folded triangles, and stirred with random flips; every candidate is
re-validated, so the suites only ever see genuine signature-zero data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import ContractibleError, InputError, NotFlippableError
from .flips import DOUBLE, STANDARD, FlipMove, flip, transport_walk
from .groupoid import iota, is_order_two, loop_generator, orbifold_equal
from .kinks import (
    Kink,
    check_key_lemma,
    find_kinks,
    normalize,
    normalize_with_trace,
    resolve_kink,
    total_multiplicity,
)
from .ribbon import Sign
from .triangulation import (
    ARC,
    BOUNDARY,
    LeafyDualGraph,
    OrdinaryTriangle,
    SelfFoldedTriangle,
    Triangulation,
    leafy_dual_graph,
    validate_signature_zero,
)
from .walks import (
    ClosedWalkClass,
    Walk,
    canonical_closed,
    classes_equal_up_to_reversal,
    compose,
    end,
    invert,
    standard_form,
    vertex_sequence,
)

RNG_NAME = "mersenne-twister(MT19937)"


# -- triangulation generators ------------------------------------------------


def polygon_triangulation(rng: random.Random, corners: int) -> Triangulation:
    """Random triangulation of a disk with ``corners`` boundary marked
    points, by repeatedly cutting random ears."""
    segs = [f"e{i}" for i in range(corners)]
    sides: list[tuple[str, str]] = [(BOUNDARY, s) for s in segs]
    triangles = []
    arcs = []
    diag = 0
    while len(sides) > 3:
        i = rng.randrange(len(sides))
        a = sides[i]
        b = sides[(i + 1) % len(sides)]
        label = f"d{diag}"
        diag += 1
        arcs.append(label)
        triangles.append(OrdinaryTriangle(f"T{len(triangles)}", (a, b, (ARC, label))))
        if (i + 1) % len(sides) > i:
            sides[i : i + 2] = [(ARC, label)]
        else:
            sides = sides[1:-1] + [(ARC, label)]
    triangles.append(OrdinaryTriangle(f"T{len(triangles)}", tuple(sides)))
    return Triangulation(frozenset(arcs), frozenset(segs), tuple(triangles))


def glue_segments(rng: random.Random, t: Triangulation, tries: int = 8) -> Triangulation:
    """Glue one random pair of boundary segments into a fresh arc; fall
    back to the input when the result fails validation."""
    segs = sorted(t.boundary_segments)
    for _ in range(tries):
        if len(segs) < 4:
            return t
        a, b = rng.sample(segs, 2)
        label = f"g.{a}.{b}"
        triangles = []
        for tri in t.triangles:
            if tri.self_folded:
                triangles.append(tri)
                continue
            sides = tuple(
                (ARC, label) if side in ((BOUNDARY, a), (BOUNDARY, b)) else side
                for side in tri.sides
            )
            triangles.append(OrdinaryTriangle(tri.name, sides))
        candidate = Triangulation(
            frozenset(t.arcs | {label}),
            frozenset(t.boundary_segments - {a, b}),
            tuple(triangles),
        )
        if not validate_signature_zero(candidate):
            return candidate
    return t


def puncture_triangle(
    rng: random.Random, t: Triangulation, name: str, index: int
) -> Triangulation:
    """Replace one ordinary triangle by a self-folded triangle plus two
    ordinary ones, enclosing a new puncture."""
    tri = t.triangle(name)
    assert not tri.self_folded
    s = tri.sides
    i = rng.randrange(3)  # anchor corner between sides i-1 and i
    loop, radius, diag = f"l.{index}", f"r.{index}", f"dg.{index}"
    sf = SelfFoldedTriangle(f"p{index}", loop, radius)
    if rng.random() < 0.5:
        loop_tri = OrdinaryTriangle(f"{name}.L{index}", (s[i], (ARC, diag), (ARC, loop)))
        other = OrdinaryTriangle(f"{name}.O{index}", (s[(i + 1) % 3], s[(i + 2) % 3], (ARC, diag)))
    else:
        loop_tri = OrdinaryTriangle(f"{name}.L{index}", ((ARC, diag), s[(i - 1) % 3], (ARC, loop)))
        other = OrdinaryTriangle(f"{name}.O{index}", (s[i], s[(i + 1) % 3], (ARC, diag)))
    triangles = tuple(x for x in t.triangles if x.name != name) + (sf, loop_tri, other)
    return Triangulation(
        frozenset(t.arcs | {loop, radius, diag}), t.boundary_segments, triangles
    )


def random_flippable_moves(rng: random.Random, t: Triangulation) -> list[FlipMove]:
    moves = []
    radii = {tri.radius for tri in t.triangles if tri.self_folded}
    loops = {tri.loop for tri in t.triangles if tri.self_folded}
    for arc in sorted(t.arcs - radii - loops):
        owners = {tri.name for tri in t.triangles for side in tri.sides if side == (ARC, arc)}
        if len(owners) == 2:
            moves.append(FlipMove(STANDARD, arc))
    for tri in t.triangles:
        if tri.self_folded:
            moves.append(FlipMove(DOUBLE, tri.name))
    rng.shuffle(moves)
    return moves


def random_triangulation(
    rng: random.Random,
    max_triangles: int = 12,
    max_punctures: int = 4,
    min_punctures: int = 1,
    stir_flips: int = 2,
) -> Triangulation:
    """A random connected signature-zero triangulation within the size
    bounds; always validated before being returned."""
    while True:
        corners = rng.randint(4, 9)
        t = polygon_triangulation(rng, corners)
        if rng.random() < 0.5 and len(t.boundary_segments) >= 5:
            t = glue_segments(rng, t)
        room = (max_triangles - len(t.triangles)) // 2
        punctures = rng.randint(min_punctures, max(min_punctures, min(max_punctures, room)))
        for k in range(punctures):
            ordinary = [x.name for x in t.triangles if not x.self_folded]
            t = puncture_triangle(rng, t, rng.choice(ordinary), k)
        for _ in range(rng.randint(0, stir_flips)):
            moves = random_flippable_moves(rng, t)
            if not moves:
                break
            try:
                t = flip(t, moves[0])
            except (NotFlippableError, InputError):
                break
        if len(t.triangles) <= max_triangles and not validate_signature_zero(t):
            return t


# -- walk generators ---------------------------------------------------------


def _step_options(g: LeafyDualGraph, here: str, avoid: str | None) -> list[str]:
    options = []
    for e in g.graph.edges_at(here):
        if e == avoid or g.edge_kind[e][0] == "leaf":
            continue
        options.append(e)
    return options


def random_open_walk(
    rng: random.Random, g: LeafyDualGraph, max_len: int = 60, tries: int = 60
) -> Walk:
    """A random standard-form walk between boundary-segment vertices."""
    segs = g.segment_vertices
    for _ in range(tries):
        start = rng.choice(segs)
        here = start
        edges: list[str] = []
        prev = None
        for _ in range(max_len):
            options = _step_options(g, here, prev)
            if not options:
                break
            e = rng.choice(options)
            edges.append(e)
            here = g.graph.other_end(e, here)
            prev = e
            if g.vertex_kind[here][0] == "seg" and edges:
                if rng.random() < 0.6 or len(edges) >= max_len - 1:
                    return Walk(start, tuple(edges))
                break  # valency one: nothing to extend anyway
        if edges and g.vertex_kind[here][0] == "seg":
            return Walk(start, tuple(edges))
    raise InputError("could not sample an open walk (graph too small?)")


def random_closed_class(
    rng: random.Random, g: LeafyDualGraph, max_len: int = 60, tries: int = 200
) -> ClosedWalkClass:
    candidates = [v for v, k in g.vertex_kind.items() if k[0] in ("tri", "w")]
    for _ in range(tries):
        start = rng.choice(candidates)
        here = start
        edges: list[str] = []
        prev = None
        for _ in range(max_len):
            options = _step_options(g, here, prev)
            if not options:
                break
            e = rng.choice(options)
            edges.append(e)
            here = g.graph.other_end(e, here)
            prev = e
            if here == start and len(edges) >= 2 and edges[0] != edges[-1]:
                if rng.random() < 0.5:
                    break
        if here == start and len(edges) >= 2 and edges[0] != edges[-1]:
            try:
                return canonical_closed(g, Walk(start, tuple(edges)))
            except ContractibleError:
                continue
    raise InputError("could not sample a closed walk")


def _self_folded_names(g: LeafyDualGraph) -> list[str]:
    return [v[2:] for v in g.self_folded_vertices]


def _loop_dual_edge(g: LeafyDualGraph, sf: str) -> str:
    tv = f"t:{sf}"
    (lam,) = [e for e in g.graph.edges_at(tv) if g.edge_kind[e][0] == ARC]
    return lam


def _random_path_to(
    rng: random.Random,
    g: LeafyDualGraph,
    start: str,
    target: str,
    max_len: int,
    tries: int = 80,
) -> Walk | None:
    for _ in range(tries):
        here = start
        edges: list[str] = []
        prev = None
        for _ in range(max_len):
            if here == target:
                return standard_form(g, start, edges)
            options = _step_options(g, here, prev)
            if not options:
                break
            e = rng.choice(options)
            edges.append(e)
            here = g.graph.other_end(e, here)
            prev = e
        if here == target:
            return standard_form(g, start, edges)
    return None


def inject_kink_walk(
    rng: random.Random,
    g: LeafyDualGraph,
    multiplicity: int,
    flank_len: int = 2,
    pad: int = 8,
    tries: int = 60,
) -> tuple[Walk, Kink] | None:
    """Construct an open walk containing a kink of the requested
    multiplicity, returning the walk and the planted occurrence."""
    names = _self_folded_names(g)
    if not names:
        return None
    for _ in range(tries):
        sf = rng.choice(names)
        eta1, eta2 = g.eta_edges(sf)
        lam = _loop_dual_edge(g, sf)
        order = rng.choice([(eta1, eta2), (eta2, eta1)])
        if multiplicity == 1:
            # flanks: a backtrack-free path f_1..f_r into t:sf with f_r = lam
            r = rng.randint(1, max(1, flank_len))
            flank = [lam]
            here = g.graph.other_end(lam, f"t:{sf}")
            ok = True
            for _ in range(r - 1):
                options = [
                    e
                    for e in _step_options(g, here, flank[-1])
                    if g.vertex_kind[g.graph.other_end(e, here)][0] in ("tri", "w")
                ]
                if not options:
                    ok = False
                    break
                e = rng.choice(options)
                flank.append(e)
                here = g.graph.other_end(e, here)
            if not ok or g.graph.valency(here) != 3:
                continue
            flank.reverse()  # now f_1 .. f_r with f_r = lam
            first = flank[0]
            outer = here
            core_sign = Sign.MINUS if order == (eta1, eta2) else Sign.PLUS
            e_j = g.graph.turn(first, outer, core_sign.flipped())
            e_m = g.graph.turn(first, outer, core_sign)
            segment = [e_j] + flank + list(order) + list(reversed(flank)) + [e_m]
            seg_start = g.graph.other_end(e_j, outer)
        else:
            r = multiplicity - 1
            segment = [lam] + list(order) * (r + 1) + [lam]
            seg_start = g.graph.other_end(lam, f"t:{sf}")
        walk = _pad_to_segments(rng, g, segment, seg_start, pad)
        if walk is None:
            continue
        for kink in find_kinks(g, walk):
            if kink.triangle == sf and kink.multiplicity == multiplicity:
                return walk, kink
    return None


def _pad_to_segments(
    rng: random.Random,
    g: LeafyDualGraph,
    segment: list[str],
    seg_start: str,
    pad: int,
    tries: int = 40,
) -> Walk | None:
    """Extend an edge segment on both sides until both endpoints are
    boundary-segment vertices, without disturbing the segment."""
    seg_end = seg_start
    for e in segment:
        seg_end = g.graph.other_end(e, seg_end)
    for _ in range(tries):
        left: list[str] = []
        here = seg_start
        prev = segment[0]
        for _ in range(pad * 4):
            if g.vertex_kind[here][0] == "seg":
                break
            options = _step_options(g, here, prev)
            if not options:
                break
            e = rng.choice(options)
            left.append(e)
            here = g.graph.other_end(e, here)
            prev = e
        if g.vertex_kind[here][0] != "seg":
            continue
        right: list[str] = []
        here2 = seg_end
        prev = segment[-1]
        for _ in range(pad * 4):
            if g.vertex_kind[here2][0] == "seg":
                break
            options = _step_options(g, here2, prev)
            if not options:
                break
            e = rng.choice(options)
            right.append(e)
            here2 = g.graph.other_end(e, here2)
            prev = e
        if g.vertex_kind[here2][0] != "seg":
            continue
        word = list(reversed(left)) + segment + right
        candidate = standard_form(g, here, word)
        if candidate.edges and tuple(segment) in _windows(candidate.edges, len(segment)):
            return candidate
    return None


def _windows(edges: tuple[str, ...], size: int) -> set[tuple[str, ...]]:
    return {edges[i : i + size] for i in range(len(edges) - size + 1)}


def random_strategies(rng: random.Random, count: int = 10):
    out = []
    for _ in range(count):
        sub = random.Random(rng.getrandbits(64))
        out.append(lambda kinks, sub=sub: sub.choice(list(kinks)))
    return out


# -- suites -------------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    cases: int
    failures: list[str] = field(default_factory=list)
    notes: str = ""

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "ok" if self.passed else f"FAIL({len(self.failures)})"
        note = f" {self.notes}" if self.notes else ""
        return f"{self.name}: {status} cases={self.cases}{note}"


@dataclass
class ResolutionRecord:
    multiplicity: int
    length_drop: int
    mult_drop: int | None  # None when not tracked (closed canonical shift)


def _sample_graph(rng: random.Random, pool: list[tuple[Triangulation, LeafyDualGraph]]):
    return rng.choice(pool)


def build_pool(rng: random.Random, count: int, **kwargs) -> list[tuple[Triangulation, LeafyDualGraph]]:
    pool = []
    for _ in range(count):
        t = random_triangulation(rng, **kwargs)
        pool.append((t, leafy_dual_graph(t)))
    return pool


def _is_pure_eta_cycle(g: LeafyDualGraph, c: ClosedWalkClass) -> bool:
    return all(g.edge_kind[e][0] == "eta" for e in c.edges)


@dataclass
class ConfluenceStats:
    degenerate_open: int = 0
    degenerate_closed: int = 0
    as_stated_violations: int = 0


def _confluence_one(
    g: LeafyDualGraph,
    walk,
    strategies,
    records: list[ResolutionRecord],
    stats: ConfluenceStats,
) -> str | None:
    """Normalize under every strategy and compare the results.

    Strategy independence holds away from the torsion classes: open-walk
    results may differ only for loops of order two in the quotient (where
    both core orientations are kink-free), and closed-walk results may
    differ beyond reversal only on pure eta power cycles (puncture-loop
    powers).  Everything else must agree exactly.
    """
    closed = isinstance(walk, ClosedWalkClass)
    results = []
    for pick in strategies:
        nf, steps = normalize_with_trace(g, walk, pick)
        results.append(nf)
        current = walk
        for st in steps:
            mult_drop = None
            if not closed:
                after_kinks = find_kinks(g, st.result)
                survivor = [
                    k
                    for k in after_kinks
                    if k.triangle == st.kink.triangle
                    and k.j == st.kink.j
                    and k.multiplicity < st.kink.multiplicity
                ]
                mult_drop = st.kink.multiplicity - (survivor[0].multiplicity if survivor else 0)
            records.append(
                ResolutionRecord(st.kink.multiplicity, st.length_before - st.length_after, mult_drop)
            )
            current = st.result
    base = results[0]
    disagreement = False
    for other in results[1:]:
        if find_kinks(g, other):
            return "normal form still has kinks"
        if closed:
            if not classes_equal_up_to_reversal(g, base, other):
                disagreement = True
                if not (_is_pure_eta_cycle(g, base) and _is_pure_eta_cycle(g, other)):
                    return f"closed normal forms diverge: {base} vs {other}"
        else:
            if base != other:
                disagreement = True
                if not orbifold_equal(g, base, other):
                    return f"open normal forms leave the class: {base} vs {other}"
                is_loop = end(g, walk) == walk.start
                if not (is_loop and is_order_two(g, walk)):
                    return f"open normal forms diverge off the torsion classes: {base} vs {other}"
    if disagreement:
        stats.as_stated_violations += 1
        if closed:
            stats.degenerate_closed += 1
        else:
            stats.degenerate_open += 1
    return None


def _random_walkish(rng, g, closed_share=0.3, max_len=60):
    roll = rng.random()
    if roll < closed_share:
        return random_closed_class(rng, g, max_len=max_len)
    if roll < closed_share + 0.35:
        planted = inject_kink_walk(rng, g, rng.choice([1, 2, 2, 3, 4]))
        if planted is not None:
            return planted[0]
    return random_open_walk(rng, g, max_len=max_len)


def suite_confluence(
    rng: random.Random,
    cases: int,
    strategies_per_case: int = 10,
    pool=None,
    max_len: int = 60,
    records: list[ResolutionRecord] | None = None,
    stats: ConfluenceStats | None = None,
) -> SuiteResult:
    """Global confluence: the normal form does not depend on the
    resolution strategy, away from the order-two/torsion classes (where
    only the documented two-orientation ambiguity may appear)."""
    result = SuiteResult("confluence", cases)
    pool = pool or build_pool(rng, max(1, cases // 500))
    records = records if records is not None else []
    stats = stats if stats is not None else ConfluenceStats()
    for i in range(cases):
        t, g = _sample_graph(rng, pool)
        try:
            walk = _random_walkish(rng, g, max_len=max_len)
        except InputError:
            continue
        strategies = random_strategies(rng, strategies_per_case)
        problem = _confluence_one(g, walk, strategies, records, stats)
        if problem:
            result.failures.append(f"case {i}: {problem}")
    result.notes = (
        f"resolutions={len(records)} torsion-ambiguous={stats.as_stated_violations}"
    )
    return result


def check_drop_records(records: list[ResolutionRecord]) -> list[str]:
    """The length/multiplicity drop rules, one check per recorded
    resolution."""
    problems = []
    for i, rec in enumerate(records):
        if rec.multiplicity == 1 and rec.length_drop != 0:
            problems.append(f"record {i}: multiplicity 1 changed length by {rec.length_drop}")
        if rec.multiplicity == 2 and rec.length_drop < 4:
            problems.append(f"record {i}: multiplicity 2 dropped only {rec.length_drop}")
        if rec.multiplicity == 3:
            if rec.length_drop != 4:
                problems.append(f"record {i}: multiplicity 3 dropped {rec.length_drop} != 4")
            if rec.mult_drop is not None and rec.mult_drop not in (2, 3):
                problems.append(f"record {i}: multiplicity 3 mult-drop {rec.mult_drop}")
        if rec.multiplicity > 3:
            if rec.length_drop != 4:
                problems.append(f"record {i}: multiplicity {rec.multiplicity} dropped {rec.length_drop} != 4")
            if rec.mult_drop is not None and rec.mult_drop != 2:
                problems.append(f"record {i}: multiplicity {rec.multiplicity} mult-drop {rec.mult_drop} != 2")
    return problems


def suite_drop_lemmas(records: list[ResolutionRecord]) -> SuiteResult:
    result = SuiteResult("drop-lemmas", len(records))
    result.failures = check_drop_records(records)
    return result


def suite_resolution_steps(rng: random.Random, cases: int, pool=None) -> SuiteResult:
    """Single resolutions remove the resolved occurrence and never grow
    the walk; the historical strict-multiplicity-decrease claim is only
    counted (cancellation can merge eta runs into a new kink)."""
    result = SuiteResult("resolution-steps", cases)
    pool = pool or build_pool(rng, max(1, cases // 200))
    done = 0
    non_decreasing = 0
    while done < cases:
        t, g = _sample_graph(rng, pool)
        planted = inject_kink_walk(rng, g, rng.choice([1, 2, 3, 4]))
        if planted is None:
            continue
        walk, _ = planted
        kinks = find_kinks(g, walk)
        before = total_multiplicity(kinks)
        kink = rng.choice(kinks)
        resolved = resolve_kink(g, walk, kink)
        after_kinks = find_kinks(g, resolved)
        if len(resolved) > len(walk):
            result.failures.append(f"case {done}: resolution grew the walk")
        if kink.multiplicity == 1 and len(resolved) != len(walk):
            result.failures.append(f"case {done}: multiplicity-1 resolution changed length")
        if kink.multiplicity >= 2 and len(walk) - len(resolved) < 4:
            result.failures.append(f"case {done}: multiplicity>=2 resolution dropped < 4")
        if any(k == kink for k in after_kinks):
            result.failures.append(f"case {done}: resolved occurrence survived")
        if total_multiplicity(after_kinks) >= before:
            non_decreasing += 1
        done += 1
    result.notes = f"multiplicity-non-decreasing={non_decreasing}"
    return result


def count_strict_decrease_violations(
    rng: random.Random, cases: int, pool=None
) -> tuple[int, int]:
    """(steps, violations) of the strict total-multiplicity decrease claim
    over random normalizations; nonzero violations are expected."""
    pool = pool or build_pool(rng, max(1, cases // 200))
    steps = violations = 0
    for _ in range(cases):
        t, g = _sample_graph(rng, pool)
        try:
            walk = _random_walkish(rng, g)
        except InputError:
            continue
        current = walk
        while True:
            kinks = find_kinks(g, current)
            if not kinks:
                break
            before = total_multiplicity(kinks)
            current = resolve_kink(g, current, rng.choice(kinks))
            steps += 1
            if total_multiplicity(find_kinks(g, current)) >= before:
                violations += 1
    return steps, violations


def suite_k_membership(rng: random.Random, cases: int, pool=None) -> SuiteResult:
    """Products of conjugated squares normalize to the identity; kink-free
    non-identity walks do not."""
    result = SuiteResult("k-membership", cases)
    pool = pool or build_pool(rng, max(1, cases // 200))
    done = 0
    while done < cases:
        t, g = _sample_graph(rng, pool)
        names = _self_folded_names(g)
        if not names:
            continue
        u = rng.choice(g.segment_vertices)
        factors = rng.randint(1, 5)
        product = Walk(u, ())
        ok = True
        for _ in range(factors):
            sf = rng.choice(names)
            c = _random_path_to(rng, g, u, f"t:{sf}", max_len=30)
            if c is None:
                ok = False
                break
            gamma = loop_generator(g, u, sf, c)
            product = compose(g, product, compose(g, gamma, gamma))
        if not ok:
            continue
        nf = normalize(g, product)
        if not (isinstance(nf, Walk) and nf.is_identity):
            result.failures.append(f"case {done}: square product not trivial: {nf}")
        try:
            w = random_open_walk(rng, g, max_len=40)
        except InputError:
            continue
        free = normalize(g, w)
        if isinstance(free, Walk) and not free.is_identity:
            again = normalize(g, free)
            if again != free or find_kinks(g, free):
                result.failures.append(f"case {done}: kink-free walk moved under normalize")
        done += 1
    return result


def suite_section(rng: random.Random, cases: int, pool=None) -> SuiteResult:
    """iota lands on kink-free walks, stays in the same class, idempotent."""
    result = SuiteResult("section", cases)
    pool = pool or build_pool(rng, max(1, cases // 200))
    done = 0
    while done < cases:
        t, g = _sample_graph(rng, pool)
        try:
            walk = _random_walkish(rng, g, closed_share=0.0, max_len=50)
        except InputError:
            continue
        if end(g, walk) == walk.start and is_order_two(g, walk):
            continue
        image = iota(g, walk)
        if find_kinks(g, image):
            result.failures.append(f"case {done}: iota image has kinks")
        if not orbifold_equal(g, image, walk):
            result.failures.append(f"case {done}: iota left the class")
        if iota(g, image) != image:
            result.failures.append(f"case {done}: iota not idempotent")
        done += 1
    return result


def suite_order_two(rng: random.Random, cases: int, pool=None) -> SuiteResult:
    result = SuiteResult("order-two", cases)
    pool = pool or build_pool(rng, max(1, cases // 200))
    done = 0
    while done < cases:
        t, g = _sample_graph(rng, pool)
        names = _self_folded_names(g)
        if not names:
            continue
        u = rng.choice(g.segment_vertices)
        sf = rng.choice(names)
        c = _random_path_to(rng, g, u, f"t:{sf}", max_len=30)
        if c is None:
            continue
        gamma = loop_generator(g, u, sf, c)
        if not is_order_two(g, gamma):
            result.failures.append(f"case {done}: generator not order two")
        # a random loop is order two iff it is nontrivial with trivial square
        try:
            w = random_open_walk(rng, g, max_len=30)
            back = random_open_walk(rng, g, max_len=30)
        except InputError:
            continue
        if back.start == end(g, w) and end(g, back) == w.start:
            loop = compose(g, w, back)
        else:
            loop = compose(g, w, invert(g, w))
        if rng.random() < 0.3:
            loop = compose(g, loop, gamma if loop.start == u else loop)
        if end(g, loop) != loop.start or g.vertex_kind[loop.start][0] != "seg":
            continue
        claimed = is_order_two(g, loop)
        square = normalize(g, compose(g, loop, loop))
        square_trivial = isinstance(square, Walk) and square.is_identity
        nf = normalize(g, loop)
        nontrivial = not (isinstance(nf, Walk) and nf.is_identity)
        if claimed != (square_trivial and nontrivial):
            result.failures.append(f"case {done}: order-two detection inconsistent")
        done += 1
    return result


def suite_flips(rng: random.Random, cases: int, pool=None) -> SuiteResult:
    """Transport round trips exactly, preserves kink presence, and
    preserves orbifold equality."""
    result = SuiteResult("flip-invariance", cases)
    pool = pool or build_pool(rng, max(1, cases // 100))
    done = 0
    while done < cases:
        t, g = _sample_graph(rng, pool)
        moves = random_flippable_moves(rng, t)
        if not moves:
            continue
        move = moves[0]
        try:
            walk = _random_walkish(rng, g, max_len=40)
        except InputError:
            continue
        t2 = flip(t, move)
        g2 = leafy_dual_graph(t2)
        try:
            moved = transport_walk(t, move, walk)
        except InputError:
            continue
        back_move = _inverse_move(t, t2, move)
        t3 = flip(t2, back_move)
        returned = transport_walk(t2, back_move, moved)
        if not _same_up_to_relabel(g, t3, t, walk, returned):
            result.failures.append(f"case {done}: round trip changed the walk")
        if bool(find_kinks(g, walk)) != bool(find_kinks(g2, moved)):
            result.failures.append(f"case {done}: kink presence changed across flip")
        if isinstance(walk, Walk):
            try:
                other = random_open_walk(rng, g, max_len=40)
            except InputError:
                done += 1
                continue
            if other.start == walk.start and end(g, other) == end(g, walk):
                lhs = orbifold_equal(g, walk, other)
                rhs = orbifold_equal(g2, moved, transport_walk(t, move, other))
                if lhs != rhs:
                    result.failures.append(f"case {done}: orbifold equality changed")
        done += 1
    return result


def _inverse_move(t_old: Triangulation, t_new: Triangulation, move: FlipMove) -> FlipMove:
    if move.kind == DOUBLE:
        return move
    (new_arc,) = t_new.arcs - t_old.arcs
    return FlipMove(STANDARD, new_arc)


def _same_up_to_relabel(g, t_back: Triangulation, t_orig: Triangulation, original, returned) -> bool:
    """Compare a round-tripped walk with the original; a round trip only
    re-suffixes the flipped arc labels, so match arcs by suffix stem."""
    stems = {a.split("@")[0]: a for a in t_orig.arcs - t_back.arcs}
    mapping = {}
    for arc in t_back.arcs - t_orig.arcs:
        old = stems.get(arc.split("@")[0])
        if old:
            mapping[f"a:{arc}"] = f"a:{old}"

    def remap(edges):
        return tuple(mapping.get(e, e) for e in edges)

    if isinstance(original, ClosedWalkClass):
        remapped = canonical_closed(g, Walk(returned.start, remap(returned.edges)))
        return remapped == original
    return returned.start == original.start and remap(returned.edges) == original.edges


def suite_key_lemma(rng: random.Random, cases: int, pool=None) -> SuiteResult:
    result = SuiteResult("key-lemma", cases)
    pool = pool or build_pool(rng, max(1, cases // 50))
    done = 0
    attempts = 0
    while done < cases and attempts < cases * 60:
        attempts += 1
        t, g = _sample_graph(rng, pool)
        planted = inject_kink_walk(rng, g, rng.choice([1, 2, 3]))
        if planted is None:
            continue
        f, kink = planted
        if kink.j < 2 or kink.m > len(f.edges) or len(f.edges) < 3:
            continue
        u1 = vertex_sequence(g, f)[1]
        if g.graph.valency(u1) != 3:
            continue
        e1, e2 = f.edges[0], f.edges[1]
        third = [e for e in g.graph.edges_at(u1) if e not in (e1, e2)]
        if not third:
            continue
        d1 = third[0]
        w0 = g.graph.other_end(d1, u1)
        if g.vertex_kind[w0][0] not in ("tri", "seg") or f"t:" + kink.triangle == w0:
            continue
        if w0 in g.self_folded_vertices:
            continue
        h = Walk(end(g, f), tuple(reversed(f.edges[1:])) + (d1,))
        try:
            report = check_key_lemma(g, f, h)
        except InputError:
            continue
        if not report.passed:
            result.failures.append(f"case {done}: key lemma instance failed")
        done += 1
    result.cases = done
    return result


def suite_local_confluence(rng: random.Random, cases: int, pool=None) -> SuiteResult:
    """Constructive local confluence: all resolution orders of a small
    instance terminate at one form (one up to reversal when closed)."""
    result = SuiteResult("local-confluence", cases)
    pool = pool or build_pool(rng, max(1, cases // 50))
    done = 0
    attempts = 0
    while done < cases and attempts < cases * 80:
        attempts += 1
        t, g = _sample_graph(rng, pool)
        planted = inject_kink_walk(rng, g, rng.choice([2, 3]))
        if planted is None:
            continue
        walk, _ = planted
        extra = inject_kink_walk(rng, g, 1)
        kinks = find_kinks(g, walk)
        if len(kinks) < 2 and extra is not None:
            walk = extra[0]
            kinks = find_kinks(g, walk)
        if len(kinks) < 1:
            continue
        terminals = explore_all_terminal_forms(g, walk, cap=400)
        if terminals is None:
            continue
        if isinstance(walk, ClosedWalkClass):
            base = next(iter(terminals))
            if any(not classes_equal_up_to_reversal(g, base, o) for o in terminals):
                result.failures.append(f"case {done}: terminal forms differ")
        elif len(terminals) != 1:
            result.failures.append(f"case {done}: {len(terminals)} terminal forms")
        done += 1
    result.cases = done
    return result


def explore_all_terminal_forms(g: LeafyDualGraph, walk, cap: int = 500):
    """Exhaust every resolution sequence; the set of kink-free endpoints.
    Returns None when the search exceeds ``cap`` states."""
    seen = {}
    stack = [walk]
    terminals = set()
    while stack:
        if len(seen) > cap:
            return None
        node = stack.pop()
        if node in seen:
            continue
        seen[node] = True
        kinks = find_kinks(g, node)
        if not kinks:
            terminals.add(node)
            continue
        for kink in kinks:
            stack.append(resolve_kink(g, node, kink))
    return terminals


ALL_SUITES = (
    "confluence",
    "drop-lemmas",
    "strict-decrease",
    "local-confluence",
    "k-membership",
    "section",
    "order-two",
    "flip-invariance",
    "key-lemma",
)


def run_selftest(seed: int, cases: int) -> list[SuiteResult]:
    """The seeded property suites; sizes scale with ``cases``."""
    if cases <= 0:
        return []
    rng = random.Random(seed)
    pool = build_pool(rng, max(2, min(20, cases // 50 + 2)))
    records: list[ResolutionRecord] = []
    results = [
        suite_confluence(rng, cases, pool=pool, records=records),
        suite_drop_lemmas(records),
        suite_strict_decrease(rng, max(1, cases // 4), pool=pool),
        suite_local_confluence(rng, max(1, cases // 20), pool=pool),
        suite_k_membership(rng, max(1, cases // 4), pool=pool),
        suite_section(rng, max(1, cases // 4), pool=pool),
        suite_order_two(rng, max(1, cases // 4), pool=pool),
        suite_flips(rng, max(1, cases // 4), pool=pool),
        suite_key_lemma(rng, max(1, cases // 10), pool=pool),
    ]
    return results
