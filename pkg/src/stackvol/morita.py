"""Bibundles, linking groupoids, and exact volume transfer.

Two finite groupoids are Morita equivalent when an invertible bibundle
connects them.  The computational route for transfer goes through the
linking groupoid: the disjoint object sets of both groupoids become one
groupoid whose extra arrows are the bibundle elements and their formal
inverses.  Both object sets are full in the linking groupoid, so an
invariant section extends from one side and restricts to the other; the
volumes computed with corresponding weights then agree exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationFailure, ValidationReport
from .finite import (
    FiniteGroupoid,
    UndefinedComposition,
    WeightData,
    block_groupoid,
    disjoint_union,
    fiber_volume,
    invariant_section,
    orbits,
    random_invariant_weights,
    restrict_to_objects,
)
from .groups import group_zoo

LEFT = "L"
RIGHT = "R"
BRIDGE = "B"
BRIDGE_INV = "Bi"


class UndefinedAction(KeyError):
    """Raised by a bibundle action on a non-composable pair."""


class InvalidBibundleError(ValidationFailure):
    """The bibundle data fails an axiom or is not biprincipal."""


class NotFullError(ValidationFailure):
    """An object subset misses some orbit, so sections cannot extend."""


class InconsistentSectionError(ValidationFailure):
    """A partial section takes two values on one orbit."""


class SectionMismatchError(ValidationFailure):
    """Weights on the two sides do not correspond under the bibundle."""


class Bibundle:
    """A two-sided action space between two groupoids.

    ``left_anchor`` lands in the objects of the left groupoid and
    ``right_anchor`` in those of the right one.  The left action of an
    arrow g is defined exactly when r(g) equals the left anchor, the
    right action of an arrow h exactly when the right anchor equals l(h).
    Actions may be dicts keyed by (arrow, element) resp. (element, arrow)
    or callables raising :class:`UndefinedAction`.
    """

    def __init__(self, elements, left_anchor, right_anchor, left_action, right_action):
        self.elements = tuple(elements)
        self.element_set = frozenset(self.elements)
        if len(self.element_set) != len(self.elements):
            raise ValueError("duplicate bibundle elements")
        self.left_anchor = dict(left_anchor)
        self.right_anchor = dict(right_anchor)
        if set(self.left_anchor) != self.element_set or set(self.right_anchor) != self.element_set:
            raise ValueError("anchors must cover exactly the elements")
        self._left_table = dict(left_action) if isinstance(left_action, dict) else None
        self._right_table = dict(right_action) if isinstance(right_action, dict) else None
        self._left_fn = left_action if self._left_table is None else None
        self._right_fn = right_action if self._right_table is None else None

    def left_act(self, g, b):
        if self._left_table is not None:
            try:
                return self._left_table[(g, b)]
            except KeyError:
                raise UndefinedAction((g, b)) from None
        return self._left_fn(g, b)

    def right_act(self, b, h):
        if self._right_table is not None:
            try:
                return self._right_table[(b, h)]
            except KeyError:
                raise UndefinedAction((b, h)) from None
        return self._right_fn(b, h)

    def __repr__(self):
        return f"Bibundle({len(self.elements)} elements)"


# ---------------------------------------------------------------------------
# validation


def validate_bibundle(g1: FiniteGroupoid, g2: FiniteGroupoid, bib: Bibundle) -> ValidationReport:
    """Exhaustive bibundle check: actions, anchors, and biprincipality."""
    report = ValidationReport()

    for b in bib.elements:
        if not g1.has_object(bib.left_anchor[b]):
            report.add("anchor range", (b,), "left anchor leaves the left object set")
        if not g2.has_object(bib.right_anchor[b]):
            report.add("anchor range", (b,), "right anchor leaves the right object set")
    if not report.ok:
        return report

    hit_left = set(bib.left_anchor.values())
    for x in g1.objects:
        if x not in hit_left:
            report.add("anchor not surjective", (x,), "left anchor misses this object")
    hit_right = set(bib.right_anchor.values())
    for y in g2.objects:
        if y not in hit_right:
            report.add("anchor not surjective", (y,), "right anchor misses this object")

    left_moves = {}
    for b in bib.elements:
        for g in g1.arrows_into(bib.left_anchor[b]):
            try:
                b2 = bib.left_act(g, b)
            except UndefinedAction:
                report.add("left action domain", (g, b), "defined pair rejected")
                continue
            if b2 not in bib.element_set:
                report.add("left action range", (g, b))
                continue
            if bib.left_anchor[b2] != g1.l(g) or bib.right_anchor[b2] != bib.right_anchor[b]:
                report.add("left action anchors", (g, b, b2))
            left_moves[(g, b)] = b2

    right_moves = {}
    for b in bib.elements:
        for h in g2.arrows_from(bib.right_anchor[b]):
            try:
                b2 = bib.right_act(b, h)
            except UndefinedAction:
                report.add("right action domain", (b, h), "defined pair rejected")
                continue
            if b2 not in bib.element_set:
                report.add("right action range", (b, h))
                continue
            if bib.right_anchor[b2] != g2.r(h) or bib.left_anchor[b2] != bib.left_anchor[b]:
                report.add("right action anchors", (b, h, b2))
            right_moves[(b, h)] = b2

    if bib._left_table is not None:
        for (g, b) in bib._left_table:
            defined = (
                b in bib.element_set
                and g in g1.arrow_ids
                and g1.r(g) == bib.left_anchor[b]
            )
            if not defined:
                report.add("left action domain", (g, b), "entry outside the defined domain")
    if bib._right_table is not None:
        for (b, h) in bib._right_table:
            defined = (
                b in bib.element_set
                and h in g2.arrow_ids
                and bib.right_anchor[b] == g2.l(h)
            )
            if not defined:
                report.add("right action domain", (b, h), "entry outside the defined domain")

    for b in bib.elements:
        e1 = g1.identity(bib.left_anchor[b])
        if left_moves.get((e1, b)) != b:
            report.add("left action unit", (b,))
        e2 = g2.identity(bib.right_anchor[b])
        if right_moves.get((b, e2)) != b:
            report.add("right action unit", (b,))

    for (g, b), gb in left_moves.items():
        for g0 in g1.arrows_into(g1.l(g)):
            lhs = left_moves.get((g1.compose(g0, g), b))
            rhs = left_moves.get((g0, gb))
            if lhs != rhs or lhs is None:
                report.add("left action compatibility", (g0, g, b))
    for (b, h), bh in right_moves.items():
        for h2 in g2.arrows_from(g2.r(h)):
            lhs = right_moves.get((b, g2.compose(h, h2)))
            rhs = right_moves.get((bh, h2))
            if lhs != rhs or lhs is None:
                report.add("right action compatibility", (b, h, h2))

    for (g, b), gb in left_moves.items():
        for h in g2.arrows_from(bib.right_anchor[b]):
            one = right_moves.get((gb, h))
            mid = right_moves.get((b, h))
            other = left_moves.get((g, mid)) if mid is not None else None
            if one != other or one is None:
                report.add("actions do not commute", (g, b, h))

    # biprincipality: for each element, acting by every arrow into its left
    # anchor must enumerate its whole right-anchor fiber exactly once, and
    # symmetrically for the right action on left-anchor fibers.
    right_fibers = {}
    for b in bib.elements:
        right_fibers.setdefault(bib.right_anchor[b], set()).add(b)
    left_fibers = {}
    for b in bib.elements:
        left_fibers.setdefault(bib.left_anchor[b], set()).add(b)

    for b in bib.elements:
        reached = []
        for g in g1.arrows_into(bib.left_anchor[b]):
            img = left_moves.get((g, b))
            if img is not None:
                reached.append(img)
        fiber = right_fibers[bib.right_anchor[b]]
        if len(set(reached)) != len(reached):
            report.add("left action not free", (b,))
        if set(reached) != fiber:
            missing = sorted(map(repr, fiber - set(reached)))
            report.add("left action not transitive", (b,), f"unreached: {missing}")

    for b in bib.elements:
        reached = []
        for h in g2.arrows_from(bib.right_anchor[b]):
            img = right_moves.get((b, h))
            if img is not None:
                reached.append(img)
        fiber = left_fibers[bib.left_anchor[b]]
        if len(set(reached)) != len(reached):
            report.add("right action not free", (b,))
        if set(reached) != fiber:
            missing = sorted(map(repr, fiber - set(reached)))
            report.add("right action not transitive", (b,), f"unreached: {missing}")

    return report


# ---------------------------------------------------------------------------
# linking groupoid


def linking_groupoid(g1: FiniteGroupoid, g2: FiniteGroupoid, bib: Bibundle) -> FiniteGroupoid:
    """The groupoid joining g1 and g2 through an invertible bibundle.

    Objects are the two object sets tagged LEFT/RIGHT; arrows are both
    arrow sets, the bibundle elements (running left to right), and their
    formal inverses.  The arrow count is therefore
    ``|g1| + |g2| + 2 * |bibundle|``.
    """
    validate_bibundle(g1, g2, bib).require(InvalidBibundleError, "invalid bibundle")

    # unique transports are well defined because the actions are principal
    left_transport = {}
    for b in bib.elements:
        for g in g1.arrows_into(bib.left_anchor[b]):
            left_transport[(b, bib.left_act(g, b))] = g
    right_transport = {}
    for b in bib.elements:
        for h in g2.arrows_from(bib.right_anchor[b]):
            right_transport[(b, bib.right_act(b, h))] = h

    objects = [(LEFT, x) for x in g1.objects] + [(RIGHT, y) for y in g2.objects]
    arrows = {}
    for a in g1.arrow_ids:
        arrows[(LEFT, a)] = ((LEFT, g1.l(a)), (LEFT, g1.r(a)))
    for a in g2.arrow_ids:
        arrows[(RIGHT, a)] = ((RIGHT, g2.l(a)), (RIGHT, g2.r(a)))
    for b in bib.elements:
        arrows[(BRIDGE, b)] = ((LEFT, bib.left_anchor[b]), (RIGHT, bib.right_anchor[b]))
        arrows[(BRIDGE_INV, b)] = ((RIGHT, bib.right_anchor[b]), (LEFT, bib.left_anchor[b]))

    identity = {}
    for x in g1.objects:
        identity[(LEFT, x)] = (LEFT, g1.identity(x))
    for y in g2.objects:
        identity[(RIGHT, y)] = (RIGHT, g2.identity(y))

    inverse = {}
    for a in g1.arrow_ids:
        inverse[(LEFT, a)] = (LEFT, g1.inverse(a))
    for a in g2.arrow_ids:
        inverse[(RIGHT, a)] = (RIGHT, g2.inverse(a))
    for b in bib.elements:
        inverse[(BRIDGE, b)] = (BRIDGE_INV, b)
        inverse[(BRIDGE_INV, b)] = (BRIDGE, b)

    def compose(p, q):
        if p not in arrows or q not in arrows or arrows[p][1] != arrows[q][0]:
            raise UndefinedComposition((p, q))
        tp, vp = p
        tq, vq = q
        if tp == LEFT and tq == LEFT:
            return (LEFT, g1.compose(vp, vq))
        if tp == RIGHT and tq == RIGHT:
            return (RIGHT, g2.compose(vp, vq))
        if tp == LEFT and tq == BRIDGE:
            return (BRIDGE, bib.left_act(vp, vq))
        if tp == BRIDGE and tq == RIGHT:
            return (BRIDGE, bib.right_act(vp, vq))
        if tp == BRIDGE_INV and tq == LEFT:
            # (inverse of b) then g equals the inverse of (g inverse acting on b)
            return (BRIDGE_INV, bib.left_act(g1.inverse(vq), vp))
        if tp == RIGHT and tq == BRIDGE_INV:
            return (BRIDGE_INV, bib.right_act(vq, g2.inverse(vp)))
        if tp == BRIDGE and tq == BRIDGE_INV:
            # unique left arrow carrying the second element to the first
            return (LEFT, left_transport[(vq, vp)])
        if tp == BRIDGE_INV and tq == BRIDGE:
            # unique right arrow carrying the first element to the second
            return (RIGHT, right_transport[(vp, vq)])
        raise UndefinedComposition((p, q))

    return FiniteGroupoid(objects, arrows, identity, inverse, compose)


def left_object_ids(g1: FiniteGroupoid):
    return [(LEFT, x) for x in g1.objects]


def right_object_ids(g2: FiniteGroupoid):
    return [(RIGHT, y) for y in g2.objects]


# ---------------------------------------------------------------------------
# restriction, extension, transfer


def restrict_full(g: FiniteGroupoid, keep) -> FiniteGroupoid:
    """Full subgroupoid on ``keep``; every orbit must meet ``keep``."""
    keep_set = set(keep)
    for orb in orbits(g):
        if not (orb.objects & keep_set):
            raise NotFullError(
                f"subset misses the orbit of {orb.representative!r}"
            )
    return restrict_to_objects(g, keep_set)


def extend_invariant_section(g: FiniteGroupoid, subset, partial: dict) -> dict:
    """Extend an orbit-constant section from a full subset to all objects."""
    subset_set = set(subset)
    result = {}
    for orb in orbits(g):
        seen = sorted(orb.objects & subset_set, key=repr)
        if not seen:
            raise NotFullError(f"subset misses the orbit of {orb.representative!r}")
        vals = {partial[x] for x in seen}
        if len(vals) > 1:
            raise InconsistentSectionError(
                f"section takes {len(vals)} values on the orbit of {orb.representative!r}"
            )
        val = vals.pop()
        for x in orb.objects:
            result[x] = val
    return result


def transfer_section(g1: FiniteGroupoid, g2: FiniteGroupoid, bib: Bibundle,
                     section: dict) -> dict:
    """Carry an invariant section of g1 to g2 through the linking groupoid."""
    for orb in orbits(g1):
        vals = {section[x] for x in orb.objects}
        if len(vals) > 1:
            raise InconsistentSectionError(
                f"input section is not constant on the orbit of {orb.representative!r}"
            )
    link = linking_groupoid(g1, g2, bib)
    lifted = {(LEFT, x): section[x] for x in g1.objects}
    extended = extend_invariant_section(link, left_object_ids(g1), lifted)
    return {y: extended[(RIGHT, y)] for y in g2.objects}


@dataclass(frozen=True)
class MoritaVolumeReport:
    equal: bool
    volume_left: Fraction
    volume_right: Fraction

    def __str__(self):
        rel = "==" if self.equal else "!="
        return f"volume {self.volume_left} {rel} {self.volume_right}"


def morita_volume_check(g1: FiniteGroupoid, g2: FiniteGroupoid, bib: Bibundle,
                        w1: WeightData, w2: WeightData) -> MoritaVolumeReport:
    """Verify that corresponding weights give exactly equal volumes.

    The sections b/a on both sides must be orbit-constant and must
    correspond under the bibundle transfer; otherwise
    :class:`SectionMismatchError` is raised.
    """
    section1 = {x: w1.ratio(x) for x in g1.objects}
    invariant_section(g1, w1)
    invariant_section(g2, w2)
    transferred = transfer_section(g1, g2, bib, section1)
    for y in g2.objects:
        if w2.ratio(y) != transferred[y]:
            raise SectionMismatchError(
                f"sections not corresponding at object {y!r}: "
                f"expected {transferred[y]}, got {w2.ratio(y)}"
            )
    v1 = fiber_volume(g1, w1)
    v2 = fiber_volume(g2, w2)
    return MoritaVolumeReport(v1 == v2, v1, v2)


# ---------------------------------------------------------------------------
# canonical bibundles


def identity_bibundle(g: FiniteGroupoid) -> Bibundle:
    """The groupoid acting on its own arrows by composition on both sides."""
    elements = list(g.arrow_ids)
    left_anchor = {a: g.l(a) for a in elements}
    right_anchor = {a: g.r(a) for a in elements}

    def left_act(arrow, b):
        return g.compose(arrow, b)

    def right_act(b, arrow):
        return g.compose(b, arrow)

    return Bibundle(elements, left_anchor, right_anchor, left_act, right_act)


def block_bibundle(points1, points2, group) -> Bibundle:
    """Canonical equivalence between two blocks sharing the same group.

    Elements are (x, y, gamma); the left block acts through its pair part
    and group part on the left, the right block symmetrically.  Matches
    the arrow layout of :func:`stackvol.finite.block_groupoid`.
    """
    pts1, pts2 = tuple(points1), tuple(points2)
    elements = [(x, y, gam) for x in pts1 for y in pts2 for gam in group.elements]
    left_anchor = {e: e[0] for e in elements}
    right_anchor = {e: e[1] for e in elements}
    element_set = set(elements)

    def left_act(g, b):
        x2, x1, gam1 = g
        x, y, gam = b
        if b not in element_set or x1 != x:
            raise UndefinedAction((g, b))
        return (x2, y, group.mult(gam1, gam))

    def right_act(b, h):
        x, y, gam = b
        y1, y2, gam2 = h
        if b not in element_set or y1 != y:
            raise UndefinedAction((b, h))
        return (x, y2, group.mult(gam, gam2))

    return Bibundle(elements, left_anchor, right_anchor, left_act, right_act)


def _tagged_union_bibundle(parts):
    """Disjoint union of bibundles, tags matching disjoint_union of groupoids."""
    elements = []
    left_anchor = {}
    right_anchor = {}
    for i, bib in enumerate(parts):
        for e in bib.elements:
            elements.append((i, e))
            left_anchor[(i, e)] = (i, bib.left_anchor[e])
            right_anchor[(i, e)] = (i, bib.right_anchor[e])

    def left_act(g, b):
        if g[0] != b[0]:
            raise UndefinedAction((g, b))
        i = b[0]
        return (i, parts[i].left_act(g[1], b[1]))

    def right_act(b, h):
        if b[0] != h[0]:
            raise UndefinedAction((b, h))
        i = b[0]
        return (i, parts[i].right_act(b[1], h[1]))

    return Bibundle(elements, left_anchor, right_anchor, left_act, right_act)


def random_morita_triple(seed, max_blocks: int = 2, max_points: int = 3,
                         max_group_order: int = 4):
    """A seed-deterministic Morita-equivalent pair with its bibundle.

    Both groupoids are unions of blocks over the same groups but with
    independently chosen point counts, joined by the canonical block
    bibundles.  Returns (g1, g2, bibundle).
    """
    rng = random.Random(seed)
    zoo = group_zoo(max_group_order)
    n_blocks = rng.randint(1, max_blocks)
    blocks1, blocks2, bibs = [], [], []
    for _ in range(n_blocks):
        group = rng.choice(zoo)
        n = rng.randint(1, max_points)
        m = rng.randint(1, max_points)
        blocks1.append(block_groupoid(range(n), group))
        blocks2.append(block_groupoid(range(m), group))
        bibs.append(block_bibundle(range(n), range(m), group))
    return disjoint_union(*blocks1), disjoint_union(*blocks2), _tagged_union_bibundle(bibs)


def random_morita_weights(g1, g2, bib, seed):
    """Corresponding weight pairs on both sides of a Morita triple."""
    rng = random.Random(seed)
    w1 = random_invariant_weights(g1, rng)
    section2 = transfer_section(g1, g2, bib, {x: w1.ratio(x) for x in g1.objects})
    a2 = {y: Fraction(rng.randint(1, 6), rng.randint(1, 4)) for y in g2.objects}
    b2 = {y: a2[y] * section2[y] for y in g2.objects}
    return w1, WeightData(a2, b2)


def relabel_bibundle(bib: Bibundle, rename: dict) -> Bibundle:
    """An isomorphic copy with renamed elements (rename must be a bijection)."""
    if set(rename) != set(bib.elements) or len(set(rename.values())) != len(bib.elements):
        raise ValueError("rename must be a bijection on the elements")
    inverse_map = {v: k for k, v in rename.items()}
    elements = [rename[e] for e in bib.elements]
    left_anchor = {rename[e]: bib.left_anchor[e] for e in bib.elements}
    right_anchor = {rename[e]: bib.right_anchor[e] for e in bib.elements}

    def left_act(g, b):
        return rename[bib.left_act(g, inverse_map[b])]

    def right_act(b, h):
        return rename[bib.right_act(inverse_map[b], h)]

    return Bibundle(elements, left_anchor, right_anchor, left_act, right_act)


def compose_bibundles(g1: FiniteGroupoid, g2: FiniteGroupoid, g3: FiniteGroupoid,
                      b12: Bibundle, b23: Bibundle) -> Bibundle:
    """Composite bibundle: matched pairs modulo the middle groupoid action.

    Pairs (p, q) with right anchor of p equal to the left anchor of q are
    identified along (p acted by h, q) ~ (p, h acting on q).  The class
    representatives are deterministic minima so the result is stable.
    """
    pairs = [
        (p, q)
        for p in b12.elements
        for q in b23.elements
        if b12.right_anchor[p] == b23.left_anchor[q]
    ]
    parent = {pq: pq for pq in pairs}

    def find(z):
        while parent[z] != z:
            parent[z] = parent[parent[z]]
            z = parent[z]
        return z

    def union(u, v):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv

    for (p, q) in pairs:
        for h in g2.arrows_from(b12.right_anchor[p]):
            moved = (b12.right_act(p, h), b23.left_act(g2.inverse(h), q))
            union((p, q), moved)

    classes = {}
    for pq in pairs:
        classes.setdefault(find(pq), []).append(pq)
    rep_of = {}
    reps = []
    for members in classes.values():
        rep = min(members, key=repr)
        reps.append(rep)
        for m in members:
            rep_of[m] = rep

    left_anchor = {rep: b12.left_anchor[rep[0]] for rep in reps}
    right_anchor = {rep: b23.right_anchor[rep[1]] for rep in reps}

    def left_act(g, b):
        p, q = b
        return rep_of[(b12.left_act(g, p), q)]

    def right_act(b, h):
        p, q = b
        return rep_of[(p, b23.right_act(q, h))]

    return Bibundle(reps, left_anchor, right_anchor, left_act, right_act)
