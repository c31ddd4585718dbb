"""Finite groupoids and their exact stack volumes.

A finite groupoid is stored as explicit tables: objects, arrows with a
left and right object, an identity arrow per object, an inverse per
arrow, and a partial composition.  Arrows compose left to right:
``compose(g, h)`` is defined exactly when ``r(g) == l(h)``, and then
``l(gh) == l(g)`` and ``r(gh) == r(h)``.

All volume computations on this side are exact over the rationals.  The
two routes, the fiber formula (sum over objects of the reciprocal weight
mass of each r-fiber) and the orbit formula (sum over orbits of the
section value divided by the isotropy order), agree whenever the section
b/a is constant on orbits; the test suite leans on that identity heavily.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import ValidationFailure, ValidationReport
from .groups import FiniteGroup, group_zoo


class UndefinedComposition(KeyError):
    """Raised by a groupoid's composition on a non-composable pair."""


class InvalidGroupoidError(ValidationFailure):
    """A groupoid table breaks one of the axioms."""


class InvalidActionError(ValidationFailure):
    """A claimed group action fails the identity or compatibility law."""


class DegenerateWeightError(ValidationFailure):
    """Some r-fiber has total weight zero, so its reciprocal is undefined."""


class NonInvariantSectionError(ValidationFailure):
    """The section b/a takes different values inside one orbit."""


class UnknownOrbitError(ValidationFailure):
    """An orbit identifier does not name any orbit of the groupoid."""


# ---------------------------------------------------------------------------
# groupoid type


class FiniteGroupoid:
    """Finite groupoid with table-backed or closure-backed composition.

    ``compose`` may be a dict of exactly the composable pairs or a callable
    raising :class:`UndefinedComposition` on non-composable input.  Large
    generated families use closures so that no quadratic table has to be
    materialized; JSON-loaded groupoids keep their explicit table.
    """

    def __init__(self, objects, arrows, identity, inverse, compose):
        self._objects = tuple(objects)
        self._object_set = frozenset(self._objects)
        if len(self._object_set) != len(self._objects):
            raise ValueError("duplicate object ids")
        self._arrows = dict(arrows)  # arrow id -> (l, r)
        self._identity = dict(identity)
        self._inverse = dict(inverse)
        if isinstance(compose, dict):
            self._compose_table = dict(compose)
            self._compose_fn = self._compose_from_table
        else:
            self._compose_table = None
            self._compose_fn = compose
        self._by_l = None
        self._by_r = None
        self._orbit_cache = None
        self._check_structure()

    def _check_structure(self):
        for aid, (lo, ro) in self._arrows.items():
            if lo not in self._object_set or ro not in self._object_set:
                raise ValueError(f"arrow {aid!r} references unknown objects {(lo, ro)!r}")
        if set(self._identity) != self._object_set:
            raise ValueError("identity table must cover exactly the objects")
        for x, aid in self._identity.items():
            if aid not in self._arrows:
                raise ValueError(f"identity of {x!r} is not an arrow")
        if set(self._inverse) != set(self._arrows):
            raise ValueError("inverse table must cover exactly the arrows")
        for aid, bid in self._inverse.items():
            if bid not in self._arrows:
                raise ValueError(f"inverse of {aid!r} is not an arrow")

    def _compose_from_table(self, g, h):
        try:
            return self._compose_table[(g, h)]
        except KeyError:
            raise UndefinedComposition((g, h)) from None

    # -- basic queries ------------------------------------------------

    @property
    def objects(self) -> tuple:
        return self._objects

    @property
    def arrow_ids(self):
        return self._arrows.keys()

    @property
    def arrow_count(self) -> int:
        return len(self._arrows)

    @property
    def compose_table(self):
        """The explicit table when one was supplied, else None."""
        return self._compose_table

    def has_object(self, x) -> bool:
        return x in self._object_set

    def l(self, g):
        return self._arrows[g][0]

    def r(self, g):
        return self._arrows[g][1]

    def identity(self, x):
        return self._identity[x]

    def inverse(self, g):
        return self._inverse[g]

    def compose(self, g, h):
        return self._compose_fn(g, h)

    def is_composable(self, g, h) -> bool:
        return self.r(g) == self.l(h)

    def _build_indexes(self):
        by_l = {x: [] for x in self._objects}
        by_r = {x: [] for x in self._objects}
        for aid, (lo, ro) in self._arrows.items():
            by_l[lo].append(aid)
            by_r[ro].append(aid)
        self._by_l = by_l
        self._by_r = by_r

    def arrows_from(self, x):
        """All arrows g with l(g) == x."""
        if self._by_l is None:
            self._build_indexes()
        return self._by_l[x]

    def arrows_into(self, y):
        """All arrows g with r(g) == y, the r-fiber over y."""
        if self._by_r is None:
            self._build_indexes()
        return self._by_r[y]

    def isotropy(self, x):
        return [g for g in self.arrows_from(x) if self.r(g) == x]

    def __repr__(self):
        return f"FiniteGroupoid({len(self._objects)} objects, {len(self._arrows)} arrows)"

    @classmethod
    def from_tables(cls, objects, arrows, identity, inverse, compose_triples):
        """Build from fully explicit tables.

        ``arrows`` is a list of (id, l, r) triples or of mappings with keys
        id/l/r; ``compose_triples`` lists (g, h, gh).
        """
        arrow_map = {}
        for entry in arrows:
            if isinstance(entry, dict):
                aid, lo, ro = entry["id"], entry["l"], entry["r"]
            else:
                aid, lo, ro = entry
            if aid in arrow_map:
                raise ValueError(f"duplicate arrow id {aid!r}")
            arrow_map[aid] = (lo, ro)
        table = {}
        for g, h, gh in compose_triples:
            if (g, h) in table:
                raise ValueError(f"duplicate composition entry for {(g, h)!r}")
            table[(g, h)] = gh
        return cls(objects, arrow_map, identity, inverse, table)


# ---------------------------------------------------------------------------
# constructors


def empty_groupoid() -> FiniteGroupoid:
    def no_compose(g, h):
        raise UndefinedComposition((g, h))

    return FiniteGroupoid((), {}, {}, {}, no_compose)


def block_groupoid(points, group: FiniteGroup) -> FiniteGroupoid:
    """Pair groupoid on ``points`` crossed with ``group``.

    Arrows are triples (x, y, gamma) with l = x and r = y.  Every finite
    groupoid is a disjoint union of such blocks up to isomorphism, which
    is what makes this the natural random generator building block.
    """
    pts = tuple(points)
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points")
    arrows = {(x, y, gam): (x, y) for x in pts for y in pts for gam in group.elements}
    identity = {x: (x, x, group.identity) for x in pts}
    inverse = {(x, y, gam): (y, x, group.inv(gam)) for (x, y, gam) in arrows}

    def compose(g, h):
        x, y, gam = g
        y2, z, delta = h
        if y != y2 or g not in arrows or h not in arrows:
            raise UndefinedComposition((g, h))
        return (x, z, group.mult(gam, delta))

    return FiniteGroupoid(pts, arrows, identity, inverse, compose)


def pair_groupoid(points) -> FiniteGroupoid:
    """Exactly one arrow between any two objects."""
    return block_groupoid(points, FiniteGroup.trivial())


def classifying_groupoid(group: FiniteGroup) -> FiniteGroupoid:
    """One object whose isotropy is the given group (a point modulo the group)."""
    return block_groupoid(("pt",), group)


def action_groupoid(group: FiniteGroup, points, act) -> FiniteGroupoid:
    """Groupoid of a left action: arrows (h, x) with l = act(h, x), r = x.

    The action law is verified up front, a bad ``act`` raises
    :class:`InvalidActionError`.
    """
    pts = tuple(points)
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points")
    pt_set = set(pts)
    for x in pts:
        if act(group.identity, x) != x:
            raise InvalidActionError(f"identity must act trivially, fails at {x!r}")
    for h in group.elements:
        for x in pts:
            y = act(h, x)
            if y not in pt_set:
                raise InvalidActionError(f"action leaves the point set at {(h, x)!r}")
            for k in group.elements:
                if act(k, y) != act(group.mult(k, h), x):
                    raise InvalidActionError(
                        f"compatibility fails at {(k, h, x)!r}"
                    )

    arrows = {(h, x): (act(h, x), x) for h in group.elements for x in pts}
    identity = {x: (group.identity, x) for x in pts}
    inverse = {(h, x): (group.inv(h), act(h, x)) for (h, x) in arrows}

    def compose(g, hh):
        h1, x1 = g
        h2, x2 = hh
        if g not in arrows or hh not in arrows or x1 != act(h2, x2):
            raise UndefinedComposition((g, hh))
        return (group.mult(h1, h2), x2)

    return FiniteGroupoid(pts, arrows, identity, inverse, compose)


def disjoint_union(*parts: FiniteGroupoid) -> FiniteGroupoid:
    """Disjoint union; objects and arrows get tagged with the part index."""
    objects = []
    arrows = {}
    identity = {}
    inverse = {}
    for i, g in enumerate(parts):
        for x in g.objects:
            objects.append((i, x))
            identity[(i, x)] = (i, g.identity(x))
        for aid in g.arrow_ids:
            arrows[(i, aid)] = ((i, g.l(aid)), (i, g.r(aid)))
            inverse[(i, aid)] = (i, g.inverse(aid))

    def compose(a, b):
        if a not in arrows or b not in arrows or a[0] != b[0]:
            raise UndefinedComposition((a, b))
        i = a[0]
        return (i, parts[i].compose(a[1], b[1]))

    return FiniteGroupoid(objects, arrows, identity, inverse, compose)


def restrict_to_objects(g: FiniteGroupoid, keep) -> FiniteGroupoid:
    """Full subgroupoid on the given objects (no fullness requirement here)."""
    keep_set = set(keep)
    unknown = keep_set - set(g.objects)
    if unknown:
        raise ValueError(f"unknown objects {sorted(map(repr, unknown))}")
    arrows = {
        aid: (g.l(aid), g.r(aid))
        for aid in g.arrow_ids
        if g.l(aid) in keep_set and g.r(aid) in keep_set
    }
    identity = {x: g.identity(x) for x in keep_set}
    inverse = {aid: g.inverse(aid) for aid in arrows}
    arrow_set = set(arrows)

    def compose(a, b):
        if a not in arrow_set or b not in arrow_set:
            raise UndefinedComposition((a, b))
        return g.compose(a, b)

    ordered = tuple(x for x in g.objects if x in keep_set)
    return FiniteGroupoid(ordered, arrows, identity, inverse, compose)


# ---------------------------------------------------------------------------
# validation

_FULL_PAIR_SCAN_CAP = 400_000


def validate(g: FiniteGroupoid) -> ValidationReport:
    """Exhaustive axiom check; every violation carries a witness.

    Associativity is checked on all composable triples, so keep the input
    small (a few hundred arrows) when a full validation is wanted.  The
    scan for spuriously composable pairs is skipped above a size cap when
    the composition is closure-backed, since closures cannot store stray
    entries anyway.
    """
    report = ValidationReport()

    for x in g.objects:
        e = g.identity(x)
        if g.l(e) != x or g.r(e) != x:
            report.add("identity endpoints", (x, e))

    for a in g.arrow_ids:
        b = g.inverse(a)
        if g.l(b) != g.r(a) or g.r(b) != g.l(a):
            report.add("inverse axiom", (a, b), "inverse endpoints do not swap")
            continue
        try:
            left = g.compose(a, b)
            right = g.compose(b, a)
        except UndefinedComposition:
            report.add("inverse axiom", (a, b), "composite with inverse undefined")
            continue
        if left != g.identity(g.l(a)) or right != g.identity(g.r(a)):
            report.add("inverse axiom", (a, b), "composite with inverse is not the identity")

    for a in g.arrow_ids:
        ea = g.identity(g.l(a))
        eb = g.identity(g.r(a))
        try:
            if g.compose(ea, a) != a or g.compose(a, eb) != a:
                report.add("identity unit", (a,))
        except UndefinedComposition:
            report.add("identity unit", (a,), "unit composite undefined")

    composite = {}
    for a in g.arrow_ids:
        for b in g.arrows_from(g.r(a)):
            try:
                c = g.compose(a, b)
            except UndefinedComposition:
                report.add("missing composition", (a, b))
                continue
            if c not in g._arrows:
                report.add("composition closure", (a, b, c), "composite is not an arrow")
                continue
            if g.l(c) != g.l(a) or g.r(c) != g.r(b):
                report.add("composition endpoints", (a, b, c))
            composite[(a, b)] = c

    if g.compose_table is not None:
        for (a, b) in g.compose_table:
            if a not in g._arrows or b not in g._arrows or g.r(a) != g.l(b):
                report.add("spurious composition", (a, b))
    elif g.arrow_count ** 2 <= _FULL_PAIR_SCAN_CAP:
        for a in g.arrow_ids:
            for b in g.arrow_ids:
                if g.r(a) == g.l(b):
                    continue
                try:
                    g.compose(a, b)
                except UndefinedComposition:
                    continue
                report.add("spurious composition", (a, b))

    for (a, b), ab in composite.items():
        for c in g.arrows_from(g.r(b)):
            bc = composite.get((b, c))
            left = composite.get((ab, c))
            if bc is None or left is None:
                continue  # already reported as missing
            right = composite.get((a, bc))
            if right is None or left != right:
                report.add("associativity", (a, b, c))

    return report


# ---------------------------------------------------------------------------
# orbits and volumes


@dataclass(frozen=True)
class Orbit:
    representative: object
    objects: frozenset
    isotropy_order: int


class OrbitDecomposition:
    """Orbits of a groupoid, each tagged by a deterministic representative."""

    def __init__(self, orbits):
        self.orbits = tuple(orbits)
        self._of_object = {}
        self.by_representative = {}
        for orb in self.orbits:
            self.by_representative[orb.representative] = orb
            for x in orb.objects:
                self._of_object[x] = orb

    def find(self, x) -> Orbit:
        return self._of_object[x]

    def __iter__(self):
        return iter(self.orbits)

    def __len__(self):
        return len(self.orbits)


def orbits(g: FiniteGroupoid) -> OrbitDecomposition:
    """Connected components of the object set under arrows.

    The decomposition is memoized on the groupoid, whose tables never
    change after construction.
    """
    if g._orbit_cache is not None:
        return g._orbit_cache
    parent = {x: x for x in g.objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for aid in g.arrow_ids:
        a, b = find(g.l(aid)), find(g.r(aid))
        if a != b:
            parent[a] = b

    groups = {}
    for x in g.objects:
        groups.setdefault(find(x), []).append(x)

    iso_count = {x: 0 for x in g.objects}
    for aid in g.arrow_ids:
        lo, ro = g.l(aid), g.r(aid)
        if lo == ro:
            iso_count[lo] += 1

    orbit_list = []
    for members in groups.values():
        rep = min(members, key=repr)
        orbit_list.append(Orbit(rep, frozenset(members), iso_count[rep]))
    orbit_list.sort(key=lambda o: repr(o.representative))
    g._orbit_cache = OrbitDecomposition(orbit_list)
    return g._orbit_cache


def cardinality(g: FiniteGroupoid) -> Fraction:
    """Sum over orbits of the reciprocal isotropy order; an empty groupoid counts 0."""
    return sum((Fraction(1, o.isotropy_order) for o in orbits(g)), Fraction(0))


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, str)):
        return Fraction(v)
    raise TypeError(f"weights must be rational, got {type(v).__name__}")


class WeightData:
    """A pair of rational weights on the objects of a groupoid.

    ``a`` is the fiber weight (summed along r-fibers through the left
    object of each arrow) and must be nowhere zero; ``b`` is the base
    weight integrated against the reciprocal fiber mass.  The quotient
    b/a is the transferable datum: volumes depend only on it when it is
    constant on orbits.
    """

    def __init__(self, a, b):
        self.a = {x: _as_fraction(v) for x, v in dict(a).items()}
        self.b = {x: _as_fraction(v) for x, v in dict(b).items()}
        for x, v in self.a.items():
            if v == 0:
                raise DegenerateWeightError(f"fiber weight a vanishes at object {x!r}")

    def ratio(self, x) -> Fraction:
        """The section value b(x)/a(x)."""
        return self.b[x] / self.a[x]

    def covers(self, objects) -> bool:
        return all(x in self.a and x in self.b for x in objects)

    def rescaled(self, factor_map) -> "WeightData":
        """Multiply both weights by the same nowhere-zero rational function."""
        a = {x: v * _as_fraction(factor_map[x]) for x, v in self.a.items()}
        b = {x: v * _as_fraction(factor_map[x]) for x, v in self.b.items()}
        return WeightData(a, b)


def unit_weights(g: FiniteGroupoid) -> WeightData:
    return WeightData({x: 1 for x in g.objects}, {x: 1 for x in g.objects})


def _require_coverage(g: FiniteGroupoid, w: WeightData):
    for x in g.objects:
        if x not in w.a or x not in w.b:
            raise ValidationFailure(f"weights missing object {x!r}")


def fiber_volume(g: FiniteGroupoid, w: WeightData) -> Fraction:
    """Exact volume by the fiber formula.

    For each object y, the arrows with r = y are weighted by a at their
    left object; the volume is the sum of b(y) over the reciprocal of
    that fiber mass.  A zero fiber mass raises
    :class:`DegenerateWeightError`.
    """
    _require_coverage(g, w)
    total = Fraction(0)
    for y in g.objects:
        mass = Fraction(0)
        for aid in g.arrows_into(y):
            mass += w.a[g.l(aid)]
        if mass == 0:
            raise DegenerateWeightError(f"fiber over {y!r} has total weight zero")
        total += w.b[y] / mass
    return total


def invariant_section(g: FiniteGroupoid, w: WeightData, dec: OrbitDecomposition | None = None) -> dict:
    """The orbit-wise value of b/a; raises when the section is not constant."""
    _require_coverage(g, w)
    if dec is None:
        dec = orbits(g)
    values = {}
    for orb in dec:
        members = sorted(orb.objects, key=repr)
        val = w.ratio(members[0])
        for x in members[1:]:
            if w.ratio(x) != val:
                raise NonInvariantSectionError(
                    f"non-invariant section: b/a takes {val} at {members[0]!r} "
                    f"but {w.ratio(x)} at {x!r} on the orbit of {orb.representative!r}"
                )
        values[orb.representative] = val
    return values


def orbit_volume(g: FiniteGroupoid, w: WeightData) -> Fraction:
    """Exact volume by the orbit formula: sum of (b/a)(orbit)/isotropy order."""
    dec = orbits(g)
    section = invariant_section(g, w, dec)
    total = Fraction(0)
    for orb in dec:
        total += section[orb.representative] / orb.isotropy_order
    return total


def orbit_set_measure(g: FiniteGroupoid, w: WeightData, orbit_reps) -> Fraction:
    """Measure of a union of orbits, identified by their representatives."""
    dec = orbits(g)
    section = invariant_section(g, w, dec)
    total = Fraction(0)
    for rep in set(orbit_reps):
        orb = dec.by_representative.get(rep)
        if orb is None:
            raise UnknownOrbitError(f"no orbit has representative {rep!r}")
        total += section[rep] / orb.isotropy_order
    return total


# ---------------------------------------------------------------------------
# generators and series


def random_groupoid(seed, max_objects: int = 8, max_group_order: int = 6,
                    max_blocks: int = 4) -> FiniteGroupoid:
    """Seed-deterministic disjoint union of pair-times-group blocks.

    Every isomorphism class of finite groupoid arises this way, and the
    output always satisfies the axioms by construction.
    """
    if max_objects < 1 or max_group_order < 1 or max_blocks < 1:
        raise ValueError("size bounds must be >= 1")
    rng = random.Random(seed)
    zoo = group_zoo(max_group_order)
    n_blocks = rng.randint(1, max(1, min(max_blocks, max_objects)))
    per_block = max(1, max_objects // n_blocks)
    blocks = []
    for _ in range(n_blocks):
        n = rng.randint(1, per_block)
        blocks.append(block_groupoid(range(n), rng.choice(zoo)))
    return disjoint_union(*blocks)


def random_invariant_weights(g: FiniteGroupoid, seed) -> WeightData:
    """Random weights whose section b/a is constant on every orbit.

    The fiber weight is positive with small denominator so that exact
    arithmetic on large corpora stays cheap.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    dec = orbits(g)
    a = {}
    for x in g.objects:
        a[x] = Fraction(rng.randint(1, 6), rng.randint(1, 4))
    section = {}
    for orb in dec:
        num = rng.randint(-6, 6)
        section[orb.representative] = Fraction(num, rng.randint(1, 4))
    b = {x: a[x] * section[dec.find(x).representative] for x in g.objects}
    return WeightData(a, b)


def random_positive_rescaling(g: FiniteGroupoid, seed) -> dict:
    """A positive rational function on objects, for rescale-invariance checks."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return {x: Fraction(rng.randint(1, 9), rng.randint(1, 5)) for x in g.objects}


def finite_sets_cardinality(cutoff: int) -> Fraction:
    """Partial sum of 1/n! for n = 0..cutoff.

    The groupoid of finite sets and bijections has one orbit per size n
    with isotropy the n! permutations, so its cardinality is the
    exponential series at 1; the skeleton used here is sizes 0..cutoff.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    return sum((Fraction(1, factorial(n)) for n in range(cutoff + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# structural comparison


def check_strict_isomorphism(g1: FiniteGroupoid, g2: FiniteGroupoid,
                             object_map, arrow_map) -> bool:
    """Whether the given bijections carry every table of g1 onto g2."""
    if set(object_map) != set(g1.objects) or set(arrow_map) != set(g1.arrow_ids):
        return False
    if set(object_map.values()) != set(g2.objects):
        return False
    if set(arrow_map.values()) != set(g2.arrow_ids):
        return False
    for aid in g1.arrow_ids:
        img = arrow_map[aid]
        if g2.l(img) != object_map[g1.l(aid)] or g2.r(img) != object_map[g1.r(aid)]:
            return False
        if arrow_map[g1.inverse(aid)] != g2.inverse(img):
            return False
    for x in g1.objects:
        if arrow_map[g1.identity(x)] != g2.identity(object_map[x]):
            return False
    for a in g1.arrow_ids:
        for b in g1.arrows_from(g1.r(a)):
            try:
                expected = arrow_map[g1.compose(a, b)]
                got = g2.compose(arrow_map[a], arrow_map[b])
            except UndefinedComposition:
                return False
            if expected != got:
                return False
    return True
