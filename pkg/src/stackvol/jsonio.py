"""JSON interchange for groupoids, weights, and bibundles.

Wire format keeps every id a string.  Loading is strict: missing or
ill-typed fields raise SchemaError with the offending location, while
axiom-level problems are left to the validators so that the command
line can distinguish malformed files (exit 3) from invalid mathematics
(exit 1).  Dumps are deterministic: ids are emitted in sorted order and
non-string ids are renamed o0, o1, ... / a0, a1, ... by sorted repr.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import SchemaError
from .finite import FiniteGroupoid, WeightData
from .morita import Bibundle

_COMPOSE_DUMP_CAP = 2_000_000


def _require(cond: bool, where: str, message: str):
    if not cond:
        raise SchemaError(f"{where}: {message}")


def _as_str_id(value, where: str) -> str:
    _require(isinstance(value, str), where, f"expected a string id, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# groupoids


def groupoid_from_dict(data: dict) -> FiniteGroupoid:
    _require(isinstance(data, dict), "groupoid", "top level must be an object")
    for key in ("objects", "arrows", "identity", "inverse", "compose"):
        _require(key in data, "groupoid", f"missing field {key!r}")
    objects = data["objects"]
    _require(isinstance(objects, list), "groupoid.objects", "must be a list")
    objects = [_as_str_id(x, "groupoid.objects") for x in objects]

    arrows = data["arrows"]
    _require(isinstance(arrows, list), "groupoid.arrows", "must be a list")
    arrow_table = {}
    for i, entry in enumerate(arrows):
        where = f"groupoid.arrows[{i}]"
        _require(isinstance(entry, dict), where, "must be an object")
        for key in ("id", "l", "r"):
            _require(key in entry, where, f"missing field {key!r}")
        aid = _as_str_id(entry["id"], where + ".id")
        _require(aid not in arrow_table, where, f"duplicate arrow id {aid!r}")
        arrow_table[aid] = (
            _as_str_id(entry["l"], where + ".l"),
            _as_str_id(entry["r"], where + ".r"),
        )

    identity = data["identity"]
    _require(isinstance(identity, dict), "groupoid.identity", "must be an object")
    identity = {
        _as_str_id(k, "groupoid.identity"): _as_str_id(v, f"groupoid.identity[{k!r}]")
        for k, v in identity.items()
    }

    inverse = data["inverse"]
    _require(isinstance(inverse, dict), "groupoid.inverse", "must be an object")
    inverse = {
        _as_str_id(k, "groupoid.inverse"): _as_str_id(v, f"groupoid.inverse[{k!r}]")
        for k, v in inverse.items()
    }

    compose = data["compose"]
    _require(isinstance(compose, list), "groupoid.compose", "must be a list")
    table = {}
    for i, triple in enumerate(compose):
        where = f"groupoid.compose[{i}]"
        _require(isinstance(triple, list) and len(triple) == 3, where,
                 "must be a [g, h, gh] triple")
        g, h, gh = (_as_str_id(v, where) for v in triple)
        _require((g, h) not in table, where, f"duplicate pair ({g!r}, {h!r})")
        table[(g, h)] = gh

    try:
        return FiniteGroupoid(objects, arrow_table, identity, inverse, table)
    except ValueError as exc:
        raise SchemaError(f"groupoid: inconsistent tables: {exc}") from None


def _renaming(g: FiniteGroupoid):
    """Deterministic string names for objects and arrows."""
    if all(isinstance(x, str) for x in g.objects) and all(
        isinstance(a, str) for a in g.arrow_ids
    ):
        return {x: x for x in g.objects}, {a: a for a in g.arrow_ids}
    obj_map = {x: f"o{i}" for i, x in enumerate(sorted(g.objects, key=repr))}
    arrow_map = {a: f"a{i}" for i, a in enumerate(sorted(g.arrow_ids, key=repr))}
    return obj_map, arrow_map


def groupoid_to_dict(g: FiniteGroupoid, rename=None) -> dict:
    if rename is None:
        rename = _renaming(g)
    obj_map, arrow_map = rename

    pair_count = sum(
        len(g.arrows_into(y)) * len(g.arrows_from(y)) for y in g.objects
    )
    if pair_count > _COMPOSE_DUMP_CAP:
        raise SchemaError(
            f"compose table with {pair_count} entries exceeds the dump cap"
        )
    compose = []
    for y in g.objects:
        for p in g.arrows_into(y):
            for q in g.arrows_from(y):
                compose.append([arrow_map[p], arrow_map[q], arrow_map[g.compose(p, q)]])
    compose.sort()

    return {
        "objects": sorted(obj_map[x] for x in g.objects),
        "arrows": sorted(
            (
                {"id": arrow_map[a], "l": obj_map[g.l(a)], "r": obj_map[g.r(a)]}
                for a in g.arrow_ids
            ),
            key=lambda e: e["id"],
        ),
        "identity": {obj_map[x]: arrow_map[g.identity(x)] for x in sorted(g.objects, key=repr)},
        "inverse": {arrow_map[a]: arrow_map[g.inverse(a)] for a in sorted(g.arrow_ids, key=repr)},
        "compose": compose,
    }


def load_groupoid(path) -> FiniteGroupoid:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from None
    return groupoid_from_dict(data)


def dump_groupoid(g: FiniteGroupoid, path):
    with open(path, "w") as fh:
        json.dump(groupoid_to_dict(g), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# weights


def _parse_weight(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError(f"{where}: booleans are not weights")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"{where}: not a rational: {value!r} ({exc})") from None
    raise SchemaError(
        f"{where}: weights must be rational strings like \"3/4\" or integers, got {value!r}"
    )


def weights_from_dict(data: dict) -> WeightData:
    _require(isinstance(data, dict), "weights", "top level must be an object")
    for key in ("a", "b"):
        _require(key in data, "weights", f"missing field {key!r}")
        _require(isinstance(data[key], dict), f"weights.{key}", "must be an object")
    a = {k: _parse_weight(v, f"weights.a[{k!r}]") for k, v in data["a"].items()}
    b = {k: _parse_weight(v, f"weights.b[{k!r}]") for k, v in data["b"].items()}
    try:
        return WeightData(a, b)
    except ValueError as exc:
        raise SchemaError(f"weights: {exc}") from None


def weights_to_dict(w: WeightData, rename=None) -> dict:
    obj_map = rename if rename is not None else {x: x for x in w.a}
    for x in w.a:
        if not isinstance(obj_map[x], str):
            raise SchemaError("weight keys must rename to strings for dumping")
    return {
        "a": {obj_map[x]: str(w.a[x]) for x in sorted(w.a, key=repr)},
        "b": {obj_map[x]: str(w.b[x]) for x in sorted(w.b, key=repr)},
    }


def load_weights(path) -> WeightData:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from None
    return weights_from_dict(data)


def dump_weights(w: WeightData, path, rename=None):
    with open(path, "w") as fh:
        json.dump(weights_to_dict(w, rename), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# bibundles


def bibundle_from_dict(data: dict) -> Bibundle:
    _require(isinstance(data, dict), "bibundle", "top level must be an object")
    for key in ("elements", "leftAnchor", "rightAnchor", "leftAction", "rightAction"):
        _require(key in data, "bibundle", f"missing field {key!r}")
    elements = data["elements"]
    _require(isinstance(elements, list), "bibundle.elements", "must be a list")
    elements = [_as_str_id(e, "bibundle.elements") for e in elements]

    anchors = []
    for key in ("leftAnchor", "rightAnchor"):
        raw = data[key]
        _require(isinstance(raw, dict), f"bibundle.{key}", "must be an object")
        anchors.append({
            _as_str_id(k, f"bibundle.{key}"): _as_str_id(v, f"bibundle.{key}[{k!r}]")
            for k, v in raw.items()
        })
    left_anchor, right_anchor = anchors

    def parse_action(key):
        raw = data[key]
        _require(isinstance(raw, list), f"bibundle.{key}", "must be a list")
        table = {}
        for i, triple in enumerate(raw):
            where = f"bibundle.{key}[{i}]"
            _require(isinstance(triple, list) and len(triple) == 3, where,
                     "must be a [first, second, result] triple")
            u, v, res = (_as_str_id(t, where) for t in triple)
            _require((u, v) not in table, where, "duplicate action pair")
            table[(u, v)] = res
        return table

    try:
        return Bibundle(elements, left_anchor, right_anchor,
                        parse_action("leftAction"), parse_action("rightAction"))
    except ValueError as exc:
        raise SchemaError(f"bibundle: inconsistent tables: {exc}") from None


def bibundle_to_dict(g1: FiniteGroupoid, g2: FiniteGroupoid, bib: Bibundle,
                     renames=None) -> dict:
    """Serialize, materializing the action tables from the groupoids."""
    if renames is None:
        all_str = (
            all(isinstance(e, str) for e in bib.elements)
            and all(isinstance(a, str) for a in g1.arrow_ids)
            and all(isinstance(a, str) for a in g2.arrow_ids)
        )
        if all_str:
            elem_map = {e: e for e in bib.elements}
            a1_map = {a: a for a in g1.arrow_ids}
            a2_map = {a: a for a in g2.arrow_ids}
        else:
            elem_map = {e: f"b{i}" for i, e in enumerate(sorted(bib.elements, key=repr))}
            a1_map = _renaming(g1)[1]
            a2_map = _renaming(g2)[1]
    else:
        elem_map, a1_map, a2_map = renames

    left_action = []
    for b in bib.elements:
        for g in g1.arrows_into(bib.left_anchor[b]):
            left_action.append([a1_map[g], elem_map[b], elem_map[bib.left_act(g, b)]])
    right_action = []
    for b in bib.elements:
        for h in g2.arrows_from(bib.right_anchor[b]):
            right_action.append([elem_map[b], a2_map[h], elem_map[bib.right_act(b, h)]])
    left_action.sort()
    right_action.sort()

    obj1 = _renaming(g1)[0]
    obj2 = _renaming(g2)[0]
    return {
        "elements": sorted(elem_map[e] for e in bib.elements),
        "leftAnchor": {elem_map[e]: obj1[bib.left_anchor[e]] for e in sorted(bib.elements, key=repr)},
        "rightAnchor": {elem_map[e]: obj2[bib.right_anchor[e]] for e in sorted(bib.elements, key=repr)},
        "leftAction": left_action,
        "rightAction": right_action,
    }


def load_bibundle(path) -> Bibundle:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON: {exc}") from None
    return bibundle_from_dict(data)


def dump_bibundle(g1: FiniteGroupoid, g2: FiniteGroupoid, bib: Bibundle, path):
    with open(path, "w") as fh:
        json.dump(bibundle_to_dict(g1, g2, bib), fh, indent=2, sort_keys=True)
        fh.write("\n")
