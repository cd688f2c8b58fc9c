"""Finite categories given by an explicit composition table.

Object and morphism ids are opaque strings.  Every enumeration is emitted
in lexicographic id order so that results are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import LawViolation, MalformedInput, UnknownObject


@dataclass(frozen=True)
class Category:
    """A finite category.

    ``morphisms`` maps a morphism id to ``(dom, cod)``; ``table`` maps a
    composable pair ``(g, f)`` with ``cod(f) == dom(g)`` to ``g o f``.
    Instances are treated as immutable; use :func:`validate_category` or the
    builders below rather than the raw constructor.
    """

    objects: tuple[str, ...]
    morphisms: Mapping[str, tuple[str, str]]
    identities: Mapping[str, str]
    table: Mapping[tuple[str, str], str]
    # memo space for derived data (sieve lattices, atomic topology, ...)
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def dom(self, f: str) -> str:
        return self.morphisms[f][0]

    def cod(self, f: str) -> str:
        return self.morphisms[f][1]

    def identity(self, c: str) -> str:
        try:
            return self.identities[c]
        except KeyError:
            raise UnknownObject(f"unknown object {c!r}") from None

    def compose(self, g: str, f: str) -> str:
        """Return ``g o f``; raises ``KeyError`` if the pair is not composable."""
        return self.table[(g, f)]

    @property
    def arrows(self) -> tuple[str, ...]:
        return self._index["arrows"]

    def arrows_into(self, c: str) -> tuple[str, ...]:
        return self._index["into"].get(c, ())

    def arrows_from(self, c: str) -> tuple[str, ...]:
        return self._index["from"].get(c, ())

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._index["hom"].get((a, b), ())

    def has_object(self, c: str) -> bool:
        return c in self.identities

    def require_object(self, c: str) -> None:
        if c not in self.identities:
            raise UnknownObject(f"unknown object {c!r}")

    @property
    def _index(self) -> dict:
        idx = self._cache.get("index")
        if idx is None:
            into: dict[str, list[str]] = {}
            out: dict[str, list[str]] = {}
            hom: dict[tuple[str, str], list[str]] = {}
            arrows = tuple(sorted(self.morphisms))
            for f in arrows:
                d, c = self.morphisms[f]
                into.setdefault(c, []).append(f)
                out.setdefault(d, []).append(f)
                hom.setdefault((d, c), []).append(f)
            idx = {
                "arrows": arrows,
                "into": {k: tuple(v) for k, v in into.items()},
                "from": {k: tuple(v) for k, v in out.items()},
                "hom": {k: tuple(v) for k, v in hom.items()},
            }
            self._cache["index"] = idx
        return idx

    def __len__(self) -> int:
        return len(self.morphisms)

    def to_json(self) -> dict:
        """Serialize to the category file format (identity entries omitted)."""
        ids = set(self.identities.values())
        comp = [
            [g, f, h]
            for (g, f), h in sorted(self.table.items())
            if g not in ids and f not in ids
        ]
        return {
            "objects": sorted(self.objects),
            "morphisms": [
                {"id": m, "dom": self.dom(m), "cod": self.cod(m)} for m in self.arrows
            ],
            "identities": {c: self.identities[c] for c in sorted(self.objects)},
            "composition": comp,
        }


@dataclass(frozen=True)
class CospanWitness:
    """A cospan ``left: a -> target <- b: right`` with no commuting completion."""

    target: str
    left: str
    right: str


def _require_str(value, what: str) -> str:
    if not isinstance(value, str):
        raise MalformedInput(f"{what} must be a string, got {value!r}")
    return value


def validate_category(raw: Mapping) -> Category:
    """Parse a category description and check every category law.

    Structural problems (missing fields, duplicate or dangling ids) raise
    :class:`MalformedInput`; law failures are collected and raised together
    as a :class:`LawViolation` whose ``violations`` name the law and the
    offending morphisms.
    """
    if not isinstance(raw, Mapping):
        raise MalformedInput("category description must be a JSON object")
    for key in ("objects", "morphisms"):
        if key not in raw:
            raise MalformedInput(f"category description lacks {key!r}")

    objects = [_require_str(o, "object id") for o in raw["objects"]]
    if len(set(objects)) != len(objects):
        dup = sorted({o for o in objects if objects.count(o) > 1})
        raise MalformedInput(f"duplicate object ids: {dup}")
    objset = set(objects)

    morphisms: dict[str, tuple[str, str]] = {}
    for entry in raw["morphisms"]:
        if not isinstance(entry, Mapping):
            raise MalformedInput(f"morphism entry must be an object: {entry!r}")
        for key in ("id", "dom", "cod"):
            if key not in entry:
                raise MalformedInput(f"morphism entry {entry!r} lacks {key!r}")
        m = _require_str(entry["id"], "morphism id")
        d = _require_str(entry["dom"], "dom")
        c = _require_str(entry["cod"], "cod")
        if m in morphisms:
            raise MalformedInput(f"duplicate morphism id {m!r}")
        if m in objset:
            raise MalformedInput(f"id {m!r} names both an object and a morphism")
        for o in (d, c):
            if o not in objset:
                raise MalformedInput(f"morphism {m!r} references unknown object {o!r}")
        morphisms[m] = (d, c)

    identities = dict(raw.get("identities", {}))
    for o in objects:
        if o not in identities:
            raise MalformedInput(f"object {o!r} has no identity")
    for o, i in identities.items():
        if o not in objset:
            raise MalformedInput(f"identity given for unknown object {o!r}")
        if i not in morphisms:
            raise MalformedInput(f"identity {i!r} of {o!r} is not a declared morphism")
    if len(set(identities.values())) != len(identities):
        raise MalformedInput("two objects share an identity morphism")

    violations: list[str] = []
    for o, i in sorted(identities.items()):
        if morphisms[i] != (o, o):
            violations.append(f"identity: {i} is declared identity of {o} but is not an endomorphism of it")
    if violations:
        raise LawViolation(violations)

    table: dict[tuple[str, str], str] = {}
    for entry in raw.get("composition", []):
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise MalformedInput(f"composition entry must be [g, f, result]: {entry!r}")
        g, f, h = (_require_str(x, "composition id") for x in entry)
        for m in (g, f, h):
            if m not in morphisms:
                raise MalformedInput(f"composition entry {entry!r} references unknown morphism {m!r}")
        if morphisms[f][1] != morphisms[g][0]:
            violations.append(f"totality: {g}o{f} declared but cod({f}) != dom({g})")
            continue
        if morphisms[h] != (morphisms[f][0], morphisms[g][1]):
            violations.append(f"typing: {g}o{f} = {h} but {h} is not {morphisms[f][0]} -> {morphisms[g][1]}")
            continue
        if (g, f) in table and table[(g, f)] != h:
            violations.append(f"totality: {g}o{f} declared twice with results {table[(g, f)]}, {h}")
            continue
        table[(g, f)] = h

    for m, (d, c) in sorted(morphisms.items()):
        for key, want in (((m, identities[d]), m), ((identities[c], m), m)):
            got = table.setdefault(key, want)
            if got != want:
                violations.append(f"identity: {key[0]}o{key[1]} = {got}, expected {want}")

    for g, (gd, _) in sorted(morphisms.items()):
        for f, (_, fc) in sorted(morphisms.items()):
            if fc == gd and (g, f) not in table:
                violations.append(f"totality: {g}o{f} is composable but undefined")
    if violations:
        raise LawViolation(violations)

    into: dict[str, list[str]] = {}
    for f, (_, c) in morphisms.items():
        into.setdefault(c, []).append(f)
    for (g, f), gf in sorted(table.items()):
        for e in into.get(morphisms[f][0], []):
            lhs = table[(g, table[(f, e)])]
            rhs = table[(gf, e)]
            if lhs != rhs:
                violations.append(
                    f"associativity: {g}o({f}o{e}) = {lhs} but ({g}o{f})o{e} = {rhs}"
                )
    if violations:
        raise LawViolation(violations)

    return Category(
        objects=tuple(sorted(objects)),
        morphisms=morphisms,
        identities=identities,
        table=table,
    )


def make_category(objects, morphisms, identities=None, composition=()) -> Category:
    """Build and validate a category from Python data.

    ``morphisms`` is an iterable of ``(id, dom, cod)``; identities default to
    ``"1_<obj>"`` and are added to the morphism list automatically.
    """
    objects = list(objects)
    morphisms = [tuple(m) for m in morphisms]
    if identities is None:
        identities = {o: f"1_{o}" for o in objects}
    declared = {m[0] for m in morphisms}
    for o, i in identities.items():
        if i not in declared:
            morphisms.append((i, o, o))
    return validate_category(
        {
            "objects": objects,
            "morphisms": [{"id": m, "dom": d, "cod": c} for m, d, c in morphisms],
            "identities": identities,
            "composition": [list(e) for e in composition],
        }
    )


def terminal_category(obj: str = "*") -> Category:
    return make_category([obj], [])


def discrete_category(objects: Iterable[str]) -> Category:
    return make_category(objects, [])


def poset_category(objects: Iterable[str], leq: Iterable[tuple[str, str]]) -> Category:
    """The category of a finite preorder; ``leq`` is closed reflexively and transitively.

    The unique arrow ``a -> b`` is named ``"a<b"``; identities are ``"1_a"``.
    """
    objects = list(objects)
    rel = {(a, a) for a in objects} | set(leq)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True

    def name(a, b):
        return f"1_{a}" if a == b else f"{a}<{b}"

    arrows = [(name(a, b), a, b) for a, b in sorted(rel) if a != b]
    comp = [
        (name(b, c), name(a, b), name(a, c))
        for (a, b) in sorted(rel)
        for (b2, c) in sorted(rel)
        if b == b2 and a != b and b != c
    ]
    return make_category(objects, arrows, composition=comp)


def monoid_category(elements, multiply, unit, obj: str = "*") -> Category:
    """One-object category of a finite monoid; ``multiply(g, f)`` is ``g o f``."""
    elements = list(elements)
    comp = [(g, f, multiply(g, f)) for g in elements for f in elements]
    return make_category(
        [obj], [(e, obj, obj) for e in elements], identities={obj: unit}, composition=comp
    )


def disjoint_union(*parts: tuple[str, Category]) -> Category:
    """Disjoint union; every id of part ``(tag, C)`` is prefixed with ``tag + "."``."""
    objects, morphisms, identities, comp = [], [], {}, []
    for tag, C in parts:
        p = f"{tag}."
        objects += [p + o for o in C.objects]
        morphisms += [(p + m, p + d, p + c) for m, (d, c) in C.morphisms.items()]
        identities.update({p + o: p + i for o, i in C.identities.items()})
        comp += [(p + g, p + f, p + h) for (g, f), h in C.table.items()]
    return make_category(objects, morphisms, identities, comp)


def rename(C: Category, objects: Mapping[str, str], morphisms: Mapping[str, str]) -> Category:
    """Apply injective renamings of object and morphism ids (missing keys are kept)."""
    o = lambda x: objects.get(x, x)  # noqa: E731
    m = lambda x: morphisms.get(x, x)  # noqa: E731
    return make_category(
        [o(x) for x in C.objects],
        [(m(f), o(d), o(c)) for f, (d, c) in C.morphisms.items()],
        {o(x): m(i) for x, i in C.identities.items()},
        [(m(g), m(f), m(h)) for (g, f), h in C.table.items()],
    )


def connected_components(C: Category) -> list[list[str]]:
    """Partition of the objects under the zigzag relation, sorted by least id."""
    parent = {o: o for o in C.objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in C.arrows:
        a, b = find(C.dom(f)), find(C.cod(f))
        if a != b:
            parent[max(a, b)] = min(a, b)
    comps: dict[str, list[str]] = {}
    for o in sorted(C.objects):
        comps.setdefault(find(o), []).append(o)
    return sorted(comps.values(), key=lambda comp: comp[0])


def ore_witness(C: Category) -> CospanWitness | None:
    """First cospan (in id order) that admits no commuting completion, or ``None``."""
    for c in sorted(C.objects):
        into = C.arrows_into(c)
        # for each f: the set of (d, f o p) over all p: d -> dom(f)
        reach = {
            f: {(C.dom(p), C.compose(f, p)) for p in C.arrows_into(C.dom(f))} for f in into
        }
        for i, f in enumerate(into):
            for g in into[i:]:
                if not reach[f] & reach[g]:
                    return CospanWitness(target=c, left=f, right=g)
    return None


def is_right_ore(C: Category) -> bool:
    """Whether every cospan ``f: a -> c <- b: g`` completes to a commuting square."""
    return ore_witness(C) is None


def full_subcategory(C: Category, objs: Iterable[str]) -> Category:
    keep = set(objs)
    for o in keep:
        C.require_object(o)
    morphisms = {
        f: dc for f, dc in C.morphisms.items() if dc[0] in keep and dc[1] in keep
    }
    return Category(
        objects=tuple(sorted(keep)),
        morphisms=morphisms,
        identities={o: i for o, i in C.identities.items() if o in keep},
        table={(g, f): h for (g, f), h in C.table.items() if g in morphisms and f in morphisms},
    )
