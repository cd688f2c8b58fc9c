"""Automorphism groups as explicit permutation groups, and their finite actions.

Groups are stored by exhaustive element lists.  Every finite group is
discrete, so each open-subgroup (continuity) condition holds automatically
and is not represented.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import GroupTooLarge, MalformedInput, UnknownElement
from .fincat import Category, validate_category
from .modelkit import Structure, iter_isomorphisms
from .sheafkit import Presheaf

DEFAULT_BOUND = 24


def group_bound() -> int:
    """Enumeration bound for subgroup searches; ``TOPOSCALC_BOUND`` overrides it."""
    return int(os.environ.get("TOPOSCALC_BOUND", DEFAULT_BOUND))


@dataclass(frozen=True)
class PermGroup:
    """Permutations of ``degree``; element ``i`` sends ``degree[k]`` to ``elements[i][k]``."""

    degree: tuple[str, ...]
    elements: tuple[tuple[str, ...], ...]

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def _pos(self) -> dict[str, int]:
        return {x: k for k, x in enumerate(self.degree)}

    @cached_property
    def _index(self) -> dict[tuple[str, ...], int]:
        return {p: i for i, p in enumerate(self.elements)}

    def apply(self, i: int, x: str) -> str:
        return self.elements[i][self._pos[x]]

    def mul(self, i: int, j: int) -> int:
        """Index of ``elements[i] o elements[j]``."""
        pos = self._pos
        p, q = self.elements[i], self.elements[j]
        return self._index[tuple(p[pos[y]] for y in q)]

    def inverse(self, i: int) -> int:
        p = self.elements[i]
        inv = {y: x for x, y in zip(self.degree, p)}
        return self._index[tuple(inv[x] for x in self.degree)]

    @cached_property
    def identity(self) -> int:
        return self._index[self.degree]

    def as_map(self, i: int) -> dict[str, str]:
        return dict(zip(self.degree, self.elements[i]))

    def to_json(self) -> dict:
        return {"degree": list(self.degree), "elements": [self.as_map(i) for i in range(len(self))]}


def make_group(degree: Iterable, permutations: Iterable[Mapping]) -> PermGroup:
    """Build a permutation group from maps, keeping the given order, and verify the group axioms."""
    degree = tuple(str(x) for x in degree)
    if len(set(degree)) != len(degree):
        raise MalformedInput("duplicate points in the degree set")
    elems = []
    for p in permutations:
        p = {str(k): str(v) for k, v in p.items()}
        if set(p) != set(degree) or set(p.values()) != set(degree):
            raise MalformedInput(f"{p} is not a permutation of the degree set")
        elems.append(tuple(p[x] for x in degree))
    if len(set(elems)) != len(elems):
        raise MalformedInput("repeated group element")
    G = PermGroup(degree, tuple(elems))
    index = set(elems)
    if degree not in index:
        raise MalformedInput("the identity permutation is missing")
    pos = G._pos
    for p in elems:
        inv = {y: x for x, y in zip(degree, p)}
        if tuple(inv[x] for x in degree) not in index:
            raise MalformedInput(f"inverse of {p} is missing")
        for q in elems:
            if tuple(p[pos[y]] for y in q) not in index:
                raise MalformedInput(f"product of {p} and {q} is missing")
    return G


def group_from_json(raw: Mapping) -> PermGroup:
    if not isinstance(raw, Mapping) or "degree" not in raw or "elements" not in raw:
        raise MalformedInput("group file needs 'degree' and 'elements'")
    return make_group(raw["degree"], raw["elements"])


def generate_group(degree: Sequence, generators: Iterable[Mapping]) -> PermGroup:
    """Close generators under composition; elements come out identity first, then sorted."""
    degree = tuple(str(x) for x in degree)
    pos = {x: k for k, x in enumerate(degree)}
    gens = [tuple(str(g[x]) for x in degree) for g in generators]
    seen = {degree}
    frontier = [degree]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[pos[y]] for y in p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    ordered = [degree] + sorted(seen - {degree})
    return PermGroup(degree, tuple(ordered))


def automorphisms(M: Structure) -> PermGroup:
    """All automorphisms of ``M``: bijections preserving and reflecting relations and constants."""
    perms = [tuple(iso[x] for x in M.universe) for iso in iter_isomorphisms(M, M)]
    ident = tuple(M.universe)
    ordered = [ident] + sorted(set(perms) - {ident})
    return PermGroup(tuple(M.universe), tuple(ordered))


def subgroup(G: PermGroup, indices: Iterable[int]) -> PermGroup:
    idx = sorted(set(indices), key=lambda i: (i != G.identity, G.elements[i]))
    return PermGroup(G.degree, tuple(G.elements[i] for i in idx))


def stabilizer(G: PermGroup, points: Sequence[str]) -> PermGroup:
    """Subgroup fixing every entry of ``points``."""
    for x in points:
        if x not in G._pos:
            raise UnknownElement(f"{x!r} is not a point of the group")
    return subgroup(
        G, (i for i in range(len(G)) if all(G.apply(i, x) == x for x in points))
    )


def orbits_on_tuples(G: PermGroup, k: int) -> list[list[tuple[str, ...]]]:
    """Orbits of the diagonal action on ``k``-tuples, ordered by least tuple."""
    if k < 0:
        raise MalformedInput("tuple length must be non-negative")
    seen: set = set()
    out = []
    for t in itertools.product(G.degree, repeat=k):
        if t in seen:
            continue
        orb = sorted({tuple(G.apply(i, x) for x in t) for i in range(len(G))})
        seen.update(orb)
        out.append(orb)
    return out


def _closure(G: PermGroup, gens: Iterable[int]) -> frozenset[int]:
    found = {G.identity}
    frontier = list(found)
    gens = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = G.mul(a, g)
                if b not in found:
                    found.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(found)


def subgroups(G: PermGroup, bound: int | None = None) -> list[frozenset[int]]:
    """All subgroups as index sets, grown from the trivial one by adjoining elements."""
    bound = group_bound() if bound is None else bound
    if len(G) > bound:
        raise GroupTooLarge(f"group of order {len(G)} exceeds the bound {bound}")
    start = frozenset({G.identity})
    found = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for H in frontier:
            for g in range(len(G)):
                if g in H:
                    continue
                K = _closure(G, sorted(H) + [g])
                if K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    return sorted(found, key=lambda H: (len(H), sorted(H)))


def conjugate(G: PermGroup, H: Iterable[int], g: int) -> frozenset[int]:
    ginv = G.inverse(g)
    return frozenset(G.mul(G.mul(g, h), ginv) for h in H)


def subgroup_conjugacy_classes(G: PermGroup, bound: int | None = None) -> list[list[frozenset[int]]]:
    """Subgroups grouped into conjugacy classes, ordered by order then least member."""
    remaining = subgroups(G, bound)
    classes = []
    placed: set = set()
    for H in remaining:
        if H in placed:
            continue
        cls = sorted({conjugate(G, H, g) for g in range(len(G))}, key=lambda K: sorted(K))
        placed.update(cls)
        classes.append(cls)
    return classes


@dataclass(frozen=True)
class GSet:
    """Left action: ``action[(i, x)]`` is ``elements[i]`` applied to carrier point ``x``."""

    group: PermGroup
    carrier: tuple[str, ...]
    action: Mapping[tuple[int, str], str]

    def act(self, i: int, x: str) -> str:
        return self.action[(i, x)]

    def orbits(self) -> list[list[str]]:
        seen: set = set()
        out = []
        for x in self.carrier:
            if x in seen:
                continue
            orb = sorted({self.act(i, x) for i in range(len(self.group))})
            seen.update(orb)
            out.append(orb)
        return out

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "carrier": list(self.carrier),
            "action": {
                str(i): {x: self.act(i, x) for x in self.carrier} for i in range(len(self.group))
            },
        }


def make_gset(G: PermGroup, carrier: Iterable, action: Mapping[tuple[int, str], str]) -> GSet:
    carrier = tuple(str(x) for x in carrier)
    members = set(carrier)
    act = {}
    for i in range(len(G)):
        for x in carrier:
            y = action.get((i, x))
            if y not in members:
                raise MalformedInput(f"group element {i} sends {x!r} outside the carrier")
            act[(i, x)] = y
    X = GSet(G, carrier, act)
    e = G.identity
    for x in carrier:
        if X.act(e, x) != x:
            raise MalformedInput("identity does not act trivially")
        for i in range(len(G)):
            for j in range(len(G)):
                if X.act(G.mul(i, j), x) != X.act(i, X.act(j, x)):
                    raise MalformedInput(f"action does not respect composition at {x!r}")
    return X


def gset_from_json(raw: Mapping) -> GSet:
    if not isinstance(raw, Mapping) or not {"group", "carrier", "action"} <= set(raw):
        raise MalformedInput("G-set file needs 'group', 'carrier' and 'action'")
    G = group_from_json(raw["group"])
    action = {}
    for i, table in raw["action"].items():
        for x, y in table.items():
            action[(int(i), str(x))] = str(y)
    return make_gset(G, raw["carrier"], action)


def coset_gset(G: PermGroup, H: Iterable[int]) -> GSet:
    """Left action on the cosets ``gH``, named ``c0, c1, ...`` by least member."""
    H = sorted(H)
    cosets = sorted({frozenset(G.mul(g, h) for h in H) for g in range(len(G))}, key=min)
    name = {}
    for k, cos in enumerate(cosets):
        for g in cos:
            name[g] = f"c{k}"
    carrier = tuple(f"c{k}" for k in range(len(cosets)))
    rep = {f"c{k}": min(cos) for k, cos in enumerate(cosets)}
    action = {(i, x): name[G.mul(i, rep[x])] for i in range(len(G)) for x in carrier}
    return GSet(G, carrier, action)


def transitive_gsets(G: PermGroup, bound: int | None = None) -> list[GSet]:
    """One coset action per conjugacy class of subgroups."""
    return [coset_gset(G, cls[0]) for cls in subgroup_conjugacy_classes(G, bound)]


def group_category(G: PermGroup, obj: str = "*") -> Category:
    """One-object category whose morphisms ``g0, g1, ...`` are the group elements."""
    names = [f"g{i}" for i in range(len(G))]
    return validate_category(
        {
            "objects": [obj],
            "morphisms": [{"id": n, "dom": obj, "cod": obj} for n in names],
            "identities": {obj: names[G.identity]},
            "composition": [
                [names[i], names[j], names[G.mul(i, j)]] for i in range(len(G)) for j in range(len(G))
            ],
        }
    )


def gset_as_presheaf(X: GSet, obj: str = "*") -> tuple[Category, Presheaf]:
    """The G-set as a presheaf on the one-object category of its group.

    A presheaf needs a right action, so ``g`` acts through its inverse.
    """
    G = X.group
    C = group_category(G, obj)
    actions = {
        f"g{i}": {x: X.act(G.inverse(i), x) for x in X.carrier} for i in range(len(G))
    }
    return C, Presheaf(C, {obj: tuple(sorted(X.carrier))}, actions)
