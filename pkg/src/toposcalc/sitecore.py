"""Sieves and Grothendieck topologies on finite categories.

The central routine is :func:`saturate`, which computes the least topology
containing a set of generating sieves by alternating stability and
transitivity passes until nothing new is added.  :func:`atomic_topology`
applies it to all non-empty sieves, and :func:`reduce_to_dense` cuts a
category down to the objects not covered by the empty sieve.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import BaseMismatch, MalformedInput, NotFullSubcategory, UnknownObject
from .fincat import Category, connected_components, full_subcategory, is_right_ore


@dataclass(frozen=True)
class Sieve:
    base: str
    arrows: frozenset[str]

    @property
    def sort_key(self):
        return (self.base, len(self.arrows), tuple(sorted(self.arrows)))

    def __lt__(self, other: "Sieve") -> bool:
        return self.sort_key < other.sort_key

    def __len__(self) -> int:
        return len(self.arrows)

    def __contains__(self, f: str) -> bool:
        return f in self.arrows

    def __repr__(self) -> str:
        return f"Sieve({self.base}; {{{', '.join(sorted(self.arrows))}}})"


def generated_sieve(C: Category, base: str, gens: Iterable[str]) -> Sieve:
    """Close a set of arrows into ``base`` under precomposition."""
    C.require_object(base)
    arrows = set()
    for f in gens:
        if f not in C.morphisms:
            raise MalformedInput(f"unknown morphism {f!r}")
        if C.cod(f) != base:
            raise BaseMismatch(f"{f} does not have codomain {base}")
        arrows.update(C.compose(f, p) for p in C.arrows_into(C.dom(f)))
    return Sieve(base, frozenset(arrows))


def maximal_sieve(C: Category, c: str) -> Sieve:
    C.require_object(c)
    return Sieve(c, frozenset(C.arrows_into(c)))


def empty_sieve(C: Category, c: str) -> Sieve:
    C.require_object(c)
    return Sieve(c, frozenset())


def is_sieve(C: Category, S: Sieve) -> bool:
    return all(
        C.cod(f) == S.base and all(C.compose(f, g) in S.arrows for g in C.arrows_into(C.dom(f)))
        for f in S.arrows
    )


def enumerate_sieves(C: Category, c: str) -> list[Sieve]:
    """All sieves on ``c``, sorted by size then arrows.

    Every sieve is a union of principal sieves, so the lattice is built by
    closing ``{empty}`` under union with each principal sieve in turn.
    """
    C.require_object(c)
    key = ("sieves", c)
    cached = C._cache.get(key)
    if cached is None:
        found = {frozenset()}
        for f in C.arrows_into(c):
            principal = generated_sieve(C, c, [f]).arrows
            found |= {s | principal for s in found}
        cached = tuple(sorted(Sieve(c, s) for s in found))
        C._cache[key] = cached
    return list(cached)


def pullback_sieve(C: Category, S: Sieve, h: str) -> Sieve:
    """``h*(S) = {g | h o g in S}``, a sieve on ``dom(h)``."""
    if h not in C.morphisms:
        raise MalformedInput(f"unknown morphism {h!r}")
    if C.cod(h) != S.base:
        raise BaseMismatch(f"cannot pull back a sieve on {S.base} along {h}: {C.cod(h)}")
    d = C.dom(h)
    return Sieve(d, frozenset(g for g in C.arrows_into(d) if C.compose(h, g) in S.arrows))


@dataclass(frozen=True)
class Topology:
    """Covering sieves per object.  Not necessarily a Grothendieck topology;
    see :func:`is_topology`."""

    covers: Mapping[str, frozenset[Sieve]]

    def covering(self, c: str) -> list[Sieve]:
        return sorted(self.covers.get(c, ()))

    def is_covering(self, S: Sieve) -> bool:
        return S in self.covers.get(S.base, ())

    def __le__(self, other: "Topology") -> bool:
        return all(s <= other.covers.get(c, frozenset()) for c, s in self.covers.items())

    def all_sieves(self) -> list[Sieve]:
        return sorted(s for c in self.covers for s in self.covers[c])

    def empty_covered(self) -> list[str]:
        """Objects covered by the empty sieve."""
        return sorted(c for c, s in self.covers.items() if Sieve(c, frozenset()) in s)

    @property
    def trivial_topos(self) -> bool:
        """True when the empty sieve covers every object, so Sh is the one-point topos."""
        return len(self.empty_covered()) == len(self.covers)


def make_topology(C: Category, sieves: Iterable[Sieve]) -> Topology:
    covers: dict[str, set[Sieve]] = {c: set() for c in C.objects}
    for S in sieves:
        if S.base not in covers:
            raise UnknownObject(f"sieve on unknown object {S.base!r}")
        covers[S.base].add(S)
    return Topology({c: frozenset(s) for c, s in covers.items()})


def trivial_topology(C: Category) -> Topology:
    """Only maximal sieves cover; sheaves are all presheaves."""
    return make_topology(C, (maximal_sieve(C, c) for c in C.objects))


def degenerate_topology(C: Category) -> Topology:
    """Every sieve covers every object (the empty sieve included)."""
    return make_topology(C, (s for c in C.objects for s in enumerate_sieves(C, c)))


@dataclass(frozen=True)
class TopologyViolation:
    axiom: str  # "maximality" | "stability" | "transitivity" | "sieve"
    obj: str
    sieve: Sieve | None = None
    arrow: str | None = None
    other: Sieve | None = None

    def describe(self) -> str:
        parts = [f"{self.axiom} fails at {self.obj}"]
        if self.sieve is not None:
            parts.append(f"sieve {self.sieve!r}")
        if self.arrow is not None:
            parts.append(f"arrow {self.arrow}")
        if self.other is not None:
            parts.append(f"forced sieve {self.other!r}")
        return ", ".join(parts)


def topology_violation(C: Category, J: Topology) -> TopologyViolation | None:
    """First violated axiom (maximality, then stability, then transitivity)."""
    for c in sorted(C.objects):
        for S in J.covering(c):
            if not is_sieve(C, S):
                return TopologyViolation("sieve", c, S)
    for c in sorted(C.objects):
        if not J.is_covering(maximal_sieve(C, c)):
            return TopologyViolation("maximality", c)
    for c in sorted(C.objects):
        for S in J.covering(c):
            for h in C.arrows_into(c):
                if not J.is_covering(pullback_sieve(C, S, h)):
                    return TopologyViolation("stability", c, S, arrow=h)
    for c in sorted(C.objects):
        for S in J.covering(c):
            for R in enumerate_sieves(C, c):
                if J.is_covering(R):
                    continue
                if all(J.is_covering(pullback_sieve(C, R, f)) for f in sorted(S.arrows)):
                    return TopologyViolation("transitivity", c, S, other=R)
    return None


def is_topology(C: Category, J: Topology) -> bool:
    return topology_violation(C, J) is None


def saturate(C: Category, generators: Iterable[Sieve]) -> Topology:
    """Least Grothendieck topology containing ``generators``.

    Stability and transitivity passes alternate until a full round adds
    nothing; the covering family only grows inside a finite powerset, so the
    loop terminates.
    """
    covers: dict[str, set[Sieve]] = {c: {maximal_sieve(C, c)} for c in C.objects}
    for S in generators:
        if S.base not in covers:
            raise UnknownObject(f"sieve on unknown object {S.base!r}")
        if not is_sieve(C, S):
            raise MalformedInput(f"{S!r} is not closed under precomposition")
        covers[S.base].add(S)

    changed = True
    while changed:
        changed = False
        # stability
        for c in sorted(C.objects):
            for S in sorted(covers[c]):
                for h in C.arrows_into(c):
                    P = pullback_sieve(C, S, h)
                    if P not in covers[P.base]:
                        covers[P.base].add(P)
                        changed = True
        # transitivity
        for c in sorted(C.objects):
            candidates = [R for R in enumerate_sieves(C, c) if R not in covers[c]]
            for R in candidates:
                pulled = {f: pullback_sieve(C, R, f) for f in C.arrows_into(c)}
                if any(
                    all(pulled[f] in covers[C.dom(f)] for f in S.arrows)
                    for S in sorted(covers[c])
                ):
                    covers[c].add(R)
                    changed = True
    return Topology({c: frozenset(s) for c, s in covers.items()})


def nonempty_sieves(C: Category) -> list[Sieve]:
    return [S for c in sorted(C.objects) for S in enumerate_sieves(C, c) if S.arrows]


def atomic_topology(C: Category) -> Topology:
    """Least topology in which every non-empty sieve covers."""
    J = C._cache.get("atomic")
    if J is None:
        J = saturate(C, nonempty_sieves(C))
        C._cache["atomic"] = J
    return J


def check_full_subcategory(C: Category, D: Category) -> None:
    for o in D.objects:
        if not C.has_object(o) or D.identities[o] != C.identities[o]:
            raise NotFullSubcategory(f"object {o!r} of the subcategory is not an object of the ambient category")
    keep = set(D.objects)
    expected = {f for f, (d, c) in C.morphisms.items() if d in keep and c in keep}
    if set(D.morphisms) != expected:
        raise NotFullSubcategory("morphism sets differ from the full subcategory on the same objects")
    for f in expected:
        if D.morphisms[f] != C.morphisms[f]:
            raise NotFullSubcategory(f"morphism {f} has different endpoints")
    for key, h in D.table.items():
        if C.table.get(key) != h:
            raise NotFullSubcategory(f"composition {key} differs from the ambient category")


def induced_topology(C: Category, J: Topology, D: Category) -> Topology:
    """Topology on the full subcategory ``D`` induced by ``J``.

    A sieve ``R`` on ``c`` in ``D`` covers exactly when the sieve it generates
    in ``C`` is ``J``-covering.
    """
    check_full_subcategory(C, D)
    covers = {}
    for c in D.objects:
        covers[c] = frozenset(
            R for R in enumerate_sieves(D, c) if J.is_covering(generated_sieve(C, c, R.arrows))
        )
    return Topology(covers)


def induced_topology_by_restriction(C: Category, J: Topology, D: Category) -> Topology:
    """Alternative reading: ``R`` covers iff some ``J``-covering ``H`` has ``H & arr(D) == R``."""
    check_full_subcategory(C, D)
    arrows = set(D.morphisms)
    covers = {}
    for c in D.objects:
        traces = {H.arrows & arrows for H in J.covering(c)}
        covers[c] = frozenset(R for R in enumerate_sieves(D, c) if R.arrows in traces)
    return Topology(covers)


@dataclass(frozen=True)
class DenseReduction:
    category: Category
    topology: Topology
    dropped: tuple[str, ...]

    def __iter__(self):
        return iter((self.category, self.topology))


def dense_postcondition_failures(C: Category, reduced: Category, J: Topology) -> list[str]:
    """Violations of the three guarantees of :func:`reduce_to_dense`."""
    problems = []
    if not is_right_ore(reduced):
        problems.append("reduced category is not right Ore")
    for c in reduced.objects:
        want = {S for S in enumerate_sieves(reduced, c) if S.arrows}
        if set(J.covers.get(c, ())) != want:
            problems.append(f"induced covers on {c} are not exactly the non-empty sieves")
    if sorted(reduced.objects) not in [sorted(u) for u in enumerate_ideals(C)]:
        problems.append("reduced objects are not a union of connected components")
    return problems


def reduce_to_dense(C: Category) -> DenseReduction:
    """Full subcategory on objects not covered by the empty sieve under the
    atomic topology, with the topology induced on it."""
    J = atomic_topology(C)
    dropped = tuple(J.empty_covered())
    reduced = full_subcategory(C, [c for c in C.objects if c not in set(dropped)])
    J_red = induced_topology(C, J, reduced)
    problems = dense_postcondition_failures(C, reduced, J_red)
    if problems:
        raise AssertionError("; ".join(problems))
    return DenseReduction(reduced, J_red, dropped)


def enumerate_ideals(C: Category) -> list[list[str]]:
    """Object sets closed in both directions along every arrow, i.e. unions
    of connected components; sorted by size then ids."""
    comps = connected_components(C)
    ideals = []
    for r in range(len(comps) + 1):
        for pick in itertools.combinations(comps, r):
            ideals.append(sorted(o for comp in pick for o in comp))
    return sorted(ideals, key=lambda u: (len(u), u))


def sieve_is_connected(C: Category, S: Sieve) -> bool:
    """Whether ``S`` is non-empty and connected as a full subcategory of ``C/c``."""
    arrows = sorted(S.arrows)
    if not arrows:
        return False
    parent = {f: f for f in arrows}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in arrows:
        for m in C.arrows_into(C.dom(k)):
            h = C.compose(k, m)  # h factors through k
            a, b = find(h), find(k)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return len({find(f) for f in arrows}) == 1


def topology_to_json(J: Topology) -> dict:
    return {
        "covers": {
            c: [sorted(S.arrows) for S in J.covering(c)] for c in sorted(J.covers)
        }
    }


def sieves_from_json(C: Category, raw: Mapping) -> list[Sieve]:
    """Read generator-form sieves; each inner list is closed under precomposition."""
    if not isinstance(raw, Mapping) or "covers" not in raw:
        raise MalformedInput("topology file must be an object with a 'covers' key")
    out = []
    for c, gens_list in sorted(raw["covers"].items()):
        C.require_object(c)
        for gens in gens_list:
            if not isinstance(gens, list):
                raise MalformedInput(f"sieve on {c} must be a list of arrows")
            out.append(generated_sieve(C, c, gens))
    return out


def topology_from_json(C: Category, raw: Mapping) -> Topology:
    return make_topology(C, sieves_from_json(C, raw))
