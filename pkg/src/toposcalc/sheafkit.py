"""Finite presheaves on finite sites and the sheaf-theoretic operations on them.

Presheaves are contravariant: ``actions[f]`` maps ``F(cod f)`` to ``F(dom f)``.
Subobjects in the sheaf topos are represented by closed subpresheaves;
sheafification is the plus-construction applied twice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    FunctorialityViolation,
    MalformedInput,
    NaturalityViolation,
    NotAnAtom,
    NotAtomicSite,
    SiteNotLocallyConnected,
    UnknownElement,
)
from .fincat import Category, validate_category
from .sitecore import (
    Sieve,
    Topology,
    atomic_topology,
    enumerate_sieves,
    maximal_sieve,
    pullback_sieve,
    sieve_is_connected,
)


@dataclass(frozen=True)
class Site:
    category: Category
    topology: Topology

    def __iter__(self):
        return iter((self.category, self.topology))


@dataclass(frozen=True)
class Presheaf:
    category: Category
    sets: Mapping[str, tuple[str, ...]]
    actions: Mapping[str, Mapping[str, str]]

    def act(self, f: str, x: str) -> str:
        return self.actions[f][x]

    def elements(self) -> list[tuple[str, str]]:
        return [(c, x) for c in sorted(self.sets) for x in self.sets[c]]

    def size(self) -> int:
        return sum(len(s) for s in self.sets.values())

    def to_json(self) -> dict:
        C = self.category
        ids = set(C.identities.values())
        return {
            "sets": {c: list(self.sets[c]) for c in sorted(self.sets)},
            "actions": {
                f: dict(sorted(self.actions[f].items())) for f in C.arrows if f not in ids
            },
        }


def make_presheaf(C: Category, sets: Mapping[str, Iterable], actions: Mapping[str, Mapping] = None) -> Presheaf:
    """Build a presheaf, filling identity actions and checking functoriality.

    Objects missing from ``sets`` get the empty set.  Elements are coerced
    to strings.
    """
    actions = actions or {}
    fsets = {}
    for c in C.objects:
        elems = [str(x) for x in sets.get(c, ())]
        if len(set(elems)) != len(elems):
            raise MalformedInput(f"duplicate elements in F({c})")
        fsets[c] = tuple(sorted(elems))
    for c in sets:
        C.require_object(c)
    for f in actions:
        if f not in C.morphisms:
            raise MalformedInput(f"action given for unknown morphism {f!r}")
    acts: dict[str, dict[str, str]] = {}
    for f in C.arrows:
        d, c = C.morphisms[f]
        if f == C.identities[c] and f not in actions:
            acts[f] = {x: x for x in fsets[c]}
            continue
        given = {str(k): str(v) for k, v in actions.get(f, {}).items()}
        if set(given) != set(fsets[c]):
            raise MalformedInput(f"action of {f} must be defined exactly on F({c})")
        for x, y in given.items():
            if y not in fsets[d]:
                raise MalformedInput(f"action of {f} sends {x} outside F({d}): {y}")
        acts[f] = given
    F = Presheaf(C, fsets, acts)
    problem = functoriality_failure(F)
    if problem:
        raise FunctorialityViolation(problem)
    return F


def functoriality_failure(F: Presheaf) -> str | None:
    C = F.category
    for c, i in sorted(C.identities.items()):
        if any(F.actions[i][x] != x for x in F.sets[c]):
            return f"identity {i} does not act trivially"
    for (g, f), h in sorted(C.table.items()):
        for x in F.sets[C.cod(g)]:
            if F.act(h, x) != F.act(f, F.act(g, x)):
                return f"F({g}o{f}) != F({f})F({g}) at {x}"
    return None


def presheaf_from_json(C: Category, raw: Mapping) -> Presheaf:
    if not isinstance(raw, Mapping) or "sets" not in raw:
        raise MalformedInput("presheaf file must be an object with a 'sets' key")
    return make_presheaf(C, raw["sets"], raw.get("actions", {}))


@dataclass(frozen=True)
class NatTrans:
    source: Presheaf
    target: Presheaf
    components: Mapping[str, Mapping[str, str]]

    def __call__(self, c: str, x: str) -> str:
        return self.components[c][x]

    def to_json(self) -> dict:
        return {c: dict(sorted(self.components[c].items())) for c in sorted(self.components)}


def make_nat_trans(P: Presheaf, Q: Presheaf, components: Mapping[str, Mapping]) -> NatTrans:
    C = P.category
    comps = {}
    for c in C.objects:
        comp = {str(k): str(v) for k, v in components.get(c, {}).items()}
        if set(comp) != set(P.sets[c]) or not set(comp.values()) <= set(Q.sets[c]):
            raise NaturalityViolation(f"component at {c} is not a function F({c}) -> G({c})")
        comps[c] = comp
    for f in C.arrows:
        d, c = C.morphisms[f]
        for x in P.sets[c]:
            if comps[d][P.act(f, x)] != Q.act(f, comps[c][x]):
                raise NaturalityViolation(f"naturality square for {f} fails at {x}")
    return NatTrans(P, Q, comps)


def identity_nat(P: Presheaf) -> NatTrans:
    return NatTrans(P, P, {c: {x: x for x in P.sets[c]} for c in P.sets})


def compose_nat(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    """``beta o alpha``."""
    return NatTrans(
        alpha.source,
        beta.target,
        {c: {x: beta.components[c][y] for x, y in alpha.components[c].items()} for c in alpha.components},
    )


def is_iso(alpha: NatTrans) -> bool:
    return all(
        sorted(comp.values()) == list(alpha.target.sets[c]) for c, comp in alpha.components.items()
    )


@dataclass(frozen=True)
class Subpresheaf:
    parent: Presheaf
    subsets: Mapping[str, frozenset[str]]

    @property
    def sort_key(self):
        pairs = tuple(sorted((c, x) for c, s in self.subsets.items() for x in s))
        return (len(pairs), pairs)

    def __lt__(self, other: "Subpresheaf") -> bool:
        return self.sort_key < other.sort_key

    def __le__(self, other: "Subpresheaf") -> bool:
        return all(s <= other.subsets[c] for c, s in self.subsets.items())

    def __and__(self, other: "Subpresheaf") -> "Subpresheaf":
        return Subpresheaf(self.parent, {c: s & other.subsets[c] for c, s in self.subsets.items()})

    def __or__(self, other: "Subpresheaf") -> "Subpresheaf":
        return Subpresheaf(self.parent, {c: s | other.subsets[c] for c, s in self.subsets.items()})

    def size(self) -> int:
        return sum(len(s) for s in self.subsets.values())

    def is_whole(self) -> bool:
        return all(len(s) == len(self.parent.sets[c]) for c, s in self.subsets.items())

    def as_presheaf(self) -> Presheaf:
        P = self.parent
        return Presheaf(
            P.category,
            {c: tuple(sorted(s)) for c, s in self.subsets.items()},
            {
                f: {x: y for x, y in act.items() if x in self.subsets[P.category.cod(f)]}
                for f, act in P.actions.items()
            },
        )

    def to_json(self) -> dict:
        return {c: sorted(self.subsets[c]) for c in sorted(self.subsets)}


def make_subpresheaf(F: Presheaf, subsets: Mapping[str, Iterable[str]]) -> Subpresheaf:
    subs = {c: frozenset(str(x) for x in subsets.get(c, ())) for c in F.sets}
    for c, s in subs.items():
        if not s <= set(F.sets[c]):
            raise UnknownElement(f"subset at {c} is not contained in F({c})")
    for f in F.category.arrows:
        d, c = F.category.morphisms[f]
        if any(F.act(f, x) not in subs[d] for x in subs[c]):
            raise MalformedInput(f"subset is not closed under the action of {f}")
    return Subpresheaf(F, subs)


def whole(F: Presheaf) -> Subpresheaf:
    return Subpresheaf(F, {c: frozenset(s) for c, s in F.sets.items()})


def empty_sub(F: Presheaf) -> Subpresheaf:
    return Subpresheaf(F, {c: frozenset() for c in F.sets})


# constructions --------------------------------------------------------------


def yoneda(C: Category, c: str) -> Presheaf:
    """The representable ``C(-, c)``, acting by precomposition."""
    C.require_object(c)
    sets = {d: C.hom(d, c) for d in C.objects}
    actions = {
        f: {g: C.compose(g, f) for g in C.hom(C.cod(f), c)} for f in C.arrows
    }
    return Presheaf(C, {d: tuple(sorted(s)) for d, s in sets.items()}, actions)


def constant_presheaf(C: Category, L: Iterable) -> Presheaf:
    elems = tuple(sorted(str(x) for x in L))
    return Presheaf(
        C, {c: elems for c in C.objects}, {f: {x: x for x in elems} for f in C.arrows}
    )


def coproduct(*parts: Presheaf) -> Presheaf:
    """Disjoint union; element ``x`` of the ``i``-th summand becomes ``"i:x"``."""
    C = parts[0].category
    sets = {c: tuple(sorted(f"{i}:{x}" for i, P in enumerate(parts) for x in P.sets[c])) for c in C.objects}
    actions = {
        f: {f"{i}:{x}": f"{i}:{y}" for i, P in enumerate(parts) for x, y in P.actions[f].items()}
        for f in C.arrows
    }
    return Presheaf(C, sets, actions)


def sieve_presheaf(C: Category, S: Sieve) -> Presheaf:
    """The sieve ``S`` as a subpresheaf of ``y(base)``."""
    sets = {d: tuple(sorted(f for f in S.arrows if C.dom(f) == d)) for d in C.objects}
    actions = {
        g: {f: C.compose(f, g) for f in sets[C.cod(g)]} for g in C.arrows
    }
    return Presheaf(C, sets, actions)


# homs ------------------------------------------------------------------------


def iter_homs(P: Presheaf, Q: Presheaf, injective: bool = False) -> Iterator[dict[str, dict[str, str]]]:
    """Enumerate natural transformations ``P -> Q`` as component dicts.

    Backtracking over the elements of ``P`` in order; choosing the image of
    an element fixes the images of its whole orbit, and clashes prune.
    """
    C = P.category
    elems = P.elements()
    assign: dict[tuple[str, str], str] = {}
    used: dict[str, set[str]] = {c: set() for c in C.objects}

    def place(c, x, y, trail) -> bool:
        for f in C.arrows_into(c):
            d = C.dom(f)
            key = (d, P.act(f, x))
            val = Q.act(f, y)
            got = assign.get(key)
            if got is None:
                if injective and val in used[d]:
                    return False
                assign[key] = val
                used[d].add(val)
                trail.append(key)
            elif got != val:
                return False
        return True

    def search(i):
        while i < len(elems) and elems[i] in assign:
            i += 1
        if i == len(elems):
            comps = {c: {} for c in C.objects}
            for (c, x), y in assign.items():
                comps[c][x] = y
            yield comps
            return
        c, x = elems[i]
        for y in Q.sets[c]:
            trail: list = []
            if place(c, x, y, trail):
                yield from search(i + 1)
            for key in trail:
                used[key[0]].discard(assign.pop(key))

    yield from search(0)


def hom_set(P: Presheaf, Q: Presheaf) -> list[NatTrans]:
    return [NatTrans(P, Q, comps) for comps in iter_homs(P, Q)]


def isomorphism(P: Presheaf, Q: Presheaf) -> NatTrans | None:
    if any(len(P.sets[c]) != len(Q.sets[c]) for c in P.sets):
        return None
    for comps in iter_homs(P, Q, injective=True):
        return NatTrans(P, Q, comps)
    return None


def matching_families(F: Presheaf, S: Sieve) -> list[dict[str, str]]:
    """Families ``(x_f)`` over ``S`` with ``x_{f o g} = F(g)(x_f)``."""
    C = F.category
    out = []
    for comps in iter_homs(sieve_presheaf(C, S), F):
        fam = {}
        for part in comps.values():
            fam.update(part)
        out.append(fam)
    return out


def amalgamations(F: Presheaf, S: Sieve, family: Mapping[str, str]) -> list[str]:
    return [y for y in F.sets[S.base] if all(F.act(f, y) == x for f, x in family.items())]


@dataclass(frozen=True)
class SheafFailure:
    obj: str
    sieve: Sieve
    family: Mapping[str, str]
    amalgamations: tuple[str, ...]

    def describe(self) -> str:
        fam = ", ".join(f"{f}:{x}" for f, x in sorted(self.family.items()))
        return (
            f"matching family {{{fam}}} over {self.sieve!r} has "
            f"{len(self.amalgamations)} amalgamations"
        )


def sheaf_failure(site: Site, F: Presheaf) -> SheafFailure | None:
    C, J = site
    for c in sorted(C.objects):
        top = maximal_sieve(C, c)
        for S in J.covering(c):
            if S == top:
                continue
            for fam in matching_families(F, S):
                amal = amalgamations(F, S, fam)
                if len(amal) != 1:
                    return SheafFailure(c, S, fam, tuple(amal))
    return None


def is_sheaf(site: Site, F: Presheaf) -> bool:
    return sheaf_failure(site, F) is None


# sheafification --------------------------------------------------------------


def _family_key(fam: Mapping[str, str]) -> str:
    return json.dumps(sorted(fam.items()), separators=(",", ":"))


def plus_construction(site: Site, F: Presheaf) -> tuple[Presheaf, NatTrans]:
    """One application of the plus-construction, with its canonical map.

    ``F+(c)`` is the set of matching families over covering sieves on ``c``,
    two families being identified when they agree on a common covering
    sieve.  The largest sieve on which two families agree is itself a sieve,
    so agreement on some covering refinement is decided by testing whether
    that sieve covers.  Class ids are ``"<obj>#<k>"`` with ``k`` the rank of
    the class's least serialized member.
    """
    C, J = site
    lookup: dict[str, dict[str, str]] = {}
    rep: dict[str, dict[str, tuple[Sieve, dict]]] = {}
    sets: dict[str, tuple[str, ...]] = {}
    for c in sorted(C.objects):
        members = [(S, fam) for S in J.covering(c) for fam in matching_families(F, S)]
        parent = list(range(len(members)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i, (S, x) in enumerate(members):
            for j in range(i + 1, len(members)):
                if find(i) == find(j):
                    continue
                T, y = members[j]
                agree = frozenset(f for f in S.arrows & T.arrows if x[f] == y[f])
                if J.is_covering(Sieve(c, agree)):
                    parent[find(j)] = find(i)
        keys = [_family_key(fam) for _, fam in members]
        groups: dict[int, list[int]] = {}
        for i in range(len(members)):
            groups.setdefault(find(i), []).append(i)
        ordered = sorted(groups.values(), key=lambda g: min(keys[i] for i in g))
        lookup[c] = {}
        rep[c] = {}
        names = []
        for k, group in enumerate(ordered):
            name = f"{c}#{k}"
            names.append(name)
            best = min(group, key=lambda i: keys[i])
            rep[c][name] = members[best]
            for i in group:
                lookup[c][keys[i]] = name
        sets[c] = tuple(sorted(names))

    actions: dict[str, dict[str, str]] = {}
    for h in C.arrows:
        d, c = C.morphisms[h]
        act = {}
        for name, (S, fam) in rep[c].items():
            T = pullback_sieve(C, S, h)
            pulled = {g: fam[C.compose(h, g)] for g in T.arrows}
            act[name] = lookup[d][_family_key(pulled)]
        actions[h] = act
    plus = Presheaf(C, sets, actions)
    unit = {
        c: {
            x: lookup[c][_family_key({f: F.act(f, x) for f in C.arrows_into(c)})]
            for x in F.sets[c]
        }
        for c in C.objects
    }
    return plus, NatTrans(F, plus, unit)


def sheafify(site: Site, F: Presheaf) -> tuple[Presheaf, NatTrans]:
    """Associated sheaf ``aF`` and the unit ``F -> aF`` (double plus-construction)."""
    F1, eta1 = plus_construction(site, F)
    F2, eta2 = plus_construction(site, F1)
    return F2, compose_nat(eta2, eta1)


# subobjects --------------------------------------------------------------------


def closure(site: Site, F: Presheaf, S: Subpresheaf) -> Subpresheaf:
    """Elements whose sieve of restrictions landing in ``S`` is covering."""
    C, J = site
    out = {}
    for c in C.objects:
        keep = set()
        for x in F.sets[c]:
            arrows = frozenset(f for f in C.arrows_into(c) if F.act(f, x) in S.subsets[C.dom(f)])
            if J.is_covering(Sieve(c, arrows)):
                keep.add(x)
        out[c] = frozenset(keep)
    return Subpresheaf(F, out)


def orbit(F: Presheaf, c: str, x: str) -> Subpresheaf:
    """Subpresheaf generated by ``x in F(c)``."""
    if x not in F.sets.get(c, ()):
        raise UnknownElement(f"{x!r} is not an element of F({c})")
    C = F.category
    subs = {d: set() for d in C.objects}
    for f in C.arrows_into(c):
        subs[C.dom(f)].add(F.act(f, x))
    return Subpresheaf(F, {d: frozenset(s) for d, s in subs.items()})


def subpresheaves(F: Presheaf) -> list[Subpresheaf]:
    """All subpresheaves, as unions of element orbits."""
    found = {frozenset()}
    for c, x in F.elements():
        gen = frozenset((d, y) for d, s in orbit(F, c, x).subsets.items() for y in s)
        found |= {s | gen for s in found}
    out = []
    for s in found:
        subs = {c: set() for c in F.sets}
        for d, y in s:
            subs[d].add(y)
        out.append(Subpresheaf(F, {c: frozenset(v) for c, v in subs.items()}))
    return sorted(out)


def subsheaves(site: Site, F: Presheaf) -> list[Subpresheaf]:
    """Closed subpresheaves of the sheaf ``F``: its subobjects in the sheaf topos."""
    seen = {}
    for S in subpresheaves(F):
        K = closure(site, F, S)
        seen.setdefault(K.sort_key, K)
    return sorted(seen.values())


def zero_sub(site: Site, F: Presheaf) -> Subpresheaf:
    """Least closed subpresheaf of ``F``: the zero subobject."""
    return closure(site, F, empty_sub(F))


def is_zero(site: Site, F: Presheaf) -> bool:
    return zero_sub(site, F).is_whole()


def is_atom(site: Site, F: Presheaf) -> bool:
    return len(subsheaves(site, F)) == 2


def image(alpha: NatTrans) -> Subpresheaf:
    return Subpresheaf(
        alpha.target,
        {c: frozenset(comp.values()) for c, comp in alpha.components.items()},
    )


def is_epi(site: Site, alpha: NatTrans) -> bool:
    alpha = make_nat_trans(alpha.source, alpha.target, alpha.components)
    return closure(site, alpha.target, image(alpha)).is_whole()


def generated_subsheaf(site: Site, F: Presheaf, c: str, x: str) -> Subpresheaf:
    return closure(site, F, orbit(F, c, x))


def has_generating_element(site: Site, F: Presheaf) -> bool:
    return any(generated_subsheaf(site, F, c, x).is_whole() for c, x in F.elements())


def is_indecomposable(site: Site, F: Presheaf) -> bool:
    """Connectedness read off the subobject lattice: ``F`` is non-zero and no
    pair of non-zero closed subobjects is disjoint with join ``F``."""
    subs = subsheaves(site, F)
    bottom, top = subs[0], subs[-1]
    if len(subs) < 2:
        return False
    middle = subs[1:-1]
    for i, A in enumerate(middle):
        for B in middle[i:]:
            if (A & B).sort_key == bottom.sort_key and closure(site, F, A | B).sort_key == top.sort_key:
                return False
    return True


# connectedness -----------------------------------------------------------------


def locally_connected_failure(site: Site) -> Sieve | None:
    """A covering sieve that is empty or disconnected, if any."""
    C, J = site
    for c in sorted(C.objects):
        for S in J.covering(c):
            if not sieve_is_connected(C, S):
                return S
    return None


def connected_components_sheaf(site: Site, F: Presheaf) -> list[Subpresheaf]:
    """Zigzag components of a sheaf; requires every cover to be non-empty and connected."""
    bad = locally_connected_failure(site)
    if bad is not None:
        raise SiteNotLocallyConnected(f"covering sieve {bad!r} is empty or disconnected")
    C = F.category
    elems = F.elements()
    parent = {e: e for e in elems}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for c, x in elems:
        for f in C.arrows_into(c):
            a, b = find((c, x)), find((C.dom(f), F.act(f, x)))
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for e in elems:
        groups.setdefault(find(e), []).append(e)
    comps = []
    for root in sorted(groups):
        subs = {c: set() for c in F.sets}
        for c, x in groups[root]:
            subs[c].add(x)
        comps.append(Subpresheaf(F, {c: frozenset(s) for c, s in subs.items()}))
    return comps


def is_connected_object(site: Site, F: Presheaf) -> bool:
    return len(connected_components_sheaf(site, F)) == 1


# atomic sites ------------------------------------------------------------------


def terminal_sheaf(site: Site) -> Presheaf:
    return sheafify(site, constant_presheaf(site.category, ["*"]))[0]


def atoms_of_lattice(subs: Sequence[Subpresheaf]) -> list[Subpresheaf]:
    """Minimal elements strictly above the least element."""
    bottom = subs[0]
    above = [s for s in subs if s.sort_key != bottom.sort_key]
    return [a for a in above if not any(b <= a and b.sort_key != a.sort_key for b in above)]


def terminal_decomposition(site: Site) -> list[Subpresheaf]:
    """Atoms of ``Sub(1)`` for a site carrying the atomic topology of its category.

    Their disjoint union is the terminal sheaf; their number is the number
    of completions of the theory the site classifies.
    """
    C, J = site
    if J != atomic_topology(C):
        raise NotAtomicSite("the site's topology is not the atomic topology of its category")
    one = terminal_sheaf(site)
    return atoms_of_lattice(subsheaves(site, one))


@dataclass(frozen=True)
class CanonicalSite:
    category: Category
    topology: Topology
    transformations: Mapping[str, NatTrans]

    def __iter__(self):
        return iter((self.category, self.topology))


def restricted_canonical_topology(site: Site, atoms: Sequence[Presheaf], names: Sequence[str] | None = None) -> CanonicalSite:
    """Full subcategory of sheaves on the given atoms, with the canonical
    topology restricted to it: a sieve covers when its arrows are jointly
    epimorphic, i.e. the closure of the union of their images is everything."""
    names = list(names) if names is not None else [f"A{i}" for i in range(len(atoms))]
    for n, A in zip(names, atoms):
        if not is_atom(site, A):
            raise NotAnAtom(f"{n} is not an atom")
    homs: dict[tuple[int, int], list[NatTrans]] = {}
    for i, A in enumerate(atoms):
        for j, B in enumerate(atoms):
            homs[(i, j)] = hom_set(A, B)
    arrow_of: dict[tuple[int, int, int], str] = {}
    trans: dict[str, NatTrans] = {}
    identities = {}
    morphisms = []
    for (i, j), hs in sorted(homs.items()):
        for k, alpha in enumerate(hs):
            mid = f"{names[i]}>{names[j]}#{k}"
            arrow_of[(i, j, k)] = mid
            trans[mid] = alpha
            morphisms.append({"id": mid, "dom": names[i], "cod": names[j]})
            if i == j and all(x == y for comp in alpha.components.values() for x, y in comp.items()):
                identities[names[i]] = mid

    def index_of(i, j, alpha):
        for k, beta in enumerate(homs[(i, j)]):
            if beta.components == alpha.components:
                return k
        raise AssertionError("composite natural transformation not found")

    composition = []
    for (i, j), first in homs.items():
        for (j2, l), second in homs.items():
            if j2 != j:
                continue
            for a, alpha in enumerate(first):
                for b, beta in enumerate(second):
                    k = index_of(i, l, compose_nat(beta, alpha))
                    composition.append([arrow_of[(j, l, b)], arrow_of[(i, j, a)], arrow_of[(i, l, k)]])
    L = validate_category(
        {"objects": names, "morphisms": morphisms, "identities": identities, "composition": composition}
    )
    covers = {}
    for n, A in zip(names, atoms):
        ok = set()
        for S in enumerate_sieves(L, n):
            union = empty_sub(A)
            for f in S.arrows:
                union = union | image(trans[f])
            if closure(site, A, union).is_whole():
                ok.add(S)
        covers[n] = frozenset(ok)
    return CanonicalSite(L, Topology(covers), trans)


# quotients -----------------------------------------------------------------------


def quotients(F: Presheaf) -> list[tuple[Presheaf, NatTrans]]:
    """All quotient presheaves of ``F`` with their projections.

    Congruences are joins of principal congruences; each class is named by
    its members joined with ``"|"``.
    """
    C = F.category
    elems = F.elements()

    def principal(c, x, y):
        pairs = set()
        for f in C.arrows_into(c):
            d = C.dom(f)
            a, b = F.act(f, x), F.act(f, y)
            if a != b:
                pairs.add(((d, a), (d, b)))
        return pairs

    def classes(pairs):
        parent = {e: e for e in elems}

        def find(e):
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return frozenset(frozenset(e for e in elems if find(e) == r) for r in {find(e) for e in elems})

    def as_pairs(partition):
        out = set()
        for block in partition:
            blk = sorted(block)
            out |= {(blk[0], e) for e in blk[1:]}
        return out

    congruences = {classes(())}
    for c in sorted(F.sets):
        xs = F.sets[c]
        for i, x in enumerate(xs):
            for y in xs[i + 1:]:
                gen = principal(c, x, y)
                congruences |= {classes(as_pairs(t) | gen) for t in congruences}

    out = []
    for partition in sorted(congruences, key=lambda p: sorted(sorted(b) for b in p)):
        name = {}
        for block in partition:
            label = "|".join(x for _, x in sorted(block))
            for e in block:
                name[e] = label
        sets = {c: sorted({name[(c, x)] for x in F.sets[c]}) for c in F.sets}
        actions = {
            f: {name[(C.cod(f), x)]: name[(C.dom(f), y)] for x, y in F.actions[f].items()}
            for f in C.arrows
        }
        Q = Presheaf(C, {c: tuple(s) for c, s in sets.items()}, actions)
        proj = NatTrans(F, Q, {c: {x: name[(c, x)] for x in F.sets[c]} for c in F.sets})
        out.append((Q, proj))
    return out


# files ---------------------------------------------------------------------------


def site_from_json(raw: Mapping) -> Site:
    """Read a site file.  ``topology`` may be omitted or be one of the keywords
    ``"atomic"``, ``"trivial"``, ``"degenerate"``."""
    from .sitecore import degenerate_topology, topology_from_json, trivial_topology

    if not isinstance(raw, Mapping) or "category" not in raw:
        raise MalformedInput("site file must be an object with a 'category' key")
    C = validate_category(raw["category"])
    topo = raw.get("topology", "atomic")
    if topo == "atomic":
        J = atomic_topology(C)
    elif topo == "trivial":
        J = trivial_topology(C)
    elif topo == "degenerate":
        J = degenerate_topology(C)
    elif isinstance(topo, Mapping):
        J = topology_from_json(C, topo)
    else:
        raise MalformedInput(f"unknown topology keyword {topo!r}")
    return Site(C, J)
