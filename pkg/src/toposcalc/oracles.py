"""Brute-force reference implementations used to cross-check the library.

Everything here is written straight from the definitions, by exhaustive
search over subsets, maps or permutations.  Only the data types are shared
with the rest of the package, so agreement is meaningful evidence.  These
are exponential and meant for categories of a handful of morphisms and
structures of at most six elements.
"""

from __future__ import annotations

import itertools
from typing import Mapping

from .fincat import Category
from .gsets import PermGroup
from .modelkit import Structure
from .sheafkit import Presheaf


def _powerset(items):
    items = list(items)
    return itertools.chain.from_iterable(itertools.combinations(items, r) for r in range(len(items) + 1))


def sieves_on(C: Category, c: str) -> list[frozenset]:
    """All subsets of arrows into ``c`` closed under precomposition."""
    into = [f for f in C.morphisms if C.morphisms[f][1] == c]
    out = []
    for subset in _powerset(into):
        s = set(subset)
        if all(C.table[(f, g)] in s for f in s for g in C.morphisms if C.morphisms[g][1] == C.morphisms[f][0]):
            out.append(frozenset(s))
    return out


def pullback(C: Category, S: frozenset, f: str) -> frozenset:
    d = C.morphisms[f][0]
    return frozenset(g for g in C.morphisms if C.morphisms[g][1] == d and C.table[(f, g)] in S)


def topology_axioms_hold(C: Category, covers: Mapping[str, set]) -> bool:
    """Maximality, stability and transitivity, read off the definitions."""
    for c in C.objects:
        into = frozenset(f for f in C.morphisms if C.morphisms[f][1] == c)
        if into not in covers[c]:
            return False
        for S in covers[c]:
            for f in into:
                if pullback(C, S, f) not in covers[C.morphisms[f][0]]:
                    return False
        for R in sieves_on(C, c):
            if R in covers[c]:
                continue
            for S in covers[c]:
                if all(pullback(C, R, f) in covers[C.morphisms[f][0]] for f in S):
                    return False
    return True


def all_topologies(C: Category) -> list[dict[str, frozenset]]:
    """Every Grothendieck topology, as ``{object: frozenset of sieves}``."""
    per_object = []
    for c in C.objects:
        maximal = frozenset(f for f in C.morphisms if C.morphisms[f][1] == c)
        rest = [S for S in sieves_on(C, c) if S != maximal]
        per_object.append([frozenset(fam) | {maximal} for fam in _powerset(rest)])
    out = []
    for choice in itertools.product(*per_object):
        covers = dict(zip(C.objects, choice))
        if topology_axioms_hold(C, covers):
            out.append(covers)
    return out


def minimal_topology(C: Category, generators: Mapping[str, set]) -> dict[str, frozenset]:
    """The least topology containing ``generators``, found among all topologies."""
    containing = [
        J for J in all_topologies(C) if all(frozenset(S) in J[c] for c, gens in generators.items() for S in gens)
    ]
    for J in containing:
        if all(J[c] <= K[c] for K in containing for c in C.objects):
            return J
    raise AssertionError("topologies are closed under intersection; a least one must exist")


def is_right_ore(C: Category) -> bool:
    for f, g in itertools.product(C.morphisms, repeat=2):
        if C.morphisms[f][1] != C.morphisms[g][1]:
            continue
        if not any(
            C.morphisms[p][1] == C.morphisms[f][0]
            and C.morphisms[q][1] == C.morphisms[g][0]
            and C.morphisms[p][0] == C.morphisms[q][0]
            and C.table[(f, p)] == C.table[(g, q)]
            for p in C.morphisms
            for q in C.morphisms
        ):
            return False
    return True


def components(C: Category) -> list[frozenset]:
    """Connected components by breadth-first search on the underlying undirected graph."""
    adj = {c: set() for c in C.objects}
    for d, e in C.morphisms.values():
        adj[d].add(e)
        adj[e].add(d)
    seen: set = set()
    out = []
    for c in sorted(C.objects):
        if c in seen:
            continue
        comp, todo = {c}, [c]
        while todo:
            for n in adj[todo.pop()]:
                if n not in comp:
                    comp.add(n)
                    todo.append(n)
        seen |= comp
        out.append(frozenset(comp))
    return out


def ideals(C: Category) -> set[frozenset]:
    """Object sets containing the source of an arrow iff they contain its target."""
    return {
        frozenset(U)
        for U in _powerset(C.objects)
        if all((d in U) == (e in U) for d, e in C.morphisms.values())
    }


def natural_transformations(P: Presheaf, Q: Presheaf) -> list[dict]:
    """All families of component maps satisfying naturality, by full product enumeration."""
    C = P.category
    objs = sorted(C.objects)
    choices = [list(itertools.product(Q.sets[c], repeat=len(P.sets[c]))) for c in objs]
    out = []
    for pick in itertools.product(*choices):
        comp = {c: dict(zip(P.sets[c], img)) for c, img in zip(objs, pick)}
        if all(
            comp[C.morphisms[f][0]][P.actions[f][x]] == Q.actions[f][comp[C.morphisms[f][1]][x]]
            for f in C.morphisms
            for x in P.sets[C.morphisms[f][1]]
        ):
            out.append(comp)
    return out


def is_sheaf(C: Category, covers: Mapping[str, set], F: Presheaf) -> bool:
    """Unique amalgamation for every matching family, with families enumerated as raw assignments."""
    for c in C.objects:
        for S in covers[c]:
            S = sorted(S)
            options = [F.sets[C.morphisms[f][0]] for f in S]
            families = []
            for pick in itertools.product(*options):
                x = dict(zip(S, pick))
                if all(
                    F.actions[g][x[f]] == x[C.table[(f, g)]]
                    for f in S
                    for g in C.morphisms
                    if C.morphisms[g][1] == C.morphisms[f][0]
                ):
                    families.append(x)
            for x in families:
                amalgams = [a for a in F.sets[c] if all(F.actions[f][a] == x[f] for f in S)]
                if len(amalgams) != 1:
                    return False
    return True


def _set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


def quotient_count(F: Presheaf) -> int:
    """Number of quotients of ``F``: per-object partitions respected by every action."""
    C = F.category
    objs = sorted(F.sets)
    count = 0
    for choice in itertools.product(*(list(_set_partitions(F.sets[c])) for c in objs)):
        block = {}
        for c, part in zip(objs, choice):
            for k, blk in enumerate(part):
                for x in blk:
                    block[(c, x)] = k
        if all(
            block[(C.morphisms[f][0], F.actions[f][x])] == block[(C.morphisms[f][0], F.actions[f][y])]
            for f in C.morphisms
            for x in F.sets[C.morphisms[f][1]]
            for y in F.sets[C.morphisms[f][1]]
            if block[(C.morphisms[f][1], x)] == block[(C.morphisms[f][1], y)]
        ):
            count += 1
    return count


# structures -------------------------------------------------------------------


def _is_bijective_iso(M: Structure, N: Structure, h: Mapping[str, str]) -> bool:
    for name, tuples in M.relations.items():
        if {tuple(h[x] for x in t) for t in tuples} != set(N.relations[name]):
            return False
    return all(h[M.constants[c]] == N.constants[c] for c in M.signature.constants)


def isomorphisms(M: Structure, N: Structure) -> list[dict[str, str]]:
    """Every bijection that maps the relations of ``M`` exactly onto those of ``N``."""
    if M.signature != N.signature or len(M.universe) != len(N.universe):
        return []
    return [
        dict(zip(M.universe, perm))
        for perm in itertools.permutations(N.universe)
        if _is_bijective_iso(M, N, dict(zip(M.universe, perm)))
    ]


def isomorphic(M: Structure, N: Structure) -> bool:
    if M.signature != N.signature or len(M.universe) != len(N.universe):
        return False
    return any(
        _is_bijective_iso(M, N, dict(zip(M.universe, perm))) for perm in itertools.permutations(N.universe)
    )


def injective_hom_exists(M: Structure, a, N: Structure, b) -> bool:
    """An injective homomorphism ``M -> N`` sending ``a`` to ``b`` pointwise.

    For finite ``M`` this holds exactly when every positive existential
    formula (negated equality allowed) true of ``a`` in ``M`` is true of
    ``b`` in ``N``: the diagram of ``M`` is one such formula.
    """
    for perm in itertools.permutations(N.universe, len(M.universe)):
        h = dict(zip(M.universe, perm))
        if any(h[x] != y for x, y in zip(a, b)):
            continue
        if any(h[M.constants[c]] != N.constants[c] for c in M.signature.constants):
            continue
        if all(tuple(h[x] for x in t) in N.relations[name] for name, ts in M.relations.items() for t in ts):
            return True
    return False


def positive_existential_equivalent(M: Structure, a, N: Structure, b) -> bool:
    """Same positive existential (with negated equality) formulas, via injective homs both ways."""
    return injective_hom_exists(M, a, N, b) and injective_hom_exists(N, b, M, a)


# groups -----------------------------------------------------------------------


def _compose(G: PermGroup, p, q):
    pos = {x: k for k, x in enumerate(G.degree)}
    return tuple(p[pos[y]] for y in q)


def subgroups(G: PermGroup) -> list[frozenset]:
    """Subsets containing the identity and closed under products, as sets of permutations."""
    ident = tuple(G.degree)
    others = [p for p in G.elements if p != ident]
    out = []
    for subset in _powerset(others):
        H = frozenset(subset) | {ident}
        if all(_compose(G, p, q) in H for p in H for q in H):
            out.append(H)
    return out


def subgroup_class_count(G: PermGroup) -> int:
    """Number of conjugacy classes of subgroups."""
    def inv(p):
        back = {y: x for x, y in zip(G.degree, p)}
        return tuple(back[x] for x in G.degree)

    subs = subgroups(G)
    classes: list[set] = []
    for H in subs:
        if any(H in cls for cls in classes):
            continue
        classes.append({frozenset(_compose(G, _compose(G, g, h), inv(g)) for h in H) for g in G.elements})
    return len(classes)
