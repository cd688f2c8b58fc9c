"""Property checks over a corpus directory.

A corpus directory has the layout written by :func:`toposcalc.corpus.write_corpus`.
Each property yields one :class:`Check` per instance it examines; a failing
check names the file(s) that produced the counterexample.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from . import oracles
from .corpus import standard_presheaves
from .errors import CorpusMissing, MalformedInput, ToposcalcError
from .fincat import (
    Category,
    connected_components,
    full_subcategory,
    is_right_ore,
    rename,
    validate_category,
)
from .gsets import (
    automorphisms,
    gset_as_presheaf,
    group_from_json,
    orbits_on_tuples,
    stabilizer,
    subgroup_conjugacy_classes,
    transitive_gsets,
)
from .modelkit import (
    back_and_forth,
    cardinality_sequents,
    is_homogeneous,
    iter_isomorphisms,
    partial_isos,
    same_type,
    satisfies_sequent,
    structure_from_json,
)
from .sheafkit import (
    Site,
    closure,
    constant_presheaf,
    has_generating_element,
    hom_set,
    is_atom,
    is_indecomposable,
    is_epi,
    is_iso,
    is_sheaf,
    is_zero,
    presheaf_from_json,
    quotients,
    sheafify,
    subsheaves,
    terminal_decomposition,
    yoneda,
)
from .sitecore import (
    atomic_topology,
    enumerate_ideals,
    enumerate_sieves,
    induced_topology,
    induced_topology_by_restriction,
    is_topology,
    nonempty_sieves,
    reduce_to_dense,
    Sieve,
    Topology,
    saturate,
    sieve_is_connected,
)

SMALL = 6  # morphism / element bound for exhaustive oracles


@dataclass(frozen=True)
class Check:
    prop: str
    ok: bool
    ref: str
    detail: str = ""


@dataclass
class Corpus:
    root: Path
    categories: dict[str, tuple[str, Category]] = field(default_factory=dict)
    presheaves: list = field(default_factory=list)  # (ref, category name, Presheaf)
    structures: dict = field(default_factory=dict)  # name -> (ref, Structure)
    groups: dict = field(default_factory=dict)
    broken: list = field(default_factory=list)  # (ref, kind, message)

    def is_empty(self) -> bool:
        return not (self.categories or self.presheaves or self.structures or self.groups or self.broken)


def _files(root: Path, sub: str) -> list[Path]:
    d = root / sub
    return sorted(d.glob("*.json")) if d.is_dir() else []


def load_corpus(root) -> Corpus:
    root = Path(root)
    if not root.is_dir():
        raise CorpusMissing(f"corpus directory {root} does not exist")
    corpus = Corpus(root)

    def read(path, kind, loader):
        ref = str(path.relative_to(root))
        try:
            return ref, loader(json.loads(path.read_text(encoding="utf-8")))
        except (ToposcalcError, json.JSONDecodeError, KeyError, TypeError) as exc:
            corpus.broken.append((ref, kind, str(exc)))
            return ref, None

    for path in _files(root, "categories"):
        ref, C = read(path, "category", validate_category)
        if C is not None:
            corpus.categories[path.stem] = (ref, C)
    for path in _files(root, "presheaves"):
        cname = path.stem.split("__", 1)[0]
        if cname not in corpus.categories:
            corpus.broken.append((str(path.relative_to(root)), "presheaf", f"unknown category {cname!r}"))
            continue
        C = corpus.categories[cname][1]
        ref, P = read(path, "presheaf", lambda raw: presheaf_from_json(C, raw))
        if P is not None:
            corpus.presheaves.append((ref, cname, P))
    for path in _files(root, "structures"):
        ref, M = read(path, "structure", structure_from_json)
        if M is not None:
            corpus.structures[path.stem] = (ref, M)
    for path in _files(root, "groups"):
        ref, G = read(path, "group", group_from_json)
        if G is not None:
            corpus.groups[path.stem] = (ref, G)
    return corpus


# properties --------------------------------------------------------------------

Property = Callable[[Corpus], Iterator[Check]]
PROPERTIES: dict[str, Property] = {}


def prop(name: str):
    def register(fn):
        PROPERTIES[name] = fn
        return fn

    return register


def _check(name, ok, ref, detail=""):
    return Check(name, bool(ok), ref, "" if ok else detail)


def _small(C: Category) -> bool:
    return len(C.morphisms) <= SMALL


def presheaves_for(corpus: Corpus, cname: str):
    ref, C = corpus.categories[cname]
    for pname, P in standard_presheaves(C).items():
        yield f"{ref}#{pname}", P
    for pref, name, P in corpus.presheaves:
        if name == cname:
            yield pref, P


@prop("validate")
def p_validate(corpus):
    for ref, kind, msg in corpus.broken:
        yield _check("validate", False, ref, f"{kind}: {msg}")
    for name, (ref, C) in corpus.categories.items():
        again = validate_category(C.to_json())
        yield _check("validate", again == C, ref, "round trip changed the category")


@prop("components-refine")
def p_components_refine(corpus):
    for name, (ref, C) in corpus.categories.items():
        whole = {o: k for k, comp in enumerate(connected_components(C)) for o in comp}
        ok = True
        for r in range(1, len(C.objects) + 1):
            for U in itertools.combinations(sorted(C.objects), r):
                for comp in connected_components(full_subcategory(C, U)):
                    ok &= len({whole[o] for o in comp}) == 1
        yield _check("components-refine", ok, ref, "a subcategory component straddles two components")


@prop("ore-renaming")
def p_ore_renaming(corpus):
    for name, (ref, C) in corpus.categories.items():
        D = rename(C, {o: f"o_{o}" for o in C.objects}, {f: f"m_{f}" for f in C.morphisms})
        yield _check("ore-renaming", is_right_ore(D) == is_right_ore(C), ref, "renaming changed the Ore verdict")


def _generator_families(C: Category):
    """Single sieves, all non-empty sieves, and nothing."""
    yield []
    yield nonempty_sieves(C)
    for c in sorted(C.objects):
        for S in enumerate_sieves(C, c):
            yield [S]


@prop("saturate-topology")
def p_saturate(corpus):
    for name, (ref, C) in corpus.categories.items():
        ok, detail = True, ""
        for gens in _generator_families(C):
            J = saturate(C, gens)
            if not is_topology(C, J):
                ok, detail = False, f"saturate({gens}) is not a topology"
                break
            if saturate(C, J.all_sieves()) != J:
                ok, detail = False, f"saturate not idempotent on {gens}"
                break
        yield _check("saturate-topology", ok, ref, detail)


@prop("saturate-minimal")
def p_saturate_minimal(corpus):
    for name, (ref, C) in corpus.categories.items():
        if not _small(C):
            continue
        ok, detail = True, ""
        for gens in _generator_families(C):
            want = oracles.minimal_topology(C, _as_raw(gens))
            got = saturate(C, gens)
            if {c: {S.arrows for S in got.covers[c]} for c in C.objects} != want:
                ok, detail = False, f"saturate({gens}) differs from the brute-force least topology"
                break
        yield _check("saturate-minimal", ok, ref, detail)


def _as_raw(sieves):
    out: dict = {}
    for S in sieves:
        out.setdefault(S.base, set()).add(S.arrows)
    return out


@prop("saturate-monotone")
def p_saturate_monotone(corpus):
    for name, (ref, C) in corpus.categories.items():
        singles = [g[0] for g in _generator_families(C) if len(g) == 1]
        ok = True
        for a, b in zip(singles, singles[1:]):
            ok &= saturate(C, [a]) <= saturate(C, [a, b])
        yield _check("saturate-monotone", ok, ref, "adding a generator shrank the topology")


@prop("ore-atomic")
def p_ore_atomic(corpus):
    for name, (ref, C) in corpus.categories.items():
        if not is_right_ore(C):
            continue
        J = atomic_topology(C)
        want = {c: {S for S in enumerate_sieves(C, c) if S.arrows} for c in C.objects}
        yield _check("ore-atomic", {c: set(J.covers[c]) for c in C.objects} == want, ref, "covers differ from the non-empty sieves")


@prop("non-ore-connected-trivial")
def p_non_ore(corpus):
    for name, (ref, C) in corpus.categories.items():
        if is_right_ore(C) or len(connected_components(C)) != 1:
            continue
        red = reduce_to_dense(C)
        yield _check("non-ore-connected-trivial", not red.category.objects, ref, "dense subcategory is not empty")


@prop("dense-postconditions")
def p_dense(corpus):
    for name, (ref, C) in corpus.categories.items():
        D, J = reduce_to_dense(C)
        ok = is_right_ore(D) and J == atomic_topology(D)
        keep = set(D.objects)
        ok &= all((C.dom(f) in keep) == (C.cod(f) in keep) for f in C.arrows)
        yield _check("dense-postconditions", ok, ref, "a postcondition of the dense reduction failed")


@prop("ideals-are-component-unions")
def p_ideals(corpus):
    for name, (ref, C) in corpus.categories.items():
        got = {frozenset(U) for U in enumerate_ideals(C)}
        yield _check("ideals-are-component-unions", got == oracles.ideals(C), ref, "ideal enumeration disagrees with brute force")


@prop("induced-topology-agreement")
def p_induced(corpus):
    for name, (ref, C) in corpus.categories.items():
        D, _ = reduce_to_dense(C)
        J = atomic_topology(C)
        a, b = induced_topology(C, J, D), induced_topology_by_restriction(C, J, D)
        yield _check("induced-topology-agreement", a == b, ref, "the two induced-topology definitions differ")


def _atomic_site(C):
    return Site(C, atomic_topology(C))


@prop("sheafify")
def p_sheafify(corpus):
    for name, (ref, C) in corpus.categories.items():
        site = _atomic_site(C)
        for pref, F in presheaves_for(corpus, name):
            aF, unit = sheafify(site, F)
            ok = is_sheaf(site, aF) and is_iso(unit) == is_sheaf(site, F)
            ok &= is_iso(sheafify(site, aF)[1])
            yield _check("sheafify", ok, pref, "sheafification is unsound, its unit misreports, or it is unstable")


@prop("atom-characterizations")
def p_atoms(corpus):
    for name, (ref, C) in corpus.categories.items():
        site = _atomic_site(C)
        reps = [sheafify(site, yoneda(C, c))[0] for c in sorted(C.objects)]
        for pref, F in presheaves_for(corpus, name):
            A = sheafify(site, F)[0]
            nonzero = not is_zero(site, A)
            by_epi = nonzero and any(is_epi(site, alpha) for R in reps for alpha in hom_set(R, A))
            by_gen = nonzero and has_generating_element(site, A)
            atom = is_atom(site, A)
            yield _check("atom-characterizations", atom == by_epi == by_gen, pref, f"atom={atom} epi={by_epi} generator={by_gen}")


@prop("boolean-atomic-lattice")
def p_boolean(corpus):
    for name, (ref, C) in corpus.categories.items():
        site = _atomic_site(C)
        for pref, F in presheaves_for(corpus, name):
            A = sheafify(site, F)[0]
            subs = subsheaves(site, A)
            bottom, top = subs[0], subs[-1]
            atoms = [s for s in subs if s != bottom and not any(t != bottom and t != s and t <= s for t in subs)]
            ok = all(any(u & s == bottom and site_join(site, A, u, s) == top for u in subs) for s in subs)
            ok &= all(s == bottom or any(a <= s for a in atoms) for s in subs)
            yield _check("boolean-atomic-lattice", ok, pref, "subsheaf lattice is not an atomic Boolean algebra")


def site_join(site, F, a, b):
    return closure(site, F, a | b)


def _constant_sheaf_side(site):
    C = site.category
    return all(is_sheaf(site, constant_presheaf(C, [str(i) for i in range(n)])) for n in range(4))


@prop("local-connectedness")
def p_local(corpus):
    for name, (ref, C) in corpus.categories.items():
        site = _atomic_site(C)
        left = _constant_sheaf_side(site)
        right = all(is_indecomposable(site, sheafify(site, yoneda(C, c))[0]) for c in C.objects)
        yield _check("local-connectedness", left == right, ref, f"constants sheaves={left}, representables connected={right}")


@prop("constant-sheaf-criterion")
def p_constant_sheaves(corpus):
    for name, (ref, C) in corpus.categories.items():
        site = _atomic_site(C)
        J = site.topology
        empty_ok = is_sheaf(site, constant_presheaf(C, []))
        no_empty = all(S.arrows for c in C.objects for S in J.covers[c])
        consts = all(is_sheaf(site, constant_presheaf(C, [str(i) for i in range(n)])) for n in (1, 2, 3))
        conn = all(not S.arrows or sieve_is_connected(C, S) for c in C.objects for S in J.covers[c])
        yield _check("constant-sheaf-criterion", empty_ok == no_empty and consts == conn, ref, "constant-sheaf criterion fails")


@prop("completions")
def p_completions(corpus):
    for name, (ref, C) in corpus.categories.items():
        D, _ = reduce_to_dense(C)
        n = len(terminal_decomposition(_atomic_site(C)))
        yield _check("completions", n == len(connected_components(D)), ref, f"{n} completions for {len(connected_components(D))} components")


@prop("atom-transport")
def p_transport(corpus):
    for name, (ref, C) in corpus.categories.items():
        if not _small(C):
            continue
        ok, detail = True, ""
        tops = [_topology_of(C, raw) for raw in oracles.all_topologies(C)]
        for J, K in itertools.permutations(tops, 2):
            if not J <= K:
                continue
            for A in atoms_by_quotients(Site(C, J)):
                B = sheafify(Site(C, K), A)[0]
                if not (is_zero(Site(C, K), B) or is_atom(Site(C, K), B)):
                    ok, detail = False, "a transported atom is neither zero nor an atom"
        yield _check("atom-transport", ok, ref, detail)


def _topology_of(C, raw):
    return Topology({c: frozenset(Sieve(c, S) for S in raw[c]) for c in C.objects})


def atoms_by_quotients(site):
    """Atoms of the sheaf topos, found as sheafified quotients of representables."""
    C = site.category
    for c in sorted(C.objects):
        for Q, _ in quotients(yoneda(C, c)):
            A = sheafify(site, Q)[0]
            if is_atom(site, A):
                yield A


def _pairs(corpus):
    items = sorted((n, M) for n, (ref, M) in corpus.structures.items() if len(M) <= SMALL)
    return [(a, b) for a in items for b in items if a[1].signature == b[1].signature]


@prop("back-and-forth")
def p_bnf(corpus):
    for (m, M), (n, N) in _pairs(corpus):
        got = back_and_forth(M, N) is not None
        ref = f"{corpus.structures[m][0]} vs {corpus.structures[n][0]}"
        yield _check("back-and-forth", got == oracles.isomorphic(M, N), ref, "disagrees with brute-force bijection search")


@prop("self-iso")
def p_self(corpus):
    for n, (ref, M) in corpus.structures.items():
        yield _check("self-iso", back_and_forth(M, M) is not None, ref, "no automorphism found")


def _tuples(M, k):
    return list(itertools.product(M.universe, repeat=k))


@prop("same-type-equivalence")
def p_same_type(corpus):
    for n, (ref, M) in corpus.structures.items():
        if len(M) > 5:
            continue
        ok = True
        for k in (1, 2):
            ts = _tuples(M, k)
            rel = {(a, b): same_type(M, a, M, b) for a in ts for b in ts}
            ok &= all(rel[(a, a)] for a in ts)
            ok &= all(rel[(a, b)] == rel[(b, a)] for a in ts for b in ts)
            ok &= all(not (rel[(a, b)] and rel[(b, c)]) or rel[(a, c)] for a in ts for b in ts for c in ts)
            ok &= all(rel[(a, b)] == oracles.positive_existential_equivalent(M, a, M, b) for a in ts for b in ts)
        yield _check("same-type-equivalence", ok, ref, "same_type is not an equivalence or disagrees with the oracle")


@prop("cardinality-sequents")
def p_card(corpus):
    for n, (ref, M) in corpus.structures.items():
        ok = all(
            all(satisfies_sequent(M, s) for s in cardinality_sequents(k)) == (len(M) == k) for k in range(1, 6)
        )
        yield _check("cardinality-sequents", ok, ref, "cardinality sequents misjudge the size")


@prop("homogeneous-extension")
def p_homog(corpus):
    homogeneous = {n for n, (ref, M) in corpus.structures.items() if len(M) <= SMALL and is_homogeneous(M)}
    for (m, M), (n, N) in _pairs(corpus):
        if not {m, n} <= homogeneous or back_and_forth(M, N) is None:
            continue
        # p extends exactly when it is the restriction of an isomorphism
        restrictions = {
            frozenset((a, iso[a]) for a in dom)
            for iso in iter_isomorphisms(M, N)
            for k in range(len(M) + 1)
            for dom in itertools.combinations(M.universe, k)
        }
        ok = all(frozenset(p.items()) in restrictions for p in partial_isos(M, N))
        yield _check("homogeneous-extension", ok, f"{corpus.structures[m][0]} vs {corpus.structures[n][0]}", "a partial isomorphism does not extend")


@prop("orbits-vs-types")
def p_orbits(corpus):
    for n, (ref, M) in corpus.structures.items():
        if len(M) > 5 or not is_homogeneous(M):
            continue
        G = automorphisms(M)
        ok = True
        for k in (1, 2):
            orbit_of = {t: i for i, orb in enumerate(orbits_on_tuples(G, k)) for t in orb}
            ts = _tuples(M, k)
            ok &= all((orbit_of[a] == orbit_of[b]) == same_type(M, a, M, b) for a in ts for b in ts)
        yield _check("orbits-vs-types", ok, ref, "orbit membership and same_type disagree")


@prop("gset-atoms")
def p_gset_atoms(corpus):
    for n, (ref, G) in corpus.groups.items():
        count = 0
        ok = True
        for X in transitive_gsets(G):
            C, P = gset_as_presheaf(X)
            site = _atomic_site(C)
            ok &= is_sheaf(site, P)
            count += is_atom(site, P)
        ok &= count == len(subgroup_conjugacy_classes(G)) == oracles.subgroup_class_count(G)
        yield _check("gset-atoms", ok, ref, f"{count} atoms against {oracles.subgroup_class_count(G)} subgroup classes")


@prop("stabilizer-filtration")
def p_stab(corpus):
    for n, (ref, G) in corpus.groups.items():
        ok = True
        for k in (1, 2):
            for t in itertools.product(G.degree, repeat=k):
                big = set(stabilizer(G, t[:-1]).elements)
                ok &= set(stabilizer(G, t).elements) <= big
        yield _check("stabilizer-filtration", ok, ref, "extending a tuple enlarged its stabilizer")


# running -----------------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    checks: tuple[Check, ...]

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def summary(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for c in self.checks:
            row = out.setdefault(c.prop, {"passed": 0, "failed": 0, "counterexamples": []})
            if c.ok:
                row["passed"] += 1
            else:
                row["failed"] += 1
                row["counterexamples"].append({"file": c.ref, "detail": c.detail})
        return out

    def to_json(self) -> dict:
        return {"checks": len(self.checks), "failed": len(self.failed), "properties": self.summary()}

    def render(self) -> str:
        lines = []
        for name, row in self.summary().items():
            verdict = "PASS" if not row["failed"] else "FAIL"
            lines.append(f"{verdict} {name} ({row['passed']} passed, {row['failed']} failed)")
            for cx in row["counterexamples"]:
                lines.append(f"    {cx['file']}: {cx['detail']}")
        lines.append(f"{len(self.checks)} checks, {len(self.failed)} failed")
        return "\n".join(lines)


def run_suite(root, only: list[str] | None = None) -> Report:
    unknown = sorted(set(only or ()) - set(PROPERTIES))
    if unknown:
        raise MalformedInput(f"unknown properties {unknown}; known: {', '.join(PROPERTIES)}")
    corpus = load_corpus(root)
    if corpus.is_empty():
        warnings.warn(f"corpus at {root} is empty; nothing to check", stacklevel=2)
        return Report(())
    checks = []
    for name, fn in PROPERTIES.items():
        if only and name not in only:
            continue
        checks.extend(fn(corpus))
    return Report(tuple(checks))
