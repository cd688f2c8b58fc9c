"""Acceptance gate: one test group per criterion, summarised as one line each.

Each test carries ``@pytest.mark.criterion(n, title)``; ``conftest.py``
prints ``criterion n: PASS/FAIL`` lines at the end of the run.  Reference
values come from the brute-force routines in ``toposcalc.oracles``.
"""

import itertools
import os
import subprocess
import sys
import time

import pytest

from clicases import command_matrix
from toposcalc import corpus, oracles
from toposcalc.gsets import gset_as_presheaf, transitive_gsets
from toposcalc.modelkit import (
    Signature,
    back_and_forth,
    cardinality_sequents,
    homogeneity_witness,
    is_homogeneous,
    is_partial_iso,
    make_structure,
    same_type,
    satisfies_sequent,
)
from toposcalc.sheafkit import (
    Site,
    constant_presheaf,
    has_generating_element,
    hom_set,
    is_atom,
    is_epi,
    is_indecomposable,
    is_iso,
    is_sheaf,
    is_zero,
    isomorphism,
    quotients,
    sheafify,
    terminal_decomposition,
    yoneda,
)
from toposcalc.sitecore import (
    Sieve,
    Topology,
    atomic_topology,
    enumerate_sieves,
    is_topology,
    reduce_to_dense,
    saturate,
    trivial_topology,
)

CATS = corpus.categories()
NAMES = sorted(CATS)
SMALL = sorted(n for n in NAMES if len(CATS[n].morphisms) <= 6)
STRUCTS = corpus.structures()
GROUPS = corpus.groups()


def topology_of(C, raw):
    return Topology({c: frozenset(Sieve(c, S) for S in raw[c]) for c in C.objects})


def oracle_covers(J):
    return {c: {S.arrows for S in J.covers[c]} for c in J.covers}


def presheaves(name):
    C = CATS[name]
    out = list(corpus.standard_presheaves(C).values())
    out += [P for (cname, _), P in corpus.extra_presheaves(CATS).items() if cname == name]
    return out


def candidate_sheaves(site):
    """Sheafified quotients of representables and corpus presheaves, up to isomorphism."""
    C = site.category
    found = []
    raw = [Q for c in sorted(C.objects) for Q, _ in quotients(yoneda(C, c))]
    raw += [P for n, D in CATS.items() if D == C for P in presheaves(n)]
    for P in raw:
        A = sheafify(site, P)[0]
        if not any(isomorphism(A, B) is not None for B in found):
            found.append(A)
    return found


# 1 -------------------------------------------------------------------------------


@pytest.mark.criterion(1, "saturate gives topologies; minimal on small categories (<10 s each)")
@pytest.mark.parametrize("name", NAMES)
def test_saturate(name):
    C = CATS[name]
    sieves = [S for c in C.objects for S in enumerate_sieves(C, c)]
    families = [[]] + [[S] for S in sieves] + [sieves[i : i + 2] for i in range(0, len(sieves) - 1)]
    start = time.perf_counter()
    for gens in families:
        J = saturate(C, gens)
        assert is_topology(C, J)
        assert oracles.topology_axioms_hold(C, oracle_covers(J))
        if name in SMALL:
            want = {}
            for S in gens:
                want.setdefault(S.base, set()).add(S.arrows)
            assert oracle_covers(J) == oracles.minimal_topology(C, want)
    assert time.perf_counter() - start < 10


# 2 -------------------------------------------------------------------------------


@pytest.mark.criterion(2, "Ore categories: atomic covers are the non-empty sieves; V is degenerate with empty C'")
@pytest.mark.parametrize("name", NAMES)
def test_ore_atomic(name):
    C = CATS[name]
    if not oracles.is_right_ore(C):
        return
    J = atomic_topology(C)
    for c in C.objects:
        assert {S.arrows for S in J.covers[c]} == {S for S in oracles.sieves_on(C, c) if S}


@pytest.mark.criterion(2, "Ore categories: atomic covers are the non-empty sieves; V is degenerate with empty C'")
def test_v_degenerate():
    V = CATS["V"]
    assert not oracles.is_right_ore(V)
    J = atomic_topology(V)
    assert all({S.arrows for S in J.covers[c]} == set(oracles.sieves_on(V, c)) for c in V.objects)
    assert reduce_to_dense(V).category.objects == ()


# 3 -------------------------------------------------------------------------------


@pytest.mark.criterion(3, "reduce_to_dense postconditions on every corpus category")
@pytest.mark.parametrize("name", NAMES)
def test_dense(name):
    C = CATS[name]
    D, J = reduce_to_dense(C)
    assert oracles.is_right_ore(D)
    for c in D.objects:
        assert {S.arrows for S in J.covers[c]} == {S for S in oracles.sieves_on(D, c) if S}
    keep = frozenset(D.objects)
    assert all(comp <= keep or not (comp & keep) for comp in oracles.components(C))
    dropped = {c for c in C.objects if frozenset() in {S.arrows for S in atomic_topology(C).covers[c]}}
    assert keep == frozenset(C.objects) - dropped


# 4 -------------------------------------------------------------------------------


@pytest.mark.criterion(4, "sheafification: aF is a sheaf, unit iso iff F a sheaf, stable")
@pytest.mark.parametrize("name", NAMES)
def test_sheafify(name):
    C = CATS[name]
    site = Site(C, atomic_topology(C))
    covers = oracle_covers(site.topology)
    for F in presheaves(name):
        aF, unit = sheafify(site, F)
        assert oracles.is_sheaf(C, covers, aF)
        assert is_iso(unit) == oracles.is_sheaf(C, covers, F)
        aaF, unit2 = sheafify(site, aF)
        assert is_iso(unit2) and isomorphism(aaF, aF) is not None


# 5 -------------------------------------------------------------------------------


@pytest.mark.criterion(5, "atoms agree across subsheaves, epis from a(y(c)), generating elements")
@pytest.mark.parametrize("name", NAMES)
def test_atom_characterizations(name):
    C = CATS[name]
    site = Site(C, atomic_topology(C))
    reps = [sheafify(site, yoneda(C, c))[0] for c in sorted(C.objects)]
    for A in candidate_sheaves(site):
        nonzero = not is_zero(site, A)
        by_subsheaves = is_atom(site, A)
        by_epi = nonzero and any(is_epi(site, alpha) for R in reps for alpha in hom_set(R, A))
        by_generator = nonzero and has_generating_element(site, A)
        assert by_subsheaves == by_epi == by_generator


# 6 -------------------------------------------------------------------------------


def sites_of(name):
    C = CATS[name]
    tops = [atomic_topology(C), trivial_topology(C)]
    if name in SMALL:
        tops += [topology_of(C, raw) for raw in oracles.all_topologies(C)]
    return [Site(C, J) for J in tops]


@pytest.mark.criterion(6, "all constant presheaves (|L|<=3) are sheaves iff every a(y(c)) is connected")
@pytest.mark.parametrize("name", NAMES)
def test_local_connectedness(name):
    C = CATS[name]
    for site in sites_of(name):
        covers = oracle_covers(site.topology)
        constants = all(oracles.is_sheaf(C, covers, constant_presheaf(C, [str(i) for i in range(n)])) for n in range(4))
        connected = all(is_indecomposable(site, sheafify(site, yoneda(C, c))[0]) for c in C.objects)
        assert constants == connected


# 7 -------------------------------------------------------------------------------


@pytest.mark.criterion(7, "atoms stay atoms or vanish under a finer topology")
@pytest.mark.parametrize("name", SMALL)
def test_atom_transport(name):
    C = CATS[name]
    tops = [topology_of(C, raw) for raw in oracles.all_topologies(C)]
    for J, K in itertools.product(tops, repeat=2):
        if not J <= K:
            continue
        coarse, fine = Site(C, J), Site(C, K)
        for A in candidate_sheaves(coarse):
            if not is_atom(coarse, A):
                continue
            B = sheafify(fine, A)[0]
            assert is_zero(fine, B) or is_atom(fine, B)


# 8 -------------------------------------------------------------------------------


@pytest.mark.criterion(8, "terminal decomposition size equals the number of components of C'")
@pytest.mark.parametrize("name", NAMES)
def test_completions(name):
    C = CATS[name]
    D, _ = reduce_to_dense(C)
    n = len(terminal_decomposition(Site(C, atomic_topology(C))))
    assert n == len(oracles.components(D))
    if name == "discrete2":
        assert n == 2
    if oracles.is_right_ore(C) and len(oracles.components(C)) == 1:
        assert n == 1


# 9 -------------------------------------------------------------------------------


def structure_pairs():
    items = sorted((n, M) for n, M in STRUCTS.items() if len(M) <= 6)
    return [(M, N) for (_, M), (_, N) in itertools.product(items, repeat=2) if M.signature == N.signature]


@pytest.mark.criterion(9, "back-and-forth matches bijection search on >=50 pairs; C3 vs P3 rejected (<5 s)")
def test_back_and_forth():
    pairs = structure_pairs()
    assert len(pairs) >= 50
    start = time.perf_counter()
    found = [back_and_forth(M, N) for M, N in pairs]
    elapsed = time.perf_counter() - start
    for (M, N), iso in zip(pairs, found):
        assert (iso is not None) == oracles.isomorphic(M, N)
        if iso is not None:
            assert iso in oracles.isomorphisms(M, N)
    assert back_and_forth(STRUCTS["C3"], STRUCTS["P3"]) is None
    assert elapsed < 5


# 10 ------------------------------------------------------------------------------


@pytest.mark.criterion(10, "cardinality sequents hold exactly at |M| = n for n <= 5")
@pytest.mark.parametrize("name", sorted(STRUCTS))
def test_cardinality(name):
    M = STRUCTS[name]
    for n in range(1, 6):
        assert all(satisfies_sequent(M, s) for s in cardinality_sequents(n)) == (len(M) == n)


@pytest.mark.criterion(10, "cardinality sequents hold exactly at |M| = n for n <= 5")
def test_cardinality_pure_sets():
    for m in range(1, 8):
        M = make_structure(Signature(), [str(i) for i in range(m)])
        for n in range(1, 6):
            assert all(satisfies_sequent(M, s) for s in cardinality_sequents(n)) == (m == n)


# 11 ------------------------------------------------------------------------------


@pytest.mark.criterion(11, "same_type matches automorphism orbits; linear orders give a failing partial iso")
@pytest.mark.parametrize("name", sorted(STRUCTS))
def test_orbits_and_types(name):
    M = STRUCTS[name]
    if len(M) > 6 or not is_homogeneous(M):
        return
    autos = oracles.isomorphisms(M, M)
    for k in (1, 2):
        tuples = list(itertools.product(M.universe, repeat=k))
        for a in tuples:
            orbit = {tuple(g[x] for x in a) for g in autos}
            for b in tuples:
                assert same_type(M, a, M, b) == (b in orbit)


@pytest.mark.criterion(11, "same_type matches automorphism orbits; linear orders give a failing partial iso")
@pytest.mark.parametrize("name", ["L2", "L3", "L4"])
def test_linear_order_witness(name):
    M = STRUCTS[name]
    p = homogeneity_witness(M)
    assert p is not None and is_partial_iso(M, M, p)
    assert not any(all(g[a] == b for a, b in p.items()) for g in oracles.isomorphisms(M, M))


# 12 ------------------------------------------------------------------------------

GSET_COUNTS = {"trivial": 1, "Z2": 2, "Z3": 2, "Z2xZ2": 5, "S3": 4}


@pytest.mark.criterion(12, "G-set atom counts 1, 2, 2, 5, 4 match the subgroup oracle")
def test_gset_counts_oracle():
    assert [oracles.subgroup_class_count(GROUPS[g]) for g in GSET_COUNTS] == list(GSET_COUNTS.values())


@pytest.mark.criterion(12, "G-set atom counts 1, 2, 2, 5, 4 match the subgroup oracle")
@pytest.mark.parametrize("group", list(GSET_COUNTS))
def test_gset_atoms(group):
    atoms = 0
    for X in transitive_gsets(GROUPS[group]):
        C, P = gset_as_presheaf(X)
        site = Site(C, atomic_topology(C))
        assert is_sheaf(site, P)
        atoms += is_atom(site, P)
    assert atoms == GSET_COUNTS[group]


# 13 ------------------------------------------------------------------------------


def _run_all(workspace, seed):
    env = {**os.environ, "PYTHONHASHSEED": seed}
    outs = []
    for argv in command_matrix(workspace) + [["suite", str(workspace / "corpus")]]:
        proc = subprocess.run(
            [sys.executable, "-m", "toposcalc", "--json", *argv], capture_output=True, env=env, check=False
        )
        outs.append((argv, proc.returncode, proc.stdout))
    return outs


@pytest.mark.criterion(13, "repeated runs give byte-identical JSON")
def test_determinism(workspace):
    first = _run_all(workspace, "0")
    second = _run_all(workspace, "4242")
    for (argv, code_a, out_a), (_, code_b, out_b) in zip(first, second):
        assert code_a == code_b == 0, argv
        assert out_a == out_b, argv
