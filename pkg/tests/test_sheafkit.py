import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import CATEGORIES, SMALL_NAMES, presheaves_on
from toposcalc import oracles
from toposcalc.corpus import arrow, standard_presheaves
from toposcalc.errors import (
    FunctorialityViolation,
    NaturalityViolation,
    NotAnAtom,
    NotAtomicSite,
    SiteNotLocallyConnected,
    UnknownElement,
    UnknownObject,
)
from toposcalc.fincat import connected_components, terminal_category
from toposcalc.sheafkit import (
    NatTrans,
    Site,
    closure,
    connected_components_sheaf,
    constant_presheaf,
    coproduct,
    empty_sub,
    generated_subsheaf,
    has_generating_element,
    hom_set,
    identity_nat,
    image,
    is_atom,
    is_connected_object,
    is_epi,
    is_indecomposable,
    is_iso,
    is_sheaf,
    is_zero,
    make_nat_trans,
    make_presheaf,
    make_subpresheaf,
    quotients,
    restricted_canonical_topology,
    sheaf_failure,
    sheafify,
    site_from_json,
    subpresheaves,
    subsheaves,
    terminal_decomposition,
    whole,
    yoneda,
)
from toposcalc.sitecore import (
    Sieve,
    Topology,
    atomic_topology,
    degenerate_topology,
    enumerate_sieves,
    reduce_to_dense,
    sieve_is_connected,
    trivial_topology,
)

Z2 = CATEGORIES["Z2"]
Z2_SITE = Site(Z2, atomic_topology(Z2))
REGULAR = yoneda(Z2, "*")
TRIVIAL2 = constant_presheaf(Z2, ["0", "1"])


def atomic_site(name):
    C = CATEGORIES[name]
    return Site(C, atomic_topology(C))


def topologies(C):
    return [Topology({c: frozenset(Sieve(c, S) for S in raw[c]) for c in C.objects}) for raw in oracles.all_topologies(C)]


def small_site_and_presheaf():
    @st.composite
    def build(draw):
        C = CATEGORIES[draw(st.sampled_from(SMALL_NAMES))]
        J = draw(st.sampled_from(topologies(C)))
        return Site(C, J), draw(presheaves_on(C))

    return build()


def z2_sets(max_size=3):
    """Every Z2-set of size at most ``max_size``, as sums of regular and trivial orbits."""
    out = []
    for regular in range(max_size // 2 + 1):
        for fixed in range(max_size - 2 * regular + 1):
            parts = [REGULAR] * regular + [constant_presheaf(Z2, ["p"])] * fixed
            if parts:
                out.append(parts[0] if len(parts) == 1 else coproduct(*parts))
    return out


class TestPresheaves:
    def test_yoneda_terminal(self):
        assert yoneda(terminal_category(), "*").size() == 1

    def test_yoneda_arrow(self):
        y1 = yoneda(arrow(), "1")
        assert y1.sets == {"0": ("u",), "1": ("1_1",)}

    def test_yoneda_z2_regular(self):
        assert REGULAR.sets["*"] == ("e", "g") and REGULAR.act("g", "e") == "g"

    def test_yoneda_unknown(self):
        with pytest.raises(UnknownObject):
            yoneda(arrow(), "2")

    def test_constant(self):
        C = arrow()
        assert constant_presheaf(C, []).size() == 0
        assert constant_presheaf(C, ["*"]).size() == 2
        D = constant_presheaf(C, ["0", "1"])
        assert D.act("u", "1") == "1"

    def test_functoriality_checked(self):
        C = CATEGORIES["Z2"]
        with pytest.raises(FunctorialityViolation):
            make_presheaf(C, {"*": ["a", "b"]}, {"g": {"a": "a", "b": "a"}})

    @pytest.mark.parametrize("name", SMALL_NAMES)
    def test_hom_sets_match_product_oracle(self, name):
        C = CATEGORIES[name]
        ps = list(standard_presheaves(C).values())[:4]
        for P, Q in itertools.product(ps, repeat=2):
            if P.size() + Q.size() > 10:
                continue
            got = sorted(sorted((c, sorted(m.items())) for c, m in a.components.items()) for a in hom_set(P, Q))
            want = sorted(sorted((c, sorted(m.items())) for c, m in a.items()) for a in oracles.natural_transformations(P, Q))
            assert got == want

    def test_naturality_checked(self):
        with pytest.raises(NaturalityViolation):
            make_nat_trans(REGULAR, REGULAR, {"*": {"e": "e", "g": "e"}})


class TestIsSheaf:
    @given(small_site_and_presheaf())
    @settings(max_examples=60, deadline=None)
    def test_matches_amalgamation_oracle(self, pair):
        site, F = pair
        assert is_sheaf(site, F) == oracles.is_sheaf(site.category, {c: {S.arrows for S in site.topology.covers[c]} for c in site.category.objects}, F)

    @given(st.sampled_from(SMALL_NAMES), st.data())
    @settings(max_examples=30, deadline=None)
    def test_trivial_topology_everything(self, name, data):
        C = CATEGORIES[name]
        assert is_sheaf(Site(C, trivial_topology(C)), data.draw(presheaves_on(C)))

    def test_z2_sets(self):
        assert all(is_sheaf(Z2_SITE, X) for X in z2_sets())

    def test_constant_on_arrow(self):
        C = arrow()
        D = constant_presheaf(C, ["0", "1"])
        assert is_sheaf(Site(C, atomic_topology(C)), D)
        fail = sheaf_failure(Site(C, degenerate_topology(C)), D)
        assert fail is not None and not fail.sieve.arrows and len(fail.amalgamations) == 2


class TestSheafify:
    def test_sheaf_unchanged(self):
        aF, unit = sheafify(Z2_SITE, REGULAR)
        assert is_iso(unit)

    def test_arrow_collapse(self):
        C = arrow()
        F = make_presheaf(C, {"1": ["p", "q"], "0": ["r"]}, {"u": {"p": "r", "q": "r"}})
        aF, unit = sheafify(Site(C, atomic_topology(C)), F)
        assert len(aF.sets["0"]) == len(aF.sets["1"]) == 1
        assert unit.components["1"]["p"] == unit.components["1"]["q"]

    @pytest.mark.parametrize("name", sorted(CATEGORIES))
    def test_degenerate_gives_singletons(self, name):
        C = CATEGORIES[name]
        site = Site(C, degenerate_topology(C))
        for F in standard_presheaves(C).values():
            aF, _ = sheafify(site, F)
            assert all(len(aF.sets[c]) == 1 for c in C.objects)

    @given(small_site_and_presheaf())
    @settings(max_examples=60, deadline=None)
    def test_laws(self, pair):
        site, F = pair
        aF, unit = sheafify(site, F)
        assert is_sheaf(site, aF)
        assert is_iso(unit) == is_sheaf(site, F)
        assert is_iso(sheafify(site, aF)[1])
        # the unit is natural: make_nat_trans re-checks every square
        make_nat_trans(F, aF, unit.components)

    @given(small_site_and_presheaf(), st.data())
    @settings(max_examples=30, deadline=None)
    def test_universal_property_count(self, pair, data):
        # maps F -> G into a sheaf G correspond to maps aF -> G
        site, F = pair
        G = sheafify(site, data.draw(presheaves_on(site.category)))[0]
        aF = sheafify(site, F)[0]
        if F.size() + G.size() > 12:
            return
        assert len(hom_set(F, G)) == len(hom_set(aF, G))


class TestSubobjects:
    def test_closure_whole(self):
        assert closure(Z2_SITE, REGULAR, whole(REGULAR)) == whole(REGULAR)

    def test_closure_empty_without_empty_covers(self):
        assert closure(Z2_SITE, REGULAR, empty_sub(REGULAR)) == empty_sub(REGULAR)

    def test_closure_in_arrow(self):
        C = arrow()
        site = Site(C, atomic_topology(C))
        y1 = yoneda(C, "1")
        S = make_subpresheaf(y1, {"0": ["u"]})
        assert closure(site, y1, S).is_whole()

    @given(small_site_and_presheaf(), st.data())
    @settings(max_examples=40, deadline=None)
    def test_closure_operator(self, pair, data):
        site, F = pair
        F = sheafify(site, F)[0]
        subs = subpresheaves(F)
        A = data.draw(st.sampled_from(subs))
        B = data.draw(st.sampled_from(subs))
        cA = closure(site, F, A)
        assert A <= cA and closure(site, F, cA) == cA
        if A <= B:
            assert cA <= closure(site, F, B)

    def test_subsheaf_counts(self):
        T = terminal_category()
        assert len(subsheaves(Site(T, atomic_topology(T)), yoneda(T, "*"))) == 2
        assert len(subsheaves(Z2_SITE, REGULAR)) == 2
        assert len(subsheaves(Z2_SITE, TRIVIAL2)) == 4

    def test_atoms(self):
        assert is_atom(Z2_SITE, REGULAR)
        assert not is_atom(Z2_SITE, TRIVIAL2)
        assert not is_atom(Z2_SITE, constant_presheaf(Z2, []))

    def test_epi_examples(self):
        assert is_epi(Z2_SITE, identity_nat(REGULAR))
        empty = constant_presheaf(Z2, [])
        assert not is_epi(Z2_SITE, NatTrans(empty, REGULAR, {"*": {}}))
        C = arrow()
        site = Site(C, atomic_topology(C))
        (alpha,) = hom_set(yoneda(C, "0"), yoneda(C, "1"))
        assert image(alpha).subsets["1"] == frozenset()
        assert is_epi(site, alpha)

    def test_generated(self):
        assert generated_subsheaf(Z2_SITE, REGULAR, "*", "e").is_whole()
        sub = generated_subsheaf(Z2_SITE, TRIVIAL2, "*", "0")
        assert sub.subsets["*"] == {"0"}
        with pytest.raises(UnknownElement):
            generated_subsheaf(Z2_SITE, REGULAR, "*", "zz")


class TestConnectivity:
    def test_components(self):
        assert len(connected_components_sheaf(Z2_SITE, REGULAR)) == 1
        assert len(connected_components_sheaf(Z2_SITE, TRIVIAL2)) == 2
        assert connected_components_sheaf(Z2_SITE, constant_presheaf(Z2, [])) == []

    def test_connected_object(self):
        assert is_connected_object(Z2_SITE, REGULAR)
        assert not is_connected_object(Z2_SITE, coproduct(REGULAR, REGULAR))

    def test_refuses_on_disconnected_covers(self):
        site = atomic_site("V")
        with pytest.raises(SiteNotLocallyConnected):
            connected_components_sheaf(site, sheafify(site, constant_presheaf(site.category, ["*"]))[0])

    @pytest.mark.parametrize("name", sorted(CATEGORIES))
    def test_representables_connected_on_ore_sites(self, name):
        C, J = reduce_to_dense(CATEGORIES[name])
        site = Site(C, J)
        for c in C.objects:
            A = sheafify(site, yoneda(C, c))[0]
            assert is_connected_object(site, A) and is_indecomposable(site, A)

    @pytest.mark.parametrize("name", sorted(CATEGORIES))
    def test_zigzag_and_lattice_routes_agree(self, name):
        C, J = reduce_to_dense(CATEGORIES[name])
        site = Site(C, J)
        for F in standard_presheaves(C).values():
            A = sheafify(site, F)[0]
            assert is_connected_object(site, A) == is_indecomposable(site, A)

    @pytest.mark.parametrize("name", sorted(CATEGORIES))
    def test_constant_sheaf_criterion(self, name):
        # "empty or connected" is only sufficient when no object is covered by the empty sieve
        C = CATEGORIES[name]
        for J in [atomic_topology(C), trivial_topology(C), degenerate_topology(C)]:
            site = Site(C, J)
            sieves = [S for c in C.objects for S in J.covers[c]]
            assert is_sheaf(site, constant_presheaf(C, [])) == all(S.arrows for S in sieves)
            consts = all(is_sheaf(site, constant_presheaf(C, [str(i) for i in range(n)])) for n in (1, 2, 3))
            if all(S.arrows for S in sieves):
                assert consts == all(sieve_is_connected(C, S) for S in sieves)
            else:
                # the empty family has one amalgamation per element of L
                assert not consts

    @pytest.mark.parametrize("name", SMALL_NAMES)
    def test_connected_covers_criterion_every_topology(self, name):
        C = CATEGORIES[name]
        for raw in oracles.all_topologies(C):
            covers = {c: set(raw[c]) for c in C.objects}
            connected = all(sieve_is_connected(C, Sieve(c, S)) for c in C.objects for S in raw[c])
            for L in (["0", "1"], ["0", "1", "2"]):
                assert oracles.is_sheaf(C, covers, constant_presheaf(C, L)) == connected


class TestDecomposition:
    def test_connected_ore(self):
        assert len(terminal_decomposition(atomic_site("diamond"))) == 1

    def test_discrete2(self):
        site = atomic_site("discrete2")
        one = sheafify(site, constant_presheaf(site.category, ["*"]))[0]
        assert len(subsheaves(site, one)) == 4
        assert len(terminal_decomposition(site)) == 2

    def test_v_plus_terminal(self):
        assert len(terminal_decomposition(atomic_site("V+terminal"))) == 1

    def test_not_atomic(self):
        C = arrow()
        with pytest.raises(NotAtomicSite):
            terminal_decomposition(Site(C, trivial_topology(C)))

    @pytest.mark.parametrize("name", sorted(CATEGORIES))
    def test_count_is_components_of_dense_part(self, name):
        D, _ = reduce_to_dense(CATEGORIES[name])
        assert len(terminal_decomposition(atomic_site(name))) == len(connected_components(D))


class TestQuotients:
    @pytest.mark.parametrize("name", SMALL_NAMES)
    def test_counts_match_partition_oracle(self, name):
        C = CATEGORIES[name]
        for F in list(standard_presheaves(C).values()):
            if F.size() <= 7:
                assert len(quotients(F)) == oracles.quotient_count(F)

    def test_projections_are_natural_and_onto(self):
        for Q, proj in quotients(REGULAR):
            make_nat_trans(REGULAR, Q, proj.components)
            assert image(proj).is_whole()


class TestCanonical:
    def test_single_point(self):
        point = constant_presheaf(Z2, ["*"])
        canon = restricted_canonical_topology(Z2_SITE, [point], ["P"])
        assert canon.category.objects == ("P",) and len(canon.category.arrows) == 1
        assert [sorted(S.arrows) for S in canon.topology.covering("P")] == [["P>P#0"]]

    def test_z2_transitive_sets(self):
        point = constant_presheaf(Z2, ["*"])
        canon = restricted_canonical_topology(Z2_SITE, [REGULAR, point], ["R", "P"])
        L, K = canon
        assert L.hom("R", "P") and not L.hom("P", "R")
        assert all(is_epi(Z2_SITE, a) for a in canon.transformations.values())
        for c in L.objects:
            assert set(K.covers[c]) == {S for S in enumerate_sieves(L, c) if S.arrows}

    def test_empty(self):
        canon = restricted_canonical_topology(Z2_SITE, [])
        assert canon.category.objects == () and dict(canon.topology.covers) == {}

    def test_not_atom(self):
        with pytest.raises(NotAnAtom):
            restricted_canonical_topology(Z2_SITE, [TRIVIAL2])


def test_site_file_keywords():
    raw = {"category": arrow().to_json()}
    assert site_from_json(raw).topology == atomic_topology(arrow())
    assert site_from_json({**raw, "topology": "trivial"}).topology == trivial_topology(arrow())
    assert is_zero(Site(arrow(), degenerate_topology(arrow())), yoneda(arrow(), "1"))
    assert has_generating_element(Z2_SITE, REGULAR)
