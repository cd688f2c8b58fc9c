import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import GRAPH_SIG, graphs
from toposcalc import oracles
from toposcalc.corpus import structures
from toposcalc.errors import (
    ArityMismatch,
    LengthMismatch,
    MalformedInput,
    SignatureMismatch,
    UnboundVariable,
    UnknownElement,
)
from toposcalc.gsets import automorphisms, orbits_on_tuples
from toposcalc.modelkit import (
    And,
    Eq,
    Exists,
    Neq,
    Or,
    Rel,
    Sequent,
    Signature,
    back_and_forth,
    cardinality_sequents,
    evaluate,
    formula_from_json,
    homogeneity_witness,
    is_homogeneous,
    is_partial_iso,
    iter_isomorphisms,
    make_structure,
    partial_isos,
    same_type,
    satisfies_sequent,
    sequent_counterexample,
    sequent_from_json,
    structure_from_json,
)

S = structures()
SUCCESSOR = Sequent(("x", "y"), Rel("R", "x", "y"), Exists("z", Rel("R", "y", "z")))


class TestStructures:
    def test_round_trip(self):
        for M in S.values():
            assert structure_from_json(M.to_json()) == M

    def test_arity(self):
        with pytest.raises(ArityMismatch):
            make_structure(GRAPH_SIG, ["0"], {"R": [("0",)]})

    def test_outside_universe(self):
        with pytest.raises(MalformedInput):
            make_structure(GRAPH_SIG, ["0"], {"R": [("0", "1")]})

    def test_unknown_relation(self):
        with pytest.raises(MalformedInput):
            make_structure(GRAPH_SIG, ["0"], {"Q": []})


class TestEvaluate:
    def test_c3_has_successor(self):
        assert evaluate(S["C3"], Exists("y", Rel("R", "a", "y")), {"a": "0"})

    def test_p3_endpoint(self):
        assert not evaluate(S["P3"], Exists("y", Rel("R", "a", "y")), {"a": "2"})

    def test_connectives(self):
        M = S["L3"]
        assert evaluate(M, Or(Rel("R", "a", "b"), Eq("a", "b")), {"a": "0", "b": "0"})
        assert not evaluate(M, And(Rel("R", "a", "b"), Neq("a", "b")), {"a": "2", "b": "0"})

    def test_unbound(self):
        with pytest.raises(UnboundVariable):
            evaluate(S["C3"], Rel("R", "x", "y"), {"x": "0"})

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            evaluate(S["C3"], Rel("R", "x"), {"x": "0"})

    def test_constants(self):
        M = S["pointed3"]
        c = M.signature.constants[0]
        assert evaluate(M, Eq(c, c))

    def test_json_round_trip(self):
        phi = Exists(("y", "z"), And(Rel("R", "x", "y"), Or(Eq("y", "z"), Neq("x", "z"))))
        assert formula_from_json(phi.to_json()) == phi

    def test_bad_tag(self):
        with pytest.raises(MalformedInput):
            formula_from_json({"tag": "forall"})

    @given(graphs(), st.data())
    @settings(max_examples=60, deadline=None)
    def test_exists_matches_enumeration(self, M, data):
        a = data.draw(st.sampled_from(M.universe))
        direct = any((a, b) in M.relations["R"] for b in M.universe)
        assert evaluate(M, Exists("y", Rel("R", "a", "y")), {"a": a}) == direct


class TestSequents:
    def test_c3_successor(self):
        assert satisfies_sequent(S["C3"], SUCCESSOR)

    def test_p3_witness(self):
        assert sequent_counterexample(S["P3"], SUCCESSOR) == {"x": "1", "y": "2"}

    def test_context_must_cover_free_vars(self):
        with pytest.raises(UnboundVariable):
            satisfies_sequent(S["C3"], Sequent(("x",), Rel("R", "x", "y"), Eq("x", "x")))

    def test_json_round_trip(self):
        assert sequent_from_json(SUCCESSOR.to_json()) == SUCCESSOR

    @pytest.mark.parametrize("n", range(1, 6))
    def test_cardinality_small_sets(self, n):
        first, second = cardinality_sequents(n)
        for m in range(1, 7):
            M = S.get(f"set{m}") or make_structure(Signature(), [str(i) for i in range(m)])
            assert (satisfies_sequent(M, first) and satisfies_sequent(M, second)) == (m == n)

    def test_cardinality_rejects_zero(self):
        with pytest.raises(MalformedInput):
            cardinality_sequents(0)

    @given(graphs(max_size=5), st.integers(1, 5))
    @settings(max_examples=60, deadline=None)
    def test_cardinality_ignores_relations(self, M, n):
        first, second = cardinality_sequents(n, M.signature)
        assert (satisfies_sequent(M, first) and satisfies_sequent(M, second)) == (len(M) == n)

    @given(graphs())
    @settings(max_examples=60, deadline=None)
    def test_counterexample_is_genuine(self, M):
        w = sequent_counterexample(M, SUCCESSOR)
        brute = [
            {"x": x, "y": y}
            for x, y in itertools.product(M.universe, repeat=2)
            if (x, y) in M.relations["R"] and not any((y, z) in M.relations["R"] for z in M.universe)
        ]
        assert w == (brute[0] if brute else None)


class TestIsomorphism:
    def test_c3_relabeled_has_three(self):
        assert len(list(iter_isomorphisms(S["C3"], S["C3-relabeled"]))) == 3

    def test_c3_vs_p3(self):
        assert back_and_forth(S["C3"], S["P3"]) is None

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            back_and_forth(S["C3"], S["set3"])

    def test_seeded(self):
        iso = back_and_forth(S["C3"], S["C3-relabeled"], {"0": "a"})
        assert iso["0"] == "a" and oracles._is_bijective_iso(S["C3"], S["C3-relabeled"], iso)

    @pytest.mark.parametrize("name", sorted(S))
    def test_corpus_against_bijection_search(self, name):
        M = S[name]
        if len(M) > 6:
            pytest.skip("too large for the permutation oracle")
        got = sorted(tuple(sorted(h.items())) for h in iter_isomorphisms(M, M))
        assert got == sorted(tuple(sorted(h.items())) for h in oracles.isomorphisms(M, M))

    @given(graphs(), graphs())
    @settings(max_examples=80, deadline=None)
    def test_decision_matches_oracle(self, M, N):
        assert (back_and_forth(M, N) is not None) == oracles.isomorphic(M, N)

    @given(graphs(), st.permutations(["0", "1", "2", "3"]))
    @settings(max_examples=60, deadline=None)
    def test_relabeled_copy_is_found(self, M, perm):
        h = dict(zip(M.universe, perm))
        N = make_structure(GRAPH_SIG, perm[: len(M)], {"R": [(h[a], h[b]) for a, b in M.relations["R"]]})
        iso = back_and_forth(M, N)
        assert iso is not None and oracles._is_bijective_iso(M, N, iso)


class TestSameType:
    def test_set3_distinct_pairs(self):
        M = S["set3"]
        pairs = [p for p in itertools.permutations(M.universe, 2)]
        assert all(same_type(M, p, M, q) for p in pairs for q in pairs)

    def test_l3_ends_differ(self):
        assert not same_type(S["L3"], ["0"], S["L3"], ["1"])

    def test_repeated_entries(self):
        M = S["set3"]
        assert not same_type(M, ["0", "0"], M, ["0", "1"])
        assert same_type(M, ["0", "0"], M, ["2", "2"])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            same_type(S["set3"], ["0"], S["set3"], ["0", "1"])

    def test_unknown_element(self):
        with pytest.raises(UnknownElement):
            same_type(S["set3"], ["9"], S["set3"], ["0"])

    @pytest.mark.parametrize("name", ["C3", "C4", "K33", "2K3", "P4", "colored4", "pointed3"])
    def test_orbits_of_automorphism_group(self, name):
        M = S[name]
        for orbit in orbits_on_tuples(automorphisms(M), 2):
            first = orbit[0]
            for t in itertools.product(M.universe, repeat=2):
                assert same_type(M, first, M, t) == (t in orbit)

    @given(graphs(), st.data())
    @settings(max_examples=60, deadline=None)
    def test_homogeneous_type_is_positive_existential(self, M, data):
        # on homogeneous structures the type is decided by the quantifier-free diagram
        a = data.draw(st.lists(st.sampled_from(M.universe), min_size=1, max_size=2, unique=True))
        b = data.draw(st.lists(st.sampled_from(M.universe), min_size=len(a), max_size=len(a), unique=True))
        if is_homogeneous(M):
            assert same_type(M, a, M, b) == is_partial_iso(M, M, dict(zip(a, b)))
        assert same_type(M, a, M, b) <= oracles.positive_existential_equivalent(M, a, M, b)


class TestHomogeneity:
    def test_l2_witness(self):
        assert homogeneity_witness(S["L2"]) == {"0": "1"}

    @pytest.mark.parametrize("name", ["K3", "set3", "C3", "C4-undirected", "K33", "2K3", "C5-undirected"])
    def test_homogeneous(self, name):
        assert is_homogeneous(S[name])

    @pytest.mark.parametrize("name", ["L2", "L3", "L4", "P3", "P4", "C5", "C6"])
    def test_not_homogeneous(self, name):
        assert not is_homogeneous(S[name])

    def test_partial_iso_order(self):
        got = list(partial_isos(S["L2"], S["L2"]))
        assert got == [{}, {"0": "0"}, {"0": "1"}, {"1": "0"}, {"1": "1"}, {"0": "0", "1": "1"}]

    @given(graphs(max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_witness_by_brute_extension(self, M):
        autos = oracles.isomorphisms(M, M)
        expected = None
        for p in partial_isos(M, M):
            if not any(all(g[a] == b for a, b in p.items()) for g in autos):
                expected = p
                break
        assert homogeneity_witness(M) == expected

    @given(graphs(max_size=4))
    @settings(max_examples=40, deadline=None)
    def test_partial_isos_against_injections(self, M):
        got = {tuple(sorted(p.items())) for p in partial_isos(M, M)}
        want = set()
        for k in range(len(M) + 1):
            for dom in itertools.combinations(M.universe, k):
                for img in itertools.permutations(M.universe, k):
                    p = dict(zip(dom, img))
                    sub = [t for t in M.relations["R"] if set(t) <= set(dom)]
                    image_rel = {(p[x], p[y]) for x, y in sub}
                    target = {t for t in M.relations["R"] if set(t) <= set(img)}
                    if image_rel == target:
                        want.add(tuple(sorted(p.items())))
        assert got == want
