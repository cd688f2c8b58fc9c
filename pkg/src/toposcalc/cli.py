"""Command-line interface: ``toposcalc <command> [files] [--json]``.

Exit status is 0 whenever a result was computed, including a computed
"false"; 2 for malformed input; 3 for a violated precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import corpus as corpus_mod
from .errors import MalformedInput, NotASheaf, PreconditionError, ToposcalcError, UnknownElement
from .fincat import connected_components, full_subcategory, ore_witness, validate_category
from .gsets import (
    automorphisms,
    group_from_json,
    gset_as_presheaf,
    orbits_on_tuples,
    stabilizer,
    subgroup_conjugacy_classes,
    transitive_gsets,
)
from .modelkit import (
    back_and_forth,
    cardinality_sequents,
    evaluate,
    formula_from_json,
    homogeneity_witness,
    sequent_counterexample,
    sequent_from_json,
    structure_from_json,
)
from .sheafkit import (
    Site,
    atoms_of_lattice,
    connected_components_sheaf,
    is_atom,
    is_sheaf,
    presheaf_from_json,
    restricted_canonical_topology,
    sheaf_failure,
    sheafify,
    site_from_json,
    subsheaves,
    terminal_decomposition,
)
from .sitecore import (
    atomic_topology,
    enumerate_ideals,
    enumerate_sieves,
    induced_topology,
    reduce_to_dense,
    saturate,
    sieves_from_json,
    topology_to_json,
    topology_violation,
)
from .suite import run_suite


def _load(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise MalformedInput(f"cannot read {path}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from exc


def _site(path) -> Site:
    site = site_from_json(_load(path))
    bad = topology_violation(*site)
    if bad is not None:
        raise PreconditionError(f"site topology is not a Grothendieck topology: {bad.describe()}")
    return site


def _sheaf(site, path):
    F = presheaf_from_json(site.category, _load(path))
    if not is_sheaf(site, F):
        raise NotASheaf(f"{path} is not a sheaf: {sheaf_failure(site, F).describe()}")
    return F


def _arrows(S) -> str:
    return "{" + ", ".join(sorted(S.arrows)) + "}"


def _sub_text(sub) -> str:
    return "; ".join(f"{c}: {{{', '.join(sorted(sub.subsets[c]))}}}" for c in sorted(sub.subsets))


def _topology_text(J) -> str:
    lines = []
    for c in sorted(J.covers):
        lines.append(f"{c}: " + " ".join(_arrows(S) for S in J.covering(c)))
    if J.trivial_topos:
        lines.append("diagnostic: the empty sieve covers; the sheaf topos is trivial")
    return "\n".join(lines)


# commands ------------------------------------------------------------------------
# each returns (payload for --json, human-readable text)


def cmd_validate(a):
    C = validate_category(_load(a.category))
    return C.to_json(), f"valid category: {len(C.objects)} objects, {len(C.morphisms)} morphisms"


def cmd_components(a):
    comps = connected_components(validate_category(_load(a.category)))
    return {"components": comps}, "\n".join(" ".join(c) for c in comps)


def cmd_ore(a):
    w = ore_witness(validate_category(_load(a.category)))
    if w is None:
        return {"ore": True, "witness": None}, "true"
    payload = {"ore": False, "witness": {"target": w.target, "left": w.left, "right": w.right}}
    return payload, f"false, witness cospan ({w.target}; {w.left},{w.right})"


def cmd_sieves(a):
    C = validate_category(_load(a.category))
    C.require_object(a.object)
    sieves = enumerate_sieves(C, a.object)
    return {"sieves": [sorted(S.arrows) for S in sieves]}, "\n".join(_arrows(S) for S in sieves)


def cmd_saturate(a):
    C = validate_category(_load(a.category))
    J = saturate(C, sieves_from_json(C, _load(a.generators)))
    return topology_to_json(J), _topology_text(J)


def cmd_atomic(a):
    J = atomic_topology(validate_category(_load(a.category)))
    payload = topology_to_json(J)
    payload["trivial_topos"] = J.trivial_topos
    return payload, _topology_text(J)


def cmd_reduce(a):
    C = validate_category(_load(a.category))
    red = reduce_to_dense(C)
    payload = {
        "category": red.category.to_json(),
        "topology": topology_to_json(red.topology),
        "dropped": list(red.dropped),
    }
    kept = " ".join(sorted(red.category.objects)) or "(empty)"
    text = f"dense objects: {kept}\ndropped: {' '.join(red.dropped) or '(none)'}"
    if not red.category.objects:
        text += "\nthe sheaf topos is trivial"
    return payload, text


def cmd_ideals(a):
    ideals = enumerate_ideals(validate_category(_load(a.category)))
    return {"ideals": ideals}, "\n".join("{" + ", ".join(U) + "}" for U in ideals)


def cmd_induced(a):
    C, J = _site(a.site)
    D = full_subcategory(C, a.objects)
    K = induced_topology(C, J, D)
    return topology_to_json(K), _topology_text(K)


def cmd_sheafcheck(a):
    site = _site(a.site)
    F = presheaf_from_json(site.category, _load(a.presheaf))
    fail = sheaf_failure(site, F)
    if fail is None:
        return {"sheaf": True, "failure": None}, "sheaf"
    payload = {
        "sheaf": False,
        "failure": {
            "object": fail.obj,
            "sieve": sorted(fail.sieve.arrows),
            "family": dict(sorted(fail.family.items())),
            "amalgamations": list(fail.amalgamations),
        },
    }
    return payload, f"not a sheaf: {fail.describe()}"


def cmd_sheafify(a):
    site = _site(a.site)
    F = presheaf_from_json(site.category, _load(a.presheaf))
    aF, unit = sheafify(site, F)
    payload = aF.to_json()
    payload["unit"] = {c: dict(sorted(unit.components[c].items())) for c in sorted(unit.components)}
    return payload, json.dumps(payload, indent=2, sort_keys=True)


def cmd_subsheaves(a):
    site = _site(a.site)
    subs = subsheaves(site, _sheaf(site, a.presheaf))
    return {"subsheaves": [s.to_json() for s in subs]}, "\n".join(_sub_text(s) for s in subs)


def cmd_atoms(a):
    site = _site(a.site)
    F = _sheaf(site, a.presheaf)
    subs = subsheaves(site, F)
    atoms = atoms_of_lattice(subs)
    atom = is_atom(site, F)
    payload = {"is_atom": atom, "subsheaves": len(subs), "atoms": [s.to_json() for s in atoms]}
    text = [f"{'atom' if atom else 'not an atom'} ({len(subs)} subsheaves)"]
    text += [f"atom: {_sub_text(s)}" for s in atoms]
    return payload, "\n".join(text)


def cmd_connected(a):
    site = _site(a.site)
    comps = connected_components_sheaf(site, _sheaf(site, a.presheaf))
    payload = {"connected": len(comps) == 1, "components": [s.to_json() for s in comps]}
    return payload, f"{len(comps)} components\n" + "\n".join(_sub_text(s) for s in comps)


def cmd_decompose(a):
    parts = terminal_decomposition(_site(a.site))
    return {"atoms": [s.to_json() for s in parts]}, "\n".join(_sub_text(s) for s in parts) or "(none)"


def cmd_completions(a):
    n = len(terminal_decomposition(_site(a.site)))
    return {"completions": n}, str(n)


def cmd_canonical(a):
    site = _site(a.site)
    atoms = [presheaf_from_json(site.category, _load(p)) for p in a.atoms]
    names = [Path(p).stem for p in a.atoms]
    canon = restricted_canonical_topology(site, atoms, names)
    payload = {"category": canon.category.to_json(), "topology": topology_to_json(canon.topology)}
    return payload, json.dumps(payload, indent=2, sort_keys=True)


def _assignment(pairs):
    env = {}
    for item in pairs or []:
        if "=" not in item:
            raise MalformedInput(f"assignment {item!r} must look like var=element")
        k, v = item.split("=", 1)
        env[k] = v
    return env


def cmd_eval(a):
    M = structure_from_json(_load(a.structure))
    env = _assignment(a.assign)
    for v, x in env.items():
        if x not in M.universe:
            raise UnknownElement(f"{v} is assigned {x!r}, which is outside the universe")
    value = evaluate(M, formula_from_json(_load(a.formula)), env)
    return {"value": value}, "true" if value else "false"


def cmd_sequent(a):
    M = structure_from_json(_load(a.structure))
    cx = sequent_counterexample(M, sequent_from_json(_load(a.sequent)))
    if cx is None:
        return {"holds": True, "counterexample": None}, "holds"
    text = ", ".join(f"{k}={v}" for k, v in cx.items())
    return {"holds": False, "counterexample": cx}, f"fails at {text}"


def cmd_cardseq(a):
    pair = cardinality_sequents(a.n)
    payload = {"sequents": [s.to_json() for s in pair]}
    if a.structure is None:
        return payload, json.dumps(payload, indent=2, sort_keys=True)
    M = structure_from_json(_load(a.structure))
    results = [sequent_counterexample(M, s) is None for s in pair]
    payload["holds"] = results
    return payload, " ".join("holds" if r else "fails" for r in results)


def cmd_iso(a):
    M, N = structure_from_json(_load(a.left)), structure_from_json(_load(a.right))
    iso = back_and_forth(M, N)
    if iso is None:
        return {"isomorphic": False, "isomorphism": None}, "not isomorphic"
    return {"isomorphic": True, "isomorphism": iso}, "isomorphic: " + ", ".join(f"{k}->{v}" for k, v in iso.items())


def cmd_homog(a):
    w = homogeneity_witness(structure_from_json(_load(a.structure)))
    if w is None:
        return {"homogeneous": True, "witness": None}, "homogeneous"
    text = "{" + ", ".join(f"{k}->{v}" for k, v in w.items()) + "}"
    return {"homogeneous": False, "witness": w}, f"not homogeneous, witness {text}"


def _group(path):
    raw = _load(path)
    if isinstance(raw, dict) and "universe" in raw:
        return automorphisms(structure_from_json(raw))
    return group_from_json(raw)


def cmd_aut(a):
    G = automorphisms(structure_from_json(_load(a.structure)))
    return G.to_json(), f"order {len(G)}"


def cmd_orbits(a):
    if a.k < 0:
        raise MalformedInput("tuple length must be non-negative")
    orbits = orbits_on_tuples(_group(a.group), a.k)
    payload = {"orbits": [[list(t) for t in orb] for orb in orbits]}
    return payload, "\n".join(" ".join("(" + ",".join(t) + ")" for t in orb) for orb in orbits)


def cmd_stab(a):
    H = stabilizer(_group(a.group), a.points)
    return H.to_json(), f"order {len(H)}"


def cmd_gset_atoms(a):
    G = _group(a.group)
    classes = subgroup_conjugacy_classes(G, a.bound)
    count = 0
    sizes = []
    for X in transitive_gsets(G, a.bound):
        C, P = gset_as_presheaf(X)
        count += is_atom(Site(C, atomic_topology(C)), P)
        sizes.append(len(X.carrier))
    payload = {"atoms": count, "subgroup_classes": len(classes), "orbit_sizes": sizes}
    return payload, f"{count} atoms, {len(classes)} subgroup conjugacy classes"


def cmd_suite(a):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = run_suite(a.corpus, a.only)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    a.exit_status = 1 if report.failed else 0
    return report.to_json(), report.render()


def cmd_corpus(a):
    written = corpus_mod.write_corpus(Path(a.directory))
    return {"written": len(written)}, f"wrote {len(written)} files to {a.directory}"


# parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subparser from resetting a flag given before the command
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit structured JSON")
    common.add_argument(
        "--bound", type=int, default=argparse.SUPPRESS, help="enumeration bound (overrides TOPOSCALC_BOUND)"
    )

    parser = argparse.ArgumentParser(prog="toposcalc", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, fn, help, *args):
        p = sub.add_parser(name, help=help, parents=[common])
        for arg in args:
            if isinstance(arg, tuple):
                p.add_argument(arg[0], **arg[1])
            else:
                p.add_argument(arg)
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "check a category file", "category")
    add("components", cmd_components, "connected components", "category")
    add("ore", cmd_ore, "right Ore condition", "category")
    add("sieves", cmd_sieves, "all sieves on an object", "category", "object")
    add("saturate", cmd_saturate, "least topology containing generator sieves", "category", "generators")
    add("atomic", cmd_atomic, "atomic topology", "category")
    add("reduce", cmd_reduce, "dense Ore subcategory", "category")
    add("ideals", cmd_ideals, "ideals of objects", "category")
    add("induced", cmd_induced, "induced topology on a full subcategory", "site", ("objects", {"nargs": "+"}))
    add("sheafcheck", cmd_sheafcheck, "sheaf condition", "site", "presheaf")
    add("sheafify", cmd_sheafify, "associated sheaf and unit", "site", "presheaf")
    add("subsheaves", cmd_subsheaves, "closed subpresheaves of a sheaf", "site", "presheaf")
    add("atoms", cmd_atoms, "atom test and atoms of the subsheaf lattice", "site", "presheaf")
    add("connected", cmd_connected, "connected components of a sheaf", "site", "presheaf")
    add("decompose", cmd_decompose, "atoms of the terminal sheaf", "site")
    add("completions", cmd_completions, "number of atoms of the terminal sheaf", "site")
    add("canonical", cmd_canonical, "restricted canonical topology on atoms", "site", ("atoms", {"nargs": "+"}))
    p = add("eval", cmd_eval, "evaluate a formula", "structure", "formula")
    p.add_argument("--assign", action="append", metavar="VAR=ELEM")
    add("sequent", cmd_sequent, "check a sequent", "structure", "sequent")
    add("cardseq", cmd_cardseq, "cardinality sequents", ("n", {"type": int}), ("structure", {"nargs": "?"}))
    add("iso", cmd_iso, "isomorphism by back-and-forth", "left", "right")
    add("homog", cmd_homog, "homogeneity", "structure")
    add("aut", cmd_aut, "automorphism group", "structure")
    add("orbits", cmd_orbits, "orbits on k-tuples (group or structure file)", "group", ("k", {"type": int}))
    add("stab", cmd_stab, "pointwise stabilizer", "group", ("points", {"nargs": "*"}))
    add("gset-atoms", cmd_gset_atoms, "atoms among transitive G-sets", "group")
    p = add("suite", cmd_suite, "run property checks over a corpus directory", "corpus")
    p.add_argument("--only", action="append", metavar="PROPERTY")
    add("corpus", cmd_corpus, "write the shipped corpus to a directory", "directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.json = getattr(args, "json", False)
    args.bound = getattr(args, "bound", None)
    args.exit_status = 0
    try:
        payload, text = args.func(args)
    except ToposcalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, TypeError, AttributeError) as exc:
        # wrong JSON shapes surface as lookup errors deep in the loaders
        print(f"error: malformed input: {exc!r}", file=sys.stderr)
        return MalformedInput.exit_code
    out = corpus_mod.dump(payload) if args.json else text + "\n"
    sys.stdout.write(out)
    return args.exit_status


if __name__ == "__main__":
    sys.exit(main())
