"""The shipped corpus of small categories, presheaves, structures and groups.

``write_corpus`` lays it out as the directory the ``suite`` command reads::

    categories/<name>.json
    presheaves/<category>__<name>.json
    structures/<name>.json
    groups/<name>.json
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

from .fincat import (
    Category,
    discrete_category,
    disjoint_union,
    make_category,
    monoid_category,
    poset_category,
    terminal_category,
)
from .gsets import PermGroup, generate_group, group_category
from .modelkit import Signature, Structure, make_structure
from .sheafkit import Presheaf, constant_presheaf, coproduct, make_presheaf, yoneda


def _cyclic_table(names):
    n = len(names)
    return lambda g, f: names[(names.index(g) + names.index(f)) % n]


def v_cospan() -> Category:
    return make_category(["x", "y", "z"], [("f", "x", "y"), ("g", "z", "y")])


def arrow() -> Category:
    return make_category(["0", "1"], [("u", "0", "1")])


def klein_four() -> Category:
    names = ["e", "a", "b", "c"]
    bits = {"e": 0, "a": 1, "b": 2, "c": 3}
    inv = {v: k for k, v in bits.items()}
    return monoid_category(names, lambda g, f: inv[bits[g] ^ bits[f]], "e")


def categories() -> dict[str, Category]:
    V = v_cospan()
    T = terminal_category()
    Z2 = monoid_category(["e", "g"], _cyclic_table(["e", "g"]), "e")
    return {
        "terminal": T,
        "arrow": arrow(),
        "V": V,
        "diamond": poset_category(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]),
        "discrete2": discrete_category(["a", "b"]),
        "Z2": Z2,
        "Z3": monoid_category(["e", "r", "rr"], _cyclic_table(["e", "r", "rr"]), "e"),
        "S3": group_category(groups()["S3"]),
        "Z2xZ2": klein_four(),
        "V+terminal": disjoint_union(("V", V), ("T", T)),
        "Z2+Z2": disjoint_union(("L", Z2), ("R", Z2)),
        "A+BC": make_category(["A", "B", "C"], [("h", "B", "C")]),
        "parallel": make_category(["a", "b"], [("u", "a", "b"), ("v", "a", "b")]),
        "span": make_category(["x", "y", "z"], [("p", "y", "x"), ("q", "y", "z")]),
        "idempotent": monoid_category(["1", "e"], lambda g, f: "1" if g == f == "1" else "e", "1"),
        "chain4": poset_category(["0", "1", "2", "3"], [("0", "1"), ("1", "2"), ("2", "3")]),
        "B3": poset_category(
            ["".join(s) or "0" for r in range(4) for s in itertools.combinations("abc", r)],
            [
                ("".join(s) or "0", "".join(t))
                for r in range(3)
                for s in itertools.combinations("abc", r)
                for t in itertools.combinations("abc", r + 1)
                if set(s) <= set(t)
            ],
        ),
        "V+arrow": disjoint_union(("V", V), ("A", arrow())),
    }


def standard_presheaves(C: Category) -> dict[str, Presheaf]:
    """Representables, small constant presheaves and one coproduct, for any category."""
    out = {f"y({c})": yoneda(C, c) for c in C.objects}
    out["const0"] = constant_presheaf(C, [])
    out["const1"] = constant_presheaf(C, ["*"])
    out["const2"] = constant_presheaf(C, ["0", "1"])
    if len(C.objects) >= 2:
        a, b = sorted(C.objects)[:2]
        out[f"y({a})+y({b})"] = coproduct(yoneda(C, a), yoneda(C, b))
    return out


def extra_presheaves(cats: dict[str, Category]) -> dict[tuple[str, str], Presheaf]:
    """Hand-made presheaves keyed by ``(category name, presheaf name)``."""
    out = {}
    A = cats["arrow"]
    out[("arrow", "collapse")] = make_presheaf(A, {"1": ["p", "q"], "0": ["r"]}, {"u": {"p": "r", "q": "r"}})
    out[("arrow", "split")] = make_presheaf(A, {"1": ["p"], "0": ["r", "s"]}, {"u": {"p": "r"}})
    Z2 = cats["Z2"]
    out[("Z2", "regular+point")] = make_presheaf(
        Z2, {"*": ["0", "1", "p"]}, {"g": {"0": "1", "1": "0", "p": "p"}}
    )
    V = cats["V"]
    out[("V", "two-legs")] = make_presheaf(
        V, {"y": ["t"], "x": ["a", "b"], "z": ["c"]}, {"f": {"t": "a"}, "g": {"t": "c"}}
    )
    return out


# structures --------------------------------------------------------------------

GRAPH = Signature({"R": 2})
EMPTY = Signature({})


def _graph(universe, edges, symmetric=False) -> Structure:
    edges = list(edges)
    if symmetric:
        edges += [(b, a) for a, b in edges]
    return make_structure(GRAPH, universe, {"R": edges})


def _cycle(n, symmetric=False) -> Structure:
    return _graph([str(i) for i in range(n)], [(str(i), str((i + 1) % n)) for i in range(n)], symmetric)


def _path(n) -> Structure:
    return _graph([str(i) for i in range(n)], [(str(i), str(i + 1)) for i in range(n - 1)])


def _complete(n) -> Structure:
    u = [str(i) for i in range(n)]
    return _graph(u, [(a, b) for a in u for b in u if a != b])


def _order(n) -> Structure:
    u = [str(i) for i in range(n)]
    return _graph(u, [(a, b) for a, b in itertools.combinations(u, 2)])


def structures() -> dict[str, Structure]:
    out: dict[str, Structure] = {}
    for n in range(1, 5):
        out[f"set{n}"] = make_structure(EMPTY, [str(i) for i in range(n)])
    out["C3"] = _cycle(3)
    out["C3-relabeled"] = _graph(["a", "b", "c"], [("b", "a"), ("a", "c"), ("c", "b")])
    out["P3"] = _path(3)
    out["K3"] = _complete(3)
    for n in range(2, 5):
        out[f"L{n}"] = _order(n)
    out["K2"] = _complete(2)
    out["K4"] = _complete(4)
    out["C4"] = _cycle(4)
    out["P4"] = _path(4)
    out["C4-undirected"] = _cycle(4, symmetric=True)
    out["2K2"] = _graph(["0", "1", "2", "3"], [("0", "1"), ("2", "3")], symmetric=True)
    out["C5-undirected"] = _cycle(5, symmetric=True)
    out["C5"] = _cycle(5)
    out["P5"] = _path(5)
    out["C6"] = _cycle(6)
    out["2C3"] = _graph([str(i) for i in range(6)], [("0", "1"), ("1", "2"), ("2", "0"), ("3", "4"), ("4", "5"), ("5", "3")])
    out["K33"] = _graph(
        [str(i) for i in range(6)], [(a, b) for a in "012" for b in "345"], symmetric=True
    )
    out["2K3"] = _graph(
        [str(i) for i in range(6)],
        [("0", "1"), ("1", "2"), ("0", "2"), ("3", "4"), ("4", "5"), ("3", "5")],
        symmetric=True,
    )
    out["loop+point"] = _graph(["0", "1"], [("0", "0")])
    pointed = Signature({}, ("c",))
    out["pointed2"] = make_structure(pointed, ["0", "1"], constants={"c": "0"})
    out["pointed3"] = make_structure(pointed, ["0", "1", "2"], constants={"c": "0"})
    out["pointed3-b"] = make_structure(pointed, ["0", "1", "2"], constants={"c": "2"})
    colored = Signature({"U": 1})
    out["colored3"] = make_structure(colored, ["0", "1", "2"], {"U": [("0",)]})
    out["colored3-b"] = make_structure(colored, ["0", "1", "2"], {"U": [("1",)]})
    out["colored4"] = make_structure(colored, ["0", "1", "2", "3"], {"U": [("0",), ("1",)]})
    return out


# groups --------------------------------------------------------------------------


def groups() -> dict[str, PermGroup]:
    def cyc(points):
        return {p: points[(i + 1) % len(points)] for i, p in enumerate(points)}

    return {
        "trivial": generate_group(["0"], []),
        "Z2": generate_group(["0", "1"], [cyc("01")]),
        "Z3": generate_group(["0", "1", "2"], [cyc("012")]),
        "Z2xZ2": generate_group(
            ["0", "1", "2", "3"],
            [{"0": "1", "1": "0", "2": "3", "3": "2"}, {"0": "2", "2": "0", "1": "3", "3": "1"}],
        ),
        "S3": generate_group(["0", "1", "2"], [cyc("012"), {"0": "1", "1": "0", "2": "2"}]),
    }


# directory layout ----------------------------------------------------------------


def dump(obj) -> str:
    """Canonical JSON text used for every file and ``--json`` output."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_corpus(root: Path) -> list[Path]:
    root = Path(root)
    written = []

    def put(rel: str, payload):
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dump(payload), encoding="utf-8")
        written.append(path)

    cats = categories()
    for name, C in cats.items():
        put(f"categories/{name}.json", C.to_json())
    for (cname, pname), P in extra_presheaves(cats).items():
        put(f"presheaves/{cname}__{pname}.json", P.to_json())
    for name, M in structures().items():
        put(f"structures/{name}.json", M.to_json())
    for name, G in groups().items():
        put(f"groups/{name}.json", G.to_json())
    return written
