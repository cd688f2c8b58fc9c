"""Finite relational structures and the finite geometric fragment over them.

Formulas are built from ``true``, ``false``, equality, negated equality,
relation atoms, finite conjunction and disjunction, and existential
quantification.  Terms are variable names or constant symbols; a name bound
by the assignment shadows a constant of the same name.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    ArityMismatch,
    LengthMismatch,
    MalformedInput,
    SignatureMismatch,
    UnboundVariable,
    UnknownElement,
)


@dataclass(frozen=True)
class Signature:
    relations: Mapping[str, int] = field(default_factory=dict)
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        for name, arity in self.relations.items():
            if not isinstance(arity, int) or arity < 1:
                raise MalformedInput(f"relation {name!r} needs a positive arity")
        names = list(self.relations) + list(self.constants)
        if len(set(names)) != len(names):
            raise MalformedInput("signature symbol names must be distinct")

    def to_json(self) -> dict:
        return {"relations": dict(sorted(self.relations.items())), "constants": list(self.constants)}


@dataclass(frozen=True)
class Structure:
    signature: Signature
    universe: tuple[str, ...]
    relations: Mapping[str, frozenset[tuple[str, ...]]]
    constants: Mapping[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.universe)

    def holds(self, name: str, args: Sequence[str]) -> bool:
        return tuple(args) in self.relations[name]

    def to_json(self) -> dict:
        return {
            "signature": self.signature.to_json(),
            "universe": list(self.universe),
            "relations": {r: sorted(list(t) for t in ts) for r, ts in sorted(self.relations.items())},
            "constants": dict(sorted(self.constants.items())),
        }


def make_structure(signature: Signature, universe: Iterable, relations: Mapping = None, constants: Mapping = None) -> Structure:
    """Build a structure; elements are coerced to strings and the universe keeps its given order."""
    universe = tuple(str(x) for x in universe)
    if len(set(universe)) != len(universe):
        raise MalformedInput("duplicate universe elements")
    members = set(universe)
    relations = relations or {}
    constants = constants or {}
    rels = {}
    for name, arity in signature.relations.items():
        tuples = set()
        for t in relations.get(name, ()):
            t = tuple(str(x) for x in t)
            if len(t) != arity:
                raise ArityMismatch(f"tuple {t} of {name} does not have arity {arity}")
            if not set(t) <= members:
                raise MalformedInput(f"tuple {t} of {name} leaves the universe")
            tuples.add(t)
        rels[name] = frozenset(tuples)
    for name in relations:
        if name not in signature.relations:
            raise MalformedInput(f"relation {name!r} is not in the signature")
    consts = {}
    for name in signature.constants:
        if name not in constants:
            raise MalformedInput(f"constant {name!r} has no value")
        value = str(constants[name])
        if value not in members:
            raise MalformedInput(f"constant {name!r} = {value!r} is outside the universe")
        consts[name] = value
    return Structure(signature, universe, rels, consts)


def structure_from_json(raw: Mapping) -> Structure:
    if not isinstance(raw, Mapping) or "universe" not in raw:
        raise MalformedInput("structure file must be an object with a 'universe' key")
    sig = raw.get("signature", {})
    signature = Signature(dict(sig.get("relations", {})), tuple(sig.get("constants", ())))
    return make_structure(signature, raw["universe"], raw.get("relations", {}), raw.get("constants", {}))


# formulas ---------------------------------------------------------------------


@dataclass(frozen=True)
class Formula:
    """Formula node.  ``tag`` is one of true, false, eq, neq, rel, and, or, exists.

    ``terms`` holds the arguments of eq/neq/rel, ``parts`` the subformulas of
    and/or/exists, ``name`` the relation symbol, ``bound`` the variables an
    exists binds.
    """

    tag: str
    terms: tuple[str, ...] = ()
    parts: tuple["Formula", ...] = ()
    name: str = ""
    bound: tuple[str, ...] = ()

    def free_vars(self, constants: Iterable[str] = ()) -> set[str]:
        consts = set(constants)
        if self.tag in ("eq", "neq", "rel"):
            return {t for t in self.terms if t not in consts}
        out = set()
        for p in self.parts:
            out |= p.free_vars(consts)
        return out - set(self.bound)

    def to_json(self) -> dict:
        if self.tag in ("true", "false"):
            return {"tag": self.tag}
        if self.tag in ("eq", "neq"):
            return {"tag": self.tag, "args": list(self.terms)}
        if self.tag == "rel":
            return {"tag": "rel", "name": self.name, "args": list(self.terms)}
        if self.tag == "exists":
            return {"tag": "exists", "vars": list(self.bound), "body": self.parts[0].to_json()}
        return {"tag": self.tag, "args": [p.to_json() for p in self.parts]}


TOP = Formula("true")
BOTTOM = Formula("false")


def Eq(a: str, b: str) -> Formula:
    return Formula("eq", (a, b))


def Neq(a: str, b: str) -> Formula:
    return Formula("neq", (a, b))


def Rel(name: str, *args: str) -> Formula:
    return Formula("rel", tuple(args), name=name)


def And(*parts: Formula) -> Formula:
    return Formula("and", parts=tuple(parts))


def Or(*parts: Formula) -> Formula:
    return Formula("or", parts=tuple(parts))


def Exists(variables, body: Formula) -> Formula:
    if isinstance(variables, str):
        variables = (variables,)
    return Formula("exists", parts=(body,), bound=tuple(variables))


def formula_from_json(raw) -> Formula:
    if not isinstance(raw, Mapping) or "tag" not in raw:
        raise MalformedInput(f"formula node must be an object with a 'tag': {raw!r}")
    tag = raw["tag"]
    if tag in ("true", "false"):
        return Formula(tag)
    if tag in ("eq", "neq"):
        args = raw.get("args", [])
        if len(args) != 2:
            raise MalformedInput(f"{tag} takes two terms")
        return Formula(tag, tuple(str(a) for a in args))
    if tag == "rel":
        return Rel(str(raw["name"]), *(str(a) for a in raw.get("args", [])))
    if tag in ("and", "or"):
        return Formula(tag, parts=tuple(formula_from_json(p) for p in raw.get("args", [])))
    if tag == "exists":
        return Exists(tuple(str(v) for v in raw["vars"]), formula_from_json(raw["body"]))
    raise MalformedInput(f"unknown formula tag {tag!r}")


@dataclass(frozen=True)
class Sequent:
    context: tuple[str, ...]
    lhs: Formula
    rhs: Formula

    def to_json(self) -> dict:
        return {"context": list(self.context), "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json()}


def sequent_from_json(raw: Mapping) -> Sequent:
    if not isinstance(raw, Mapping) or not {"lhs", "rhs"} <= set(raw):
        raise MalformedInput("sequent must have 'lhs' and 'rhs'")
    return Sequent(
        tuple(str(v) for v in raw.get("context", [])),
        formula_from_json(raw["lhs"]),
        formula_from_json(raw["rhs"]),
    )


def _term(M: Structure, t: str, env: Mapping[str, str]) -> str:
    if t in env:
        return env[t]
    if t in M.constants:
        return M.constants[t]
    raise UnboundVariable(f"variable {t!r} is unbound")


def evaluate(M: Structure, phi: Formula, assignment: Mapping[str, str] | None = None) -> bool:
    """Satisfaction ``M |= phi[assignment]``; existentials search the universe."""
    env = dict(assignment or {})
    tag = phi.tag
    if tag == "true":
        return True
    if tag == "false":
        return False
    if tag == "eq":
        return _term(M, phi.terms[0], env) == _term(M, phi.terms[1], env)
    if tag == "neq":
        return _term(M, phi.terms[0], env) != _term(M, phi.terms[1], env)
    if tag == "rel":
        if phi.name not in M.signature.relations:
            raise MalformedInput(f"relation {phi.name!r} is not in the signature")
        if len(phi.terms) != M.signature.relations[phi.name]:
            raise ArityMismatch(
                f"{phi.name} has arity {M.signature.relations[phi.name]}, applied to {len(phi.terms)} terms"
            )
        return M.holds(phi.name, [_term(M, t, env) for t in phi.terms])
    if tag == "and":
        return all(evaluate(M, p, env) for p in phi.parts)
    if tag == "or":
        return any(evaluate(M, p, env) for p in phi.parts)
    if tag == "exists":
        body = phi.parts[0]
        for values in itertools.product(M.universe, repeat=len(phi.bound)):
            if evaluate(M, body, {**env, **dict(zip(phi.bound, values))}):
                return True
        return False
    raise MalformedInput(f"unknown formula tag {tag!r}")


def _conjuncts(phi: Formula) -> list[Formula]:
    if phi.tag == "and":
        return [q for p in phi.parts for q in _conjuncts(p)]
    return [phi]


def sequent_counterexample(M: Structure, sigma: Sequent) -> dict[str, str] | None:
    """First assignment (in universe order) making lhs true and rhs false.

    Top-level conjuncts of the lhs are tested as soon as their variables are
    bound, which prunes the search.
    """
    consts = M.signature.constants
    extra = (sigma.lhs.free_vars(consts) | sigma.rhs.free_vars(consts)) - set(sigma.context)
    if extra:
        raise UnboundVariable(f"variables {sorted(extra)} are not in the sequent context")
    ctx = sigma.context
    pending: list[list[Formula]] = [[] for _ in range(len(ctx) + 1)]
    for conj in _conjuncts(sigma.lhs):
        fv = conj.free_vars(consts)
        level = max((ctx.index(v) + 1 for v in fv), default=0)
        pending[level].append(conj)

    env: dict[str, str] = {}

    def search(i):
        if not all(evaluate(M, p, env) for p in pending[i]):
            return None
        if i == len(ctx):
            return None if evaluate(M, sigma.rhs, env) else dict(env)
        for a in M.universe:
            env[ctx[i]] = a
            found = search(i + 1)
            if found is not None:
                return found
        env.pop(ctx[i], None)
        return None

    return search(0)


def satisfies_sequent(M: Structure, sigma: Sequent) -> bool:
    return sequent_counterexample(M, sigma) is None


def cardinality_sequents(n: int, signature: Signature | None = None) -> tuple[Sequent, Sequent]:
    """The pair of sequents satisfied exactly by structures with ``n`` elements.

    ``x_i != x_j`` is the Boolean complement of equality.  The signature is
    accepted for symmetry with other theories; the sequents only use equality.
    """
    if n < 1:
        raise MalformedInput("cardinality sequents need n >= 1")
    xs = tuple(f"x{i}" for i in range(1, n + 1))
    distinct = And(*(Neq(a, b) for a, b in itertools.combinations(xs, 2)))
    first = Sequent((), TOP, Exists(xs, distinct))
    second = Sequent(xs + ("y",), distinct, Or(*(Eq("y", x) for x in xs)))
    return first, second


# isomorphisms -----------------------------------------------------------------


def _check_signatures(M: Structure, N: Structure) -> None:
    if M.signature != N.signature:
        raise SignatureMismatch("structures have different signatures")


def _profiles(M: Structure) -> dict[str, tuple]:
    """Isomorphism-invariant label per element: occurrence counts per relation position."""
    counts = {a: [] for a in M.universe}
    for name in sorted(M.relations):
        arity = M.signature.relations[name]
        table = {a: [0] * (arity + 1) for a in M.universe}
        for t in M.relations[name]:
            for k, a in enumerate(t):
                table[a][k] += 1
            if len(set(t)) == 1:
                table[t[0]][arity] += 1
        for a in M.universe:
            counts[a].append(tuple(table[a]))
    for name in M.signature.constants:
        for a in M.universe:
            counts[a].append(M.constants[name] == a)
    return {a: tuple(v) for a, v in counts.items()}


def _consistent(M: Structure, N: Structure, fwd: dict, bwd: dict, a: str, b: str) -> bool:
    """Can ``a -> b`` be added to the partial isomorphism ``fwd``?"""
    if a in fwd or b in bwd:
        return fwd.get(a) == b and bwd.get(b) == a
    fwd[a], bwd[b] = b, a
    try:
        for name, tuples in M.relations.items():
            other = N.relations[name]
            arity = M.signature.relations[name]
            # tuples that mention a and otherwise stay inside the domain
            for t in itertools.product(list(fwd), repeat=arity):
                if a not in t:
                    continue
                if (t in tuples) != (tuple(fwd[x] for x in t) in other):
                    return False
        return True
    finally:
        del fwd[a], bwd[b]


def is_partial_iso(M: Structure, N: Structure, pairs: Mapping[str, str]) -> bool:
    """Injective, preserving and reflecting every atom and constant on its domain."""
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    for a, b in pairs.items():
        if a not in M.universe or b not in N.universe:
            return False
        if not _consistent(M, N, fwd, bwd, a, b):
            return False
        fwd[a], bwd[b] = b, a
    for c in M.signature.constants:
        if (M.constants[c] in fwd) != (N.constants[c] in bwd):
            return False
        if M.constants[c] in fwd and fwd[M.constants[c]] != N.constants[c]:
            return False
    return True


def iter_isomorphisms(M: Structure, N: Structure, seed: Mapping[str, str] | None = None) -> Iterator[dict[str, str]]:
    """All isomorphisms ``M -> N`` extending ``seed``, via back-and-forth.

    Steps alternate: the next unmatched element of ``M`` (universe order)
    gets a partner in ``N``, then the next unmatched element of ``N`` gets a
    partner in ``M``.  Candidates are tried in universe order and must carry
    the same invariant profile.
    """
    _check_signatures(M, N)
    if len(M) != len(N):
        return
    if any(len(M.relations[r]) != len(N.relations[r]) for r in M.relations):
        return
    pm, pn = _profiles(M), _profiles(N)
    if sorted(pm.values()) != sorted(pn.values()):
        return
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    start = dict(seed or {})
    for c in M.signature.constants:
        start.setdefault(M.constants[c], N.constants[c])
    for a, b in start.items():
        if a not in pm or b not in pn or pm[a] != pn[b] or not _consistent(M, N, fwd, bwd, a, b):
            return
        fwd[a], bwd[b] = b, a

    def search(forth: bool):
        if len(fwd) == len(M):
            yield dict(fwd)
            return
        if forth:
            a = next(x for x in M.universe if x not in fwd)
            options = [(a, b) for b in N.universe if b not in bwd and pn[b] == pm[a]]
        else:
            b = next(y for y in N.universe if y not in bwd)
            options = [(a, b) for a in M.universe if a not in fwd and pm[a] == pn[b]]
        for a, b in options:
            if _consistent(M, N, fwd, bwd, a, b):
                fwd[a], bwd[b] = b, a
                yield from search(not forth)
                del fwd[a], bwd[b]

    yield from search(True)


def back_and_forth(M: Structure, N: Structure, seed: Mapping[str, str] | None = None) -> dict[str, str] | None:
    """First isomorphism found by back-and-forth, or ``None`` if the structures are not isomorphic."""
    for iso in iter_isomorphisms(M, N, seed):
        return iso
    return None


def same_type(M: Structure, a: Sequence[str], N: Structure, b: Sequence[str]) -> bool:
    """Whether some isomorphism ``M -> N`` sends the tuple ``a`` to ``b`` pointwise.

    For finite structures this is equality of the complete types of the
    two tuples.
    """
    _check_signatures(M, N)
    if len(a) != len(b):
        raise LengthMismatch(f"tuples have lengths {len(a)} and {len(b)}")
    seed: dict[str, str] = {}
    for x, y in zip(a, b):
        if x not in M.universe or y not in N.universe:
            raise UnknownElement(f"tuple entry {x!r} or {y!r} is outside the universe")
        if seed.get(x, y) != y:
            return False
        seed[x] = y
    if len(set(seed.values())) != len(seed):
        return False
    return back_and_forth(M, N, seed) is not None


def partial_isos(M: Structure, N: Structure) -> Iterator[dict[str, str]]:
    """Every partial isomorphism ``M -> N``, by domain size, domain, then image."""
    _check_signatures(M, N)

    def constants_ok(fwd, bwd):
        return all(
            (M.constants[c] in fwd) == (N.constants[c] in bwd)
            and fwd.get(M.constants[c], N.constants[c]) == N.constants[c]
            for c in M.signature.constants
        )

    def extend(dom, fwd, bwd):
        if len(fwd) == len(dom):
            if constants_ok(fwd, bwd):
                yield dict(fwd)
            return
        a = dom[len(fwd)]
        for b in N.universe:
            if b not in bwd and _consistent(M, N, fwd, bwd, a, b):
                fwd[a], bwd[b] = b, a
                yield from extend(dom, fwd, bwd)
                del fwd[a], bwd[b]

    for k in range(len(M) + 1):
        for dom in itertools.combinations(M.universe, k):
            yield from extend(dom, {}, {})


def homogeneity_witness(M: Structure) -> dict[str, str] | None:
    """First partial automorphism that does not extend to an automorphism.

    A partial map extends exactly when it is the restriction of some
    automorphism, so the restrictions are tabulated once.
    """
    autos = list(iter_isomorphisms(M, M))
    extendable = set()
    for g in autos:
        for k in range(len(M) + 1):
            for dom in itertools.combinations(M.universe, k):
                extendable.add(tuple((a, g[a]) for a in dom))
    for p in partial_isos(M, M):
        if tuple(p.items()) not in extendable:
            return p
    return None


def is_homogeneous(M: Structure) -> bool:
    return homogeneity_witness(M) is None
