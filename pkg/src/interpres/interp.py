"""Interpretations between finite structures.

An :class:`Interpretation` carries, in the target language, a domain formula
over k-tuples, an equality formula over pairs of k-tuples, and one formula per
source relation and constant.  :func:`translate` pushes source formulas
through it, :func:`apply` builds the interpreted quotient structure, and
:func:`compose` stacks two interpretations.

Translation renames a source variable ``x`` to ``x__1 .. x__k``.  The double
underscore is reserved for this; a constant ``c`` inside an atomic formula is
witnessed by the tuple ``c__k1 .. c__kk``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .logic import (
    And, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Signature, SignatureError,
    all_names, base_env, check_signature, compile_formula, conj, disj, evaluate, exists_many,
    forall_many, free_names, free_variables, fresh_name, parse_formula, render, rename_free,
)
from .structures import (
    DEFAULT_ISO_CAP, EqRelation, FinStructure, StructureError, find_isomorphisms, is_extensional,
    is_wellfounded,
)


class InterpretationError(Exception):
    pass


class EmptyDomainError(InterpretationError):
    pass


class NotEquivalenceOnDomain(InterpretationError):
    pass


class NotCongruenceOnDomain(InterpretationError):
    pass


class ScottClassMissing(InterpretationError):
    """A Scott class is not an element of the host structure."""


# -- definitions and default variable names ----------------------------------

ARG_LETTERS = "xyzwuvstrq"


def arg_vars(j: int, k: int) -> list[str]:
    """Variable names for argument ``j`` (0-based) of a k-dimensional definition."""
    letter = ARG_LETTERS[j] if j < len(ARG_LETTERS) else f"a{j}_"
    if k == 1:
        return [letter]
    return [f"{letter}{i}" for i in range(1, k + 1)]


def default_vars(k: int, n_args: int) -> tuple[str, ...]:
    return tuple(v for j in range(n_args) for v in arg_vars(j, k))


@dataclass(frozen=True)
class Definition:
    """A formula read as a relation on its listed variables, in order."""

    vars: tuple[str, ...]
    formula: Formula

    def instantiate(self, args: Sequence[str]) -> Formula:
        if len(args) != len(self.vars):
            raise InterpretationError(
                f"definition over {len(self.vars)} variables applied to {len(args)}")
        return rename_free(self.formula, dict(zip(self.vars, args)))

    def to_json(self, k: int | None = None, n_args: int | None = None):
        text = render(self.formula)
        if k is not None and n_args is not None and self.vars == default_vars(k, n_args):
            return text
        return {"vars": list(self.vars), "formula": text}

    @classmethod
    def from_json(cls, data, sig: Signature | None, default: Sequence[str]) -> "Definition":
        if isinstance(data, str):
            return cls(tuple(default), parse_formula(data, sig))
        return cls(tuple(data["vars"]), parse_formula(data["formula"], sig))


# names produced by translation; composite parameters use the disjoint form p__p1
_RESERVED = re.compile(r"__k?\d+$")


def _tuple_vars(name: str, k: int) -> list[str]:
    return [f"{name}__{i}" for i in range(1, k + 1)]


def _const_vars(name: str, k: int) -> list[str]:
    return [f"{name}__k{i}" for i in range(1, k + 1)]


@dataclass(frozen=True)
class Interpretation:
    source: Signature
    target: Signature
    dimension: int
    domain: Definition
    equality: Definition
    relations: Mapping[str, Definition]
    constants: Mapping[str, Definition] = field(default_factory=dict)
    params: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        k = self.dimension
        if k < 1:
            raise InterpretationError("dimension must be >= 1")
        if len(self.domain.vars) != k:
            raise InterpretationError(f"domain formula needs {k} variables")
        if len(self.equality.vars) != 2 * k:
            raise InterpretationError(f"equality formula needs {2 * k} variables")
        src = self.source.arity
        if set(self.relations) != set(src):
            raise InterpretationError(
                f"relation formulas {sorted(self.relations)} do not match source {sorted(src)}")
        for name, d in self.relations.items():
            if len(d.vars) != src[name] * k:
                raise InterpretationError(f"{name} needs {src[name] * k} variables")
        if set(self.constants) != set(self.source.constants):
            raise InterpretationError("constant formulas do not match source constants")
        for name, d in self.constants.items():
            if len(d.vars) != k:
                raise InterpretationError(f"constant {name} needs {k} variables")
        for p in self.params:
            if _RESERVED.search(p) or p in self.target.constants:
                raise InterpretationError(f"bad parameter name {p!r}")
        allowed = set(self.target.constants) | set(self.params)
        for label, d in self.definitions():
            check_signature(d.formula, self.target)
            if len(set(d.vars)) != len(d.vars):
                raise InterpretationError(f"{label}: repeated variable")
            extra = free_names(d.formula) - set(d.vars) - allowed
            if extra:
                raise InterpretationError(f"{label}: unexpected free names {sorted(extra)}")

    def definitions(self):
        yield "domain", self.domain
        yield "equality", self.equality
        for name, d in sorted(self.relations.items()):
            yield f"relation {name}", d
        for name, d in sorted(self.constants.items()):
            yield f"constant {name}", d

    @classmethod
    def identity(cls, sig: Signature) -> "Interpretation":
        rels = {}
        for name, arity in sig.relations:
            vs = default_vars(1, arity)
            rels[name] = Definition(vs, Rel(name, vs))
        consts = {c: Definition(("x",), Eq("x", c)) for c in sig.constants}
        return cls(sig, sig, 1, Definition(("x",), Eq("x", "x")),
                   Definition(("x", "y"), Eq("x", "y")), rels, consts)

    @classmethod
    def build(cls, source: Signature, target: Signature, dimension: int, domain: str,
              equality: str, relations: Mapping[str, str],
              constants: Mapping[str, str] | None = None,
              params: Mapping[str, int] | Sequence[int] | None = None) -> "Interpretation":
        """Construct from formula strings written with the default variable names."""
        return cls.from_json({
            "dimension": dimension, "domain": domain, "equality": equality,
            "relations": dict(relations), "constants": dict(constants or {}),
            "params": params if params is not None else {},
        }, source=source, target=target)

    def with_params(self, params: Mapping[str, int]) -> "Interpretation":
        return replace(self, params=dict(params))

    def to_json(self) -> dict:
        k = self.dimension
        src = self.source.arity
        return {
            "source": str(self.source),
            "target": str(self.target),
            "dimension": k,
            "domain": self.domain.to_json(k, 1),
            "equality": self.equality.to_json(k, 2),
            "relations": {r: d.to_json(k, src[r]) for r, d in sorted(self.relations.items())},
            "constants": {c: d.to_json(k, 1) for c, d in sorted(self.constants.items())},
            "params": dict(sorted(self.params.items())),
        }

    @classmethod
    def from_json(cls, data: Mapping, source: Signature | None = None,
                  target: Signature | None = None) -> "Interpretation":
        """Load the interpretation file format.

        ``source``/``target`` keys (signature strings such as ``"E/2,c"``)
        override the arguments.  Without a source signature, relation arities
        are inferred from explicit variable lists or the default names used.
        A params list ``[a, b]`` names its entries ``p1, p2``.
        """
        try:
            if "target" in data:
                target = Signature.parse(data["target"])
            if target is None:
                raise InterpretationError("target signature unknown")
            if "source" in data:
                source = Signature.parse(data["source"])
            k = int(data["dimension"])
            rel_data = data.get("relations", {})
            const_data = data.get("constants", {})
            if source is None:
                source = Signature.of({r: _infer_arity(d, k, target) for r, d in rel_data.items()},
                                      const_data)
            arity = source.arity
            params = data.get("params", {}) or {}
            if not isinstance(params, Mapping):
                params = {f"p{i}": int(v) for i, v in enumerate(params, 1)}
            return cls(
                source, target, k,
                Definition.from_json(data["domain"], target, default_vars(k, 1)),
                Definition.from_json(data["equality"], target, default_vars(k, 2)),
                {r: Definition.from_json(d, target, default_vars(k, arity[r]))
                 for r, d in rel_data.items()},
                {c: Definition.from_json(d, target, default_vars(k, 1))
                 for c, d in const_data.items()},
                {str(p): int(v) for p, v in params.items()},
            )
        except (KeyError, TypeError) as exc:
            raise InterpretationError(f"malformed interpretation document: {exc}") from exc


def _infer_arity(d, k: int, target: Signature) -> int:
    if not isinstance(d, str):
        return len(d["vars"]) // k
    names = free_names(parse_formula(d, target))
    used = [j for j in range(len(ARG_LETTERS)) if set(arg_vars(j, k)) & names]
    if not used:
        raise InterpretationError(f"cannot infer arity of {d!r}; give a source signature")
    return max(used) + 1


# -- translation -------------------------------------------------------------

def translate(phi: Formula, I: Interpretation) -> Formula:
    """Relativise a source-language formula to the interpretation."""
    check_signature(phi, I.source)
    return _tr(phi, I, frozenset())


def _tr(f: Formula, I: Interpretation, bound: frozenset[str]) -> Formula:
    k = I.dimension
    if isinstance(f, (Rel, Eq)):
        args = f.args if isinstance(f, Rel) else (f.left, f.right)
        consts = []
        for a in args:
            if a not in bound and a in I.source.constants and a not in consts:
                consts.append(a)
        flat = []
        for a in args:
            flat += _const_vars(a, k) if a in consts else _tuple_vars(a, k)
        if isinstance(f, Rel):
            if f.name not in I.relations:
                raise InterpretationError(f"no translation for relation {f.name!r}")
            body = I.relations[f.name].instantiate(flat)
        else:
            body = I.equality.instantiate(flat)
        if not consts:
            return body
        witnesses, conds = [], []
        for c in consts:
            cv = _const_vars(c, k)
            witnesses += cv
            conds += [I.domain.instantiate(cv), I.constants[c].instantiate(cv)]
        return exists_many(witnesses, conj(*conds, body))
    if isinstance(f, Not):
        return Not(_tr(f.body, I, bound))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_tr(f.left, I, bound), _tr(f.right, I, bound))
    xs = _tuple_vars(f.var, k)
    inner = _tr(f.body, I, bound | {f.var})
    dom = I.domain.instantiate(xs)
    if isinstance(f, Exists):
        return exists_many(xs, And(dom, inner))
    return forall_many(xs, Implies(dom, inner))


def translate_assignment(assignment: Mapping[str, int], reps: Sequence[tuple[int, ...]],
                         params: Mapping[str, int] | None = None) -> dict[str, int]:
    """Turn an assignment into the interpreted structure into one for the host."""
    out = dict(params or {})
    for name, cls_ in assignment.items():
        for i, v in enumerate(reps[cls_], 1):
            out[f"{name}__{i}"] = v
    return out


# -- interpreted models ------------------------------------------------------

@dataclass
class InterpretedModel:
    structure: FinStructure
    tuples: list[tuple[int, ...]]            # domain tuples, lexicographic
    class_index: dict[tuple[int, ...], int]  # tuple -> class number
    reps: list[tuple[int, ...]]              # class number -> least tuple


def _check_host(I: Interpretation, M: FinStructure) -> None:
    arity = M.arities
    for name, n in I.target.relations:
        if arity.get(name) != n:
            raise SignatureError(f"host structure lacks relation {name}/{n}")
    for c in I.target.constants:
        if c not in M.constants:
            raise SignatureError(f"host structure lacks constant {c}")


def interpret(I: Interpretation, M: FinStructure,
              params: Mapping[str, int] | None = None) -> InterpretedModel:
    """Build the interpreted quotient structure, validating every side condition."""
    _check_host(I, M)
    k = I.dimension
    env = base_env(M, I.params if params is None else params)

    def holds(defn: Definition):
        fn = compile_formula(M, defn.formula)
        names = defn.vars

        def test(values):
            env.update(zip(names, values))
            return fn(env)
        return test

    in_dom = holds(I.domain)
    tuples = [t for t in itertools.product(range(M.size), repeat=k) if in_dom(t)]
    if not tuples:
        raise EmptyDomainError("domain formula defines the empty set")
    same = holds(I.equality)
    idx = {t: i for i, t in enumerate(tuples)}
    pairs = [(i, j) for i, s in enumerate(tuples) for j, t in enumerate(tuples) if same(s + t)]
    eq = EqRelation(pairs, range(len(tuples)))
    problems = eq.problems()
    if problems:
        shown = [_describe(p, tuples) for p in problems[:3]]
        raise NotEquivalenceOnDomain("equality formula is not an equivalence on the domain: "
                                     + "; ".join(shown))
    classes = eq.classes()
    cls_of = {}
    for c, members in enumerate(classes):
        for i in members:
            cls_of[tuples[i]] = c
    reps = [tuples[members[0]] for members in classes]

    rels = {}
    for name, arity in I.source.relations:
        test = holds(I.relations[name])
        table = set()
        verdict: dict[tuple[int, ...], bool] = {}
        for combo in itertools.product(tuples, repeat=arity):
            key = tuple(cls_of[t] for t in combo)
            val = test(tuple(itertools.chain.from_iterable(combo)))
            old = verdict.setdefault(key, val)
            if old != val:
                raise NotCongruenceOnDomain(
                    f"{name} is not well defined modulo equality at classes {key}")
            if val:
                table.add(key)
        rels[name] = frozenset(table)
    consts = {}
    for name in I.source.constants:
        test = holds(I.constants[name])
        hits = {cls_of[t] for t in tuples if test(t)}
        if len(hits) != 1:
            raise NotCongruenceOnDomain(f"constant {name} picks {len(hits)} classes, not 1")
        c, = hits
        if not all(test(tuples[i]) for i in classes[c]):
            raise NotCongruenceOnDomain(f"constant {name} does not pick a whole class")
        consts[name] = c
    structure = FinStructure(len(classes), rels, dict(I.source.arity), consts)
    return InterpretedModel(structure, tuples, cls_of, reps)


def _describe(problem: str, tuples) -> str:
    return problem + " (indices into " + str(tuples[:6]) + ("...)" if len(tuples) > 6 else ")")


def apply(I: Interpretation, M: FinStructure,
          params: Mapping[str, int] | None = None) -> tuple[FinStructure, list[tuple[int, ...]]]:
    """The interpreted structure and, per class, its lexicographically least tuple."""
    im = interpret(I, M, params)
    return im.structure, im.reps


# -- composition -------------------------------------------------------------

def compose(I: Interpretation, J: Interpretation, M: FinStructure | None = None) -> Interpretation:
    """The interpretation that runs ``J`` first and then ``I`` inside its result.

    ``apply(compose(I, J), M)`` is isomorphic to ``apply(I, apply(J, M)[0])``.
    Parameters of ``I`` name elements of ``apply(J, M)``; resolving them needs
    ``M``.
    """
    for name, n in I.target.relations:
        if J.source.arity.get(name) != n:
            raise SignatureError(f"outer interpretation uses {name}/{n}, absent from inner source")
    for c in I.target.constants:
        if c not in J.source.constants:
            raise SignatureError(f"outer interpretation uses constant {c}, absent from inner source")
    params = dict(J.params)
    if I.params:
        if M is None:
            raise InterpretationError("outer interpretation has parameters; pass the host structure")
        _, reps = apply(J, M)
        for p, e in I.params.items():
            if not 0 <= e < len(reps):
                raise InterpretationError(f"parameter {p}={e} outside interpreted domain")
            for i, v in enumerate(reps[e], 1):
                params[f"{p}__p{i}"] = v
    kj = J.dimension

    def lift(d: Definition) -> Definition:
        flat = tuple(v for x in d.vars for v in _tuple_vars(x, kj))
        guards = [J.domain.instantiate(_tuple_vars(x, kj)) for x in d.vars]
        body = _tr(d.formula, J, frozenset())
        # free parameters of I were expanded like variables; point them at their own names
        body = rename_free(body, {f"{p}__{i}": f"{p}__p{i}" for p in I.params
                                  for i in range(1, kj + 1)})
        return Definition(flat, conj(*guards, body))

    return Interpretation(
        I.source, J.target, I.dimension * kj,
        lift(I.domain), lift(I.equality),
        {r: lift(d) for r, d in I.relations.items()},
        {c: lift(d) for c, d in I.constants.items()},
        params,
    )


# -- theories ----------------------------------------------------------------

@dataclass(frozen=True)
class Theory:
    name: str
    signature: Signature
    axioms: tuple[Formula, ...]

    def __post_init__(self):
        for ax in self.axioms:
            check_signature(ax, self.signature)
            free = free_variables(ax, self.signature)
            if free:
                raise InterpretationError(f"axiom {render(ax)} has free variables {sorted(free)}")

    @classmethod
    def parse(cls, name: str, signature: Signature, axioms: Sequence[str]) -> "Theory":
        return cls(name, signature, tuple(parse_formula(a, signature) for a in axioms))

    def to_json(self) -> dict:
        return {"name": self.name, "signature": str(self.signature),
                "axioms": [render(a) for a in self.axioms]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Theory":
        sig = Signature.parse(data.get("signature", ""))
        return cls.parse(data.get("name", "T"), sig, data.get("axioms", []))


def models(M: FinStructure, T: Theory) -> bool:
    return all(evaluate(M, ax) for ax in T.axioms)


@dataclass
class AxiomCheck:
    axiom: str
    translated: str
    holds: bool


@dataclass
class TheoryReport:
    theory: str
    checks: list[AxiomCheck]

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)


def check_theory_interpretation(I: Interpretation, T: Theory, M: FinStructure) -> TheoryReport:
    """Evaluate the translation of every axiom of ``T`` in the host ``M``."""
    checks = []
    for ax in T.axioms:
        tr = translate(ax, I)
        checks.append(AxiomCheck(render(ax), render(tr), evaluate(M, tr, I.params)))
    return TheoryReport(T.name, checks)


def theory_disjunction(T1: Theory, T2: Theory) -> Theory:
    """All pairwise disjunctions; its models are the models of T1 together with those of T2."""
    if T1.signature != T2.signature:
        raise SignatureError("theories have different signatures")
    return Theory(f"({T1.name} or {T2.name})", T1.signature,
                  tuple(Or(a, b) for a in T1.axioms for b in T2.axioms))


# -- mutual and bi-interpretation --------------------------------------------

@dataclass(frozen=True)
class BiInterpretation:
    """``I`` interprets M inside N, ``J`` interprets N inside M.

    ``iso_source`` is a formula over M relating a point ``x`` to the
    ``kI * kJ``-tuples that code it in M-bar; ``iso_target`` likewise over N.
    """

    I: Interpretation
    J: Interpretation
    iso_source: Definition
    iso_target: Definition

    def __post_init__(self):
        K = self.I.dimension * self.J.dimension
        if len(self.iso_source.vars) != 1 + K or len(self.iso_target.vars) != 1 + K:
            raise InterpretationError(f"isomorphism formulas need {1 + K} variables")

    @staticmethod
    def default_iso_vars(K: int) -> tuple[str, ...]:
        return ("x", *arg_vars(1, K))

    def to_json(self) -> dict:
        K = self.I.dimension * self.J.dimension
        dv = self.default_iso_vars(K)

        def iso(d):
            text = render(d.formula)
            return text if d.vars == dv else {"vars": list(d.vars), "formula": text}
        return {"I": self.I.to_json(), "J": self.J.to_json(),
                "iso_source": iso(self.iso_source), "iso_target": iso(self.iso_target)}

    @classmethod
    def from_json(cls, data: Mapping, m_sig: Signature | None = None,
                  n_sig: Signature | None = None) -> "BiInterpretation":
        I = Interpretation.from_json(data["I"], source=m_sig, target=n_sig)
        J = Interpretation.from_json(data["J"], source=n_sig, target=m_sig)
        dv = cls.default_iso_vars(I.dimension * J.dimension)
        return cls(I, J, Definition.from_json(data["iso_source"], J.target, dv),
                   Definition.from_json(data["iso_target"], I.target, dv))


@dataclass
class MutualReport:
    n_in_m: bool                    # apply(J, M) is isomorphic to N
    m_in_n: bool                    # apply(I, N) is isomorphic to M
    j_witness: tuple[int, ...] | None = None   # N -> apply(J, M)
    i_witness: tuple[int, ...] | None = None   # M -> apply(I, N)
    m_bar: FinStructure | None = None
    n_bar: FinStructure | None = None
    m_bar_iso: bool | None = None
    n_bar_iso: bool | None = None
    errors: list[str] = field(default_factory=list)

    @property
    def mutual(self) -> bool:
        return self.n_in_m and self.m_in_n


def _try_apply(I, M, errors, label, params=None):
    try:
        return interpret(I, M, params)
    except (InterpretationError, StructureError, SignatureError) as exc:
        errors.append(f"{label}: {exc}")
        return None


def _transport(I: Interpretation, witness: Sequence[int] | None) -> Interpretation:
    if not I.params or witness is None:
        return I
    return I.with_params({p: witness[e] for p, e in I.params.items()})


def check_mutual(M: FinStructure, N: FinStructure, I: Interpretation, J: Interpretation,
                 cap: int = DEFAULT_ISO_CAP) -> MutualReport:
    """Check that J interprets N in M and I interprets M in N, and build M-bar and N-bar.

    Parameters are fixed elements of the structure an interpretation was
    written for; when iterating they are carried along the first oracle
    isomorphism.
    """
    errors: list[str] = []
    nj = _try_apply(J, M, errors, "J on M")
    mi = _try_apply(I, N, errors, "I on N")
    rep = MutualReport(False, False, errors=errors)
    if nj is not None:
        isos = find_isomorphisms(N, nj.structure, cap=cap, limit=1)
        rep.n_in_m = bool(isos)
        rep.j_witness = isos[0] if isos else None
    if mi is not None:
        isos = find_isomorphisms(M, mi.structure, cap=cap, limit=1)
        rep.m_in_n = bool(isos)
        rep.i_witness = isos[0] if isos else None
    if nj is not None and (rep.j_witness is not None or not I.params):
        mb = _try_apply(_transport(I, rep.j_witness), nj.structure, errors, "I on apply(J, M)")
        if mb is not None:
            rep.m_bar = mb.structure
            rep.m_bar_iso = bool(find_isomorphisms(M, mb.structure, cap=cap, limit=1))
    if mi is not None and (rep.i_witness is not None or not J.params):
        nb = _try_apply(_transport(J, rep.i_witness), mi.structure, errors, "J on apply(I, N)")
        if nb is not None:
            rep.n_bar = nb.structure
            rep.n_bar_iso = bool(find_isomorphisms(N, nb.structure, cap=cap, limit=1))
    return rep


@dataclass
class BiReport:
    holds: bool
    mutual: MutualReport
    source_map: list[int] | None = None   # point of M -> class of M-bar
    target_map: list[int] | None = None
    diagnostics: list[str] = field(default_factory=list)


def is_isomorphism(A: FinStructure, B: FinStructure, f: Sequence[int]) -> bool:
    if A.size != B.size or sorted(f) != list(range(B.size)):
        return False
    if dict(A.arities) != dict(B.arities):
        return False
    for name, table in A.relations.items():
        if {tuple(f[v] for v in t) for t in table} != set(B.relations[name]):
            return False
    return all(f[A.constants[c]] == B.constants.get(c) for c in A.constants)


def _iso_side(host: FinStructure, outer: Interpretation, inner: Interpretation,
              witness, iso: Definition, label: str, diags: list[str]) -> list[int] | None:
    composite = compose(_transport(outer, witness), inner, host)
    im = interpret(composite, host)
    fn = compile_formula(host, iso.formula)
    env = base_env(host, composite.params)
    point, coords = iso.vars[0], iso.vars[1:]
    f = []
    for x in range(host.size):
        env[point] = x
        hit = set()
        for t in im.tuples:
            env.update(zip(coords, t))
            if fn(env):
                hit.add(im.class_index[t])
        if len(hit) != 1:
            diags.append(f"{label}: point {x} is related to {len(hit)} classes")
            return None
        f.append(hit.pop())
    if not is_isomorphism(host, im.structure, f):
        diags.append(f"{label}: defined map {f} is not an isomorphism onto the double interpretation")
        return None
    return f


def bi_report(B: BiInterpretation, M: FinStructure, N: FinStructure,
              cap: int = DEFAULT_ISO_CAP) -> BiReport:
    mut = check_mutual(M, N, B.I, B.J, cap=cap)
    rep = BiReport(False, mut)
    if not mut.mutual:
        rep.diagnostics.append("not a mutual interpretation")
        rep.diagnostics += mut.errors
        return rep
    try:
        rep.source_map = _iso_side(M, B.I, B.J, mut.j_witness, B.iso_source, "source", rep.diagnostics)
        rep.target_map = _iso_side(N, B.J, B.I, mut.i_witness, B.iso_target, "target", rep.diagnostics)
    except (InterpretationError, StructureError, SignatureError) as exc:
        rep.diagnostics.append(str(exc))
        return rep
    rep.holds = rep.source_map is not None and rep.target_map is not None
    return rep


def check_bi(B: BiInterpretation, M: FinStructure, N: FinStructure,
             cap: int = DEFAULT_ISO_CAP) -> bool:
    """Both isomorphism formulas define isomorphisms onto the double interpretations."""
    return bi_report(B, M, N, cap).holds


def _is_trivial_on(I: Interpretation, host: FinStructure) -> bool:
    if I.dimension != 1:
        return False
    im = interpret(I, host)
    return len(im.tuples) == host.size and im.structure.size == host.size


def check_synonymy(B: BiInterpretation, M: FinStructure, N: FinStructure,
                   cap: int = DEFAULT_ISO_CAP) -> bool:
    """A bi-interpretation using full domains and identity equality on both sides."""
    if B.I.dimension != 1 or B.J.dimension != 1:
        return False
    if not check_bi(B, M, N, cap):
        return False
    return _is_trivial_on(B.J, M) and _is_trivial_on(B.I, N)


# -- Scott reduction ---------------------------------------------------------

def membership_ranks(M: FinStructure, membership: str = "E") -> list[int]:
    table = M.relations[membership]
    preds: dict[int, list[int]] = {v: [] for v in range(M.size)}
    for a, b in table:
        preds[b].append(a)
    rank: dict[int, int] = {}

    def r(v, stack=()):
        if v not in rank:
            if v in stack:
                raise InterpretationError("membership relation is not well-founded")
            rank[v] = 1 + max((r(u, stack + (v,)) for u in preds[v]), default=-1)
        return rank[v]
    return [r(v) for v in range(M.size)]


@dataclass
class ScottClass:
    members: tuple[int, ...]
    minimal: tuple[int, ...]
    code: int | None   # element of M whose members are exactly ``minimal``


def scott_classes(I: Interpretation, M: FinStructure, membership: str = "E") -> list[ScottClass]:
    """Per equality class, its members of least rank and the element coding them, if any."""
    if I.dimension != 1:
        raise InterpretationError("Scott reduction works on one-dimensional interpretations")
    _require_set_structure(M, membership)
    ranks = membership_ranks(M, membership)
    im = interpret(I, M)
    members: dict[int, list[int]] = {}
    for t, c in im.class_index.items():
        members.setdefault(c, []).append(t[0])
    preds: dict[int, set[int]] = {v: set() for v in range(M.size)}
    for a, b in M.relations[membership]:
        preds[b].add(a)
    by_preds = {frozenset(p): v for v, p in preds.items()}
    out = []
    for c in range(im.structure.size):
        mem = sorted(members[c])
        low = min(ranks[v] for v in mem)
        minimal = tuple(v for v in mem if ranks[v] == low)
        out.append(ScottClass(tuple(mem), minimal, by_preds.get(frozenset(minimal))))
    return out


def _require_set_structure(M: FinStructure, membership: str) -> None:
    if M.arities.get(membership) != 2:
        raise InterpretationError(f"host needs a binary membership relation {membership!r}")
    table = M.relations[membership]
    if not is_wellfounded(table, M.size):
        raise InterpretationError("membership relation is not well-founded")
    if not is_extensional(table, n=M.size):
        raise InterpretationError("membership relation is not extensional")


def scott_reduce(I: Interpretation, M: FinStructure, membership: str = "E") -> Interpretation:
    """Replace equality classes by their Scott classes, coded as elements of ``M``.

    The new domain is the set of elements ``s`` of ``M`` whose members are
    exactly the least-rank members of one class; equality becomes identity.
    Rank comparison is written out up to the height of ``M``.  Raises
    :class:`ScottClassMissing` when some Scott class is not an element of ``M``.
    """
    classes = scott_classes(I, M, membership)
    missing = [sc.minimal for sc in classes if sc.code is None]
    if missing:
        raise ScottClassMissing(f"Scott classes {missing} are not elements of the host")
    height = max(membership_ranks(M, membership), default=0)
    taken = set(I.params) | set(I.target.constants)
    for _, d in I.definitions():
        taken |= all_names(d.formula)

    def new(base):
        name = fresh_name(base, taken)
        taken.add(name)
        return name

    s, t, y, z, w = (new(b) for b in ("s", "t", "y", "z", "w"))
    level = [new(f"r{i}") for i in range(height + 1)]

    def mem(a, b):
        return Rel(membership, (a, b))

    def rank_le(r: int, x: str) -> Formula:
        v = level[r]
        if r == 0:
            return Forall(v, Not(mem(v, x)))
        return Forall(v, Implies(mem(v, x), rank_le(r - 1, v)))

    def rank_lt(a: str, b: str) -> Formula:
        if height == 0:
            return Not(Eq(a, a))
        return disj(*(And(rank_le(r, a), Not(rank_le(r, b))) for r in range(height)))

    U = I.domain.instantiate
    same = I.equality.instantiate

    def minimal(a: str, b: str) -> Formula:
        return And(U([a]), Forall(b, Implies(And(U([b]), same([b, a])), Not(rank_lt(b, a)))))

    domain = conj(
        Exists(y, mem(y, s)),
        Forall(y, Implies(mem(y, s), minimal(y, z))),
        Forall(y, Forall(z, Implies(And(mem(y, s), mem(z, s)), same([y, z])))),
        Forall(y, Implies(And(minimal(y, w), Exists(z, And(mem(z, s), same([z, y])))), mem(y, s))),
    )
    rels = {}
    for name, arity in I.source.relations:
        codes = [new(f"c{j}") for j in range(arity)]
        elems = [new(f"e{j}") for j in range(arity)]
        body = conj(*(mem(e, c) for e, c in zip(elems, codes)), I.relations[name].instantiate(elems))
        rels[name] = Definition(tuple(codes), exists_many(elems, body))
    consts = {c: Definition((s,), Exists(y, And(mem(y, s), d.instantiate([y]))))
              for c, d in I.constants.items()}
    return Interpretation(I.source, I.target, 1, Definition((s,), domain),
                          Definition((s, t), Eq(s, t)), rels, consts, dict(I.params))


# -- bounded search ----------------------------------------------------------

def interpretable_in(target: FinStructure, host: FinStructure, depth: int,
                     params: Sequence[int] = (), cap: int = DEFAULT_ISO_CAP,
                     max_formulas: int = 1_000_000):
    """Search one-dimensional interpretations of ``target`` in ``host``.

    Domains, equalities and relations range over relations definable with
    formulas of depth <= ``depth``.  Returns the first witness found as
    ``(domain, equality, relations)`` extensions, or None.
    """
    from .logic import definable_relations

    unary = sorted(definable_relations(host, 1, depth, params, max_formulas), key=sorted)
    binary = sorted(definable_relations(host, 2, depth, params, max_formulas), key=sorted)
    by_arity = {a: sorted(definable_relations(host, a, depth, params, max_formulas), key=sorted)
                for a in set(target.arities.values())}
    if target.constants:
        raise InterpretationError("bounded search supports relational targets only")
    for dom in unary:
        elems = sorted(t[0] for t in dom)
        if not elems:
            continue
        for eqrel in binary:
            eq = EqRelation([(a, b) for a, b in eqrel if (a,) in dom and (b,) in dom], elems)
            if not eq.is_equivalence() or len(eq.classes()) != target.size:
                continue
            classes = eq.classes()
            cls_of = {a: i for i, c in enumerate(classes) for a in c}
            names = sorted(target.arities)
            for choice in itertools.product(*(by_arity[target.arities[r]] for r in names)):
                tables = {}
                ok = True
                for r, ext in zip(names, choice):
                    verdict = {}
                    for combo in itertools.product(elems, repeat=target.arities[r]):
                        key = tuple(cls_of[a] for a in combo)
                        if verdict.setdefault(key, combo in ext) != (combo in ext):
                            ok = False
                            break
                    if not ok:
                        break
                    tables[r] = frozenset(k for k, v in verdict.items() if v)
                if not ok:
                    continue
                candidate = FinStructure(len(classes), tables, dict(target.arities), {})
                if find_isomorphisms(target, candidate, cap=cap, limit=1):
                    return dom, eqrel, dict(zip(names, choice))
    return None
