"""First-order syntax over relational signatures, with Tarskian evaluation.

Formulas use the concrete grammar::

    phi ::= "A" var "." phi | "E" var "." phi | "~" phi
          | "(" phi "&" phi ")" | "(" phi "|" phi ")" | "(" phi "->" phi ")"
          | rel "(" var {"," var} ")" | var "=" var

Terms are bare names.  A name is resolved at evaluation time: a bound or
assigned variable wins, otherwise a constant of the structure is used.  So a
quantifier over ``c`` shadows the constant ``c`` inside its scope.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TYPE_CHECKING

if TYPE_CHECKING:
    from .structures import FinStructure


class LogicError(Exception):
    pass


class ParseError(LogicError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class SignatureError(LogicError):
    pass


class EvaluationError(LogicError):
    pass


class ResourceLimitError(LogicError):
    pass


NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")


@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities plus constant symbols."""

    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = [r for r, _ in self.relations] + list(self.constants)
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate symbol in signature: {names}")
        for name, arity in self.relations:
            if not NAME_RE.fullmatch(name):
                raise SignatureError(f"bad relation name {name!r}")
            if arity < 1:
                raise SignatureError(f"relation {name} must have arity >= 1")
        for name in self.constants:
            if not NAME_RE.fullmatch(name):
                raise SignatureError(f"bad constant name {name!r}")

    @classmethod
    def of(cls, relations: Mapping[str, int] | None = None,
           constants: Iterable[str] = ()) -> "Signature":
        rels = tuple(sorted((relations or {}).items()))
        return cls(rels, tuple(sorted(constants)))

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Parse ``"E/2,R/1,c"``: ``name/arity`` is a relation, a bare name a constant."""
        rels: list[tuple[str, int]] = []
        consts = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "/" in part:
                name, arity = part.split("/", 1)
                try:
                    rels.append((name.strip(), int(arity)))
                except ValueError as exc:
                    raise SignatureError(f"bad arity in {part!r}") from exc
            else:
                consts.append(part)
        return cls(tuple(sorted(rels)), tuple(sorted(consts)))

    @property
    def arity(self) -> dict[str, int]:
        return dict(self.relations)

    def __str__(self):
        parts = [f"{r}/{a}" for r, a in self.relations] + list(self.constants)
        return ",".join(parts)


# -- abstract syntax ---------------------------------------------------------

class Formula:
    __slots__ = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


BINARY = {And: "&", Or: "|", Implies: "->"}
QUANTIFIERS = {Exists: "E", Forall: "A"}


def conj(*parts: Formula) -> Formula:
    """Right-nested conjunction; a single part is returned unchanged."""
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(*parts: Formula) -> Formula:
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def exists_many(names: Sequence[str], body: Formula) -> Formula:
    for v in reversed(names):
        body = Exists(v, body)
    return body


def forall_many(names: Sequence[str], body: Formula) -> Formula:
    for v in reversed(names):
        body = Forall(v, body)
    return body


def depth(phi: Formula) -> int:
    """Number of binary connectives and quantifiers; negation is free."""
    if isinstance(phi, (Rel, Eq)):
        return 0
    if isinstance(phi, Not):
        return depth(phi.body)
    if isinstance(phi, (Exists, Forall)):
        return 1 + depth(phi.body)
    return 1 + depth(phi.left) + depth(phi.right)


def size(phi: Formula) -> int:
    """Total node count."""
    if isinstance(phi, (Rel, Eq)):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.body)
    if isinstance(phi, (Exists, Forall)):
        return 1 + size(phi.body)
    return 1 + size(phi.left) + size(phi.right)


def free_names(phi: Formula) -> frozenset[str]:
    """Names occurring free; includes constant symbols, which are names too."""
    if isinstance(phi, Rel):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Not):
        return free_names(phi.body)
    if isinstance(phi, (Exists, Forall)):
        return free_names(phi.body) - {phi.var}
    return free_names(phi.left) | free_names(phi.right)


def free_variables(phi: Formula, sig: Signature | None = None) -> frozenset[str]:
    consts = set(sig.constants) if sig else set()
    return frozenset(n for n in free_names(phi) if n not in consts)


def all_names(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Rel):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Not):
        return all_names(phi.body)
    if isinstance(phi, (Exists, Forall)):
        return all_names(phi.body) | {phi.var}
    return all_names(phi.left) | all_names(phi.right)


def relation_symbols(phi: Formula) -> dict[str, int]:
    out: dict[str, int] = {}
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Rel):
            out[f.name] = len(f.args)
        elif isinstance(f, Not):
            stack.append(f.body)
        elif isinstance(f, (Exists, Forall)):
            stack.append(f.body)
        elif isinstance(f, (And, Or, Implies)):
            stack += [f.left, f.right]
    return out


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    for i in itertools.count(1):
        cand = f"{base}_{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def rename_free(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Capture-avoiding simultaneous substitution of names for free names."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return phi
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, Not):
        return Not(rename_free(phi.body, mapping))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(rename_free(phi.left, mapping), rename_free(phi.right, mapping))
    # quantifier
    inner = {k: v for k, v in mapping.items() if k != phi.var}
    body_free = free_names(phi.body)
    inner = {k: v for k, v in inner.items() if k in body_free}
    var, body = phi.var, phi.body
    if var in inner.values():
        new = fresh_name(var, all_names(body) | set(inner.values()) | set(inner))
        body = rename_free(body, {var: new})
        var = new
    return type(phi)(var, rename_free(body, inner))


def alpha_equivalent(a: Formula, b: Formula) -> bool:
    return _alpha(a, b, {}, {})


def _alpha(a, b, env_a, env_b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Rel):
        return a.name == b.name and len(a.args) == len(b.args) and all(
            env_a.get(x, ("free", x)) == env_b.get(y, ("free", y)) for x, y in zip(a.args, b.args))
    if isinstance(a, Eq):
        return (env_a.get(a.left, ("free", a.left)) == env_b.get(b.left, ("free", b.left))
                and env_a.get(a.right, ("free", a.right)) == env_b.get(b.right, ("free", b.right)))
    if isinstance(a, Not):
        return _alpha(a.body, b.body, env_a, env_b)
    if isinstance(a, (Exists, Forall)):
        marker = ("bound", len(env_a), id(a))
        return _alpha(a.body, b.body, {**env_a, a.var: marker}, {**env_b, b.var: marker})
    return _alpha(a.left, b.left, env_a, env_b) and _alpha(a.right, b.right, env_a, env_b)


# -- rendering and parsing ---------------------------------------------------

def render(phi: Formula) -> str:
    if isinstance(phi, Rel):
        return f"{phi.name}({','.join(phi.args)})"
    if isinstance(phi, Eq):
        return f"{phi.left}={phi.right}"
    if isinstance(phi, Not):
        return "~" + render(phi.body)
    if isinstance(phi, (Exists, Forall)):
        return f"{QUANTIFIERS[type(phi)]}{phi.var}.{render(phi.body)}"
    return f"({render(phi.left)} {BINARY[type(phi)]} {render(phi.right)})"


class _Parser:
    def __init__(self, text: str, sig: Signature | None):
        self.text = text
        self.pos = 0
        self.arity = sig.arity if sig is not None else None

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, tok: str):
        self.skip()
        if not self.text.startswith(tok, self.pos):
            raise ParseError(f"expected {tok!r}", self.pos)
        self.pos += len(tok)

    def name(self) -> str:
        self.skip()
        m = NAME_RE.match(self.text, self.pos)
        if not m:
            raise ParseError("expected a name", self.pos)
        self.pos = m.end()
        return m.group()

    def formula(self) -> Formula:
        c = self.peek()
        if c == "~":
            self.pos += 1
            return Not(self.formula())
        if c == "(":
            start = self.pos
            self.pos += 1
            left = self.formula()
            c = self.peek()
            if c == ")":
                self.pos += 1
                return left
            for tok, cls in (("->", Implies), ("&", And), ("|", Or)):
                if self.text.startswith(tok, self.pos):
                    self.pos += len(tok)
                    right = self.formula()
                    self.expect(")")
                    return cls(left, right)
            raise ParseError(f"expected connective in group opened at {start}", self.pos)
        start = self.pos
        ident = self.name()
        c = self.peek()
        if c == "(":
            self.pos += 1
            args = [self.name()]
            while self.peek() == ",":
                self.pos += 1
                args.append(self.name())
            self.expect(")")
            if self.arity is not None:
                if ident not in self.arity:
                    raise ParseError(f"unknown relation symbol {ident!r}", start)
                if self.arity[ident] != len(args):
                    raise ParseError(
                        f"relation {ident} has arity {self.arity[ident]}, got {len(args)}", start)
            return Rel(ident, tuple(args))
        if c == "=":
            self.pos += 1
            return Eq(ident, self.name())
        if ident in ("A", "E") and NAME_RE.match(c or "-"):
            var = self.name()
            self.expect(".")
            return self._quant(ident, var)
        if ident[0] in "AE" and len(ident) > 1 and c == ".":
            self.pos += 1
            return self._quant(ident[0], ident[1:])
        raise ParseError(f"unexpected token after {ident!r}", self.pos)

    def _quant(self, q: str, var: str) -> Formula:
        body = self.formula()
        return Exists(var, body) if q == "E" else Forall(var, body)


def parse_formula(text: str, sig: Signature | None = None) -> Formula:
    """Parse formula text; with a signature, relation symbols and arities are checked."""
    p = _Parser(text, sig)
    phi = p.formula()
    p.skip()
    if p.pos != len(text):
        raise ParseError("trailing input", p.pos)
    return phi


def check_signature(phi: Formula, sig: Signature) -> None:
    arity = sig.arity
    for name, n in relation_symbols(phi).items():
        if name not in arity:
            raise SignatureError(f"unknown relation symbol {name!r}")
        if arity[name] != n:
            raise SignatureError(f"relation {name} has arity {arity[name]}, used with {n}")


# -- evaluation --------------------------------------------------------------

Env = dict
Compiled = Callable[[Env], bool]


def compile_formula(M: "FinStructure", phi: Formula) -> Compiled:
    """Close ``phi`` over the tables of ``M``; the result evaluates under an env dict.

    The env maps names to elements and must already contain the constants of
    ``M`` (see :func:`base_env`).  Quantifiers rebind in place and restore.
    """
    dom = range(M.size)
    tables = M.relations

    def comp(f: Formula) -> Compiled:
        if isinstance(f, Rel):
            if f.name not in tables:
                raise EvaluationError(f"relation {f.name!r} not interpreted in structure")
            table = tables[f.name]
            args = f.args
            if len(args) == 1:
                a0, = args
                return lambda env: (env[a0],) in table
            if len(args) == 2:
                a0, a1 = args
                return lambda env: (env[a0], env[a1]) in table
            return lambda env: tuple(env[a] for a in args) in table
        if isinstance(f, Eq):
            l, r = f.left, f.right
            return lambda env: env[l] == env[r]
        if isinstance(f, Not):
            b = comp(f.body)
            return lambda env: not b(env)
        if isinstance(f, And):
            l, r = comp(f.left), comp(f.right)
            return lambda env: l(env) and r(env)
        if isinstance(f, Or):
            l, r = comp(f.left), comp(f.right)
            return lambda env: l(env) or r(env)
        if isinstance(f, Implies):
            l, r = comp(f.left), comp(f.right)
            return lambda env: (not l(env)) or r(env)
        var = f.var
        b = comp(f.body)
        want = isinstance(f, Exists)

        def quant(env):
            missing = var not in env
            old = env.get(var)
            result = not want
            for v in dom:
                env[var] = v
                if b(env) == want:
                    result = want
                    break
            if missing:
                del env[var]
            else:
                env[var] = old
            return result
        return quant

    return comp(phi)


def base_env(M: "FinStructure", assignment: Mapping[str, int] | None = None) -> Env:
    env = dict(M.constants)
    if assignment:
        for k, v in assignment.items():
            if not 0 <= v < M.size:
                raise EvaluationError(f"{k} assigned {v}, outside domain of size {M.size}")
            env[k] = v
    return env


def evaluate(M: "FinStructure", phi: Formula, assignment: Mapping[str, int] | None = None) -> bool:
    env = base_env(M, assignment)
    missing = free_names(phi) - set(env)
    if missing:
        raise EvaluationError(f"uncovered free variables: {sorted(missing)}")
    for name, n in relation_symbols(phi).items():
        if name not in M.relations:
            raise EvaluationError(f"relation {name!r} not interpreted in structure")
        if M.arities[name] != n:
            raise EvaluationError(f"relation {name} has arity {M.arities[name]}, used with {n}")
    return compile_formula(M, phi)(env)


def extension(M: "FinStructure", phi: Formula, variables: Sequence[str],
              assignment: Mapping[str, int] | None = None) -> frozenset[tuple[int, ...]]:
    """All tuples over ``variables`` satisfying ``phi`` in ``M``."""
    env = base_env(M, assignment)
    missing = free_names(phi) - set(env) - set(variables)
    if missing:
        raise EvaluationError(f"uncovered free variables: {sorted(missing)}")
    fn = compile_formula(M, phi)
    out = []
    for tup in itertools.product(range(M.size), repeat=len(variables)):
        env.update(zip(variables, tup))
        if fn(env):
            out.append(tup)
    return frozenset(out)


# -- definable relations -----------------------------------------------------

@dataclass
class _Space:
    """Bitmask encoding of subsets of D^m; tuple t sits at bit sum(t[c] * n**c)."""

    n: int
    m: int
    full: int = field(init=False)
    coord_masks: list[list[int]] = field(init=False)

    def __post_init__(self):
        total = self.n ** self.m
        self.full = (1 << total) - 1
        self.coord_masks = []
        for c in range(self.m):
            masks = [0] * self.n
            for idx, tup in enumerate(self.tuples()):
                masks[tup[c]] |= 1 << idx
            self.coord_masks.append(masks)

    def tuples(self) -> Iterator[tuple[int, ...]]:
        # index order: coordinate 0 varies fastest
        for rev in itertools.product(range(self.n), repeat=self.m):
            yield tuple(reversed(rev))

    def exists(self, x: int, c: int) -> int:
        stride = self.n ** c
        masks = self.coord_masks[c]
        z = 0
        for v in range(self.n):
            z |= (x & masks[v]) >> (v * stride)
        out = 0
        for v in range(self.n):
            out |= z << (v * stride)
        return out

    def forall(self, x: int, c: int) -> int:
        return self.full ^ self.exists(self.full ^ x, c)


def definable_relations(M: "FinStructure", arity: int, depth_bound: int,
                        params: Sequence[int] = (), max_formulas: int = 1_000_000
                        ) -> set[frozenset[tuple[int, ...]]]:
    """Relations of the given arity defined by formulas of depth <= ``depth_bound``.

    Works on extensions rather than syntax: formulas of depth d mention at most
    d bound variables, so a pool of ``arity + depth_bound`` variables realises
    every formula up to renaming.  Level d collects extensions of formulas of
    depth exactly d; negation does not raise the level.  Parameters act as
    extra constant terms.  ``max_formulas`` caps the number of candidate
    formulas combined.
    """
    if arity < 1:
        raise ValueError("arity must be >= 1")
    m = arity + depth_bound
    space = _Space(M.size, m)
    terms: list[tuple[str, int]] = [("v", c) for c in range(m)]
    terms += [("k", v) for v in sorted(set(M.constants.values()) | set(params))]
    tuples = list(space.tuples())

    def term_val(term, tup):
        kind, x = term
        return tup[x] if kind == "v" else x

    budget = [max_formulas]

    def spend(k=1):
        budget[0] -= k
        if budget[0] < 0:
            raise ResourceLimitError(f"more than {max_formulas} candidate formulas enumerated")

    atoms: set[int] = set()
    for t1, t2 in itertools.product(terms, repeat=2):
        spend()
        atoms.add(sum(1 << i for i, tup in enumerate(tuples)
                      if term_val(t1, tup) == term_val(t2, tup)))
    for name, table in sorted(M.relations.items()):
        for args in itertools.product(terms, repeat=M.arities[name]):
            spend()
            atoms.add(sum(1 << i for i, tup in enumerate(tuples)
                          if tuple(term_val(a, tup) for a in args) in table))
    full = space.full
    levels: list[set[int]] = [atoms | {full ^ a for a in atoms}]
    seen = set(levels[0])
    for d in range(1, depth_bound + 1):
        new: set[int] = set()
        for x in levels[d - 1]:
            for c in range(m):
                spend(2)
                new.add(space.exists(x, c))
                new.add(space.forall(x, c))
        for i in range(d):
            left, right = levels[i], levels[d - 1 - i]
            spend(3 * len(left) * len(right))
            for a in left:
                for b in right:
                    new.add(a & b)
                    new.add(a | b)
                    new.add((full ^ a) | b)
        new |= {full ^ x for x in new}
        levels.append(new)
        seen |= new
    out = set()
    for x in seen:
        if all(space.exists(x, c) == x for c in range(arity, m)):
            rel = frozenset(tup[:arity] for i, tup in enumerate(tuples)
                            if x >> i & 1 and all(v == 0 for v in tup[arity:]))
            out.add(rel)
    return out
