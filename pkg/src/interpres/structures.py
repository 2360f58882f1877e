"""Finite relational structures, congruences, quotients and an isomorphism oracle."""

from __future__ import annotations

import graphlib
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .logic import Signature


class StructureError(ValueError):
    pass


class NotEquivalenceError(StructureError):
    pass


class NotCongruenceError(StructureError):
    pass


class SizeCapError(StructureError):
    pass


DEFAULT_ISO_CAP = 8


@dataclass(frozen=True)
class FinStructure:
    """Domain ``0..size-1``, relation tables and constants.

    Build through :meth:`build` unless the tables are already frozensets of
    int tuples.
    """

    size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]]
    arities: Mapping[str, int]
    constants: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 0:
            raise StructureError("negative domain size")
        if set(self.relations) != set(self.arities):
            raise StructureError("every relation needs an arity")
        for name, table in self.relations.items():
            k = self.arities[name]
            for t in table:
                if len(t) != k:
                    raise StructureError(f"tuple {t} in {name} does not have arity {k}")
                if not all(0 <= v < self.size for v in t):
                    raise StructureError(f"tuple {t} in {name} leaves the domain")
        for name, v in self.constants.items():
            if not 0 <= v < self.size:
                raise StructureError(f"constant {name}={v} leaves the domain")

    @classmethod
    def build(cls, size: int, relations: Mapping[str, Iterable[Sequence[int]]] | None = None,
              constants: Mapping[str, int] | None = None,
              arities: Mapping[str, int] | None = None) -> "FinStructure":
        arities = dict(arities or {})
        tables = {}
        for name, rows in (relations or {}).items():
            table = frozenset(tuple(int(v) for v in r) for r in rows)
            if name not in arities:
                lens = {len(t) for t in table}
                if len(lens) != 1:
                    raise StructureError(f"cannot infer arity of {name}; pass arities")
                arities[name] = lens.pop()
            tables[name] = table
        for name in arities:
            tables.setdefault(name, frozenset())
        return cls(size, tables, arities, dict(constants or {}))

    @classmethod
    def graph(cls, size: int, edges: Iterable[Sequence[int]] = (), name: str = "E") -> "FinStructure":
        return cls.build(size, {name: edges}, arities={name: 2})

    @property
    def signature(self) -> Signature:
        return Signature.of(dict(self.arities), self.constants)

    def relabel(self, perm: Sequence[int]) -> "FinStructure":
        """Image of this structure under the bijection ``i -> perm[i]``."""
        return FinStructure(
            self.size,
            {r: frozenset(tuple(perm[v] for v in t) for t in tab) for r, tab in self.relations.items()},
            dict(self.arities),
            {c: perm[v] for c, v in self.constants.items()})

    def to_json(self) -> dict:
        out: dict = {"domain": self.size,
                     "relations": {r: sorted(list(t) for t in tab)
                                   for r, tab in sorted(self.relations.items())}}
        if self.constants:
            out["constants"] = dict(sorted(self.constants.items()))
        out["arities"] = dict(sorted(self.arities.items()))
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "FinStructure":
        try:
            return cls.build(int(data["domain"]), data.get("relations", {}),
                             data.get("constants", {}), data.get("arities"))
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed structure document: {exc}") from exc


class EqRelation:
    """A binary relation meant to be an equivalence on ``domain``.

    Validity is checked by :meth:`validate`, not on construction, so that
    invalid candidates can be reported rather than rejected early.
    """

    def __init__(self, pairs: Iterable[Sequence[int]], domain: Iterable[int]):
        self.pairs = frozenset((int(a), int(b)) for a, b in pairs)
        self.domain = tuple(sorted(set(domain)))

    @classmethod
    def identity(cls, n: int) -> "EqRelation":
        return cls(((i, i) for i in range(n)), range(n))

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[int]]) -> "EqRelation":
        classes = [list(c) for c in classes]
        pairs = [(a, b) for c in classes for a in c for b in c]
        return cls(pairs, (a for c in classes for a in c))

    @classmethod
    def from_key(cls, domain: Iterable[int], key) -> "EqRelation":
        dom = list(domain)
        return cls(((a, b) for a in dom for b in dom if key(a) == key(b)), dom)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def __repr__(self):
        return f"EqRelation(classes={self.classes()})"

    def problems(self) -> list[str]:
        dom = set(self.domain)
        out = []
        for a, b in self.pairs:
            if a not in dom or b not in dom:
                out.append(f"pair {(a, b)} leaves the designated domain")
        out += [f"not reflexive at {a}" for a in self.domain if (a, a) not in self.pairs]
        out += [f"not symmetric at {(a, b)}" for a, b in self.pairs if (b, a) not in self.pairs]
        succ: dict[int, set[int]] = {}
        for a, b in self.pairs:
            succ.setdefault(a, set()).add(b)
        for a, b in self.pairs:
            for c in succ.get(b, ()):
                if (a, c) not in self.pairs:
                    out.append(f"not transitive at {(a, b, c)}")
        return out

    def validate(self) -> None:
        probs = self.problems()
        if probs:
            raise NotEquivalenceError("; ".join(probs[:5]))

    def is_equivalence(self) -> bool:
        return not self.problems()

    def class_of(self) -> dict[int, int]:
        """Element -> least member of its class."""
        rep = {a: a for a in self.domain}
        for a, b in self.pairs:
            if b < rep.get(a, a):
                rep[a] = b
        return rep

    def classes(self) -> list[tuple[int, ...]]:
        groups: dict[int, list[int]] = {}
        for a, r in self.class_of().items():
            groups.setdefault(r, []).append(a)
        return [tuple(sorted(groups[r])) for r in sorted(groups)]


CONGRUENCE_MODES = ("strict", "profile")


def check_congruence(M: FinStructure, eq: EqRelation, mode: str = "strict") -> bool:
    """Whether the relations of ``M`` respect ``eq``.

    ``strict``: swapping any tuple entry for an equivalent element preserves
    every table; this is what first-order translation needs.  ``profile``:
    equivalent elements occur in the same class-level tuples, position by
    position; the quotient is then the image structure even when tables are
    not closed under swapping.
    """
    eq.validate()
    if set(eq.domain) != set(range(M.size)):
        raise NotEquivalenceError("equivalence must be defined on the whole domain")
    return not congruence_violations(M, eq, mode=mode)


def congruence_violations(M: FinStructure, eq: EqRelation, limit: int = 5,
                          mode: str = "strict") -> list[str]:
    if mode not in CONGRUENCE_MODES:
        raise ValueError(f"mode must be one of {CONGRUENCE_MODES}")
    if mode == "profile":
        return _profile_violations(M, eq, limit)
    members: dict[int, list[int]] = {}
    for a, b in eq.pairs:
        members.setdefault(a, []).append(b)
    out = []
    for name, table in sorted(M.relations.items()):
        for t in sorted(table):
            for pos, v in enumerate(t):
                for w in members.get(v, ()):
                    s = t[:pos] + (w,) + t[pos + 1:]
                    if s not in table:
                        out.append(f"{name}{t} holds but {name}{s} does not")
                        if len(out) >= limit:
                            return out
    return out


def _profile_violations(M: FinStructure, eq: EqRelation, limit: int) -> list[str]:
    rep = eq.class_of()
    out = []
    for name, table in sorted(M.relations.items()):
        k = M.arities[name]
        profile: dict[tuple[int, int], set] = {}
        for t in table:
            image = tuple(rep[v] for v in t)
            for pos, v in enumerate(t):
                profile.setdefault((v, pos), set()).add(image)
        for a, b in sorted(eq.pairs):
            if a < b:
                for pos in range(k):
                    if profile.get((a, pos), set()) != profile.get((b, pos), set()):
                        out.append(f"{a} and {b} occur differently at position {pos} of {name}")
                        if len(out) >= limit:
                            return out
    return out


def quotient(M: FinStructure, eq: EqRelation, mode: str = "strict"
             ) -> tuple[FinStructure, list[int]]:
    """Quotient by a congruence.  Classes are numbered in order of least member."""
    if not check_congruence(M, eq, mode):
        raise NotCongruenceError("; ".join(congruence_violations(M, eq, mode=mode)))
    classes = eq.classes()
    proj = [0] * M.size
    for idx, cls_ in enumerate(classes):
        for a in cls_:
            proj[a] = idx
    rels = {r: frozenset(tuple(proj[v] for v in t) for t in tab) for r, tab in M.relations.items()}
    consts = {c: proj[v] for c, v in M.constants.items()}
    return FinStructure(len(classes), rels, dict(M.arities), consts), proj


# -- isomorphism oracle ------------------------------------------------------

def _refine(structs: Sequence[FinStructure]) -> list[list[int]]:
    """Joint colour refinement; colours are comparable across the given structures."""
    colours = []
    for s in structs:
        col = []
        for v in range(s.size):
            consts = tuple(sorted(c for c, x in s.constants.items() if x == v))
            col.append(("init", consts))
        colours.append(col)
    palette: dict = {}
    colours = [[palette.setdefault(c, len(palette)) for c in col] for col in colours]
    incident = []
    for s in structs:
        inc: list[list[tuple[str, int, tuple[int, ...]]]] = [[] for _ in range(s.size)]
        for name, table in s.relations.items():
            for t in table:
                for pos, v in enumerate(t):
                    inc[v].append((name, pos, t))
        incident.append(inc)
    n_classes = len(set(itertools.chain.from_iterable(colours)))
    while True:
        palette = {}
        new = []
        for s, col, inc in zip(structs, colours, incident):
            row = []
            for v in range(s.size):
                sig = (col[v], tuple(sorted(
                    (name, pos, tuple(col[x] for x in t)) for name, pos, t in inc[v])))
                row.append(palette.setdefault(sig, len(palette)))
            new.append(row)
        count = len(palette)
        colours = new
        if count == n_classes:
            return colours
        n_classes = count


def _compatible(A: FinStructure, B: FinStructure) -> bool:
    return (A.size == B.size and dict(A.arities) == dict(B.arities)
            and set(A.constants) == set(B.constants)
            and all(len(A.relations[r]) == len(B.relations[r]) for r in A.relations))


def iter_isomorphisms(A: FinStructure, B: FinStructure):
    """Yield bijections f (as tuples, f[a] in B) preserving relations and constants both ways."""
    if not _compatible(A, B):
        return
    n = A.size
    ca, cb = _refine([A, B])
    if Counter(ca) != Counter(cb):
        return
    by_colour: dict[int, list[int]] = {}
    for v, c in enumerate(cb):
        by_colour.setdefault(c, []).append(v)
    # order A's elements: rarest colour first, then by index
    freq = Counter(ca)
    order = sorted(range(n), key=lambda v: (freq[ca[v]], v))
    pos_of = {v: i for i, v in enumerate(order)}
    # tuples of A checked once their last (in order) element gets assigned
    checks: list[list[tuple[str, tuple[int, ...]]]] = [[] for _ in range(n)]
    for name, table in A.relations.items():
        for t in table:
            checks[max(pos_of[v] for v in t)].append((name, t))
    f = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            yield tuple(f)
            return
        a = order[i]
        for b in by_colour[ca[a]]:
            if used[b]:
                continue
            f[a] = b
            if all(tuple(f[v] for v in t) in B.relations[name] for name, t in checks[i]):
                used[b] = True
                yield from extend(i + 1)
                used[b] = False
            f[a] = -1

    for g in extend(0):
        # relation sizes match and f is injective, so forward preservation gives both ways
        if all(g[A.constants[c]] == B.constants[c] for c in A.constants):
            yield g


def find_isomorphisms(A: FinStructure, B: FinStructure, cap: int = DEFAULT_ISO_CAP,
                      limit: int | None = None) -> list[tuple[int, ...]]:
    """All isomorphisms A -> B, sorted; at most ``limit`` when given."""
    if max(A.size, B.size) > cap:
        raise SizeCapError(f"structures of size {max(A.size, B.size)} exceed cap {cap}")
    out = list(itertools.islice(iter_isomorphisms(A, B), limit))
    return sorted(out)


def is_isomorphic(A: FinStructure, B: FinStructure, cap: int = DEFAULT_ISO_CAP) -> bool:
    return bool(find_isomorphisms(A, B, cap=cap, limit=1))


# -- well-foundedness and extensionality -------------------------------------

def _domain_of(rel, n):
    if n is None:
        n = 1 + max((max(a, b) for a, b in rel), default=-1)
    return n


def is_wellfounded(rel: Iterable[Sequence[int]], n: int | None = None) -> bool:
    """On a finite domain, well-founded iff the relation's digraph has no cycle."""
    rel = [tuple(p) for p in rel]
    n = _domain_of(rel, n)
    ts = graphlib.TopologicalSorter({v: () for v in range(n)})
    for a, b in rel:
        if a == b:
            return False
        ts.add(b, a)
    try:
        ts.prepare()
    except graphlib.CycleError:
        return False
    return True


def is_extensional(rel: Iterable[Sequence[int]], eq: EqRelation | None = None,
                   n: int | None = None) -> bool:
    """Distinct elements (modulo ``eq``) have distinct predecessor sets (modulo ``eq``)."""
    rel = [tuple(p) for p in rel]
    n = _domain_of(rel, n)
    if eq is None:
        eq = EqRelation.identity(n)
    eq.validate()
    rep = eq.class_of()
    preds: dict[int, set[int]] = {v: set() for v in range(n)}
    for a, b in rel:
        preds[b].add(rep.get(a, a))
    seen: dict[frozenset, int] = {}
    for v in range(n):
        key = frozenset(preds[v])
        other = seen.setdefault(key, v)
        if rep.get(other, other) != rep.get(v, v):
            return False
    return True
