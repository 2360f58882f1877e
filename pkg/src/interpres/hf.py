"""Hereditarily finite sets, keyed by their Ackermann code.

A set is stored as the natural number ``sum(2**code(y) for y in x)``; its
members are the positions of the set bits.  Equality, hashing and ordering
are those of the code, so every collection of sets sorts canonically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, total_ordering
from typing import Iterable, Iterator, Mapping, Sequence

from .structures import EqRelation, FinStructure, find_isomorphisms, is_extensional, is_wellfounded


class HFError(ValueError):
    pass


class DecodeCapError(HFError):
    pass


class InvalidRelationError(HFError):
    pass


DECODE_CAP = 2 ** 20
# sets whose members all have codes below this carry their integer code;
# larger ones (rank 6 and up) are kept as a sorted member tuple instead
MEMBER_CODE_CAP = 2 ** 20


@total_ordering
class HFSet:
    """A hereditarily finite set.

    ``code`` is the Ackermann code when it is materialisable, else None.
    The choice depends only on the set, so equality stays structural.
    """

    __slots__ = ("code", "_mem")

    def __init__(self, code: int = 0):
        if code < 0:
            raise HFError("codes are natural numbers")
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "_mem", None)

    def __setattr__(self, *_):
        raise AttributeError("HFSet is immutable")

    @classmethod
    def of(cls, members: Iterable["HFSet"] = ()) -> "HFSet":
        members = list(members)
        if all(m.code is not None and m.code < MEMBER_CODE_CAP for m in members):
            code = 0
            for m in members:
                code |= 1 << m.code
            return cls(code)
        out = object.__new__(cls)
        object.__setattr__(out, "code", None)
        object.__setattr__(out, "_mem", tuple(sorted(set(members))))
        return out

    @property
    def coded(self) -> bool:
        return self.code is not None

    @property
    def members(self) -> tuple["HFSet", ...]:
        if self.code is None:
            return self._mem
        return _members(self.code)

    def __iter__(self) -> Iterator["HFSet"]:
        return iter(self.members)

    def __len__(self) -> int:
        if self.code is None:
            return len(self._mem)
        return bin(self.code).count("1")

    def __contains__(self, other: "HFSet") -> bool:
        if self.code is None:
            return other in self._mem_set()
        if other.code is None:
            return False
        return other.code < self.code.bit_length() and bool(self.code >> other.code & 1)

    def _mem_set(self) -> frozenset:
        return frozenset(self._mem)

    def __eq__(self, other):
        if not isinstance(other, HFSet):
            return NotImplemented
        if self.code is not None or other.code is not None:
            return self.code == other.code
        return self._mem == other._mem

    def __lt__(self, other: "HFSet"):
        """Ackermann-code order, decided without materialising large codes."""
        if self.code is not None and other.code is not None:
            return self.code < other.code
        if self.code is not None or other.code is not None:
            return self.code is not None
        a, b = self._mem, other._mem
        i, j = len(a) - 1, len(b) - 1
        while i >= 0 and j >= 0:
            if a[i] != b[j]:
                return a[i] < b[j]
            i, j = i - 1, j - 1
        return i < j

    def __hash__(self):
        if self.code is not None:
            return hash(("HF", self.code))
        return hash(("HF", self._mem))

    def __repr__(self):
        if self.code is not None and self.code >= 2 ** 16:
            return f"HFSet(code={self.code})"
        return f"HFSet({render_hf(self)})"

    def __str__(self):
        return render_hf(self)

    def union(self, other: "HFSet") -> "HFSet":
        if self.code is not None and other.code is not None:
            return HFSet(self.code | other.code)
        return HFSet.of(self.members + other.members)

    def is_transitive(self) -> bool:
        return all(y.is_subset(self) for y in self.members)

    def is_subset(self, other: "HFSet") -> bool:
        if self.code is not None and other.code is not None:
            return self.code & ~other.code == 0
        return all(y in other for y in self.members)


EMPTY = HFSet(0)


@lru_cache(maxsize=1 << 18)
def _members(code: int) -> tuple[HFSet, ...]:
    out = []
    c = code
    while c:
        low = c & -c
        out.append(HFSet(low.bit_length() - 1))
        c ^= low
    return tuple(out)


# -- Ackermann coding --------------------------------------------------------

def ack_encode(x: HFSet) -> int:
    if x.code is None:
        raise HFError("Ackermann code too large to materialise")
    return x.code


def ack_decode(n: int, cap: int = DECODE_CAP) -> HFSet:
    if n < 0:
        raise HFError("codes are natural numbers")
    if n >= cap:
        raise DecodeCapError(f"{n} is not below the decode cap {cap}")
    return HFSet(n)


def encode_structurally(x: HFSet) -> int:
    """Recompute the code from members alone; independent of the stored code."""
    return sum(1 << encode_structurally(y) for y in x.members)


def von_neumann(m: int) -> HFSet:
    x = EMPTY
    for _ in range(m):
        x = HFSet.of(x.members + (x,))
    return x


def singleton(x: HFSet) -> HFSet:
    return HFSet.of([x])


# -- literal syntax ----------------------------------------------------------

def render_hf(x: HFSet) -> str:
    return "{" + ",".join(render_hf(y) for y in x.members) + "}"


def parse_hf(text: str) -> HFSet:
    """Parse ``{}``, ``{{},{{}}}`` and the like; whitespace is ignored."""
    s = "".join(text.split())
    pos = 0

    def one() -> HFSet:
        nonlocal pos
        if pos >= len(s) or s[pos] != "{":
            raise HFError(f"expected '{{' at position {pos}")
        pos += 1
        items = []
        if pos < len(s) and s[pos] == "}":
            pos += 1
            return EMPTY
        while True:
            items.append(one())
            if pos < len(s) and s[pos] == ",":
                pos += 1
                continue
            if pos < len(s) and s[pos] == "}":
                pos += 1
                return HFSet.of(items)
            raise HFError(f"expected ',' or '}}' at position {pos}")

    x = one()
    if pos != len(s):
        raise HFError(f"trailing input at position {pos}")
    return x


# -- closure, rank, stages ---------------------------------------------------

def transitive_closure(x: HFSet) -> frozenset[HFSet]:
    """Members of x, their members, and so on (x itself excluded)."""
    seen: set[HFSet] = set()
    stack = list(x.members)
    while stack:
        y = stack.pop()
        if y not in seen:
            seen.add(y)
            stack.extend(y.members)
    return frozenset(seen)


def tc_singleton(x: HFSet) -> frozenset[HFSet]:
    return transitive_closure(x) | {x}


@lru_cache(maxsize=1 << 16)
def _rank(code: int) -> int:
    if code == 0:
        return 0
    # the member with the largest code has the largest rank
    return 1 + _rank(code.bit_length() - 1)


def rank(x: HFSet) -> int:
    if x.code is None:
        # members are sorted by code, so the last one has the largest rank
        return 1 + rank(x.members[-1])
    return _rank(x.code)


def rank_structural(x: HFSet) -> int:
    return 1 + max((rank_structural(y) for y in x.members), default=-1)


V_STAGE_MAX = 5


def v_stage(n: int) -> list[HFSet]:
    """All sets of rank below n, in code order (they are exactly the codes below |V_n|)."""
    if n < 0 or n > V_STAGE_MAX:
        raise HFError(f"V_{n} is not materialisable (n must be in 0..{V_STAGE_MAX})")
    size = 0
    for _ in range(n):
        size = 2 ** size
    return [HFSet(c) for c in range(size)]


def powerset(x: HFSet) -> list[HFSet]:
    mem = x.members
    return [HFSet.of(c) for r in range(len(mem) + 1) for c in itertools.combinations(mem, r)]


# -- Mostowski collapse ------------------------------------------------------

def mostowski_collapse(n: int, edges: Iterable[Sequence[int]],
                       eq: EqRelation | None = None) -> list[HFSet]:
    """Collapse a well-founded extensional relation: ``pi(i) = {pi(j) : j E i}``.

    With an equivalence, ``i`` takes the value computed from the least member
    of its class, so equivalent points collapse to the same set.
    """
    edges = [tuple(e) for e in edges]
    if not is_wellfounded(edges, n):
        raise InvalidRelationError("relation is not well-founded")
    if eq is None:
        eq = EqRelation.identity(n)
    if set(eq.domain) != set(range(n)):
        raise InvalidRelationError("equivalence must cover the whole domain")
    if not is_extensional(edges, eq, n):
        raise InvalidRelationError("relation is not extensional")
    rep = eq.class_of()
    preds: dict[int, list[int]] = {v: [] for v in range(n)}
    for a, b in edges:
        preds[b].append(a)
    value: dict[int, HFSet] = {}
    visiting: set[int] = set()

    def pi(i: int) -> HFSet:
        r = rep[i]
        if r not in value:
            if r in visiting:
                raise InvalidRelationError("quotient by the equivalence is not well-founded")
            visiting.add(r)
            value[r] = HFSet.of(pi(j) for j in preds[r])
            visiting.discard(r)
        return value[r]

    out = [pi(i) for i in range(n)]
    classes = {rep[i] for i in range(n)}
    if len({value[r] for r in classes}) != len(classes):
        raise InvalidRelationError("relation is not extensional modulo the equivalence")
    return out


def membership_structure(sets: Sequence[HFSet], name: str = "E") -> FinStructure:
    """The structure on ``sets`` (indexed in the given order) with the true membership relation."""
    index = {x: i for i, x in enumerate(sets)}
    edges = [(index[y], index[x]) for x in sets for y in x.members if y in index]
    return FinStructure.graph(len(sets), edges, name)


def v_structure(n: int, name: str = "E") -> FinStructure:
    return membership_structure(v_stage(n), name)


def ackermann_relation(n: int) -> list[tuple[int, int]]:
    """``(i, j)`` for ``i, j < n`` with bit i of j set."""
    return [(i, j) for j in range(n) for i in range(j.bit_length()) if j >> i & 1]


# -- coded pairs -------------------------------------------------------------

@dataclass(frozen=True)
class CodedPair:
    n: int
    E: tuple[tuple[int, int], ...]
    alpha: int

    def __post_init__(self):
        if not 0 <= self.alpha < self.n:
            raise HFError(f"distinguished point {self.alpha} outside domain of size {self.n}")
        for a, b in self.E:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise HFError(f"edge {(a, b)} leaves the domain")

    @classmethod
    def make(cls, n: int, E: Iterable[Sequence[int]], alpha: int) -> "CodedPair":
        return cls(n, tuple(sorted({(int(a), int(b)) for a, b in E})), alpha)

    def validate(self) -> None:
        if not is_wellfounded(self.E, self.n):
            raise InvalidRelationError("coded pair relation is not well-founded")
        if not is_extensional(self.E, n=self.n):
            raise InvalidRelationError("coded pair relation is not extensional")

    def at(self, alpha: int) -> "CodedPair":
        return CodedPair(self.n, self.E, alpha)

    def relabel(self, perm: Sequence[int]) -> "CodedPair":
        return CodedPair.make(self.n, ((perm[a], perm[b]) for a, b in self.E), perm[self.alpha])

    def to_json(self) -> dict:
        return {"n": self.n, "E": [list(e) for e in self.E], "alpha": self.alpha}

    @classmethod
    def from_json(cls, data: Mapping) -> "CodedPair":
        try:
            return cls.make(int(data["n"]), data["E"], int(data["alpha"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise HFError(f"malformed coded pair: {exc}") from exc


def encode_coded_pair(x: HFSet) -> CodedPair:
    """Enumerate TC({x}) in code order with the induced membership; alpha points at x."""
    elems = sorted(tc_singleton(x))
    index = {y: i for i, y in enumerate(elems)}
    edges = [(index[y], index[z]) for z in elems for y in z.members]
    return CodedPair.make(len(elems), edges, index[x])


def decode_coded_pair(c: CodedPair) -> HFSet:
    c.validate()
    return mostowski_collapse(c.n, c.E)[c.alpha]


def coded_equiv(c1: CodedPair, c2: CodedPair) -> bool:
    """Same decoded set, i.e. isomorphic hereditary predecessor structures."""
    return decode_coded_pair(c1) == decode_coded_pair(c2)


def hereditary_part(c: CodedPair) -> FinStructure:
    """The alpha-pointed structure on alpha and its hereditary predecessors, renumbered."""
    preds: dict[int, list[int]] = {v: [] for v in range(c.n)}
    for a, b in c.E:
        preds[b].append(a)
    keep = {c.alpha}
    stack = [c.alpha]
    while stack:
        v = stack.pop()
        for u in preds[v]:
            if u not in keep:
                keep.add(u)
                stack.append(u)
    order = sorted(keep)
    idx = {v: i for i, v in enumerate(order)}
    edges = [(idx[a], idx[b]) for a, b in c.E if a in keep and b in keep]
    return FinStructure.build(len(order), {"E": edges}, {"alpha": idx[c.alpha]}, {"E": 2})


def coded_equiv_by_iso(c1: CodedPair, c2: CodedPair, cap: int = 32) -> bool:
    c1.validate()
    c2.validate()
    return bool(find_isomorphisms(hereditary_part(c1), hereditary_part(c2), cap=cap, limit=1))


def coded_member(c1: CodedPair, c2: CodedPair) -> bool:
    """Whether some F-predecessor gamma of beta makes (gamma, F) equivalent to c1."""
    c2.validate()
    return any(coded_equiv(c1, c2.at(g)) for g, b in c2.E if b == c2.alpha)


# -- double membership structures -------------------------------------------

@dataclass(frozen=True)
class DoubleStructure:
    n: int
    E1: tuple[tuple[int, int], ...]
    E2: tuple[tuple[int, int], ...]

    @classmethod
    def make(cls, n, E1, E2) -> "DoubleStructure":
        return cls(n, tuple(sorted(map(tuple, E1))), tuple(sorted(map(tuple, E2))))


def canonical_double_iso(D: DoubleStructure) -> tuple[int, ...] | None:
    """The isomorphism (M, E1) -> (M, E2), matching equal collapse values, if one exists.

    Transitive sets are rigid, so when the two collapses have the same image
    the bijection is the only isomorphism.
    """
    for rel, label in ((D.E1, "first"), (D.E2, "second")):
        if not is_wellfounded(rel, D.n) or not is_extensional(rel, n=D.n):
            raise InvalidRelationError(f"{label} relation is not well-founded and extensional")
    pi1 = mostowski_collapse(D.n, D.E1)
    pi2 = mostowski_collapse(D.n, D.E2)
    if set(pi1) != set(pi2):
        return None
    where = {x: j for j, x in enumerate(pi2)}
    return tuple(where[x] for x in pi1)
