"""Growth-rate classes of hereditarily finite sets and the Zermelo tower.

A transitive set belongs to the class at level k when, for every n, at most
``b_k(n)`` members of its transitive closure have rank below n, where
``b_k(n)`` is a tower of k twos over n.  Sizes of the stages V_n are towers
too; both are handled as :class:`TowerInt`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .hf import EMPTY, HFError, HFSet, rank, tc_singleton, v_stage
from .tower import DEFAULT_CAP_BITS, TowerInt, tower_cmp


class MathiasError(ValueError):
    pass


class DescentCapError(MathiasError):
    pass


MAX_DEPTH_SEARCH = 64


def tower_b(k: int, n: int, cap_bits: int = DEFAULT_CAP_BITS) -> TowerInt:
    """b_k(n): k twos stacked over n; b_0(n) = n."""
    out = TowerInt.exact(n, cap_bits)
    for _ in range(k):
        out = out.pow2()
    return out


def vcard(n: int, cap_bits: int = DEFAULT_CAP_BITS) -> TowerInt:
    """|V_n|: 0 at n = 0, then 2^|V_(n-1)|."""
    out = TowerInt.exact(0, cap_bits)
    for _ in range(n):
        out = out.pow2()
    return out


@dataclass(frozen=True)
class GrowthProfile:
    """``counts[n]`` = members of TC({x}) of rank below n, for n up to rank(x) + 1."""

    counts: tuple[int, ...]
    constant: int

    def at(self, n: int) -> int:
        return self.counts[n] if n < len(self.counts) else self.constant

    def to_json(self) -> dict:
        return {"table": {str(n): c for n, c in enumerate(self.counts)}, "constant": self.constant}


def growth_profile(x: HFSet) -> GrowthProfile:
    r = rank(x)
    hist = [0] * (r + 2)
    for y in tc_singleton(x):
        hist[rank(y)] += 1
    counts = [0]
    for n in range(1, r + 2):
        counts.append(counts[-1] + hist[n - 1])
    return GrowthProfile(tuple(counts), counts[-1])


def _bounded(profile: Sequence[TowerInt], k: int, strict_last: bool) -> bool:
    last = len(profile) - 1
    for n in range(1, len(profile)):
        c = tower_cmp(profile[n], tower_b(k, n, profile[n].cap_bits))
        if c > 0 or (c == 0 and strict_last and n == last):
            return False
    return True


def min_depth_of_profile(profile: Sequence[int | TowerInt], strict_last: bool = False) -> int:
    """Least k with profile[n] <= b_k(n) for 1 <= n < len(profile).

    The profile must already be constant from its last entry on; b_k is
    nondecreasing, so the finitely many checks decide every n.
    ``strict_last`` reads the last entry as one more than given.
    """
    prof = [p if isinstance(p, TowerInt) else TowerInt.exact(p) for p in profile]
    for k in range(MAX_DEPTH_SEARCH):
        if _bounded(prof, k, strict_last):
            return k
    raise MathiasError(f"no depth below {MAX_DEPTH_SEARCH} bounds this profile")


@lru_cache(maxsize=1 << 16)
def min_depth(x: HFSet) -> int:
    """Least k such that |TC({x}) n V_n| <= b_k(n) for every n >= 1."""
    return min_depth_of_profile(growth_profile(x).counts)


def vstage_profile(m: int) -> tuple[list[TowerInt], bool]:
    """Profile of the set V_m, symbolically: |V_n| for n <= m, then |V_m| + 1.

    Returned as the list up to n = m + 1 with the last entry given as |V_m|
    and a flag meaning "plus one".
    """
    prof = [vcard(n) for n in range(m + 1)] + [vcard(m)]
    return prof, True


def min_depth_vstage(m: int) -> int:
    prof, strict = vstage_profile(m)
    return min_depth_of_profile(prof, strict_last=strict)


# -- fruitful closure --------------------------------------------------------

@dataclass
class ClosureViolation:
    clause: str
    x: HFSet
    y: HFSet | None
    result: HFSet

    def __str__(self):
        return f"clause {self.clause}: x={self.x} y={self.y} gives {self.result} outside the class"


@dataclass
class ClosureReport:
    K: int
    sample_size: int
    checked: dict[str, int] = field(default_factory=dict)
    violations: list[ClosureViolation] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def in_class(x: HFSet, K: int) -> bool:
    return x.is_transitive() and min_depth(x) <= K


def fruitful_closure_check(K: int, sample: Iterable[HFSet], max_violations: int = 50
                           ) -> ClosureReport:
    """Check the closure clauses for C = {transitive x : min_depth(x) <= K} on a sample of V_5.

    Clause 2 is checked on the ordinals of V_5; clauses 3 and 4 on sample
    members lying in C, keeping only results inside V_5.
    """
    sample = sorted(set(sample))
    for x in sample:
        if rank(x) >= 5:
            raise MathiasError(f"{x} is not in V_5")
        if not x.is_transitive():
            raise MathiasError(f"sample member {x} is not transitive")
    rep = ClosureReport(K, len(sample), {"2": 0, "3": 0, "4": 0})

    def record(clause, x, y, result):
        rep.checked[clause] += 1
        if not in_class(result, K) and len(rep.violations) < max_violations:
            rep.violations.append(ClosureViolation(clause, x, y, result))

    ordinal = EMPTY
    while rank(ordinal) < 5:
        record("2", ordinal, None, ordinal)
        ordinal = HFSet.of(ordinal.members + (ordinal,))
    members = [x for x in sample if in_class(x, K)]
    for x, y in itertools.combinations_with_replacement(members, 2):
        record("3", x, y, x.union(y))
    for x in members:
        # members of P(x) inside V_4 are the subsets of x's members of rank below 3
        low = [m for m in x.members if rank(m) < 3]
        subsets = [HFSet.of(c) for r in range(len(low) + 1) for c in itertools.combinations(low, r)]
        seen = set()
        for r in range(len(subsets) + 1):
            for ys in itertools.combinations(subsets, r):
                y = HFSet.of(ys)
                result = x.union(y)
                if rank(result) >= 5 or result in seen:
                    continue
                seen.add(result)
                record("4", x, y, result)
    return rep


def transitive_sets(n: int) -> list[HFSet]:
    """Transitive members of V_n."""
    return [x for x in v_stage(n) if x.is_transitive()]


# -- Zermelo tower -----------------------------------------------------------

def tower_sub(x: HFSet, a: HFSet) -> HFSet:
    """Replace every hereditary occurrence of the empty set in x by a."""
    return _sub(x, a)


@lru_cache(maxsize=1 << 18)
def _sub(x: HFSet, a: HFSet) -> HFSet:
    if x == EMPTY:
        return a
    return HFSet.of(_sub(y, a) for y in x.members)


ZERMELO_CAP = 1 << 16


def zermelo_stage(a: HFSet, alpha: int, cap: int = ZERMELO_CAP) -> list[HFSet]:
    """Stage alpha of the tower built on a: S_0 = {}, S_(i+1) = {a} + (P(S_i) - {{}})."""
    size = vcard(alpha)
    if tower_cmp(size, TowerInt.exact(cap)) > 0:
        raise MathiasError(f"stage {alpha} has {size} elements, above the cap {cap}")
    stage: list[HFSet] = []
    for _ in range(alpha):
        nxt = {a}
        for r in range(1, len(stage) + 1):
            for c in itertools.combinations(stage, r):
                try:
                    nxt.add(HFSet.of(c))
                except HFError as exc:
                    raise MathiasError(f"stage {alpha} over {a} is too deep to materialise") from exc
        stage = sorted(nxt)
    return stage


def terminal_descents(x: HFSet, limit: int = 100_000) -> list[tuple[HFSet, ...]]:
    """All chains x = x_n, ..., x_0 = {} with each entry a member of the previous one."""
    out: list[tuple[HFSet, ...]] = []

    def walk(chain):
        top = chain[-1]
        if top == EMPTY:
            out.append(tuple(chain))
            if len(out) > limit:
                raise DescentCapError(f"more than {limit} terminal descents")
            return
        for y in top.members:
            chain.append(y)
            walk(chain)
            chain.pop()

    walk([x])
    return out


def in_tower(x: HFSet, a: HFSet) -> bool:
    """Every terminal descent from x passes through a."""
    return _in_tower(x, a)


@lru_cache(maxsize=1 << 18)
def _in_tower(x: HFSet, a: HFSet) -> bool:
    if x == a:
        return True
    if x == EMPTY:
        return False
    return all(_in_tower(y, a) for y in x.members)
