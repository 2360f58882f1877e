"""End-to-end acceptance suites.

Each suite runs one criterion at its stated size and time limit and returns a
:class:`CriterionResult`.  Random runs are seeded, so a given seed always
reproduces the same instances.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Callable

from . import hf, mathias
from .generators import random_interpretation, random_relation, random_sentence, \
    random_structure, random_transitive_family
from .interp import (
    InterpretationError, ScottClassMissing, apply, compose, interpret, scott_reduce, translate,
)
from .logic import Signature, evaluate
from .structures import FinStructure, find_isomorphisms, is_isomorphic
from .tower import tower_cmp


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float
    limit: float | None = None

    @property
    def in_time(self) -> bool:
        return self.limit is None or self.elapsed < self.limit

    @property
    def ok(self) -> bool:
        return self.passed and self.in_time

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        limit = f" (limit {self.limit:.0f}s)" if self.limit else ""
        return f"[{verdict}] {self.number}. {self.name}: {self.detail} in {self.elapsed:.2f}s{limit}"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "verdict": "pass" if self.ok else "fail",
                "detail": self.detail, "elapsed": round(self.elapsed, 3), "limit": self.limit}


HOST = Signature.parse("E/2,P/1")
GUEST = Signature.parse("R/2,Q/1")
MEMBERSHIP = Signature.parse("E/2")


def _timed(number: int, name: str, limit: float | None, body: Callable[[], tuple[bool, str]]
           ) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, detail = body()
    except Exception as exc:  # a crash is a failed criterion, reported rather than raised
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(number, name, passed, detail, time.perf_counter() - start, limit)


def _ratio(good: int, total: int, extra: str = "") -> tuple[bool, str]:
    return good == total, f"{good}/{total} agree{extra}"


# -- 1 ---------------------------------------------------------------------

def translation_semantics(seed: int = 0, count: int = 1000) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        good = done = 0
        failures = []
        while done < count:
            n = rng.randint(1, 5)
            k = 2 if n <= 3 and rng.random() < 0.4 else 1
            M = random_structure(rng, HOST, n)
            I = random_interpretation(rng, GUEST, HOST, k, n_params=rng.choice((0, 0, 1)),
                                      host_size=n)
            try:
                N, _ = apply(I, M)
            except InterpretationError:
                continue
            phi = random_sentence(rng, GUEST, rng.randint(0, 3))
            done += 1
            if evaluate(N, phi) == evaluate(M, translate(phi, I), dict(I.params)):
                good += 1
            elif len(failures) < 3:
                failures.append(str(phi))
        return _ratio(good, done, f"; first failures {failures}" if failures else "")
    return _timed(1, "translation semantics", 30, body)


# -- 2 ---------------------------------------------------------------------

def functoriality(seed: int = 0, count: int = 200) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        good = done = 0
        while done < count:
            n = rng.randint(1, 4)
            M = random_structure(rng, HOST, n)
            kj = 2 if n <= 3 and rng.random() < 0.4 else 1
            J = random_interpretation(rng, GUEST, HOST, kj, n_params=rng.choice((0, 1)),
                                      host_size=n)
            try:
                N, _ = apply(J, M)
            except InterpretationError:
                continue
            ki = 2 if N.size <= 3 and rng.random() < 0.3 else 1
            I = random_interpretation(rng, HOST, GUEST, ki, n_params=rng.choice((0, 1)),
                                      host_size=N.size)
            try:
                A, _ = apply(I, N)
            except InterpretationError:
                continue
            if A.size > 8:
                continue
            done += 1
            B, _ = apply(compose(I, J, M), M)
            good += is_isomorphic(A, B)
        return _ratio(good, done)
    return _timed(2, "functoriality of composition", 30, body)


# -- 3 ---------------------------------------------------------------------

def _v5_by_powersets() -> list[frozenset]:
    stage: list[frozenset] = []
    for _ in range(5):
        stage = [frozenset(c) for r in range(len(stage) + 1)
                 for c in itertools.combinations(stage, r)]
    return stage


def _from_nested(s: frozenset, memo: dict) -> hf.HFSet:
    if s not in memo:
        memo[s] = hf.HFSet.of(_from_nested(t, memo) for t in s)
    return memo[s]


def ackermann(seed: int = 0) -> CriterionResult:
    def body():
        bad = []
        for n in range(1 << 16):
            if hf.encode_structurally(hf.ack_decode(n)) != n:
                bad.append(f"decode {n}")
                break
        memo: dict = {}
        v5 = [_from_nested(s, memo) for s in _v5_by_powersets()]
        if len(set(v5)) != 65536:
            bad.append("V5 has the wrong size")
        for x in v5:
            if hf.ack_decode(hf.ack_encode(x)) != x:
                bad.append(f"round trip {x}")
                break
        if sorted(hf.ack_encode(x) for x in v5) != list(range(1 << 16)):
            bad.append("V5 codes are not [0, 2^16)")
        v4 = hf.v_stage(4)
        for x, y in itertools.product(v4, repeat=2):
            if (y in x.members) != bool(hf.ack_encode(x) >> hf.ack_encode(y) & 1):
                bad.append(f"bit test {y} in {x}")
                break
        return not bad, ("round trips on [0, 2^16) and V5, bit test on V4^2" if not bad
                         else "; ".join(bad))
    return _timed(3, "Ackermann coding", 20, body)


# -- 4 ---------------------------------------------------------------------

def _naive_wellfounded(n: int, edges) -> bool:
    alive = set(range(n))
    while alive:
        minimal = {v for v in alive if not any(a in alive for a, b in edges if b == v)}
        if not minimal:
            return False
        alive -= minimal
    return True


def _naive_extensional(n: int, edges) -> bool:
    preds = [frozenset(a for a, b in edges if b == v) for v in range(n)]
    return len(set(preds)) == n


def all_relations(n: int):
    pairs = [(a, b) for a in range(n) for b in range(n)]
    for mask in range(1 << len(pairs)):
        yield [p for i, p in enumerate(pairs) if mask >> i & 1]


def _collapse_ok(n: int, edges) -> str | None:
    """None when the collapse behaves as required, else a description of the failure."""
    valid = _naive_wellfounded(n, edges) and _naive_extensional(n, edges)
    try:
        pi = hf.mostowski_collapse(n, edges)
    except hf.InvalidRelationError:
        return None if not valid else f"rejected valid {edges}"
    if not valid:
        return f"accepted invalid {edges}"
    E = set(map(tuple, edges))
    if len(set(pi)) != n:
        return f"not injective on {edges}"
    for a, b in itertools.product(range(n), repeat=2):
        if ((a, b) in E) != (pi[a] in pi[b]):
            return f"membership not preserved on {edges}"
    image = hf.membership_structure(pi)
    if len(find_isomorphisms(FinStructure.graph(n, edges), image)) != 1:
        return f"collapse not the unique isomorphism on {edges}"
    return None


def mostowski(seed: int = 0, random_count: int = 500) -> CriterionResult:
    def body():
        problems = []
        checked = valid = 0
        for n in range(1, 5):
            for edges in all_relations(n):
                checked += 1
                msg = _collapse_ok(n, edges)
                valid += _naive_wellfounded(n, edges) and _naive_extensional(n, edges)
                if msg:
                    problems.append(msg)
        rng = random.Random(seed)
        for i in range(random_count):
            n = rng.randint(1, 6)
            if i % 2:
                edges = random_relation(rng, n, rng.choice((0.15, 0.3)))
            else:
                fam = random_transitive_family(rng, 6)
                n = len(fam)
                idx = {x: j for j, x in enumerate(fam)}
                edges = [(idx[y], idx[x]) for x in fam for y in x.members]
            checked += 1
            msg = _collapse_ok(n, edges)
            if msg:
                problems.append(msg)
        detail = f"{checked} relations ({valid} exhaustive valid), {len(problems)} problems"
        if problems:
            detail += f"; e.g. {problems[0]}"
        return not problems, detail
    return _timed(4, "Mostowski collapse", 60, body)


# -- 5 ---------------------------------------------------------------------

def scott(seed: int = 0, count: int = 50) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        hosts = {3: hf.v_structure(3), 4: hf.v_structure(4)}
        good = done = resampled = 0
        while done < count:
            V = hosts[3 if done % 2 == 0 else 4]
            I = random_interpretation(rng, MEMBERSHIP, MEMBERSHIP, 1, mode="keys",
                                      key_depth=rng.choice((1, 2, 3)))
            try:
                A, _ = apply(I, V)
                if not 2 <= A.size < V.size or A.size > 8:
                    continue
                R = scott_reduce(I, V)
            except ScottClassMissing:
                resampled += 1
                continue
            except InterpretationError:
                continue
            done += 1
            im = interpret(R, V)
            identity = all(len({t for t, c in im.class_index.items() if c == j}) == 1
                           for j in range(im.structure.size))
            good += identity and is_isomorphic(A, im.structure)
        return _ratio(good, done, f" ({resampled} draws without coded Scott classes resampled)")
    return _timed(5, "Scott reduction", None, body)


# -- 6 ---------------------------------------------------------------------

def coded_pairs(seed: int = 0, count: int = 200) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        v4 = hf.v_stage(4)
        bad = [x for x in v4 if hf.decode_coded_pair(hf.encode_coded_pair(x)) != x]
        member_good = equiv_good = 0
        for _ in range(count):
            x, y = rng.choice(v4), rng.choice(v4)
            member_good += hf.coded_member(hf.encode_coded_pair(x), hf.encode_coded_pair(y)) \
                == (x in y.members)
        for i in range(count):
            x = rng.choice(v4)
            y = x if i % 2 else rng.choice(v4)
            c2 = hf.encode_coded_pair(y)
            perm = list(range(c2.n))
            rng.shuffle(perm)
            c2 = c2.relabel(perm)
            c1 = hf.encode_coded_pair(x)
            same = hf.coded_equiv(c1, c2)
            equiv_good += same == (x == y) == hf.coded_equiv_by_iso(c1, c2)
        ok = not bad and member_good == count and equiv_good == count
        return ok, (f"round trip {16 - len(bad)}/16, membership {member_good}/{count}, "
                    f"equivalence {equiv_good}/{count}")
    return _timed(6, "coded pairs", None, body)


# -- 7 ---------------------------------------------------------------------

def valid_relations(n: int) -> list[list[tuple[int, int]]]:
    return [e for e in all_relations(n) if _naive_wellfounded(n, e) and _naive_extensional(n, e)]


def double_kernel(seed: int = 0) -> CriterionResult:
    def body():
        pairs = good = 0
        for n in range(1, 5):
            rels = valid_relations(n)
            for E1, E2 in itertools.product(rels, repeat=2):
                pairs += 1
                got = hf.canonical_double_iso(hf.DoubleStructure.make(n, E1, E2))
                isos = find_isomorphisms(FinStructure.graph(n, E1), FinStructure.graph(n, E2))
                if got is None:
                    good += not isos
                else:
                    good += isos == [tuple(got)]
        return _ratio(good, pairs, " on all pairs over <= 4 points")
    return _timed(7, "double-membership kernel", None, body)


# -- 8 ---------------------------------------------------------------------

def mathias_numbers(seed: int = 0) -> CriterionResult:
    def body():
        checks = {
            "vcard(5) = 65536": mathias.vcard(5) == 65536,
            "vcard(5) = |V5|": mathias.vcard(5) == len(hf.v_stage(5)),
            "ordinals have depth 0": all(mathias.min_depth(hf.von_neumann(m)) == 0
                                         for m in range(7)),
            "min_depth(V4) = 1": mathias.min_depth(hf.HFSet.of(hf.v_stage(4))) == 1,
            "min_depth(V_m) nondecreasing": _nondecreasing(
                [mathias.min_depth_vstage(m) for m in range(3, 10)]),
            "vcard(6) < b_3(6)": tower_cmp(mathias.vcard(6), mathias.tower_b(3, 6)) < 0,
        }
        failed = [k for k, v in checks.items() if not v]
        return not failed, "all exact checks hold" if not failed else f"failed: {failed}"
    return _timed(8, "Mathias numbers", None, body)


def _nondecreasing(xs) -> bool:
    return all(a <= b for a, b in zip(xs, xs[1:]))


# -- 9 ---------------------------------------------------------------------

def zermelo(seed: int = 0) -> CriterionResult:
    def body():
        v4 = hf.v_stage(4)
        bad = []
        if any(mathias.tower_sub(x, hf.EMPTY) != x for x in v4):
            bad.append("tower_sub(., {}) is not the identity")
        for a in hf.v_stage(3):
            image = {x: mathias.tower_sub(x, a) for x in v4}
            if len(set(image.values())) != len(v4):
                bad.append(f"not injective for a={a}")
            for x, y in itertools.product(v4, repeat=2):
                if (y in x.members) != (image[y] in image[x].members):
                    bad.append(f"membership not preserved for a={a}")
                    break
            rng_set = set(image.values())
            if rng_set != set(mathias.zermelo_stage(a, 4)):
                bad.append(f"image differs from stage 4 for a={a}")
            universe = set(v4) | rng_set
            for z in list(universe):
                universe |= hf.transitive_closure(z)
            if {z for z in universe if mathias.in_tower(z, a)} != rng_set:
                bad.append(f"descent criterion misses the range for a={a}")
        return not bad, "all 4 choices of a" if not bad else "; ".join(bad)
    return _timed(9, "Zermelo tower", None, body)


SUITES: dict[int, Callable[..., CriterionResult]] = {
    1: translation_semantics,
    2: functoriality,
    3: ackermann,
    4: mostowski,
    5: scott,
    6: coded_pairs,
    7: double_kernel,
    8: mathias_numbers,
    9: zermelo,
}


def run_all(seed: int = 0, only=None) -> list[CriterionResult]:
    return [SUITES[i](seed=seed) for i in sorted(SUITES) if only is None or i in only]
