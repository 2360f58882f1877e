"""Seeded random structures, formulas, interpretations and sets for property runs."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from .hf import HFSet, tc_singleton, v_stage
from .interp import Definition, Interpretation, default_vars
from .logic import (
    And, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Signature, conj, disj, iff,
)
from .structures import FinStructure

VAR_POOL = ("x", "y", "z", "w")


def random_structure(rng: random.Random, sig: Signature, size: int,
                     density: float | None = None) -> FinStructure:
    p = rng.choice((0.2, 0.35, 0.5)) if density is None else density
    rels = {}
    for name, arity in sig.relations:
        rels[name] = [t for t in itertools.product(range(size), repeat=arity) if rng.random() < p]
    consts = {c: rng.randrange(size) for c in sig.constants}
    return FinStructure.build(size, rels, consts, dict(sig.relations))


def random_atom(rng: random.Random, sig: Signature, terms: Sequence[str]) -> Formula:
    if not sig.relations or rng.random() < 0.25:
        return Eq(rng.choice(terms), rng.choice(terms))
    name, arity = rng.choice(sig.relations)
    return Rel(name, tuple(rng.choice(terms) for _ in range(arity)))


def random_formula(rng: random.Random, sig: Signature, depth: int,
                   scope: Sequence[str], pool: Sequence[str] = VAR_POOL) -> Formula:
    """A formula of depth <= ``depth`` whose free names lie in ``scope`` and the constants."""
    terms = list(scope) + list(sig.constants)
    if depth == 0 or (terms and rng.random() < 0.2):
        if not terms:
            raise ValueError("a depth-0 formula needs a variable or constant in scope")
        f = random_atom(rng, sig, terms)
        return Not(f) if rng.random() < 0.3 else f
    roll = rng.random()
    if roll < 0.4 or not terms:
        v = rng.choice(pool)
        body = random_formula(rng, sig, depth - 1, sorted(set(scope) | {v}), pool)
        f = Exists(v, body) if rng.random() < 0.5 else Forall(v, body)
    else:
        op = rng.choice((And, Or, Implies))
        d1 = rng.randrange(depth)
        f = op(random_formula(rng, sig, d1, scope, pool),
               random_formula(rng, sig, depth - 1, scope, pool))
    return Not(f) if rng.random() < 0.2 else f


def random_sentence(rng: random.Random, sig: Signature, depth: int,
                    pool: Sequence[str] = VAR_POOL) -> Formula:
    if depth == 0 and not sig.constants:
        depth = 1
    return random_formula(rng, sig, depth, (), pool)


def _keys(rng: random.Random, sig: Signature, k: int, n_keys: int, depth: int,
          params: Sequence[str]) -> list[Definition]:
    vs = default_vars(k, 1)
    ext = Signature(sig.relations, tuple(sig.constants) + tuple(params))
    out = []
    for _ in range(n_keys):
        out.append(Definition(vs, random_formula(rng, ext, depth, vs, pool=("u", "v"))))
    return out


def _key_combo(rng: random.Random, keys: Sequence[Definition], args: Sequence[Sequence[str]]
               ) -> Formula:
    """A random boolean combination of keys applied to argument tuples."""
    lits = []
    for _ in range(rng.randint(1, 3)):
        key = rng.choice(keys)
        lit = key.instantiate(rng.choice(args))
        lits.append(Not(lit) if rng.random() < 0.4 else lit)
    return conj(*lits) if rng.random() < 0.6 else disj(*lits)


def random_interpretation(rng: random.Random, source: Signature, target: Signature, k: int = 1,
                          mode: str | None = None, n_params: int = 0, host_size: int = 1,
                          key_depth: int = 2) -> Interpretation:
    """A random interpretation of ``source`` in ``target``.

    ``mode`` "identity" uses coordinatewise equality and arbitrary relation
    formulas; "keys" makes equality agreement on a few key formulas and
    builds relations from the same keys, so congruence holds by design.
    The domain may still be empty on a given host; callers resample.
    """
    mode = mode or rng.choice(("identity", "keys"))
    params = {f"p{i}": rng.randrange(host_size) for i in range(1, n_params + 1)}
    pnames = tuple(params)
    ext = Signature(target.relations, tuple(target.constants) + pnames)
    dvars = default_vars(k, 1)
    if rng.random() < 0.5:
        domain = Definition(dvars, Eq(dvars[0], dvars[0]))
    else:
        dom = random_formula(rng, ext, 1, dvars, pool=("u",))
        domain = Definition(dvars, Or(dom, Eq(dvars[0], dvars[-1])) if k > 1 else dom)
    evars = default_vars(k, 2)
    xs, ys = list(evars[:k]), list(evars[k:])
    rels = {}
    if mode == "identity":
        equality = Definition(evars, conj(*(Eq(a, b) for a, b in zip(xs, ys))))
        for name, arity in source.relations:
            vs = default_vars(k, arity)
            rels[name] = Definition(vs, random_formula(rng, ext, 2, vs, pool=("u", "v")))
    else:
        keys = _keys(rng, target, k, rng.randint(1, 3), key_depth, pnames)
        equality = Definition(evars, conj(*(iff(key.instantiate(xs), key.instantiate(ys))
                                            for key in keys)))
        for name, arity in source.relations:
            vs = default_vars(k, arity)
            args = [list(vs[j * k:(j + 1) * k]) for j in range(arity)]
            rels[name] = Definition(vs, _key_combo(rng, keys, args))
    return Interpretation(source, target, k, domain, equality, rels, {}, params)


def random_transitive_family(rng: random.Random, max_size: int = 6) -> list[HFSet]:
    """TC({x}) for a random x of V_5 with at most ``max_size`` elements, shuffled."""
    while True:
        x = HFSet(rng.randrange(1 << 16))
        fam = sorted(tc_singleton(x))
        if len(fam) <= max_size:
            rng.shuffle(fam)
            return fam


def random_hf(rng: random.Random, stage: int = 4) -> HFSet:
    return rng.choice(v_stage(stage))


def random_relation(rng: random.Random, n: int, p: float = 0.3) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(n) if rng.random() < p]

