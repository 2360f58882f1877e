import itertools
import random

import pytest
from hypothesis import given, strategies as st

from interpres.generators import random_hf, random_relation
from interpres.hf import (
    EMPTY, MEMBER_CODE_CAP, CodedPair, DecodeCapError, DoubleStructure, HFError, HFSet,
    InvalidRelationError, ack_decode, ack_encode, ackermann_relation, canonical_double_iso,
    coded_equiv, coded_equiv_by_iso, coded_member, decode_coded_pair, encode_coded_pair,
    encode_structurally, membership_structure, mostowski_collapse, parse_hf, rank,
    rank_structural, render_hf, singleton, tc_singleton, transitive_closure, v_stage, von_neumann,
)
from interpres.structures import EqRelation, FinStructure, find_isomorphisms, is_extensional, \
    is_wellfounded


def nested_stage(n):
    """V_n as nested frozensets, by iterated power sets."""
    stage = set()
    for _ in range(n):
        elems = list(stage)
        stage = {frozenset(c) for r in range(len(elems) + 1)
                 for c in itertools.combinations(elems, r)}
    return stage


def from_nested(s):
    return HFSet.of(from_nested(t) for t in s)


def nested_code(s):
    return sum(1 << nested_code(t) for t in s)


def nested_rank(s):
    return 1 + max((nested_rank(t) for t in s), default=-1)


def valid(n, edges):
    return is_wellfounded(edges, n) and is_extensional(edges, n=n)


# -- coding ------------------------------------------------------------------

def test_small_codes():
    assert ack_encode(EMPTY) == 0 and ack_decode(0) == EMPTY
    assert ack_decode(3) == parse_hf("{{},{{}}}")
    assert ack_encode(parse_hf("{{{}}}")) == 2
    assert ack_encode(singleton(EMPTY)) == 1


def test_decode_cap():
    with pytest.raises(DecodeCapError):
        ack_decode(2 ** 20)
    assert ack_decode(2 ** 20, cap=2 ** 21).code == 2 ** 20
    with pytest.raises(HFError):
        ack_decode(-1)


def test_encode_decode_inverse_below_2_16():
    for n in range(2 ** 16):
        assert encode_structurally(ack_decode(n)) == n


def test_decode_encode_inverse_on_v5():
    stage = nested_stage(5)
    assert len(stage) == 65536
    codes = sorted(nested_code(s) for s in stage)
    assert codes == list(range(65536))
    rng = random.Random(0)
    for s in rng.sample(sorted(stage, key=nested_code), 500):
        x = from_nested(s)
        assert ack_decode(ack_encode(x)) == x and ack_encode(x) == nested_code(s)


def test_membership_is_bit_test_on_v4():
    V4 = v_stage(4)
    for x in V4:
        for y in V4:
            assert (y in x) == bool(ack_encode(x) >> ack_encode(y) & 1)


def test_literal_round_trip():
    for x in v_stage(4):
        assert parse_hf(render_hf(x)) == x
    assert parse_hf(" { {} , { {} } } ") == ack_decode(3)
    assert parse_hf("{{},{}}") == ack_decode(1)
    for bad in ("{", "{}}", "{,}", "x", "{{}{}}"):
        with pytest.raises(HFError):
            parse_hf(bad)


# -- closure, rank and stages ------------------------------------------------

def test_closure_and_rank_examples():
    x = ack_decode(3)
    assert transitive_closure(x) == {EMPTY, ack_decode(1)}
    assert rank(x) == 2
    assert transitive_closure(EMPTY) == frozenset() and rank(EMPTY) == 0
    for m in range(7):
        assert rank(von_neumann(m)) == m == rank_structural(von_neumann(m))


def test_stage_sizes():
    assert [len(v_stage(n)) for n in range(6)] == [0, 1, 2, 4, 16, 65536]
    assert v_stage(2) == [EMPTY, singleton(EMPTY)]
    with pytest.raises(HFError):
        v_stage(6)
    for n in range(1, 5):
        assert len(v_stage(n + 1)) == 2 ** len(v_stage(n))
        assert set(v_stage(n)) == {from_nested(s) for s in nested_stage(n)}


def test_rank_agrees_with_nested_rank_on_v4():
    for s in nested_stage(4):
        assert rank(from_nested(s)) == nested_rank(s)


def test_transitive_closure_is_least_transitive_superset():
    for x in v_stage(4):
        tc = transitive_closure(x)
        assert set(x.members) <= tc
        assert all(set(y.members) <= tc for y in tc)
        # nothing removable: every element is reached from x
        assert tc_singleton(x) == tc | {x}


# -- uncoded large sets ------------------------------------------------------

def test_von_neumann_six_is_uncoded_but_exact():
    v6 = von_neumann(6)
    assert not v6.coded
    assert len(v6) == 6 and von_neumann(5) in v6
    assert v6 == HFSet.of([von_neumann(m) for m in range(6)])
    assert hash(v6) == hash(HFSet.of(reversed([von_neumann(m) for m in range(6)])))
    assert v6.is_transitive()
    with pytest.raises(HFError):
        ack_encode(v6)


BIG = HFSet(MEMBER_CODE_CAP)   # code 2^20, so sets containing it are uncoded


def _mixed(rng):
    pool = [ack_decode(rng.randrange(40)) for _ in range(3)] + [BIG, HFSet(MEMBER_CODE_CAP + 3)]
    return HFSet.of(y for y in pool if rng.random() < 0.5)


@given(st.integers(0, 2 ** 32))
def test_order_matches_exact_codes(seed):
    rng = random.Random(seed)
    x, y = _mixed(rng), _mixed(rng)
    cx, cy = encode_structurally(x), encode_structurally(y)
    assert (x < y) == (cx < cy)
    assert (x == y) == (cx == cy)
    assert (x.union(y) == HFSet.of(x.members + y.members))
    assert x.is_subset(x.union(y))


# -- Mostowski collapse ------------------------------------------------------

def test_collapse_examples():
    assert mostowski_collapse(3, [(0, 1), (0, 2), (1, 2)]) == \
        [EMPTY, ack_decode(1), ack_decode(3)]
    assert mostowski_collapse(16, ackermann_relation(16)) == [ack_decode(i) for i in range(16)]
    assert mostowski_collapse(1, []) == [EMPTY]


def test_collapse_errors():
    with pytest.raises(InvalidRelationError):
        mostowski_collapse(2, [(0, 1), (1, 0)])
    with pytest.raises(InvalidRelationError):
        mostowski_collapse(3, [(0, 1), (0, 2)])


def test_collapse_modulo_equivalence():
    eq = EqRelation.from_classes([[0], [1, 2]])
    pi = mostowski_collapse(3, [(0, 1), (0, 2)], eq)
    assert pi == [EMPTY, ack_decode(1), ack_decode(1)]


@given(st.integers(0, 2 ** 32))
def test_collapse_is_the_unique_isomorphism(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    edges = random_relation(rng, n, 0.4)
    if not valid(n, edges):
        with pytest.raises(InvalidRelationError):
            mostowski_collapse(n, edges)
        return
    pi = mostowski_collapse(n, edges)
    assert len(set(pi)) == n
    for a, b in itertools.product(range(n), repeat=2):
        assert ((a, b) in set(edges)) == (pi[a] in pi[b])
    image = sorted(pi)
    assert all(y in image for x in image for y in x.members)   # transitive family
    want = tuple(image.index(x) for x in pi)
    isos = find_isomorphisms(FinStructure.graph(n, edges), membership_structure(image))
    assert isos == [want]


# -- coded pairs -------------------------------------------------------------

def test_coded_pair_examples():
    c = encode_coded_pair(singleton(EMPTY))
    assert (c.n, c.E, c.alpha) == (2, ((0, 1),), 1)
    c0 = encode_coded_pair(EMPTY)
    assert (c0.n, c0.E, c0.alpha) == (1, (), 0)


def test_coded_pair_round_trip():
    for x in v_stage(4):
        assert decode_coded_pair(encode_coded_pair(x)) == x
    rng = random.Random(5)
    for _ in range(100):
        x = ack_decode(rng.randrange(65536))
        assert decode_coded_pair(encode_coded_pair(x)) == x


def test_coded_equivalence():
    c = encode_coded_pair(ack_decode(3))
    assert coded_equiv(c, c)
    swapped = CodedPair.make(3, [(1, 0), (1, 2), (0, 2)], 2)   # ∅ at index 1
    assert coded_equiv(c, swapped) and coded_equiv_by_iso(c, swapped)
    assert not coded_equiv(encode_coded_pair(EMPTY), encode_coded_pair(singleton(EMPTY)))


def test_coded_member():
    e, one = encode_coded_pair(EMPTY), encode_coded_pair(singleton(EMPTY))
    assert coded_member(e, one)
    assert not coded_member(one, e)
    rng = random.Random(6)
    V4 = v_stage(4)
    for _ in range(200):
        x, y = rng.choice(V4), rng.choice(V4)
        assert coded_member(encode_coded_pair(x), encode_coded_pair(y)) == (x in y)


def test_invalid_coded_pairs():
    bad = CodedPair.make(2, [(0, 1), (1, 0)], 0)
    with pytest.raises(InvalidRelationError):
        decode_coded_pair(bad)
    with pytest.raises(HFError):
        CodedPair.make(2, [(0, 2)], 0)
    with pytest.raises(HFError):
        CodedPair.from_json({"n": 2})
    c = encode_coded_pair(ack_decode(11))
    assert CodedPair.from_json(c.to_json()) == c


@given(st.integers(0, 2 ** 32))
def test_equivalence_agrees_with_isomorphism(seed):
    rng = random.Random(seed)
    x, y = random_hf(rng, 4), random_hf(rng, 4)
    cx = encode_coded_pair(x)
    perm = list(range(cx.n))
    rng.shuffle(perm)
    cx = cx.relabel(perm)
    cy = encode_coded_pair(y)
    assert coded_equiv(cx, cy) == coded_equiv_by_iso(cx, cy) == (x == y)


# -- double membership structures --------------------------------------------

def test_double_examples():
    E = [(0, 1), (0, 2), (1, 2)]
    assert canonical_double_iso(DoubleStructure.make(3, E, E)) == (0, 1, 2)
    assert canonical_double_iso(DoubleStructure.make(2, [(0, 1)], [(1, 0)])) == (1, 0)
    assert canonical_double_iso(DoubleStructure.make(3, [(0, 1), (1, 2)], E)) is None
    with pytest.raises(InvalidRelationError):
        canonical_double_iso(DoubleStructure.make(2, [(0, 1), (1, 0)], [(0, 1)]))


@given(st.integers(0, 2 ** 32))
def test_double_iso_iff_oracle_and_unique(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    rels = []
    while len(rels) < 2:
        e = random_relation(rng, n, 0.4)
        if valid(n, e):
            rels.append(e)
    if rng.random() < 0.5:
        perm = list(range(n))
        rng.shuffle(perm)
        rels[1] = [(perm[a], perm[b]) for a, b in rels[0]]
    f = canonical_double_iso(DoubleStructure.make(n, *rels))
    isos = find_isomorphisms(FinStructure.graph(n, rels[0]), FinStructure.graph(n, rels[1]))
    assert (f is not None) == bool(isos)
    if f is not None:
        assert isos == [f]
