import itertools
import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from interpres.generators import random_interpretation, random_sentence, random_structure
from interpres.hf import v_structure
from interpres.interp import (
    BiInterpretation, Definition, EmptyDomainError, Interpretation, InterpretationError,
    NotCongruenceOnDomain, NotEquivalenceOnDomain, ScottClassMissing, Theory, apply, bi_report,
    check_bi, check_mutual, check_synonymy, check_theory_interpretation, compose, interpret,
    interpretable_in, models, scott_classes, scott_reduce, theory_disjunction, translate,
)
from interpres.logic import (
    And, Eq, Exists, Not, Rel, Signature, SignatureError, alpha_equivalent, evaluate,
    parse_formula, render,
)
from interpres.structures import FinStructure, find_isomorphisms, is_isomorphic

FIX = Path(__file__).parent / "fixtures"
GRAPH = Signature.parse("E/2")
EMPTY = Signature.parse("")

PATH = FinStructure.graph(3, [(0, 1), (1, 2)])
REV_PATH = FinStructure.graph(3, [(1, 0), (2, 1)])
CYCLE = FinStructure.graph(3, [(0, 1), (1, 2), (2, 0)])


def identity():
    return Interpretation.identity(GRAPH)


def reversal():
    return Interpretation.build(GRAPH, GRAPH, 1, "x=x", "x=y", {"E": "E(y,x)"})


def load(name):
    return json.loads((FIX / name).read_text())


def all_graphs(n):
    pairs = list(itertools.product(range(n), repeat=2))
    for bits in range(1 << len(pairs)):
        yield FinStructure.graph(n, [p for i, p in enumerate(pairs) if bits >> i & 1])


# -- translation -------------------------------------------------------------

def test_negation_distributes():
    I = reversal()
    phi = parse_formula("~E(x,y)")
    assert translate(phi, I) == Not(translate(parse_formula("E(x,y)"), I))
    assert translate(phi, I) == Not(Rel("E", ("y__1", "x__1")))


def test_existential_relativised_to_domain():
    I = Interpretation.build(GRAPH, GRAPH, 1, "Ey.E(x,y)", "x=y", {"E": "E(x,y)"})
    got = translate(parse_formula("Ex.x=x"), I)
    want = Exists("x__1", And(Exists("y", Rel("E", ("x__1", "y"))), Eq("x__1", "x__1")))
    assert got == want


def test_identity_translation_is_renaming():
    rng = random.Random(0)
    for _ in range(50):
        phi = random_sentence(rng, GRAPH, rng.randint(0, 3))
        tr = translate(phi, identity())
        # the identity domain "x=x" guards every quantifier; evaluation agrees
        for n in (1, 2, 3):
            M = random_structure(rng, GRAPH, n)
            assert evaluate(M, tr) == evaluate(M, phi)


def test_two_dimensional_variables():
    I = Interpretation.build(EMPTY, GRAPH, 2, "x1=x1", "(x1=y1 & x2=y2)", {})
    tr = translate(parse_formula("Ex.x=x"), I)
    assert render(tr) == "Ex__1.Ex__2.(x__1=x__1 & (x__1=x__1 & x__2=x__2))"
    assert evaluate(FinStructure.graph(2), tr)


def test_universal_agrees_with_dual_of_existential():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 4)
        M = random_structure(rng, GRAPH, n)
        I = random_interpretation(rng, GRAPH, GRAPH, k=rng.randint(1, 2))
        body = parse_formula(rng.choice(
            ["E(x,x)", "Ey.E(x,y)", "Ey.(E(y,x) & ~x=y)", "Ay.(E(x,y) -> E(y,x))"]))
        a = translate(parse_formula(f"Ax.({render(body)})"), I)
        b = translate(Not(Exists("x", Not(body))), I)
        assert evaluate(M, a) == evaluate(M, b)


def test_missing_translation_is_an_error():
    I = Interpretation.build(EMPTY, GRAPH, 1, "x=x", "x=y", {})
    with pytest.raises(SignatureError):
        translate(parse_formula("E(x,y)"), I)


def test_constants_are_witnessed():
    sig = Signature.parse("E/2,c")
    I = Interpretation.build(sig, GRAPH, 1, "x=x", "x=y", {"E": "E(y,x)"},
                             {"c": "Ey.E(x,y)"})
    M = FinStructure.graph(2, [(0, 1)])
    N, reps = apply(I, M)
    assert N.constants == {"c": 0}
    for text in ("E(c,c)", "Ex.E(x,c)", "Ex.E(c,x)", "Ex.x=c"):
        phi = parse_formula(text, sig)
        assert evaluate(N, phi) == evaluate(M, translate(phi, I))


# -- apply -------------------------------------------------------------------

def test_identity_apply_is_isomorphic():
    rng = random.Random(2)
    for _ in range(30):
        M = random_structure(rng, GRAPH, rng.randint(1, 5))
        N, reps = apply(identity(), M)
        assert is_isomorphic(M, N)
        assert reps == [(v,) for v in range(M.size)]


def test_reversal_of_path():
    N, _ = apply(reversal(), PATH)
    assert N == REV_PATH
    assert find_isomorphisms(N, REV_PATH)


def test_pair_multiset_interpretation_has_three_classes():
    I = Interpretation.build(EMPTY, GRAPH, 2, "x1=x1", "((x1=y1 & x2=y2) | (x1=y2 & x2=y1))", {})
    N, reps = apply(I, FinStructure.graph(2))
    assert N.size == 3
    # unordered pairs with repetition from 2 elements, least tuples
    assert reps == [(0, 0), (0, 1), (1, 1)]


def test_apply_errors():
    M = FinStructure.graph(2, [(0, 1)])
    with pytest.raises(EmptyDomainError):
        apply(Interpretation.build(GRAPH, GRAPH, 1, "~x=x", "x=y", {"E": "E(x,y)"}), M)
    with pytest.raises(NotEquivalenceOnDomain):
        apply(Interpretation.build(GRAPH, GRAPH, 1, "x=x", "E(x,y)", {"E": "E(x,y)"}), M)
    with pytest.raises(NotCongruenceOnDomain):
        # everything identified, but E does not hold uniformly
        apply(Interpretation.build(GRAPH, GRAPH, 1, "x=x", "(x=x & y=y)", {"E": "E(x,y)"}), M)


def test_apply_requires_host_relations():
    with pytest.raises(SignatureError):
        apply(identity(), FinStructure.build(2))


def test_parameters():
    I = Interpretation.build(GRAPH, GRAPH, 1, "~x=p1", "x=y", {"E": "E(x,y)"}, params=[0])
    N, reps = apply(I, PATH)
    assert N.size == 2 and reps == [(1,), (2,)]
    assert N.relations["E"] == {(0, 1)}
    with pytest.raises(InterpretationError):
        Interpretation.build(GRAPH, GRAPH, 1, "x=x", "x=y", {"E": "E(x,y)"}, params={"p__1": 0})


def test_validation_of_variable_counts():
    with pytest.raises(InterpretationError):
        Interpretation(GRAPH, GRAPH, 1, Definition(("x", "y"), Eq("x", "y")),
                       Definition(("x", "y"), Eq("x", "y")),
                       {"E": Definition(("x", "y"), Rel("E", ("x", "y")))})
    with pytest.raises(InterpretationError):
        Interpretation.build(GRAPH, GRAPH, 1, "x=x", "x=y", {})
    with pytest.raises(InterpretationError):
        Interpretation.build(GRAPH, GRAPH, 1, "x=z", "x=y", {"E": "E(x,y)"})


def test_json_round_trip():
    for name in ("identity_e.json", "reversal.json"):
        I = Interpretation.from_json(load(name))
        assert Interpretation.from_json(I.to_json()) == I
    I = Interpretation.build(GRAPH, GRAPH, 2, "x1=x2", "(x1=y1 & x2=y2)", {"E": "E(x1,y2)"},
                             params=[1])
    back = Interpretation.from_json(json.loads(json.dumps(I.to_json())))
    assert back == I


def test_arity_inferred_without_source():
    I = Interpretation.from_json({"target": "E/2", "dimension": 1, "domain": "x=x",
                                  "equality": "x=y", "relations": {"E": "E(y,x)"}})
    assert I.source == GRAPH


# -- compose -----------------------------------------------------------------

def test_compose_identity_is_neutral():
    J = reversal()
    C = compose(identity(), J)
    rng = random.Random(3)
    for _ in range(20):
        M = random_structure(rng, GRAPH, rng.randint(1, 4))
        assert is_isomorphic(apply(C, M)[0], apply(J, M)[0])


def test_double_reversal_restores_path():
    C = compose(reversal(), reversal())
    assert is_isomorphic(apply(C, PATH)[0], PATH)


def _coordinatewise(k):
    if k == 1:
        return Interpretation.build(EMPTY, EMPTY, 1, "x=x", "x=y", {})
    eq = f"x1=y1"
    for i in range(2, k + 1):
        eq = f"({eq} & x{i}=y{i})"
    return Interpretation.build(EMPTY, EMPTY, k, "x1=x1", eq, {})


@given(st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=9)
def test_dimensions_multiply(ki, kj):
    C = compose(_coordinatewise(ki), _coordinatewise(kj))
    assert C.dimension == ki * kj
    assert apply(C, FinStructure.build(2))[0].size == 2 ** (ki * kj)


def test_compose_signature_mismatch():
    J = Interpretation.build(EMPTY, GRAPH, 1, "x=x", "x=y", {})
    with pytest.raises(SignatureError):
        compose(reversal(), J)


def test_compose_with_outer_parameters():
    I = Interpretation.build(GRAPH, GRAPH, 1, "~x=p1", "x=y", {"E": "E(x,y)"}, params=[0])
    J = reversal()
    with pytest.raises(InterpretationError):
        compose(I, J)
    C = compose(I, J, PATH)
    direct = apply(I, apply(J, PATH)[0])[0]
    assert is_isomorphic(apply(C, PATH)[0], direct)


@given(st.integers(0, 2 ** 32))
@settings(max_examples=40)
def test_functoriality(seed):
    rng = random.Random(seed)
    kj = rng.randint(1, 2)
    M = random_structure(rng, GRAPH, rng.randint(1, 3 if kj == 1 else 2))
    I = random_interpretation(rng, GRAPH, GRAPH, k=1)
    J = random_interpretation(rng, GRAPH, GRAPH, k=kj)
    try:
        inner = apply(J, M)[0]
        outer = apply(I, inner)[0]
    except InterpretationError:
        return
    assert is_isomorphic(apply(compose(I, J), M)[0], outer)


@given(st.integers(0, 2 ** 32))
@settings(max_examples=60)
def test_translation_semantics(seed):
    rng = random.Random(seed)
    M = random_structure(rng, GRAPH, rng.randint(1, 4))
    I = random_interpretation(rng, GRAPH, GRAPH, k=rng.randint(1, 2))
    try:
        N, _ = apply(I, M)
    except InterpretationError:
        return
    phi = random_sentence(rng, GRAPH, rng.randint(0, 3))
    assert evaluate(N, phi) == evaluate(M, translate(phi, I))


# -- theories ----------------------------------------------------------------

def test_reflexivity_axiom_always_passes():
    T = Theory.parse("refl", GRAPH, ["Ax.x=x"])
    rng = random.Random(4)
    for _ in range(20):
        M = random_structure(rng, GRAPH, rng.randint(1, 3))
        I = random_interpretation(rng, GRAPH, GRAPH)
        try:
            apply(I, M)
        except InterpretationError:
            continue
        assert check_theory_interpretation(I, T, M).holds


def test_one_class_fails_two_distinct():
    T = Theory.parse("two", GRAPH, ["Ex.Ey.~x=y"])
    I = Interpretation.build(GRAPH, GRAPH, 1, "x=x", "(x=x & y=y)", {"E": "(x=x & y=y)"})
    rep = check_theory_interpretation(I, T, FinStructure.graph(3))
    assert not rep.holds and rep.checks[0].holds is False


def test_identity_report_equals_direct_evaluation():
    T = Theory.from_json(load("t_noloop.json"))
    for M in all_graphs(2):
        rep = check_theory_interpretation(identity(), T, M)
        assert [c.holds for c in rep.checks] == [evaluate(M, a) for a in T.axioms]


def test_axioms_must_be_sentences():
    with pytest.raises(InterpretationError):
        Theory.parse("bad", GRAPH, ["E(x,x)"])


def test_disjunction_size_and_model_class():
    T1 = Theory.from_json(load("t_loop.json"))
    T2 = Theory.from_json(load("t_noloop.json"))
    D = theory_disjunction(T1, T2)
    assert len(D.axioms) == len(T1.axioms) * len(T2.axioms)
    for n in range(1, 4):
        for M in all_graphs(n):
            assert models(M, D) == (models(M, T1) or models(M, T2))
            assert models(M, D)
            assert models(M, theory_disjunction(T1, T1)) == models(M, T1)


def test_disjunction_signature_mismatch():
    with pytest.raises(SignatureError):
        theory_disjunction(Theory.parse("a", GRAPH, []), Theory.parse("b", EMPTY, []))


# -- mutual, bi-interpretation, synonymy -------------------------------------

def test_identity_is_mutual():
    rep = check_mutual(PATH, PATH, identity(), identity())
    assert rep.mutual and rep.m_bar_iso and rep.n_bar_iso


def test_path_and_reversal_are_mutual():
    rep = check_mutual(PATH, REV_PATH, reversal(), reversal())
    assert rep.mutual and is_isomorphic(rep.m_bar, PATH) and is_isomorphic(rep.n_bar, REV_PATH)


def test_v2_and_edgeless_are_not_mutual():
    V2, edgeless = FinStructure.graph(2, [(0, 1)]), FinStructure.graph(2)
    # no depth-2 definable data in the edgeless pair yields a copy of V2
    assert interpretable_in(V2, edgeless, 2) is None
    # the converse direction exists, so the failure is one-sided
    assert interpretable_in(edgeless, V2, 1) is not None


def test_bi_examples():
    assert check_bi(BiInterpretation.from_json(load("bi_identity.json"), GRAPH, GRAPH), PATH, PATH)
    B = BiInterpretation.from_json(load("bi_reversal.json"), GRAPH, GRAPH)
    assert check_bi(B, CYCLE, CYCLE.relabel([0, 2, 1]))
    bad = BiInterpretation.from_json(load("bi_constant.json"), GRAPH, GRAPH)
    rep = bi_report(bad, CYCLE, CYCLE.relabel([0, 2, 1]))
    assert rep.mutual.mutual and not rep.holds
    assert any("related to" in d for d in rep.diagnostics)


def test_synonymy_examples():
    assert check_synonymy(BiInterpretation.from_json(load("bi_identity.json"), GRAPH, GRAPH), PATH, PATH)
    assert check_synonymy(BiInterpretation.from_json(load("bi_reversal.json"), GRAPH, GRAPH), PATH, REV_PATH)
    # two-dimensional interpretations never qualify
    I = Interpretation.build(GRAPH, GRAPH, 2, "x1=x2", "x1=y1", {"E": "E(x1,y1)"})
    B = BiInterpretation(I, identity(), Definition(("x", "y1", "y2"), Eq("x", "y1")),
                         Definition(("x", "y1", "y2"), Eq("x", "y1")))
    assert check_bi(B, PATH, PATH)
    assert not check_synonymy(B, PATH, PATH)


def test_implication_chain():
    cases = []
    for name in ("bi_identity.json", "bi_reversal.json", "bi_constant.json"):
        B = BiInterpretation.from_json(load(name), GRAPH, GRAPH)
        for M, N in ((PATH, PATH), (PATH, REV_PATH), (CYCLE, CYCLE), (PATH, CYCLE)):
            cases.append((B, M, N))
    seen = set()
    for B, M, N in cases:
        mut = check_mutual(M, N, B.I, B.J).mutual
        bi = check_bi(B, M, N)
        syn = check_synonymy(B, M, N)
        assert not syn or bi
        assert not bi or mut
        seen.add((syn, bi, mut))
    assert (True, True, True) in seen and (False, False, True) in seen
    assert (False, False, False) in seen


# -- Scott reduction ---------------------------------------------------------

ZERO = "~Ez.E(z,{v})"
ONE = "(Ez.E(z,{v}) & Az.Aw.((E(z,{v}) & E(w,{v})) -> z=w))"
TWO = "Ez.Ew.((E(z,{v}) & E(w,{v})) & ~z=w)"
# equal cardinality, for sets with at most two members
CARD = "((({zx} & {zy}) | ({ox} & {oy})) | ({tx} & {ty}))".format(
    zx=ZERO.format(v="x"), zy=ZERO.format(v="y"), ox=ONE.format(v="x"), oy=ONE.format(v="y"),
    tx=TWO.format(v="x"), ty=TWO.format(v="y"))


def test_scott_identity_equality_is_preserved():
    # singleton classes {x} are coded by {x}, which V_n holds only for x in V_(n-1)
    I = Interpretation.build(GRAPH, GRAPH, 1, "Ey.E(x,y)", "x=y", {"E": "E(x,y)"})
    for n in (2, 3, 4):
        V = v_structure(n)
        R = scott_reduce(I, V)
        assert is_isomorphic(apply(R, V)[0], apply(I, V)[0])
    with pytest.raises(ScottClassMissing):
        scott_reduce(identity(), v_structure(3))


def test_scott_equal_cardinality_in_v3():
    V = v_structure(3)   # elements are Ackermann codes 0..3
    I = Interpretation.build(EMPTY, GRAPH, 1, "x=x", CARD, {})
    classes = {sc.members: sc for sc in scott_classes(I, V)}
    one = classes[(1, 2)]
    # {∅} has rank 1, {{∅}} rank 2: the minimal part is {{∅}}, coded by 2
    assert one.minimal == (1,) and one.code == 2
    assert classes[(0,)].code == 1
    # the two-element class needs {{∅,{∅}}}, which is not in V3
    assert classes[(3,)].code is None
    with pytest.raises(ScottClassMissing):
        scott_reduce(I, V)


def test_scott_reduction_preserves_the_quotient():
    V = v_structure(4)
    I = Interpretation.build(EMPTY, GRAPH, 1, "x=x", CARD, {})
    R = scott_reduce(I, V)
    N, _ = apply(R, V)
    assert N.size == apply(I, V)[0].size
    im = interpret(R, V)
    assert len(im.tuples) == N.size   # reduced equality is identity


def test_scott_requires_set_structure():
    with pytest.raises(InterpretationError):
        scott_reduce(identity(), CYCLE)
