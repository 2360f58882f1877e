"""interpres command line.

Exit status: 0 when every check passes, 1 when a check fails or errors,
2 on usage errors, 3 when an input cannot be loaded or validated.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Callable

from . import acceptance, hf, mathias
from .interp import (
    BiInterpretation, Interpretation, InterpretationError, Theory, bi_report, check_mutual,
    check_synonymy, check_theory_interpretation, compose, interpret, scott_reduce, theory_disjunction,
    translate,
)
from .logic import LogicError, Signature, definable_relations, evaluate, parse_formula, render
from .report import Check, Report
from .structures import (
    DEFAULT_ISO_CAP, EqRelation, FinStructure, StructureError, check_congruence,
    congruence_violations, find_isomorphisms, is_extensional, is_isomorphic, is_wellfounded,
    quotient,
)
from .tower import DEFAULT_CAP_BITS

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3

# failures raised by the library while running a check (as opposed to loading inputs)
CHECK_ERRORS = (InterpretationError, StructureError, LogicError, hf.HFError, mathias.MathiasError,
                OverflowError, RecursionError)


class InputError(Exception):
    pass


# -- input loading -----------------------------------------------------------

def load_json(arg: str) -> Any:
    """A JSON file path, or an inline JSON document."""
    try:
        if arg.lstrip().startswith(("{", "[")):
            return json.loads(arg)
        return json.loads(Path(arg).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg}: invalid JSON ({exc})") from exc


def _wrap(what: str, fn: Callable, *args, **kw):
    try:
        return fn(*args, **kw)
    except InputError:
        raise
    except (LogicError, StructureError, InterpretationError, hf.HFError, KeyError, TypeError,
            ValueError) as exc:
        raise InputError(f"{what}: {exc}") from exc


def load_structure(arg: str) -> FinStructure:
    return _wrap(f"structure {arg}", FinStructure.from_json, load_json(arg))


def load_eq(arg: str, n: int) -> EqRelation:
    data = load_json(arg)

    def build():
        if isinstance(data, list) or "classes" in data:
            classes = data if isinstance(data, list) else data["classes"]
            eq = EqRelation.from_classes(classes)
        else:
            eq = EqRelation(data["pairs"], data.get("domain", range(n)))
        return eq
    return _wrap(f"equivalence {arg}", build)


def load_interp(arg: str, source: Signature | None = None,
                target: Signature | None = None) -> Interpretation:
    return _wrap(f"interpretation {arg}", Interpretation.from_json, load_json(arg),
                 source=source, target=target)


def load_sig(text: str | None) -> Signature | None:
    return None if text is None else _wrap("signature", Signature.parse, text)


def load_formula(text: str, sig: Signature | None):
    return _wrap("formula", parse_formula, text, sig)


def load_hf(text: str) -> hf.HFSet:
    text = text.strip()
    if text.isdigit():
        return _wrap("set code", hf.ack_decode, int(text))
    return _wrap("set literal", hf.parse_hf, text)


def load_pair(arg: str) -> hf.CodedPair:
    if arg.strip().startswith("{") and not arg.strip().startswith('{"'):
        return hf.encode_coded_pair(load_hf(arg))
    return _wrap(f"coded pair {arg}", hf.CodedPair.from_json, load_json(arg))


def load_theory(arg: str) -> Theory:
    return _wrap(f"theory {arg}", Theory.from_json, load_json(arg))


def parse_assignment(items: list[str] | None) -> dict[str, int]:
    out = {}
    for item in items or []:
        for part in item.split(","):
            name, _, value = part.partition("=")
            if not value.strip().isdigit():
                raise InputError(f"bad assignment {part!r}; use name=element")
            out[name.strip()] = int(value)
    return out


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _dump(value: Any) -> str:
    return json.dumps(value, sort_keys=False)


# -- logic -------------------------------------------------------------------

def cmd_logic_parse(args, rep: Report):
    phi = load_formula(args.formula, load_sig(args.sig))
    rep.result = render(phi)
    rep.text = rep.result
    rep.show_checks = False
    rep.add("well-formed", True)


def cmd_logic_eval(args, rep: Report):
    M = load_structure(args.structure)
    phi = load_formula(args.formula, M.signature)
    value = evaluate(M, phi, parse_assignment(args.assign))
    rep.result = value
    rep.text = "true" if value else "false"
    rep.show_checks = False
    rep.add("holds", value)


def cmd_logic_definable(args, rep: Report):
    M = load_structure(args.structure)
    rels = definable_relations(M, args.arity, args.depth, _ints(args.params))
    out = sorted((sorted(list(t) for t in r) for r in rels), key=lambda r: (len(r), r))
    rep.result = out
    rep.text = f"{len(out)} relations\n" + "\n".join(_dump(r) for r in out)
    rep.show_checks = False
    rep.add("enumerated", True, len(out))


# -- model -------------------------------------------------------------------

def cmd_model_quotient(args, rep: Report):
    M = load_structure(args.structure)
    eq = load_eq(args.eq, M.size)
    probs = eq.problems()
    if not rep.add("equivalence", not probs, probs[:5] or None):
        return
    mode = "profile" if args.profile else "strict"
    cong = check_congruence(M, eq, mode)
    if not rep.add("congruence", cong, congruence_violations(M, eq, mode=mode) or None):
        return
    Q, proj = quotient(M, eq, mode)
    rep.result = {"structure": Q.to_json(), "projection": proj}
    rep.text = _dump(rep.result)


def cmd_model_iso(args, rep: Report):
    A, B = load_structure(args.a), load_structure(args.b)
    isos = find_isomorphisms(A, B, cap=args.max_size, limit=None if args.all else 1)
    rep.result = [list(f) for f in isos]
    rep.text = "\n".join(_dump(f) for f in rep.result) or "no isomorphism"
    rep.add("isomorphic", bool(isos), rep.result[0] if isos else None)


def cmd_model_wf(args, rep: Report):
    M = load_structure(args.structure)
    rel = _relation(M, args.rel)
    rep.result = is_wellfounded(rel, M.size)
    rep.add("well-founded", rep.result)


def cmd_model_ext(args, rep: Report):
    M = load_structure(args.structure)
    rel = _relation(M, args.rel)
    eq = load_eq(args.eq, M.size) if args.eq else None
    rep.result = is_extensional(rel, eq, M.size)
    rep.add("extensional", rep.result)


def _relation(M: FinStructure, name: str):
    if M.arities.get(name) != 2:
        raise InputError(f"structure has no binary relation {name!r}")
    return sorted(M.relations[name])


# -- interp ------------------------------------------------------------------

def cmd_interp_translate(args, rep: Report):
    I = load_interp(args.interp, load_sig(args.source), load_sig(args.target))
    phi = load_formula(args.formula, I.source)
    rep.result = render(translate(phi, I))
    rep.text = rep.result
    rep.show_checks = False
    rep.add("translated", True)


def cmd_interp_apply(args, rep: Report):
    M = load_structure(args.structure)
    I = load_interp(args.interp, load_sig(args.source), M.signature)
    im = interpret(I, M)
    rep.result = {"structure": im.structure.to_json(), "representatives": [list(t) for t in im.reps]}
    rep.text = _dump(rep.result)
    rep.show_checks = False
    rep.add("interpreted", True, im.structure.size)


def cmd_interp_compose(args, rep: Report):
    host = load_structure(args.host) if args.host else None
    J = load_interp(args.inner, None, host.signature if host else None)
    I = load_interp(args.outer, None, J.source)
    C = compose(I, J, host)
    rep.result = C.to_json()
    rep.text = json.dumps(rep.result, indent=2)
    rep.show_checks = False
    rep.add("composed", True, C.dimension)


def _pair_inputs(args):
    M, N = load_structure(args.m), load_structure(args.n)
    return M, N


def cmd_interp_check_mutual(args, rep: Report):
    M, N = _pair_inputs(args)
    I = load_interp(args.i, M.signature, N.signature)
    J = load_interp(args.j, N.signature, M.signature)
    mut = check_mutual(M, N, I, J, cap=args.max_size)
    _mutual_checks(rep, mut)
    rep.result = _mutual_json(mut)


def _mutual_checks(rep: Report, mut):
    rep.add("J interprets N in M", mut.n_in_m, list(mut.j_witness) if mut.j_witness else None)
    rep.add("I interprets M in N", mut.m_in_n, list(mut.i_witness) if mut.i_witness else None)
    for e in mut.errors:
        rep.error("application", e)


def _mutual_json(mut) -> dict:
    return {"mutual": mut.mutual, "n_in_m": mut.n_in_m, "m_in_n": mut.m_in_n,
            "j_witness": list(mut.j_witness) if mut.j_witness else None,
            "i_witness": list(mut.i_witness) if mut.i_witness else None,
            "m_bar": mut.m_bar.to_json() if mut.m_bar else None,
            "n_bar": mut.n_bar.to_json() if mut.n_bar else None,
            "m_bar_isomorphic": mut.m_bar_iso, "n_bar_isomorphic": mut.n_bar_iso,
            "errors": mut.errors}


def _load_bi(args, M, N) -> BiInterpretation:
    return _wrap(f"bi-interpretation {args.bi}", BiInterpretation.from_json, load_json(args.bi),
                 M.signature, N.signature)


def cmd_interp_check_bi(args, rep: Report):
    M, N = _pair_inputs(args)
    B = _load_bi(args, M, N)
    br = bi_report(B, M, N, cap=args.max_size)
    _mutual_checks(rep, br.mutual)
    if br.mutual.mutual:
        for side, label, fmap in (("source", "M -> M-bar", br.source_map),
                                  ("target", "N -> N-bar", br.target_map)):
            diag = "; ".join(d for d in br.diagnostics if not d.startswith(
                "target" if side == "source" else "source")) or None
            rep.add(f"{side} iso formula defines {label}", fmap is not None,
                    fmap if fmap is not None else diag)
    rep.result = {"bi": br.holds, "source_map": br.source_map, "target_map": br.target_map,
                  "diagnostics": br.diagnostics, "mutual": _mutual_json(br.mutual)}


def cmd_interp_check_syn(args, rep: Report):
    M, N = _pair_inputs(args)
    B = _load_bi(args, M, N)
    br = bi_report(B, M, N, cap=args.max_size)
    rep.add("bi-interpretation", br.holds, br.diagnostics or None)
    syn = br.holds and check_synonymy(B, M, N, cap=args.max_size)
    rep.add("synonymy", syn)
    rep.result = {"bi": br.holds, "synonymy": syn}


def cmd_interp_scott(args, rep: Report):
    M = load_structure(args.structure)
    I = load_interp(args.interp, load_sig(args.source), M.signature)
    R = scott_reduce(I, M, args.rel)
    before, after = interpret(I, M), interpret(R, M)
    identity = all(t[0] == after.reps[c][0] for t, c in after.class_index.items())
    rep.add("reduced interpretation is isomorphic", is_isomorphic(before.structure, after.structure,
                                                                  cap=args.max_size))
    rep.add("reduced equality is identity", identity)
    rep.result = {"interpretation": R.to_json(), "codes": [t[0] for t in after.reps]}


def cmd_interp_check_theory(args, rep: Report):
    M = load_structure(args.structure)
    T = load_theory(args.theory)
    I = load_interp(args.interp, T.signature, M.signature)
    tr = check_theory_interpretation(I, T, M)
    for c in tr.checks:
        rep.add(c.axiom, c.holds, c.translated)
    rep.result = {"theory": tr.theory, "holds": tr.holds}


def cmd_interp_theory_or(args, rep: Report):
    T1, T2 = load_theory(args.t1), load_theory(args.t2)
    T = theory_disjunction(T1, T2)
    rep.result = T.to_json()
    rep.text = json.dumps(rep.result, indent=2)
    rep.show_checks = False
    rep.add("size is the product", len(T.axioms) == len(T1.axioms) * len(T2.axioms))


# -- hf ----------------------------------------------------------------------

def cmd_hf_encode(args, rep: Report):
    x = load_hf(args.set)
    rep.result = hf.ack_encode(x)
    rep.text = str(rep.result)
    rep.show_checks = False
    rep.add("encoded", True)


def cmd_hf_decode(args, rep: Report):
    try:
        n = int(args.code)
    except ValueError as exc:
        raise InputError(f"not a natural number: {args.code!r}") from exc
    x = _wrap("decode", hf.ack_decode, n, args.decode_cap)
    rep.result = hf.render_hf(x)
    rep.text = rep.result
    rep.show_checks = False
    rep.add("decoded", True)


def cmd_hf_collapse(args, rep: Report):
    data = load_json(args.relation)
    try:
        if "domain" in data:
            M = FinStructure.from_json(data)
            n, edges = M.size, sorted(M.relations.get(args.rel, ()))
        else:
            n, edges = int(data["n"]), [tuple(e) for e in data["E"]]
        eq = EqRelation.from_classes(data["eq"]) if "eq" in data else None
    except (KeyError, TypeError, ValueError, StructureError) as exc:
        raise InputError(f"relation {args.relation}: {exc}") from exc
    try:
        pi = hf.mostowski_collapse(n, edges, eq)
    except hf.InvalidRelationError as exc:
        rep.add("well-founded and extensional", False, str(exc))
        return
    rep.result = [hf.render_hf(x) for x in pi]
    rep.text = "\n".join(f"{i}: {s}" for i, s in enumerate(rep.result))
    rep.show_checks = False
    rep.add("collapsed", True)


def cmd_hf_code(args, rep: Report):
    if args.decode:
        c = load_pair(args.value)
        x = hf.decode_coded_pair(c)
        rep.result = hf.render_hf(x)
        rep.text = rep.result
    else:
        c = hf.encode_coded_pair(load_hf(args.value))
        rep.result = c.to_json()
        rep.text = _dump(rep.result)
    rep.show_checks = False
    rep.add("coded", True)


def cmd_hf_member(args, rep: Report):
    c1, c2 = load_pair(args.pair1), load_pair(args.pair2)
    for c in (c1, c2):
        _wrap("coded pair", c.validate)
    rep.result = hf.coded_member(c1, c2)
    rep.text = "true" if rep.result else "false"
    rep.show_checks = False
    rep.add("member", rep.result)


# -- mathias -----------------------------------------------------------------

def cmd_mathias_b(args, rep: Report):
    v = mathias.tower_b(args.k, args.n, args.tower_cap)
    rep.result = str(v)
    rep.text = rep.result
    rep.show_checks = False
    rep.add("computed", True)


def cmd_mathias_vcard(args, rep: Report):
    rep.result = str(mathias.vcard(args.n, args.tower_cap))
    rep.text = rep.result
    rep.show_checks = False
    rep.add("computed", True)


def _set_or_stage(args) -> hf.HFSet:
    if args.vstage is not None:
        return _wrap("stage", lambda: hf.HFSet.of(hf.v_stage(args.vstage)))
    if args.set is None:
        raise InputError("give a set literal or --vstage M")
    return load_hf(args.set)


def cmd_mathias_profile(args, rep: Report):
    x = _set_or_stage(args)
    p = mathias.growth_profile(x)
    rep.result = p.to_json()
    rep.text = _dump(rep.result)
    rep.show_checks = False
    rep.add("profiled", True)


def cmd_mathias_min_depth(args, rep: Report):
    if args.vstage is not None and args.set is None:
        rep.result = mathias.min_depth_vstage(args.vstage)
    else:
        rep.result = mathias.min_depth(_set_or_stage(args))
    rep.text = str(rep.result)
    rep.show_checks = False
    rep.add("computed", True)


def cmd_mathias_tower_sub(args, rep: Report):
    x = mathias.tower_sub(load_hf(args.set), load_hf(args.a))
    rep.result = hf.render_hf(x)
    rep.text = rep.result
    rep.show_checks = False
    rep.add("substituted", True)


def cmd_mathias_in_tower(args, rep: Report):
    x, a = load_hf(args.set), load_hf(args.a)
    rep.result = mathias.in_tower(x, a)
    rep.text = "true" if rep.result else "false"
    if args.descents:
        chains = mathias.terminal_descents(x)
        rep.text += "\n" + "\n".join(" > ".join(map(hf.render_hf, c)) for c in chains)
    rep.show_checks = False
    rep.add("in tower", rep.result)


def cmd_mathias_closure(args, rep: Report):
    if args.sample:
        sample = [load_hf(s) for s in args.sample]
    else:
        sample = _wrap("stage", mathias.transitive_sets, args.stage)
    res = mathias.fruitful_closure_check(args.K, sample)
    rep.result = {"K": res.K, "sample": res.sample_size, "checked": res.checked,
                  "violations": [str(v) for v in res.violations]}
    rep.add("closure clauses", res.holds, rep.result["violations"][:5] or res.checked)


# -- selftest ----------------------------------------------------------------

def cmd_selftest(args, rep: Report):
    only = set(_ints(args.only)) or None
    lines = []
    for r in acceptance.run_all(seed=args.seed, only=only):
        lines.append(r.line())
        rep.checks.append(_criterion_check(r))
        print(r.line(), file=sys.stderr if args.json else sys.stdout, flush=True)
    rep.result = lines
    rep.show_checks = False


def _criterion_check(r: acceptance.CriterionResult) -> Check:
    return Check(f"{r.number}. {r.name}", "pass" if r.ok else "fail", r.to_json())


# -- parser ------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                   help="emit the report as JSON")
    p.add_argument("--max-size", type=int, default=argparse.SUPPRESS,
                   help=f"isomorphism search cap (default {DEFAULT_ISO_CAP})")
    p.add_argument("--depth", type=int, default=argparse.SUPPRESS,
                   help="formula depth bound for enumeration (default 2)")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="seed for randomized runs (default 0)")
    p.add_argument("--tower-cap", type=int, default=argparse.SUPPRESS,
                   help=f"bit length where exact numbers become towers (default {DEFAULT_CAP_BITS})")
    p.add_argument("--decode-cap", type=int, default=argparse.SUPPRESS,
                   help=f"largest decodable code plus one (default {hf.DECODE_CAP})")
    return p


DEFAULTS = {"json": False, "max_size": DEFAULT_ISO_CAP, "depth": 2, "seed": 0,
            "tower_cap": DEFAULT_CAP_BITS, "decode_cap": hf.DECODE_CAP}


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="interpres", parents=[common],
                                     description="Interpretations between finite structures, "
                                                 "hereditarily finite sets and Mathias towers.")
    groups = parser.add_subparsers(dest="group", required=True, metavar="GROUP")

    def group(name, help_):
        g = groups.add_parser(name, help=help_, parents=[common])
        return g.add_subparsers(dest="action", required=True, metavar="ACTION")

    def cmd(sub, name, fn, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(fn=fn)
        return p

    logic = group("logic", "formulas and evaluation")
    p = cmd(logic, "parse", cmd_logic_parse, "parse and re-render a formula")
    p.add_argument("formula")
    p.add_argument("--sig", help='signature such as "E/2,c"')
    p = cmd(logic, "eval", cmd_logic_eval, "evaluate a formula in a structure")
    p.add_argument("structure")
    p.add_argument("formula")
    p.add_argument("--assign", action="append", help="x=0,y=1")
    p = cmd(logic, "definable", cmd_logic_definable, "relations definable up to --depth")
    p.add_argument("structure")
    p.add_argument("--arity", type=int, default=1)
    p.add_argument("--params", help="parameter elements, comma separated")

    model = group("model", "finite structures")
    p = cmd(model, "quotient", cmd_model_quotient, "quotient by an equivalence")
    p.add_argument("structure")
    p.add_argument("eq", help='{"classes": [[0,2],[1]]} or {"pairs": [...]}')
    p.add_argument("--profile", action="store_true",
                   help="accept classes with equal class-level occurrence profiles")
    p = cmd(model, "iso", cmd_model_iso, "isomorphisms between two structures")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--all", action="store_true", help="list every isomorphism")
    for name, fn, h in (("wf", cmd_model_wf, "well-foundedness of a binary relation"),
                        ("ext", cmd_model_ext, "extensionality of a binary relation")):
        p = cmd(model, name, fn, h)
        p.add_argument("structure")
        p.add_argument("--rel", default="E")
        if name == "ext":
            p.add_argument("--eq", help="equivalence file")

    ip = group("interp", "interpretations")
    p = cmd(ip, "translate", cmd_interp_translate, "translate a source formula")
    p.add_argument("interp")
    p.add_argument("formula")
    p.add_argument("--source")
    p.add_argument("--target")
    p = cmd(ip, "apply", cmd_interp_apply, "build the interpreted structure")
    p.add_argument("interp")
    p.add_argument("structure")
    p.add_argument("--source")
    p = cmd(ip, "compose", cmd_interp_compose, "OUTER after INNER")
    p.add_argument("outer")
    p.add_argument("inner")
    p.add_argument("--host", help="host structure, needed when OUTER has parameters")
    p = cmd(ip, "check-mutual", cmd_interp_check_mutual, "I interprets M in N, J interprets N in M")
    for a in ("m", "n", "i", "j"):
        p.add_argument(a)
    for name, fn, h in (("check-bi", cmd_interp_check_bi, "bi-interpretation check"),
                        ("check-syn", cmd_interp_check_syn, "synonymy check")):
        p = cmd(ip, name, fn, h)
        p.add_argument("m")
        p.add_argument("n")
        p.add_argument("bi")
    p = cmd(ip, "scott", cmd_interp_scott, "eliminate the equality by Scott classes")
    p.add_argument("interp")
    p.add_argument("structure")
    p.add_argument("--rel", default="E", help="membership relation")
    p.add_argument("--source")
    p = cmd(ip, "check-theory", cmd_interp_check_theory, "translated axioms in a host")
    p.add_argument("interp")
    p.add_argument("theory")
    p.add_argument("structure")
    p = cmd(ip, "theory-or", cmd_interp_theory_or, "pairwise disjunctions of two theories")
    p.add_argument("t1")
    p.add_argument("t2")

    hs = group("hf", "hereditarily finite sets")
    p = cmd(hs, "encode", cmd_hf_encode, "Ackermann code of a set literal")
    p.add_argument("set")
    p = cmd(hs, "decode", cmd_hf_decode, "set with the given Ackermann code")
    p.add_argument("code")
    p = cmd(hs, "collapse", cmd_hf_collapse, "Mostowski collapse of a relation")
    p.add_argument("relation", help='structure JSON or {"n":..,"E":[..]}; optional "eq" classes')
    p.add_argument("--rel", default="E")
    p = cmd(hs, "code", cmd_hf_code, "coded pair of a set, or decode with --decode")
    p.add_argument("value")
    p.add_argument("--decode", action="store_true")
    p = cmd(hs, "member", cmd_hf_member, "membership between coded pairs")
    p.add_argument("pair1")
    p.add_argument("pair2")

    mt = group("mathias", "growth classes and the Zermelo tower")
    p = cmd(mt, "b", cmd_mathias_b, "tower of k twos over n")
    p.add_argument("k", type=int)
    p.add_argument("n", type=int)
    p = cmd(mt, "vcard", cmd_mathias_vcard, "size of V_n")
    p.add_argument("n", type=int)
    for name, fn, h in (("profile", cmd_mathias_profile, "growth profile"),
                        ("min-depth", cmd_mathias_min_depth, "least bounding tower height")):
        p = cmd(mt, name, fn, h)
        p.add_argument("set", nargs="?")
        p.add_argument("--vstage", type=int, help="use the set V_M")
    p = cmd(mt, "tower-sub", cmd_mathias_tower_sub, "replace the empty set by A throughout")
    p.add_argument("set")
    p.add_argument("a")
    p = cmd(mt, "in-tower", cmd_mathias_in_tower, "every terminal descent passes through A")
    p.add_argument("set")
    p.add_argument("a")
    p.add_argument("--descents", action="store_true", help="list the terminal descents")
    p = cmd(mt, "closure", cmd_mathias_closure, "closure clauses on a sample of V_5")
    p.add_argument("K", type=int)
    p.add_argument("--stage", type=int, default=4, help="sample the transitive sets of V_stage")
    p.add_argument("--sample", nargs="+", help="explicit sample of set literals")

    p = groups.add_parser("selftest", help="run the acceptance suites", parents=[common])
    p.set_defaults(fn=cmd_selftest)
    p.add_argument("--only", help="suite numbers, comma separated")
    return parser


def run(argv: list[str] | None = None) -> tuple[int, Report | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_PASS), None
    for k, v in DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    name = " ".join(x for x in (args.group, getattr(args, "action", None)) if x)
    inputs = {k: v for k, v in vars(args).items() if k not in ("fn", "group", "action")}
    rep = Report(name, inputs)
    start = time.perf_counter()
    try:
        args.fn(args, rep)
    except InputError as exc:
        print(f"interpres: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except CHECK_ERRORS as exc:
        rep.error(name, f"{type(exc).__name__}: {exc}")
    rep.elapsed = time.perf_counter() - start
    if args.json:
        print(json.dumps(rep.to_json(), indent=2))
    else:
        out = rep.render()
        if out:
            print(out)
    return (EXIT_PASS if rep.passed else EXIT_FAIL), rep


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
