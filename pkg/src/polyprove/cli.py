"""Command-line interface: check, repl, serve, run-spec, and a unify debugger."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ParseError, ProverError, TacticError
from .pretty import term_str, ty_str
from .session import Session, check_file
from .surface import Parser, lex, parse_expr_text
from .terms import Meta, TySubst

EXIT_OK = 0
EXIT_PROOF_FAILURE = 1
EXIT_ILLFORMED = 2


def parse_type_list(text: str, sig, tyvars=()):
    from .elab import Elaborator

    out = []
    for part in text.split(","):
        p = Parser(lex(part.strip()))
        sty = p.ty()
        out.append(Elaborator(sig, tyvars=tyvars).elab_ty(sty))
    return out


def cmd_check(args) -> int:
    report = {"file": args.file, "theorems": [], "ok": False}
    try:
        session = check_file(args.file)
    except TacticError as e:
        return _fail(args, report, str(e), EXIT_PROOF_FAILURE)
    except ProverError as e:
        code = EXIT_PROOF_FAILURE if "open subgoal" in str(e) else EXIT_ILLFORMED
        return _fail(args, report, str(e), code)
    ok = True
    for rec in session.theorems:
        proved = not rec.state.skipped
        entry = {"name": rec.name, "params": list(rec.params), "proved": proved}
        ok = ok and proved
        if args.replay_types and proved:
            from .replay import soundness_harness
            from .tactics import finish_tree

            pool = parse_type_list(args.replay_types, session.sig)
            rep = soundness_harness(
                rec.name, rec.params, finish_tree(rec.state),
                session.sig, session.lemmas, pool,
            )
            entry["replays"] = [
                {"assignment": {k: ty_str(v) for k, v in a.items()}, "ok": good, "msg": m}
                for a, good, m in rep.results
            ]
            entry["replay_ok"] = rep.ok
            ok = ok and rep.ok
        report["theorems"].append(entry)
    report["ok"] = ok
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for entry in report["theorems"]:
            line = f"{entry['name']}: " + ("proved" if entry["proved"] else "SKIPPED")
            if "replay_ok" in entry:
                n = len(entry["replays"])
                line += f", {n}/{n} replays ok" if entry["replay_ok"] else ", REPLAY FAILED"
            print(line)
        print("ok" if ok else "failures detected")
    return EXIT_OK if ok else EXIT_PROOF_FAILURE


def _fail(args, report, msg, code) -> int:
    report["error"] = msg
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(f"error: {msg}", file=sys.stderr)
    return code


def cmd_repl(args) -> int:
    from .repl import repl
    from .session import Session

    base = os.path.dirname(os.path.abspath(args.file)) if args.file else "."
    session = Session(base_dir=base, show_instances=args.show_instances)
    if args.file:
        with open(args.file) as fh:
            session.load_text(fh.read(), interactive=True)
        print(session.render_state())
    repl(session)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import serve

    serve(args.port, base_dir=args.base_dir, static_dir=args.static, host=args.host)
    return EXIT_OK


def cmd_run_spec(args) -> int:
    from .elab import Elaborator
    from .speclog import parse_spec, solve, spec_signature
    from .terms import OBJ

    base = args.file
    if base.endswith(".sig") or base.endswith(".mod"):
        base = base[:-4]
    with open(base + ".sig") as fh:
        sig_text = fh.read()
    with open(base + ".mod") as fh:
        mod_text = fh.read()
    prog = parse_spec(sig_text, mod_text)
    sig = spec_signature(prog)
    elab = Elaborator(sig, mode="query")
    goal = elab.finish(elab.elab(parse_expr_text(args.query), OBJ), "query")
    from .terms import TermSubst, normalize

    qvars = elab.finish_vars()
    goal = TermSubst({n: m for n, m in qvars.items()}).apply(goal)
    out = solve(prog, sig, goal, args.depth)
    if out is None:
        print("no")
        return EXIT_PROOF_FAILURE
    if not out.theta.m:
        print("yes")
    for name, t in sorted(out.theta.m.items()):
        print(f"{name} = {term_str(t, sig)}")
    return EXIT_OK


def cmd_unify(args) -> int:
    from .elab import Elaborator
    from .unify import AmbiguousTypes, NoUnifier, Unifier, unify_terms

    from .surface import DTheorem, parse_dev_text

    session = Session(base_dir=".")
    if args.dev:
        with open(args.dev) as fh:
            for item in parse_dev_text(fh.read()):
                if not isinstance(item, DTheorem):  # declarations only
                    session.load_item(item)
    frozen = tuple(v.strip() for v in args.frozen.split(",")) if args.frozen else ()
    sig = session.sig

    from .terms import TyVar, normalize, term_ty_vars

    solvable_tv = set()

    def elab_side(text, tag):
        el = Elaborator(sig, tyvars=frozen, mode="query")
        t = normalize(el.phi.apply_term(el.elab(parse_expr_text(text), el.fresh_ty())))
        # leftover inference placeholders become solvable type variables
        ren = {}
        for v in term_ty_vars(t):
            if v.startswith("?"):
                ren[v] = TyVar(f"T{tag}{len(ren)}")
                solvable_tv.add(ren[v].name)
        t = TySubst(ren).apply_term(t)
        vs = {n: TySubst(ren).apply_term(m) for n, m in el.finish_vars().items()}
        return t, vs

    t1, v1 = elab_side(args.left, "l")
    t2, v2 = elab_side(args.right, "r")
    solvable = set(v1) | set(v2)
    out = unify_terms(t1, t2, solvable, sig, frozen_tv=set(frozen), solvable_tv=solvable_tv)
    if isinstance(out, Unifier):
        print("unifiable")
        for name in sorted(solvable):
            m = (v1 | v2)[name]
            print(f"  {name} = {term_str(out.theta.apply(m), sig)}")
        for v, ty in sorted(out.phi.m.items()):
            print(f"  {v} := {ty_str(ty)}")
    elif isinstance(out, NoUnifier):
        print(f"never unifiable: {out.reason}")
    elif isinstance(out, AmbiguousTypes):
        print(f"ambiguous: depends on frozen type variables ({out.equation})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyprove")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="batch-check a development file")
    p.add_argument("file")
    p.add_argument("--replay-types", default="",
                   help='ground replay pool, e.g. "i, list i, i -> i"')
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("repl", help="interactive session")
    p.add_argument("file", nargs="?")
    p.add_argument("--show-instances", action="store_true",
                   help="print constant type instances in full")
    p.set_defaults(fn=cmd_repl)

    p = sub.add_parser("serve", help="serve the JSON session protocol")
    p.add_argument("--port", type=int, default=7432)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--base-dir", default=".")
    p.add_argument("--static", default="")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("run-spec", help="run a specification-logic query")
    p.add_argument("file", help="path to NAME(.sig/.mod)")
    p.add_argument("--query", required=True)
    p.add_argument("--depth", type=int, default=10)
    p.set_defaults(fn=cmd_run_spec)

    p = sub.add_parser("unify", help="debug the unifier on two terms")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--dev", default="", help="development file providing declarations")
    p.add_argument("--frozen", default="", help="comma-separated frozen type variables")
    p.set_defaults(fn=cmd_unify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_ILLFORMED
    except ProverError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ILLFORMED


if __name__ == "__main__":
    sys.exit(main())
