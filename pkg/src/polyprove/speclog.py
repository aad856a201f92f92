"""The Horn specification logic: programs, interpreter, and embedding.

Programs are collections of definite clauses over a lifted vocabulary.
They can be executed standalone by depth-bounded backchaining, or
embedded for reasoning: each definite clause becomes a clause for the
goal-reduction predicate, parameterized at the clause level by the type
variables of its head, and goals are reflected through the derivability
predicate indexed by a numeric height.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .defs import DefBlock, SchematicClause, check_block_or_raise, prove_block
from .elab import Elaborator
from .errors import ElabError, NonPatternError, ProverError
from .formulas import TOP, conj, exists_close
from .surface import ModClause, parse_mod_text, parse_sig_text
from .terms import (
    Const,
    Eigen,
    Meta,
    NAT,
    OBJ,
    PROP,
    Signature,
    Term,
    TermSubst,
    Ty,
    TySchema,
    TySubst,
    TyVar,
    app,
    arrow,
    free_metas,
    normalize,
    spine,
    strip_arrow,
    term_ty_vars,
    ty_vars,
)
from .unify import Unifier, unify_terms


class TyvarEscape(ProverError):
    code = "tyvar-escape"


@dataclass(frozen=True)
class DefiniteClause:
    ty_params: tuple  # tuple[str, ...]
    binder: tuple  # tuple[(name, Ty), ...]
    head: Term  # atomic, type o, binder variables as Metas
    goal: Term  # tt | atom | conjunction via &&, atoms unwrapped


@dataclass(frozen=True)
class SpecProgram:
    name: str
    kinds: tuple  # tuple[(name, arity), ...]
    consts: tuple  # tuple[(name, TySchema), ...]
    clauses: tuple  # tuple[DefiniteClause, ...]


def _promote_placeholders(elab: Elaborator, head: Term, goals, binder_vars):
    """Residual inference placeholders become named clause parameters."""
    head = normalize(elab.phi.apply_term(head))
    goals = [normalize(elab.phi.apply_term(g)) for g in goals]
    binder_vars = {n: Meta(n, elab.phi.apply_ty(m.ty)) for n, m in binder_vars.items()}
    names = {}
    pool = [chr(ord("A") + k) for k in range(26)]
    used = set()
    for v in term_ty_vars(head) + [w for g in goals for w in term_ty_vars(g)]:
        if v.startswith("?") and v not in names:
            for cand in pool:
                if cand not in used:
                    names[v] = cand
                    used.add(cand)
                    break
        elif not v.startswith("?"):
            used.add(v)
    ren = TySubst({v: TyVar(n) for v, n in names.items()})
    head = ren.apply_term(head)
    goals = [ren.apply_term(g) for g in goals]
    binder_vars = {n: Meta(n, ren.apply_ty(m.ty)) for n, m in binder_vars.items()}
    return head, goals, binder_vars


def parse_spec(sig_text: str, mod_text: str, base: Optional[Signature] = None) -> SpecProgram:
    """Parse and elaborate a .sig/.mod pair into a program."""
    from .defs import declare_base_constants

    sigf = parse_sig_text(sig_text)
    modf = parse_mod_text(mod_text)
    if sigf.name != modf.name:
        raise ElabError(f"sig is for {sigf.name!r} but module is {modf.name!r}")
    sig = Signature()
    declare_base_constants(sig)
    kinds = []
    for k in sigf.kinds:
        sig.declare_tycon(k.name, k.arity)
        kinds.append((k.name, k.arity))
    consts = []
    for name, sty in sigf.types:
        helper = Elaborator(sig)
        implicit: dict = {}
        body = helper.elab_ty(sty, implicit=implicit)
        schema = TySchema(tuple(implicit), body)
        sig.declare_const(name, schema)
        consts.append((name, schema))
    clauses = []
    for mc in modf.clauses:
        clauses.append(_elab_clause(sig, mc))
    return SpecProgram(sigf.name, tuple(kinds), tuple(consts), tuple(clauses))


def _elab_clause(sig: Signature, mc: ModClause) -> DefiniteClause:
    elab = Elaborator(sig, mode="clause")
    head = elab.elab(mc.head, OBJ)
    goals = [elab.elab(g, OBJ) for g in mc.goals]
    head, goals, binder_vars = _promote_placeholders(elab, head, goals, elab.new_vars)
    h, _ = spine(head)
    if not isinstance(h, Const) or sig.consts[h.name].logical:
        raise ElabError("clause head must be a declared predicate")
    _, target = strip_arrow(sig.const_schema(h.name).instantiate(h.tyargs))
    if target != OBJ:
        raise ElabError(f"clause head {h.name} does not target the goal sort")
    head_tvs = set(term_ty_vars(head))
    for g in goals:
        extra = [v for v in term_ty_vars(g) if v not in head_tvs]
        if extra:
            raise TyvarEscape(
                f"type variables {extra} of the clause body do not occur in its head"
            )
        for name in free_metas(g):
            if name not in free_metas(head):
                raise ElabError(f"clause variable {name} does not occur in the head")
    goal = Const("tt") if not goals else _fold_conj(goals)
    binder = tuple((n, m.ty) for n, m in binder_vars.items())
    params = tuple(term_ty_vars(head))
    return DefiniteClause(params, binder, head, goal)


def _fold_conj(goals):
    out = goals[-1]
    for g in reversed(goals[:-1]):
        out = app(Const("&&"), (g, out))
    return out


# ---------------------------------------------------------------------------
# Standalone interpreter


@dataclass(frozen=True)
class Success:
    theta: TermSubst
    phi: TySubst


def solve(prog: SpecProgram, sig: Signature, goal: Term, depth: int) -> Optional[Success]:
    """First solution of a depth-bounded backchaining search, or None.

    Depth follows derivation height: trivial truth is free, conjunctions
    and backchaining steps each cost one level.
    """
    queries = set(free_metas(goal))
    counter = [0]

    def backchain(g: Term, d: int, theta: TermSubst, solvable: set) -> Iterator[TermSubst]:
        g = normalize(theta.apply(g))
        h, args = spine(g)
        if isinstance(h, Const) and h.name == "tt":
            yield theta
            return
        if isinstance(h, Const) and h.name == "&&":
            if d <= 0:
                return
            for th1 in backchain(args[0], d - 1, theta, solvable):
                yield from backchain(args[1], d - 1, th1, solvable)
            return
        if d <= 0:
            return
        for clause in prog.clauses:
            counter[0] += 1
            k = counter[0]
            tyren = TySubst({v: TyVar(f"?p{k}:{v}") for v in clause.ty_params})
            ren = {}
            for n, ty in clause.binder:
                ren[n] = Meta(f"?m{k}:{n}", tyren.apply_ty(ty))
            sub = TermSubst(ren)
            head = sub.apply(tyren.apply_term(clause.head))
            body = sub.apply(tyren.apply_term(clause.goal))
            grown = solvable | {m.name for m in ren.values()}
            out = unify_terms(
                g, head, grown, sig,
                solvable_tv={v.name for v in tyren.m.values()},
            )
            if not isinstance(out, Unifier):
                continue
            # resolve the clause's type parameters in its body before recursing
            body1 = out.phi.apply_term(body)
            yield from backchain(body1, d - 1, out.theta.compose(theta), grown)

    qmetas = free_metas(goal)
    for theta in backchain(goal, depth, TermSubst(), set(queries)):
        answer = TermSubst({q: theta.apply(m) for q, m in qmetas.items()})
        return Success(answer, TySubst())
    return None


def spec_signature(prog: SpecProgram) -> Signature:
    """A standalone signature for running a program outside any session."""
    from .defs import declare_base_constants

    sig = Signature()
    declare_base_constants(sig)
    for name, arity in prog.kinds:
        sig.declare_tycon(name, arity)
    for name, schema in prog.consts:
        sig.declare_const(name, schema)
    return sig


# ---------------------------------------------------------------------------
# Embedding


def translate_to_prog(prog: SpecProgram) -> DefBlock:
    """Definite clauses as clause-parameterized clauses for the prog predicate."""
    clauses = []
    for c in prog.clauses:
        wrapped = _wrap_goal_atoms(c.goal)
        head = app(Const("prog"), (c.head, wrapped))
        clauses.append(SchematicClause(c.ty_params, c.binder, head, TOP))
    schema = TySchema((), arrow(OBJ, OBJ, PROP))
    return DefBlock((), (("prog", schema),), tuple(clauses), inductive=False)


def _wrap_goal_atoms(g: Term) -> Term:
    h, args = spine(g)
    if isinstance(h, Const) and h.name == "tt":
        return g
    if isinstance(h, Const) and h.name == "&&":
        return app(Const("&&"), (_wrap_goal_atoms(args[0]), _wrap_goal_atoms(args[1])))
    return app(Const("atm"), (g,))


def brace_sugar(g: Term) -> Term:
    """The reasoning-level reflection of a specification goal."""
    n = Eigen("?n", NAT)
    inner = conj(app(Const("nat"), (n,)), app(Const("prove"), (n, _wrap_goal_atoms(g))))
    return exists_close(n, inner, hint="n")


def install_spec(sig: Signature, prog: SpecProgram):
    """Lift a program's vocabulary into a session signature and register
    the prog and prove blocks (in that order, for stratification)."""
    if sig.block_for("prog") is not None:
        raise ProverError("a specification is already loaded")
    for name, arity in prog.kinds:
        sig.declare_tycon(name, arity)
    for name, schema in prog.consts:
        sig.declare_const(name, schema)
    prog_block = translate_to_prog(prog)
    check_block_or_raise(prog_block, sig)
    sig.register_block(prog_block)
    pv = prove_block()
    check_block_or_raise(pv, sig)
    sig.register_block(pv)
