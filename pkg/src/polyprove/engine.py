"""Schematic sequents and the primitive inference rules.

A sequent carries an ordered set of type-variable parameters (fixed for
the whole derivation), an eigenvariable context, labeled hypotheses, and
a goal.  Rules are pure functions from a sequent (plus rule arguments) to
a list of premise sequents and a replayable payload; the tactic layer
assembles them into proof trees.

Case analysis on a defined atom is the delicate rule: each clause of the
operative block is renamed apart, the sequent's eigenvariables and the
clause's binder are raised to unification variables, and the generic
match verdict decides between contributing no premise, contributing one
premise under the computed substitution pair, or refusing the whole rule
because unifiability depends on the frozen type parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .defs import DefBlock, reduce_clause
from .errors import ProverError, TacticError
from .formulas import dest, imp_chain, is_atomic, strip_foralls
from .terms import (
    Const,
    Eigen,
    Lam,
    Meta,
    PROP,
    Signature,
    Term,
    TermSubst,
    Ty,
    TySubst,
    TyVar,
    aeq,
    annotation_of,
    app,
    free_eigens,
    free_metas,
    infer_type,
    normalize,
    open_lam,
    set_annotation,
    spine,
    term_ty_vars,
    ty_vars,
    well_formed_rel,
    wf_type,
)
from .unify import (
    AmbiguousTypes,
    Generic,
    NeverUnifiable,
    NoUnifier,
    NotGeneric,
    Unifier,
    match_clause_generic,
    unify_terms,
)

# ---------------------------------------------------------------------------
# Sequents


@dataclass(frozen=True)
class Hyp:
    label: str
    formula: Term

    @property
    def annotation(self):
        return annotation_of(self.formula) if is_atomic(self.formula) else None


@dataclass(frozen=True)
class Sequent:
    tyvars: tuple  # tuple[str, ...]
    eigens: tuple  # tuple[Eigen, ...]
    hyps: tuple  # tuple[Hyp, ...]
    goal: Term
    hyp_counter: int = 0  # highest numbered label ever used on this branch

    def hyp(self, label: str) -> Hyp:
        for h in self.hyps:
            if h.label == label:
                return h
        raise TacticError("no-such-hypothesis", f"no hypothesis named {label}")

    def without(self, label: str) -> tuple:
        return tuple(h for h in self.hyps if h.label != label)

    def eigen_names(self) -> set:
        return {e.name for e in self.eigens}


def fresh_name(hint: str, used, sig: Optional[Signature] = None) -> str:
    base = hint or "x"
    taken = set(used)
    if sig is not None:
        taken |= set(sig.consts)
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def _label_floor(seq: Sequent) -> int:
    top = seq.hyp_counter
    for h in seq.hyps:
        if h.label.startswith("H") and h.label[1:].isdigit():
            top = max(top, int(h.label[1:]))
    return top


def fresh_label(seq: Sequent) -> str:
    # monotone numbering: removed labels are never reused within a branch
    return f"H{_label_floor(seq) + 1}"


def bump_labels(seq: Sequent, k: int = 1) -> Sequent:
    return replace(seq, hyp_counter=_label_floor(seq) + k)


def lint_sequent(seq: Sequent, sig: Signature):
    """Internal consistency of a committed sequent; raises on violation."""
    names = [e.name for e in seq.eigens]
    if len(set(names)) != len(names):
        raise ProverError(f"duplicate eigenvariables in {names}")
    labels = [h.label for h in seq.hyps]
    if len(set(labels)) != len(labels):
        raise ProverError(f"duplicate hypothesis labels in {labels}")
    psi = set(seq.tyvars)
    scope = {e.name: e for e in seq.eigens}
    for f in [h.formula for h in seq.hyps] + [seq.goal]:
        if free_metas(f):
            raise ProverError(f"metavariable committed to a sequent: {f}")
        for name, e in free_eigens(f).items():
            if name not in scope:
                raise ProverError(f"eigenvariable {name} not in the context")
        if not well_formed_rel(f, psi, sig):
            raise ProverError("formula not well-formed relative to the type parameters")
        ty = infer_type(f, sig)
        if ty != PROP:
            raise ProverError(f"hypothesis/goal has type {ty!r}, expected prop")


# ---------------------------------------------------------------------------
# Rule outcome


@dataclass(frozen=True)
class RuleResult:
    rule: str
    payload: dict
    premises: tuple  # tuple[Sequent, ...]


def _check_witness(t: Term, ty: Ty, seq: Sequent, sig: Signature):
    if free_metas(t):
        raise TacticError("IllTypedWitness", "witness contains metavariables")
    missing = [n for n in free_eigens(t) if n not in seq.eigen_names()]
    if missing:
        raise TacticError(
            "UnboundSymbolInWitness", f"witness uses unknown names {missing}"
        )
    bad_tvs = [v for v in term_ty_vars(t) if v not in set(seq.tyvars)]
    if bad_tvs:
        raise TacticError(
            "IllTypedWitness", f"witness mentions unbound type variables {bad_tvs}"
        )
    got = infer_type(t, sig)
    if got != ty:
        raise TacticError("IllTypedWitness", f"witness has type {got!r}, expected {ty!r}")


# ---------------------------------------------------------------------------
# Quantifier rules


def rule_all_r(seq: Sequent, sig: Signature) -> RuleResult:
    kind, payload = dest(seq.goal)
    if kind != "forall":
        raise TacticError("WrongConnective", "goal is not universally quantified")
    ty, lam = payload
    name = fresh_name(lam.hint, seq.eigen_names(), sig)
    e = Eigen(name, ty)
    prem = replace(seq, eigens=seq.eigens + (e,), goal=open_lam(lam, e))
    return RuleResult("all_r", {"name": name}, (prem,))


def rule_ex_l(seq: Sequent, label: str, sig: Signature) -> RuleResult:
    h = seq.hyp(label)
    kind, payload = dest(h.formula)
    if kind != "exists":
        raise TacticError("WrongConnective", f"{label} is not existential")
    ty, lam = payload
    name = fresh_name(lam.hint, seq.eigen_names(), sig)
    e = Eigen(name, ty)
    hyps = tuple(
        Hyp(x.label, open_lam(lam, e)) if x.label == label else x for x in seq.hyps
    )
    prem = replace(seq, eigens=seq.eigens + (e,), hyps=hyps)
    return RuleResult("ex_l", {"label": label, "name": name}, (prem,))


def rule_all_l(seq: Sequent, label: str, t: Term, sig: Signature) -> RuleResult:
    h = seq.hyp(label)
    kind, payload = dest(h.formula)
    if kind != "forall":
        raise TacticError("WrongConnective", f"{label} is not universally quantified")
    ty, lam = payload
    _check_witness(t, ty, seq, sig)
    hyps = tuple(
        Hyp(x.label, open_lam(lam, t)) if x.label == label else x for x in seq.hyps
    )
    return RuleResult("all_l", {"label": label, "witness": t}, (replace(seq, hyps=hyps),))


def rule_ex_r(seq: Sequent, t: Term, sig: Signature) -> RuleResult:
    kind, payload = dest(seq.goal)
    if kind != "exists":
        raise TacticError("WrongConnective", "goal is not existential")
    ty, lam = payload
    _check_witness(t, ty, seq, sig)
    return RuleResult("ex_r", {"witness": t}, (replace(seq, goal=open_lam(lam, t)),))


# ---------------------------------------------------------------------------
# Propositional rules


def rule_imp_r(seq: Sequent) -> RuleResult:
    kind, payload = dest(seq.goal)
    if kind != "imp":
        raise TacticError("WrongConnective", "goal is not an implication")
    a, b = payload
    label = fresh_label(seq)
    prem = replace(seq, hyps=seq.hyps + (Hyp(label, a),), goal=b,
                   hyp_counter=int(label[1:]))
    return RuleResult("imp_r", {"label": label}, (prem,))


def rule_and_r(seq: Sequent) -> RuleResult:
    kind, payload = dest(seq.goal)
    if kind != "and":
        raise TacticError("WrongConnective", "goal is not a conjunction")
    a, b = payload
    return RuleResult(
        "and_r", {}, (replace(seq, goal=a), replace(seq, goal=b))
    )


def rule_or_r(seq: Sequent, side: int) -> RuleResult:
    kind, payload = dest(seq.goal)
    if kind != "or":
        raise TacticError("WrongConnective", "goal is not a disjunction")
    return RuleResult(
        f"or_r{side}", {}, (replace(seq, goal=payload[side - 1]),)
    )


def rule_true_r(seq: Sequent) -> RuleResult:
    if dest(seq.goal)[0] != "true":
        raise TacticError("WrongConnective", "goal is not trivially true")
    return RuleResult("true_r", {}, ())


def rule_axiom(seq: Sequent, label: str) -> RuleResult:
    h = seq.hyp(label)
    if not aeq(h.formula, seq.goal):
        raise TacticError("WrongConnective", f"{label} does not match the goal")
    return RuleResult("axiom", {"label": label}, ())


def rule_and_l(seq: Sequent, label: str) -> RuleResult:
    h = seq.hyp(label)
    kind, payload = dest(h.formula)
    if kind != "and":
        raise TacticError("WrongConnective", f"{label} is not a conjunction")
    a, b = payload
    floor = _label_floor(seq)
    l1, l2 = f"H{floor + 1}", f"H{floor + 2}"
    hyps = list(seq.without(label)) + [Hyp(l1, a), Hyp(l2, b)]
    prem = replace(seq, hyps=tuple(hyps), hyp_counter=floor + 2)
    return RuleResult("and_l", {"label": label, "labels": [l1, l2]}, (prem,))


def rule_or_l(seq: Sequent, label: str) -> RuleResult:
    h = seq.hyp(label)
    kind, payload = dest(h.formula)
    if kind != "or":
        raise TacticError("WrongConnective", f"{label} is not a disjunction")
    a, b = payload
    prems = []
    for f in (a, b):
        hyps = tuple(Hyp(x.label, f) if x.label == label else x for x in seq.hyps)
        prems.append(replace(seq, hyps=hyps))
    return RuleResult("or_l", {"label": label}, tuple(prems))


def rule_imp_l(seq: Sequent, label: str) -> RuleResult:
    h = seq.hyp(label)
    kind, payload = dest(h.formula)
    if kind != "imp":
        raise TacticError("WrongConnective", f"{label} is not an implication")
    a, b = payload
    s1 = replace(seq, hyps=seq.without(label), goal=a)
    hyps = tuple(Hyp(x.label, b) if x.label == label else x for x in seq.hyps)
    s2 = replace(seq, hyps=hyps)
    return RuleResult("imp_l", {"label": label}, (s1, s2))


def rule_false_l(seq: Sequent, label: str) -> RuleResult:
    h = seq.hyp(label)
    if dest(h.formula)[0] != "false":
        raise TacticError("WrongConnective", f"{label} is not absurd")
    return RuleResult("false_l", {"label": label}, ())


def rule_true_l(seq: Sequent, label: str) -> RuleResult:
    h = seq.hyp(label)
    if dest(h.formula)[0] != "true":
        raise TacticError("WrongConnective", f"{label} is not trivially true")
    return RuleResult("true_l", {"label": label}, (replace(seq, hyps=seq.without(label)),))


# ---------------------------------------------------------------------------
# Definition rules


def _atom_head(f: Term):
    h, args = spine(f)
    if not isinstance(h, Const):
        raise TacticError("TargetNotAtomic", "formula head is not a constant")
    return h, args


def _rename_clause(rc, clause_index: int):
    """Fresh type variables and binder metas for a reduced clause."""
    tyren = TySubst({v: TyVar(f"?t{clause_index}.{i}:{v}") for i, v in enumerate(rc.params)})
    binder_map = {}
    for i, (n, ty) in enumerate(rc.binder):
        binder_map[n] = Meta(f"?x{clause_index}.{i}:{n}", tyren.apply_ty(ty))
    ren = TermSubst(binder_map)
    head = ren.apply(tyren.apply_term(rc.head))
    body = ren.apply(tyren.apply_term(rc.body))
    solvable = {m.name for m in binder_map.values()}
    return set(tyren.m[v].name for v in rc.params), solvable, head, body


def mark_block_atoms(f: Term, preds: set, ann) -> Term:
    kind, payload = dest(f)
    if kind in ("and", "or", "imp"):
        a = mark_block_atoms(payload[0], preds, ann)
        b = mark_block_atoms(payload[1], preds, ann)
        return app(Const(kind), (a, b))
    if kind in ("forall", "exists"):
        ty, lam = payload
        body = mark_block_atoms(lam.body, preds, ann)
        return app(Const(kind, (ty,)), (Lam(lam.ty, body, lam.hint),))
    if kind == "atom":
        h, _args = payload
        if isinstance(h, Const) and h.name in preds:
            return set_annotation(f, ann)
    return f


def rule_def_r(
    seq: Sequent, block: DefBlock, clause_index: int, phi: TySubst, theta: TermSubst,
    sig: Signature,
) -> RuleResult:
    """Backchain the goal atom on one clause under an explicit (phi, theta)."""
    if not is_atomic(seq.goal):
        raise TacticError("TargetNotAtomic", "goal is not atomic")
    rc = reduce_clause(block.clauses[clause_index], block.block_params)
    # phi instantiates the clause's own parameters and is applied before
    # theta, whose range lives over the sequent's parameters; the other
    # order would let phi capture same-named sequent variables
    inst_head = theta.apply(phi.apply_term(rc.head))
    if free_metas(inst_head):
        raise TacticError("HeadMismatch", "instantiation leaves clause variables open")
    for v, ty in phi.m.items():
        bad = [w for w in ty_vars(ty) if w not in set(seq.tyvars)]
        if bad:
            raise TacticError("IllFormedTypeInstance", f"type instance mentions {bad}")
    if not aeq(inst_head, seq.goal):
        raise TacticError("HeadMismatch", "clause head does not match the goal")
    body = theta.apply(phi.apply_term(rc.body))
    prem = replace(seq, goal=body)
    payload = {
        "clause": clause_index,
        "pred": _atom_head(seq.goal)[0].name,
        "phi": phi,
        "theta": theta,
    }
    return RuleResult("def_r", payload, (prem,))


def rule_def_l(seq: Sequent, label: str, sig: Signature) -> RuleResult:
    """Generic case analysis on a defined atom; refused unless amenable."""
    h = seq.hyp(label)
    if not is_atomic(h.formula):
        raise TacticError("TargetNotAtomic", f"{label} is not atomic")
    head, _ = _atom_head(h.formula)
    block = sig.block_for(head.name)
    if block is None:
        raise TacticError("NotDefined", f"{head.name} has no defining block")
    ann = annotation_of(h.formula)
    raise_map = TermSubst({e.name: Meta(f"?e:{e.name}", e.ty) for e in seq.eigens})
    raised_names = {f"?e:{e.name}" for e in seq.eigens}
    atom_r = raise_map.apply(h.formula)
    premises = []
    case_clauses = []
    body_labels = []
    for ci, clause in enumerate(block.clauses):
        rc = reduce_clause(clause, block.block_params)
        ctyvars, binder_solv, c_head, c_body = _rename_clause(rc, ci)
        out = match_clause_generic(
            atom_r, c_head, set(seq.tyvars), ctyvars, binder_solv | raised_names, sig
        )
        if isinstance(out, NeverUnifiable):
            continue
        if isinstance(out, NotGeneric):
            raise TacticError(
                "NotAmenable",
                f"case analysis on {label} is not type-generic against clause "
                f"{ci + 1} of {head.name}: {out.diagnostic}",
            )
        case_clauses.append(ci)
        prem = _def_l_premise(seq, label, raise_map, out, c_body, block, ann, sig)
        premises.append(prem)
        body_labels.append(prem.hyps[-1].label)
    return RuleResult(
        "def_l",
        {"label": label, "pred": head.name, "cases": case_clauses, "body_labels": body_labels},
        tuple(premises),
    )


def _def_l_premise(seq, label, raise_map, out: Generic, c_body, block, ann, sig):
    theta, phi = out.theta, out.phi
    full = lambda f: theta.apply(raise_map.apply(f))  # noqa: E731
    hyps1 = [Hyp(x.label, full(x.formula)) for x in seq.hyps if x.label != label]
    goal1 = full(seq.goal)
    body1 = theta.apply(phi.apply_term(c_body))
    # survivors keep their names and positions; instantiated eigenvariables drop out
    survivor = {}
    eigens1 = []
    for e in seq.eigens:
        img = theta.apply(Meta(f"?e:{e.name}", e.ty))
        if isinstance(img, Meta) and img.name == f"?e:{e.name}":
            survivor[img.name] = e
            eigens1.append(e)
    # every other residual meta becomes a fresh eigenvariable, scan order
    lower = dict(survivor)
    used = {e.name for e in eigens1}
    order: list = []
    for f in [x.formula for x in hyps1] + [body1, goal1]:
        for name, m in free_metas(f).items():
            if name not in lower and all(name != n for n, _ in order):
                order.append((name, m))
    for name, m in order:
        hint = name.split(":", 1)[1] if ":" in name else name
        new = fresh_name(hint, used, sig)
        used.add(new)
        e = Eigen(new, m.ty)
        lower[name] = e
        eigens1.append(e)
    lower_subst = TermSubst(lower)
    hyps2 = [Hyp(x.label, lower_subst.apply(x.formula)) for x in hyps1]
    body2 = lower_subst.apply(body1)
    goal2 = lower_subst.apply(goal1)
    if ann is not None:
        body2 = mark_block_atoms(body2, block.pred_names(), ("*", ann[1]))
    prem = Sequent(seq.tyvars, tuple(eigens1), tuple(hyps2), goal2, seq.hyp_counter)
    new_label = fresh_label(prem)
    return replace(prem, hyps=prem.hyps + (Hyp(new_label, body2),),
                   hyp_counter=int(new_label[1:]))


# ---------------------------------------------------------------------------
# Induction


def _split_goal_shape(goal: Term):
    """(binders, premises, conclusion) of a forall-prefixed implication chain."""
    binders, matrix = strip_foralls(goal)
    prems, concl = imp_chain(matrix)
    return binders, prems, concl


def _rebuild_goal(goal: Term, n: int, fn):
    kind, payload = dest(goal)
    if kind == "forall":
        ty, lam = payload
        return app(Const("forall", (ty,)), (Lam(lam.ty, _rebuild_goal(lam.body, n, fn), lam.hint),))
    if kind == "imp":
        a, b = payload
        if n == 1:
            return app(Const("imp"), (fn(a), b))
        return app(Const("imp"), (a, _rebuild_goal(b, n - 1, fn)))
    raise TacticError("IndexOutOfRange", "no such antecedent")


def rule_induction(seq: Sequent, n: int, gen: int, sig: Signature) -> RuleResult:
    binders, prems, _ = _split_goal_shape(seq.goal)
    if n < 1 or n > len(prems):
        raise TacticError("IndexOutOfRange", f"goal has {len(prems)} antecedents")
    target = prems[n - 1]
    if not is_atomic(target):
        raise TacticError("TargetNotAtomic", f"antecedent {n} is not atomic")
    head, _ = _atom_head(target)
    block = sig.block_for(head.name)
    if block is None or not block.inductive:
        raise TacticError(
            "NotInductiveBlock", f"{head.name} is not defined by an inductive block"
        )
    if len(block.predicates) != 1:
        raise TacticError(
            "MutualInductionUnsupported",
            f"{head.name} is defined mutually with "
            f"{', '.join(n for n, _ in block.predicates if n != head.name)}; "
            "induction needs a single-predicate block",
        )
    ih = _rebuild_goal(seq.goal, n, lambda a: set_annotation(a, ("*", gen)))
    newgoal = _rebuild_goal(seq.goal, n, lambda a: set_annotation(a, ("@", gen)))
    taken = {h.label for h in seq.hyps}
    ih_label = "IH" if "IH" not in taken else fresh_name("IH", taken)
    prem = replace(seq, hyps=seq.hyps + (Hyp(ih_label, ih),), goal=newgoal)
    return RuleResult("induction", {"n": n, "gen": gen, "label": ih_label}, (prem,))


# ---------------------------------------------------------------------------
# Applying a hypothesis or lemma


def _open_forall_prefix(f: Term, mk):
    metas = []
    while True:
        kind, payload = dest(f)
        if kind != "forall":
            return metas, f
        ty, lam = payload
        m = mk(lam.hint, ty)
        metas.append(m)
        f = open_lam(lam, m)


def rule_apply(
    seq: Sequent,
    source: str,
    targets: list,
    sig: Signature,
    lemma: Optional[tuple] = None,  # (params, formula) when source names a lemma
    tyargs: Optional[list] = None,
    with_bindings: Optional[dict] = None,  # binder hint -> witness term
) -> RuleResult:
    if lemma is not None:
        params, src = lemma
        if tyargs is not None:
            if len(tyargs) != len(params):
                raise TacticError(
                    "UnresolvedTypeArgs",
                    f"{source} expects {len(params)} type arguments, got {len(tyargs)}",
                )
            for ty in tyargs:
                if not wf_type(ty, set(seq.tyvars), sig):
                    raise TacticError("IllFormedTypeInstance", f"bad type argument {ty!r}")
            src = TySubst(dict(zip(params, tyargs))).apply_term(src)
            solvable_tv = set()
        else:
            ren = TySubst({v: TyVar(f"?l:{v}") for v in params})
            src = ren.apply_term(src)
            solvable_tv = {f"?l:{v}" for v in params}
    else:
        src = seq.hyp(source).formula
        solvable_tv = set()

    counter = [0]

    def mk(hint, ty):
        counter[0] += 1
        return Meta(f"?a{counter[0]}:{hint}", ty)

    metas, matrix = _open_forall_prefix(src, mk)
    prems, concl = imp_chain(matrix)
    if len(prems) != len(targets):
        raise TacticError(
            "PremiseMismatch",
            f"{source} expects {len(prems)} arguments, got {len(targets)}",
        )
    theta = TermSubst()
    phi = TySubst()
    if with_bindings:
        hints = {}
        for m in metas:
            hints.setdefault(m.name.split(":", 1)[1], m)
        explicit = {}
        for name, t in with_bindings.items():
            if name not in hints:
                raise TacticError("PremiseMismatch", f"{source} binds no variable {name}")
            _check_witness(t, hints[name].ty, seq, sig)
            explicit[hints[name].name] = t
        theta = TermSubst(explicit)
    solvable = {m.name for m in metas}
    for i, tlabel in enumerate(targets):
        tf = seq.hyp(tlabel).formula
        want = annotation_of(prems[i])
        if want is not None and want[0] == "*":
            got = annotation_of(tf) if is_atomic(tf) else None
            if got != want:
                raise TacticError(
                    "StarDisciplineViolation",
                    f"{tlabel} must be an unfolded (starred) assumption to feed "
                    f"argument {i + 1} of {source}",
                )
        lhs = phi.apply_term(theta.apply(prems[i]))
        out = unify_terms(
            lhs, tf, solvable, sig, frozen_tv=set(seq.tyvars), solvable_tv=solvable_tv
        )
        if isinstance(out, NoUnifier):
            raise TacticError(
                "PremiseMismatch", f"argument {i + 1} of {source}: {out.reason}"
            )
        if isinstance(out, AmbiguousTypes):
            raise TacticError(
                "PremiseMismatch",
                f"argument {i + 1} of {source} depends on frozen type variables: "
                f"{out.equation}",
            )
        theta = out.theta.compose(theta)
        phi = out.phi.compose(phi)
    result = phi.apply_term(theta.apply(concl))
    left_metas = free_metas(result)
    if left_metas:
        raise TacticError(
            "PremiseMismatch",
            f"cannot infer instantiation for {sorted(left_metas)}; "
            "use 'with' to provide it",
        )
    left_tvs = [v for v in term_ty_vars(result) if v.startswith("?l:")]
    if left_tvs:
        raise TacticError(
            "UnresolvedTypeArgs",
            f"type arguments of {source} cannot be inferred; supply them explicitly",
        )
    label = fresh_label(seq)
    prem = replace(seq, hyps=seq.hyps + (Hyp(label, result),),
                   hyp_counter=int(label[1:]))
    payload = {
        "source": source,
        "targets": list(targets),
        "tyargs": list(tyargs) if tyargs else None,
        "with": dict(with_bindings) if with_bindings else None,
        "result": result,
        "label": label,
    }
    return RuleResult("apply", payload, (prem,))


def rule_assert(seq: Sequent, f: Term, sig: Signature) -> RuleResult:
    if free_metas(f):
        raise TacticError("IllTypedWitness", "assertion contains metavariables")
    missing = [n for n in free_eigens(f) if n not in seq.eigen_names()]
    if missing:
        raise TacticError("UnboundSymbolInWitness", f"assertion uses unknown names {missing}")
    if infer_type(f, sig) != PROP:
        raise TacticError("IllTypedWitness", "assertion is not a formula")
    label = fresh_label(seq)
    s1 = replace(seq, goal=f)
    s2 = replace(seq, hyps=seq.hyps + (Hyp(label, f),),
                 hyp_counter=int(label[1:]))
    return RuleResult("assert", {"formula": f, "label": label}, (s1, s2))


# ---------------------------------------------------------------------------
# Sequent alpha-comparison (for replay and round-trips)


def sequent_alpha_eq(s1: Sequent, s2: Sequent) -> bool:
    if s1.tyvars != s2.tyvars:
        return False
    if len(s1.eigens) != len(s2.eigens) or len(s1.hyps) != len(s2.hyps):
        return False
    ren = {}
    for e1, e2 in zip(s1.eigens, s2.eigens):
        if e1.ty != e2.ty:
            return False
        ren[e2.name] = Eigen(e1.name, e1.ty)
    sub = TermSubst(ren)
    for h1, h2 in zip(s1.hyps, s2.hyps):
        if h1.label != h2.label or not aeq(h1.formula, sub.apply(h2.formula)):
            return False
    return aeq(s1.goal, sub.apply(s2.goal))
