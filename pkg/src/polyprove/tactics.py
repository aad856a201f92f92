"""User-level tactics over the primitive rules, and the bounded search.

A proof state is an immutable snapshot: a table of nodes (each holding its
sequent and, once a rule has been applied, the rule name, payload, and
children) plus the list of open node ids in depth-first order.  Every
tactic produces a new state; undo is snapshot restoration in the session
layer.

Search is a bounded depth-first procedure over the right rules only:
axiom, trivial truth, conjunction and disjunction splitting, existential
goals instantiated with metavariables, and backchaining on definition
clauses.  Metavariables are solved by pattern unification against the
remaining obligations; when a branch completes with metavariables still
unconstrained they are filled with the smallest constructible witnesses,
and the branch fails if none exists.  Frozen type parameters are never
instantiated.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Optional

from . import engine as en
from .defs import DefBlock, reduce_clause
from .errors import TacticError
from .formulas import dest, is_atomic
from .terms import (
    Const,
    Eigen,
    Meta,
    Signature,
    Term,
    TermSubst,
    Ty,
    TySubst,
    TyVar,
    app,
    free_metas,
    normalize,
    open_lam,
    spine,
    strip_arrow,
    term_ty_vars,
)
from .unify import AmbiguousTypes, NoUnifier, Unifier, unify_terms


@dataclass(frozen=True)
class Node:
    sequent: en.Sequent
    rule: Optional[str] = None
    payload: Optional[dict] = None
    children: tuple = ()


@dataclass(frozen=True)
class ProofState:
    nodes: dict  # id -> Node; treated immutably (copied on update)
    open_ids: tuple
    root: int
    next_id: int
    gen: int = 0
    skipped: bool = False

    @property
    def complete(self) -> bool:
        return not self.open_ids

    @property
    def current(self) -> en.Sequent:
        if not self.open_ids:
            raise TacticError("no-open-subgoals", "no open subgoals")
        return self.nodes[self.open_ids[0]].sequent


@dataclass(frozen=True)
class ProofContext:
    sig: Signature
    lemmas: dict  # name -> (params tuple, formula)


@dataclass(frozen=True)
class ProofNode:
    """A completed, replayable proof record."""

    rule: str
    payload: dict
    sequent: en.Sequent
    children: tuple


def finish_tree(state: "ProofState") -> ProofNode:
    if not state.complete:
        raise TacticError("no-open-subgoals", "proof is not complete")

    def build(nid: int) -> ProofNode:
        n = state.nodes[nid]
        return ProofNode(n.rule, n.payload or {}, n.sequent,
                         tuple(build(c) for c in n.children))

    return build(state.root)


def tree_text(node: ProofNode, sig=None, depth: int = 0) -> str:
    """Deterministic canonical text rendering of a proof record."""
    from .pretty import Printer, ty_str
    from .terms import TermSubst, TySubst

    pr = Printer(sig, show_instances=True)

    def fmt(v):
        if isinstance(v, TySubst):
            inner = ", ".join(f"{k} := {ty_str(t)}" for k, t in sorted(v.m.items()))
            return "{" + inner + "}"
        if isinstance(v, TermSubst):
            inner = ", ".join(f"{k} := {pr.term_str(t)}" for k, t in sorted(v.m.items()))
            return "{" + inner + "}"
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        if isinstance(v, dict):
            return "{" + ", ".join(f"{k}={fmt(x)}" for k, x in sorted(v.items())) + "}"
        if v is None or isinstance(v, (str, int, bool)):
            return repr(v) if isinstance(v, str) else str(v)
        return pr.term_str(v)

    pad = "  " * depth
    payload = ", ".join(f"{k}={fmt(v)}" for k, v in sorted(node.payload.items()))
    lines = [f"{pad}{node.rule}" + (f" [{payload}]" if payload else "")]
    for c in node.children:
        lines.append(tree_text(c, sig, depth + 1))
    return "\n".join(lines)


def new_proof(seq: en.Sequent) -> ProofState:
    return ProofState(nodes={0: Node(seq)}, open_ids=(0,), root=0, next_id=1)


# Every premise of every step is linted (wellformedness, no metas, type
# parameters unchanged).  Cheap at proof scale; flip off to profile.
LINT_PREMISES = True


def apply_at(state: ProofState, node_id: int, result: en.RuleResult, sig=None):
    """Close node_id with a rule application; returns (state', new ids)."""
    if node_id not in state.open_ids:
        raise TacticError("no-open-subgoals", f"node {node_id} is not open")
    if LINT_PREMISES and sig is not None:
        parent = state.nodes[node_id].sequent
        for prem in result.premises:
            if prem.tyvars != parent.tyvars:
                raise TacticError(
                    "psi-changed", f"{result.rule} altered the type parameters"
                )
            en.lint_sequent(prem, sig)
    nodes = dict(state.nodes)
    ids = []
    nid = state.next_id
    for prem in result.premises:
        nodes[nid] = Node(prem)
        ids.append(nid)
        nid += 1
    old = nodes[node_id]
    nodes[node_id] = Node(old.sequent, result.rule, result.payload, tuple(ids))
    pos = state.open_ids.index(node_id)
    open_ids = state.open_ids[:pos] + tuple(ids) + state.open_ids[pos + 1 :]
    return replace(state, nodes=nodes, open_ids=open_ids, next_id=nid), ids


def _front(state: ProofState) -> int:
    if not state.open_ids:
        raise TacticError("no-open-subgoals", "no open subgoals")
    return state.open_ids[0]


# ---------------------------------------------------------------------------
# Structural tactics


def tac_intros(state: ProofState, ctx: ProofContext) -> ProofState:
    progressed = False
    while True:
        nid = _front(state)
        seq = state.nodes[nid].sequent
        kind = dest(seq.goal)[0]
        if kind == "forall":
            state, _ = apply_at(state, nid, en.rule_all_r(seq, ctx.sig), ctx.sig)
        elif kind == "imp":
            state, _ = apply_at(state, nid, en.rule_imp_r(seq), ctx.sig)
        else:
            if not progressed:
                raise TacticError("WrongConnective", "nothing to introduce")
            return state
        progressed = True


def tac_split(state: ProofState, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    state, _ = apply_at(state, nid, en.rule_and_r(state.nodes[nid].sequent), ctx.sig)
    return state


def tac_or(state: ProofState, side: int, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    state, _ = apply_at(state, nid, en.rule_or_r(state.nodes[nid].sequent, side), ctx.sig)
    return state


def tac_exists(state: ProofState, witness: Term, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    state, _ = apply_at(state, nid, en.rule_ex_r(state.nodes[nid].sequent, witness, ctx.sig), ctx.sig)
    return state


def tac_assert(state: ProofState, f: Term, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    state, _ = apply_at(state, nid, en.rule_assert(state.nodes[nid].sequent, f, ctx.sig), ctx.sig)
    return state


def tac_skip(state: ProofState, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    seq = state.nodes[nid].sequent
    state, _ = apply_at(state, nid, en.RuleResult("skip", {}, ()), ctx.sig)
    return replace(state, skipped=True)


def tac_induction(state: ProofState, n: int, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    gen = state.gen + 1
    seq = state.nodes[nid].sequent
    state, _ = apply_at(state, nid, en.rule_induction(seq, n, gen, ctx.sig), ctx.sig)
    return replace(state, gen=gen)


def tac_apply(
    state: ProofState,
    source: str,
    targets: list,
    ctx: ProofContext,
    tyargs=None,
    with_bindings=None,
) -> ProofState:
    nid = _front(state)
    seq = state.nodes[nid].sequent
    lemma = None
    if all(h.label != source for h in seq.hyps):
        if source not in ctx.lemmas:
            raise TacticError("no-such-hypothesis", f"unknown hypothesis or lemma {source}")
        lemma = ctx.lemmas[source]
    res = en.rule_apply(
        seq, source, targets, ctx.sig, lemma=lemma, tyargs=tyargs, with_bindings=with_bindings
    )
    state, _ = apply_at(state, nid, res, ctx.sig)
    return state


# ---------------------------------------------------------------------------
# Case analysis


def tac_case(state: ProofState, label: str, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    seq = state.nodes[nid].sequent
    f = seq.hyp(label).formula
    kind = dest(f)[0]
    if kind in ("and", "or", "exists", "false", "true"):
        return _decompose(state, nid, label, ctx)
    if kind == "atom":
        res = en.rule_def_l(seq, label, ctx.sig)
        state, ids = apply_at(state, nid, res, ctx.sig)
        for child, blabel in zip(ids, res.payload["body_labels"]):
            state = _decompose(state, child, blabel, ctx)
        return state
    raise TacticError("WrongConnective", f"cannot analyze a {kind} hypothesis")


def _decompose(state: ProofState, nid: int, label: str, ctx: ProofContext) -> ProofState:
    """Break up a newly introduced hypothesis into primitive pieces."""
    seq = state.nodes[nid].sequent
    f = seq.hyp(label).formula
    kind = dest(f)[0]
    if kind == "true":
        state, _ = apply_at(state, nid, en.rule_true_l(seq, label), ctx.sig)
        return state
    if kind == "false":
        state, _ = apply_at(state, nid, en.rule_false_l(seq, label), ctx.sig)
        return state
    if kind == "and":
        res = en.rule_and_l(seq, label)
        state, ids = apply_at(state, nid, res, ctx.sig)
        l1, l2 = res.payload["labels"]
        state = _decompose(state, ids[0], l1, ctx)
        # the node id for the continuation is wherever l2 lives now: the
        # decomposition of l1 has one open descendant chain rooted at ids[0]
        state = _decompose_find(state, ids[0], l2, ctx)
        return state
    if kind == "exists":
        res = en.rule_ex_l(seq, label, ctx.sig)
        state, ids = apply_at(state, nid, res, ctx.sig)
        return _decompose(state, ids[0], label, ctx)
    if kind == "or":
        res = en.rule_or_l(seq, label)
        state, ids = apply_at(state, nid, res, ctx.sig)
        for child in ids:
            state = _decompose(state, child, label, ctx)
        return state
    return state  # atoms, implications, quantified hypotheses stay as-is


def _decompose_find(state: ProofState, root: int, label: str, ctx: ProofContext) -> ProofState:
    """Decompose label in every open descendant of root."""
    open_desc = [i for i in state.open_ids if _descends(state, i, root)]
    for i in open_desc:
        if any(h.label == label for h in state.nodes[i].sequent.hyps):
            state = _decompose(state, i, label, ctx)
    return state


def _descends(state: ProofState, i: int, root: int) -> bool:
    if i == root:
        return True
    # parent links are implicit; walk from root
    node = state.nodes[root]
    return any(_descends(state, i, c) for c in node.children) if node.children else False


# ---------------------------------------------------------------------------
# Unfold (backchain the goal on one clause)


def _clause_backchain(goal: Term, tyvars, block: DefBlock, ci: int, sig: Signature,
                      extra_solvable=frozenset(), tag: str = ""):
    """Unify a goal atom with clause ci's head; returns payload pieces or None.

    tag uniquifies the renamed-apart variables when the same clause is
    used several times along one search branch.
    """
    k = f"{ci}{tag}"
    rc = reduce_clause(block.clauses[ci], block.block_params)
    tyren = {v: f"?g{k}.{i}:{v}" for i, v in enumerate(rc.params)}
    phi_ren = TySubst({v: TyVar(n) for v, n in tyren.items()})
    meta_ren = {}
    for i, (n, ty) in enumerate(rc.binder):
        meta_ren[n] = Meta(f"?b{k}.{i}:{n}", phi_ren.apply_ty(ty))
    ren = TermSubst(meta_ren)
    head = ren.apply(phi_ren.apply_term(rc.head))
    body = ren.apply(phi_ren.apply_term(rc.body))
    out = unify_terms(
        goal,
        head,
        set(extra_solvable) | {m.name for m in meta_ren.values()},
        sig,
        frozen_tv=set(tyvars),
        solvable_tv=set(tyren.values()),
    )
    if not isinstance(out, Unifier):
        return None
    return rc, tyren, meta_ren, body, out


def tac_unfold(state: ProofState, clause_index: Optional[int], ctx: ProofContext) -> ProofState:
    nid = _front(state)
    seq = state.nodes[nid].sequent
    if not is_atomic(seq.goal):
        raise TacticError("TargetNotAtomic", "goal is not atomic")
    head, _ = spine(seq.goal)
    block = ctx.sig.block_for(head.name)
    if block is None:
        raise TacticError("NotDefined", f"{head.name} has no defining block")
    indices = [clause_index - 1] if clause_index else range(len(block.clauses))
    for ci in indices:
        if ci < 0 or ci >= len(block.clauses):
            raise TacticError("IndexOutOfRange", f"no clause {ci + 1}")
        got = _clause_backchain(seq.goal, seq.tyvars, block, ci, ctx.sig)
        if got is None:
            continue
        rc, tyren, meta_ren, _body, out = got
        phi, theta = _clause_payload(rc, tyren, meta_ren, out.phi, out.theta)
        if phi is None:
            continue
        res = en.rule_def_r(seq, block, ci, phi, theta, ctx.sig)
        state, _ = apply_at(state, nid, res, ctx.sig)
        return state
    raise TacticError("HeadMismatch", "no clause head matches the goal")


def _clause_payload(rc, tyren, meta_ren, phi: TySubst, theta: TermSubst):
    """Map unifier output back to the clause's own parameter and binder names."""
    phi_out = {}
    for v, n in tyren.items():
        img = phi.apply_ty(TyVar(n))
        if any(w.startswith("?") for w in term_ty_vars(Meta("_", img))):
            return None, None
        phi_out[v] = img
    theta_out = {}
    for n, m in meta_ren.items():
        img = theta.apply(m)
        img = phi.apply_term(img)
        if free_metas(img):
            return None, None
        theta_out[n] = img
    return TySubst(phi_out), TermSubst(theta_out)


# ---------------------------------------------------------------------------
# Search


@dataclass
class _Plan:
    kind: str
    payload: dict
    children: list


class _SearchFail(Exception):
    pass


def tac_search(state: ProofState, depth: int, ctx: ProofContext) -> ProofState:
    nid = _front(state)
    seq = state.nodes[nid].sequent
    searcher = _Searcher(seq, ctx.sig, depth)
    for theta, plan in searcher.solve(seq.goal, depth, TermSubst()):
        done = searcher.finalize(plan, theta)
        if done is not None:
            return _apply_plan(state, nid, done, ctx)
    raise TacticError("NoProofFound", f"search found no proof within depth {depth}")


def _apply_plan(state: ProofState, nid: int, plan: _Plan, ctx: ProofContext) -> ProofState:
    seq = state.nodes[nid].sequent
    sig = ctx.sig
    if plan.kind == "true_r":
        res = en.rule_true_r(seq)
    elif plan.kind == "axiom":
        res = en.rule_axiom(seq, plan.payload["label"])
    elif plan.kind == "and_r":
        res = en.rule_and_r(seq)
    elif plan.kind in ("or_r1", "or_r2"):
        res = en.rule_or_r(seq, 1 if plan.kind == "or_r1" else 2)
    elif plan.kind == "ex_r":
        res = en.rule_ex_r(seq, plan.payload["witness"], sig)
    elif plan.kind == "def_r":
        res = en.rule_def_r(
            seq, plan.payload["block"], plan.payload["clause"],
            plan.payload["phi"], plan.payload["theta"], sig,
        )
    else:  # pragma: no cover - plan kinds are closed
        raise TacticError("NoProofFound", f"unknown plan step {plan.kind}")
    state, ids = apply_at(state, nid, res, ctx.sig)
    for child_id, child in zip(ids, plan.children):
        state = _apply_plan(state, child_id, child, ctx)
    return state


class _Searcher:
    def __init__(self, seq: en.Sequent, sig: Signature, depth: int):
        self.seq = seq
        self.sig = sig
        self.counter = 0
        self.solvable: set = set()

    def fresh(self, ty: Ty) -> Meta:
        self.counter += 1
        m = Meta(f"?s{self.counter}", ty)
        self.solvable.add(m.name)
        return m

    def solve(self, goal: Term, depth: int, theta: TermSubst) -> Iterator:
        goal = normalize(theta.apply(goal))
        kind, payload = dest(goal)
        if kind == "true":
            yield theta, _Plan("true_r", {}, [])
            return
        # axiom: unify the goal against a hypothesis
        for h in self.seq.hyps:
            if dest(h.formula)[0] != kind and kind != "atom":
                continue
            out = unify_terms(
                goal, h.formula, self.solvable, self.sig,
                frozen_tv=set(self.seq.tyvars),
            )
            if isinstance(out, Unifier):
                yield out.theta.compose(theta), _Plan("axiom", {"label": h.label}, [])
        if kind == "and":
            a, b = payload
            for th1, p1 in self.solve(a, depth, theta):
                for th2, p2 in self.solve(b, depth, th1):
                    yield th2, _Plan("and_r", {}, [p1, p2])
            return
        if kind == "or":
            a, b = payload
            for th, p in self.solve(a, depth, theta):
                yield th, _Plan("or_r1", {}, [p])
            for th, p in self.solve(b, depth, theta):
                yield th, _Plan("or_r2", {}, [p])
            return
        if kind == "exists":
            ty, lam = payload
            m = self.fresh(ty)
            for th, p in self.solve(open_lam(lam, m), depth, theta):
                yield th, _Plan("ex_r", {"meta": m}, [p])
            return
        if kind == "atom":
            h, _args = payload
            if not isinstance(h, Const):
                return
            block = self.sig.block_for(h.name)
            if block is None or depth <= 0:
                return
            for ci in range(len(block.clauses)):
                self.counter += 1
                got = _clause_backchain(
                    goal, self.seq.tyvars, block, ci, self.sig,
                    extra_solvable=self.solvable, tag=f".{self.counter}",
                )
                if got is None:
                    continue
                rc, tyren, meta_ren, body, out = got
                self.solvable |= {m.name for m in meta_ren.values()}
                th1 = out.theta.compose(theta)
                body1 = normalize(out.phi.apply_term(out.theta.apply(body)))
                for th2, p in self.solve(body1, depth - 1, th1):
                    plan = _Plan(
                        "def_r",
                        {
                            "block": block, "clause": ci,
                            "rc": rc, "tyren": tyren, "meta_ren": meta_ren,
                            "phi_local": out.phi,
                        },
                        [p],
                    )
                    yield th2, plan
            return

    # -- turning a successful plan into concrete rule payloads

    def finalize(self, plan: _Plan, theta: TermSubst) -> Optional[_Plan]:
        unsolved: dict = {}
        self._collect_unsolved(plan, theta, unsolved)
        defaults = {}
        for name, m in unsolved.items():
            w = default_witness(theta.apply(m).ty if isinstance(theta.apply(m), Meta) else m.ty,
                                self.seq, self.sig)
            if w is None:
                return None
            defaults[name] = w
        final = TermSubst(defaults).compose(theta) if defaults else theta
        return self._resolve_plan(plan, final)

    def _collect_unsolved(self, plan: _Plan, theta: TermSubst, acc: dict):
        if plan.kind == "ex_r":
            for name, m in free_metas(theta.apply(plan.payload["meta"])).items():
                acc.setdefault(name, m)
        if plan.kind == "def_r":
            for m in plan.payload["meta_ren"].values():
                for name, mm in free_metas(theta.apply(m)).items():
                    acc.setdefault(name, mm)
        for c in plan.children:
            self._collect_unsolved(c, theta, acc)

    def _resolve_plan(self, plan: _Plan, theta: TermSubst) -> Optional[_Plan]:
        children = []
        for c in plan.children:
            rc = self._resolve_plan(c, theta)
            if rc is None:
                return None
            children.append(rc)
        if plan.kind == "ex_r":
            w = theta.apply(plan.payload["meta"])
            if free_metas(w):
                return None
            return _Plan("ex_r", {"witness": w}, children)
        if plan.kind == "def_r":
            phi, th = _clause_payload(
                plan.payload["rc"], plan.payload["tyren"], plan.payload["meta_ren"],
                plan.payload["phi_local"],
                theta,
            )
            if phi is None:
                return None
            return _Plan(
                "def_r",
                {"block": plan.payload["block"], "clause": plan.payload["clause"],
                 "phi": phi, "theta": th},
                children,
            )
        return _Plan(plan.kind, plan.payload, children)


def default_witness(ty: Ty, seq: en.Sequent, sig: Signature, depth: int = 2) -> Optional[Term]:
    """Smallest witness of the given type from the context and constants."""
    from .terms import ty_vars
    from .unify import TyAmbiguous, TyClash, ty_unify

    for e in seq.eigens:
        if e.ty == ty:
            return e
    if depth <= 0:
        return None
    for name, decl in sig.consts.items():
        if decl.logical:
            continue
        params = decl.schema.params
        ren = TySubst({p: TyVar(f"?w:{p}") for p in params})
        args, tgt = strip_arrow(ren.apply_ty(decl.schema.body))
        out = ty_unify(tgt, ty, {f"?w:{p}" for p in params}, set(seq.tyvars))
        if isinstance(out, (TyClash, TyAmbiguous)):
            continue
        tyargs = tuple(out.apply_ty(TyVar(f"?w:{p}")) for p in params)
        if any(v.startswith("?w:") for ta in tyargs for v in ty_vars(ta)):
            continue  # underdetermined instance
        built = []
        for aty in (out.apply_ty(a) for a in args):
            w = default_witness(aty, seq, sig, depth - 1)
            if w is None:
                built = None
                break
            built.append(w)
        if built is not None:
            return app(Const(name, tyargs), tuple(built))
    return None
