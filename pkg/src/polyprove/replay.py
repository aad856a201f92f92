"""Ground replay: instantiate a schematic proof at concrete types and
re-derive every step in a strictly monomorphic setting.

This operationalizes the soundness statement for the schematic rules:
any assignment of ground types to the proof's type parameters must yield
a valid monomorphic derivation.  Each node is re-derived independently;
the recorded tree contributes only clause choices, witnesses, and
instantiation payloads.  Case-analysis nodes are the interesting ones:
the replayer recomputes the ground case split against every ground
instance of every clause and demands a one-to-one match with the
recorded premises, so a clause the schematic analysis deemed never
unifiable must indeed have no ground unifier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from . import engine as en
from .defs import GroundClause, instantiate_block, reduce_clause
from .errors import ProverError, ReplayError, TacticError
from .formulas import dest, is_atomic
from .tactics import ProofNode
from .terms import (
    Const,
    Eigen,
    Lam,
    Meta,
    Signature,
    Term,
    TermSubst,
    Ty,
    TySubst,
    aeq,
    annotation_of,
    app,
    normalize,
    spine,
    term_ty_vars,
    ty_is_ground,
)
from .unify import Generic, NeverUnifiable, NotGeneric, match_clause_generic

# ---------------------------------------------------------------------------
# Instantiating a proof at ground types


def _phi_payload(payload: dict, Phi: TySubst) -> dict:
    out = {}
    for k, v in payload.items():
        if isinstance(v, TySubst):
            out[k] = TySubst({n: Phi.apply_ty(t) for n, t in v.m.items()})
        elif isinstance(v, TermSubst):
            out[k] = v.under_tysubst(Phi)
        elif isinstance(v, (Const, Eigen, Meta, Lam)) or _is_term(v):
            out[k] = Phi.apply_term(v)
        elif k == "tyargs" and v is not None:
            out[k] = [Phi.apply_ty(t) for t in v]
        elif k == "with" and v is not None:
            out[k] = {n: Phi.apply_term(t) for n, t in v.items()}
        else:
            out[k] = v
    return out


def _is_term(v) -> bool:
    from .terms import App, Bound

    return isinstance(v, (App, Bound, Const, Eigen, Lam, Meta))


def _phi_sequent(seq: en.Sequent, Phi: TySubst) -> en.Sequent:
    return en.Sequent(
        (),
        tuple(Eigen(e.name, Phi.apply_ty(e.ty)) for e in seq.eigens),
        tuple(en.Hyp(h.label, Phi.apply_term(h.formula)) for h in seq.hyps),
        Phi.apply_term(seq.goal),
        seq.hyp_counter,
    )


def instantiate_proof(node: ProofNode, Phi: TySubst) -> ProofNode:
    """Apply a ground type assignment to every sequent and payload."""
    missing = [v for v in node.sequent.tyvars if v not in Phi.m]
    if missing:
        raise ProverError(f"assignment misses type parameters {missing}")
    for v, ty in Phi.m.items():
        if not ty_is_ground(ty):
            raise ProverError(f"assignment for {v} is not ground: {ty!r}")
    return _instantiate(node, Phi)


def _instantiate(node: ProofNode, Phi: TySubst) -> ProofNode:
    return ProofNode(
        node.rule,
        _phi_payload(node.payload, Phi),
        _phi_sequent(node.sequent, Phi),
        tuple(_instantiate(c, Phi) for c in node.children),
    )


# ---------------------------------------------------------------------------
# The ground kernel


class GroundKernel:
    """Monomorphic replayer over a pool of ground types.

    Clause-parameterized clauses are instantiated over the pool plus
    every ground type occurring in the proof being replayed, keeping the
    ground blocks finite.
    """

    def __init__(self, sig: Signature, lemmas: dict, pool, extra_types=()):
        self.sig = sig
        self.lemmas = lemmas
        types = list(pool)
        for t in extra_types:
            if t not in types:
                types.append(t)
        self.pool = types
        self._ground: dict = {}

    def ground_clauses(self, pred: str, tyargs: tuple) -> list:
        key = (pred, tyargs)
        if key not in self._ground:
            block = self.sig.block_for(pred)
            if block is None:
                raise TacticError("NotDefined", f"{pred} has no defining block")
            self._ground[key] = instantiate_block(block, list(tyargs), self.pool)
        return self._ground[key]


def proof_ground_types(node: ProofNode, acc: Optional[set] = None) -> set:
    """Every ground type occurring in the instantiated proof's sequents."""
    if acc is None:
        acc = set()
    for e in node.sequent.eigens:
        _collect_tys_of_term(e, acc)
    for h in node.sequent.hyps:
        _collect_tys_of_term(h.formula, acc)
    _collect_tys_of_term(node.sequent.goal, acc)
    for c in node.children:
        proof_ground_types(c, acc)
    return acc


def _collect_tys_of_term(t: Term, acc: set):
    from .terms import App, Bound

    if isinstance(t, (Eigen, Meta)):
        acc.add(t.ty)
    elif isinstance(t, Lam):
        acc.add(t.ty)
        _collect_tys_of_term(t.body, acc)
    elif isinstance(t, Const):
        for ty in t.tyargs:
            acc.add(ty)
    elif isinstance(t, App):
        _collect_tys_of_term(t.head, acc)
        for a in t.args:
            _collect_tys_of_term(a, acc)


# ---------------------------------------------------------------------------
# Annotation-sensitive sequent comparison


def _term_eq_ann(t1: Term, t2: Term, ren: TermSubst) -> bool:
    t2 = ren.apply(t2)
    return aeq(t1, t2) and _ann_profile(t1) == _ann_profile(t2)


def _ann_profile(t: Term, acc: Optional[list] = None) -> list:
    if acc is None:
        acc = []
    from .terms import App

    if isinstance(t, Const):
        acc.append(t.ann)
    elif isinstance(t, Lam):
        _ann_profile(t.body, acc)
    elif isinstance(t, App):
        _ann_profile(t.head, acc)
        for a in t.args:
            _ann_profile(a, acc)
    return acc


def sequent_replay_eq(s1: en.Sequent, s2: en.Sequent) -> bool:
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
        if h1.label != h2.label or not _term_eq_ann(h1.formula, h2.formula, sub):
            return False
    return _term_eq_ann(s1.goal, s2.goal, sub)


# ---------------------------------------------------------------------------
# Replay proper


def replay(node: ProofNode, kernel: GroundKernel):
    """Re-derive every step; raises ReplayError at the first divergence."""
    _replay(node, kernel, ())


def _replay(node: ProofNode, kernel: GroundKernel, path: tuple):
    if node.sequent.tyvars:
        raise ReplayError(path, "sequent is not ground")
    if node.rule is None:
        raise ReplayError(path, "open subgoal in a supposedly complete proof")
    if node.rule == "skip":
        raise ReplayError(path, "proof admits a subgoal")
    try:
        premises = _derive(node, kernel)
    except (TacticError, ProverError) as e:
        raise ReplayError(path, f"{node.rule} does not re-derive: {e}") from e
    if len(premises) != len(node.children):
        raise ReplayError(
            path,
            f"{node.rule} produced {len(premises)} premise(s), recorded "
            f"{len(node.children)}",
        )
    for i, (prem, child) in enumerate(zip(premises, node.children)):
        if not sequent_replay_eq(prem, child.sequent):
            raise ReplayError(path + (i,), f"premise of {node.rule} diverges")
    for i, child in enumerate(node.children):
        _replay(child, kernel, path + (i,))


def _derive(node: ProofNode, kernel: GroundKernel):
    seq = node.sequent
    sig = kernel.sig
    r = node.rule
    p = node.payload
    if r == "all_r":
        return en.rule_all_r(seq, sig).premises
    if r == "ex_l":
        return en.rule_ex_l(seq, p["label"], sig).premises
    if r == "all_l":
        return en.rule_all_l(seq, p["label"], p["witness"], sig).premises
    if r == "ex_r":
        return en.rule_ex_r(seq, p["witness"], sig).premises
    if r == "imp_r":
        return en.rule_imp_r(seq).premises
    if r == "and_r":
        return en.rule_and_r(seq).premises
    if r in ("or_r1", "or_r2"):
        return en.rule_or_r(seq, 1 if r == "or_r1" else 2).premises
    if r == "true_r":
        return en.rule_true_r(seq).premises
    if r == "axiom":
        return en.rule_axiom(seq, p["label"]).premises
    if r == "and_l":
        return en.rule_and_l(seq, p["label"]).premises
    if r == "or_l":
        return en.rule_or_l(seq, p["label"]).premises
    if r == "imp_l":
        return en.rule_imp_l(seq, p["label"]).premises
    if r == "false_l":
        return en.rule_false_l(seq, p["label"]).premises
    if r == "true_l":
        return en.rule_true_l(seq, p["label"]).premises
    if r == "induction":
        return en.rule_induction(seq, p["n"], p["gen"], sig).premises
    if r == "assert":
        return en.rule_assert(seq, p["formula"], sig).premises
    if r == "apply":
        lemma = None
        if all(h.label != p["source"] for h in seq.hyps):
            lemma = kernel.lemmas[p["source"]]
        return en.rule_apply(
            seq, p["source"], p["targets"], sig, lemma=lemma,
            tyargs=p.get("tyargs"), with_bindings=p.get("with"),
        ).premises
    if r == "def_r":
        return _derive_def_r(node, kernel)
    if r == "def_l":
        return _derive_def_l(node, kernel)
    raise ReplayError((), f"unknown rule {r}")


def _derive_def_r(node: ProofNode, kernel: GroundKernel):
    seq = node.sequent
    head, _ = spine(seq.goal)
    block = kernel.sig.block_for(head.name)
    if block is None:
        raise TacticError("NotDefined", f"{head.name} has no defining block")
    out = en.rule_def_r(seq, block, node.payload["clause"],
                        node.payload["phi"], node.payload["theta"], kernel.sig)
    return out.premises


def _derive_def_l(node: ProofNode, kernel: GroundKernel):
    """Recompute the ground case split over all clause instances."""
    seq = node.sequent
    label = node.payload["label"]
    h = seq.hyp(label)
    if not is_atomic(h.formula):
        raise TacticError("TargetNotAtomic", f"{label} is not atomic")
    head, _ = spine(h.formula)
    block = kernel.sig.block_for(head.name)
    if block is None:
        raise TacticError("NotDefined", f"{head.name} has no defining block")
    ground = kernel.ground_clauses(head.name, head.tyargs)
    ann = annotation_of(h.formula)
    raise_map = TermSubst({e.name: Meta(f"?e:{e.name}", e.ty) for e in seq.eigens})
    raised = {f"?e:{e.name}" for e in seq.eigens}
    premises = []
    for gi, gc in enumerate(ground):
        binder_map = {}
        for i, (n, ty) in enumerate(gc.binder):
            binder_map[n] = Meta(f"?x{gi}.{i}:{n}", ty)
        ren = TermSubst(binder_map)
        c_head = ren.apply(gc.head)
        c_body = ren.apply(gc.body)
        atom_r = raise_map.apply(h.formula)
        out = match_clause_generic(
            atom_r, c_head, set(), set(), {m.name for m in binder_map.values()} | raised,
            kernel.sig,
        )
        if isinstance(out, NeverUnifiable):
            continue
        if isinstance(out, NotGeneric):  # impossible at ground types
            raise TacticError("NotAmenable", f"ground ambiguity: {out.diagnostic}")
        premises.append(
            en._def_l_premise(seq, label, raise_map, out, c_body, block, ann, kernel.sig)
        )
    return premises


# ---------------------------------------------------------------------------
# The soundness harness


@dataclass
class ReplayReport:
    theorem: str
    results: list  # (assignment dict as {var: Ty}, ok bool, message)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.results)


def assignments(params, pool, cap: int = 81):
    combos = itertools.product(pool, repeat=len(params))
    for k, combo in enumerate(combos):
        if k >= cap:
            break
        yield TySubst(dict(zip(params, combo)))


def soundness_harness(name: str, params, tree: ProofNode, sig: Signature,
                      lemmas: dict, pool, cap: int = 81) -> ReplayReport:
    """Replay a completed proof at every pool assignment of its parameters."""
    report = ReplayReport(name, [])
    for Phi in assignments(params, pool, cap):
        try:
            ground = instantiate_proof(tree, Phi)
            extra = [t for t in proof_ground_types(ground) if ty_is_ground(t)]
            kernel = GroundKernel(sig, lemmas, pool, extra)
            replay(ground, kernel)
            report.results.append((dict(Phi.m), True, "ok"))
        except (ReplayError, ProverError) as e:
            report.results.append((dict(Phi.m), False, str(e)))
    if not report.results:  # no parameters: single empty assignment
        try:
            kernel = GroundKernel(sig, lemmas, pool,
                                  [t for t in proof_ground_types(tree) if ty_is_ground(t)])
            replay(tree, kernel)
            report.results.append(({}, True, "ok"))
        except (ReplayError, ProverError) as e:
            report.results.append(({}, False, str(e)))
    return report
