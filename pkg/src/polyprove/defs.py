"""Schematic definition blocks: wellformedness, reduction, instantiation, builtins.

A block introduces predicates at schemas over the block parameters and a
set of clauses, each optionally parameterized by further clause-level type
variables.  A block all of whose clauses have empty clause-level
parameters may be designated inductive, since each of its ground
instances then has finitely many clauses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from .errors import BlockError, ProverError
from .formulas import conj, dest, exists_close, quantify, TOP
from .terms import (
    Const,
    Eigen,
    Lam,
    Meta,
    NAT,
    OBJ,
    PROP,
    Signature,
    Term,
    Ty,
    TySchema,
    TySubst,
    TyVar,
    app,
    arrow,
    spine,
    strip_arrow,
    term_ty_vars,
    ty_vars,
    well_formed_rel,
)


@dataclass(frozen=True)
class SchematicClause:
    """[clause_params] binder. head := body, with binder variables as Metas."""

    clause_params: tuple  # tuple[str, ...]
    binder: tuple  # tuple[tuple[str, Ty], ...]
    head: Term  # atomic, metas drawn from binder
    body: Term

    def head_pred(self) -> str:
        h, _ = spine(self.head)
        return h.name


@dataclass(frozen=True)
class DefBlock:
    block_params: tuple  # tuple[str, ...]
    predicates: tuple  # tuple[tuple[str, TySchema], ...]
    clauses: tuple  # tuple[SchematicClause, ...]
    inductive: bool = False

    def pred_names(self) -> set:
        return {n for n, _ in self.predicates}


@dataclass(frozen=True)
class ReducedClause:
    """A clause re-parameterized by exactly the type variables of its head."""

    params: tuple
    binder: tuple
    head: Term
    body: Term


def reduce_clause(c: SchematicClause, block_params) -> ReducedClause:
    head_tvs = term_ty_vars(c.head)
    params = tuple(v for v in head_tvs if v in set(c.clause_params) | set(block_params))
    return ReducedClause(params, c.binder, c.head, c.body)


# ---------------------------------------------------------------------------
# Wellformedness (with stratification)


def _pred_occurrences(t: Term, positive: bool, acc: list):
    """Collect (pred name, instance tyargs, positive?) for every atom head."""
    kind, payload = dest(t)
    if kind in ("and", "or"):
        _pred_occurrences(payload[0], positive, acc)
        _pred_occurrences(payload[1], positive, acc)
    elif kind == "imp":
        _pred_occurrences(payload[0], not positive, acc)
        _pred_occurrences(payload[1], positive, acc)
    elif kind in ("forall", "exists"):
        _pred_occurrences(payload[1].body, positive, acc)
    elif kind == "atom":
        h, args = payload
        if isinstance(h, Const):
            acc.append((h.name, h.tyargs, positive))
        for a in args:
            _scan_embedded(a, acc)


def _scan_embedded(t: Term, acc: list):
    """Instance-condition scan inside atom arguments (no polarity there)."""
    if isinstance(t, Const):
        acc.append((t.name, t.tyargs, True))
    elif isinstance(t, Lam):
        _scan_embedded(t.body, acc)
    else:
        h, args = spine(t)
        if h is not t:
            _scan_embedded(h, acc)
            for a in args:
                _scan_embedded(a, acc)


def check_block(b: DefBlock, sig: Signature, earlier_blocks=None) -> list:
    """Diagnostics for every violated wellformedness condition; empty when ok.

    Conditions: (a) clause params disjoint from block params; (b) head and
    body well-formed relative to their union; (c) block predicates only at
    their defining instance; (d) body type variables contained in the
    head's; stratification over earlier blocks plus no negative
    self-occurrence; inductive blocks have type-closed clauses.
    """
    if earlier_blocks is None:
        earlier_blocks = sig.blocks
    diags = []
    own = b.pred_names()
    earlier = set()
    for blk in earlier_blocks:
        earlier |= blk.pred_names()
    block_instance = tuple(TyVar(v) for v in b.block_params)
    for i, c in enumerate(b.clauses, 1):
        where = f"clause {i}"
        if set(c.clause_params) & set(b.block_params):
            diags.append(("block-params-overlap", f"{where}: clause parameters reuse block parameters"))
        psi = set(c.clause_params) | set(b.block_params)
        if not (well_formed_rel(c.head, psi, sig) and well_formed_rel(c.body, psi, sig)):
            diags.append(("ill-formed", f"{where}: head or body not well-formed over its type parameters"))
        h, _ = spine(c.head)
        if not isinstance(h, Const) or h.name not in own:
            diags.append(("head-not-own-predicate", f"{where}: head is not a predicate of this block"))
        occs: list = []
        _pred_occurrences(c.head, True, occs)
        body_occs: list = []
        _pred_occurrences(c.body, True, body_occs)
        for name, tyargs, _pos in occs + body_occs:
            if name in own and tuple(tyargs) != block_instance:
                diags.append(
                    ("wrong-instance", f"{where}: {name} must occur at its defining instance")
                )
        head_tvs = set(term_ty_vars(c.head))
        body_tvs = set(term_ty_vars(c.body))
        if not body_tvs <= head_tvs:
            extra = sorted(body_tvs - head_tvs)
            diags.append(
                ("body-tyvar-escape", f"{where}: body type variables {extra} missing from the head")
            )
        unused = [v for v in c.clause_params if v not in head_tvs | body_tvs]
        if unused:
            diags.append(
                ("unused-clause-param", f"{where}: clause parameters {unused} never occur")
            )
        for name, _tyargs, pos in body_occs:
            if not sig.is_predicate(name) and name not in own:
                continue
            targets_prop = name in own or (
                name in sig.consts and strip_arrow(sig.const_schema(name).body)[1] == PROP
            )
            if not targets_prop:
                continue
            if name in own:
                if not pos:
                    diags.append(
                        ("negative-occurrence", f"{where}: {name} occurs in the antecedent of an implication")
                    )
            elif name not in earlier and name not in sig.block_of_pred:
                diags.append(
                    ("undefined-predicate", f"{where}: body predicate {name} is not defined by an earlier block")
                )
        binder_names = {n for n, _ in c.binder}
        from .terms import free_metas

        head_vars = set(free_metas(c.head))
        body_vars = set(free_metas(c.body))
        if not head_vars <= binder_names:
            diags.append(("unbound-head-variable", f"{where}: head variables missing from the binder"))
        if not body_vars <= head_vars:
            diags.append(
                ("body-variable-escape", f"{where}: body variables {sorted(body_vars - head_vars)} missing from the head")
            )
        if b.inductive and c.clause_params:
            diags.append(
                ("inductive-clause-params", f"{where}: inductive blocks require type-closed clauses")
            )
    return diags


def check_block_or_raise(b: DefBlock, sig: Signature, earlier_blocks=None):
    diags = check_block(b, sig, earlier_blocks)
    if diags:
        raise BlockError(diags)


# ---------------------------------------------------------------------------
# Ground instantiation


@dataclass(frozen=True)
class GroundClause:
    binder: tuple  # tuple[tuple[str, Ty], ...], all types ground
    head: Term
    body: Term


def instantiate_block(b: DefBlock, tau_bar, ground_pool) -> list:
    """Every ground clause of the block instance at tau_bar.

    Clause-level parameters are enumerated over the pool, lexicographically
    in pool order, so the output is deterministic.
    """
    if len(tau_bar) != len(b.block_params):
        raise ProverError(
            f"block expects {len(b.block_params)} type arguments, got {len(tau_bar)}"
        )
    base = TySubst(dict(zip(b.block_params, tau_bar)))
    out = []
    for c in b.clauses:
        if c.clause_params and not ground_pool:
            raise ProverError("EmptyPool: clause-parameterized clause with no ground types")
        assignments = (
            itertools.product(ground_pool, repeat=len(c.clause_params))
            if c.clause_params
            else [()]
        )
        for choice in assignments:
            phi = TySubst(dict(zip(c.clause_params, choice))).compose(base)
            binder = tuple((n, phi.apply_ty(ty)) for n, ty in c.binder)
            out.append(
                GroundClause(binder, phi.apply_term(c.head), phi.apply_term(c.body))
            )
    return out


# ---------------------------------------------------------------------------
# Built-in blocks


def _m(name: str, ty: Ty) -> Meta:
    return Meta(name, ty)


def eq_block() -> DefBlock:
    A = TyVar("A")
    schema = TySchema(("A",), arrow(A, A, PROP))
    x = _m("x", A)
    head = app(Const("=", (A,)), (x, x))
    clause = SchematicClause((), (("x", A),), head, TOP)
    return DefBlock(("A",), (("=", schema),), (clause,), inductive=False)


def nat_block() -> DefBlock:
    schema = TySchema((), arrow(NAT, PROP))
    z = Const("z")
    s = Const("s")
    n = _m("n", NAT)
    c1 = SchematicClause((), (), app(Const("nat"), (z,)), TOP)
    c2 = SchematicClause(
        (), (("n", NAT),), app(Const("nat"), (app(s, (n,)),)), app(Const("nat"), (n,))
    )
    return DefBlock((), (("nat", schema),), (c1, c2), inductive=True)


def prove_block() -> DefBlock:
    """Derivability of spec-logic goals, indexed by a natural-number height."""
    schema = TySchema((), arrow(NAT, OBJ, PROP))
    s = Const("s")
    n = _m("n", NAT)
    c1 = SchematicClause(
        (), (("n", NAT),), app(Const("prove"), (n, Const("tt"))), TOP
    )
    g1, g2 = _m("g1", OBJ), _m("g2", OBJ)
    c2 = SchematicClause(
        (),
        (("n", NAT), ("g1", OBJ), ("g2", OBJ)),
        app(Const("prove"), (app(s, (n,)), app(Const("&&"), (g1, g2)))),
        conj(app(Const("prove"), (n, g1)), app(Const("prove"), (n, g2))),
    )
    a = _m("a", OBJ)
    g = Eigen("g", OBJ)  # existentially bound below
    body3 = exists_close(
        g,
        conj(app(Const("prog"), (a, g)), app(Const("prove"), (n, g))),
    )
    c3 = SchematicClause(
        (),
        (("n", NAT), ("a", OBJ)),
        app(Const("prove"), (app(s, (n,)), app(Const("atm"), (a,)))),
        body3,
    )
    return DefBlock((), (("prove", schema),), (c1, c2, c3), inductive=True)


def declare_base_constants(sig: Signature):
    """Spec-logic plumbing constants shared by every development."""
    sig.declare_const("z", TySchema((), NAT))
    sig.declare_const("s", TySchema((), arrow(NAT, NAT)))
    sig.declare_const("tt", TySchema((), OBJ))
    sig.declare_const("&&", TySchema((), arrow(OBJ, OBJ, OBJ)))
    sig.declare_const("atm", TySchema((), arrow(OBJ, OBJ)))
    A = TyVar("A")
    sig.declare_const("=", TySchema(("A",), arrow(A, A, PROP)))
    sig.declare_const("nat", TySchema((), arrow(NAT, PROP)))
    sig.declare_const("prog", TySchema((), arrow(OBJ, OBJ, PROP)))
    sig.declare_const("prove", TySchema((), arrow(NAT, OBJ, PROP)))


def builtin_blocks(sig: Signature) -> list:
    """The built-in definition blocks, in registration order."""
    return [eq_block(), nat_block(), prove_block()]


def install_base_blocks(sig: Signature):
    """Register equality and nat; prog/prove wait for a specification import."""
    declare_base_constants(sig)
    for b in (eq_block(), nat_block()):
        check_block_or_raise(b, sig)
        sig.register_block(b)
