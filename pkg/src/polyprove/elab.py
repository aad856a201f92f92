"""Elaboration of surface trees into core types and terms.

Types are inferred with placeholder type variables (spelled ``?e<n>``)
solved by first-order unification against the declared type parameters,
which stay frozen.  Capitalized identifiers resolve to bound or context
variables when in scope; free capitals are clause/query variables or an
error, depending on mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ElabError, UnknownConstant
from .formulas import conj
from .surface import (
    SApp,
    SBrace,
    SInst,
    SLam,
    SName,
    SOp,
    SQuant,
    STApp,
    STArrow,
    STName,
)
from .terms import (
    Arrow,
    Bound,
    Const,
    Eigen,
    Lam,
    Meta,
    NAT,
    OBJ,
    PROP,
    Signature,
    Sort,
    Term,
    Ty,
    TyApp,
    TySubst,
    TyVar,
    app,
    normalize,
    strip_arrow,
    term_ty_vars,
    ty_vars,
)
from .unify import TyAmbiguous, TyClash, ty_unify


@dataclass
class ElabResult:
    term: Term
    new_vars: dict  # capitalized free variables introduced (name -> Meta)
    residual_tyvars: list  # placeholder names that stayed unresolved


class Elaborator:
    """One elaboration context: declared type parameters plus a mode.

    mode: "closed"  - free capitals are an error (theorem statements)
          "clause"  - free capitals become clause variables
          "query"   - free capitals become query variables
    """

    def __init__(self, sig: Signature, tyvars=(), mode: str = "closed",
                 var_env: Optional[dict] = None):
        self.sig = sig
        self.tyvars = tuple(tyvars)
        self.mode = mode
        self.var_env = dict(var_env or {})  # name -> Eigen
        self.phi = TySubst()
        self.counter = 0
        self.new_vars: dict = {}
        # block predicates pinned to their defining instance while
        # elaborating the block's own clauses
        self.fixed_instances: dict = {}

    # -- type-level

    def fresh_ty(self, hint: str = "e") -> TyVar:
        self.counter += 1
        return TyVar(f"?{hint}{self.counter}")

    def elab_ty(self, sty, implicit: Optional[dict] = None) -> Ty:
        """implicit, when given, collects unseen capitalized names as schema params."""
        if isinstance(sty, STName):
            n = sty.name
            if n in self.tyvars:
                return TyVar(n)
            if implicit is not None and n[0].isupper():
                implicit.setdefault(n, TyVar(n))
                return TyVar(n)
            if n in self.sig.sorts:
                return Sort(n)
            if n in self.sig.tycons:
                raise ElabError(f"type constructor {n} expects arguments")
            if self.mode == "clause" and n[0].isupper():
                # scoping of clause type variables is the block checker's
                # business; leave the variable free for it to flag
                return TyVar(n)
            raise ElabError(f"unknown type {n}")
        if isinstance(sty, STApp):
            if sty.con not in self.sig.tycons:
                raise ElabError(f"unknown type constructor {sty.con}")
            if self.sig.tycons[sty.con] != len(sty.args):
                raise ElabError(
                    f"{sty.con} expects {self.sig.tycons[sty.con]} arguments"
                )
            return TyApp(sty.con, tuple(self.elab_ty(a, implicit) for a in sty.args))
        if isinstance(sty, STArrow):
            return Arrow(self.elab_ty(sty.arg, implicit), self.elab_ty(sty.res, implicit))
        raise ElabError(f"bad type {sty!r}")

    def unify_ty(self, a: Ty, b: Ty, where: str = ""):
        solvable = {v for v in ty_vars(a) + ty_vars(b) if v.startswith("?")}
        out = ty_unify(a, b, solvable, set(self.tyvars), base=self.phi)
        if isinstance(out, TyClash):
            raise ElabError(f"type mismatch{': ' + where if where else ''}: {out}")
        if isinstance(out, TyAmbiguous):
            raise ElabError(
                f"type depends on frozen parameters{': ' + where if where else ''}: {out}"
            )
        self.phi = out

    # -- term-level

    def elab(self, e, expect: Ty, env: Optional[list] = None) -> Term:
        """env is the binder stack: list of (name, Ty), innermost first."""
        if env is None:
            env = []
        if isinstance(e, SOp):
            return self._elab_op(e, expect, env)
        if isinstance(e, SQuant):
            self.unify_ty(expect, PROP, "quantified formula")
            body = e.body
            binders = []
            for name, sty in e.binders:
                ty = self.elab_ty(sty) if sty is not None else self.fresh_ty()
                binders.append((name, ty))
            inner_env = list(reversed(binders)) + env
            t = self.elab(body, PROP, inner_env)
            for name, ty in reversed(binders):
                t = app(Const(e.q, (ty,)), (Lam(ty, t, name),))
            return t
        if isinstance(e, SLam):
            a = self.fresh_ty()
            b = self.fresh_ty()
            self.unify_ty(expect, Arrow(a, b), "abstraction")
            body = self.elab(e.body, b, [(e.name, a)] + env)
            return Lam(a, body, e.name)
        if isinstance(e, SBrace):
            from .terms import shift

            self.unify_ty(expect, PROP, "embedded goal")
            goal = self._elab_spec_goal(e, env)
            # exists n:nat, nat n /\ prove n goal -- the goal's indices move
            # under the new binder
            inner = conj(
                app(Const("nat"), (Bound(0),)),
                app(Const("prove"), (Bound(0), shift(goal, 1))),
            )
            return app(Const("exists", (NAT,)), (Lam(NAT, inner, "n"),))
        if isinstance(e, SApp):
            head, hty = self._elab_head(e.fn, env)
            args = []
            for a in e.args:
                hty = self.phi.apply_ty(hty)
                if isinstance(hty, TyVar) and hty.name.startswith("?"):
                    aty, rty = self.fresh_ty(), self.fresh_ty()
                    self.unify_ty(hty, Arrow(aty, rty))
                    hty = Arrow(aty, rty)
                if not isinstance(hty, Arrow):
                    raise ElabError(f"too many arguments to {self._describe(e.fn)}")
                args.append(self.elab(a, hty.arg, env))
                hty = hty.res
            self.unify_ty(hty, expect, self._describe(e.fn))
            return app(head, tuple(args))
        if isinstance(e, (SName, SInst)):
            head, hty = self._elab_head(e, env)
            self.unify_ty(hty, expect, self._describe(e))
            return head
        raise ElabError(f"cannot elaborate {e!r}")

    def _describe(self, e) -> str:
        if isinstance(e, (SName, SInst)):
            return e.name
        return "expression"

    def _elab_op(self, e: SOp, expect: Ty, env) -> Term:
        if e.op in ("and", "or", "imp"):
            self.unify_ty(expect, PROP, "formula")
            name = {"and": "and", "or": "or", "imp": "imp"}[e.op]
            return app(
                Const(name),
                (self.elab(e.left, PROP, env), self.elab(e.right, PROP, env)),
            )
        if e.op == "spec-and":
            self.unify_ty(expect, OBJ, "specification goal")
            return app(
                Const("&&"),
                (self.elab(e.left, OBJ, env), self.elab(e.right, OBJ, env)),
            )
        if e.op == "eq":
            self.unify_ty(expect, PROP, "equation")
            ty = self.fresh_ty()
            l = self.elab(e.left, ty, env)
            r = self.elab(e.right, ty, env)
            return app(Const("=", (self.phi.apply_ty(ty),)), (l, r))
        if e.op == "cons":
            return self.elab(SApp(SName("cons"), (e.left, e.right)), expect, env)
        raise ElabError(f"unknown operator {e.op}")

    def _elab_head(self, e, env):
        if isinstance(e, (SApp, SOp, SQuant, SBrace, SLam)):
            t = self.elab(e, self.fresh_ty(), env)
            # the expected type was a placeholder; recompute from structure
            from .terms import infer_type

            return t, infer_type(self.phi.apply_term(t), self.sig)
        if isinstance(e, SInst):
            if e.name not in self.sig.consts:
                raise UnknownConstant(f"unknown constant {e.name}")
            schema = self.sig.consts[e.name].schema
            tys = tuple(self.elab_ty(t) for t in e.tys)
            if len(tys) != len(schema.params):
                raise ElabError(
                    f"{e.name} expects {len(schema.params)} type arguments"
                )
            return Const(e.name, tys), schema.instantiate(tys)
        if isinstance(e, SName):
            n = e.name
            for i, (bname, bty) in enumerate(env):
                if bname == n:
                    return Bound(i), bty
            if n in self.var_env:
                v = self.var_env[n]
                return v, v.ty
            if n in self.fixed_instances:
                tys = self.fixed_instances[n]
                return Const(n, tys), self.sig.consts[n].schema.instantiate(tys)
            if n in self.sig.consts:
                schema = self.sig.consts[n].schema
                tys = tuple(self.fresh_ty(f"i") for _ in schema.params)
                return Const(n, tys), schema.instantiate(tys)
            if n[0].isupper():
                if self.mode == "closed":
                    raise ElabError(f"unbound variable {n}")
                if n in self.new_vars:
                    m = self.new_vars[n]
                    return m, m.ty
                m = Meta(n, self.fresh_ty("v"))
                self.new_vars[n] = m
                return m, m.ty
            raise UnknownConstant(f"unknown constant {n}")
        raise ElabError(f"cannot elaborate head {e!r}")

    def _elab_spec_goal(self, e: SBrace, env) -> Term:
        goals = [self.elab(g, OBJ, env) for g in e.goals]
        wrapped = [self._wrap_atm(g) for g in goals]
        out = wrapped[-1]
        for g in reversed(wrapped[:-1]):
            out = app(Const("&&"), (g, out))
        return out

    def _wrap_atm(self, g: Term) -> Term:
        from .terms import spine

        h, args = spine(g)
        if isinstance(h, Const) and h.name in ("tt", "&&", "atm"):
            if h.name == "&&":
                return app(Const("&&"), (self._wrap_atm(args[0]), self._wrap_atm(args[1])))
            return g
        return app(Const("atm"), (g,))

    # -- finalization

    def finish(self, t: Term, what: str = "term") -> Term:
        t = normalize(self.phi.apply_term(t))
        residual = sorted({v for v in term_ty_vars(t) if v.startswith("?")})
        if residual:
            raise ElabError(
                f"cannot infer all types in this {what}; add annotations "
                f"(undetermined: {len(residual)} placeholder(s))"
            )
        return t

    def finish_vars(self) -> dict:
        out = {}
        for name, m in self.new_vars.items():
            out[name] = Meta(name, self.phi.apply_ty(m.ty))
        return out
