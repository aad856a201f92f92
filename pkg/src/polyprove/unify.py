"""Unification: first-order over types, higher-order patterns over terms.

Type variables come in two flavors during unification.  Frozen variables
(the sequent-level parameters) act as opaque type constants: nothing may
be learned about them, and an equation that could only be settled by
instantiating one is reported as ambiguous rather than solved or failed.
Solvable variables (the parameters of a renamed-apart definition clause)
are instantiated by ordinary first-order unification.

Term unification is restricted to the pattern fragment: a solvable
metavariable may only be applied to distinct bound variables and
eigenvariables.  Within that fragment most general unifiers exist and are
unique up to renaming, and the computed unifier does not depend on how
the frozen type variables are later instantiated; type information is
threaded through every constant-instance comparison and variable binding
so that any dependence on frozen variables surfaces as an ambiguity
verdict instead of a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import NonPatternError, ProverError
from .terms import (
    App,
    Arrow,
    Bound,
    Const,
    Eigen,
    Lam,
    Meta,
    Signature,
    Sort,
    Term,
    TermSubst,
    Ty,
    TyApp,
    TySubst,
    TyVar,
    app,
    free_metas,
    normalize,
    shift,
    spine,
    strip_arrow,
    ty_vars,
)

# ---------------------------------------------------------------------------
# Type unification


@dataclass(frozen=True)
class TyClash:
    left: Ty
    right: Ty

    def __str__(self):
        return f"type clash: {self.left!r} vs {self.right!r}"


@dataclass(frozen=True)
class TyAmbiguous:
    left: Ty
    right: Ty

    def __str__(self):
        return f"{self.left!r} = {self.right!r}"


def ty_unify(tau1: Ty, tau2: Ty, solvable, frozen, base: Optional[TySubst] = None):
    """Most general unifier over the solvable variables only.

    Returns a TySubst on success, TyClash when distinct rigid structure
    rules out every instantiation of the frozen variables, and
    TyAmbiguous when success would require instantiating a frozen one.
    """
    solvable = set(solvable)
    phi = TySubst(base.m if base else {})
    eqs = [(tau1, tau2)]
    while eqs:
        a, b = eqs.pop()
        a = phi.apply_ty(a)
        b = phi.apply_ty(b)
        if a == b:
            continue
        if isinstance(a, TyVar) and a.name in solvable:
            if a.name in ty_vars(b):
                return TyClash(a, b)  # occurs: no instantiation can help
            phi = TySubst({a.name: b}).compose(phi)
            continue
        if isinstance(b, TyVar) and b.name in solvable:
            if b.name in ty_vars(a):
                return TyClash(b, a)
            phi = TySubst({b.name: a}).compose(phi)
            continue
        # frozen variable against anything else it is not equal to
        if isinstance(a, TyVar) or isinstance(b, TyVar):
            return TyAmbiguous(a, b)
        if isinstance(a, Sort) and isinstance(b, Sort):
            return TyClash(a, b)
        if isinstance(a, TyApp) and isinstance(b, TyApp):
            if a.con != b.con:
                return TyClash(a, b)
            eqs.extend(zip(a.args, b.args))
            continue
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            eqs.append((a.arg, b.arg))
            eqs.append((a.res, b.res))
            continue
        return TyClash(a, b)
    return phi


# ---------------------------------------------------------------------------
# Pattern unification over terms


@dataclass(frozen=True)
class Unifier:
    theta: TermSubst
    phi: TySubst


@dataclass(frozen=True)
class NoUnifier:
    reason: str


@dataclass(frozen=True)
class AmbiguousTypes:
    equation: TyAmbiguous


@dataclass(frozen=True)
class UnifyProblem:
    left: Term
    right: Term
    solvable: frozenset  # metavariable names that may be instantiated
    frozen_tyvars: frozenset = frozenset()
    solvable_tyvars: frozenset = frozenset()


class _Clash(Exception):
    def __init__(self, reason):
        self.reason = reason


class _Ambiguous(Exception):
    def __init__(self, equation):
        self.equation = equation


def _as_var(t: Term):
    """Eta-contract t to a Bound or Eigen variable, or None.

    The returned Bound index is relative to the context outside t.
    """
    depth = 0
    while isinstance(t, Lam):
        t = t.body
        depth += 1
    h, args = spine(t)
    if len(args) != depth:
        return None
    for i, a in enumerate(args):
        v = _as_var(a)
        if not isinstance(v, Bound) or v.index != depth - 1 - i:
            return None
    if isinstance(h, Bound):
        return Bound(h.index - depth) if h.index >= depth else None
    if isinstance(h, Eigen) and depth == 0:
        return h
    if isinstance(h, Eigen):
        return h  # eigen head under eta-expansion lambdas
    return None


class _PatternUnify:
    def __init__(self, solvable, frozen_tv, solvable_tv, sig: Signature):
        self.solvable = set(solvable)
        self.frozen_tv = set(frozen_tv)
        self.solvable_tv = set(solvable_tv)
        self.sig = sig
        self.theta: dict[str, Term] = {}
        self.phi = TySubst()
        self.fresh = 0

    # -- small helpers

    def fresh_meta(self, ty: Ty) -> Meta:
        self.fresh += 1
        m = Meta(f"#u{self.fresh}", ty)
        self.solvable.add(m.name)
        return m

    def resolve(self, t: Term) -> Term:
        t = TermSubst(self.theta).apply(t)
        return self.phi.apply_term(t)

    def merge_ty(self, a: Ty, b: Ty):
        out = ty_unify(a, b, self.solvable_tv, self.frozen_tv, base=self.phi)
        if isinstance(out, TyClash):
            raise _Clash(str(out))
        if isinstance(out, TyAmbiguous):
            raise _Ambiguous(out)
        self.phi = out

    def loose_ty(self, t: Term, binders: tuple) -> Ty:
        """Type of t without argument compatibility checks."""
        if isinstance(t, Bound):
            return binders[t.index]
        if isinstance(t, (Eigen, Meta)):
            return t.ty
        if isinstance(t, Const):
            return self.sig.const_schema(t.name).instantiate(t.tyargs)
        if isinstance(t, Lam):
            return Arrow(t.ty, self.loose_ty(t.body, (t.ty,) + binders))
        head, args = spine(t)
        ty = self.loose_ty(head, binders)
        for _ in args:
            if not isinstance(ty, Arrow):
                raise _Clash("over-applied head during unification")
            ty = ty.res
        return ty

    def bind(self, name: str, image: Term):
        image = normalize(image)
        one = TermSubst({name: image})
        for k in list(self.theta):
            self.theta[k] = one.apply(self.theta[k])
        self.theta[name] = image

    # -- main loop

    def unify(self, eqs: list):
        # each equation is (left, right, binder type stack)
        while eqs:
            l, r, bs = eqs.pop()
            l = self.resolve(l)
            r = self.resolve(r)
            self.step(l, r, bs, eqs)

    def step(self, l: Term, r: Term, bs: tuple, eqs: list):
        if isinstance(l, Lam) and isinstance(r, Lam):
            self.merge_ty(l.ty, r.ty)
            eqs.append((l.body, r.body, (self.phi.apply_ty(l.ty),) + bs))
            return
        if isinstance(l, Lam):
            r2 = normalize(app(shift(r, 1), (Bound(0),)))
            eqs.append((l.body, r2, (l.ty,) + bs))
            return
        if isinstance(r, Lam):
            l2 = normalize(app(shift(l, 1), (Bound(0),)))
            eqs.append((l2, r.body, (r.ty,) + bs))
            return
        hl, al = spine(l)
        hr, ar = spine(r)
        lflex = isinstance(hl, Meta) and hl.name in self.solvable
        rflex = isinstance(hr, Meta) and hr.name in self.solvable
        if lflex and rflex and hl.name == hr.name:
            self.same_meta(hl, al, ar, bs)
            return
        # flex-flex prefers binding the right side, so that left-side
        # variables (the analyzed sequent's) survive as representatives
        if rflex:
            self.flex(hr, ar, l, bs)
            return
        if lflex:
            self.flex(hl, al, r, bs)
            return
        self.rigid(hl, al, hr, ar, bs, eqs)

    def rigid(self, hl, al, hr, ar, bs, eqs):
        if isinstance(hl, Const) and isinstance(hr, Const):
            if hl.name != hr.name:
                raise _Clash(f"distinct constants {hl.name} vs {hr.name}")
            for ta, tb in zip(hl.tyargs, hr.tyargs):
                self.merge_ty(ta, tb)
        elif isinstance(hl, Eigen) and isinstance(hr, Eigen):
            if hl.name != hr.name:
                raise _Clash(f"distinct eigenvariables {hl.name} vs {hr.name}")
        elif isinstance(hl, Bound) and isinstance(hr, Bound):
            if hl.index != hr.index:
                raise _Clash("distinct bound variables")
        elif isinstance(hl, Meta) and isinstance(hr, Meta) and hl.name == hr.name:
            pass  # non-solvable meta treated as a constant
        else:
            raise _Clash(f"rigid head mismatch {hl!r} vs {hr!r}")
        if len(al) != len(ar):
            raise _Clash("spine length mismatch")
        for x, y in zip(al, ar):
            eqs.append((x, y, bs))

    def pattern_args(self, m: Meta, args) -> list:
        out = []
        for a in args:
            v = _as_var(a)
            if v is None:
                raise NonPatternError(f"{m.name} applied to a non-variable argument")
            out.append(v)
        seen = set()
        for v in out:
            key = ("b", v.index) if isinstance(v, Bound) else ("e", v.name)
            if key in seen:
                raise NonPatternError(f"{m.name} applied to repeated arguments")
            seen.add(key)
        return out

    def same_meta(self, m: Meta, al, ar, bs):
        va = self.pattern_args(m, al)
        vb = self.pattern_args(m, ar)
        if len(va) != len(vb):
            raise _Clash("spine length mismatch")
        keep = [
            i
            for i, (x, y) in enumerate(zip(va, vb))
            if type(x) is type(y)
            and (x.index == y.index if isinstance(x, Bound) else x.name == y.name)
        ]
        if len(keep) == len(va):
            return  # identical spines: equation is trivial
        mty = self.phi.apply_ty(m.ty)
        argtys, _ = strip_arrow(mty)
        if len(argtys) < len(va):
            raise ProverError(f"metavariable {m.name} applied beyond its type")
        argtys = argtys[: len(va)]
        tgt = mty
        for _ in va:
            tgt = tgt.res
        fresh = self.fresh_meta(self._arrow([argtys[i] for i in keep], tgt))
        n = len(va)
        body = app(fresh, tuple(Bound(n - 1 - i) for i in keep))
        image = body
        for i in range(n - 1, -1, -1):
            image = Lam(argtys[i], image)
        self.bind(m.name, image)

    @staticmethod
    def _arrow(args, tgt):
        out = tgt
        for a in reversed(args):
            out = Arrow(a, out)
        return out

    def flex(self, m: Meta, margs, r: Term, bs: tuple):
        vargs = self.pattern_args(m, margs)
        if m.name in free_metas(r):
            raise _Clash(f"occurs check: {m.name}")
        n = len(vargs)
        argtys, _ = strip_arrow(self.phi.apply_ty(m.ty))
        if len(argtys) < n:
            raise ProverError(f"metavariable {m.name} applied beyond its type")
        pos: dict = {}
        for i, v in enumerate(vargs):
            key = ("b", v.index) if isinstance(v, Bound) else ("e", v.name)
            pos[key] = n - 1 - i  # de Bruijn index inside the image, at depth 0

        body = self.invert(r, pos, 0, bs)
        image = body
        for i in range(n - 1, -1, -1):
            image = Lam(argtys[i], image)
        self.merge_ty(self.loose_ty(m, bs), self.loose_ty(image, bs))
        self.bind(m.name, image)

    def invert(self, t: Term, pos: dict, depth: int, bs: tuple) -> Term:
        """Rewrite t into the image of a meta whose arguments are described by pos.

        pos maps outer variables to image indices at depth 0; bound
        variables introduced inside t stay untouched.  A rigid occurrence
        of an outer variable not in pos means no unifier exists; such an
        occurrence under a flexible head is pruned away instead.
        """
        if isinstance(t, Lam):
            return Lam(t.ty, self.invert(t.body, pos, depth + 1, (t.ty,) + bs), t.hint)
        h, args = spine(t)
        if isinstance(h, Meta) and h.name in self.solvable:
            return self.prune(h, args, pos, depth, bs)
        if isinstance(h, Bound):
            if h.index < depth:
                nh = h
            else:
                k = ("b", h.index - depth)
                if k not in pos:
                    raise _Clash("bound variable would escape its scope")
                nh = Bound(pos[k] + depth)
        elif isinstance(h, Eigen):
            k = ("e", h.name)
            nh = Bound(pos[k] + depth) if k in pos else h
        else:
            nh = h
        return app(nh, tuple(self.invert(a, pos, depth, bs) for a in args))

    def prune(self, m: Meta, args, pos: dict, depth: int, bs: tuple) -> Term:
        vargs = self.pattern_args(m, args)
        argtys, _ = strip_arrow(self.phi.apply_ty(m.ty))
        if len(argtys) < len(vargs):
            raise ProverError(f"metavariable {m.name} applied beyond its type")
        keep = []
        for i, v in enumerate(vargs):
            if isinstance(v, Bound):
                if v.index < depth:
                    keep.append(i)  # local to the image being built
                elif ("b", v.index - depth) in pos:
                    keep.append(i)
            else:
                keep.append(i)  # eigenvariables are globally available
        inv_args = tuple(self.invert(args[i], pos, depth, bs) for i in keep)
        if len(keep) == len(vargs):
            return app(m, inv_args)
        tgt = self.phi.apply_ty(m.ty)
        for _ in vargs:
            tgt = tgt.res
        fresh = self.fresh_meta(self._arrow([argtys[i] for i in keep], tgt))
        n = len(vargs)
        inner = app(fresh, tuple(Bound(n - 1 - i) for i in keep))
        image = inner
        for i in range(n - 1, -1, -1):
            image = Lam(argtys[i], image)
        self.bind(m.name, image)
        return app(fresh, inv_args)

    # -- result

    def harvest(self) -> Unifier:
        theta = {k: normalize(self.phi.apply_term(v)) for k, v in self.theta.items()}
        return Unifier(TermSubst(theta), self.phi)


def pattern_unify(p: UnifyProblem, sig: Signature):
    """Solve a pattern unification problem.

    Returns Unifier, NoUnifier, or AmbiguousTypes; raises NonPatternError
    when the problem leaves the decidable fragment.
    """
    st = _PatternUnify(p.solvable, p.frozen_tyvars, p.solvable_tyvars, sig)
    try:
        st.unify([(p.left, p.right, ())])
    except _Clash as c:
        return NoUnifier(c.reason)
    except _Ambiguous as a:
        return AmbiguousTypes(a.equation)
    return st.harvest()


def unify_terms(l, r, solvable, sig, frozen_tv=(), solvable_tv=()):
    return pattern_unify(
        UnifyProblem(l, r, frozenset(solvable), frozenset(frozen_tv), frozenset(solvable_tv)),
        sig,
    )


# ---------------------------------------------------------------------------
# The three-way verdict for generic case analysis


@dataclass(frozen=True)
class NeverUnifiable:
    reason: str


@dataclass(frozen=True)
class Generic:
    phi: TySubst
    theta: TermSubst


@dataclass(frozen=True)
class NotGeneric:
    diagnostic: str


MatchOutcome = object  # NeverUnifiable | Generic | NotGeneric


def match_clause_generic(
    atom: Term,
    head: Term,
    frozen_tyvars,
    clause_tyvars,
    solvable_metas,
    sig: Signature,
):
    """Decide whether an atom can be analyzed generically against a clause head.

    The caller renames the clause apart and raises eigenvariables and
    clause binders to solvable metas.  The verdict is NeverUnifiable when
    failure is independent of how the frozen type variables are filled,
    Generic(phi, theta) when the singleton {theta} is a type-generic
    complete set of unifiers under the most general clause-parameter
    instantiation phi, and NotGeneric when unifiability depends on the
    frozen variables.
    """
    ha, _ = spine(atom)
    hc, _ = spine(head)
    if not (isinstance(ha, Const) and isinstance(hc, Const)) or ha.name != hc.name:
        return NeverUnifiable("distinct predicate heads")
    # Solve the head's type instance first; its solution is most general.
    phi0 = TySubst()
    for ta, tc in zip(ha.tyargs, hc.tyargs):
        out = ty_unify(tc, ta, clause_tyvars, frozen_tyvars, base=phi0)
        if isinstance(out, TyClash):
            return NeverUnifiable(str(out))
        if isinstance(out, TyAmbiguous):
            return NotGeneric(str(out))
        phi0 = out
    out = pattern_unify(
        UnifyProblem(
            atom,
            phi0.apply_term(head),
            frozenset(solvable_metas),
            frozenset(frozen_tyvars),
            frozenset(clause_tyvars),
        ),
        sig,
    )
    if isinstance(out, NoUnifier):
        return NeverUnifiable(out.reason)
    if isinstance(out, AmbiguousTypes):
        return NotGeneric(str(out.equation))
    phi = out.phi.compose(phi0)
    cvars = set(clause_tyvars)
    for v in clause_tyvars:
        image = phi.apply_ty(TyVar(v))
        leftover = [w for w in ty_vars(image) if w in cvars]
        if leftover:
            return NotGeneric(f"undetermined clause type variable {leftover[0]}")
    return Generic(phi.restrict(clause_tyvars), out.theta)
