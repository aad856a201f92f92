"""Types, type schemas, lambda-terms, normalization, typing, substitutions.

Terms use de Bruijn indices for lambda-bound variables, so alpha-equality
is structural and substitution never captures.  Eigenvariables and
metavariables are free named nodes carrying their own types.  Stored terms
are kept beta-normal; eta is handled on demand by comparison/unification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .errors import IllTyped, SignatureError, UnknownConstant

# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Sort:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class TyVar:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class TyApp:
    con: str
    args: tuple  # tuple[Ty, ...], nonempty

    def __repr__(self):
        return "(" + self.con + " " + " ".join(map(repr, self.args)) + ")"


@dataclass(frozen=True)
class Arrow:
    arg: "Ty"
    res: "Ty"

    def __repr__(self):
        return f"({self.arg} -> {self.res})"


Ty = Union[Sort, TyVar, TyApp, Arrow]

PROP = Sort("prop")
OBJ = Sort("o")  # spec-logic proposition sort
NAT = Sort("nat")


def arrow(*tys: Ty) -> Ty:
    """Right-fold tys into an arrow type; arrow(a) is just a."""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Arrow(t, out)
    return out


def strip_arrow(ty: Ty) -> tuple[list[Ty], Ty]:
    """Split a type into (argument types, atomic target)."""
    args = []
    while isinstance(ty, Arrow):
        args.append(ty.arg)
        ty = ty.res
    return args, ty


def ty_vars(ty: Ty, acc: Optional[list[str]] = None) -> list[str]:
    """Type variables of ty in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(ty, TyVar):
        if ty.name not in acc:
            acc.append(ty.name)
    elif isinstance(ty, TyApp):
        for a in ty.args:
            ty_vars(a, acc)
    elif isinstance(ty, Arrow):
        ty_vars(ty.arg, acc)
        ty_vars(ty.res, acc)
    return acc


def ty_is_ground(ty: Ty) -> bool:
    return not ty_vars(ty)


def ty_contains_sort(ty: Ty, name: str) -> bool:
    if isinstance(ty, Sort):
        return ty.name == name
    if isinstance(ty, TyApp):
        return any(ty_contains_sort(a, name) for a in ty.args)
    if isinstance(ty, Arrow):
        return ty_contains_sort(ty.arg, name) or ty_contains_sort(ty.res, name)
    return False


@dataclass(frozen=True)
class TySchema:
    """A type parameterized by distinct type variables: [A1..An] body."""

    params: tuple  # tuple[str, ...]
    body: Ty

    def __post_init__(self):
        if len(set(self.params)) != len(self.params):
            raise SignatureError(f"duplicate schema parameters {self.params}")
        extra = [v for v in ty_vars(self.body) if v not in self.params]
        if extra:
            raise SignatureError(f"schema body mentions unbound type variables {extra}")

    def instantiate(self, args: tuple) -> Ty:
        if len(args) != len(self.params):
            raise IllTyped(
                f"schema expects {len(self.params)} type arguments, got {len(args)}"
            )
        return TySubst(dict(zip(self.params, args))).apply_ty(self.body)


# ---------------------------------------------------------------------------
# Terms

Ann = Optional[tuple]  # ("*"|"@", generation) or None


@dataclass(frozen=True)
class Lam:
    ty: Ty
    body: "Term"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App:
    head: "Term"  # never an App; a Lam only transiently pre-normalization
    args: tuple  # tuple[Term, ...], nonempty


@dataclass(frozen=True)
class Const:
    name: str
    tyargs: tuple = ()  # tuple[Ty, ...] instantiating the declared schema
    ann: Ann = field(default=None, compare=False)  # induction size marker


@dataclass(frozen=True)
class Eigen:
    name: str
    ty: Ty


@dataclass(frozen=True)
class Meta:
    name: str
    ty: Ty


@dataclass(frozen=True)
class Bound:
    index: int


Term = Union[Lam, App, Const, Eigen, Meta, Bound]


def app(head: Term, args) -> Term:
    """Build an application spine, flattening nested Apps. Does not reduce."""
    args = tuple(args)
    if not args:
        return head
    if isinstance(head, App):
        return App(head.head, head.args + args)
    return App(head, args)


def spine(t: Term) -> tuple[Term, tuple]:
    if isinstance(t, App):
        return t.head, t.args
    return t, ()


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    """Shift free de Bruijn indices >= cutoff by d."""
    if isinstance(t, Bound):
        return Bound(t.index + d) if t.index >= cutoff else t
    if isinstance(t, Lam):
        return Lam(t.ty, shift(t.body, d, cutoff + 1), t.hint)
    if isinstance(t, App):
        return App(shift(t.head, d, cutoff), tuple(shift(a, d, cutoff) for a in t.args))
    return t


def _bsubst(t: Term, k: int, s: Term) -> Term:
    """Replace Bound(k) by s (shifted), decrementing indices above k."""
    if isinstance(t, Bound):
        if t.index == k:
            return shift(s, k)
        return Bound(t.index - 1) if t.index > k else t
    if isinstance(t, Lam):
        return Lam(t.ty, _bsubst(t.body, k + 1, s), t.hint)
    if isinstance(t, App):
        return App(_bsubst(t.head, k, s), tuple(_bsubst(a, k, s) for a in t.args))
    return t


def normalize(t: Term) -> Term:
    """Beta-normal form.  Total on well-typed terms."""
    if isinstance(t, Lam):
        return Lam(t.ty, normalize(t.body), t.hint)
    if isinstance(t, App):
        head = normalize(t.head)
        args = [normalize(a) for a in t.args]
        while isinstance(head, Lam) and args:
            head = normalize(_bsubst(head.body, 0, args.pop(0)))
        return app(head, args)
    return t


def open_lam(lam: Lam, arg: Term) -> Term:
    """Body of lam with its binder replaced by arg, renormalized."""
    return normalize(_bsubst(lam.body, 0, arg))


def aeq(t1: Term, t2: Term) -> bool:
    """Equality modulo alpha, beta (inputs beta-normal), eta, and annotations."""
    if isinstance(t1, Lam) and isinstance(t2, Lam):
        return t1.ty == t2.ty and aeq(t1.body, t2.body)
    # eta: compare a lambda against the expansion of the other side
    if isinstance(t1, Lam):
        return aeq(t1.body, normalize(app(shift(t2, 1), (Bound(0),))))
    if isinstance(t2, Lam):
        return aeq(normalize(app(shift(t1, 1), (Bound(0),))), t2.body)
    h1, a1 = spine(t1)
    h2, a2 = spine(t2)
    if type(h1) is not type(h2) or len(a1) != len(a2):
        return False
    if isinstance(h1, Const):
        if h1.name != h2.name or h1.tyargs != h2.tyargs:
            return False
    elif h1 != h2:
        return False
    return all(aeq(x, y) for x, y in zip(a1, a2))


def free_metas(t: Term, acc: Optional[dict] = None) -> dict:
    """Metavariables of t as an ordered name -> Meta mapping."""
    if acc is None:
        acc = {}
    if isinstance(t, Meta):
        acc.setdefault(t.name, t)
    elif isinstance(t, Lam):
        free_metas(t.body, acc)
    elif isinstance(t, App):
        free_metas(t.head, acc)
        for a in t.args:
            free_metas(a, acc)
    return acc


def free_eigens(t: Term, acc: Optional[dict] = None) -> dict:
    if acc is None:
        acc = {}
    if isinstance(t, Eigen):
        acc.setdefault(t.name, t)
    elif isinstance(t, Lam):
        free_eigens(t.body, acc)
    elif isinstance(t, App):
        free_eigens(t.head, acc)
        for a in t.args:
            free_eigens(a, acc)
    return acc


def has_free_bound(t: Term, depth: int = 0) -> bool:
    if isinstance(t, Bound):
        return t.index >= depth
    if isinstance(t, Lam):
        return has_free_bound(t.body, depth + 1)
    if isinstance(t, App):
        return has_free_bound(t.head, depth) or any(has_free_bound(a, depth) for a in t.args)
    return False


def term_ty_vars(t: Term, acc: Optional[list] = None) -> list[str]:
    """Type variables occurring anywhere in the term, first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Lam):
        ty_vars(t.ty, acc)
        term_ty_vars(t.body, acc)
    elif isinstance(t, App):
        term_ty_vars(t.head, acc)
        for a in t.args:
            term_ty_vars(a, acc)
    elif isinstance(t, Const):
        for ty in t.tyargs:
            ty_vars(ty, acc)
    elif isinstance(t, (Eigen, Meta)):
        ty_vars(t.ty, acc)
    return acc


def set_annotation(t: Term, ann: Ann) -> Term:
    """Annotate the head constant of an atomic formula."""
    h, args = spine(t)
    if not isinstance(h, Const):
        raise IllTyped("only constant-headed atoms can carry annotations")
    return app(Const(h.name, h.tyargs, ann), args)


def annotation_of(t: Term) -> Ann:
    h, _ = spine(t)
    return h.ann if isinstance(h, Const) else None


def strip_annotations(t: Term) -> Term:
    if isinstance(t, Lam):
        return Lam(t.ty, strip_annotations(t.body), t.hint)
    if isinstance(t, App):
        return App(strip_annotations(t.head), tuple(strip_annotations(a) for a in t.args))
    if isinstance(t, Const) and t.ann is not None:
        return Const(t.name, t.tyargs)
    return t


# ---------------------------------------------------------------------------
# Type-level substitution


class TySubst:
    """A finite mapping from type-variable names to types.

    Application is simultaneous; ``compose`` normalizes so applying the
    composite equals applying the two maps in sequence.
    """

    def __init__(self, mapping: Optional[dict] = None):
        self.m: dict[str, Ty] = dict(mapping or {})

    def __bool__(self):
        return bool(self.m)

    def __eq__(self, other):
        return isinstance(other, TySubst) and self.m == other.m

    def __repr__(self):
        return "TySubst(" + ", ".join(f"{k}:={v!r}" for k, v in self.m.items()) + ")"

    def domain(self) -> set[str]:
        return set(self.m)

    def apply_ty(self, ty: Ty) -> Ty:
        if not self.m:
            return ty
        if isinstance(ty, TyVar):
            return self.m.get(ty.name, ty)
        if isinstance(ty, TyApp):
            return TyApp(ty.con, tuple(self.apply_ty(a) for a in ty.args))
        if isinstance(ty, Arrow):
            return Arrow(self.apply_ty(ty.arg), self.apply_ty(ty.res))
        return ty

    def apply_term(self, t: Term) -> Term:
        if not self.m:
            return t
        if isinstance(t, Lam):
            return Lam(self.apply_ty(t.ty), self.apply_term(t.body), t.hint)
        if isinstance(t, App):
            return App(self.apply_term(t.head), tuple(self.apply_term(a) for a in t.args))
        if isinstance(t, Const):
            return Const(t.name, tuple(self.apply_ty(a) for a in t.tyargs), t.ann)
        if isinstance(t, Eigen):
            return Eigen(t.name, self.apply_ty(t.ty))
        if isinstance(t, Meta):
            return Meta(t.name, self.apply_ty(t.ty))
        return t

    def apply(self, e):
        return self.apply_ty(e) if isinstance(e, (Sort, TyVar, TyApp, Arrow)) else self.apply_term(e)

    def compose(self, other: "TySubst") -> "TySubst":
        """self after other: (self.compose(other))(e) == self(other(e))."""
        out = {v: self.apply_ty(ty) for v, ty in other.m.items()}
        for v, ty in self.m.items():
            if v not in out:
                out[v] = ty
        return TySubst(out)

    def restrict(self, names) -> "TySubst":
        names = set(names)
        return TySubst({v: ty for v, ty in self.m.items() if v in names})


# ---------------------------------------------------------------------------
# Term-level substitution


class TermSubst:
    """A finite mapping from metavariable/eigenvariable names to terms.

    Range terms are beta-normal and closed with respect to de Bruijn
    indices, so application never needs shifting and cannot capture.
    Application is simultaneous.
    """

    def __init__(self, mapping: Optional[dict] = None):
        self.m: dict[str, Term] = dict(mapping or {})

    def __bool__(self):
        return bool(self.m)

    def __eq__(self, other):
        return isinstance(other, TermSubst) and self.m == other.m

    def __repr__(self):
        return "TermSubst(" + ", ".join(f"{k}:={v}" for k, v in self.m.items()) + ")"

    def domain(self) -> set[str]:
        return set(self.m)

    def _replace(self, t: Term) -> Term:
        if not self.m:
            return t
        if isinstance(t, (Meta, Eigen)):
            return self.m.get(t.name, t)
        if isinstance(t, Lam):
            return Lam(t.ty, self._replace(t.body), t.hint)
        if isinstance(t, App):
            return App(self._replace(t.head), tuple(self._replace(a) for a in t.args))
        return t

    def apply(self, t: Term) -> Term:
        return normalize(self._replace(t)) if self.m else t

    def compose(self, other: "TermSubst") -> "TermSubst":
        out = {v: self.apply(tm) for v, tm in other.m.items()}
        for v, tm in self.m.items():
            if v not in out:
                out[v] = tm
        return TermSubst(out)

    def under_tysubst(self, phi: TySubst) -> "TermSubst":
        """Pointwise type instantiation of the range (and of variable types)."""
        return TermSubst({v: phi.apply_term(tm) for v, tm in self.m.items()})


# ---------------------------------------------------------------------------
# Signature


LOGICAL_CONSTANTS = {
    "true": TySchema((), PROP),
    "false": TySchema((), PROP),
    "and": TySchema((), arrow(PROP, PROP, PROP)),
    "or": TySchema((), arrow(PROP, PROP, PROP)),
    "imp": TySchema((), arrow(PROP, PROP, PROP)),
    "forall": TySchema(("A",), arrow(Arrow(TyVar("A"), PROP), PROP)),
    "exists": TySchema(("A",), arrow(Arrow(TyVar("A"), PROP), PROP)),
}

RESERVED_SORTS = {"prop", "o"}


@dataclass
class ConstDecl:
    name: str
    schema: TySchema
    logical: bool = False

    @property
    def is_predicate(self) -> bool:
        _, target = strip_arrow(self.schema.body)
        return target == PROP and not self.logical


class Signature:
    """Declared sorts, type constructors, and constants; plus the block registry.

    Mutated only while loading a development (single-writer discipline);
    treated as immutable by the proof engine.
    """

    def __init__(self):
        self.sorts: set[str] = {"prop", "o", "nat"}
        self.tycons: dict[str, int] = {}
        self.consts: dict[str, ConstDecl] = {}
        self.blocks: list = []  # DefBlock, in registration order
        self.block_of_pred: dict[str, int] = {}
        for name, schema in LOGICAL_CONSTANTS.items():
            self.consts[name] = ConstDecl(name, schema, logical=True)

    def declare_sort(self, name: str):
        if name in RESERVED_SORTS:
            raise SignatureError(f"sort {name} is reserved")
        if name in self.sorts or name in self.tycons:
            raise SignatureError(f"type name {name} already declared")
        self.sorts.add(name)

    def declare_tycon(self, name: str, arity: int):
        if arity == 0:
            self.declare_sort(name)
            return
        if name in self.sorts or name in self.tycons:
            raise SignatureError(f"type name {name} already declared")
        self.tycons[name] = arity

    def declare_const(self, name: str, schema: TySchema, logical: bool = False):
        if name in self.consts:
            raise SignatureError(f"constant {name} already declared")
        args, _ = strip_arrow(schema.body)
        if not logical:
            for a in args:
                if ty_contains_sort(a, "prop"):
                    raise SignatureError(
                        f"constant {name}: prop may not occur in an argument type"
                    )
        self.consts[name] = ConstDecl(name, schema, logical)

    def const_schema(self, name: str) -> TySchema:
        decl = self.consts.get(name)
        if decl is None:
            raise UnknownConstant(f"unknown constant {name}")
        return decl.schema

    def is_predicate(self, name: str) -> bool:
        decl = self.consts.get(name)
        return decl is not None and decl.is_predicate

    def register_block(self, block) -> int:
        idx = len(self.blocks)
        self.blocks.append(block)
        for pname, _ in block.predicates:
            self.block_of_pred[pname] = idx
        return idx

    def block_for(self, pred: str):
        idx = self.block_of_pred.get(pred)
        return None if idx is None else self.blocks[idx]


def wf_type(ty: Ty, psi, sig: Signature) -> bool:
    """Well-formed relative to psi: tyvars bound, constructor arities correct."""
    if isinstance(ty, Sort):
        return ty.name in sig.sorts
    if isinstance(ty, TyVar):
        return ty.name in psi
    if isinstance(ty, TyApp):
        return sig.tycons.get(ty.con) == len(ty.args) and all(
            wf_type(a, psi, sig) for a in ty.args
        )
    if isinstance(ty, Arrow):
        return wf_type(ty.arg, psi, sig) and wf_type(ty.res, psi, sig)
    return False


# ---------------------------------------------------------------------------
# Typing


def infer_type(t: Term, sig: Signature, binders: tuple = ()) -> Ty:
    """The unique simple type of t; binders lists enclosing Lam types, innermost first."""
    if isinstance(t, Bound):
        if t.index >= len(binders):
            raise IllTyped(f"unbound de Bruijn index {t.index}")
        return binders[t.index]
    if isinstance(t, Eigen) or isinstance(t, Meta):
        return t.ty
    if isinstance(t, Const):
        return sig.const_schema(t.name).instantiate(t.tyargs)
    if isinstance(t, Lam):
        return Arrow(t.ty, infer_type(t.body, sig, (t.ty,) + binders))
    if isinstance(t, App):
        ty = infer_type(t.head, sig, binders)
        for a in t.args:
            if not isinstance(ty, Arrow):
                raise IllTyped("over-application", expected="arrow type", found=ty)
            aty = infer_type(a, sig, binders)
            if aty != ty.arg:
                raise IllTyped("argument type mismatch", expected=ty.arg, found=aty)
            ty = ty.res
        return ty
    raise IllTyped(f"not a term: {t!r}")


def eta_long(t: Term, sig: Signature, binders: tuple = ()) -> Term:
    """Eta-long beta-normal form of a beta-normal term."""
    if isinstance(t, Lam):
        return Lam(t.ty, eta_long(t.body, sig, (t.ty,) + binders), t.hint)
    ty = infer_type(t, sig, binders)
    if isinstance(ty, Arrow):
        args, _ = strip_arrow(ty)
        k = len(args)
        body = normalize(app(shift(t, k), tuple(Bound(k - 1 - i) for i in range(k))))
        out = eta_long(body, sig, tuple(reversed(args)) + binders)
        for i, aty in enumerate(reversed(args)):
            out = Lam(aty, out, f"x{k - 1 - i}")
        return out
    head, args = spine(t)
    if not args:
        return t
    hty = infer_type(head, sig, binders)
    atys, _ = strip_arrow(hty)
    return app(head, tuple(eta_long(a, sig, binders) for a in args[: len(atys)]))


def well_formed_rel(t: Term, psi, sig: Signature) -> bool:
    """All type variables in the term are members of psi and types are well-formed."""

    def check_ty(ty):
        return wf_type(ty, psi, sig)

    if isinstance(t, Lam):
        return check_ty(t.ty) and well_formed_rel(t.body, psi, sig)
    if isinstance(t, App):
        return well_formed_rel(t.head, psi, sig) and all(
            well_formed_rel(a, psi, sig) for a in t.args
        )
    if isinstance(t, Const):
        if t.name not in sig.consts:
            return False
        if len(t.tyargs) != len(sig.const_schema(t.name).params):
            return False
        return all(check_ty(a) for a in t.tyargs)
    if isinstance(t, (Eigen, Meta)):
        return check_ty(t.ty)
    return True
