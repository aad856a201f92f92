"""Formula constructors and destructors over the logical constants."""

from __future__ import annotations

from typing import Optional

from .terms import (
    App,
    Bound,
    Const,
    Eigen,
    Lam,
    Term,
    Ty,
    app,
    normalize,
    shift,
    spine,
)

TOP = Const("true")
BOT = Const("false")


def conj(a: Term, b: Term) -> Term:
    return app(Const("and"), (a, b))


def disj(a: Term, b: Term) -> Term:
    return app(Const("or"), (a, b))


def imp(a: Term, b: Term) -> Term:
    return app(Const("imp"), (a, b))


def conj_all(fs: list[Term]) -> Term:
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = conj(f, out)
    return out


def quantify(q: str, ty: Ty, body: Term, hint: str = "x") -> Term:
    """body uses Bound(0) for the quantified variable."""
    return app(Const(q, (ty,)), (Lam(ty, body, hint),))


def forall_close(x: Eigen, f: Term, hint: Optional[str] = None) -> Term:
    return quantify("forall", x.ty, abstract_eigen(f, x), hint or x.name)


def exists_close(x: Eigen, f: Term, hint: Optional[str] = None) -> Term:
    return quantify("exists", x.ty, abstract_eigen(f, x), hint or x.name)


def abstract_eigen(t: Term, x: Eigen, depth: int = 0) -> Term:
    """Replace the eigenvariable x by Bound(depth), shifting as we descend."""
    if isinstance(t, Eigen):
        return Bound(depth) if t.name == x.name else t
    if isinstance(t, Lam):
        return Lam(t.ty, abstract_eigen(t.body, x, depth + 1), t.hint)
    if isinstance(t, App):
        return App(
            abstract_eigen(t.head, x, depth),
            tuple(abstract_eigen(a, x, depth) for a in t.args),
        )
    return t


def dest(f: Term) -> tuple[str, tuple]:
    """Classify a formula by its top connective.

    Returns one of:
      ("true",()) ("false",()) ("and",(a,b)) ("or",(a,b)) ("imp",(a,b))
      ("forall",(ty, lam)) ("exists",(ty, lam)) ("atom",(head, args))
    """
    h, args = spine(f)
    if isinstance(h, Const):
        n = h.name
        if n == "true" and not args:
            return "true", ()
        if n == "false" and not args:
            return "false", ()
        if n in ("and", "or", "imp") and len(args) == 2:
            return n, (args[0], args[1])
        if n in ("forall", "exists") and len(args) == 1:
            body = args[0]
            if not isinstance(body, Lam):  # eta-expand a bare predicate argument
                body = Lam(h.tyargs[0], normalize(app(shift(body, 1), (Bound(0),))))
            return n, (h.tyargs[0], body)
        return "atom", (h, args)
    return "atom", (h, args)


def is_atomic(f: Term) -> bool:
    return dest(f)[0] == "atom"


def open_binder(lam: Lam, x: Eigen) -> Term:
    """Instantiate a quantifier body with an eigenvariable."""
    from .terms import open_lam

    return open_lam(lam, x)


def strip_foralls(f: Term) -> tuple[list[tuple[str, Ty]], Term]:
    """Peel the universal prefix; returns binder (hint, ty) list and the matrix.

    The matrix still uses de Bruijn indices for the peeled binders
    (innermost = Bound(0)); callers instantiate via open_binder chains.
    """
    binders = []
    while True:
        kind, payload = dest(f)
        if kind != "forall":
            return binders, f
        ty, lam = payload
        binders.append((lam.hint, ty))
        f = lam.body


def imp_chain(f: Term) -> tuple[list[Term], Term]:
    """Split F1 -> ... -> Fk -> C along the right spine."""
    prems = []
    while True:
        kind, payload = dest(f)
        if kind != "imp":
            return prems, f
        prems.append(payload[0])
        f = payload[1]
