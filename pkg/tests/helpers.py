"""Shared fixtures: a small test signature and random term generators.

The generators here double as independent oracles' input sources, so they
stay deliberately simple and self-contained.
"""

from __future__ import annotations

import random

from polyprove.terms import (
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
    TySchema,
    TySubst,
    TyVar,
    app,
    arrow,
    normalize,
    strip_arrow,
)

I = Sort("i")
A = TyVar("A")


def list_of(ty: Ty) -> Ty:
    return TyApp("list", (ty,))


def base_sig() -> Signature:
    sig = Signature()
    sig.declare_sort("i")
    sig.declare_tycon("list", 1)
    sig.declare_const("a", TySchema((), I))
    sig.declare_const("b", TySchema((), I))
    sig.declare_const("c", TySchema((), I))
    sig.declare_const("f", TySchema((), arrow(I, I)))
    sig.declare_const("g", TySchema((), arrow(I, I, I)))
    sig.declare_const("nil", TySchema(("A",), list_of(A)))
    sig.declare_const("cons", TySchema(("A",), arrow(A, list_of(A), list_of(A))))
    sig.declare_const("gappend", TySchema(("A",), arrow(list_of(A), list_of(A), list_of(A), Sort("prop"))))
    return sig


def nil(ty: Ty = I) -> Term:
    return Const("nil", (ty,))


def cons(x: Term, l: Term, ty: Ty = I) -> Term:
    return app(Const("cons", (ty,)), (x, l))


def lst(items, ty: Ty = I) -> Term:
    out = nil(ty)
    for x in reversed(items):
        out = cons(x, out, ty)
    return out


CA, CB, CC = Const("a"), Const("b"), Const("c")


def gappend_block(inductive=True):
    """The type-schematic list-append definition used across the tests."""
    from polyprove.defs import DefBlock, SchematicClause
    from polyprove.formulas import TOP

    la = list_of
    schema = TySchema(("A",), arrow(la(A), la(A), la(A), Sort("prop")))
    l = Meta("l", la(A))
    c1 = SchematicClause(
        (), (("l", la(A)),), app(Const("gappend", (A,)), (nil(A), l, l)), TOP
    )
    x = Meta("x", A)
    l1, l2, l3 = (Meta(n, la(A)) for n in ("l1", "l2", "l3"))
    head2 = app(Const("gappend", (A,)), (cons(x, l1, A), l2, cons(x, l3, A)))
    body2 = app(Const("gappend", (A,)), (l1, l2, l3))
    c2 = SchematicClause(
        (), (("x", A), ("l1", la(A)), ("l2", la(A)), ("l3", la(A))), head2, body2
    )
    return DefBlock(("A",), (("gappend", schema),), (c1, c2), inductive=inductive)


# ---------------------------------------------------------------------------
# Random well-typed terms


def gen_term(rng: random.Random, sig: Signature, ty: Ty, depth: int, binders=(), metas=True) -> Term:
    """A random beta-redex-containing term of the given ground type."""
    if isinstance(ty, Arrow) and (depth <= 0 or rng.random() < 0.7):
        body = gen_term(rng, sig, ty.res, depth - 1, (ty.arg,) + binders, metas)
        return Lam(ty.arg, body)
    # occasionally build an explicit redex (\x. body) arg
    if depth > 0 and rng.random() < 0.25:
        aty = rng.choice([I, list_of(I)])
        lam = gen_term(rng, sig, Arrow(aty, ty), depth - 1, binders, metas)
        arg = gen_term(rng, sig, aty, depth - 1, binders, metas)
        return App(lam, (arg,)) if not isinstance(lam, App) else app(lam, (arg,))
    cands = []
    for i, bty in enumerate(binders):
        args, tgt = strip_arrow(bty)
        if tgt == ty and len(args) <= depth:
            cands.append((Bound(i), args))
    for name in ("a", "b", "c", "f", "g"):
        args, tgt = strip_arrow(sig.const_schema(name).body)
        if tgt == ty and (len(args) <= depth or not args):
            cands.append((Const(name), args))
    for elt in (I, list_of(I)):
        for name in ("nil", "cons"):
            schema = sig.const_schema(name)
            args, tgt = strip_arrow(schema.instantiate((elt,)))
            if tgt == ty and (len(args) <= depth or not args):
                cands.append((Const(name, (elt,)), args))
    if metas and not isinstance(ty, Arrow) and rng.random() < 0.15:
        cands.append((Meta(f"X{rng.randrange(4)}", ty), []))
    if rng.random() < 0.2:
        cands.append((Eigen("e" + ("i" if ty == I else "l" if ty == list_of(I) else "t"), ty), []))
        cands = [c for c in cands if c[1] == []] or cands
    if not cands:
        # fall back to a lambda or an eigenvariable of the right type
        if isinstance(ty, Arrow):
            return Lam(ty.arg, gen_term(rng, sig, ty.res, 0, (ty.arg,) + binders, metas))
        return Eigen("e_any", ty)
    head, args = rng.choice(cands)
    return app(head, tuple(gen_term(rng, sig, a, depth - 1, binders, metas) for a in args))


def gen_first_order(rng: random.Random, sig: Signature, depth: int, meta_names) -> Term:
    """First-order term of sort i over six constants, metas, and eigenvariables."""
    if depth <= 0 or rng.random() < 0.3:
        kind = rng.randrange(10)
        if kind < 4:
            return Meta(rng.choice(meta_names), I)
        if kind < 6:
            return Eigen(rng.choice(["u", "v"]), I)
        return rng.choice([CA, CB, CC])
    if rng.random() < 0.5:
        return app(Const("f"), (gen_first_order(rng, sig, depth - 1, meta_names),))
    return app(
        Const("g"),
        (
            gen_first_order(rng, sig, depth - 1, meta_names),
            gen_first_order(rng, sig, depth - 1, meta_names),
        ),
    )


# ---------------------------------------------------------------------------
# Independent first-order unification oracle (Robinson's algorithm)


def fo_unify(t1: Term, t2: Term):
    """Brute-force first-order MGU over Meta leaves; None when not unifiable."""
    subst: dict[str, Term] = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Meta) and t.name in subst:
            t = subst[t.name]
        return t

    def occurs(name: str, t: Term) -> bool:
        t = walk(t)
        if isinstance(t, Meta):
            return t.name == name
        if isinstance(t, App):
            return any(occurs(name, a) for a in t.args)
        return False

    def go(x: Term, y: Term) -> bool:
        x, y = walk(x), walk(y)
        if isinstance(x, Meta):
            if isinstance(y, Meta) and y.name == x.name:
                return True
            if occurs(x.name, y):
                return False
            subst[x.name] = y
            return True
        if isinstance(y, Meta):
            return go(y, x)
        hx, ax = (x.head, x.args) if isinstance(x, App) else (x, ())
        hy, ay = (y.head, y.args) if isinstance(y, App) else (y, ())
        if isinstance(hx, Const) and isinstance(hy, Const):
            if hx.name != hy.name or len(ax) != len(ay):
                return False
        elif isinstance(hx, Eigen) and isinstance(hy, Eigen):
            if hx.name != hy.name:
                return False
        else:
            return False
        return all(go(u, v) for u, v in zip(ax, ay))

    if not go(t1, t2):
        return None

    def resolve(t: Term) -> Term:
        t = walk(t)
        if isinstance(t, App):
            return app(resolve(t.head), tuple(resolve(a) for a in t.args))
        return t

    return TermSubst({k: resolve(Meta(k, I)) for k in subst})


def canonical_metas(t: Term, table=None) -> Term:
    """Rename metas by first occurrence so renamed-apart answers compare equal."""
    if table is None:
        table = {}
    if isinstance(t, Meta):
        if t.name not in table:
            table[t.name] = f"#c{len(table)}"
        return Meta(table[t.name], t.ty)
    if isinstance(t, Lam):
        return Lam(t.ty, canonical_metas(t.body, table), t.hint)
    if isinstance(t, App):
        return App(
            canonical_metas(t.head, table),
            tuple(canonical_metas(a, table) for a in t.args),
        )
    return t
