"""Rendering of types, terms, formulas, and sequents back to surface syntax.

Constant type instances are elided when the instance is recoverable from
the argument types of the constant's schema; ``show_instances`` forces
them.  Quantifiers, the propositional connectives, equality, and the cons
operator are resugared; the spec-goal embedding is folded back into its
brace notation.
"""

from __future__ import annotations

from typing import Optional

from .terms import (
    Arrow,
    Bound,
    Const,
    Eigen,
    Lam,
    Meta,
    Signature,
    Sort,
    Term,
    Ty,
    TyApp,
    TyVar,
    spine,
    strip_arrow,
    ty_vars,
)

# precedence levels, loosest first
_P_IMP = 1
_P_OR = 2
_P_AND = 3
_P_EQ = 4
_P_CONS = 5
_P_APP = 6
_P_ATOM = 7


def _uses_bound0(t: Term, depth: int = 0) -> bool:
    if isinstance(t, Bound):
        return t.index == depth
    if isinstance(t, Lam):
        return _uses_bound0(t.body, depth + 1)
    h, args = spine(t)
    if h is not t:
        return _uses_bound0(h, depth) or any(_uses_bound0(a, depth) for a in args)
    return False


def ty_str(ty: Ty, prec: int = 0) -> str:
    if isinstance(ty, (Sort, TyVar)):
        return ty.name
    if isinstance(ty, TyApp):
        inner = ty.con + " " + " ".join(ty_str(a, 2) for a in ty.args)
        return f"({inner})" if prec >= 2 else inner
    if isinstance(ty, Arrow):
        inner = f"{ty_str(ty.arg, 1)} -> {ty_str(ty.res, 0)}"
        return f"({inner})" if prec >= 1 else inner
    return repr(ty)


class Printer:
    def __init__(self, sig: Optional[Signature] = None, show_instances: bool = False):
        self.sig = sig
        self.show_instances = show_instances

    # -- helpers

    def _instance_str(self, c: Const) -> str:
        if not c.tyargs:
            return c.name
        if not self.show_instances and self.sig is not None and c.name in self.sig.consts:
            schema = self.sig.consts[c.name].schema
            args, _ = strip_arrow(schema.body)
            inferable = set()
            for a in args:
                inferable.update(ty_vars(a))
            if set(schema.params) <= inferable:
                return c.name
        return c.name + "[" + ", ".join(ty_str(a) for a in c.tyargs) + "]"

    def _const_str(self, c: Const) -> str:
        out = self._instance_str(c)
        if c.ann is not None:
            out += c.ann[0]
        return out

    def _fresh(self, hint: str, env: list) -> str:
        taken = set(env)
        if self.sig is not None:
            taken |= set(self.sig.consts)
        base = hint or "x"
        if base not in taken:
            return base
        i = 1
        while f"{base}{i}" in taken:
            i += 1
        return f"{base}{i}"

    # -- spec-goal brace sugar recognition

    def _as_brace(self, t: Term, env: list) -> Optional[str]:
        h, args = spine(t)
        if not (isinstance(h, Const) and h.name == "exists" and len(args) == 1):
            return None
        lam = args[0]
        if not isinstance(lam, Lam):
            return None
        hb, ab = spine(lam.body)
        if not (isinstance(hb, Const) and hb.name == "and" and len(ab) == 2):
            return None
        h1, a1 = spine(ab[0])
        h2, a2 = spine(ab[1])
        if not (
            isinstance(h1, Const) and h1.name == "nat" and len(a1) == 1
            and a1[0] == Bound(0)
            and isinstance(h2, Const) and h2.name == "prove" and len(a2) == 2
            and a2[0] == Bound(0)
        ):
            return None
        goal = a2[1]
        if _uses_bound0(goal):
            return None
        from .terms import shift

        return "{" + self._spec_goal_str(shift(goal, -1), env) + "}"

    def _spec_goal_str(self, g: Term, env: list) -> str:
        h, args = spine(g)
        if isinstance(h, Const) and h.name == "&&" and len(args) == 2:
            return f"{self._spec_goal_str(args[0], env)}, {self._spec_goal_str(args[1], env)}"
        if isinstance(h, Const) and h.name == "atm" and len(args) == 1:
            return self.term_str(args[0], _P_APP - 1, env)
        return self.term_str(g, _P_APP - 1, env)

    # -- terms

    def term_str(self, t: Term, prec: int = 0, env: Optional[list] = None) -> str:
        if env is None:
            env = []
        brace = self._as_brace(t, env)
        if brace is not None:
            return brace
        if isinstance(t, Bound):
            return env[t.index] if t.index < len(env) else f"#{t.index}"
        if isinstance(t, (Eigen, Meta)):
            return t.name
        if isinstance(t, Const):
            return self._const_str(t)
        if isinstance(t, Lam):
            name = self._fresh(t.hint, env)
            body = self.term_str(t.body, 0, [name] + env)
            out = f"{name}\\ {body}"
            return f"({out})" if prec > 0 else out
        h, args = spine(t)
        if isinstance(h, Const):
            n = h.name
            if n in ("forall", "exists") and len(args) == 1 and isinstance(args[0], Lam):
                lam = args[0]
                name = self._fresh(lam.hint, env)
                body = self.term_str(lam.body, _P_IMP - 1, [name] + env)
                out = f"{n} ({name} : {ty_str(h.tyargs[0])}), {body}"
                return f"({out})" if prec >= _P_IMP else out
            if n in ("and", "or", "imp") and len(args) == 2:
                op, p = {"and": ("/\\", _P_AND), "or": ("\\/", _P_OR), "imp": ("->", _P_IMP)}[n]
                left = self.term_str(args[0], p, env)
                right = self.term_str(args[1], p - 1, env)  # right associative
                out = f"{left} {op} {right}"
                return f"({out})" if prec >= p else out
            if n == "=" and len(args) == 2 and h.ann is None:
                left = self.term_str(args[0], _P_EQ, env)
                right = self.term_str(args[1], _P_EQ, env)
                out = f"{left} = {right}"
                return f"({out})" if prec >= _P_EQ else out
            if n == "&&" and len(args) == 2:
                left = self.term_str(args[0], _P_AND, env)
                right = self.term_str(args[1], _P_AND - 1, env)
                out = f"{left} && {right}"
                return f"({out})" if prec >= _P_AND else out
            if n == "cons" and len(args) == 2 and h.ann is None:
                left = self.term_str(args[0], _P_CONS, env)
                right = self.term_str(args[1], _P_CONS - 1, env)
                out = f"{left} :: {right}"
                return f"({out})" if prec >= _P_CONS else out
            if n == "true" and not args:
                return "true"
            if n == "false" and not args:
                return "false"
        parts = [self.term_str(h, _P_ATOM, env) if not isinstance(h, Const) else self._const_str(h)]
        parts += [self.term_str(a, _P_APP, env) for a in args]
        out = " ".join(parts)
        return f"({out})" if (args and prec >= _P_APP) else out


def term_str(t: Term, sig: Optional[Signature] = None, show_instances: bool = False) -> str:
    return Printer(sig, show_instances).term_str(t)


def sequent_lines(seq, sig: Optional[Signature] = None, show_instances: bool = False) -> list:
    """Human-readable rendering: parameters, variables, hypotheses, goal."""
    pr = Printer(sig, show_instances)
    lines = []
    if seq.tyvars:
        lines.append("Type parameters: " + ", ".join(seq.tyvars))
    if seq.eigens:
        lines.append(
            "Variables: " + ", ".join(f"{e.name} : {ty_str(e.ty)}" for e in seq.eigens)
        )
    for h in seq.hyps:
        lines.append(f"  {h.label} : {pr.term_str(h.formula)}")
    lines.append("  " + "=" * 40)
    lines.append("  " + pr.term_str(seq.goal))
    return lines


def sequent_str(seq, sig=None, show_instances=False) -> str:
    return "\n".join(sequent_lines(seq, sig, show_instances))
