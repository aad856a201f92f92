"""Lexer and parser for development files, spec files, and tactic sentences.

The parser produces surface trees; name resolution and typing happen in
the elaborator.  Sentences are '.'-terminated.  Comments run from '%' to
end of line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError

# ---------------------------------------------------------------------------
# Tokens

_PUNCT2 = ("->", ":=", ":-", "::", "/\\", "\\/", "&&")
_PUNCT1 = "()[]{}.,;:=\\"

_KEYWORDS = {
    "Kind", "Type", "Define", "Inductive", "Theorem", "Specification", "Qed",
    "by", "forall", "exists", "to", "with", "on",
}


@dataclass(frozen=True)
class Tok:
    kind: str  # "ident" | "uident" | "int" | "string" | punctuation | keyword | "eof"
    value: str
    line: int
    col: int


def lex(text: str) -> list:
    toks = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise ParseError("unterminated string", line, col)
            toks.append(Tok("string", text[i + 1 : j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        two = text[i : i + 2]
        if two in _PUNCT2:
            toks.append(Tok(two, two, line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT1:
            toks.append(Tok(c, c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Tok("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                kind = word
            elif word[0].isupper():
                kind = "uident"
            else:
                kind = "ident"
            toks.append(Tok(kind, word, line, col))
            col += j - i
            i = j
            continue
        if c in "&|+*<>-!@#$^~?":
            j = i
            while j < n and text[j] in "&|+*<>-!@#$^~?=":
                j += 1
            toks.append(Tok("op", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Tok("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Surface trees


@dataclass(frozen=True)
class STName:
    name: str


@dataclass(frozen=True)
class STApp:
    con: str
    args: tuple


@dataclass(frozen=True)
class STArrow:
    arg: object
    res: object


@dataclass(frozen=True)
class SName:
    name: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SInst:
    name: str
    tys: tuple
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SApp:
    fn: object
    args: tuple


@dataclass(frozen=True)
class SOp:
    op: str  # "imp" | "and" | "or" | "eq" | "cons"
    left: object
    right: object


@dataclass(frozen=True)
class SQuant:
    q: str  # "forall" | "exists"
    binders: tuple  # tuple[(name, STy|None), ...]
    body: object


@dataclass(frozen=True)
class SLam:
    name: str
    body: object


@dataclass(frozen=True)
class SBrace:
    goals: tuple


# statements


@dataclass(frozen=True)
class DKind:
    name: str
    arity: int


@dataclass(frozen=True)
class DType:
    name: str
    params: tuple
    ty: object


@dataclass(frozen=True)
class DClause:
    typarams: tuple
    head: object
    body: Optional[object]


@dataclass(frozen=True)
class DDefine:
    inductive: bool
    params: tuple
    preds: tuple  # tuple[(name, STy), ...]
    clauses: tuple


@dataclass(frozen=True)
class DTheorem:
    name: str
    params: tuple
    formula: object
    script: tuple  # tuple[TacticCmd, ...]


@dataclass(frozen=True)
class DSpec:
    name: str


@dataclass(frozen=True)
class TacticCmd:
    name: str
    payload: dict
    text: str = ""


# ---------------------------------------------------------------------------
# Parser


class Parser:
    def __init__(self, toks: list):
        self.toks = toks
        self.i = 0

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str) -> Tok:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {t.value!r}", t.line, t.col, expected=(kind,)
            )
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    # -- types

    def ty(self):
        left = self.ty_app()
        if self.at("->"):
            self.next()
            return STArrow(left, self.ty())
        return left

    def ty_app(self):
        head = self.ty_atom()
        args = []
        while self.peek().kind in ("ident", "uident", "("):
            args.append(self.ty_atom())
        if args:
            if not isinstance(head, STName):
                raise ParseError("type constructor expected", self.peek().line, self.peek().col)
            return STApp(head.name, tuple(args))
        return head

    def ty_atom(self):
        t = self.peek()
        if t.kind in ("ident", "uident"):
            self.next()
            return STName(t.value)
        if t.kind == "(":
            self.next()
            out = self.ty()
            self.expect(")")
            return out
        raise ParseError(f"expected a type, found {t.value!r}", t.line, t.col)

    # -- expressions (terms and formulas share one grammar)

    def expr(self):
        return self.imp()

    def imp(self):
        left = self.disj()
        if self.at("->"):
            self.next()
            return SOp("imp", left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        if self.at("\\/"):
            self.next()
            return SOp("or", left, self.disj())
        return left

    def conj(self):
        left = self.eqx()
        if self.at("/\\"):
            self.next()
            return SOp("and", left, self.conj())
        if self.at("&&"):
            self.next()
            return SOp("spec-and", left, self.conj())
        return left

    def eqx(self):
        left = self.consx()
        if self.at("="):
            self.next()
            return SOp("eq", left, self.consx())
        return left

    def consx(self):
        left = self.appx()
        if self.at("::"):
            self.next()
            return SOp("cons", left, self.consx())
        return left

    def appx(self):
        t = self.peek()
        if t.kind in ("forall", "exists"):
            self.next()
            binders = self.binders()
            self.expect(",")
            return SQuant(t.kind, binders, self.imp())
        head = self.atom()
        args = []
        while self.peek().kind in ("ident", "uident", "(", "{", "int"):
            args.append(self.atom())
        return SApp(head, tuple(args)) if args else head

    def atom(self):
        t = self.peek()
        if t.kind in ("ident", "uident"):
            self.next()
            if self.at("\\"):
                self.next()
                return SLam(t.value, self.imp())
            if self.at("[") and t.kind == "ident":
                self.next()
                tys = [self.ty()]
                while self.at(","):
                    self.next()
                    tys.append(self.ty())
                self.expect("]")
                return SInst(t.value, tuple(tys), t.line, t.col)
            return SName(t.value, t.line, t.col)
        if t.kind == "(":
            self.next()
            out = self.expr()
            self.expect(")")
            return out
        if t.kind == "{":
            self.next()
            goals = [self.expr()]
            while self.at(","):
                self.next()
                goals.append(self.expr())
            self.expect("}")
            return SBrace(tuple(goals))
        raise ParseError(f"expected a term, found {t.value!r}", t.line, t.col)

    def binders(self):
        out = []
        while True:
            t = self.peek()
            if t.kind == "(":
                self.next()
                names = []
                while self.peek().kind in ("ident", "uident"):
                    names.append(self.next().value)
                self.expect(":")
                ty = self.ty()
                self.expect(")")
                out.extend((n, ty) for n in names)
            elif t.kind in ("ident", "uident"):
                self.next()
                if self.at(":"):
                    self.next()
                    out.append((t.value, self.ty_atom()))
                else:
                    out.append((t.value, None))
            else:
                break
        if not out:
            t = self.peek()
            raise ParseError("expected binders", t.line, t.col)
        return tuple(out)

    def ty_params(self):
        if not self.at("["):
            return ()
        self.next()
        names = [self.expect("uident").value]
        while self.at(","):
            self.next()
            names.append(self.expect("uident").value)
        self.expect("]")
        return tuple(names)

    # -- statements

    def parse_dev(self) -> list:
        items = []
        while not self.at("eof"):
            t = self.peek()
            if t.kind == "Kind":
                items.append(self.kind_decl())
            elif t.kind == "Type":
                items.append(self.type_decl())
            elif t.kind in ("Define", "Inductive"):
                items.append(self.define_block())
            elif t.kind == "Theorem":
                items.append(self.theorem())
            elif t.kind == "Specification":
                self.next()
                name = self.expect("string").value
                self.expect(".")
                items.append(DSpec(name))
            else:
                raise ParseError(
                    f"expected a declaration, found {t.value!r}", t.line, t.col
                )
        return items

    def kind_decl(self) -> DKind:
        self.expect("Kind")
        name = self.next()
        if name.kind not in ("ident", "uident"):
            raise ParseError("expected a name", name.line, name.col)
        arity = 0
        tok = self.next()
        if not (tok.kind == "ident" and tok.value == "type"):
            raise ParseError("expected 'type'", tok.line, tok.col)
        while self.at("->"):
            self.next()
            tok = self.next()
            if not (tok.kind == "ident" and tok.value == "type"):
                raise ParseError("expected 'type'", tok.line, tok.col)
            arity += 1
        self.expect(".")
        return DKind(name.value, arity)

    def type_decl(self) -> DType:
        self.expect("Type")
        name = self.next()
        if name.kind not in ("ident", "uident", "op", "="):
            raise ParseError("expected a constant name", name.line, name.col)
        params = self.ty_params()
        ty = self.ty()
        self.expect(".")
        return DType(name.value, params, ty)

    def define_block(self) -> DDefine:
        inductive = self.at("Inductive")
        self.next()
        params = self.ty_params()
        preds = [self.pred_sig()]
        while self.at(","):
            self.next()
            preds.append(self.pred_sig())
        self.expect("by")
        clauses = [self.clause()]
        while self.at(";"):
            self.next()
            clauses.append(self.clause())
        self.expect(".")
        return DDefine(inductive, params, tuple(preds), tuple(clauses))

    def pred_sig(self):
        name = self.expect("ident").value
        self.expect(":")
        return name, self.ty()

    def clause(self) -> DClause:
        typarams = self.ty_params()
        head = self.expr()
        body = None
        if self.at(":="):
            self.next()
            body = self.expr()
        return DClause(typarams, head, body)

    def theorem(self) -> DTheorem:
        self.expect("Theorem")
        name = self.next()
        if name.kind not in ("ident", "uident"):
            raise ParseError("expected a theorem name", name.line, name.col)
        params = self.ty_params()
        self.expect(":")
        formula = self.expr()
        self.expect(".")
        script = []
        while self.peek().kind not in (
            "Kind", "Type", "Define", "Inductive", "Theorem", "Specification", "eof",
        ):
            if self.at("Qed"):
                self.next()
                self.expect(".")
                break
            script.append(self.tactic_sentence())
        return DTheorem(name.value, params, formula, tuple(script))

    # -- tactics

    def tactic_sentence(self) -> TacticCmd:
        start = self.i
        t = self.peek()
        cmd = self._tactic_inner()
        self.expect(".")
        text = " ".join(tok.value for tok in self.toks[start : self.i - 1])
        return TacticCmd(cmd[0], cmd[1], text + ".")

    def _tactic_inner(self):
        t = self.next()
        word = t.value
        if word == "induction":
            tok = self.next()
            if tok.kind != "on":
                raise ParseError("expected 'on'", tok.line, tok.col)
            n = int(self.expect("int").value)
            return "induction", {"n": n}
        if word == "intros":
            return "intros", {}
        if word == "case":
            label = self.next().value
            return "case", {"label": label}
        if word == "apply":
            source = self.next().value
            tyargs = None
            if self.at("["):
                self.next()
                tyargs = [self.ty()]
                while self.at(","):
                    self.next()
                    tyargs.append(self.ty())
                self.expect("]")
            targets = []
            if self.at("to"):
                self.next()
                while self.peek().kind in ("ident", "uident"):
                    targets.append(self.next().value)
            withs = {}
            if self.at("with"):
                self.next()
                while True:
                    n = self.next().value
                    self.expect("=")
                    withs[n] = self.consx()
                    if self.at(","):
                        self.next()
                        continue
                    break
            return "apply", {
                "source": source,
                "targets": targets,
                "tyargs": tyargs,
                "with": withs or None,
            }
        if word == "search":
            depth = None
            if self.at("int"):
                depth = int(self.next().value)
            return "search", {"depth": depth}
        if word == "unfold":
            k = None
            if self.at("int"):
                k = int(self.next().value)
            return "unfold", {"clause": k}
        if word in ("split", "left", "right", "undo", "skip", "intros"):
            return word, {}
        if word == "exists":
            return "witness", {"term": self.consx()}
        if word == "assert":
            return "assert", {"formula": self.expr()}
        raise ParseError(f"unknown tactic {word!r}", t.line, t.col)


def parse_dev_text(text: str) -> list:
    return Parser(lex(text)).parse_dev()


def parse_tactic_text(text: str) -> TacticCmd:
    p = Parser(lex(text))
    cmd = p.tactic_sentence()
    if not p.at("eof"):
        t = p.peek()
        raise ParseError(f"trailing input {t.value!r}", t.line, t.col)
    return cmd


def parse_expr_text(text: str):
    p = Parser(lex(text))
    out = p.expr()
    if not p.at("eof"):
        t = p.peek()
        raise ParseError(f"trailing input {t.value!r}", t.line, t.col)
    return out


# ---------------------------------------------------------------------------
# Spec-logic (.sig / .mod) files


@dataclass(frozen=True)
class SigFile:
    name: str
    kinds: tuple  # tuple[DKind, ...]
    types: tuple  # tuple[(name, STy), ...]


@dataclass(frozen=True)
class ModClause:
    head: object
    goals: tuple  # tuple of surface exprs, conjunction


@dataclass(frozen=True)
class ModFile:
    name: str
    clauses: tuple


def parse_sig_text(text: str) -> SigFile:
    p = Parser(lex(text))
    tok = p.next()
    if tok.value != "sig":
        raise ParseError("expected 'sig'", tok.line, tok.col)
    name = p.next().value
    p.expect(".")
    kinds, types = [], []
    while not p.at("eof"):
        t = p.next()
        if t.value == "kind":
            kname = p.next().value
            arity = 0
            tok = p.next()
            if tok.value != "type":
                raise ParseError("expected 'type'", tok.line, tok.col)
            while p.at("->"):
                p.next()
                tok = p.next()
                if tok.value != "type":
                    raise ParseError("expected 'type'", tok.line, tok.col)
                arity += 1
            p.expect(".")
            kinds.append(DKind(kname, arity))
        elif t.value == "type":
            tname = p.next().value
            ty = p.ty()
            p.expect(".")
            types.append((tname, ty))
        else:
            raise ParseError(f"expected kind/type, found {t.value!r}", t.line, t.col)
    return SigFile(name, tuple(kinds), tuple(types))


def parse_mod_text(text: str) -> ModFile:
    p = Parser(lex(text))
    tok = p.next()
    if tok.value != "module":
        raise ParseError("expected 'module'", tok.line, tok.col)
    name = p.next().value
    p.expect(".")
    clauses = []
    while not p.at("eof"):
        head = p.consx()
        goals: list = []
        if p.at(":-"):
            p.next()
            goals.append(p.consx())
            while p.at(","):
                p.next()
                goals.append(p.consx())
        p.expect(".")
        clauses.append(ModClause(head, tuple(goals)))
    return ModFile(name, tuple(clauses))
