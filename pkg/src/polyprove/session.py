"""Prover sessions: loading developments, driving proofs, undo, rendering.

One session owns a signature, the lemma table, at most one loaded
specification, and at most one open proof.  Batch checking, the REPL, and
the wire protocol all drive the same session methods, so their behavior
cannot drift apart.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from . import tactics as tc
from .defs import DefBlock, SchematicClause, check_block, install_base_blocks
from .elab import Elaborator
from .engine import Sequent, lint_sequent
from .errors import BlockError, ElabError, ProverError, TacticError
from .formulas import TOP
from .pretty import Printer, sequent_lines, ty_str
from .speclog import SpecProgram, install_spec, parse_spec
from .surface import (
    DDefine,
    DKind,
    DSpec,
    DTheorem,
    DType,
    TacticCmd,
    parse_dev_text,
    parse_tactic_text,
)
from .terms import PROP, Signature, TySchema, strip_arrow


@dataclass
class OpenProof:
    name: str
    params: tuple
    formula: object
    state: tc.ProofState
    history: list  # undo stack of ProofState
    script: list  # accepted tactic texts


@dataclass
class TheoremRecord:
    name: str
    params: tuple
    formula: object
    state: tc.ProofState  # completed
    script: tuple


class Session:
    def __init__(self, base_dir: str = ".", show_instances: bool = False):
        self.base_dir = base_dir
        self.show_instances = show_instances
        self.sig = Signature()
        install_base_blocks(self.sig)
        self.lemmas: dict = {}
        self.theorems: list = []
        self.spec: Optional[SpecProgram] = None
        self.proof: Optional[OpenProof] = None

    # -- context helpers

    def ctx(self) -> tc.ProofContext:
        return tc.ProofContext(self.sig, self.lemmas)

    def printer(self, show_instances=None) -> Printer:
        if show_instances is None:
            show_instances = self.show_instances
        return Printer(self.sig, show_instances)

    # -- loading

    def load_text(self, text: str, on_event: Optional[Callable] = None,
                  interactive: bool = False):
        """Process a development; on_event(kind, info) observes progress.

        In interactive mode a trailing theorem whose script does not close
        the proof is left open for further tactics.
        """
        items = parse_dev_text(text)
        for k, item in enumerate(items):
            last = k == len(items) - 1
            self.load_item(item, on_event, allow_open=interactive and last)

    def load_item(self, item, on_event: Optional[Callable] = None, allow_open: bool = False):
        emit = on_event or (lambda kind, info: None)
        if self.proof is not None and not isinstance(item, TacticCmd):
            raise ProverError(
                f"proof of {self.proof.name} is still open (use skip or finish it)"
            )
        if isinstance(item, DKind):
            self.sig.declare_tycon(item.name, item.arity)
            emit("kind", item.name)
        elif isinstance(item, DType):
            elab = Elaborator(self.sig, tyvars=item.params)
            ty = elab.elab_ty(item.ty)
            self.sig.declare_const(item.name, TySchema(item.params, ty))
            emit("type", item.name)
        elif isinstance(item, DDefine):
            self.load_define(item)
            emit("define", ", ".join(n for n, _ in item.preds))
        elif isinstance(item, DSpec):
            self.load_specification(item.name)
            emit("spec", item.name)
        elif isinstance(item, DTheorem):
            self.start_theorem(item.name, item.params, item.formula)
            emit("theorem", item.name)
            for cmd in item.script:
                self.run_tactic(cmd, emit)
            if self.proof is not None:
                if self.proof.state.complete:
                    self.qed()
                elif not allow_open:
                    raise ProverError(
                        f"script for {item.name} ended with "
                        f"{len(self.proof.state.open_ids)} open subgoal(s)"
                    )
        else:
            raise ProverError(f"cannot load {item!r}")

    def load_define(self, d: DDefine):
        saved_consts = dict(self.sig.consts)
        saved_blocks = list(self.sig.blocks)
        saved_map = dict(self.sig.block_of_pred)
        try:
            preds = []
            for name, sty in d.preds:
                elab = Elaborator(self.sig, tyvars=d.params)
                ty = elab.elab_ty(sty)
                _, target = strip_arrow(ty)
                if target != PROP:
                    raise ElabError(f"{name} must target prop")
                schema = TySchema(d.params, ty)
                self.sig.declare_const(name, schema)
                preds.append((name, schema))
            fixed = {name: tuple(map(_tyvar, d.params)) for name, _ in preds}
            clauses = []
            for c in d.clauses:
                clauses.append(self._elab_clause(c, d.params, fixed))
            block = DefBlock(tuple(d.params), tuple(preds), tuple(clauses), d.inductive)
            diags = check_block(block, self.sig, self.sig.blocks)
            if diags:
                raise BlockError(diags)
            self.sig.register_block(block)
        except ProverError:
            self.sig.consts = saved_consts
            self.sig.blocks = saved_blocks
            self.sig.block_of_pred = saved_map
            raise

    def _elab_clause(self, c, block_params, fixed) -> SchematicClause:
        elab = Elaborator(
            self.sig, tyvars=tuple(block_params) + tuple(c.typarams), mode="clause"
        )
        elab.fixed_instances = fixed
        head = elab.elab(c.head, PROP)
        body = elab.elab(c.body, PROP) if c.body is not None else TOP
        head = elab.finish(head, "clause head")
        body = elab.finish(body, "clause body") if c.body is not None else TOP
        binder_vars = elab.finish_vars()
        binder = tuple((n, m.ty) for n, m in binder_vars.items())
        return SchematicClause(tuple(c.typarams), binder, head, body)

    def load_specification(self, name: str):
        sig_path = os.path.join(self.base_dir, name + ".sig")
        mod_path = os.path.join(self.base_dir, name + ".mod")
        for p in (sig_path, mod_path):
            if not os.path.exists(p):
                raise ProverError(f"specification file {p} not found")
        with open(sig_path) as fh:
            sig_text = fh.read()
        with open(mod_path) as fh:
            mod_text = fh.read()
        prog = parse_spec(sig_text, mod_text)
        install_spec(self.sig, prog)
        self.spec = prog

    # -- proofs

    def start_theorem(self, name: str, params: tuple, formula_surface):
        if name in self.lemmas:
            raise ProverError(f"theorem {name} already exists")
        elab = Elaborator(self.sig, tyvars=params, mode="closed")
        f = elab.finish(elab.elab(formula_surface, PROP), "theorem statement")
        seq = Sequent(tuple(params), (), (), f)
        lint_sequent(seq, self.sig)
        self.proof = OpenProof(name, tuple(params), f, tc.new_proof(seq), [], [])

    def run_tactic_text(self, text: str, on_event: Optional[Callable] = None):
        self.run_tactic(parse_tactic_text(text), on_event or (lambda k, i: None))

    def run_tactic(self, cmd: TacticCmd, emit=lambda k, i: None):
        if self.proof is None:
            raise TacticError("no-open-subgoals", "no proof in progress")
        if cmd.name == "undo":
            self.undo()
            return
        p = self.proof
        if not p.state.open_ids and cmd.name != "undo":
            raise TacticError("no-open-subgoals", "no open subgoals")
        ctx = self.ctx()
        state = p.state
        if cmd.name == "intros":
            state = tc.tac_intros(state, ctx)
        elif cmd.name == "case":
            state = tc.tac_case(state, cmd.payload["label"], ctx)
        elif cmd.name == "induction":
            state = tc.tac_induction(state, cmd.payload["n"], ctx)
        elif cmd.name == "apply":
            tyargs = None
            if cmd.payload["tyargs"] is not None:
                el = Elaborator(self.sig, tyvars=state.current.tyvars)
                tyargs = [el.elab_ty(t) for t in cmd.payload["tyargs"]]
            withs = None
            if cmd.payload["with"]:
                withs = {
                    n: self._elab_in_sequent(state.current, t)
                    for n, t in cmd.payload["with"].items()
                }
            state = tc.tac_apply(
                state, cmd.payload["source"], cmd.payload["targets"], ctx,
                tyargs=tyargs, with_bindings=withs,
            )
        elif cmd.name == "search":
            state = tc.tac_search(state, cmd.payload["depth"] or 5, ctx)
        elif cmd.name == "unfold":
            state = tc.tac_unfold(state, cmd.payload["clause"], ctx)
        elif cmd.name == "split":
            state = tc.tac_split(state, ctx)
        elif cmd.name == "left":
            state = tc.tac_or(state, 1, ctx)
        elif cmd.name == "right":
            state = tc.tac_or(state, 2, ctx)
        elif cmd.name == "witness":
            t = self._elab_in_sequent(state.current, cmd.payload["term"])
            state = tc.tac_exists(state, t, ctx)
        elif cmd.name == "assert":
            f = self._elab_in_sequent(state.current, cmd.payload["formula"], PROP)
            state = tc.tac_assert(state, f, ctx)
        elif cmd.name == "skip":
            state = tc.tac_skip(state, ctx)
        else:
            raise TacticError("unknown-tactic", f"unknown tactic {cmd.name}")
        p.history.append(p.state)
        p.state = state
        p.script.append(cmd.text)
        emit("tactic", cmd.text)
        if state.complete:
            emit("completed", self.proof.name)

    def _elab_in_sequent(self, seq: Sequent, surface, expect=None):
        elab = Elaborator(
            self.sig,
            tyvars=seq.tyvars,
            mode="closed",
            var_env={e.name: e for e in seq.eigens},
        )
        out = elab.elab(surface, expect if expect is not None else elab.fresh_ty())
        return elab.finish(out)

    def undo(self):
        p = self.proof
        if p is None or not p.history:
            raise TacticError("nothing-to-undo", "nothing to undo")
        p.state = p.history.pop()
        if p.script:
            p.script.pop()

    def qed(self):
        p = self.proof
        if p is None:
            raise ProverError("no proof in progress")
        if not p.state.complete:
            raise ProverError("proof is not complete")
        if p.state.skipped:
            record_ok = False
        else:
            record_ok = True
        self.lemmas[p.name] = (p.params, p.formula)
        self.theorems.append(
            TheoremRecord(p.name, p.params, p.formula, p.state, tuple(p.script))
        )
        self.proof = None
        return record_ok

    # -- rendering

    def render_state(self) -> str:
        if self.proof is None:
            return "No proof in progress."
        st = self.proof.state
        if st.complete:
            return "Proof completed."
        lines = [f"Subgoals: {len(st.open_ids)}", ""]
        lines += sequent_lines(st.current, self.sig, self.show_instances)
        return "\n".join(lines)

    def subgoal_payload(self) -> dict:
        """Protocol rendering of the current state."""
        if self.proof is None:
            return {"proof": None, "completed": False, "subgoals": []}
        st = self.proof.state
        pr = self.printer()
        subgoals = []
        for nid in st.open_ids:
            seq = st.nodes[nid].sequent
            subgoals.append(
                {
                    "tyvars": list(seq.tyvars),
                    "eigenvars": [
                        {"name": e.name, "ty": ty_str(e.ty)} for e in seq.eigens
                    ],
                    "hyps": [
                        {
                            "label": h.label,
                            "ann": (h.annotation[0] if h.annotation else ""),
                            "formula": pr.term_str(h.formula),
                        }
                        for h in seq.hyps
                    ],
                    "goal": pr.term_str(seq.goal),
                }
            )
        return {
            "proof": self.proof.name,
            "completed": st.complete,
            "subgoals": subgoals,
        }


def _tyvar(name):
    from .terms import TyVar

    return TyVar(name)


def check_file(path: str) -> Session:
    """Batch-check a development file; raises on the first failure."""
    with open(path) as fh:
        text = fh.read()
    session = Session(base_dir=os.path.dirname(os.path.abspath(path)))
    session.load_text(text)
    if session.proof is not None:
        raise ProverError(f"file ends with an open proof of {session.proof.name}")
    return session
