"""Randomized agreement between schematic case analysis and ground replay.

For random atoms over the schematic append definition, the schematic
case split (with the sequent's type parameter frozen) must project, under
every ground instantiation of that parameter, onto exactly the ground
case split computed from the instantiated clauses: same number of
premises, alpha-equal sequents, annotations included.
"""

import random

import pytest

from polyprove import engine as en
from polyprove.defs import install_base_blocks
from polyprove.errors import TacticError
from polyprove.replay import GroundKernel, _derive_def_l, _phi_sequent, sequent_replay_eq
from polyprove.tactics import ProofNode
from polyprove.terms import (
    Arrow,
    Const,
    Eigen,
    Sort,
    TyApp,
    TySubst,
    TyVar,
    app,
)

from helpers import base_sig, gappend_block

I = Sort("i")
A = TyVar("A")
POOL = [I, TyApp("list", (I,)), Arrow(I, I)]


def la(ty):
    return TyApp("list", (ty,))


@pytest.fixture(scope="module")
def sig():
    s = base_sig()
    install_base_blocks(s)
    s.register_block(gappend_block())
    return s


def random_list_term(rng, eigens, depth):
    """A random term of type list A over eigenvariables and constructors."""
    if depth <= 0 or rng.random() < 0.4:
        kind = rng.randrange(3)
        if kind == 0:
            return Const("nil", (A,))
        return rng.choice([e for e in eigens if e.ty == la(A)])
    head = rng.choice([e for e in eigens if e.ty == A])
    return app(Const("cons", (A,)), (head, random_list_term(rng, eigens, depth - 1)))


def test_random_def_l_ground_agreement(sig):
    rng = random.Random(20240810)
    eigens = (
        Eigen("x", A),
        Eigen("y", A),
        Eigen("l1", la(A)),
        Eigen("l2", la(A)),
        Eigen("l3", la(A)),
    )
    checked = 0
    nonempty_splits = 0
    for k in range(200):
        args = tuple(random_list_term(rng, eigens, rng.randrange(3)) for _ in range(3))
        atom = app(Const("gappend", (A,)), args)
        used = [e for e in eigens]
        goal = app(Const("=", (la(A),)), (args[0], args[1]))
        seq = en.Sequent(("A",), tuple(used), (en.Hyp("H1", atom),), goal)
        try:
            out = en.rule_def_l(seq, "H1", sig)
        except TacticError:
            continue  # NotAmenable cannot arise here, but stay defensive
        for tau in POOL:
            Phi = TySubst({"A": tau})
            gseq = _phi_sequent(seq, Phi)
            node = ProofNode("def_l", {"label": "H1"}, gseq, ())
            kernel = GroundKernel(sig, {}, POOL, [tau])
            ground = _derive_def_l(node, kernel)
            assert len(ground) == len(out.premises), (atom, tau)
            for sp, gp in zip(out.premises, ground):
                assert sequent_replay_eq(_phi_sequent(sp, Phi), gp), (atom, tau)
        checked += 1
        nonempty_splits += bool(out.premises)
    assert checked >= 150
    assert nonempty_splits >= 50


def test_refusal_is_conservative_for_keq(sig):
    """The schematic rule refuses the keq/kp analysis, yet every ground
    instance analyzes fine: same-type instances unify the pair, and
    distinct-type instances have no case at all."""
    from polyprove.defs import DefBlock, SchematicClause
    from polyprove.formulas import TOP
    from polyprove.terms import Meta, TySchema, arrow

    sig.declare_const("kp", TySchema(("A",), arrow(A, I)))
    sig.declare_const("keq", TySchema(("A",), arrow(A, A, Sort("prop"))))
    z = Meta("z", A)
    blk = DefBlock(
        ("A",),
        (("keq", TySchema(("A",), arrow(A, A, Sort("prop")))),),
        (SchematicClause((), (("z", A),), app(Const("keq", (A,)), (z, z)), TOP),),
    )
    sig.register_block(blk)
    x, y = Eigen("x", TyVar("A")), Eigen("y", TyVar("B"))
    atom = app(
        Const("keq", (I,)),
        (app(Const("kp", (TyVar("A"),)), (x,)), app(Const("kp", (TyVar("B"),)), (y,))),
    )
    seq = en.Sequent(("A", "B"), (x, y), (en.Hyp("H1", atom),), Const("false"))
    with pytest.raises(TacticError):
        en.rule_def_l(seq, "H1", sig)
    for ta, tb, cases in [(I, I, 1), (I, la(I), 0), (la(I), la(I), 1)]:
        Phi = TySubst({"A": ta, "B": tb})
        gseq = _phi_sequent(seq, Phi)
        node = ProofNode("def_l", {"label": "H1"}, gseq, ())
        kernel = GroundKernel(sig, {}, POOL, [ta, tb])
        assert len(_derive_def_l(node, kernel)) == cases, (ta, tb)


def test_random_def_l_annotated_agreement(sig):
    # the same agreement with the analyzed atom carrying an @ marker:
    # the star bookkeeping must commute with type instantiation
    from polyprove.terms import set_annotation

    rng = random.Random(7)
    eigens = (Eigen("x", A), Eigen("l1", la(A)), Eigen("l2", la(A)))
    for k in range(60):
        args = tuple(random_list_term(rng, eigens, rng.randrange(2)) for _ in range(3))
        atom = set_annotation(app(Const("gappend", (A,)), args), ("@", 1))
        seq = en.Sequent(("A",), eigens, (en.Hyp("H1", atom),), Const("true"))
        out = en.rule_def_l(seq, "H1", sig)
        for tau in POOL:
            Phi = TySubst({"A": tau})
            gseq = _phi_sequent(seq, Phi)
            node = ProofNode("def_l", {"label": "H1"}, gseq, ())
            kernel = GroundKernel(sig, {}, POOL, [tau])
            ground = _derive_def_l(node, kernel)
            assert len(ground) == len(out.premises)
            for sp, gp in zip(out.premises, ground):
                assert sequent_replay_eq(_phi_sequent(sp, Phi), gp)
