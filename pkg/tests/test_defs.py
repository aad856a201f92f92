import pytest

from polyprove.defs import (
    DefBlock,
    GroundClause,
    SchematicClause,
    check_block,
    eq_block,
    install_base_blocks,
    instantiate_block,
    nat_block,
    prove_block,
    reduce_clause,
)
from polyprove.errors import ProverError
from polyprove.formulas import TOP, conj, imp
from polyprove.terms import (
    Const,
    Meta,
    PROP,
    TySchema,
    TyVar,
    app,
    arrow,
    aeq,
)

from helpers import I, A, base_sig, cons, gappend_block, list_of, nil


def la(ty):
    return list_of(ty)


def test_gappend_block_ok():
    sig = base_sig()
    assert check_block(gappend_block(), sig, []) == []


def test_clause_parameterized_cannot_be_inductive():
    sig = base_sig()
    from polyprove.terms import OBJ

    sig.declare_const("prog", TySchema((), arrow(OBJ, OBJ, PROP)))
    sig.declare_const("append", TySchema(("A",), arrow(la(A), la(A), la(A), OBJ)))
    l = Meta("l", la(A))
    head = app(
        Const("prog"),
        (app(Const("append", (A,)), (nil(A), l, l)), Const("tt")),
    )
    sig.declare_const("tt", TySchema((), OBJ))
    c = SchematicClause(("A",), (("l", la(A)),), head, TOP)
    block_ok = DefBlock((), (("prog", TySchema((), arrow(OBJ, OBJ, PROP))),), (c,), inductive=False)
    assert check_block(block_ok, sig, []) == []
    block_bad = DefBlock((), block_ok.predicates, (c,), inductive=True)
    diags = check_block(block_bad, sig, [])
    assert any(code == "inductive-clause-params" for code, _ in diags)


def test_negative_occurrence_rejected():
    sig = base_sig()
    sig.declare_const("p", TySchema((), arrow(I, PROP)))
    x = Meta("x", I)
    head = app(Const("p"), (x,))
    body = imp(app(Const("p"), (x,)), Const("false"))
    c = SchematicClause((), (("x", I),), head, body)
    block = DefBlock((), (("p", TySchema((), arrow(I, PROP))),), (c,))
    diags = check_block(block, sig, [])
    assert any(code == "negative-occurrence" for code, _ in diags)


def test_body_tyvar_escape_rejected():
    sig = base_sig()
    sig.declare_const("q", TySchema((), arrow(I, PROP)))
    x = Meta("x", I)
    head = app(Const("q"), (x,))
    body = app(Const("=", (la(TyVar("B")),)), (nil(TyVar("B")), nil(TyVar("B"))))
    sig.declare_const("=", TySchema(("A",), arrow(A, A, PROP)))
    c = SchematicClause(("B",), (("x", I),), head, body)
    block = DefBlock((), (("q", TySchema((), arrow(I, PROP))),), (c,))
    diags = check_block(block, sig, [])
    assert any(code == "body-tyvar-escape" for code, _ in diags)


def test_block_param_overlap_rejected():
    sig = base_sig()
    blk = gappend_block()
    bad_clause = SchematicClause(("A",), blk.clauses[0].binder, blk.clauses[0].head, TOP)
    bad = DefBlock(("A",), blk.predicates, (bad_clause,), inductive=False)
    diags = check_block(bad, sig, [])
    assert any(code == "block-params-overlap" for code, _ in diags)


def test_wrong_instance_rejected():
    sig = base_sig()
    blk = gappend_block()
    l = Meta("l", la(I))
    bad_head = app(Const("gappend", (I,)), (nil(I), l, l))  # fixed at i, not at A
    bad_clause = SchematicClause((), (("l", la(I)),), bad_head, TOP)
    bad = DefBlock(("A",), blk.predicates, (bad_clause,))
    diags = check_block(bad, sig, [])
    assert any(code == "wrong-instance" for code, _ in diags)


def test_reduce_clause_params():
    blk = gappend_block()
    r1 = reduce_clause(blk.clauses[0], blk.block_params)
    assert r1.params == ("A",)
    # a clause with no type variables reduces to no parameters
    sig = base_sig()
    x = Meta("x", I)
    c = SchematicClause((), (("x", I),), app(Const("f"), (x,)), TOP)
    assert reduce_clause(c, ()).params == ()


def test_instantiate_block_at_i():
    blk = gappend_block()
    ground = instantiate_block(blk, (I,), [I])
    assert len(ground) == 2
    g1 = ground[0]
    l = Meta("l", la(I))
    assert aeq(g1.head, app(Const("gappend", (I,)), (nil(I), l, l)))
    assert g1.binder == (("l", la(I)),)


def test_instantiate_block_clause_param_enumeration():
    # a clause parameterized by one type variable yields one ground clause
    # per pool element, in pool order
    schema = TySchema((), arrow(I, PROP))
    x = Meta("x", la(A))
    c = SchematicClause(("A",), (("x", la(A)),), app(Const("p0"), (Const("a"),)), TOP)
    blk = DefBlock((), (("p0", schema),), (c,))
    ground = instantiate_block(blk, (), [I, la(I)])
    assert len(ground) == 2
    assert ground[0].binder == (("x", la(I)),)
    assert ground[1].binder == (("x", la(la(I))),)
    with pytest.raises(ProverError):
        instantiate_block(blk, (), [])


def test_builtin_blocks_shapes():
    eq = eq_block()
    assert eq.block_params == ("A",) and len(eq.clauses) == 1
    nat = nat_block()
    assert nat.inductive and len(nat.clauses) == 2
    prove = prove_block()
    assert prove.inductive and len(prove.clauses) == 3
    sig = base_sig()
    install_base_blocks(sig)
    assert sig.block_for("=") is not None
    assert sig.block_for("nat") is not None
    ground_nat = instantiate_block(sig.block_for("nat"), (), [])
    assert len(ground_nat) == 2


def test_reduce_instantiate_coherence():
    from polyprove.terms import TySubst

    blk = gappend_block()
    for idx, clause in enumerate(blk.clauses):
        rc = reduce_clause(clause, blk.block_params)
        phi = TySubst({v: I for v in rc.params})
        inst_head = phi.apply_term(rc.head)
        ground = instantiate_block(blk, (I,), [I])
        assert aeq(inst_head, ground[idx].head)


def test_check_block_order_independent():
    sig = base_sig()
    blk = gappend_block()
    flipped = DefBlock(blk.block_params, blk.predicates, tuple(reversed(blk.clauses)), True)
    assert check_block(blk, sig, []) == []
    assert check_block(flipped, sig, []) == []
