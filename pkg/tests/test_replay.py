from dataclasses import replace as dc_replace
from pathlib import Path

import pytest

from polyprove.errors import ReplayError
from polyprove.replay import (
    GroundKernel,
    instantiate_proof,
    proof_ground_types,
    replay,
    sequent_replay_eq,
    soundness_harness,
)
from polyprove.session import check_file
from polyprove.tactics import ProofNode, finish_tree
from polyprove.terms import Arrow, Const, Sort, TyApp, TySubst, ty_is_ground

CORPUS = Path(__file__).parent.parent / "corpus"
I = Sort("i")
LI = TyApp("list", (I,))
POOL = [I, LI, Arrow(I, I)]


@pytest.fixture(scope="module")
def gappend_session():
    return check_file(str(CORPUS / "gappend.thm"))


@pytest.fixture(scope="module")
def speclog_session():
    return check_file(str(CORPUS / "speclog.thm"))


def _tree(session, name):
    rec = next(t for t in session.theorems if t.name == name)
    return rec, finish_tree(rec.state)


def test_instantiate_identity_when_no_params(gappend_session):
    rec, tree = _tree(gappend_session, "append_det")
    ground = instantiate_proof(tree, TySubst({"A": I}))
    assert ground.sequent.tyvars == ()
    assert all(ty_is_ground(t) for t in proof_ground_types(ground))


def test_replay_append_det_at_every_pool_type(gappend_session):
    rec, tree = _tree(gappend_session, "append_det")
    for tau in POOL:
        ground = instantiate_proof(tree, TySubst({"A": tau}))
        kernel = GroundKernel(
            gappend_session.sig, gappend_session.lemmas, POOL,
            [t for t in proof_ground_types(ground) if ty_is_ground(t)],
        )
        replay(ground, kernel)  # must not raise


def test_replay_whole_corpus(gappend_session):
    for rec in gappend_session.theorems:
        rep = soundness_harness(
            rec.name, rec.params, finish_tree(rec.state),
            gappend_session.sig, gappend_session.lemmas, POOL,
        )
        assert rep.ok, (rec.name, [r for r in rep.results if not r[1]])
        assert len(rep.results) == len(POOL) ** len(rec.params)


def test_replay_speclog_at_i_and_list_i(speclog_session):
    for rec in speclog_session.theorems:
        rep = soundness_harness(
            rec.name, rec.params, finish_tree(rec.state),
            speclog_session.sig, speclog_session.lemmas, [I, LI],
        )
        assert rep.ok, (rec.name, rep.results)


def test_replay_speclog_at_function_type(speclog_session):
    # beyond the stated gate: the embedded development also replays at i -> i
    for rec in speclog_session.theorems:
        rep = soundness_harness(
            rec.name, rec.params, finish_tree(rec.state),
            speclog_session.sig, speclog_session.lemmas, POOL,
        )
        assert rep.ok, (rec.name, rep.results)


def _corrupt_drop_def_l_child(node: ProofNode):
    """Delete one child of the first def_l node found."""
    if node.rule == "def_l" and len(node.children) >= 2:
        return ProofNode(node.rule, node.payload, node.sequent, node.children[:-1]), True
    kids = []
    done = False
    for c in node.children:
        if not done:
            c2, done = _corrupt_drop_def_l_child(c)
            kids.append(c2)
        else:
            kids.append(c)
    return ProofNode(node.rule, node.payload, node.sequent, tuple(kids)), done


def test_corrupted_case_count_fails_replay(gappend_session):
    rec, tree = _tree(gappend_session, "append_det")
    bad, found = _corrupt_drop_def_l_child(tree)
    assert found
    ground = instantiate_proof(bad, TySubst({"A": I}))
    kernel = GroundKernel(gappend_session.sig, gappend_session.lemmas, POOL, [I, LI])
    with pytest.raises(ReplayError) as exc:
        replay(ground, kernel)
    assert "premise" in str(exc.value)


def _corrupt_first_witness(node: ProofNode):
    if node.rule == "ex_r":
        payload = dict(node.payload)
        payload["witness"] = Const("nil", (I,))
        return ProofNode(node.rule, payload, node.sequent, node.children), True
    kids = []
    done = False
    for c in node.children:
        if not done:
            c2, done = _corrupt_first_witness(c)
            kids.append(c2)
        else:
            kids.append(c)
    return ProofNode(node.rule, node.payload, node.sequent, tuple(kids)), done


def test_corrupted_witness_fails_replay(gappend_session):
    rec, tree = _tree(gappend_session, "gappend_total")
    bad, found = _corrupt_first_witness(tree)
    assert found
    ground = instantiate_proof(bad, TySubst({"A": LI}))
    kernel = GroundKernel(gappend_session.sig, gappend_session.lemmas, POOL, [I, LI])
    with pytest.raises(ReplayError):
        replay(ground, kernel)


def _strip_star(node: ProofNode):
    """Remove the annotation from the induction node's premise hypothesis."""
    from polyprove.terms import strip_annotations
    from polyprove import engine as en

    if node.rule == "induction":
        child = node.children[0]
        hyps = tuple(
            en.Hyp(h.label, strip_annotations(h.formula)) for h in child.sequent.hyps
        )
        seq2 = dc_replace(child.sequent, hyps=hyps, goal=strip_annotations(child.sequent.goal))
        bad_child = ProofNode(child.rule, child.payload, seq2, child.children)
        return ProofNode(node.rule, node.payload, node.sequent, (bad_child,)), True
    kids = []
    done = False
    for c in node.children:
        if not done:
            c2, done = _strip_star(c)
            kids.append(c2)
        else:
            kids.append(c)
    return ProofNode(node.rule, node.payload, node.sequent, tuple(kids)), done


def test_stripped_annotations_fail_replay(gappend_session):
    rec, tree = _tree(gappend_session, "append_det")
    bad, found = _strip_star(tree)
    assert found
    ground = instantiate_proof(bad, TySubst({"A": I}))
    kernel = GroundKernel(gappend_session.sig, gappend_session.lemmas, POOL, [I, LI])
    with pytest.raises(ReplayError):
        replay(ground, kernel)


def test_never_unifiable_stability(gappend_session):
    # a def_l node whose schematic split dropped a clause: the ground split
    # must drop it too, so premise counts agree at every instance
    rec, tree = _tree(gappend_session, "append_det")

    def find_def_l(node):
        if node.rule == "def_l" and len(node.payload["cases"]) < 2:
            return node
        for c in node.children:
            got = find_def_l(c)
            if got is not None:
                return got
        return None

    node = find_def_l(tree)
    assert node is not None  # case H2 after the nil case has one premise
    for tau in POOL:
        ground = instantiate_proof(node, TySubst({"A": tau}))
        kernel = GroundKernel(gappend_session.sig, gappend_session.lemmas, POOL, [tau])
        from polyprove.replay import _derive_def_l

        premises = _derive_def_l(ground, kernel)
        assert len(premises) == len(node.children)


def test_replay_rejects_skip():
    from polyprove.session import Session

    s = Session(str(CORPUS))
    s.load_text(
        "Kind i type.\nTheorem bad : forall (x : i), x = x.\nskip.\n"
    )
    rec = s.theorems[-1]
    tree = finish_tree(rec.state)
    kernel = GroundKernel(s.sig, s.lemmas, [I], [])
    with pytest.raises(ReplayError) as exc:
        replay(tree, kernel)
    assert "admits" in str(exc.value)


def test_sequent_replay_eq_is_annotation_sensitive(gappend_session):
    from polyprove import engine as en
    from polyprove.terms import app, strip_annotations

    rec, tree = _tree(gappend_session, "append_det")
    node = tree
    while node.rule != "induction":
        node = node.children[0]
    child = node.children[0].sequent
    stripped = dc_replace(
        child,
        hyps=tuple(en.Hyp(h.label, strip_annotations(h.formula)) for h in child.hyps),
        goal=strip_annotations(child.goal),
    )
    assert not sequent_replay_eq(child, stripped)
    assert sequent_replay_eq(child, child)


def test_parameterless_theorem_replays_once():
    from polyprove.session import Session

    s = Session(str(CORPUS))
    s.load_text("Kind i type.\nType a i.\nTheorem ground : a = a. search.")
    rec = s.theorems[-1]
    rep = soundness_harness("ground", rec.params, finish_tree(rec.state),
                            s.sig, s.lemmas, [I])
    assert rep.ok and len(rep.results) == 1
    assert rep.results[0][0] == {}


def test_corrupted_proof_reported_not_raised(gappend_session):
    rec, tree = _tree(gappend_session, "append_det")
    bad, found = _corrupt_drop_def_l_child(tree)
    assert found
    rep = soundness_harness("append_det", rec.params, bad,
                            gappend_session.sig, gappend_session.lemmas, [I])
    assert not rep.ok
    assert any(not ok for _, ok, _ in rep.results)
