import json
from pathlib import Path

import pytest

from polyprove.cli import main

CORPUS = Path(__file__).parent.parent / "corpus"


def test_check_ok_with_replay(capsys):
    code = main(["check", str(CORPUS / "gappend.thm"),
                 "--replay-types", "i, list i, i -> i"])
    out = capsys.readouterr().out
    assert code == 0
    assert "append_det: proved, 3/3 replays ok" in out
    assert out.strip().endswith("ok")


def test_check_json_report(capsys):
    code = main(["check", str(CORPUS / "speclog.thm"),
                 "--replay-types", "i, list i", "--json"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["ok"] is True
    names = [t["name"] for t in report["theorems"]]
    assert names == ["append_det_h", "append_det"]
    for t in report["theorems"]:
        assert t["replay_ok"] is True
        assert len(t["replays"]) == 2  # 2 pool types, one parameter


def test_check_proof_failure_exit_code(capsys):
    code = main(["check", str(CORPUS / "expected_fail" / "disjunction.thm")])
    assert code == 1


def test_check_not_amenable_exit_code(capsys):
    code = main(["check", str(CORPUS / "expected_fail" / "keq_case.thm")])
    assert code == 1
    assert "A = B" in capsys.readouterr().err


def test_check_wellformedness_exit_code(capsys):
    code = main(["check", str(CORPUS / "reject" / "negative_occurrence.thm")])
    assert code == 2


def test_check_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.thm"
    bad.write_text("Kind i type")
    code = main(["check", str(bad)])
    assert code == 2


def test_run_spec_answer(capsys):
    code = main(["run-spec", str(CORPUS / "append"),
                 "--query", "append (a :: nil) (b :: nil) L", "--depth", "10"])
    out = capsys.readouterr().out
    assert code == 0
    assert "L = a :: b :: nil" in out


def test_run_spec_no(capsys):
    code = main(["run-spec", str(CORPUS / "append"),
                 "--query", "append nil[i] nil[i] (a :: nil)", "--depth", "10"])
    assert code == 1
    assert capsys.readouterr().out.strip() == "no"


def test_unify_debug_verdicts(capsys):
    code = main(["unify", "--dev", str(CORPUS / "gappend.thm"),
                 "gappend nil L1 L2", "gappend X Y Y"])
    assert code == 0
    assert "unifiable" in capsys.readouterr().out
    code = main(["unify", "--dev", str(CORPUS / "expected_fail" / "keq_case.thm"),
                 "--frozen", "A,B", "keq (kp[A] X) (kp[B] Y)", "keq Z Z"])
    out = capsys.readouterr().out
    assert code == 0
    assert "ambiguous" in out and "A = B" in out
