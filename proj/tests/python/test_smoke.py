import math

import pytest

import diqsdc


def test_honest_run_delivers():
    report = diqsdc.run(seed=3, d=1500)
    assert report["abort"] == "none"
    assert report["delivered_message"] == report["inputs"]["message"]
    assert report["config"]["seed"] == 3


def test_dialogue_run_delivers_both_messages():
    report = diqsdc.run(seed=4, d=1500, mode="qd", transcript=False)
    assert report["abort"] == "none"
    assert report["delivered_message_b"] == report["inputs"]["message_b"]
    assert "transcript" not in report


def test_runs_are_deterministic():
    assert diqsdc.run_json(seed=9, d=1000) == diqsdc.run_json(seed=9, d=1000)


def test_impersonation_aborts():
    assert diqsdc.run(seed=1, d=1500, adversary="impersonate-alice")["abort"] == "SenderAuthFailed"
    assert diqsdc.run(seed=1, d=1500, adversary="impersonate-bob")["abort"] == "ReceiverAuthFailed"


def test_explicit_inputs_and_bad_values():
    report = diqsdc.run(n=8, c=4, k=2, d=1500, message="c3", id_a="0110", id_b="1001")
    assert report["delivered_message"] == "c3"
    with pytest.raises(ValueError):
        diqsdc.run(mode="other")
    assert diqsdc.run(n=3, c=2)["abort"] == "ConfigInvalid"


def test_tables_and_decoding():
    assert diqsdc.bell_transition("PhiPlus", "SigmaX") == "PsiPlus"
    assert diqsdc.bell_transition("PsiPlus", "ISigmaY") == "PhiMinus"
    assert diqsdc.bits_for_transition("PsiMinus", "PhiPlus") == "10"
    assert diqsdc.qd_decode("PsiPlus", "PhiMinus", None) == (1, 0)
    assert diqsdc.qd_decode(None, "PhiMinus", "ISigmaY") == (1, 0)
    with pytest.raises(ValueError):
        diqsdc.qd_decode(None, "PhiPlus", None)
    assert "PhiPlus   01    SigmaX   PsiPlus" in diqsdc.tables()


def test_chsh_and_selftest():
    for label in ("PhiPlus", "PhiMinus", "PsiPlus", "PsiMinus"):
        assert math.isclose(diqsdc.chsh_analytic(label), 2 * math.sqrt(2), abs_tol=1e-9)
    assert all(passed for _, passed, _ in diqsdc.selftest())


def test_cli_entry_point():
    code, out, err = diqsdc.cli(["run", "--n", "3", "--c", "2"])
    assert code == 1 and out == "" and err
    code, out, _ = diqsdc.cli(["tables"])
    assert code == 0 and out == diqsdc.tables()
