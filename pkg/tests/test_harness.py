import json
from pathlib import Path

import pytest

from eqiwasawa.harness import (
    FixtureError,
    Verdict,
    brumer_stark_check,
    exit_code,
    ingest_fixture,
    main,
    report_text,
    run,
)
from eqiwasawa.lfun import quadratic_field

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def _fixture(name):
    return json.loads((FIXTURES / name).read_text())


def test_exit_codes():
    ok = Verdict("x", "s", "pass")
    bad = Verdict("x", "s", "fail")
    na = Verdict("x", "s", "not-applicable")
    assert exit_code([ok, na]) == 0
    assert exit_code([ok, bad, na]) == 1
    assert exit_code([na, na]) == 2
    with pytest.raises(ValueError):
        Verdict("x", "s", "maybe")


def test_fixture_without_provenance_is_rejected():
    d = _fixture("bs_qsqrt-23.json")
    del d["provenance"]
    with pytest.raises(FixtureError):
        ingest_fixture(d)
    d = _fixture("bs_qsqrt-23.json")
    d["provenance"]["oracle"] = " "
    with pytest.raises(FixtureError):
        ingest_fixture(d)


def test_fixture_with_bad_module_is_rejected():
    d = _fixture("bs_qsqrt-23.json")
    d["module"]["actions"] = [[[0]]]  # not invertible, so not a group action
    with pytest.raises(FixtureError):
        ingest_fixture(d)


def test_fixture_round_trip_from_text_and_path():
    a = ingest_fixture(FIXTURES / "bs_qsqrt-23.json")
    b = ingest_fixture((FIXTURES / "bs_qsqrt-23.json").read_text())
    assert a.field == b.field == quadratic_field(-23)
    assert a.module.exps == b.module.exps


def test_field_mismatch_raises():
    fx = ingest_fixture(FIXTURES / "bs_qsqrt-23.json")
    with pytest.raises(FixtureError):
        brumer_stark_check(quadratic_field(-4), [2], [5], 3, fx)


def test_report_has_no_floats():
    with pytest.raises((TypeError, ValueError)):
        report_text({"x": 0.5})
    assert report_text({"b": 1, "a": "1/2"}) == '{\n  "a": "1/2",\n  "b": 1\n}\n'


def test_cli_bernoulli(capsys):
    assert main(["bernoulli", "-4", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["value"] == "-1/2"


def test_cli_theta(capsys):
    assert main(["theta", "--field", "-4", "--S", "2", "--T", "3", "--m", "1", "--cross-check"]) == 0
    assert json.loads(capsys.readouterr().out)["result"]["element"]["coeffs"] == ["1", "-1"]


def test_cli_bad_input_reports_error(capsys):
    assert main(["theta", "--field", "-4", "--S", "2", "--T", "2"]) == 1
    assert "error:" in capsys.readouterr().err


@pytest.mark.parametrize("name,code", [("bs_qsqrt-23.json", 0), ("bs_qsqrt-23_corrupted.json", 1),
                                       ("bs_qi.json", 0), ("cs_qi_n2.json", 0)])
def test_cli_fixture_checks(name, code, capsys):
    which = "brumer-stark" if name.startswith("bs") else "coates-sinnott"
    assert main(["check", which, "--fixture", str(FIXTURES / name)]) == code
    capsys.readouterr()


def test_report_replay_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        d.mkdir()
        code, _ = run(["--report", str(d / "r.json"), "series", "--field", "-4", "--S", "2", "--T", "7",
                       "--p", "3", "--N", "3", "--M", "4"])
        assert code == 0
        outs.append({f.name: f.read_bytes() for f in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert {"r.json", "r-theta-newton.png", "r-theta-invariants.png"} <= set(outs[0])


def test_report_matches_stdout(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert main(["--report", str(path), "check", "brumer-stark", "--fixture", str(FIXTURES / "bs_qi.json")]) == 0
    assert capsys.readouterr().out == path.read_text()
