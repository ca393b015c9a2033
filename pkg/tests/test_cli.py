import json

import pytest

from gspin_gj.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_lfunction_trivial(capsys):
    code, rep = run(capsys, "lfunction-eval", "--space", "n=0,E=F,p=3", "--satake", "E=2")
    assert code == 0 and rep["series"] == ["1", "0", "0", "0", "0"]
    assert rep["schema"] == "gspin-gj/1"


def test_theorem1_example(capsys):
    code, rep = run(capsys, "verify-theorem1", "--space", "n=2,E=F,p=3", "--degree", "4")
    assert code == 0 and rep["pass"]
    assert len(rep["series_lhs"]) == 5 and rep["series_lhs"] == rep["series_rhs"]


def test_meas_example(capsys):
    code, rep = run(capsys, "verify-meas", "--space", "n=1,E=split,p=3", "--trials", "100")
    assert code == 0 and rep["trials"] == 100 and rep["failures"] == []


def test_report_fields(capsys):
    _, rep = run(capsys, "verify-betaT", "--space", "n=1,E=F,p=5", "--trials", "10")
    for key in ["command", "space", "p", "M", "seed", "satake", "trials", "failures", "series_lhs",
                "series_rhs", "pass", "wall_time_ms"]:
        assert key in rep


@pytest.mark.parametrize("argv", [
    ["verify-meas", "--space", "n=1,E=F"],
    ["verify-meas", "--space", "n=1,E=F,p=9"],
    ["verify-theorem1", "--space", "n=1,E=F,p=3", "--satake", "1,2;E=3"],
    ["verify-chary", "--space", "n=1,E=F,p=3"],
    ["verify-meas", "--trials", "0"],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify-theorem1", "--mode", "sideways"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def _strip(rep):
    rep = dict(rep)
    rep.pop("wall_time_ms")
    return rep


@pytest.mark.parametrize("cmd", ["verify-support-claim", "verify-fourier", "verify-theorem1"])
def test_deterministic(capsys, cmd):
    argv = [cmd, "--space", "n=1,E=unram:u=2,p=3", "--seed", "9", "--trials", "3"]
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert _strip(a) == _strip(b)


def test_out_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, rep = run(capsys, "basic-coeffs", "--space", "n=1,E=split,p=3", "--degree", "3", "--out", str(path))
    assert code == 0 and json.loads(path.read_text()) == rep
    assert rep["p_prime"] == ["1", "10", "91", "820"]


def test_failure_exit_1(capsys, monkeypatch):
    from gspin_gj import verify

    monkeypatch.setattr(verify, "measure_Uy_closed", lambda y: -1)
    code, rep = run(capsys, "verify-meas", "--space", "n=1,E=F,p=3", "--trials", "5")
    assert code == 1 and not rep["pass"] and len(rep["failures"]) == 5


def test_suite_single_space(capsys):
    code, rep = run(capsys, "suite", "--space", "n=1,E=F,p=3", "--trials", "5", "--degree", "3")
    assert code == 0 and rep["pass"]
    assert {r["command"] for r in rep["reports"]} >= {"verify-theorem1", "verify-meas", "basic-coeffs"}
