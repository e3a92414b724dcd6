import json
from pathlib import Path

import pytest

from deraz.cli import check_certificate, main, run_text
from deraz.jobs import JobError, load_job

ROOT = Path(__file__).resolve().parent.parent
JOBS = ROOT / "jobs"
GOLDEN = Path(__file__).resolve().parent / "golden"

EXPECTED_EXIT = {
    "m2": 0, "kxk": 1, "zero": 1, "quaternion_f3": 0, "smooth": 2, "koszul": 0, "support": 1,
    "p1_generator": 0, "p1_cech": 0, "splitting": 0, "covering_fail": 1, "morita_fail": 1,
}


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.parametrize("name", sorted(EXPECTED_EXIT))
def test_exit_codes_and_golden_reports(name, capsys):
    code, out = _run(capsys, "run", str(JOBS / f"{name}.deraz"), "--json")
    assert code == EXPECTED_EXIT[name]
    assert json.loads(out) == json.loads((GOLDEN / f"{name}.json").read_text())


@pytest.mark.parametrize("name", sorted(EXPECTED_EXIT))
def test_certificates_validate(name, tmp_path, capsys):
    report = tmp_path / "r.json"
    main(["run", str(JOBS / f"{name}.deraz"), "--json", "-o", str(report)])
    code, out = _run(capsys, "verify-certificate", str(JOBS / f"{name}.deraz"), str(report))
    assert code == 0, out


def test_tampered_certificates_rejected():
    for name in ("kxk", "m2", "support", "covering_fail"):
        text = (JOBS / f"{name}.deraz").read_text()
        rep = json.loads((GOLDEN / f"{name}.json").read_text())
        assert check_certificate(text, rep)[0]
        bad = json.loads(json.dumps(rep))
        if name == "kxk":
            bad["certificate"]["az2"]["witness"]["degree"] = 5
        elif name == "m2":
            bad["certificate"]["az2"]["cone_homology"]["0"] = 1
        elif name == "support":
            w = bad["certificate"]["witness"]
            if w["kind"] == "point":
                w["values"] = {"x": "1"}  # a root of x^2 - 1: the fiber is not acyclic
            else:
                w["element"] = "0"
        else:
            bad["certificate"]["covering"]["witness"]["values"]["x1"] = "2"
        ok, _ = check_certificate(text, bad)
        assert not ok, name


def test_report_for_other_task_rejected():
    text = (JOBS / "m2.deraz").read_text()
    rep = json.loads((GOLDEN / "kxk.json").read_text())
    assert not check_certificate(text, rep)[0]


def test_text_output(capsys):
    code, out = _run(capsys, "run", str(JOBS / "kxk.deraz"))
    assert code == 1
    assert "verdict: fail" in out
    assert "H^-1=2, H^0=2" in out


def test_timing_only_on_request(capsys):
    _, plain = _run(capsys, "run", str(JOBS / "m2.deraz"), "--json")
    _, timed = _run(capsys, "run", str(JOBS / "m2.deraz"), "--json", "--timing")
    assert "timing_seconds" not in json.loads(plain)
    assert "timing_seconds" in json.loads(timed)


def test_parse_errors_carry_positions():
    with pytest.raises(JobError) as e:
        load_job("algebra k { field = Q;\n  vars = x y; }\n")
    assert (e.value.line, e.value.col) == (2, 12)
    with pytest.raises(JobError):
        load_job("")
    with pytest.raises(JobError):
        load_job("algebra k { field = Q; }")
    rep = run_text("algebra k { field = Q; }\ntask check-azumaya { algebra = nope; }\n")
    assert rep.exit_code == 3


def test_input_errors(capsys, tmp_path):
    code, _ = _run(capsys, "run", str(tmp_path / "missing.deraz"))
    assert code == 3
    code, _ = _run(capsys, "run", str(JOBS / "empty.deraz"))
    assert code == 3


def test_rank_cap_gives_not_established(capsys):
    code, out = _run(capsys, "run", str(JOBS / "p1_generator.deraz"), "--rank-cap", "2", "--json")
    assert code == 2
    assert json.loads(out)["verdict"] == "not-established"


def test_threads_do_not_change_reports(capsys):
    for name in ("kxk", "p1_cech", "support"):
        _, one = _run(capsys, "run", str(JOBS / f"{name}.deraz"), "--json", "--threads", "1")
        _, four = _run(capsys, "run", str(JOBS / f"{name}.deraz"), "--json", "--threads", "4")
        assert one == four
