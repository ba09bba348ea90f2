import json
import subprocess
import sys

import pytest

from reebcount.cli import FIXTURE_SCHEMAS, emit_fixture_suite, main, validate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def fixtures(tmp_path_factory):
    d = tmp_path_factory.mktemp("fx")
    emit_fixture_suite(d)
    return d


def test_fixture_suite_is_valid_and_deterministic(tmp_path, fixtures):
    files = sorted(p.name for p in fixtures.iterdir())
    assert len(files) >= 10
    for name in files:
        validate(json.loads((fixtures / name).read_text()), FIXTURE_SCHEMAS[name], name)
    emit_fixture_suite(tmp_path)
    for name in files:
        assert (tmp_path / name).read_bytes() == (fixtures / name).read_bytes()


def test_fixture_write_failure_exit_1(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, err = run(capsys, "fixtures", "--dir", str(blocker / "sub"))
    assert code == 1 and "error" in err


def test_ranks_brieskorn(capsys):
    code, out, _ = run(capsys, "ranks", "--brieskorn", "--a0", "7", "--n", "3", "--window", "0", "15")
    assert code == 0
    data = json.loads(out)
    assert data["version"] == "0.1.0"
    window = data["result"]["window"]
    assert window["6"] == 2 and window["8"] == 2 and window["10"] == 1


def test_iterate_hyperbolic(capsys, fixtures):
    code, out, _ = run(capsys, "iterate", "--profile", str(fixtures / "hyp2.json"), "--k", "4")
    assert code == 0
    assert json.loads(out)["result"]["indices"] == [2, 4, 6, 8]


def test_theorem_c_delegates(capsys):
    code, out, _ = run(capsys, "theorem", "c", "--a0", "1", "--n", "3", "--K", "40")
    data = json.loads(out)
    assert code == 0
    assert data["result"]["report"]["notes"]["delegated"] == "A"
    assert data["bounds"]["K"] == 40


def test_theorem_b_report(capsys, fixtures):
    code, out, _ = run(capsys, "theorem", "b", "--betti", str(fixtures / "sphere_s2.json"), "--c", "2", "--n", "2")
    assert code == 0
    assert json.loads(out)["result"]["report"]["verdict"] == "InfeasibleAtBound"


def test_chi_m_system_is_exact(capsys, fixtures):
    code, out, _ = run(capsys, "chi-m", "--system", str(fixtures / "ellipsoid_system.json"))
    assert code == 0 and json.loads(out)["result"]["chi_m"] == "-1/2"


def test_feasibility_and_json_out(capsys, tmp_path, fixtures):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "--json-out", str(target), "feasibility", "--displaceable",
                       "--betti", str(fixtures / "ball_n2.json"), "--K", "50", "--no-resonance")
    assert code == 0
    assert target.read_text() == out
    assert json.loads(out)["result"]["report"]["verdict"] == "FeasibleAtBound"


def test_matrix_commands(capsys, fixtures):
    code, out, _ = run(capsys, "matrix", "class", str(fixtures / "hyperbolic_2.json"))
    assert code == 0 and json.loads(out)["result"]["class"] == "MINUS"
    code, out, _ = run(capsys, "matrix", "rho", str(fixtures / "rotation_quarter.json"))
    assert abs(json.loads(out)["result"]["rho_angle"] - 1.5707963267948966) < 1e-12


def test_schema_violation_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 4, "betti": {"x": 1}}))
    code, _, err = run(capsys, "ranks", "--displaceable", "--betti", str(bad))
    assert code == 2
    assert "/betti" in json.loads(err)["error"]


def test_missing_flag_exit_2(capsys):
    code, _, _ = run(capsys, "ranks", "--brieskorn", "--a0", "7")
    assert code == 2


def test_hypothesis_violation_exit_1(capsys, fixtures):
    code, _, _ = run(capsys, "theorem", "b", "--betti", str(fixtures / "sphere_s2.json"), "--c", "1", "--n", "2")
    assert code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "reebcount", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "0.1.0" in proc.stdout
