import json
import shutil
import subprocess

import pytest

from qdt import fixtures
from qdt.cli import main
from qdt.qp import is_cut, qp_from_dict, report


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "conifold_z2", "--json")
    assert code == 0
    assert json.loads(out)["valid"]


def test_validate_positioned_error(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"vertices": ["1", "2"], "arrows": [{"id": "a", "from": "1", "to": "2"}],
                             "potential": [{"coeff": "1", "cycle": ["a", "a"]}]}))
    code, _, err = run(capsys, "validate", str(f))
    assert code == 2
    diag = json.loads(err)
    assert diag["error"] == "ParseError"
    assert "$.potential[0].cycle[0]" in diag["message"]


def test_cuts(capsys):
    code, out, _ = run(capsys, "cuts", "three_cycle", "--json")
    rows = json.loads(out)["cuts"]
    assert code == 0 and len(rows) == 3
    assert all(len(r["strict_sources"]) == 1 and len(r["strict_sinks"]) == 1 for r in rows)
    _, out, _ = run(capsys, "cuts", "conifold_z2", "--json")
    row = next(r for r in json.loads(out)["cuts"] if r["cut"] == ["a1", "a2"])
    assert "2" in row["strict_sources"]


def test_mutate_round_trip(capsys):
    code, out, _ = run(capsys, "mutate", "conifold_z2", "--vertex", "2")
    assert code == 0
    qp = qp_from_dict(json.loads(out))
    assert len(qp.quiver.arrows) == 12 and len(qp.cut) == 4
    assert is_cut(qp, qp.cut) and report(qp)["valid"]


def test_mutate_not_strict_source(capsys):
    code, _, err = run(capsys, "mutate", "conifold_z2", "--vertex", "1")
    assert code == 1
    assert json.loads(err)["error"] == "NotStrictSource"


def test_from_dimer(capsys):
    code, out, _ = run(capsys, "from-dimer", fixtures.fixture_path("square_dimer"), "--matchings")
    d = json.loads(out)
    assert code == 0
    assert len(d["qp"]["vertices"]) == 4 and len(d["perfect_matchings"]) == 8


def test_dilog_table(capsys):
    code, out, _ = run(capsys, "dilog", "--n", "3", "--json")
    rows = json.loads(out)
    assert code == 0
    assert [r["coeff"] for r in rows[:2]] == ["1", "t/(t^2 - 1)"]


def test_dt_and_primes(capsys):
    code, out, _ = run(capsys, "dt", "a2", "--box", "1,1", "--json")
    auto = json.loads(out)["series"]
    code2, out2, _ = run(capsys, "dt", "a2", "--box", "1,1", "--primes", "2,3,5,7", "--json")
    assert code == code2 == 0
    assert json.loads(out2)["series"] == auto


def test_wallcross_deterministic(capsys):
    code, out1, _ = run(capsys, "wallcross", "a2", "--vertex", "1", "--box", "3,3", "--json")
    _, out2, _ = run(capsys, "wallcross", "a2", "--vertex", "1", "--box", "3,3", "--json")
    assert code == 0
    assert out1 == out2
    assert json.loads(out1)["pass"]


def test_factorize(capsys):
    code, out, _ = run(capsys, "factorize", "a2", "--charge=-1+1i,1+1i", "--box", "2,2", "--json")
    rays = [r["ray"] for r in json.loads(out)["rays"]]
    assert code == 0
    # directions of Z in decreasing argument
    assert rays == [[-1, 1], [0, 1], [1, 1]]


def test_budget_exit(capsys):
    code, _, err = run(capsys, "dt", "conifold_z2", "--box", "3,3,3,3", "--budget", "10")
    assert code == 3
    assert "smaller" in json.loads(err)["hint"]


def test_usage_errors(capsys):
    code, _, _ = run(capsys, "dt", "a2")
    assert code == 2
    code, _, _ = run(capsys, "dt", "a2", "--box", "1,1,1")
    assert code == 2
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2


@pytest.mark.skipif(shutil.which("qdt") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["qdt", "dilog", "--n", "1"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.splitlines() == ["0: 1", "1: t/(t^2 - 1)"]
