import json
import subprocess
import sys

import pytest

from pdprism.cli import main


@pytest.fixture
def write_diagram(tmp_path):
    def _write(name, points):
        path = tmp_path / name
        path.write_text(json.dumps({"points": points}), encoding="utf-8")
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def test_dist_identical(capsys, write_diagram):
    a = write_diagram("a.json", [[0, 2, 1], [1, 5, 2]])
    code, out, _ = run(capsys, "dist", a, a)
    assert code == 0 and out["wasserstein_rho"] == 0 and out["wasserstein_q"] == 0


def test_dist_example(capsys, write_diagram):
    a = write_diagram("a.json", [[0, 4, 1]])
    b = write_diagram("b.json", [[1, 4, 1]])
    code, out, _ = run(capsys, "dist", a, b, "--q", "1", "--convention", "nearest")
    assert code == 0 and out["wasserstein_rho"] == 1
    assert out["witness"] == [[[0.0, 4.0, 1], [1.0, 4.0, 1]]]


def test_dist_q2_reports_root(capsys, write_diagram):
    a = write_diagram("a.json", [[0, 2, 1]])
    b = write_diagram("b.json", [])
    _, out, _ = run(capsys, "dist", a, b, "--q", "2", "--convention", "projection")
    assert out["wasserstein_rho"] == 4 and out["wasserstein_q"] == 2


def test_methods_agree(capsys, write_diagram):
    a = write_diagram("a.json", [[0, 4, 2], [3, 9, 1]])
    b = write_diagram("b.json", [[1, 4, 1], [2.5, 8, 1], [6, 7, 1]])
    for q in ("0.5", "1", "2"):
        _, exact, _ = run(capsys, "dist", a, b, "--q", q)
        _, brute, _ = run(capsys, "dist", a, b, "--q", q, "--method", "bruteforce")
        assert exact["wasserstein_rho"] == pytest.approx(brute["wasserstein_rho"], abs=1e-9)
        _, exact, _ = run(capsys, "bottleneck", a, b)
        _, brute, _ = run(capsys, "bottleneck", a, b, "--method", "bruteforce")
        assert exact["bottleneck"] == pytest.approx(brute["bottleneck"], abs=1e-9)


def test_bottleneck(capsys, write_diagram):
    a = write_diagram("a.json", [[0, 4, 1]])
    b = write_diagram("b.json", [[1, 4, 1]])
    code, out, _ = run(capsys, "bottleneck", a, b)
    assert code == 0 and out["bottleneck"] == 1


@pytest.mark.parametrize("points, needle", [
    ([[1, 1, 1]], "diagonal"),
    ([[0, 2, 0]], "non-positive multiplicity"),
    ([[0, 2]], "malformed"),
])
def test_malformed_input_exit_2(capsys, write_diagram, points, needle):
    bad = write_diagram("bad.json", points)
    good = write_diagram("good.json", [])
    code, out, err = run(capsys, "dist", good, bad)
    assert code == 2 and out is None
    assert "bad.json" in err and needle in err


def test_invalid_json_and_missing_file(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, "dist", str(broken), str(broken))
    assert code == 2 and "broken.json" in err
    code, _, err = run(capsys, "dist", str(tmp_path / "nope.json"), str(broken))
    assert code == 2 and "nope.json" in err


def test_bruteforce_cap_exit_2(capsys, write_diagram):
    a = write_diagram("a.json", [[0, 2, 7]])
    code, _, err = run(capsys, "dist", a, a, "--method", "bruteforce")
    assert code == 2 and "capped" in err


def test_prism(capsys, write_diagram):
    f1 = write_diagram("f1.json", [])
    f2 = write_diagram("f2.json", [[0, 2, 1]])
    code, out, _ = run(capsys, "prism", "--k", "1", f1, f2)
    assert code == 0 and out["report"]["pass"]
    p = out["p"]
    assert p[1] - p[0] == 2
    assert out["images"][0] == {"points": [p + [1]]}


def test_gen_cube(capsys, write_diagram):
    base = write_diagram("base.json", [[0, 2, 1]])
    code, out, _ = run(capsys, "gen-cube", "--n", "3", "--k", "2", "--base", base)
    assert code == 0 and out["report"]["pass"]
    assert sorted(out["vertices"]) == ["000", "001", "010", "011", "100", "101", "110", "111"]
    assert out["vertices"]["000"] == {"points": [[0.0, 2.0, 1]]}


def test_gen_geodesic(capsys):
    code, out, _ = run(capsys, "gen-geodesic", "--n", "4", "--k", "1.5", "--q", "0.5")
    assert code == 0 and out["report"]["pass"] and len(out["diagrams"]) == 5


def test_embed_ck(capsys):
    code, out, _ = run(capsys, "embed-ck", "--N", "3", "--k", "1")
    assert code == 0 and out["report"]["pass"]
    assert len(out["diagrams"]) == 14


def test_cap_on_cube(capsys):
    code, _, err = run(capsys, "gen-cube", "--n", "9", "--k", "1")
    assert code == 2 and "cap" in err


def test_bad_flag_values_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen-cube", "--n", "2", "--k", "-1"])
    assert exc.value.code == 2


@pytest.mark.parametrize("suite", ["oracle", "prism", "geodesic", "cube", "ck"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite, "--seed", "7")
    assert code == 0 and out["pass"] and out["seed"] == 7


def test_verify_metric_axioms_reports_quasi_metric_root(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "metric-axioms", "--seed", "7")
    checks = {c["check"]: c for c in out["checks"]}
    failing = {name for name, c in checks.items() if not c["pass"]}
    assert failing == {"triangle W^q, q=0.5"}
    assert code == 1


def test_deterministic_output(tmp_path, write_diagram):
    a = write_diagram("a.json", [[0, 4, 2], [3, 9, 1]])
    b = write_diagram("b.json", [[1, 4, 1], [2.5, 8, 1]])
    outs = []
    for name in ("one.json", "two.json"):
        target = tmp_path / name
        assert main(["dist", a, b, "--q", "2", "--output", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    outs = []
    for name in ("s1.json", "s2.json"):
        target = tmp_path / name
        main(["verify", "--suite", "prism", "--seed", "3", "-o", str(target)])
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(write_diagram):
    a = write_diagram("a.json", [[0, 4, 1]])
    b = write_diagram("b.json", [[1, 4, 1]])
    proc = subprocess.run([sys.executable, "-m", "pdprism", "dist", a, b],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["wasserstein_rho"] == 1
