import json
import subprocess
import sys

import pytest

from orbitfix.cli import main, run
from orbitfix.formats import dumps


def _cli(argv):
    code, report = run([str(a) for a in argv])
    return code, json.loads(dumps(report))


@pytest.fixture
def files(tmp_path):
    def gen(kind, name, *extra):
        out = tmp_path / f"{name}.json"
        code, _ = _cli(["gen", kind, "-o", out, *extra])
        assert code == 0
        return out, tmp_path / f"{name}.maps.json"
    return gen


def test_check_ns_on_path3(files):
    inst, _ = files("path", "path3", "--n", 3)
    code, rep = _cli(["check", "--property", "ns", inst])
    assert code == 1
    ce = rep["result"]["report"]["counterexample"]
    assert ce["set"] == [0, 1] and ce["delta"] == "1"


def test_solve_contraction(files, tmp_path):
    inst, maps = files("contraction", "box13", "--k", 1)
    trace = tmp_path / "cert.json"
    code, rep = _cli(["solve", "--method", "ns", "--eps", "1/1000", "--trace", trace, inst, maps])
    assert code == 0
    out = rep["result"]["certificate"]["outcome"]
    assert out["kind"] == "epsilon_fixed_point" and out["point"] == ["0"]
    assert rep["result"]["verified"] is True
    code, rep = _cli(["verify", inst, maps, trace])
    assert code == 0 and rep["result"]["valid"] is True


def test_validate_triangle_violation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"type": "finite", "labels": ["a", "b", "c"],
                               "dist": [["0", "1", "5"], ["1", "0", "1"], ["5", "1", "0"]]}))
    code, rep = _cli(["validate", bad])
    assert code == 2
    assert rep["result"]["kind"] == "triangle" and rep["result"]["triple"] == [0, 1, 2]


def test_input_errors(tmp_path):
    code, rep = _cli(["validate", tmp_path / "missing.json"])
    assert code == 2 and rep["result"]["error"] == "missing_file"
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    code, rep = _cli(["validate", broken])
    assert code == 2 and rep["result"]["error"] == "bad_json"
    odd = tmp_path / "odd.json"
    odd.write_text(json.dumps({"type": "box", "dim": 1, "lo": ["0"], "hi": ["x"]}))
    code, rep = _cli(["validate", odd])
    assert code == 2 and rep["result"]["path"] == "hi[0]"
    assert main(["check", "--property", "bogus", str(odd)]) == 2
    assert main(["no-such-command"]) == 2


def test_cap_exceeded(files):
    inst, _ = files("random", "r8", "--n", 8, "--seed", 3)
    code, rep = _cli(["admissible", "--cap", 2, inst])
    assert code == 3 and rep["result"]["error"] == "cap"


def test_budget_exit(files):
    inst, maps = files("contraction", "slow", "--k", 2, "--ratio", "9/10")
    code, rep = _cli(["solve", "--budget", 3, "--method", "pq", "--p", "3/4", "--q", "3/4",
                      inst, maps])
    assert code == 3
    assert rep["result"]["certificate"]["outcome"]["reason"] == "budget"


def test_check_properties(files):
    inst, maps = files("path", "p3")
    assert _cli(["check", "--property", "uns", inst])[0] == 1
    assert _cli(["check", "--property", "urns=3/4", inst])[0] == 1
    assert _cli(["check", "--property", "pq-urns=1/2,1/2", inst])[0] == 1
    assert _cli(["check", "--property", "olr=0,1,2", inst])[0] == 0
    code, rep = _cli(["check", "--property", "olr=0,2", inst])
    assert code == 1 and rep["result"]["report"]["counterexample"]["set"] == [1]
    box, _ = files("contraction", "cube", "--k", 2)
    assert _cli(["check", "--property", "ns", "--samples", 20, box])[0] == 0
    assert _cli(["check", "--property", "pq-urns=1/4,3/4", "--samples", 5, box])[0] == 1


def test_map_checks(files):
    inst, maps = files("rotation3", "rot")
    for prop in ("orbit", "interlaced", "group", "commuting"):
        assert _cli(["map-check", "--property", prop, inst, maps])[0] == 0, prop
    code, rep = _cli(["map-check", "--property", "classify", "--mean", "1/2,1/2", inst, maps])
    assert code == 0
    code, rep = _cli(["solve", inst, maps])
    assert code == 1
    assert rep["result"]["certificate"]["outcome"]["reason"] == "ns_violation"
    ex, exmaps = files("example32", "ex", "--K", 2)
    code, rep = _cli(["map-check", "--property", "classify", ex, exmaps])
    flags = rep["result"]["classification"][0]["flags"]
    assert flags["orbit_nonexpansive"] is True and flags["nonexpansive"] is False
    box, boxmaps = files("interval_pair", "pair")
    assert _cli(["falsify", "--samples", 30, box, boxmaps])[0] == 0


def test_verify_rejects_tampering(files, tmp_path):
    inst, maps = files("contraction", "c2", "--k", 2, "--ratio", "9/10")
    trace = tmp_path / "c2.cert.json"
    code, _ = _cli(["solve", "--method", "pq", "--p", "3/4", "--q", "3/4", "--trace", trace,
                    inst, maps])
    assert code == 0
    doc = json.loads(trace.read_text())
    doc["trace"][1]["delta"] = "1/3"
    trace.write_text(json.dumps(doc))
    code, rep = _cli(["verify", inst, maps, trace])
    assert code == 1 and rep["result"]["valid"] is False


def test_gen_round_trip_is_bit_exact(files, tmp_path):
    inst, maps = files("example32", "e32", "--K", 3)
    code, rep = _cli(["validate", inst])
    assert code == 0
    first = inst.read_bytes(), maps.read_bytes()
    again = tmp_path / "again.json"
    _cli(["gen", "example32", "--K", 3, "-o", again])
    assert (again.read_bytes(), (tmp_path / "again.maps.json").read_bytes()) == first


def test_reports_are_deterministic(files, tmp_path):
    inst, maps = files("tropical", "trop", "--k", 2, "--seed", 5)
    outs = []
    report = tmp_path / "report.json"
    for _ in range(2):
        main(["falsify", "--seed", "7", "--samples", "40", "--report", str(report),
              str(inst), str(maps)])
        outs.append(report.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(files):
    inst, _ = files("path", "entry")
    proc = subprocess.run([sys.executable, "-m", "orbitfix", "check", "--property", "ns",
                           str(inst)], capture_output=True, text=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["result"]["report"]["holds"] is False
