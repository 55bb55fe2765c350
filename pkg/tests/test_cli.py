import csv
import io
import json
import os
import subprocess
import sys

import pytest

from arithdeg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestOrbit:
    def test_f4_heights_grow(self, capsys):
        code, out = run(capsys, "orbit", "--map", "builtin:f4", "--point", "1:1:1:1:1", "--nmax", "12")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out), skipinitialspace=True))
        h = [float(r["height_nats"]) for r in rows]
        assert len(h) == 13
        assert all(y > x for x, y in zip(h[5:], h[6:]))
        ratios = [h[k + 1] / h[k] for k in range(8, 12)]
        assert all(1.2 < r < 1.5 for r in ratios)

    def test_fiber_orbit_json(self, capsys):
        code, out = run(capsys, "orbit", "--map", "builtin:fiber", "--param", "a=1", "--param", "b=1",
                        "--point", "1:1:1", "--nmax", "3", "--format", "json")
        data = json.loads(out)
        assert code == 0
        assert data["config"]["command"] == "orbit"
        assert data["result"]["points"] == ["[1:1:1]", "[2:2:1]", "[3:2:1]", "[9:5:3]"]

    def test_indeterminate_start(self, capsys):
        code, out = run(capsys, "orbit", "--map", "builtin:fiber", "--param", "a=1", "--param", "b=1",
                        "--point", "0:0:1", "--format", "json")
        assert code == 0
        assert json.loads(out)["result"]["stop_reason"].startswith("hit_indeterminacy")

    def test_resource_limit(self, capsys):
        code, _ = run(capsys, "orbit", "--point", "1:1:1:1:1", "--nmax", "40", "--max-height-bits", "32")
        assert code == 2


class TestInputErrors:
    @pytest.mark.parametrize("argv", [
        ["orbit", "--point", "1:1:1"],
        ["orbit", "--point", "1:x:1:1:1"],
        ["orbit", "--map", "builtin:nope", "--point", "1:1:1"],
        ["degseq", "--K", "0"],
        ["certify", "--solution", "/nonexistent.json"],
        ["bogus"],
    ])
    def test_exit_1(self, capsys, argv):
        with pytest.raises(SystemExit) as exc:
            sys.exit(main(argv))
        assert exc.value.code == 1


class TestTables:
    def test_degseq(self, capsys):
        code, out = run(capsys, "degseq", "--map", "builtin:f4", "--K", "6")
        rows = list(csv.DictReader(io.StringIO(out), skipinitialspace=True))
        assert code == 0
        assert [int(r["degree"]) for r in rows] == [2, 3, 5, 7, 10, 14]

    def test_degseq_limit(self, capsys):
        code, _ = run(capsys, "degseq", "--map", "builtin:fiber", "--K", "12", "--max-ops", "1000")
        assert code == 2

    def test_delta(self, capsys):
        code, out = run(capsys, "delta", "--from", "10", "--to", "60", "--eps", "1e-8")
        rows = list(csv.DictReader(io.StringIO(out), skipinitialspace=True))
        assert code == 0 and len(rows) == 51
        his = [float(r["hi"]) for r in rows]
        los = [float(r["lo"]) for r in rows]
        assert all(h < l for h, l in zip(his, los[1:]))
        assert his[-1] < 1.32471795

    def test_delta_jobs_identical(self, capsys):
        _, one = run(capsys, "delta", "--from", "10", "--to", "20")
        _, two = run(capsys, "delta", "--from", "10", "--to", "20", "--jobs", "2")
        assert one == two

    def test_picard(self, capsys):
        code, out = run(capsys, "picard", "--n", "10")
        res = json.loads(out)["result"]
        assert code == 0
        assert res["divisible_by_noncyclotomic_factor"] and res["radius_matches_delta"]

    def test_alpha(self, capsys):
        code, out = run(capsys, "alpha", "--point", "2:3:5:7:11", "--nmax", "12")
        assert code == 0
        res = json.loads(out)["result"]
        assert res["window"] == 5 and 1 < res["ratio_window_min"] <= res["ratio_window_max"]


class TestRemark:
    def test_verify(self, capsys):
        code, out = run(capsys, "verify-remark", "--trials", "100", "--seed", "7")
        res = json.loads(out)["result"]
        assert code == 0
        assert res["hyperplane_preserved"] == res["matches_f4"] == 100


class TestCertify:
    def test_round_trip(self, capsys, tmp_path, report10):
        path = tmp_path / "sol.json"
        path.write_text(json.dumps({"config": {}, "result": [report10.to_json()]}))
        code, out = run(capsys, "certify", "--solution", str(path), "--samples", "50")
        res = json.loads(out)["result"]
        assert code == 0
        assert res["certificate"]["status"] == "certified"
        assert res["basin"]["passed"]

    def test_bad_solution_file(self, capsys, tmp_path):
        path = tmp_path / "sol.json"
        path.write_text(json.dumps({"n": 10}))
        assert main(["certify", "--solution", str(path)]) == 1


def test_console_script_deterministic(tmp_path):
    outs = []
    for i in range(2):
        target = tmp_path / f"o{i}.json"
        subprocess.run([sys.executable, "-m", "arithdeg", "orbit", "--point", "1:1:1:1:1", "--nmax", "10",
                        "--format", "json", "--seed", "3", "--out", str(target)], check=True)
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_precision_env(tmp_path):
    env_out = subprocess.run([sys.executable, "-m", "arithdeg", "alpha", "--point", "1:2:3:4:5", "--nmax", "8"],
                             capture_output=True, text=True, env={**os.environ, "ARITHDEG_PREC": "64"}, check=True)
    assert json.loads(env_out.stdout)["config"]["precision_bits"] == 64
