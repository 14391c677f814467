import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hardybound.bounds import iid_bound
from hardybound.cli import main, parse_thresholds
from hardybound.distributions import Exponential
from hardybound.monotone import MonotoneCurve

BERN = '{"kind": "bernoulli", "p": "1/2"}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class TestBound:
    def test_iid_rows(self, capsys):
        code, out, _ = run(capsys, "bound", "--dist", "exp", "--thresholds", "0.5,2", "--n", "3", "--q", "2")
        assert code == 0
        data = rows(out)
        assert set(data[0]) == {"curve", "t", "survival_lo", "survival_hi"}
        got = {(r["curve"], float(r["t"])): float(r["survival_hi"]) for r in data}
        assert got[("iid_bound", 2.0)] == pytest.approx(math.exp(-1), rel=1e-15)
        assert got[("iid_bound", 0.5)] == 1.0
        assert got[("naive_union_n3", 2.0)] == pytest.approx(3 * math.exp(-2), rel=1e-15)
        assert ("incr_mean", 2.0) in got and ("survival", 2.0) in got

    def test_theorem1_for_several_marginals(self, capsys):
        code, out, _ = run(capsys, "bound", "--dist", "exp", "--dist", "exp", "--thresholds", "4")
        assert code == 0
        (r,) = rows(out)
        assert r["curve"] == "theorem1_bound"
        assert float(r["survival_hi"]) == pytest.approx(math.exp(-1), rel=1e-14)

    def test_json_curve_round_trip(self, capsys):
        code, out, _ = run(capsys, "bound", "--dist", "exp", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert MonotoneCurve.from_json(doc["curves"]["iid_bound"]) == iid_bound(Exponential()).bound

    def test_skipped_corollary_is_noted(self, capsys):
        # the survival of a coin is not positive everywhere
        code, out, _ = run(capsys, "bound", "--dist", BERN, "--q", "2", "--format", "json")
        assert code == 0
        assert json.loads(out)["notes"]


class TestErrors:
    def test_unknown_distribution(self, capsys):
        code, out, err = run(capsys, "bound", "--dist", "nonsense")
        assert code == 2 and out == ""
        doc = json.loads(err)
        assert doc["error"] == "ArgumentError" and "nonsense" in doc["message"]

    def test_missing_distribution(self, capsys):
        code, _, err = run(capsys, "bound")
        assert code == 2 and "dist" in json.loads(err)["message"]

    def test_bad_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"dist": "exp", "colour": 1}))
        code, _, err = run(capsys, "bound", "--config", str(cfg))
        assert code == 2 and "colour" in json.loads(err)["message"]

    def test_threshold_parsing(self):
        assert parse_thresholds("0:1:3") == [0.0, 0.5, 1.0]
        assert parse_thresholds("1, 2") == [1.0, 2.0]
        with pytest.raises(Exception):
            parse_thresholds("1:2")
        with pytest.raises(Exception):
            parse_thresholds("inf")


class TestConfig:
    def test_config_matches_flags(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"dist": ["exp"], "thresholds": "1:3:5", "n": 2}))
        _, from_cfg, _ = run(capsys, "bound", "--config", str(cfg))
        _, from_flags, _ = run(capsys, "bound", "--dist", "exp", "--thresholds", "1:3:5", "--n", "2")
        assert from_cfg == from_flags

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"dist": "exp", "thresholds": "1"}))
        _, out, _ = run(capsys, "bound", "--config", str(cfg), "--thresholds", "3")
        assert {float(r["t"]) for r in rows(out)} == {3.0}

    def test_distribution_file(self, capsys, tmp_path):
        f = tmp_path / "d.json"
        f.write_text(BERN)
        _, a, _ = run(capsys, "bound", "--dist", str(f), "--thresholds", "0.6")
        _, b, _ = run(capsys, "bound", "--dist", BERN, "--thresholds", "0.6")
        assert a == b


class TestWorstcase:
    ARGS = ["worstcase", "--dist", "exp", "--p", "0.5", "--n", "20,200", "--reps", "3000",
            "--thresholds", "0.2,1.0,2.5", "--seed", "7"]

    def test_output(self, capsys):
        code, out, _ = run(capsys, *self.ARGS)
        assert code == 0
        assert out.startswith("# seed=7 reps=3000 p=0.5")
        data = rows(out)
        assert len(data) == 6
        assert set(data[0]) == {"n", "t", "empirical_survival", "half_width", "limit_value", "flag"}

    def test_byte_identical_across_runs_and_workers(self, capsys, tmp_path):
        outs = []
        for w in ("1", "1", "4"):
            path = tmp_path / f"w{w}_{len(outs)}.csv"
            assert main(self.ARGS + ["--workers", w, "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_seed_changes_output(self, capsys):
        _, a, _ = run(capsys, *self.ARGS)
        _, b, _ = run(capsys, *(self.ARGS[:-1] + ["8"]))
        assert a != b


class TestOtherCommands:
    def test_oracle(self, capsys):
        code, out, _ = run(capsys, "oracle", "--dist", BERN, "--dist", BERN, "--thresholds", "1,2")
        assert code == 0
        data = {float(r["t"]): r for r in rows(out)}
        assert float(data[2.0]["oracle_max"]) == 0.5
        assert float(data[1.0]["oracle_max"]) == 1.0
        assert all(float(r["slack"]) >= 0 for r in data.values())

    def test_oracle_needs_discrete(self, capsys):
        code, _, err = run(capsys, "oracle", "--dist", "exp", "--dist", BERN)
        assert code == 2

    def test_moments(self, capsys):
        code, out, _ = run(capsys, "moments", "--dist", BERN, "--q", "2")
        (r,) = rows(out)
        assert float(r["lhs"]) == pytest.approx(0.75, rel=1e-12)
        assert float(r["rhs"]) == pytest.approx(2.0, rel=1e-12)
        assert float(r["jensen_rhs"]) == 0.5

    def test_selfcheck(self, capsys):
        code, out, _ = run(capsys, "selfcheck")
        assert code == 0
        assert "FAIL" not in out and "backend:" in out


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "hardybound.cli", "bound", "--dist", "exp", "--thresholds", "2"],
        capture_output=True, text=True, check=True,
    )
    assert "iid_bound,2,0.36787944117144233" in out.stdout
