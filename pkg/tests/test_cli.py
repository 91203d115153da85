import json
import subprocess
import sys

import numpy as np
import pytest

from deltatest.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def window_file(tmp_path):
    rng = np.random.default_rng(5)
    p = tmp_path / "w.csv"
    p.write_text("value\n" + "\n".join(repr(float(v)) for v in rng.normal(size=1000)) + "\n")
    return p


def _batch(tmp_path, shift, k=100, seed=6):
    rng = np.random.default_rng(seed)
    p = tmp_path / f"b{shift}.csv"
    p.write_text("\n".join(repr(float(v)) for v in rng.normal(shift, 1, size=k)) + "\n")
    return p


class TestTestCommand:
    def test_consistent_exit_zero(self, tmp_path, window_file, capsys):
        code, out, _ = run(["test", str(window_file), str(_batch(tmp_path, 0.0)),
                            "--resamples", "2000"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["schema_version"] == 1 and doc["command"] == "test"
        assert doc["results"]["decision"] == "consistent"
        assert doc["input_digests"]["window"].startswith("sha256:")

    def test_inconsistent_exit_two(self, tmp_path, window_file, capsys):
        code, out, _ = run(["test", str(window_file), str(_batch(tmp_path, 1.0)),
                            "--backend", "gaussian_exact"], capsys)
        assert code == 2
        assert json.loads(out)["results"]["decision"] == "inconsistent"

    def test_parse_error_exit_one(self, tmp_path, window_file, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("x\n1\nNaN\n")
        code, _, err = run(["test", str(window_file), str(bad)], capsys)
        assert code == 1
        assert "line 3" in err

    def test_bad_k_exit_one(self, tmp_path, capsys):
        w = tmp_path / "w.csv"
        w.write_text("1\n2\n3\n")
        b = _batch(tmp_path, 0.0, k=5)
        code, _, err = run(["test", str(w), str(b)], capsys)
        assert code == 1 and err

    def test_missing_file_exit_one(self, tmp_path, capsys):
        code, _, _ = run(["test", str(tmp_path / "nope"), str(tmp_path / "nope2")], capsys)
        assert code == 1

    def test_out_file(self, tmp_path, window_file, capsys):
        out = tmp_path / "r.json"
        run(["test", str(window_file), str(_batch(tmp_path, 0.0)), "--backend", "edgeworth",
             "--out", str(out)], capsys)
        assert json.loads(out.read_text())["results"]["backend"] == "edgeworth"


class TestMinK:
    ARGS = ["mink", "--mu0", "0", "--mu1", "0.5", "--sigma1", "1"]

    def test_reference_value(self, capsys):
        code, out, _ = run(self.ARGS, capsys)
        assert code == 0
        assert json.loads(out)["results"]["k"] == 25

    def test_doubling_drift_quarters_k(self, capsys):
        _, out, _ = run(["mink", "--mu0", "0", "--mu1", "1.0", "--sigma1", "1"], capsys)
        k2 = json.loads(out)["results"]["k"]
        assert k2 in (6, 7)   # ceil(25/4) up to integer rounding

    def test_no_drift_errors(self, capsys):
        code, _, err = run(["mink", "--mu0", "1", "--mu1", "1", "--sigma1", "1"], capsys)
        assert code == 1 and err

    def test_with_n(self, capsys):
        code, out, _ = run(self.ARGS + ["--n", "2000"], capsys)
        res = json.loads(out)
        assert code == 0
        assert res["config"]["form"] == "full" and res["config"]["null"] == "gaussian_exact"
        assert res["results"]["k"] >= 25
        assert res["results"]["regime"]["valid"] is not None

    def test_power_command(self, capsys):
        code, out, _ = run(["power", "--k", "25", "--mu0", "0", "--mu1", "0.5", "--sigma1", "1"],
                           capsys)
        assert code == 0
        assert json.loads(out)["results"]["power"] == pytest.approx(0.8038, abs=1e-3)


class TestOtherCommands:
    def test_null_table(self, tmp_path, window_file, capsys):
        plot = tmp_path / "p.csv"
        code, out, _ = run(["null", str(window_file), "--k", "50", "--resamples", "1000",
                            "--plot-csv", str(plot)], capsys)
        assert code == 0
        res = json.loads(out)["results"]
        cdf = np.array(res["cdf"])
        assert np.all(np.diff(cdf) >= 0) and 0 <= cdf[0] and cdf[-1] <= 1
        assert len(res["grid"]) == len(cdf) == 81
        assert plot.read_text().startswith("x,value,series\n")

    def test_gen_csv_and_jsonl(self, tmp_path, capsys):
        c, j = tmp_path / "g.csv", tmp_path / "g.jsonl"
        assert main(["gen", "exponential", "--count", "50", "--seed", "3", "--out", str(c)]) == 0
        assert main(["gen", "exponential", "--count", "50", "--seed", "3", "--format", "jsonl",
                     "--out", str(j)]) == 0
        from deltatest.fileio import ingest
        a, b = ingest(c), ingest(j)
        assert a.size == 50 and np.array_equal(a, b)
        assert c.read_text().startswith("value\n")

    def test_gen_bad_params(self, capsys):
        code, _, _ = run(["gen", "normal", "--count", "5", "--params", '{"sigma": -1}'], capsys)
        assert code == 1

    def test_mc_reproducible(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"kind": "type1", "generator": {"kind": "exponential"},
                                   "n": 150, "k": 15, "replicates": 100, "resample_N": 200,
                                   "master_seed": 11}))
        _, out1, _ = run(["mc", str(cfg)], capsys)
        _, out2, _ = run(["mc", str(cfg), "--workers", "2"], capsys)
        d1, d2 = json.loads(out1), json.loads(out2)
        assert d1["results"] == d2["results"]
        assert d1["seeds"] == d2["seeds"]

    def test_mc_overrides_and_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"kind": "gaussian_bound", "n": 100, "k": 10}))
        code, out, _ = run(["mc", str(cfg), "--k", "20"], capsys)
        assert code == 0 and json.loads(out)["config"]["k"] == 20
        cfg.write_text(json.dumps({"kind": "gaussian_bound", "n": 100, "k": 10, "replicates": 1}))
        code, _, err = run(["mc", str(cfg)], capsys)
        assert code == 1 and "replicates" in err

    def test_module_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "deltatest", "--version"], capture_output=True,
                           text=True)
        assert r.returncode == 0 and "deltatest" in r.stdout
