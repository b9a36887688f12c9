import json

import numpy as np
import pytest

from subdopt import cli, simulate
from subdopt.ingest import IngestError, IngestSpec, ingest


@pytest.fixture
def csv_file(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((120, 3))
    y = 1.0 + x @ np.ones(3) + rng.standard_normal(120)
    path = tmp_path / "data.csv"
    lines = ["a,b,c,resp"]
    for row, yy in zip(x, y):
        lines.append(",".join(f"{v:.8f}" for v in row) + f",{yy:.8f}")
    path.write_text("\n".join(lines) + "\n")
    return path


class TestIngest:
    def test_happy_path(self, csv_file):
        ds = ingest(IngestSpec(str(csv_file), response="resp"))
        assert ds.x.shape == (120, 3)
        assert ds.y.shape == (120,)
        assert ds.columns == ["a", "b", "c"]
        assert ds.n_rejected == 0

    def test_column_subset(self, csv_file):
        ds = ingest(IngestSpec(str(csv_file), response="resp",
                               covariates=["a", "c"]))
        assert ds.x.shape == (120, 2)
        assert ds.columns == ["a", "c"]

    def test_skip_rows_and_log(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("junk\njunk\nu,v\n1.0,10.0\n2.0,100.0\n")
        ds = ingest(IngestSpec(str(path), skip_rows=2, log_columns=["v"]))
        np.testing.assert_allclose(ds.x[:, 1], np.log([10.0, 100.0]))
        assert ds.x.shape == (2, 2)

    def test_non_numeric_cell_names_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("u,v\n1.0,2.0\n1.5,oops\n")
        with pytest.raises(IngestError, match=r"bad\.csv:3.*'oops'.*'v'"):
            ingest(IngestSpec(str(path)))

    def test_missing_column(self, csv_file):
        with pytest.raises(IngestError, match="nope"):
            ingest(IngestSpec(str(csv_file), response="nope"))

    def test_response_overlap(self, csv_file):
        with pytest.raises(IngestError, match="covariate"):
            ingest(IngestSpec(str(csv_file), response="a",
                              covariates=["a", "b"]))

    def test_blank_lines_rejected(self, tmp_path):
        path = tmp_path / "b.csv"
        path.write_text("u,v\n1,2\n\n3,4\n\n")
        ds = ingest(IngestSpec(str(path)))
        assert ds.x.shape == (2, 2)
        assert ds.n_rejected >= 1

    def test_no_header(self, tmp_path):
        path = tmp_path / "nh.csv"
        path.write_text("1,2\n3,4\n")
        ds = ingest(IngestSpec(str(path), header=False))
        assert ds.columns == ["c0", "c1"]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("")
        with pytest.raises(IngestError):
            ingest(IngestSpec(str(path), header=False))

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("u,v\n1,2\n1,2,3\n")
        with pytest.raises(IngestError, match=r"r\.csv:3"):
            ingest(IngestSpec(str(path)))


class TestSelectCommand:
    def test_valg1_select(self, csv_file, tmp_path):
        out = tmp_path / "out"
        rc = cli.main(["select", "--input", str(csv_file),
                       "--response", "resp", "--method", "valg1",
                       "--k", "12", "--K", "6", "--seed", "1",
                       "--out", str(out)])
        assert rc == 0
        idx = np.loadtxt(out / "indices.txt", dtype=int)
        assert idx.size == 12
        report = json.loads((out / "report.json").read_text())
        assert 0 < report["efficiency"]["d_eff"] <= 1
        assert "exchange" in report
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "select"
        assert manifest["input_checksum"]

    def test_iboss_k_equals_n(self, csv_file, tmp_path):
        out = tmp_path / "out"
        rc = cli.main(["select", "--input", str(csv_file),
                       "--response", "resp", "--method", "iboss",
                       "--k", "120", "--out", str(out)])
        assert rc == 0
        idx = np.loadtxt(out / "indices.txt", dtype=int)
        assert sorted(idx) == list(range(120))

    def test_unknown_method_is_usage_error(self, csv_file, tmp_path):
        with pytest.raises(SystemExit) as exc:
            cli.main(["select", "--input", str(csv_file),
                      "--method", "magic", "--k", "5",
                      "--out", str(tmp_path / "o")])
        assert exc.value.code == 2

    def test_ingest_failure_exit_code(self, tmp_path):
        rc = cli.main(["select", "--input", str(tmp_path / "missing.csv"),
                       "--method", "oss", "--k", "5",
                       "--out", str(tmp_path / "o")])
        assert rc != 0

    def test_replay_identical(self, csv_file, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        cli.main(["select", "--input", str(csv_file), "--response", "resp",
                  "--method", "alg1", "--k", "10", "--K", "4",
                  "--seed", "3", "--out", str(out1)])
        rc = cli.replay(out1 / "manifest.json", out2)
        assert rc == 0
        assert (out1 / "report.json").read_bytes() \
            == (out2 / "report.json").read_bytes()
        assert (out1 / "indices.txt").read_bytes() \
            == (out2 / "indices.txt").read_bytes()


class TestSimulateCommand:
    def config(self, tmp_path, **kw):
        cfg = dict(n=200, p=2, k=16, K=4, rho=0.5, repetitions=2,
                   methods=["uniform", "valg1"], rng_seed=9)
        cfg.update(kw)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        return path

    def test_runs_and_reports(self, tmp_path):
        out = tmp_path / "sim"
        rc = cli.main(["simulate", "--config",
                       str(self.config(tmp_path)), "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report["records"]) == 4
        assert set(report["aggregates"]) == {"uniform", "valg1"}
        csv_text = (out / "report.csv").read_text()
        assert csv_text.splitlines()[0].startswith("method,")

    def test_records_have_stable_keys(self, tmp_path):
        out = tmp_path / "sim"
        cli.main(["simulate", "--config", str(self.config(tmp_path)),
                  "--out", str(out)])
        report = json.loads((out / "report.json").read_text())
        for rec in report["records"]:
            for key in ("method", "repetition", "k", "K", "iterations",
                        "seed"):
                assert key in rec

    def test_empty_methods_rejected(self, tmp_path):
        rc = cli.main(["simulate", "--config",
                       str(self.config(tmp_path, methods=[])),
                       "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_INGEST

    def test_unknown_field_named(self, tmp_path, capsys):
        rc = cli.main(["simulate", "--config",
                       str(self.config(tmp_path, bogus=1)),
                       "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_INGEST
        assert "bogus" in capsys.readouterr().err

    def test_outlier_preset(self, tmp_path):
        out = tmp_path / "sim"
        cfg = self.config(tmp_path, outliers={"count": 5,
                                              "mean_shift": [5.0, 0.0]})
        rc = cli.main(["simulate", "--config", str(cfg),
                       "--out", str(out)])
        assert rc == 0

    def test_replay_identical(self, tmp_path):
        out1, out2 = tmp_path / "s1", tmp_path / "s2"
        cli.main(["simulate", "--config", str(self.config(tmp_path)),
                  "--out", str(out1)])
        rc = cli.replay(out1 / "manifest.json", out2)
        assert rc == 0
        assert (out1 / "report.json").read_bytes() \
            == (out2 / "report.json").read_bytes()
        assert (out1 / "report.csv").read_bytes() \
            == (out2 / "report.csv").read_bytes()


class TestBootstrapCommand:
    def test_runs(self, csv_file, tmp_path):
        cfg = tmp_path / "boot.json"
        cfg.write_text(json.dumps({
            "input": {"path": str(csv_file), "response": "resp"},
            "B": 3, "method": "oss", "k": 18, "K": 4, "rng_seed": 1}))
        out = tmp_path / "boot"
        rc = cli.main(["bootstrap", "--config", str(cfg),
                       "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report["records"]) == 3

    def test_replay_identical(self, csv_file, tmp_path):
        cfg = tmp_path / "boot.json"
        cfg.write_text(json.dumps({
            "input": {"path": str(csv_file), "response": "resp"},
            "B": 2, "method": "iboss", "k": 12, "K": 4}))
        out1, out2 = tmp_path / "b1", tmp_path / "b2"
        cli.main(["bootstrap", "--config", str(cfg), "--out", str(out1)])
        rc = cli.replay(out1 / "manifest.json", out2)
        assert rc == 0
        assert (out1 / "report.json").read_bytes() \
            == (out2 / "report.json").read_bytes()


class TestTimingCommand:
    def test_runs_and_replay(self, tmp_path):
        cfg = tmp_path / "t.json"
        cfg.write_text(json.dumps({
            "ks": [8], "Ks": [4], "iteration_counts": [1, 2],
            "n": 120, "p": 2, "repetitions": 2, "rng_seed": 0}))
        out1, out2 = tmp_path / "t1", tmp_path / "t2"
        rc = cli.main(["timing", "--config", str(cfg), "--out", str(out1)])
        assert rc == 0
        report = json.loads((out1 / "report.json").read_text())
        assert len(report["cells"]) == 2
        manifest = json.loads((out1 / "manifest.json").read_text())
        assert all("mean_seconds" in c for c in manifest["timings"]["cells"])
        rc = cli.replay(out1 / "manifest.json", out2)
        assert rc == 0
        assert (out1 / "report.json").read_bytes() \
            == (out2 / "report.json").read_bytes()


class TestHullCommand:
    def test_pairs_and_containment(self, csv_file, tmp_path):
        sel_out = tmp_path / "sel"
        cli.main(["select", "--input", str(csv_file), "--response", "resp",
                  "--method", "oss", "--k", "10", "--out", str(sel_out)])
        out = tmp_path / "hull"
        rc = cli.main(["hull", "--input", str(csv_file),
                       "--response", "resp",
                       "--selection", str(sel_out / "indices.txt"),
                       "--pairs", "a,b", "0,2", "--svg",
                       "--out", str(out)])
        assert rc == 0
        hulls = json.loads((out / "hulls.json").read_text())
        assert len(hulls["pairs"]) == 2
        for pair in hulls["pairs"]:
            assert pair["subdata_area"] <= pair["full_area"] + 1e-12
        svgs = list(out.glob("*.svg"))
        assert len(svgs) == 2
        assert svgs[0].read_text().startswith("<svg")

    def test_identity_selection_ratio_one(self, csv_file, tmp_path):
        sel = tmp_path / "all.txt"
        sel.write_text("".join(f"{i}\n" for i in range(120)))
        out = tmp_path / "hull"
        rc = cli.main(["hull", "--input", str(csv_file),
                       "--response", "resp", "--selection", str(sel),
                       "--pairs", "a,b", "--out", str(out)])
        assert rc == 0
        hulls = json.loads((out / "hulls.json").read_text())
        assert hulls["pairs"][0]["area_ratio"] == pytest.approx(1.0)

    def test_bad_pair(self, csv_file, tmp_path):
        sel = tmp_path / "s.txt"
        sel.write_text("0\n1\n2\n")
        rc = cli.main(["hull", "--input", str(csv_file),
                       "--response", "resp", "--selection", str(sel),
                       "--pairs", "a,zzz", "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_INGEST
