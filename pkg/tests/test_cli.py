import json
import os

import numpy as np
import pytest
from jsonschema import validate

from depcens import ParseError
from depcens.cli import main, parse_csv, write_csv
from depcens.simulate import Scenario, generate_dataset, scenario_true_model

SCHEMA = json.load(open(os.path.join(os.path.dirname(__file__), "..", "docs", "result_schema.json")))


@pytest.fixture(scope="module")
def csv_path(tmp_path_factory):
    data, _ = generate_dataset(scenario_true_model(Scenario.S1_H1), 150,
                               np.random.default_rng(12))
    path = tmp_path_factory.mktemp("data") / "s1.csv"
    write_csv(data, str(path))
    return str(path)


class TestParseCsv:
    def test_well_formed(self, tmp_path):
        path = tmp_path / "ok.csv"
        path.write_text("z,delta,xi,x1,x2,w1,w2\n1.0,1,0,0.5,1.0,0.5,1.0\n"
                        "2.0,0,1,0.1,0.2,0.1,0.2\n3.0,0,0,0.0,1.0,0.0,1.0\n")
        data = parse_csv(str(path))
        assert data.n == 3 and data.p == 2 and data.q == 2

    def test_indicator_sum_error_names_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z,delta,xi,x1,w1\n1.0,1,1,0.5,0.5\n")
        with pytest.raises(ParseError, match="row 2.*delta\\+xi"):
            parse_csv(str(path))

    def test_non_numeric_cell_names_column(self, tmp_path):
        path = tmp_path / "bad2.csv"
        path.write_text("z,delta,xi,x1,w1\n1.0,1,0,oops,0.5\n")
        with pytest.raises(ParseError, match="row 2: column x1"):
            parse_csv(str(path))

    def test_nonbinary_indicator(self, tmp_path):
        path = tmp_path / "bad3.csv"
        path.write_text("z,delta,xi,x1,w1\n1.0,2,0,0.4,0.5\n")
        with pytest.raises(ParseError, match="delta"):
            parse_csv(str(path))

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad4.csv"
        path.write_text("z,delta,x1,w1\n1.0,1,0.4,0.5\n")
        with pytest.raises(ParseError, match="header"):
            parse_csv(str(path))

    def test_roundtrip(self, csv_path, tmp_path):
        data = parse_csv(csv_path)
        again = tmp_path / "again.csv"
        write_csv(data, str(again))
        data2 = parse_csv(str(again))
        assert np.array_equal(data.z, data2.z)
        assert np.array_equal(data.x, data2.x)
        assert open(csv_path).read() == open(again).read()


class TestFitCommand:
    def test_exit_code_and_schema(self, csv_path, tmp_path):
        out = tmp_path / "fit.json"
        rc = main(["fit", "--input", csv_path, "--output", str(out),
                   "--b", "4", "--seed", "9", "--threads", "2"])
        assert rc == 0
        payload = json.load(open(out))
        validate(payload, SCHEMA)
        assert payload["command"] == "fit"
        assert payload["converged"] is True
        assert set(payload["params_hat"]) == {
            "beta1", "beta2", "eta1", "eta2", "lambda_t", "lambda_c", "r", "tau"}
        assert payload["bootstrap"]["replicates_requested"] == 4

    def test_invalid_input_exit_one(self, tmp_path):
        missing = tmp_path / "nope.csv"
        rc = main(["fit", "--input", str(missing), "--output", str(tmp_path / "o.json")])
        assert rc == 1


class TestGofCommand:
    def test_payload_and_curve(self, csv_path, tmp_path):
        out = tmp_path / "gof.json"
        curve = tmp_path / "curve.csv"
        rc = main(["gof", "--input", csv_path, "--output", str(out), "--b", "5",
                   "--seed", "9", "--threads", "2", "--curve-csv", str(curve)])
        assert rc == 0
        payload = json.load(open(out))
        validate(payload, SCHEMA)
        gof = payload["gof"]
        assert 0.0 <= gof["p_value"] <= 1.0
        assert len(gof["replicates"]) == 5 - gof["replicates_dropped"]
        lines = open(curve).read().splitlines()
        assert lines[0] == "v,km,model"
        assert len(lines) == 151


class TestSimulateCommand:
    def test_fit_mode(self, tmp_path):
        out = tmp_path / "sim.json"
        rc = main(["simulate", "--scenario", "s1_h1", "--n", "120", "--runs", "2",
                   "--b", "0", "--seed", "2", "--threads", "2", "--output", str(out),
                   "--output-csv", str(tmp_path / "sim.csv")])
        assert rc == 0
        payload = json.load(open(out))
        validate(payload, SCHEMA)
        assert payload["mode"] == "fit"
        assert len(payload["table"]) == 8
        header = open(tmp_path / "sim.csv").read().splitlines()[0]
        assert header == "parameter,true,bias,sd,rmse,cp"


class TestBenchmarkCommand:
    def test_runs_and_reports(self, tmp_path, capsys):
        out = tmp_path / "bench.json"
        rc = main(["benchmark", "--n", "120", "--repeats", "3", "--output", str(out)])
        assert rc == 0
        text = capsys.readouterr().out
        assert "active backend" in text
        payload = json.load(open(out))
        validate(payload, SCHEMA)
        assert {row["backend"] for row in payload["fit"]} >= {"numpy"}


class TestDeterminism:
    def test_byte_identical_reruns(self, csv_path, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        for out in (a, b):
            rc = main(["fit", "--input", csv_path, "--output", str(out),
                       "--b", "3", "--seed", "4", "--threads", "1"])
            assert rc == 0
        assert a.read_bytes() == b.read_bytes()

    def test_env_threads_override(self, monkeypatch):
        from depcens.cli import _threads

        class Args:
            threads = None

        monkeypatch.setenv("DEPCENS_THREADS", "3")
        assert _threads(Args()) == 3
        Args.threads = 2
        assert _threads(Args()) == 2
