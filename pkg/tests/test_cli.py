import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from mevmix import make_logistic, model_cdf
from mevmix.cli import (
    EXIT_DOMAIN,
    EXIT_INVALID_MODEL,
    EXIT_IO,
    EXIT_SPEC,
    EXIT_USAGE,
    main,
)


@pytest.fixture
def spec(tmp_path):
    def write(doc, name="model.json"):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)

    return write


@pytest.fixture
def logistic2(spec):
    return spec({"preset": "logistic", "d": 2, "alpha": 0.5})


def error_of(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


class TestValidate:
    def test_valid(self, logistic2, capsys):
        assert main(["validate", "--model", logistic2]) == 0
        assert json.loads(capsys.readouterr().out) == {"valid": True, "d": 2, "q": 1}

    def test_beta_column_violation_names_coordinate(self, spec, capsys):
        path = spec({"preset": "asymmetric_logistic", "alphas": [0.5, 0.5],
                     "betas": [[0.5, 0.6], [0.5, 0.3]]})
        assert main(["validate", "--model", path]) == EXIT_INVALID_MODEL
        err = error_of(capsys)
        assert err["error"] == "ModelValidationError" and err["exit_code"] == EXIT_INVALID_MODEL
        assert any("coordinate 2" in v for v in err["violations"])
        assert not any("coordinate 1 " in v for v in err["violations"])

    def test_m4_column_violation(self, spec, capsys):
        path = spec({"preset": "generalized_archimedean", "d": 2, "alpha": 0.5,
                     "copula": {"kind": "m4", "a": [[[0.6, 0.2], [0.3, 0.8]]]}})
        assert main(["validate", "--model", path]) == EXIT_INVALID_MODEL
        assert "m4 column 1" in error_of(capsys)["message"]

    def test_malformed_json(self, spec, capsys):
        assert main(["validate", "--model", spec("{oops")]) == EXIT_SPEC
        assert error_of(capsys)["error"] == "SpecError"

    def test_missing_file(self, tmp_path, capsys):
        assert main(["validate", "--model", str(tmp_path / "absent.json")]) == EXIT_IO
        assert error_of(capsys)["exit_code"] == EXIT_IO


class TestUsage:
    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["validate"], ["sample", "--n", "x"]])
    def test_usage_errors(self, argv, capsys):
        assert main(argv) == EXIT_USAGE
        err = error_of(capsys)
        assert err["error"] == "UsageError" and err["message"]

    def test_sample_requires_seed(self, logistic2, capsys):
        assert main(["sample", "--model", logistic2, "--n", "10"]) == EXIT_USAGE

    def test_bad_threads(self, logistic2, capsys):
        assert main(["validate", "--model", logistic2, "--threads", "0"]) == EXIT_USAGE


class TestEval:
    def test_default_grid(self, logistic2, capsys):
        assert main(["eval", "--model", logistic2]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert len(rows) == 9 and list(rows[0]) == ["u1", "u2", "cdf", "exponent"]
        m = make_logistic(2, 0.5)
        for r in rows:
            u = [float(r["u1"]), float(r["u2"])]
            assert float(r["cdf"]) == pytest.approx(model_cdf(m, u), rel=1e-15)

    def test_grid_file(self, logistic2, tmp_path, capsys):
        g = tmp_path / "grid.csv"
        g.write_text("u1,u2\n0.5,0.5\n1,0.3\n0,0.9\n")
        out = tmp_path / "out.csv"
        assert main(["eval", "--model", logistic2, "--grid-file", str(g), "--out", str(out)]) == 0
        rows = list(csv.DictReader(out.open()))
        # logistic diagonal: l(x, x) = sqrt(2) x, so C(1/2, 1/2) = 2**-sqrt(2)
        assert float(rows[0]["cdf"]) == pytest.approx(2 ** -(2**0.5), rel=1e-14)
        assert float(rows[1]["cdf"]) == pytest.approx(0.3, rel=1e-15)
        assert float(rows[2]["cdf"]) == 0.0

    def test_grid_outside_cube(self, logistic2, tmp_path, capsys):
        g = tmp_path / "grid.csv"
        g.write_text("0.5,1.5\n")
        assert main(["eval", "--model", logistic2, "--grid-file", str(g)]) == EXIT_DOMAIN


class TestSample:
    def test_identical_across_thread_counts(self, spec, tmp_path):
        path = spec({"preset": "asymmetric_logistic", "alphas": [0.4, 0.8],
                     "betas": [[0.7, 0.2, 0.5], [0.3, 0.8, 0.5]]})
        outs = []
        for threads in ("1", "4"):
            out = tmp_path / f"s{threads}.csv"
            argv = ["sample", "--model", path, "--n", "150000", "--seed", "9", "--threads", threads,
                    "--out", str(out)]
            assert main(argv) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_uniform_columns(self, logistic2, capsys):
        assert main(["sample", "--model", logistic2, "--n", "5", "--seed", "1", "--uniform"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "y1,y2,u1,u2"
        vals = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        np.testing.assert_allclose(vals[:, 2:], np.exp(-1 / vals[:, :2]), rtol=1e-15)


class TestTaildep:
    def test_json_value(self, logistic2, capsys):
        assert main(["taildep", "--model", logistic2, "--J", "2"]) == 0
        doc = json.loads(capsys.readouterr().out)
        (rep,) = doc["reports"]
        assert rep["J"] == [2]
        assert rep["lambda"] == pytest.approx(0.585786, abs=1e-6)

    def test_all_subsets_csv(self, spec, capsys):
        path = spec({"preset": "logistic", "d": 3, "alpha": 0.5})
        assert main(["taildep", "--model", path, "--format", "csv"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert len(rows) == 7
        full = [r for r in rows if r["J"] == "1 2 3"]
        assert float(full[0]["lambda"]) == 1.0

    def test_empirical(self, logistic2, capsys):
        argv = ["taildep", "--model", logistic2, "--J", "1", "--n", "200000", "--seed", "3"]
        assert main(argv) == 0
        reps = json.loads(capsys.readouterr().out)["reports"]
        assert [r["method"] for r in reps] == ["analytic-generic", "empirical"]
        assert abs(reps[0]["lambda"] - reps[1]["lambda"]) < 0.05

    def test_degenerate_is_valid_json(self, spec, capsys):
        path = spec({"preset": "asymmetric_logistic", "alphas": [0.5, 0.5],
                     "betas": [[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]]})
        assert main(["taildep", "--model", path, "--J", "1,2"]) == 0
        rep = json.loads(capsys.readouterr().out)["reports"][0]
        assert rep["lambda"] is None and rep["degenerate"] is True

    def test_coordinate_out_of_range(self, logistic2, capsys):
        assert main(["taildep", "--model", logistic2, "--J", "3"]) == EXIT_DOMAIN


@pytest.mark.slow
def test_verify_passes(capsys):
    assert main(["verify", "--seed", "42"]) == 0
    out = capsys.readouterr().out
    assert "9/9 checks passed" in out


def test_console_entry_point(logistic2):
    proc = subprocess.run([sys.executable, "-m", "mevmix", "validate", "--model", logistic2],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["valid"] is True
