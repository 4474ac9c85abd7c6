import csv
import io

import numpy as np
import pytest

from ebicggm.cli import main
from ebicggm.io import read_csv, save_matrix
from ebicggm.models import build_chain_theta, sample_mvn


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.fixture
def chain_data(tmp_path):
    x = sample_mvn(build_chain_theta(6).theta0, 400, 0)
    path = tmp_path / "data.csv"
    save_matrix(x, path)
    return path


class TestCli:
    def test_enumerate(self):
        code, text = run(["enumerate", "--p", "4", "--q", "6"])
        assert code == 0
        assert text.count("# model") == 61
        assert "61 decomposable models" in text

    def test_enumerate_cap(self):
        assert run(["enumerate", "--p", "9", "--q", "1"])[0] == 1

    def test_select(self, chain_data):
        code, text = run(["select", "--data", str(chain_data), "--gamma", "0.5", "--count", "40"])
        assert code == 0
        lines = text.splitlines()
        assert lines[0].startswith("# selected model")
        assert lines[1:6] == ["1 2", "2 3", "3 4", "4 5", "5 6"]

    def test_path(self, chain_data):
        code, text = run(["path", "--data", str(chain_data), "--count", "20", "--center"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["rho", "num_edges", "loglik_refit", "ebic_gamma0", "ebic_gamma05", "ebic_gamma1"]
        assert len(rows) == 21 and rows[1][1] == "0"
        rho = [float(r[0]) for r in rows[1:]]
        assert np.allclose(np.array(rho[1:]) / rho[:-1], 100 ** (-1 / 19))

    def test_simulate(self, tmp_path):
        out = tmp_path / "rec.csv"
        code, text = run(["simulate", "--family", "chain", "--kappa", "1", "--trials", "2",
                          "--n-values", "100", "--count", "20", "--seed", "3", "--out", str(out)])
        assert code == 0
        assert len(read_csv(out)) == 6
        assert text.splitlines()[0].startswith("n,method,gamma")

    def test_bounds_assumptions(self):
        code, text = run(["bounds", "--check", "assumptions"])
        assert code == 0
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["formula", "parameters", "analytic", "mc_estimate", "mc_std_error", "result"]
        assert all(r[-1] == "pass" for r in rows[1:])

    def test_malformed_data(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("2,2\n1,2\n3\n")
        assert run(["select", "--data", str(bad)])[0] == 1

    def test_missing_file(self, tmp_path):
        assert run(["select", "--data", str(tmp_path / "nope.csv")])[0] == 1

    def test_bad_arguments(self):
        assert run(["simulate", "--family", "star", "--out", "x.csv"])[0] == 1

    def test_numerical_failure(self, chain_data, monkeypatch):
        from ebicggm import glasso
        from ebicggm.errors import ConvergenceError

        def boom(*a, **k):
            raise ConvergenceError("forced", 1.0)

        monkeypatch.setattr(glasso, "glasso_path", boom)
        assert run(["select", "--data", str(chain_data)])[0] == 2
