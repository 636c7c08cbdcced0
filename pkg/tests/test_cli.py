import csv
import math

import pytest

from blockcorr import analytics as A
from blockcorr import experiments as X
from blockcorr.analytics import RhoCoefficients
from blockcorr.cli import EXIT_INVALID, EXIT_OK, EXIT_PROPERTY, main
from blockcorr.errors import ValidationError

TINY = """\
N: 12
K: 10
M: 3
N_o: [0, 4]
points: [1, 3, 6]
validation_points: [1, 6]
spot_points: [6]
K_list: [5]
u_list: [1, 2]
M_list: [0, 3]
ensemble: 60
spot_ensemble: 40
burn_in: 20
seed: 3
"""


@pytest.fixture
def tiny(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(TINY)
    return path


def read(path):
    with open(path) as fh:
        lines = [l for l in fh if not l.startswith("#")]
    return list(csv.DictReader(lines))


class TestConfig:
    def test_defaults(self):
        cfg = X.ExperimentConfig()
        assert cfg.points == list(range(1, 26))
        assert len(cfg.validation_points) == 7
        assert cfg.validation_points[0] == 1 and cfg.validation_points[-1] == 25
        assert cfg.spot_points == [1, 13, 25]

    def test_yaml(self, tiny):
        cfg = X.ExperimentConfig.from_file(tiny)
        assert cfg.N == 12 and cfg.N_o == [0, 4] and cfg.seed == 3

    def test_inf(self):
        assert X.ExperimentConfig.from_mapping({"M": "inf"}).M == math.inf

    def test_unknown_key(self):
        with pytest.raises(ValidationError, match="unknown key: zeta"):
            X.ExperimentConfig.from_mapping({"zeta": 1})

    @pytest.mark.parametrize("kw", [dict(gamma=2), dict(c=1.0), dict(points=[0]), dict(lags=[0]),
                                    dict(u_list=[60]), dict(xi_list=[1.5])])
    def test_invalid(self, kw):
        with pytest.raises(ValidationError):
            X.ExperimentConfig(**kw)


class TestCommands:
    @pytest.mark.parametrize("cmd,name,columns", [
        ("fig1", "fig1.csv", X.FIG1_COLUMNS),
        ("fig2", "fig2.csv", X.FIG2_COLUMNS),
        ("fig3", "fig3.csv", X.FIG3_COLUMNS),
        ("properties", "properties.csv", X.PROPERTY_COLUMNS),
    ])
    def test_schema_and_rerun(self, cmd, name, columns, tiny, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main([cmd, "--config", str(tiny), "--out", str(a)]) == EXIT_OK
        assert main([cmd, "--config", str(tiny), "--out", str(b), "--jobs", "2"]) == EXIT_OK
        assert (a / name).read_bytes() == (b / name).read_bytes()
        rows = read(a / name)
        assert list(rows[0]) == columns
        keys = [tuple(r[c] for c in columns[:5]) for r in rows]
        assert len(keys) == len(set(keys))

    def test_seed_flag_changes_output(self, tiny, tmp_path):
        main(["fig1", "--config", str(tiny), "--out", str(tmp_path / "a")])
        main(["fig1", "--config", str(tiny), "--out", str(tmp_path / "b"), "--seed", "4"])
        assert (tmp_path / "a/fig1.csv").read_bytes() != (tmp_path / "b/fig1.csv").read_bytes()

    def test_fig1_rows(self, tiny, tmp_path):
        main(["fig1", "--config", str(tiny), "--out", str(tmp_path)])
        rows = read(tmp_path / "fig1.csv")
        assert len(rows) == 2 * 3
        simulated = [r for r in rows if r["mean_sim"]]
        assert {float(r["y_p"]) for r in simulated} == {1.5, 6.5}
        net = X.ExperimentConfig.from_file(tiny).network(N_o=4)
        r = [r for r in rows if r["N_o"] == "4" and r["y_p"] == "3.5"][0]
        assert float(r["mean_analytic"]) == A.mean_interference(net, 3.5)

    def test_properties_pass(self, tiny, tmp_path):
        assert main(["properties", "--config", str(tiny), "--out", str(tmp_path)]) == EXIT_OK
        rows = read(tmp_path / "properties.csv")
        assert all(r["passed"] == "true" for r in rows)
        crossover = [r for r in rows if r["check"] == "crossover" and r["N_o"] == "0"]
        assert crossover and all(r["value"] == "no crossover" for r in crossover)

    def test_property_failure_exit(self, tmp_path, monkeypatch):
        monkeypatch.setattr(X, "check_steady_state", lambda cfg: [
            {"check": "forced", "N_o": "", "xi": "", "lag": "", "y_p": "", "value": 1.0, "passed": False}])
        out = tmp_path / "p"
        assert main(["properties", "--out", str(out), "--seed", "0"]) == EXIT_PROPERTY

    def test_invalid_config_exit(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("N: 12\ngamma: 3\n")
        assert main(["fig1", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_INVALID
        bad.write_text("nonsense_key: 1\n")
        assert main(["fig1", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_INVALID
        assert main(["fig1", "--config", str(tmp_path / "missing.yaml")]) == EXIT_INVALID

    def test_displacement(self, tiny, tmp_path):
        assert main(["displacement", "--config", str(tiny), "--out", str(tmp_path)]) == EXIT_OK
        rows = read(tmp_path / "displacement_N12_u1_M3_lag1.csv")
        assert list(rows[0]) == ["n", "k", "probability"]

    def test_simulate(self, tiny, tmp_path):
        assert main(["simulate", "--config", str(tiny), "--out", str(tmp_path), "--ensemble", "2"]) == EXIT_OK
        rows = read(tmp_path / "series.csv")
        assert len(rows) == 2 * 10 * 3


class TestPropertySuite:
    def test_sign_flip_is_caught(self):
        cfg = X.ExperimentConfig(N=12, N_o=[4], points=[2, 6], lags=[1])

        def flipped(net, y, lag):
            co = A.rho_coefficients(net, y, lag)
            return RhoCoefficients(co.c1, -co.c2, co.c3)

        assert all(r["passed"] for r in X.check_monotone_in_K(cfg))
        rows = X.check_monotone_in_K(cfg, coefficients=flipped)
        mono = [r for r in rows if r["check"] == "monotone_in_K"]
        assert mono and not any(r["passed"] for r in mono)

    def test_alpha_zero_grid_has_no_crossover(self):
        cfg = X.ExperimentConfig(N=20, N_o=[0], points=list(range(1, 11)))
        rows = X.check_crossover(cfg)
        assert len(rows) == 20
        assert all(r["value"] == "no crossover" and r["passed"] for r in rows)

    def test_fig2_static_limit(self):
        cfg = X.ExperimentConfig(N=12, N_o=[0], points=[3], ensemble=0)
        rows = [r for r in X.fig2_rows(cfg) if r["variant"] == "static_no_blockage"]
        assert rows and all(r["rho_analytic"] == pytest.approx(0.5, abs=1e-15) for r in rows)
