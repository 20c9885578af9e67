import json
from pathlib import Path

import numpy as np
import pytest

from h1flow import cli, io, seeds
from h1flow import curve as cv
from h1flow.curve import Curve
from h1flow.equilibria import EquilibriumParams
from h1flow.errors import ParseError, StepFailure
from h1flow.flow import CSV_HEADER, TimeSeries

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("runs")
    codes = {}
    for name in ("ellipse", "quadrifolium", "figure_eight", "equilibrium"):
        codes[name] = cli.main(["flow", "--config", str(CONFIGS / f"{name}.json"), "--out", str(base / name)])
    return base, codes


def read(path):
    return json.loads(Path(path).read_text())


def test_curve_json_round_trip(tmp_path, rng):
    c = seeds.random_positive_area(6, rng_seed=3)
    io.save_curve(c, tmp_path / "c.json")
    d = read(tmp_path / "c.json")
    assert d["n_modes"] == 6 and len(d["coeffs"]) == 13
    assert d["coeffs"][6][0] == c.coeffs[6, 0].real  # k = 0 sits in the middle
    assert io.load_curve(tmp_path / "c.json").allclose(c, atol=0.0)


def test_curve_json_errors_name_the_field(tmp_path):
    cases = {
        '{"coeffs": []}': "n_modes",
        '{"n_modes": 1}': "coeffs",
        '{"n_modes": 1, "coeffs": [[0,0,0,0]]}': "3 rows",
        '{"n_modes": 1, "coeffs": [[0,0,0,0],[1,0,0],[0,0,0,0]]}': "coeffs[1] (k=0)",
        '{"n_modes": 1, "coeffs": [[0,0,0,0],[1,"x",0,0],[0,0,0,0]]}': "non-numeric",
        '{"n_modes": 1, "coeffs": [[0,0,0,0],[0,0,0,0],[1,0,0,0]]}': "conjugate",
    }
    for text, needle in cases.items():
        (tmp_path / "bad.json").write_text(text)
        with pytest.raises(ParseError, match=needle.replace("[", r"\[").replace("(", r"\(").replace(")", r"\)")):
            io.load_curve(tmp_path / "bad.json")
    (tmp_path / "bad.json").write_text('{"n_modes": 1,\n "coeffs": [}')
    with pytest.raises(ParseError, match="line 2"):
        io.load_curve(tmp_path / "bad.json")


def test_samples_and_params_files(tmp_path):
    s = cv.sample(seeds.ellipse(2, 1), 16)
    io.save_samples(s, tmp_path / "s.csv")
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "u,x,y"
    assert np.array_equal(io.load_samples(tmp_path / "s.csv").samples, s.samples)
    p = EquilibriumParams(1.0, -0.5, 2.0, 3.0, 2)
    io.save_params(p, tmp_path / "p.json", residual=1e-9)
    assert set(read(tmp_path / "p.json")) == {"a", "b", "c", "d", "ell", "residual"}
    assert io.load_params(tmp_path / "p.json") == p


def test_evaluate_examples(tmp_path, capsys):
    io.save_curve(seeds.circle(n_modes=3), tmp_path / "circle.json")
    assert cli.cmd_evaluate(tmp_path / "circle.json")["E"] == pytest.approx(1.0)
    io.save_curve(seeds.ellipse(2, 1, 8), tmp_path / "ellipse.json")
    assert cli.cmd_evaluate(tmp_path / "ellipse.json")["I"] == pytest.approx(1.18884, abs=1e-4)
    io.save_curve(Curve.from_real_modes(2, x_sin=[1.0], y_sin=[0.0, 1.0]), tmp_path / "eight.json")
    assert cli.main(["evaluate", str(tmp_path / "eight.json"), "--out", str(tmp_path / "d.json")]) == 0
    d = read(tmp_path / "d.json")
    assert d["I"] == "inf" and d["E"] == "inf"
    assert "I = inf" in capsys.readouterr().out


def test_evaluate_reports_parse_errors(tmp_path):
    (tmp_path / "bad.json").write_text('{"n_modes": 2}')
    assert cli.main(["evaluate", str(tmp_path / "bad.json")]) == cli.EXIT_INVALID


def test_bundled_runs_produce_expected_outputs(runs):
    base, codes = runs
    assert all(code == 0 for code in codes.values())
    for name in codes:
        run = base / name
        for f in ("timeseries.csv", "terminal.json", "conservation.json", "fit.json", "manifest.json"):
            assert (run / f).exists()
        h = read(run / "config.json")["config_hash"]
        for f in ("conservation.json", "fit.json", "manifest.json"):
            assert read(run / f)["config_hash"] == h
    assert read(base / "ellipse" / "fit.json")["equilibrium"]["ell"] == 1
    rep = read(base / "quadrifolium" / "report.json")
    assert rep["ell"] >= 3 and rep["certified"] and rep["config_hash"]
    assert read(base / "figure_eight" / "report.json")["ell"] == 2
    eq = read(base / "equilibrium" / "manifest.json")
    assert eq["termination"] == "grad_stop" and eq["steps"] == 0


def test_terminal_snapshot_reproduces_recorded_diagnostics(runs):
    base, _ = runs
    for name in ("ellipse", "quadrifolium"):
        d = cli.cmd_evaluate(base / name / "terminal.json")
        last = TimeSeries.from_csv(base / name / "timeseries.csv")[-1]
        row = dict(zip(CSV_HEADER, last.as_row()))
        for key, val in d.items():
            assert val == pytest.approx(row[key], abs=1e-12)


def test_runs_are_deterministic(runs, tmp_path):
    base, _ = runs
    cli.main(["flow", "--config", str(CONFIGS / "ellipse.json"), "--out", str(tmp_path / "again")])
    for f in ("timeseries.csv", "terminal.json", "fit.json"):
        assert (tmp_path / "again" / f).read_bytes() == (base / "ellipse" / f).read_bytes()


def test_report_command(runs, capsys):
    base, _ = runs
    assert cli.main(["report", str(base / "quadrifolium")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["certified"] and out["ell"] == 3
    assert cli.main(["report", str(base / "ellipse"), "--n", "1", "--m", "4"]) == cli.EXIT_INVALID


def test_report_refuses_unconverged_runs(tmp_path):
    cfg = {"seed": {"kind": "ellipse", "params": {"a": 2, "b": 1}, "n_modes": 8}, "flow": {"t_max": 1.0}}
    (tmp_path / "short.json").write_text(json.dumps(cfg))
    assert cli.main(["flow", "--config", str(tmp_path / "short.json"), "--out", str(tmp_path / "r")]) == \
        cli.EXIT_NOT_CONVERGED
    assert cli.main(["report", str(tmp_path / "r")]) == cli.EXIT_NOT_CONVERGED


def test_validation_failures(tmp_path):
    bad = {"seed": {"kind": "hexagon"}}
    (tmp_path / "a.json").write_text(json.dumps(bad))
    assert cli.main(["flow", "--config", str(tmp_path / "a.json"), "--out", str(tmp_path / "a")]) == 2
    (tmp_path / "b.json").write_text(json.dumps({"flow": {"rel_tol": -1}}))
    assert cli.main(["flow", "--config", str(tmp_path / "b.json"), "--out", str(tmp_path / "b")]) == 2
    (tmp_path / "c.json").write_text(json.dumps({"flwo": {}}))
    assert cli.main(["flow", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / "c")]) == 2
    assert cli.main(["flow", "--out", str(tmp_path / "d")]) == 2


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise StepFailure("step size underflow")
    monkeypatch.setattr(cli, "flow_run", boom)
    code = cli.main(["flow", "--config", str(CONFIGS / "ellipse.json"), "--out", str(tmp_path / "x")])
    assert code == cli.EXIT_NUMERICAL
    assert read(tmp_path / "x" / "manifest.json")["status"] == "numerical_failure"


def test_emit_template_lists_every_default(capsys, tmp_path):
    assert cli.main(["flow", "--emit-template"]) == 0
    template = json.loads(capsys.readouterr().out)
    assert set(template) == {"seed", "flow", "analysis"}
    assert {"rel_tol", "abs_tol", "t_max", "grad_stop", "record_every", "max_steps",
            "allow_negative_area"} <= set(template["flow"])
    (tmp_path / "t.json").write_text(json.dumps(template))
    assert cli.load_config(tmp_path / "t.json") == template


def test_seed_flag_and_jobs(tmp_path):
    cfg = {"seed": {"kind": "random", "params": {"norm_bound": 1.0}, "n_modes": 6},
           "flow": {"t_max": 2.0}, "analysis": {"require_convergence": False, "rate": {"enabled": False}}}
    (tmp_path / "r1.json").write_text(json.dumps(cfg))
    (tmp_path / "r2.json").write_text(json.dumps(cfg))
    args = ["flow", "--config", str(tmp_path / "r1.json"), "--config", str(tmp_path / "r2.json"),
            "--out", str(tmp_path / "out"), "--jobs", "2", "--seed", "5"]
    assert cli.main(args) == 0
    a = io.load_curve(tmp_path / "out" / "r1" / "initial.json")
    b = io.load_curve(tmp_path / "out" / "r2" / "initial.json")
    assert a.allclose(b, atol=0.0)
    assert a.allclose(seeds.random_positive_area(6, 1.0, rng_seed=5), atol=0.0)


def test_probe_command(tmp_path):
    assert cli.main(["probe", "--ell", "2", "--n-samples", "20", "--out", str(tmp_path / "p")]) == 0
    d = read(tmp_path / "p" / "probe.json")
    assert d["min_ratio"] > 0 and d["n_samples"] == 20 and d["params"]["ell"] == 2 and d["config_hash"]
    lines = (tmp_path / "p" / "probe.csv").read_text().splitlines()
    assert lines[0] == "sample,energy_gap,grad_norm,ratio" and len(lines) == 21
