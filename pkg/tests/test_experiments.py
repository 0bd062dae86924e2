import csv
import io
import math

import numpy as np
import pytest

from gravqfi import dynamics, metrology
from gravqfi.dynamics import PhysicalParams
from gravqfi.experiments import cli, sweeps
from gravqfi.experiments.config import ConfigError, Grid, SweepConfig, load_config, parse_config
from gravqfi.experiments.report import parse_report, report_steady_state, steady_state_summary
from gravqfi.experiments.validation import validate
from gravqfi.gaussian import TABLE_I_PROBES, SqueezedVacuum, Thermal, make_probe, purity

# --- config ------------------------------------------------------------------


def test_empty_config_gives_defaults():
    cfg = parse_config("# nothing here\n\n")
    assert cfg.params == PhysicalParams()
    assert cfg.params.lambda_g == 1e-8
    assert cfg.probes == TABLE_I_PROBES
    assert cfg.time_grid == Grid(0.0, 200.0, 201)


def test_config_roundtrip(tmp_path):
    text = """
params.gamma = 0.2
params.n_th = 1.5
time.t_max = 30
time.n_points = 7
lambda_g_grid.min = 1e-9
lambda_g_grid.max = 1e-7
lambda_g_grid.n_points = 3
lambda_g_grid.spacing = log
r_grid = 0.5, 0.9
probe.a.kind = thermal
probe.a.n_th0 = 2
probe.b.kind = squeezed_vacuum
probe.b.r = 0.3
contour.probe = b
n_repetitions = 100
seed = 7
"""
    path = tmp_path / "c.cfg"
    path.write_text(text)
    cfg = load_config(path)
    assert cfg.params == PhysicalParams(gamma=0.2, n_th=1.5)
    assert list(cfg.time_grid.points()) == list(np.linspace(0, 30, 7))
    np.testing.assert_allclose(cfg.lambda_g_grid.points(), [1e-9, 1e-8, 1e-7], rtol=1e-12)
    assert cfg.probes == {"a": Thermal(2.0), "b": SqueezedVacuum(0.3)}
    assert list(cfg.all_probes()) == ["a", "b", "squeezed_vacuum_r0.5", "squeezed_vacuum_r0.9"]
    assert (cfg.contour_probe, cfg.n_repetitions, cfg.seed) == ("b", 100, 7)


def test_mirror_and_bath_keys():
    cfg = parse_config("mirror.density = 1000\nbath.temperature = 1\n")
    assert cfg.params.lambda_g == dynamics.lambda_g_from(dynamics.MirrorSpec(1000, 1.0))
    assert cfg.params.lambda_T == pytest.approx(1.30920e10, rel=1e-5)


@pytest.mark.parametrize(
    "text, field, line",
    [
        ("time.t_min = 5\ntime.t_max = 1\n", "time", None),
        ("params.gamma = 0.1\nbogus = 3\n", "bogus", 2),
        ("params.gamma\n", None, 1),
        ("params.gamma = abc\n", "params.gamma", 1),
        ("params.gamma = 1\nparams.gamma = 2\n", "params.gamma", 2),
        ("params.lambda_g = 1\nmirror.density = 2\n", "mirror.density", None),
        ("probe.x.kind = laser\n", "probe.x.kind", None),
        ("lambda_g_grid.min = 1\n", "lambda_g_grid", None),
        ("params.gamma = -1\n", "params", None),
        ("time.spacing = log\n", "time", None),
    ],
)
def test_config_errors_name_the_field(text, field, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.field == field
    assert info.value.line == line


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


# --- sweeps ------------------------------------------------------------------


def small_cfg(**kw):
    return SweepConfig(time_grid=Grid(0.0, 20.0, 5), **kw)


def test_initial_purities():
    rows = sweeps.run_purity_sweep(small_cfg())
    at_zero = {r.probe_name: r.purity for r in rows if r.t == 0}
    assert at_zero["coherent"] == pytest.approx(1.0, abs=1e-12)
    assert at_zero["squeezed_vacuum"] == pytest.approx(1.0, abs=1e-12)
    assert at_zero["thermal"] == pytest.approx(1 / 9, rel=1e-12)
    assert at_zero["squeezed_thermal"] == pytest.approx(1 / 3, rel=1e-12)


def test_rows_match_library_calls():
    cfg = small_cfg(n_repetitions=10)
    for row in sweeps.run_qfi_sweep(cfg):
        s0 = make_probe(cfg.all_probes()[row.probe_name])
        q = metrology.qfi(s0, row.t, cfg.params)
        assert row.qfi_total == q.total and row.qfi_term_cov == q.term_cov
        assert row.purity == purity(dynamics.evolve(s0, row.t, cfg.params).cov)
        assert row.cfi_best_theta <= row.qfi_total + sweeps.CFI_SLACK
        assert 0 < row.purity <= 1
        if row.t > 0:
            assert row.crb == 1 / (10 * row.qfi_total)
        else:
            assert row.crb == math.inf


def test_r_grid_adds_probes():
    rows = sweeps.run_qfi_sweep(small_cfg(probes={}, r_grid=(0.5, 1.2)))
    assert {r.probe_name for r in rows} == {"squeezed_vacuum_r0.5", "squeezed_vacuum_r1.2"}


def test_sweep_csv_is_deterministic():
    cfg = small_cfg()
    first = sweeps.to_csv(sweeps.run_qfi_sweep(cfg))
    second = sweeps.to_csv(sweeps.run_qfi_sweep(cfg))
    assert first == second
    parsed = list(csv.DictReader(io.StringIO(first)))
    assert len(parsed) == 20 and tuple(parsed[0]) == sweeps.COLUMNS


def test_contour_order_and_completeness():
    cfg = small_cfg(lambda_g_grid=Grid(1e-9, 1e-7, 3, "log"))
    rows = sweeps.run_qfi_contour(cfg)
    assert len(rows) == 15
    keys = [(r.t, r.lambda_g) for r in rows]
    assert keys == sorted(keys)
    assert {r.probe_name for r in rows} == {"squeezed_vacuum"}


def test_contour_requires_grid_and_known_probe():
    with pytest.raises(ConfigError):
        sweeps.run_qfi_contour(small_cfg())
    with pytest.raises(ConfigError):
        sweeps.run_qfi_contour(small_cfg(lambda_g_grid=Grid(1e-9, 1e-8, 2), contour_probe="nope"))


def test_optimal_time():
    rows = sweeps.run_qfi_sweep(SweepConfig(time_grid=Grid(0.0, 40.0, 41)))
    t_opt = sweeps.optimal_time(rows, "coherent")
    best = max(r.qfi_total for r in rows if r.probe_name == "coherent")
    assert [r.t for r in rows if r.probe_name == "coherent" and r.qfi_total == best] == [t_opt]
    with pytest.raises(KeyError):
        sweeps.optimal_time(rows, "missing")


def test_emit_writes_file(tmp_path):
    rows = sweeps.run_purity_sweep(small_cfg())
    out = tmp_path / "rows.csv"
    sweeps.emit(rows, str(out))
    assert out.read_text() == sweeps.to_csv(rows)


# --- steady-state report -----------------------------------------------------


@pytest.mark.parametrize("params", [PhysicalParams(), PhysicalParams(omega_m=3.0, gamma=0.02, lambda_g=0.1)])
def test_report_identities(params):
    parsed = parse_report(report_steady_state(params))
    assert parsed["B_inf/A_inf"] == pytest.approx(-2 * params.quality_factor, rel=1e-12)
    summary = steady_state_summary(params)
    for key, value in summary.items():
        assert parsed[key] == value
    assert parsed["steady_qfi"] == metrology.steady_qfi(params).total
    assert parsed["n_eff"] == params.n_eff


def test_report_without_diffusion():
    text = report_steady_state(PhysicalParams(lambda_g=0.0))
    assert "B_inf/A_inf = undefined (Lambda = 0)" in text
    assert parse_report(text)["B_inf/A_inf"] is None


# --- CLI ---------------------------------------------------------------------


def test_cli_sweep_to_stdout(capsys):
    assert cli.main(["qfi-sweep", "--probe", "coherent"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(sweeps.COLUMNS)
    assert len(lines) == 202
    assert all(line.startswith("coherent,") for line in lines[1:])


def test_cli_writes_csv_and_honours_overrides(tmp_path):
    out = tmp_path / "p.csv"
    assert cli.main(["purity-sweep", "--gamma", "0.5", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4 * 201
    assert max(float(r["t"]) for r in rows) == pytest.approx(40.0)


def test_cli_contour(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("lambda_g_grid.min = 1e-9\nlambda_g_grid.max = 1e-8\nlambda_g_grid.n_points = 2\ntime.n_points = 3\n")
    out = tmp_path / "c.csv"
    assert cli.main(["qfi-contour", "--config", str(cfg), "--probe", "thermal", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 6 and {r["probe_name"] for r in rows} == {"thermal"}


def test_cli_steady_state(capsys):
    assert cli.main(["steady-state", "--lambda-g", "0.01"]) == 0
    parsed = parse_report(capsys.readouterr().out)
    assert parsed["lambda_g"] == 0.01
    assert parsed["steady_qfi"] == metrology.steady_qfi(PhysicalParams(lambda_g=0.01)).total


@pytest.mark.parametrize(
    "argv",
    [
        ["qfi-sweep", "--gamma", "-1"],
        ["qfi-sweep", "--probe", "laser"],
        ["qfi-contour"],
        ["purity-sweep", "--config", "/nonexistent/file.cfg"],
        ["qfi-sweep", "--n-th", "0", "--lambda-g", "0", "--probe", "coherent"],
    ],
)
def test_cli_config_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_validate(capsys):
    assert cli.main(["validate", "--seed", "3"]) == 0
    first = capsys.readouterr().out
    assert cli.main(["validate", "--seed", "3"]) == 0
    assert capsys.readouterr().out == first


# --- validation harness ------------------------------------------------------


def test_validate_passes_and_is_deterministic():
    a, b = io.StringIO(), io.StringIO()
    assert validate(0, a) == 0
    assert validate(0, b) == 0
    assert a.getvalue() == b.getvalue()
    assert a.getvalue().count("PASS") == 7


def test_validate_catches_flipped_correlation_sign(monkeypatch):
    original = dynamics._noise_shape

    def flipped(t, p):
        one_minus_decay, a, b = original(t, p)
        return one_minus_decay, a, -b

    monkeypatch.setattr(dynamics, "_noise_shape", flipped)
    out = io.StringIO()
    assert validate(0, out) == 1
    assert "FAIL" in out.getvalue()


def test_validate_catches_wrong_purity_guard(monkeypatch):
    def broken(det, dP):
        # drops the purity term altogether
        return 0.0

    monkeypatch.setattr(metrology, "_purity_term", broken)
    out = io.StringIO()
    assert validate(0, out) == 1
