import numpy as np
import pytest

from vcadvect import experiment
from vcadvect.cli import main
from vcadvect.config import ConfigError, RunConfig, parse_config, parse_lines
from vcadvect.experiment import (
    COLUMNS,
    PRESETS,
    RunResult,
    convergence_study,
    execute,
    format_csv,
    preset_curves,
    read_csv,
)

SMALL = dict(case="a_x", K=6, N=3, t_final=0.5, steps=200, samples=5)


def test_parse_file_and_overrides(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# the a = x preset\ncase=a_x basis=gll N=3 K=40 flux=split_upwind form=split\n"
        "t_final=20 steps=200000\n"
    )
    cfg = parse_config(cfg_file)
    assert (cfg.case, cfg.basis, cfg.N, cfg.K, cfg.t_final, cfg.steps) == (
        "a_x", "gll", 3, 40, 20.0, 200000)
    assert parse_config(cfg_file, {"K": "80"}).K == 80


def test_parse_errors(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(overrides={"K": "4"})
    assert info.value.key == "case"
    with pytest.raises(ConfigError) as info:
        parse_lines(["case=a_x colour=red"])
    assert info.value.key == "colour"
    for key, value in [("K", "0"), ("K", "ten"), ("flux", "magic"), ("basis", "cheb"),
                       ("t_final", "-1"), ("diagnostics", "maybe"), ("variant", "negative"),
                       ("dissipation", "1.0")]:
        with pytest.raises(ConfigError) as info:
            parse_config(overrides={"case": "a_cos", key: value})
        assert info.value.key == key


def test_config_round_trip():
    cfg = RunConfig(case="a_x2", variant="negative", basis="fd", dissipation=0.25, t_final=0.1)
    again = parse_config(overrides=dict(cfg.items()))
    assert again == cfg


def test_csv_layout_and_determinism(tmp_path):
    cfg = RunConfig(**SMALL, output=str(tmp_path / "a.csv"))
    first = execute(cfg)
    text = (tmp_path / "a.csv").read_text()
    execute(cfg)
    assert (tmp_path / "a.csv").read_text() == text
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert header == ",".join(COLUMNS)
    assert "# config: case=a_x" in text and text.startswith("# vcadvect ")
    parsed = read_csv(tmp_path / "a.csv")
    assert len(parsed["rows"]) == 5 and parsed["aborted_at"] is None
    assert parsed["rows"][-1][0] == 0.5
    assert first.rows[-1]["total_error"] == parsed["rows"][-1][1]


def test_rerun_from_csv_metadata(tmp_path):
    path = tmp_path / "b.csv"
    execute(RunConfig(**SMALL, basis="gll", output=str(path)))
    text = path.read_text()
    path.unlink()
    assert main(["run", "--config", str(path.with_suffix(".csv"))]) == 2  # gone
    path.write_text(text)
    cfg = parse_config(path)
    execute(cfg)
    assert path.read_text() == text


def test_fd_rows_have_nan_oversampled():
    cfg = RunConfig(case="a_cos", basis="fd", fd_nodes=20, K=1, t_final=0.1, steps=50, samples=2)
    res = execute(cfg)
    assert np.isnan(res.rows[-1]["oversampled_error"])
    assert "nan" in format_csv(res)


def test_run_exit_codes(tmp_path, capsys):
    out = tmp_path / "c.csv"
    args = ["run", "--case", "a_x", "--K", "4", "--t_final", "0.2", "--samples", "3",
            "--output", str(out)]
    assert main(args) == 0 and out.exists()
    assert main(["run", "--K", "4"]) == 2
    assert "case" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["run", "--case", "a_x", "--colour", "red"])
    assert info.value.code == 2
    assert main(["preset", "fig99"]) == 2
    assert "fd_cos" in capsys.readouterr().err


def test_blowup_truncates_csv(tmp_path):
    out = tmp_path / "pole.csv"
    code = main(["run", "--case", "a_x2", "--variant", "negative", "--K", "8", "--t_final", "10",
                 "--steps", "2000", "--samples", "11", "--output", str(out)])
    assert code == 3
    parsed = read_csv(out)
    assert parsed["aborted_at"] is not None and parsed["aborted_at"] < 10
    assert parsed["rows"] and parsed["rows"][-1][0] < 10
    assert out.read_text().rstrip().splitlines()[-1].startswith("# ABORTED t=")


def test_convergence_validation():
    base = RunConfig(case="a_x")
    with pytest.raises(ConfigError):
        convergence_study(base, [10], 1.0)
    with pytest.raises(ConfigError):
        convergence_study(base, [20, 10], 1.0)
    assert main(["converge", "--case", "a_x", "--Ks", "10"]) == 2


def test_convergence_exact_for_polynomial_data(monkeypatch):
    # a = 1 with degree-2 data and exact inflow: the spatial scheme is exact, and
    # a fine fixed step leaves only rounding
    from vcadvect import cases

    poly = cases.TestCase(cases.CaseId.A_X, lambda x: 1 + 0 * np.asarray(x, dtype=float),
                          lambda x: 0 * np.asarray(x, dtype=float), 0.0, 1.0,
                          lambda x: 1 + np.asarray(x) - np.asarray(x) ** 2,
                          lambda t, x: 1 + (np.asarray(x) - t) - (np.asarray(x) - t) ** 2)
    monkeypatch.setattr(RunConfig, "test_case", lambda self: poly)
    rows = convergence_study(RunConfig(case="a_x", N=3, steps=2000), [2, 4, 8], 0.5)
    assert all(r.error <= 1e-12 for r in rows)


def test_preset_catalogue():
    assert set(PRESETS) == {f"fig{i}" for i in range(1, 9)} | {"fd_cos"}
    counts = {name: len(PRESETS[name]()) for name in PRESETS}
    assert counts["fig1"] == 16 and counts["fig2"] == 8 and counts["fd_cos"] == 2
    names = [c.name for c in PRESETS["fig2"]()]
    assert "N3_gl_central_true" in names and "N4_gl_upwind_false" in names
    with pytest.raises(ConfigError):
        preset_curves("nope")


def test_preset_steps_recorded():
    curves = preset_curves("fd_cos")
    for curve, notes in curves:
        assert curve.config.steps >= experiment.DESK_STEPS
        assert any("stability_minimum" in n for n in notes)
    assert any("dissipation strength" in n for _, notes in curves for n in notes)


def test_run_preset_small(tmp_path, monkeypatch, capsys):
    tiny = lambda: [experiment.Curve("a", RunConfig(**SMALL)),
                    experiment.Curve("b", RunConfig(**{**SMALL, "case": "a_x2",
                                                       "variant": "negative", "t_final": 10.0}))]
    monkeypatch.setitem(PRESETS, "tiny", tiny)
    monkeypatch.setattr(experiment, "DESK_STEPS", 300)
    assert main(["preset", "tiny", "--out", str(tmp_path)]) == 0
    manifest = (tmp_path / "tiny_manifest.csv").read_text().splitlines()
    assert manifest[0] == "curve,file,status"
    assert manifest[1].endswith(",ok") and "aborted t=" in manifest[2]
    assert (tmp_path / "tiny.svg").read_text().startswith("<svg")
    assert "# ABORTED" in (tmp_path / "tiny_b.csv").read_text()


def test_verify_ops(tmp_path, capsys):
    assert main(["verify-ops", "--dump", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "gll N=10 sbp" in out
    assert (tmp_path / "gl_N3.txt").exists()


def test_result_column_helper():
    res = RunResult(RunConfig(case="a_x"), rows=[{"eta": None}, {"eta": 2.0}])
    np.testing.assert_array_equal(res.column("eta")[1:], [2.0])
    assert np.isnan(res.column("eta")[0])
