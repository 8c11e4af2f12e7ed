import json
import math

import numpy as np
import pytest

from dacdelay.cli import build_signals, load_config, load_trajectory_csv, main
from dacdelay.errors import InputFormatError, ParameterError
from dacdelay.signals import ArctanRamp, Constant, Ramp, SampledHold, Sinusoid, Sum
from dacdelay.sim import simulate_ct


def _write_ring(tmp_path, name="ring.edges"):
    path = tmp_path / name
    path.write_text("".join(f"{i + 1} {(i + 1) % 6 + 1} 1.0\n" for i in range(6)))
    return path


def _write_config(tmp_path, name="run.json", **fields):
    path = tmp_path / name
    path.write_text(json.dumps(fields))
    return path


def _ct_fields(**overrides):
    fields = {
        "mode": "ct",
        "graph": "ring.edges",
        "beta": 1.0,
        "tau": 0.2,
        "h": 0.05,
        "horizon": 30.0,
        "signals": {"catalog": "smooth"},
        "out": "outdir",
        "seed": 7,
    }
    fields.update(overrides)
    return fields


def _dt_fields(**overrides):
    fields = {
        "mode": "dt",
        "graph": "ring.edges",
        "beta": 1.0,
        "delta": 0.19,
        "d": 2,
        "steps": 400,
        "signals": {"catalog": "smooth"},
        "out": "outdir",
        "seed": 7,
    }
    fields.update(overrides)
    return fields


# ---------------------------------------------------------------------------
# configuration loading
# ---------------------------------------------------------------------------


def test_load_config_ct(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_ct_fields())
    cfg = load_config(cfg_path)
    assert cfg.mode == "ct"
    assert cfg.graph.n == 6
    assert cfg.beta == 1.0 and cfg.tau == 0.2 and cfg.h == 0.05 and cfg.horizon == 30.0
    assert cfg.delta is None and cfg.d is None and cfg.steps is None
    assert cfg.seed == 7
    assert cfg.out_dir == tmp_path / "outdir"  # resolved against the config dir
    assert cfg.graph_path == tmp_path / "ring.edges"


def test_load_config_dt_defaults(tmp_path):
    _write_ring(tmp_path)
    fields = _dt_fields()
    del fields["out"], fields["seed"]
    cfg = load_config(_write_config(tmp_path, **fields))
    assert cfg.mode == "dt" and cfg.d == 2 and cfg.steps == 400
    assert cfg.seed == 0
    assert str(cfg.out_dir) == "."


def test_load_config_overrides(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_ct_fields())
    cfg = load_config(cfg_path, out_override=str(tmp_path / "elsewhere"), seed_override=99)
    assert cfg.out_dir == tmp_path / "elsewhere"
    assert cfg.seed == 99


@pytest.mark.parametrize(
    "mutate",
    [
        {"mode": "hybrid"},
        {"graph": 3},
        {"beta": True},
        {"tau": None},
        {"h": -0.1},
        {"horizon": 0.0},
        {"out": 4},
        {"steps": 0, "mode": "dt", "delta": 0.1, "d": 1},
    ],
)
def test_load_config_rejects_schema_violations(tmp_path, mutate):
    _write_ring(tmp_path)
    fields = _ct_fields()
    fields.update(mutate)
    fields = {k: v for k, v in fields.items() if v is not None}
    with pytest.raises(InputFormatError):
        load_config(_write_config(tmp_path, **fields))


def test_load_config_rejects_missing_and_invalid_files(tmp_path):
    with pytest.raises(InputFormatError):
        load_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputFormatError) as excinfo:
        load_config(bad)
    assert "line" in str(excinfo.value)
    lst = tmp_path / "list.json"
    lst.write_text("[1, 2]")
    with pytest.raises(InputFormatError):
        load_config(lst)


def test_load_config_rejects_fractional_delay(tmp_path):
    _write_ring(tmp_path)
    with pytest.raises(InputFormatError):
        load_config(_write_config(tmp_path, **_dt_fields(d=1.5)))


def test_load_config_negative_delay_is_parameter_error(tmp_path):
    _write_ring(tmp_path)
    with pytest.raises(ParameterError):
        load_config(_write_config(tmp_path, **_ct_fields(tau=-0.1)))


def test_load_config_sweep_validation(tmp_path):
    _write_ring(tmp_path)
    ok = load_config(
        _write_config(tmp_path, **_ct_fields(sweep={"parameter": "tau", "values": [0.1, 0.3]}))
    )
    assert ok.sweep_parameter == "tau" and ok.sweep_values == (0.1, 0.3)
    for sweep in [
        {"parameter": "d", "values": [1]},  # wrong parameter for ct mode
        {"parameter": "tau", "values": []},
        {"parameter": "tau", "values": [0.1, "x"]},
        "tau",
    ]:
        with pytest.raises(InputFormatError):
            load_config(_write_config(tmp_path, **_ct_fields(sweep=sweep)))
    with pytest.raises(InputFormatError):
        load_config(
            _write_config(tmp_path, **_dt_fields(sweep={"parameter": "d", "values": [1.5]}))
        )


# ---------------------------------------------------------------------------
# signal specifications
# ---------------------------------------------------------------------------


def test_build_signals_catalogs():
    smooth = build_signals({"catalog": "smooth"}, 6, 0)
    assert len(smooth) == 6
    held = build_signals({"catalog": "sampled-hold", "seed": 3, "period": 2.0}, 4, 0)
    again = build_signals({"catalog": "sampled-hold", "seed": 3, "period": 2.0}, 4, 99)
    t = np.linspace(0.0, 10.0, 50)
    for a, b in zip(held, again):
        assert np.array_equal(a.value(t), b.value(t))
    const = build_signals({"catalog": "constant", "levels": [1, 2, 3]}, 3, 0)
    assert [s.value(np.array([1.0]))[0] for s in const] == [1.0, 2.0, 3.0]


def test_build_signals_catalog_validation():
    with pytest.raises(InputFormatError):
        build_signals({"catalog": "nope"}, 3, 0)
    with pytest.raises(InputFormatError):
        build_signals({"catalog": "smooth", "period": 2.0}, 3, 0)
    with pytest.raises(InputFormatError):
        build_signals({"catalog": "constant", "levels": [1, 2]}, 3, 0)
    with pytest.raises(InputFormatError):
        build_signals({"catalog": "constant", "levels": [1, None, 3]}, 3, 0)
    with pytest.raises(InputFormatError):
        build_signals(None, 3, 0)
    with pytest.raises(InputFormatError):
        build_signals("smooth", 3, 0)


def test_build_signals_per_agent_list():
    spec = [
        {"kind": "constant", "level": 2.0},
        {"kind": "sinusoid", "amplitude": 1.0, "omega": 0.5, "phase": 0.1, "offset": 3.0},
        {"kind": "ramp", "slope": 0.25},
        {"kind": "arctan", "gain": 2.0, "rate": 0.5},
        {"kind": "sampled-hold", "stream": 1, "period": 4.0},
        {"kind": "sum", "terms": [{"kind": "constant", "level": 1.0}, {"kind": "ramp", "slope": 0.1}]},
    ]
    signals = build_signals(spec, 6, seed=11)
    assert isinstance(signals[0], Constant)
    assert isinstance(signals[1], Sinusoid)
    assert isinstance(signals[2], Ramp)
    assert isinstance(signals[3], ArctanRamp)
    assert isinstance(signals[4], SampledHold)
    assert isinstance(signals[5], Sum)
    t = np.array([4.0])
    assert signals[0].value(t)[0] == 2.0
    assert signals[2].value(t)[0] == 1.0
    assert signals[5].value(t)[0] == pytest.approx(1.4)
    # unset sampled-hold seed falls back to the run seed
    other = build_signals(spec, 6, seed=11)
    tt = np.linspace(0.0, 20.0, 80)
    assert np.array_equal(signals[4].value(tt), other[4].value(tt))


def test_build_signals_per_agent_validation():
    with pytest.raises(InputFormatError):
        build_signals([{"kind": "constant", "level": 1.0}], 2, 0)  # wrong count
    bad_entries = [
        {"kind": "mystery"},
        {"kind": "constant"},  # missing level
        {"kind": "constant", "level": 1.0, "slope": 2.0},  # foreign field
        {"kind": "sum", "terms": []},
        "constant",
    ]
    for entry in bad_entries:
        with pytest.raises(InputFormatError):
            build_signals([entry], 1, 0)


# ---------------------------------------------------------------------------
# analyze command
# ---------------------------------------------------------------------------


def test_analyze_ct_writes_report(tmp_path, capsys):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_ct_fields())
    assert main(["analyze", "--config", str(cfg_path)]) == 0
    report_path = tmp_path / "outdir" / "report.json"
    assert report_path.exists()
    data = json.loads(report_path.read_text())
    assert set(data) == {"structure", "spectrum", "report"}
    assert data["structure"]["is_scwb"] is True
    assert data["spectrum"]["lambda2_hat"] == pytest.approx(0.5)
    rep = data["report"]
    assert rep["mode"] == "ct" and rep["admissible"] is True
    assert rep["tau_bar"] == pytest.approx(math.pi / 6.0)
    assert rep["rho_tau"] == pytest.approx(0.3370611736665742)
    assert rep["gamma"] > 0.0 and rep["tracking_bound"] > 0.0
    assert "report.json" in capsys.readouterr().out


def test_analyze_dt_report(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_dt_fields())
    assert main(["analyze", "--config", str(cfg_path)]) == 0
    rep = json.loads((tmp_path / "outdir" / "report.json").read_text())["report"]
    assert rep["mode"] == "dt" and rep["admissible"] is True
    assert rep["d_bar"] == 3 and rep["max_admissible_d"] == 2
    assert rep["d_hat_min"] == pytest.approx(2.251627223526838)
    assert 0.0 < rep["omega_bar"] < 1.0 and rep["k_bar"] >= 1.0
    assert rep["tracking_bound"] > 0.0


def test_analyze_inadmissible_delay_still_reports(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_ct_fields(tau=0.6))
    assert main(["analyze", "--config", str(cfg_path)]) == 0
    rep = json.loads((tmp_path / "outdir" / "report.json").read_text())["report"]
    assert rep["admissible"] is False
    assert rep["rho_tau"] is None and rep["tracking_bound"] is None


def test_analyze_out_flag_overrides_config(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_ct_fields())
    dest = tmp_path / "flagged"
    assert main(["analyze", "--config", str(cfg_path), "--out", str(dest)]) == 0
    assert (dest / "report.json").exists()
    assert not (tmp_path / "outdir" / "report.json").exists()


def test_analyze_exit_codes(tmp_path, capsys):
    # missing config and missing graph file are I/O problems
    assert main(["analyze", "--config", str(tmp_path / "none.json")]) == 1
    cfg_path = _write_config(tmp_path, **_ct_fields(graph="none.edges"))
    assert main(["analyze", "--config", str(cfg_path)]) == 1

    # structurally invalid graph
    (tmp_path / "unbalanced.edges").write_text("1 2 1.0\n2 1 2.0\n")
    bad_graph = _write_config(tmp_path, name="ub.json", **_ct_fields(graph="unbalanced.edges"))
    assert main(["analyze", "--config", str(bad_graph)]) == 2

    # parameters that parse but are out of range
    _write_ring(tmp_path)
    bad_step = _write_config(tmp_path, name="step.json", **_dt_fields(delta=1.5))
    assert main(["analyze", "--config", str(bad_step)]) == 3
    err = capsys.readouterr().err
    assert "error:" in err


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(["analyze"])  # missing required --config
    assert excinfo.value.code == 1


# ---------------------------------------------------------------------------
# simulate command
# ---------------------------------------------------------------------------


def test_simulate_ct_constants_converge(tmp_path, capsys):
    _write_ring(tmp_path)
    cfg_path = _write_config(
        tmp_path,
        **_ct_fields(signals={"catalog": "constant", "levels": [1, 2, 3, 4, 5, 6]}),
    )
    assert main(["simulate", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    assert "classification: Converging" in out
    summary = json.loads((tmp_path / "outdir" / "summary.json").read_text())
    assert summary["classification"] == "Converging"
    assert summary["steady_error"] < 1e-3
    assert summary["gamma"] == 0.0
    assert summary["tracking_bound"] == 0.0
    times, x, errors = load_trajectory_csv(tmp_path / "outdir" / "trajectory.csv")
    assert times[0] == 0.0 and x.shape[1] == 6 and errors.shape == x.shape
    # agents end at the average of the constant inputs
    assert np.abs(x[-1] - 3.5).max() < 1e-3


def test_simulate_dt_bounded_and_round_trip(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_dt_fields())
    assert main(["simulate", "--config", str(cfg_path)]) == 0
    summary = json.loads((tmp_path / "outdir" / "summary.json").read_text())
    assert summary["mode"] == "dt"
    assert summary["classification"] == "Bounded"
    assert 0.0 < summary["steady_error"] < summary["tracking_bound"]
    times, x, errors = load_trajectory_csv(tmp_path / "outdir" / "trajectory.csv")
    assert len(times) == 401
    assert times[1] - times[0] == pytest.approx(0.19)


def test_simulate_matches_library_call_bit_for_bit(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_ct_fields(horizon=10.0))
    assert main(["simulate", "--config", str(cfg_path)]) == 0
    times, x, errors = load_trajectory_csv(tmp_path / "outdir" / "trajectory.csv")
    cfg = load_config(cfg_path)
    signals = build_signals(cfg.signals_spec, 6, cfg.seed)
    traj = simulate_ct(cfg.graph, cfg.beta, cfg.tau, signals, cfg.h, cfg.horizon)
    assert np.array_equal(times, traj.times)
    assert np.array_equal(x, traj.x)
    assert np.array_equal(errors, traj.errors)


def test_simulate_reruns_are_byte_identical(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_dt_fields(signals={"catalog": "sampled-hold"}))
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "a")]) == 0
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "b")]) == 0
    for name in ("trajectory.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_simulate_seed_changes_sampled_hold_runs(tmp_path):
    _write_ring(tmp_path)
    fields = _dt_fields(signals={"catalog": "sampled-hold"})
    del fields["seed"]
    cfg_path = _write_config(tmp_path, **fields)
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "a"), "--seed", "1"]) == 0
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "b"), "--seed", "2"]) == 0
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() != (
        tmp_path / "b" / "trajectory.csv"
    ).read_bytes()


def test_simulate_missing_sections_exit_one(tmp_path):
    _write_ring(tmp_path)
    fields = _ct_fields()
    del fields["horizon"]
    assert main(["simulate", "--config", str(_write_config(tmp_path, name="h.json", **fields))]) == 1
    fields = _dt_fields()
    del fields["steps"]
    assert main(["simulate", "--config", str(_write_config(tmp_path, name="s.json", **fields))]) == 1
    fields = _ct_fields()
    del fields["signals"]
    assert main(["simulate", "--config", str(_write_config(tmp_path, name="g.json", **fields))]) == 1


def test_load_trajectory_csv_validation(tmp_path):
    with pytest.raises(InputFormatError):
        load_trajectory_csv(tmp_path / "none.csv")
    not_traj = tmp_path / "x.csv"
    not_traj.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(InputFormatError):
        load_trajectory_csv(not_traj)
    ragged = tmp_path / "r.csv"
    ragged.write_text("t,x_1,e_1\n0.0,1.0\n")
    with pytest.raises(InputFormatError) as excinfo:
        load_trajectory_csv(ragged)
    assert "line 2" in str(excinfo.value)
    bad_cell = tmp_path / "c.csv"
    bad_cell.write_text("t,x_1,e_1\n0.0,oops,0.0\n")
    with pytest.raises(InputFormatError):
        load_trajectory_csv(bad_cell)


# ---------------------------------------------------------------------------
# sweep command
# ---------------------------------------------------------------------------


def _sweep_config(tmp_path, **overrides):
    _write_ring(tmp_path)
    fields = _dt_fields(
        steps=600, sweep={"parameter": "d", "values": [0, 2, 3]}, **overrides
    )
    return _write_config(tmp_path, **fields)


def test_sweep_dt_classifications(tmp_path):
    cfg_path = _sweep_config(tmp_path)
    assert main(["sweep", "--config", str(cfg_path)]) == 0
    data = json.loads((tmp_path / "outdir" / "sweep.json").read_text())
    assert data["parameter"] == "d"
    rows = data["rows"]
    assert [row["value"] for row in rows] == [0.0, 2.0, 3.0]
    assert rows[0]["classification"] == "Bounded" and rows[0]["admissible"] is True
    assert rows[1]["classification"] == "Bounded" and rows[1]["admissible"] is True
    assert rows[2]["classification"] == "Diverging" and rows[2]["admissible"] is False
    assert rows[2]["tracking_bound"] is None
    # tolerated delay comes at a price: certified bound grows with d
    assert rows[1]["tracking_bound"] > rows[0]["tracking_bound"]
    csv_lines = (tmp_path / "outdir" / "sweep.csv").read_text().splitlines()
    assert csv_lines[0] == "value,classification,steady_error,tracking_bound"
    assert len(csv_lines) == 4
    assert csv_lines[3].startswith("3,Diverging,") and csv_lines[3].endswith(",")


def test_sweep_parallel_matches_serial(tmp_path):
    cfg_path = _sweep_config(tmp_path)
    assert main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "serial")]) == 0
    assert (
        main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "par"), "--jobs", "3"])
        == 0
    )
    for name in ("sweep.csv", "sweep.json"):
        assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "par" / name).read_bytes()


def test_sweep_requires_sweep_section(tmp_path):
    _write_ring(tmp_path)
    cfg_path = _write_config(tmp_path, **_dt_fields())
    assert main(["sweep", "--config", str(cfg_path)]) == 1


# ---------------------------------------------------------------------------
# verify command
# ---------------------------------------------------------------------------


def test_verify_all_checks_pass(tmp_path, capsys):
    assert main(["verify", "--seed", "5"]) == 0
    out = capsys.readouterr().out
    lines = [ln for ln in out.splitlines() if ln.startswith("PASS ")]
    assert len(lines) == 20
    assert "20/20 checks passed" in out


def test_verify_injected_fault_is_caught(capsys):
    assert main(["verify", "--seed", "5", "--inject", "dt-state-conservation"]) == 4
    out = capsys.readouterr().out
    assert "FAIL dt-state-conservation" in out
    assert "19/20 checks passed" in out


def test_verify_unknown_injection_target(capsys):
    assert main(["verify", "--inject", "no-such-check"]) == 3
    assert "no-such-check" in capsys.readouterr().err
