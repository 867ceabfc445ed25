"""Front-door behavior: config dispatch, outputs, exit codes, determinism."""

import json
import math

import numpy as np
import pytest

from entnorm import cli
from entnorm.tensor_core import (
    CompositeStructure,
    OperatorMatrix,
    save_operator,
)

from conftest import bell_projector, random_density


def write_config(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def run(tmp_path, payload, extra=()):
    cfg = write_config(tmp_path / "config.json", payload)
    return cli.main(["--config", cfg, "--output-dir", str(tmp_path), *extra])


def load_csv(path):
    return np.loadtxt(path, delimiter=",", skiprows=1)


# ----------------------------------------------------------------- measure


def test_measure_bell_projector(tmp_path, capsys):
    op_path = tmp_path / "bell.json"
    save_operator(bell_projector(), op_path)
    code = run(
        tmp_path,
        {"mode": "measure", "operator": str(op_path), "output": "report.json"},
    )
    assert code == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["epsilon_bits"] == pytest.approx(1.0, abs=1e-6)
    assert doc["converged"] is True
    out = capsys.readouterr().out
    assert "epsilon_bits=" in out


def test_measure_product_state_is_zero(tmp_path):
    rng = np.random.default_rng(5)
    part = random_density(rng, (3,))
    joint = OperatorMatrix(
        CompositeStructure((3, 3)), np.kron(part.entries, part.entries)
    )
    op_path = tmp_path / "product.json"
    save_operator(joint, op_path)
    code = run(tmp_path, {"mode": "measure", "operator": str(op_path)})
    assert code == 0
    doc = json.loads((tmp_path / "measure_report.json").read_text())
    assert doc["epsilon_bits"] == pytest.approx(0.0, abs=1e-6)


def test_measure_malformed_dims_names_field(tmp_path, capsys):
    op_path = tmp_path / "bad.json"
    op_path.write_text(json.dumps({"dims": [2, -1], "entries": []}))
    code = run(tmp_path, {"mode": "measure", "operator": str(op_path)})
    assert code == 1
    assert "dims" in capsys.readouterr().err


def test_measure_seed_override_is_accepted(tmp_path):
    op_path = tmp_path / "bell.json"
    save_operator(bell_projector(), op_path)
    code = run(
        tmp_path,
        {"mode": "measure", "operator": str(op_path)},
        extra=["--seed", "7"],
    )
    assert code == 0


# ---------------------------------------------------------------- simulate


def simulate_payload(**overrides):
    payload = {
        "mode": "simulate",
        "params": {"b12": 1.0},
        "amplitudes": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        "p_order": 2,
        "t_end": 4 * math.pi,
        "sample_count": 81,
        "output": "run.csv",
    }
    payload.update(overrides)
    return payload


def test_simulate_zero_fields_gives_identical_rows(tmp_path):
    r = 1 / math.sqrt(2)
    code = run(
        tmp_path,
        simulate_payload(
            params={},
            amplitudes=[[r, 0.0], [0.0, r], [0.0, 0.0]],
            t_end=5.0,
            sample_count=11,
        ),
    )
    assert code == 0
    data = load_csv(tmp_path / "run.csv")
    # every column except time is constant
    assert np.array_equal(data[:, 1:], np.tile(data[0, 1:], (11, 1)))


def test_simulate_rabi_population_column(tmp_path, capsys):
    code = run(tmp_path, simulate_payload())
    assert code == 0
    data = load_csv(tmp_path / "run.csv")
    expected = np.sin(data[:, 0] / 2) ** 2
    assert np.max(np.abs(data[:, 2] - expected)) < 1e-6
    out = capsys.readouterr().out
    assert "peak_epsilon=" in out and "max_ladder_residual=" in out


def test_simulate_uniform_start_first_epsilon(tmp_path):
    r = 1 / math.sqrt(3)
    code = run(
        tmp_path,
        simulate_payload(
            params={},
            amplitudes=[[r, 0.0], [r, 0.0], [r, 0.0]],
            t_end=1.0,
            sample_count=3,
        ),
    )
    assert code == 0
    data = load_csv(tmp_path / "run.csv")
    assert data[0, 15] == pytest.approx(math.log2(3), abs=1e-9)


def test_simulate_rejects_bad_amplitudes(tmp_path, capsys):
    code = run(tmp_path, simulate_payload(amplitudes=[[1.0, 0.0]]))
    assert code == 1
    assert "amplitudes" in capsys.readouterr().err


def test_simulate_reports_integration_abort(tmp_path, capsys):
    payload = simulate_payload(
        params={"b12": 0.9, "b23": -0.7, "delta21": 0.4},
        amplitudes=[[0.6, 0.0], [0.0, 0.8], [0.0, 0.0]],
        t_end=50.0,
        sample_count=101,
        integrator={"residual_abort": 1e-13},
    )
    code = run(tmp_path, payload)
    assert code == 1
    err = capsys.readouterr().err
    assert "integration failed" in err and "at t =" in err


# ------------------------------------------------------------------- sweep


def sweep_payload(**overrides):
    payload = {
        "mode": "sweep",
        "params": {"b23": 0.3},
        "amplitudes": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        "p_order": 2,
        "t_end": 2.0,
        "sample_count": 21,
        "grid": {"b12": [0.4, 0.8], "delta21": [0.0, 0.2]},
    }
    payload.update(overrides)
    return payload


def test_sweep_grid_files_and_index(tmp_path):
    code = run(tmp_path, sweep_payload())
    assert code == 0
    index = json.loads((tmp_path / "sweep_index.json").read_text())
    assert index["axes"] == ["b12", "delta21"]
    assert len(index["points"]) == 4
    names = [p["file"] for p in index["points"]]
    assert names == [
        "b12=0.4_delta21=0.csv",
        "b12=0.4_delta21=0.2.csv",
        "b12=0.8_delta21=0.csv",
        "b12=0.8_delta21=0.2.csv",
    ]
    for point in index["points"]:
        assert point["status"] == "ok"
        assert (tmp_path / point["file"]).exists()


def test_sweep_single_point_matches_simulate(tmp_path):
    sim_dir = tmp_path / "sim"
    sweep_dir = tmp_path / "sweep"
    sim_dir.mkdir()
    sweep_dir.mkdir()
    sim = simulate_payload(params={"b12": 0.5}, t_end=3.0, sample_count=31)
    cfg = write_config(tmp_path / "sim.json", sim)
    assert cli.main(["--config", cfg, "--output-dir", str(sim_dir)]) == 0
    sw = sweep_payload(
        params={}, grid={"b12": [0.5]}, t_end=3.0, sample_count=31
    )
    cfg = write_config(tmp_path / "sweep.json", sw)
    assert cli.main(["--config", cfg, "--output-dir", str(sweep_dir)]) == 0
    a = (sim_dir / "run.csv").read_bytes()
    b = (sweep_dir / "b12=0.5.csv").read_bytes()
    assert a == b


def test_sweep_rejects_unknown_axis(tmp_path, capsys):
    code = run(tmp_path, sweep_payload(grid={"gamma12": [0.1]}))
    assert code == 1
    assert "grid" in capsys.readouterr().err


def test_sweep_continues_past_failing_point(tmp_path):
    # first grid point is stationary (zero residuals); the second trips the
    # abort threshold, and the sweep must finish and record both
    payload = sweep_payload(
        params={"b23": -0.7, "delta21": 0.4},
        amplitudes=[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
        t_end=50.0,
        sample_count=51,
        grid={"b12": [0.0, 0.9]},
        integrator={"residual_abort": 5e-11},
    )
    code = run(tmp_path, payload)
    assert code == 2
    index = json.loads((tmp_path / "sweep_index.json").read_text())
    statuses = [p["status"] for p in index["points"]]
    assert statuses[0] == "ok"
    assert statuses[1].startswith("error:")
    assert index["points"][1]["file"] is None


def test_repeated_runs_are_byte_identical(tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        d.mkdir()
        cfg = write_config(tmp_path / f"{d.name}.json", sweep_payload())
        assert cli.main(["--config", cfg, "--output-dir", str(d)]) == 0
    files = sorted(p.name for p in dirs[0].iterdir())
    assert files == sorted(p.name for p in dirs[1].iterdir())
    for name in files:
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


# ------------------------------------------------------------------ verify


def test_verify_small_run_passes(tmp_path, capsys):
    code = run(tmp_path, {"mode": "verify", "cases": 30, "output": "v.json"})
    assert code == 0
    doc = json.loads((tmp_path / "v.json").read_text())
    assert doc["passed"] is True
    assert "verification PASSED" in capsys.readouterr().out


def test_verify_canary_fails_and_names_property(tmp_path, capsys):
    code = run(tmp_path, {"mode": "verify", "cases": 25, "canary": True})
    assert code == 1
    out = capsys.readouterr().out
    assert "suite semipositivity: FAIL" in out
    doc = json.loads((tmp_path / "verify_report.json").read_text())
    assert doc["passed"] is False
    assert doc["suites"][0]["failures"] == 25


def test_verify_zero_cases_named_error(tmp_path, capsys):
    code = run(tmp_path, {"mode": "verify", "cases": 0})
    assert code == 1
    assert "cases" in capsys.readouterr().err


def test_verify_seed_override_reaches_report(tmp_path):
    code = run(
        tmp_path,
        {"mode": "verify", "cases": 5, "seed": 0},
        extra=["--seed", "12"],
    )
    doc = json.loads((tmp_path / "verify_report.json").read_text())
    assert doc["seed"] == 12
    assert code in (0, 1)


# ---------------------------------------------------------------- dispatch


def test_unknown_mode_is_named(tmp_path, capsys):
    code = run(tmp_path, {"mode": "draw"})
    assert code == 1
    assert "mode" in capsys.readouterr().err


def test_missing_mode_is_named(tmp_path, capsys):
    code = run(tmp_path, {"cases": 5})
    assert code == 1
    assert "mode" in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    code = cli.main(["--config", str(tmp_path / "missing.json")])
    assert code == 1
    assert "cannot read config" in capsys.readouterr().err


def test_invalid_json_config(tmp_path, capsys):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    code = cli.main(["--config", str(cfg), "--output-dir", str(tmp_path)])
    assert code == 1
    assert "not valid JSON" in capsys.readouterr().err
