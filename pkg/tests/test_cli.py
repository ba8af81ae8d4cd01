import csv
import json
import math

import numpy as np
import pytest

from oracles import quad_energy
from trapzopt.cli import main, sample_times
from trapzopt.trajectory import plan_trajectory


def run_cli(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def waypoint_file(tmp_path):
    doc = {
        "waypoints": [[0, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0]],
        "params": [[1.2, 1.8]],
    }
    f = tmp_path / "wp.json"
    f.write_text(json.dumps(doc))
    return f


@pytest.fixture
def run_config(tmp_path):
    (tmp_path / "wp.json").write_text(
        json.dumps({"waypoints": [[0, -1.2, 1.0, 0, 0, 0], [0.9, -1.0, 0.7, 0.3, 0, 0], [0.2, -1.5, 1.4, 0, 0.4, 0]]})
    )
    cfg = {
        "waypoints": "wp.json",
        "pso": {"swarm_size": 20, "max_iters": 60, "seed": 5},
        "workers": 4,
    }
    f = tmp_path / "run.json"
    f.write_text(json.dumps(cfg))
    return f


# -- profile -----------------------------------------------------------------------


def test_profile_v_a(tmp_path, capsys):
    assert run_cli("profile", "--v", 1.2, "--a", 1.8, "--out", tmp_path) == 0
    assert "T   = 1.5" in capsys.readouterr().out
    rows = read_csv(tmp_path / "profile.csv")
    assert rows[0] == ["t", "s", "sdot", "sddot"]
    t = [float(r[0]) for r in rows[1:]]
    assert t[0] == 0 and t[-1] == 1.5
    assert len(t) == 751  # 500 Hz over 1.5 s
    assert float(rows[-1][1]) == 1.0


def test_profile_csv_is_crlf(tmp_path):
    run_cli("profile", "--v", 1.2, "--a", 1.8, "--out", tmp_path)
    raw = (tmp_path / "profile.csv").read_bytes()
    assert raw.startswith(b"t,s,sdot,sddot\r\n")


def test_profile_infeasible(tmp_path, capsys):
    assert run_cli("profile", "--v", 0.5, "--T", 1.5, "--out", tmp_path) == 2
    assert "exceed 1" in capsys.readouterr().err


def test_profile_over_specified(tmp_path):
    assert run_cli("profile", "--v", 1, "--a", 1, "--T", 2, "--out", tmp_path) == 64


def test_profile_under_specified(tmp_path):
    assert run_cli("profile", "--v", 1, "--out", tmp_path) == 64


def test_profile_from_config(tmp_path, capsys):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"profile": {"a": 4.0, "T": 1.5}, "sample_rate": 100}))
    assert run_cli("profile", "--config", f, "--out", tmp_path) == 0
    assert "v   = 0.763932" in capsys.readouterr().out
    assert len(read_csv(tmp_path / "profile.csv")) == 1 + 151


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli("profile", "--bogus")
    assert exc.value.code == 64


def test_sample_times():
    assert np.allclose(sample_times(1.0, 4), [0, 0.25, 0.5, 0.75, 1.0])
    assert np.allclose(sample_times(0.9, 4), [0, 0.25, 0.5, 0.75, 0.9])


# -- simulate ------------------------------------------------------------------------


def test_simulate(tmp_path, waypoint_file):
    assert run_cli("simulate", "--waypoints", waypoint_file, "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["S2"] == pytest.approx(1.5)
    assert rep["S1"] == pytest.approx(math.sqrt(6.48), rel=1e-12)
    traj = plan_trajectory([[0] * 6, [1, 0, 0, 0, 0, 0]], [(1.2, 1.8)])
    assert rep["S1"] == pytest.approx(quad_energy(traj), rel=1e-9)
    rows = read_csv(tmp_path / "trajectory.csv")
    assert len(rows[0]) == 19 and rows[0][1] == "q1" and rows[0][-1] == "qdd6"
    assert read_csv(tmp_path / "path.csv")[0] == ["t", "x", "y", "z"]


def test_simulate_limit_violation(tmp_path):
    f = tmp_path / "wp.json"
    f.write_text(json.dumps({"waypoints": [[0] * 6, [4, 0, 0, 0, 0, 0]], "params": [[1.2, 1.8]]}))
    assert run_cli("simulate", "--waypoints", f, "--out", tmp_path) == 2


def test_simulate_out_of_range_waypoint(tmp_path):
    f = tmp_path / "wp.json"
    f.write_text(json.dumps({"waypoints": [[0] * 6, [0, 0, 7.0, 0, 0, 0]], "params": [[0.1, 1.0]]}))
    assert run_cli("simulate", "--waypoints", f, "--out", tmp_path) == 2


def test_simulate_without_params(tmp_path):
    f = tmp_path / "wp.json"
    f.write_text(json.dumps({"waypoints": [[0] * 6, [1, 0, 0, 0, 0, 0]]}))
    assert run_cli("simulate", "--waypoints", f, "--out", tmp_path) == 64


@pytest.mark.parametrize(
    "text",
    ["{", "[]", '{"waypoints": 3}', '{"waypoints": [[1, 2]]}', '{"waypoints": [[0,0,0,0,0,0],[1,0,0,0,0,0]], "params": [[1]]}'],
)
def test_malformed_waypoint_files(tmp_path, text):
    f = tmp_path / "wp.json"
    f.write_text(text)
    assert run_cli("simulate", "--waypoints", f, "--out", tmp_path) == 64


def test_simulate_plot(tmp_path, waypoint_file):
    assert run_cli("simulate", "--waypoints", waypoint_file, "--out", tmp_path, "--plot") == 0
    assert (tmp_path / "joint_accel.png").stat().st_size > 0
    assert (tmp_path / "path.png").stat().st_size > 0


# -- sweep -----------------------------------------------------------------------------


def test_sweep_demo(tmp_path):
    assert run_cli("sweep", "--demo", "a", "--out", tmp_path, "--plot") == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert rows[0] == ["v", "end_effector_v", "S1", "S2", "S1_norm", "S2_norm", "ff", "feasible"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["interior_optimum"] is True
    ff = np.array([float(r[6]) for r in rows[1:]])
    # F_average recomputed from the printed column (9 significant digits)
    F = 100 * (1 - ff.min() / ff.mean())
    assert F == pytest.approx(summary["F_average"], abs=1e-6)
    assert summary["F_average"] == 100 * (1 - summary["ff_best"] / summary["ff_average"])
    assert (tmp_path / "sweep.png").exists()


def test_sweep_single_row(tmp_path, run_config):
    doc = json.loads(run_config.read_text())
    doc["sweep"] = {"v_grid": [0.5]}
    run_config.write_text(json.dumps(doc))
    assert run_cli("sweep", "--config", run_config, "--out", tmp_path) == 2


def test_sweep_explicit_grid(tmp_path, run_config):
    doc = json.loads(run_config.read_text())
    doc["sweep"] = {"v_min": 0.2, "v_max": 1.0, "n": 9, "a_rule": {"kind": "proportional", "c": 3.0}}
    run_config.write_text(json.dumps(doc))
    assert run_cli("sweep", "--config", run_config, "--out", tmp_path) == 0
    assert len(read_csv(tmp_path / "sweep.csv")) == 10


def test_sweep_bad_rule(tmp_path, run_config):
    doc = json.loads(run_config.read_text())
    doc["sweep"] = {"a_rule": {"kind": "cubic"}}
    run_config.write_text(json.dumps(doc))
    assert run_cli("sweep", "--config", run_config, "--out", tmp_path) == 64


# -- optimize -------------------------------------------------------------------------


def test_optimize(tmp_path, run_config):
    assert run_cli("optimize", "--config", run_config, "--out", tmp_path) == 0
    best = json.loads((tmp_path / "best_params.json").read_text())
    assert best["seed"] == 5 and len(best["params"]) == 2
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["f_f"] <= rep["audit_grid"]["min"]
    rows = read_csv(tmp_path / "convergence.csv")
    assert rows[0] == ["iter", "gbest_f"]
    f = [float(r[1]) for r in rows[1:]]
    assert all(b <= a for a, b in zip(f, f[1:]))


def test_optimize_seed_flag_overrides(tmp_path, run_config):
    assert run_cli("optimize", "--config", run_config, "--out", tmp_path, "--seed", 11) == 0
    assert json.loads((tmp_path / "best_params.json").read_text())["seed"] == 11


def test_optimize_default_seed_zero(tmp_path, run_config):
    doc = json.loads(run_config.read_text())
    del doc["pso"]["seed"]
    run_config.write_text(json.dumps(doc))
    assert run_cli("optimize", "--config", run_config, "--out", tmp_path) == 0
    assert json.loads((tmp_path / "best_params.json").read_text())["seed"] == 0


def test_optimize_missing_robot(tmp_path, run_config):
    assert run_cli("optimize", "--config", run_config, "--robot", tmp_path / "nope.json", "--out", tmp_path) == 64


def test_optimize_missing_pso_block(tmp_path, run_config):
    doc = json.loads(run_config.read_text())
    del doc["pso"]
    run_config.write_text(json.dumps(doc))
    assert run_cli("optimize", "--config", run_config, "--out", tmp_path) == 64


def test_optimize_bad_pso_block(tmp_path, run_config):
    doc = json.loads(run_config.read_text())
    doc["pso"]["swarm_size"] = 1
    run_config.write_text(json.dumps(doc))
    assert run_cli("optimize", "--config", run_config, "--out", tmp_path) == 64


def test_optimize_config_bounds(tmp_path, run_config):
    doc = json.loads(run_config.read_text())
    doc["pso"]["bounds"] = {"v": [0.1, 0.9], "a": [0.5, 2.0]}
    run_config.write_text(json.dumps(doc))
    assert run_cli("optimize", "--config", run_config, "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["pso"]["bounds"] == [[0.1, 0.9], [0.5, 2.0]] * 2


def test_optimize_no_feasible_point(tmp_path, run_config):
    robot = tmp_path / "weak.json"
    robot.write_text(json.dumps({"dh": [[0.1, 0.1, 0]] * 6, "v_max": [1e-4] * 6, "a_max": [1e-4] * 6}))
    doc = json.loads(run_config.read_text())
    doc["pso"]["bounds"] = {"v": [0.5, 0.9], "a": [1.0, 2.0]}
    doc["pso"]["max_iters"] = 5
    run_config.write_text(json.dumps(doc))
    assert run_cli("optimize", "--config", run_config, "--robot", robot, "--out", tmp_path) == 2
