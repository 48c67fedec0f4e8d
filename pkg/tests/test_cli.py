import json

import numpy as np
import pytest

from coverplan.cli import main

SMALL = {
    "name": "cli-small",
    "boundary": [[0, 0], [20, 0], [20, 10], [0, 10]],
    "team_size": 3,
    "sensor": {"decay": 0.15, "radius": 30.0},
    "candidate_spacing": 5.0,
    "refine": {"max_iterations": 8},
}


@pytest.fixture()
def small_scenario(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL))
    return str(path)


def read_artifact(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# coverplan ")
    return lines[1:]


def test_evaluate_with_positions(tmp_path, small_scenario, capsys):
    pos = tmp_path / "pos.csv"
    pos.write_text("agent,x,y\n0,5.0,5.0\n1,15.0,5.0\n")
    code = main(["evaluate", "--scenario", small_scenario,
                 "--positions-file", str(pos), "--out", str(tmp_path / "o")])
    assert code == 0
    out = capsys.readouterr().out
    assert "agents: 2" in out
    assert "coverage:" in out


def test_greedy_writes_positions(tmp_path, small_scenario, capsys):
    out = tmp_path / "art"
    code = main(["greedy", "--scenario", small_scenario, "--out", str(out)])
    assert code == 0
    lines = read_artifact(out / "greedy_positions.csv")
    assert lines[0] == "agent,x,y"
    assert len(lines) == 1 + SMALL["team_size"]
    printed = capsys.readouterr().out
    assert "coverage:" in printed and "lazy" in printed


def test_greedy_positions_round_trip(tmp_path, small_scenario, capsys):
    out = tmp_path / "art"
    main(["greedy", "--scenario", small_scenario, "--out", str(out)])
    greedy_out = capsys.readouterr().out
    greedy_h = [l for l in greedy_out.splitlines() if l.startswith("coverage:")][0]
    greedy_value = float(greedy_h.split()[1])
    code = main(["evaluate", "--scenario", small_scenario,
                 "--positions-file", str(out / "greedy_positions.csv"),
                 "--out", str(tmp_path / "o2")])
    assert code == 0
    eval_out = capsys.readouterr().out
    eval_value = float(
        [l for l in eval_out.splitlines() if l.startswith("coverage:")][0].split()[1]
    )
    assert eval_value == pytest.approx(greedy_value, rel=1e-10)


def test_gga_writes_positions_and_trace(tmp_path, small_scenario):
    out = tmp_path / "art"
    code = main(["gga", "--scenario", small_scenario, "--out", str(out)])
    assert code == 0
    pos_lines = read_artifact(out / "gga_positions.csv")
    assert pos_lines[0] == "agent,x,y"
    trace = read_artifact(out / "gga_trace.csv")
    assert trace[0] == "iter,agent,x,y,H,grad_norm"
    assert len(trace) > 1 + SMALL["team_size"]


def test_bounds_artifact(tmp_path, small_scenario, capsys):
    out = tmp_path / "art"
    code = main(["bounds", "--scenario", small_scenario, "--out", str(out)])
    assert code == 0
    lines = read_artifact(out / "bounds.csv")
    assert lines[0] == "c,alpha,T,E,L"
    c, alpha, t, e, l = map(float, lines[1].split(","))
    assert 0 <= c <= 1 and 0 <= alpha <= 1
    assert l == max(t, e)
    assert "guarantee" in capsys.readouterr().out


def test_sweep_artifact(tmp_path, small_scenario):
    out = tmp_path / "art"
    code = main(["sweep", "--scenario", small_scenario, "--out", str(out),
                 "--sweep", "lambda:0.05:0.5:4"])
    assert code == 0
    lines = read_artifact(out / "sweep.csv")
    assert lines[0] == "param,c,alpha,T,E,L"
    assert len(lines) == 5
    params = [float(l.split(",")[0]) for l in lines[1:]]
    assert params == pytest.approx(list(np.linspace(0.05, 0.5, 4)))


def test_sweep_rejects_malformed_spec(tmp_path, small_scenario):
    code = main(["sweep", "--scenario", small_scenario,
                 "--out", str(tmp_path / "a"), "--sweep", "lambda:0.5"])
    assert code == 2
    code = main(["sweep", "--scenario", small_scenario,
                 "--out", str(tmp_path / "b"), "--sweep", "mu:0.1:0.5:3"])
    assert code == 2


def test_oracle_small_instance(tmp_path, small_scenario, capsys):
    out = tmp_path / "art"
    code = main(["oracle", "--scenario", small_scenario, "--out", str(out), "--n", "2"])
    assert code == 0
    assert "optimal subset" in capsys.readouterr().out
    lines = read_artifact(out / "oracle_positions.csv")
    assert lines[0] == "agent,x,y"
    assert len(lines) == 3


def test_oracle_rejects_large_instance(tmp_path, capsys):
    code = main(["oracle", "--scenario", "empty_60x50", "--out", str(tmp_path / "a")])
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_check_reports_clean(tmp_path, small_scenario, capsys):
    out = tmp_path / "art"
    code = main(["check", "--scenario", small_scenario, "--out", str(out),
                 "--trials", "60"])
    assert code == 0
    lines = read_artifact(out / "checks.csv")
    assert lines[0] == "check,trials,seed,violations,max_violation"
    assert len(lines) == 3
    for line in lines[1:]:
        assert int(line.split(",")[3]) == 0
    assert "violations" in capsys.readouterr().out


def test_heatmap_artifacts(tmp_path, small_scenario, capsys):
    out = tmp_path / "art"
    code = main(["heatmap", "--scenario", small_scenario, "--out", str(out)])
    assert code == 0
    grid_lines = read_artifact(out / "heatmap.csv")
    assert len(grid_lines) == 10
    assert len(grid_lines[0].split(",")) == 20
    pgm = (out / "heatmap.pgm").read_text().splitlines()
    assert pgm[0] == "P2"
    printed = capsys.readouterr().out
    assert "detection >= 0.97" in printed


def test_bundled_scenario_by_name(tmp_path, capsys):
    code = main(["evaluate", "--scenario", "empty_60x50",
                 "--positions-file", _write_center(tmp_path),
                 "--out", str(tmp_path / "o")])
    assert code == 0
    assert "coverage:" in capsys.readouterr().out


def _write_center(tmp_path):
    p = tmp_path / "center.csv"
    p.write_text("agent,x,y\n0,30.0,25.0\n")
    return str(p)


def test_overrides_change_results(tmp_path, small_scenario, capsys):
    main(["greedy", "--scenario", small_scenario, "--out", str(tmp_path / "a")])
    base = capsys.readouterr().out
    main(["greedy", "--scenario", small_scenario, "--out", str(tmp_path / "b"),
          "--n", "1"])
    fewer = capsys.readouterr().out
    assert base != fewer
    lines = read_artifact(tmp_path / "b" / "greedy_positions.csv")
    assert len(lines) == 2
    main(["bounds", "--scenario", small_scenario, "--out", str(tmp_path / "c")])
    capsys.readouterr()
    main(["bounds", "--scenario", small_scenario, "--out", str(tmp_path / "d"),
          "--lambda", "0.9"])
    hot = read_artifact(tmp_path / "d" / "bounds.csv")
    cold = read_artifact(tmp_path / "c" / "bounds.csv")
    assert hot != cold


def test_artifacts_are_deterministic(tmp_path, small_scenario):
    for d in ("r1", "r2"):
        main(["gga", "--scenario", small_scenario, "--out", str(tmp_path / d)])
        main(["check", "--scenario", small_scenario, "--out", str(tmp_path / d),
              "--trials", "40"])
    for name in ("gga_positions.csv", "gga_trace.csv", "checks.csv"):
        a = read_artifact(tmp_path / "r1" / name)
        b = read_artifact(tmp_path / "r2" / name)
        assert a == b, name


def test_alpha_domain_flag(tmp_path, capsys):
    blocked = tmp_path / "blocked.json"
    blocked.write_text(json.dumps({
        **SMALL,
        "obstacles": [[[9, 4], [11, 4], [11, 6], [9, 6]]],
    }))
    main(["bounds", "--scenario", str(blocked), "--out", str(tmp_path / "f")])
    capsys.readouterr()
    main(["bounds", "--scenario", str(blocked), "--out", str(tmp_path / "o"),
          "--alpha-domain", "omega"])
    capsys.readouterr()
    feasible = read_artifact(tmp_path / "f" / "bounds.csv")[1].split(",")
    omega = read_artifact(tmp_path / "o" / "bounds.csv")[1].split(",")
    # obstacle-interior cells are invisible, so the wider domain pins alpha at 1
    assert float(omega[1]) == 1.0
    assert float(omega[1]) >= float(feasible[1])


def test_invalid_scenario_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**SMALL, "team_size": -3}))
    code = main(["greedy", "--scenario", str(bad), "--out", str(tmp_path / "a")])
    assert code == 2
    assert "error:" in capsys.readouterr().err
    code = main(["greedy", "--scenario", str(tmp_path / "ghost.json"),
                 "--out", str(tmp_path / "b")])
    assert code == 2


def test_bad_positions_file_exits_2(tmp_path, small_scenario, capsys):
    pos = tmp_path / "pos.csv"
    pos.write_text("agent,x,y\n0,5.0\n")
    code = main(["evaluate", "--scenario", small_scenario,
                 "--positions-file", str(pos), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "pos.csv" in capsys.readouterr().err
