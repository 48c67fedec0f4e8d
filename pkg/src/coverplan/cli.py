"""Batch command-line front end.

Every command reads one scenario file, applies flag overrides, runs a module,
prints a human summary, and (with ``--out``) writes CSV artifacts that are
byte-identical across runs apart from the version header line.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import bound_report, sweep_bounds
from .errors import (
    CoverplanError,
    DegenerateCandidateError,
    EmptyCandidateSetError,
    GeometryError,
    InstanceTooLargeError,
    InvalidParameterError,
    ScenarioError,
)
from .gradient import refine
from .greedy import greedy_place
from .oracle import brute_force, check_definition_equivalence, check_submodular
from .scenario import bundled_scenario_path, parse_scenario
from .sensing import DetectionCache, detection_matrix, joint_detection

_VALIDATION_ERRORS = (
    ScenarioError,
    InvalidParameterError,
    GeometryError,
    EmptyCandidateSetError,
    DegenerateCandidateError,
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    common.add_argument("--out", default=None, help="directory for CSV artifacts")
    common.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    common.add_argument("--grid-h", type=float, default=None, dest="grid_h",
                        help="override the quadrature cell size")
    common.add_argument("--candidates-spacing", type=float, default=None,
                        dest="candidates_spacing", help="override the candidate lattice spacing")
    common.add_argument("--n", type=int, default=None, help="override the team size")
    common.add_argument("--lambda", type=float, default=None, dest="sensing_decay",
                        help="override the sensing decay rate")
    common.add_argument("--delta", type=float, default=None, dest="sensing_radius",
                        help="override the sensing radius")
    common.add_argument("--alpha-domain", choices=("feasible", "omega"), default="feasible",
                        dest="alpha_domain",
                        help="cell domain for the elemental curvature minimum")

    parser = argparse.ArgumentParser(
        prog="coverplan",
        description="Coverage planning: greedy placement, certified bounds, gradient refinement.",
    )
    parser.add_argument("--version", action="version", version=f"coverplan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", parents=[common],
                       help="objective value of a placement read from CSV")
    p.add_argument("--positions-file", required=True, help="CSV with agent,x,y rows")

    p = sub.add_parser("greedy", parents=[common], help="greedy placement on the candidate lattice")
    p.add_argument("--method", choices=("eager", "lazy"), default="lazy")

    sub.add_parser("gga", parents=[common], help="greedy placement plus gradient refinement")
    sub.add_parser("bounds", parents=[common], help="curvatures and certified greedy guarantees")

    p = sub.add_parser("sweep", parents=[common], help="bounds along a sensing-parameter sweep")
    p.add_argument("--sweep", required=True, metavar="PARAM:START:STOP:STEPS",
                   help="PARAM is 'lambda' or 'delta'")

    sub.add_parser("oracle", parents=[common], help="exhaustive optimal placement (small instances)")

    p = sub.add_parser("check", parents=[common], help="randomized submodularity property checks")
    p.add_argument("--trials", type=int, default=1000, help="trials for the nested-gain check")

    p = sub.add_parser("heatmap", parents=[common], help="joint detection field as CSV and PGM")
    p.add_argument("--positions-file", default=None,
                   help="CSV with agent,x,y rows; defaults to running gga")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CoverplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


class _Run:
    """Scenario plus everything built from it, after flag overrides."""

    def __init__(self, args):
        spec = args.scenario
        if not Path(spec).exists() and "/" not in spec and "\\" not in spec:
            # bare names refer to the bundled scenario library
            spec = bundled_scenario_path(spec.removesuffix(".json"))
        scenario = parse_scenario(spec)
        self.scenario = scenario.with_overrides(
            grid_cell_size=args.grid_h,
            candidate_spacing=args.candidates_spacing,
            team_size=args.n,
            decay=args.sensing_decay,
            radius=args.sensing_radius,
            seed=args.seed,
        )
        self.space = self.scenario.build_space()
        self.grid = self.scenario.build_grid(self.space)
        self.sensor = self.scenario.build_sensor()
        self.out = Path(args.out) if args.out else None
        if self.out:
            self.out.mkdir(parents=True, exist_ok=True)

    def candidates(self) -> np.ndarray:
        cand = self.scenario.build_candidates(self.space)
        if len(cand) == 0:
            raise EmptyCandidateSetError(
                f"no feasible candidate at spacing {self.scenario.candidate_spacing}"
            )
        return cand


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _write_csv(path: Path, header: str | None, rows):
    with open(path, "w") as f:
        f.write(f"# coverplan {__version__}\n")
        if header:
            f.write(header + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _write_positions(path: Path, positions: np.ndarray):
    _write_csv(path, "agent,x,y", [(i, float(x), float(y)) for i, (x, y) in enumerate(positions)])


def _read_positions(path) -> np.ndarray:
    rows = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ScenarioError(f"cannot read positions file {path}: {exc}") from exc
    for ln, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#") or line.lower().startswith("agent"):
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ScenarioError(f"{path}:{ln}: expected 'agent,x,y', got {line!r}")
        try:
            rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
        except ValueError as exc:
            raise ScenarioError(f"{path}:{ln}: {exc}") from exc
    if not rows:
        raise ScenarioError(f"positions file {path} holds no positions")
    rows.sort(key=lambda r: r[0])
    return np.array([[x, y] for _, x, y in rows])


def _dispatch(args) -> int:
    run = _Run(args)
    handler = {
        "evaluate": _cmd_evaluate,
        "greedy": _cmd_greedy,
        "gga": _cmd_gga,
        "bounds": _cmd_bounds,
        "sweep": _cmd_sweep,
        "oracle": _cmd_oracle,
        "check": _cmd_check,
        "heatmap": _cmd_heatmap,
    }[args.command]
    return handler(run, args)


def _cmd_evaluate(run: _Run, args) -> int:
    positions = _read_positions(args.positions_file)
    rows = detection_matrix(positions, run.space, run.grid.centers, run.sensor)
    value = run.grid.integrate(joint_detection(rows))
    print(f"agents: {len(positions)}")
    print(f"coverage: {_fmt(value)} of {_fmt(run.grid.total_mass())} attainable")
    return 0


def _cmd_greedy(run: _Run, args) -> int:
    cand = run.candidates()
    result = greedy_place(
        run.space, run.grid, run.sensor, cand, run.scenario.team_size, method=args.method
    )
    for i, (x, y) in enumerate(result.positions):
        print(f"agent {i}: ({_fmt(float(x))}, {_fmt(float(y))})")
    print(f"coverage: {_fmt(result.value)} ({result.evaluations} gain evaluations, {args.method})")
    if result.stopped_early:
        print(f"stopped after {len(result.indices)} picks: no remaining gain")
    if run.out:
        _write_positions(run.out / "greedy_positions.csv", result.positions)
    return 0


def _run_gga(run: _Run):
    cand = run.candidates()
    seed_result = greedy_place(run.space, run.grid, run.sensor, cand, run.scenario.team_size)
    refined = refine(
        seed_result.positions,
        run.space,
        run.grid,
        run.sensor,
        run.scenario.build_refine_config(),
    )
    return seed_result, refined


def _cmd_gga(run: _Run, args) -> int:
    seed_result, refined = _run_gga(run)
    print(f"greedy coverage: {_fmt(seed_result.value)}")
    print(
        f"refined coverage: {_fmt(refined.value)} "
        f"after {refined.steps[-1].iteration} iterations ({refined.reason})"
    )
    if run.out:
        _write_positions(run.out / "gga_positions.csv", refined.positions)
        _write_csv(run.out / "gga_trace.csv", "iter,agent,x,y,H,grad_norm", refined.trace_rows())
    return 0


def _cmd_bounds(run: _Run, args) -> int:
    cand = run.candidates()
    probs = detection_matrix(cand, run.space, run.grid.centers, run.sensor)
    report = bound_report(probs, run.grid, run.scenario.team_size, args.alpha_domain)
    print(
        f"total curvature {_fmt(report.total_curvature)} (candidate {report.worst_candidate}), "
        f"elemental curvature {_fmt(report.elemental_curvature)} "
        f"(candidate {report.worst_pair[0]}, cell {report.worst_pair[1]})"
    )
    print(
        f"guarantee from total {_fmt(report.from_total)}, "
        f"from elemental {_fmt(report.from_elemental)}, "
        f"certified {_fmt(report.certified)} for {report.team_size} agents"
    )
    if run.out:
        _write_csv(
            run.out / "bounds.csv",
            "c,alpha,T,E,L",
            [(
                report.total_curvature,
                report.elemental_curvature,
                report.from_total,
                report.from_elemental,
                report.certified,
            )],
        )
    return 0


def _parse_sweep(text: str):
    parts = text.split(":")
    if len(parts) != 4:
        raise ScenarioError(f"--sweep expects PARAM:START:STOP:STEPS, got {text!r}")
    param = {"lambda": "decay", "delta": "radius"}.get(parts[0])
    if param is None:
        raise ScenarioError(f"sweep parameter must be 'lambda' or 'delta', got {parts[0]!r}")
    try:
        start, stop = float(parts[1]), float(parts[2])
        steps = int(parts[3])
    except ValueError as exc:
        raise ScenarioError(f"bad sweep range {text!r}: {exc}") from exc
    if steps < 1:
        raise ScenarioError(f"sweep needs at least 1 step, got {steps}")
    if start <= 0 or stop <= 0:
        raise ScenarioError("sweep values must be positive")
    return param, np.linspace(start, stop, steps)


def _cmd_sweep(run: _Run, args) -> int:
    param, values = _parse_sweep(args.sweep)
    cand = run.candidates()
    cache = DetectionCache(cand, run.space, run.grid.centers)
    table = sweep_bounds(
        cache, run.grid, run.scenario.team_size, run.sensor, param, values, args.alpha_domain
    )
    rows = [
        (v, r.total_curvature, r.elemental_curvature, r.from_total, r.from_elemental, r.certified)
        for v, r in table
    ]
    label = "lambda" if param == "decay" else "delta"
    print(f"swept {label} over {len(rows)} values in [{_fmt(values[0])}, {_fmt(values[-1])}]")
    print(f"certified guarantee range: [{_fmt(min(r[5] for r in rows))}, "
          f"{_fmt(max(r[5] for r in rows))}]")
    if run.out:
        _write_csv(run.out / "sweep.csv", "param,c,alpha,T,E,L", rows)
    return 0


def _cmd_oracle(run: _Run, args) -> int:
    cand = run.candidates()
    result = brute_force(cand, run.scenario.team_size, run.space, run.grid, run.sensor)
    print(f"optimal subset: {list(result.best_subset)}")
    print(f"optimal coverage: {_fmt(result.best_value)} "
          f"({result.subsets_evaluated} subsets evaluated)")
    if run.out:
        _write_positions(run.out / "oracle_positions.csv", cand[list(result.best_subset)])
    return 0


def _cmd_check(run: _Run, args) -> int:
    cand = run.candidates()
    seed = run.scenario.seed
    sub = check_submodular(
        cand, run.space, run.grid, run.sensor, trials=args.trials, seed=seed
    )
    eq = check_definition_equivalence(
        cand, run.space, run.grid, run.sensor, trials=max(1, args.trials // 2), seed=seed
    )
    print(sub.as_text())
    print(eq.as_text())
    if run.out:
        _write_csv(
            run.out / "checks.csv",
            "check,trials,seed,violations,max_violation",
            [
                ("submodularity", sub.trials, sub.seed, sub.violations, sub.max_violation),
                (
                    "definition_equivalence",
                    eq.trials,
                    eq.seed,
                    eq.union_intersection_violations + eq.nested_gain_violations,
                    eq.max_violation,
                ),
            ],
        )
    total_bad = sub.violations + eq.union_intersection_violations + eq.nested_gain_violations
    return 1 if total_bad else 0


def _cmd_heatmap(run: _Run, args) -> int:
    if args.positions_file:
        positions = _read_positions(args.positions_file)
    else:
        _, refined = _run_gga(run)
        positions = refined.positions
    rows = detection_matrix(positions, run.space, run.grid.centers, run.sensor)
    detect = joint_detection(rows)
    grid = run.grid
    image = detect.reshape(grid.ny, grid.nx)[::-1]  # top row = largest y
    feas = detect[grid.feasible]
    high = float(np.mean(feas >= 0.97)) if len(feas) else 0.0
    mid = float(np.mean(feas >= 0.50)) if len(feas) else 0.0
    print(f"coverage: {_fmt(grid.integrate(detect))}")
    print(f"feasible cells with detection >= 0.97: {high:.1%}")
    print(f"feasible cells with detection >= 0.50: {mid:.1%}")
    if run.out:
        _write_csv(run.out / "heatmap.csv", None, image.tolist())
        _write_pgm(run.out / "heatmap.pgm", image)
    return 0


def _write_pgm(path: Path, image: np.ndarray):
    levels = np.rint(np.clip(image, 0.0, 1.0) * 255).astype(int)
    with open(path, "w") as f:
        f.write("P2\n")
        f.write(f"# coverplan {__version__}\n")
        f.write(f"{levels.shape[1]} {levels.shape[0]}\n255\n")
        for row in levels:
            f.write(" ".join(str(v) for v in row) + "\n")


if __name__ == "__main__":
    raise SystemExit(main())
