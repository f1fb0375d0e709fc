"""
Command-line experiment runner.

    radial-blowup run    --config cfg.json [--out-dir DIR] [--cells M] [--quiet]
    radial-blowup sweep  --config cfg.json [--out-dir DIR] [--jobs J]
    radial-blowup oracle --config cfg.json

Exit codes: 0 every applicable verdict passes, 1 error, 2 audit failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from radial_blowup.characteristics import CharacteristicFan, crossing_time_free, evolve_fan
from radial_blowup.config import RunConfig, load_config, n_label
from radial_blowup.diagnostics import BlowupReport, build_report, diagnostics_records
from radial_blowup.errors import BlowupError, ConfigurationError
from radial_blowup.model import make_initial_state
from radial_blowup.solver import Trajectory, run

EXIT_PASS, EXIT_ERROR, EXIT_AUDIT = 0, 1, 2

_nullable_number = {"type": ["number", "null"]}
_nullable_bool = {"type": ["boolean", "null"]}

SUMMARY_SCHEMA = {
    "type": "object",
    "required": [
        "config_echo", "hypotheses", "bound_T", "detected", "oracle_time", "verdicts",
        "termination", "floor_mass_injected",
    ],
    "properties": {
        "config_echo": {"type": "object"},
        "hypotheses": {
            "type": "object",
            "required": ["applicable", "reasons", "H0"],
            "properties": {
                "applicable": {"type": "boolean"},
                "reasons": {"type": "array", "items": {"type": "string"}},
                "H0": {"type": "object", "additionalProperties": {"type": "number"}},
            },
        },
        "bound_T": {"type": "object", "additionalProperties": _nullable_number},
        "detected": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["time", "mechanism"],
                    "properties": {
                        "time": {"type": "number"},
                        "mechanism": {"enum": ["gradient", "dt_underflow", "non_finite"]},
                    },
                },
            ]
        },
        "oracle_time": _nullable_number,
        "verdicts": {
            "type": "object",
            "required": ["detected_le_bound", "H_ge_floor"],
            "properties": {"detected_le_bound": _nullable_bool, "H_ge_floor": _nullable_bool},
        },
        "audits": {"type": "object", "additionalProperties": _nullable_bool},
        "termination": {"enum": ["t_max", "blowup_detected", "dt_underflow", "overflow"]},
        "support_reached_boundary": _nullable_number,
        "floor_mass_injected": {"type": "number"},
        "proxy_based": {"type": "boolean"},
    },
}


@dataclass
class RunResult:
    config: RunConfig
    trajectory: Trajectory
    report: BlowupReport
    fan: CharacteristicFan | None
    records: list


def execute(config: RunConfig) -> RunResult:
    """Run solver, oracle (pressureless, delta in {0, 1}) and diagnostics."""
    params = config.params()
    state0 = make_initial_state(config.profile, config.grid())
    trajectory = run(params, state0, config.scheme, config.t_max, config.snapshot_cadence)
    fan = None
    if params.K == 0 and params.delta in (0, 1):
        fan = evolve_fan(state0, params, t_max=max(config.t_max, 1e-12))
    report = build_report(trajectory, params, list(config.n_list), fan)
    records = diagnostics_records(trajectory, params, list(config.n_list))
    return RunResult(config, trajectory, report, fan, records)


def exit_code(report: BlowupReport) -> int:
    return EXIT_PASS if report.passed else EXIT_AUDIT


def _fmt(x):
    return "" if x is None else repr(float(x))


def series_csv(result: RunResult) -> str:
    labels = [n_label(n) for n in result.config.n_list]
    header = ["t", *(f"H_{s}" for s in labels), "mass", "max_abs_V", "max_grad_V", "max_rho",
              *(f"riccati_floor_{s}" for s in labels), *(f"cs_slack_{s}" for s in labels)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    ns = result.config.n_list
    for rec in result.records:
        writer.writerow([
            _fmt(rec.t), *(_fmt(rec.H[n]) for n in ns), _fmt(rec.mass), _fmt(rec.max_abs_V),
            _fmt(rec.max_grad_V), _fmt(rec.max_rho), *(_fmt(rec.riccati_floor[n]) for n in ns),
            *(_fmt(rec.cs_slack[n]) for n in ns),
        ])
    return buf.getvalue()


def summary_dict(result: RunResult) -> dict:
    report = result.report
    reasons = []
    for hyp in report.hypotheses.values():
        for reason in hyp.reasons:
            if reason not in reasons:
                reasons.append(reason)
    ns = result.config.n_list
    detected = report.detected
    return {
        "config_echo": result.config.to_dict(),
        "hypotheses": {
            "applicable": all(h.applicable for h in report.hypotheses.values()),
            "reasons": reasons,
            "H0": {n_label(n): report.H0[n] for n in ns},
        },
        "bound_T": {n_label(n): report.bound_T[n] for n in ns},
        "detected": None if detected is None else {"time": detected.time,
                                                   "mechanism": detected.mechanism},
        "oracle_time": report.oracle_time,
        "verdicts": dict(report.verdicts),
        "audits": dict(report.audits),
        "termination": report.termination,
        "support_reached_boundary": report.support_reached_boundary,
        "floor_mass_injected": report.floor_mass_injected,
        "proxy_based": report.proxy_based,
    }


def _dat(result: RunResult) -> str:
    text = series_csv(result).splitlines()
    lines = ["# " + " ".join(text[0].split(","))]
    for row in text[1:]:
        lines.append(" ".join(v if v else "NaN" for v in row.split(",")))
    return "\n".join(lines) + "\n"


def _gnuplot(result: RunResult) -> str:
    labels = [n_label(n) for n in result.config.n_list]
    k = len(labels)
    plots = []
    for j, s in enumerate(labels):
        plots.append(f"'series.dat' using 1:{2 + j} with lines title 'H_{s}'")
        plots.append(f"'series.dat' using 1:{6 + k + j} with lines dashtype 2 "
                     f"title 'riccati floor {s}'")
    return "\n".join([
        "set terminal pngcairo size 900,600",
        "set output 'moment.png'",
        "set xlabel 't'",
        "set ylabel 'weighted moment'",
        "set key left top",
        "plot " + ", \\\n     ".join(plots),
        "",
    ])


def write_outputs(result: RunResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "series.csv").write_text(series_csv(result), encoding="utf-8")
    (out_dir / "summary.json").write_text(
        json.dumps(summary_dict(result), indent=2) + "\n", encoding="utf-8")
    (out_dir / "series.dat").write_text(_dat(result), encoding="utf-8")
    (out_dir / "plot.gp").write_text(_gnuplot(result), encoding="utf-8")


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def cmd_run(config: RunConfig, out_dir=None, cells=None, quiet=False) -> int:
    try:
        if cells is not None:
            config = config.replace(cells=int(cells))
        if out_dir is not None:
            config = config.replace(output_dir=str(out_dir))
        result = execute(config)
        write_outputs(result, Path(config.output_dir))
    except (BlowupError, OSError) as exc:
        _err(exc)
        return EXIT_ERROR
    code = exit_code(result.report)
    if not quiet:
        summary = summary_dict(result)
        det = summary["detected"]
        print(f"termination: {summary['termination']}")
        print(f"detected: {det['time']!r} ({det['mechanism']})" if det else "detected: none")
        print(f"bound_T: {summary['bound_T']}")
        print(f"verdicts: {summary['verdicts']} audits: {summary['audits']}")
    return code


def _run_case(args):
    config, name = args
    try:
        result = execute(config)
        write_outputs(result, Path(config.output_dir))
    except (BlowupError, OSError) as exc:
        return {"case": name, "n": config.n_list[0], "error": str(exc), "exit_code": EXIT_ERROR}
    report = result.report
    n = config.n_list[0]
    det = report.detected
    return {
        "case": name,
        "n": n,
        "H0": report.H0[n],
        "T_n": report.bound_T[n],
        "detected": None if det is None else det.time,
        "mechanism": None if det is None else det.mechanism,
        "verdict": report.verdicts["detected_le_bound"],
        "passed": report.passed,
        "exit_code": exit_code(report),
    }


def sweep_cases(config: RunConfig, out_dir: Path) -> list:
    """One case per (profile, n) pair, each with its own output directory."""
    if config.profiles is not None and not config.profiles:
        raise ConfigurationError("profile grid must be a nonempty list", field="profiles")
    profiles = config.profiles if config.profiles is not None else (config.profile,)
    cases = []
    for i, profile in enumerate(profiles):
        for n in config.n_list:
            name = f"case_{i:03d}_n_{n_label(n)}"
            sub = config.replace(profile=profile, profiles=None, n_list=(n,),
                                 output_dir=str(out_dir / name))
            cases.append((sub, name))
    return cases


def cmd_sweep(config: RunConfig, out_dir=None, jobs=1) -> int:
    try:
        root = Path(out_dir if out_dir is not None else config.output_dir)
        cases = sweep_cases(config, root)
        if jobs > 1 and len(cases) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_run_case, cases))
        else:
            rows = [_run_case(c) for c in cases]
        if any(r["exit_code"] == EXIT_ERROR for r in rows):
            code = EXIT_ERROR
        elif any(r["exit_code"] == EXIT_AUDIT for r in rows):
            code = EXIT_AUDIT
        else:
            code = EXIT_PASS
        root.mkdir(parents=True, exist_ok=True)
        summary = {"cases": rows, "passed": code == EXIT_PASS, "exit_code": code}
        (root / "sweep_summary.json").write_text(json.dumps(summary, indent=2) + "\n",
                                                 encoding="utf-8")
    except (BlowupError, OSError) as exc:
        _err(exc)
        return EXIT_ERROR
    return code


def cmd_oracle(config: RunConfig) -> int:
    try:
        params = config.params()
        state0 = make_initial_state(config.profile, config.grid())
        fan = evolve_fan(state0, params, t_max=max(config.t_max, 1e-12))
        free = crossing_time_free(state0.grid.centers, state0.v)
    except BlowupError as exc:
        _err(exc)
        return EXIT_ERROR
    print(json.dumps({
        "crossing_time_free": free,
        "first_crossing_time": fan.first_crossing_time,
        "origin_collapse_time": fan.origin_collapse_time,
        "exit_time": fan.exit_time,
    }, indent=2))
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radial-blowup", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="single run with diagnostics")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out-dir")
    p_run.add_argument("--cells", type=int)
    p_run.add_argument("--quiet", action="store_true")
    p_sweep = sub.add_parser("sweep", help="one run per (profile, n) case")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out-dir")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_oracle = sub.add_parser("oracle", help="characteristic oracle only")
    p_oracle.add_argument("--config", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigurationError as exc:
        _err(exc)
        return EXIT_ERROR
    if args.command == "run":
        return cmd_run(config, out_dir=args.out_dir, cells=args.cells, quiet=args.quiet)
    if args.command == "sweep":
        return cmd_sweep(config, out_dir=args.out_dir, jobs=args.jobs)
    return cmd_oracle(config)


if __name__ == "__main__":
    sys.exit(main())
