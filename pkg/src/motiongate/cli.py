"""Command-line front end.

    motiongate gen-trace --seed 42 --output session.csv
    motiongate simulate session.csv
    motiongate analyze experimental.csv control.csv
    motiongate verify-table2 --json

Exit status: 0 success, 1 validation error, 2 tolerance/assertion failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import enum
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bus import BusConfig, transaction_duration_us
from .detector import DetectorConfig
from .errors import MotionGateError
from .harness import LATENCY_BUDGET_US, SimConfig, SimResult, run_simulation
from .ssq import Condition, SymptomReport, build_symptom_report, read_ssq_csv
from .table2 import TABLE2, RowCheck, perturb, verify_table2
from .trace import TraceGenConfig, generate_session_trace, read_trace, serialize_trace

log = logging.getLogger("motiongate")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_TOLERANCE = 2
EXIT_IO = 3


class CliFailure(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --------------------------------------------------------------------------
# Config assembly
# --------------------------------------------------------------------------


def _sim_config(args) -> SimConfig:
    bus_kw = {}
    if args.clock_hz is not None:
        bus_kw["clock_hz"] = args.clock_hz
    if args.payload_bytes is not None:
        bus_kw["payload_bytes"] = args.payload_bytes
    det_kw = {}
    if args.threshold_dps is not None:
        det_kw["threshold_dps"] = args.threshold_dps
    if args.processing_delay_us is not None:
        det_kw["processing_delay_us"] = args.processing_delay_us
    if args.clear_dwell_us is not None:
        det_kw["clear_dwell_us"] = args.clear_dwell_us
    kw = {}
    if args.period_us is not None:
        kw["period_us"] = args.period_us
    return SimConfig(
        bus=BusConfig(**bus_kw),
        detector=DetectorConfig(**det_kw),
        include_optical_latency=getattr(args, "include_optical_latency", False),
        **kw,
    )


def _trace_config(args) -> TraceGenConfig:
    kw = {"seed": args.seed}
    if args.session_s is not None:
        kw["session_s"] = args.session_s
    return TraceGenConfig(**kw)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    out = ["  ".join(h.rjust(w) if i else h.ljust(w) for i, (h, w) in enumerate(zip(headers, widths)))]
    out.append("  ".join("-" * w for w in widths))
    for r in rows:
        out.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
    return "\n".join(out)


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliFailure(f"cannot write {output}: {exc}", EXIT_IO) from exc
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# gen-trace
# --------------------------------------------------------------------------


def cmd_gen_trace(args) -> int:
    cfg = _trace_config(args)
    _sim_config(args)  # reject invalid overrides before writing anything
    trace = generate_session_trace(cfg)
    summary = {
        "samples": len(trace),
        "duration_s": trace.duration_us / 1e6,
        "seed": cfg.seed,
        "output": args.output,
    }
    _emit(serialize_trace(trace), args.output)
    stream = sys.stdout if args.output else sys.stderr
    if args.json:
        stream.write(json.dumps(summary) + "\n")
    else:
        stream.write(f"wrote {summary['samples']} samples ({summary['duration_s']:g} s)\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate
# --------------------------------------------------------------------------


def latency_summary(result: SimResult) -> dict:
    lat = [r.latency_us for r in result.latencies]
    if not lat:
        return {"count": 0, "min_us": None, "mean_us": None, "max_us": None}
    return {
        "count": len(lat),
        "min_us": min(lat),
        "mean_us": sum(lat) / len(lat),
        "max_us": max(lat),
    }


def simulation_report(trace_path: str, cfg: SimConfig, result: SimResult) -> dict:
    stats = latency_summary(result)
    passed = stats["max_us"] is None or stats["max_us"] < LATENCY_BUDGET_US
    return {
        "trace": trace_path,
        "config": _jsonable(cfg),
        "transaction_us": transaction_duration_us(cfg.bus),
        "worst_case_bound_us": cfg.worst_case_latency_us(),
        "budget_us": LATENCY_BUDGET_US,
        "events": result.n_events,
        "commands": [{"issue_us": c.issue_us, "drive_on": c.drive_on} for c in result.commands],
        "latency": stats,
        "latencies": [r._asdict() for r in result.latencies],
        "missed_onsets_us": list(result.missed_onsets),
        "blur_fraction": result.blur_fraction,
        "verdict": "PASS" if passed else "FAIL",
    }


def format_simulation_report(rep: dict) -> str:
    cfg = rep["config"]
    lines = [
        f"trace: {rep['trace']}",
        "config:",
        f"  clock_hz={cfg['bus']['clock_hz']:g} payload_bytes={cfg['bus']['payload_bytes']} "
        f"addressing_bytes={cfg['bus']['addressing_bytes']} framing_clocks={cfg['bus']['framing_clocks']}",
        f"  period_us={cfg['period_us']} threshold_dps={cfg['detector']['threshold_dps']:g} "
        f"processing_delay_us={cfg['detector']['processing_delay_us']:g} "
        f"clear_dwell_us={cfg['detector']['clear_dwell_us']:g}",
        f"  transaction_us={rep['transaction_us']:g} worst_case_bound_us={rep['worst_case_bound_us']:g}",
        "",
        f"events: {rep['events']}",
        f"commands: {len(rep['commands'])}",
    ]
    cmd_rows = [
        [str(i), f"{c['issue_us']:.1f}", "on (clear)" if c["drive_on"] else "off (blur)"]
        for i, c in enumerate(rep["commands"])
    ]
    if cmd_rows:
        lines.append(_table(["#", "issue_us", "drive"], cmd_rows))
    lines.append("")
    st = rep["latency"]
    if st["count"]:
        lines.append(
            _table(
                ["latency", "count", "min_us", "mean_us", "max_us"],
                [["gate", str(st["count"]), f"{st['min_us']:.1f}", f"{st['mean_us']:.1f}", f"{st['max_us']:.1f}"]],
            )
        )
    else:
        lines.append("latency: no motion onsets")
    if rep["missed_onsets_us"]:
        lines.append(f"missed onsets (never sampled): {len(rep['missed_onsets_us'])}")
    lines += [
        "",
        f"blur_fraction: {rep['blur_fraction']:.6f}",
        f"verdict: {rep['verdict']} (budget {rep['budget_us']:g} us)",
    ]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    try:
        trace = read_trace(args.trace)
    except OSError as exc:
        raise CliFailure(f"cannot read {args.trace}: {exc}", EXIT_IO) from exc
    result = run_simulation(trace, cfg)
    rep = simulation_report(args.trace, cfg, result)
    text = json.dumps(rep, indent=2) + "\n" if args.json else format_simulation_report(rep)
    _emit(text, args.output)
    return EXIT_OK if rep["verdict"] == "PASS" else EXIT_TOLERANCE


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------

TABLE2_HEADERS = [
    "Symptom Pairs (blurred-clear)",
    "Mean",
    "Std. Deviation",
    "Std. Error Mean",
    "95% CI Lower",
    "95% CI Upper",
    "t",
    "df",
    "Sig. (2-tailed)",
    "",
]


def _fmt_t(t: float) -> str:
    return f"{t:.3f}" if math.isfinite(t) else ("-inf" if t < 0 else "inf")


def format_symptom_report(report: SymptomReport) -> str:
    rows = []
    for s, r in report.results.items():
        rows.append([
            s, f"{r.mean:.5f}", f"{r.sd:.5f}", f"{r.se:.5f}", f"{r.ci_low:.5f}", f"{r.ci_high:.5f}",
            _fmt_t(r.t), str(r.df), f"{r.p:.3f}", "*" if r.significant(report.alpha) else "",
        ])
    body = _table(TABLE2_HEADERS, rows)
    return f"MATCHED SAMPLES T-TEST (n={len(report.participants)})\n{body}\n* p < {report.alpha:g}\n"


def symptom_report_json(report: SymptomReport) -> dict:
    return {
        "n": len(report.participants),
        "alpha": report.alpha,
        "symptoms": {
            s: {**_jsonable(r), "significant": r.significant(report.alpha)}
            for s, r in report.results.items()
        },
        "significant": report.significant,
    }


def _load_condition(path: str, condition: Condition):
    try:
        responses = read_ssq_csv(path)
    except OSError as exc:
        raise CliFailure(f"cannot read {path}: {exc}", EXIT_IO) from exc
    relabelled = []
    for r in responses:
        if r.condition is not condition:
            log.warning("%s: participant %s labelled %s, treated as %s",
                        path, r.participant_id, r.condition.value, condition.value)
        relabelled.append(dataclasses.replace(r, condition=condition))
    return relabelled


def cmd_analyze(args) -> int:
    experimental = _load_condition(args.experimental, Condition.EXPERIMENTAL)
    control = _load_condition(args.control, Condition.CONTROL)
    report = build_symptom_report(experimental, control)
    if args.json:
        text = json.dumps(symptom_report_json(report), indent=2) + "\n"
    else:
        text = format_symptom_report(report)
    _emit(text, args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify-table2
# --------------------------------------------------------------------------


def format_table2_checks(checks: list[RowCheck]) -> str:
    rows = []
    for c in checks:
        d = c.deviations
        rows.append([
            c.symptom, f"{d['se']:+.6f}", f"{d['ci_low']:+.6f}", f"{d['ci_high']:+.6f}",
            f"{d['t']:+.5f}", f"{d['p']:+.5f}", "PASS" if c.passed else "FAIL",
        ])
    body = _table(["symptom", "d_se", "d_ci_low", "d_ci_high", "d_t", "d_p", "status"], rows)
    n_pass = sum(c.passed for c in checks)
    tol = checks[0].tolerance if checks else 0.0
    return f"{body}\n{n_pass}/{len(checks)} rows within +/-{tol:g}\n"


def cmd_verify_table2(args) -> int:
    rows = list(TABLE2)
    for spec in args.perturb or []:
        name, _, delta = spec.partition("=")
        try:
            rows = perturb(rows, name, float(delta))
        except ValueError as exc:
            raise CliFailure(f"bad --perturb {spec!r}: {exc}", EXIT_VALIDATION) from exc
    checks = verify_table2(rows)
    if args.json:
        doc = {
            "tolerance": checks[0].tolerance,
            "rows": [
                {
                    "symptom": c.symptom,
                    "computed": _jsonable(c.computed),
                    "printed": c.printed._asdict(),
                    "deviations": c.deviations,
                    "passed": c.passed,
                }
                for c in checks
            ],
            "passed": sum(c.passed for c in checks),
            "total": len(checks),
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = format_table2_checks(checks)
    _emit(text, args.output)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_TOLERANCE


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _common_parser(suppress: bool) -> argparse.ArgumentParser:
    # Subparsers use SUPPRESS so flags given before the subcommand are not reset.
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=d(0), help="pseudo-random seed (default 0)")
    g.add_argument("--output", "-o", default=d(None), help="output path (default stdout)")
    g.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    o = p.add_argument_group("config overrides")
    for flag, typ in [
        ("--threshold-dps", float),
        ("--period-us", int),
        ("--clock-hz", float),
        ("--payload-bytes", int),
        ("--processing-delay-us", float),
        ("--clear-dwell-us", float),
        ("--session-s", float),
    ]:
        o.add_argument(flag, type=typ, default=d(None))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="motiongate",
        description="Motion-gated display blur simulation and SSQ analysis.",
        parents=[_common_parser(suppress=False)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _common_parser(suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-trace", parents=[common], help="write a synthetic session trace CSV")
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("simulate", parents=[common], help="run the closed loop on a trace CSV")
    p.add_argument("trace")
    p.add_argument("--include-optical-latency", action="store_true",
                   help="add the shutter fall time to each latency")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", parents=[common], help="matched-samples t-test on two SSQ CSVs")
    p.add_argument("experimental", help="SSQ CSV for the blurred condition")
    p.add_argument("control", help="SSQ CSV for the clear condition")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify-table2", parents=[common], help="recompute the published t-test table")
    p.add_argument("--perturb", action="append", metavar="SYMPTOM=DELTA",
                   help="shift one row's sd before checking (repeatable)")
    p.set_defaults(func=cmd_verify_table2)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except MotionGateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
