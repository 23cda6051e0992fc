"""Command-line interface: ``qdiadd gen|dualize|sim|check|errors|report``."""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager
from pathlib import Path

from . import netlist as nl
from .adders import STANDARD_APPROX_SIZES, AdderConfig, build
from .approx import ErrorStats, error_stats
from .bench import report_vectors, table_report
from .cells import DEFAULT_LIBRARY, Library
from .check import check_all, format_report, verify_early_reset
from .dualize import dualize
from .errors import QDIError
from .railcode import Protocol
from .sim import run_sequence
from .tracefile import write_vcd


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _library(args) -> Library:
    return Library.load(args.library) if args.library else DEFAULT_LIBRARY


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _protocols(text: str) -> list[Protocol]:
    if text.lower() == "both":
        return [Protocol.RTZ, Protocol.RTO]
    return [Protocol(text.upper())]


def _config_args(p: argparse.ArgumentParser, width: int = 32) -> None:
    p.add_argument("--width", type=int, default=width, help="operand width in bits (default %(default)s)")
    p.add_argument("--approx", type=int, default=0, metavar="K",
                   help="number of approximated low bits, 0 for the accurate adder")
    p.add_argument("--protocol", default="RTZ", type=str.upper, choices=["RTZ", "RTO"])


def _stage_from_args(args):
    if getattr(args, "netlist", None):
        return nl.load(args.netlist)
    return build(AdderConfig(args.width, args.approx, Protocol(args.protocol)))


def cmd_gen(args) -> int:
    cfg = AdderConfig(args.width, args.approx, Protocol(args.protocol))
    net = build(cfg, stage=args.stage)
    with _output(args.out) as fh:
        fh.write(nl.serialize(net))
    return 0


def cmd_dualize(args) -> int:
    with _output(args.out) as fh:
        fh.write(nl.serialize(dualize(nl.load(args.netlist))))
    return 0


def cmd_sim(args) -> int:
    stage = _stage_from_args(args)
    width = int(stage.metadata.get("width", 0)) or len(stage.in_ports) // 2
    vectors = report_vectors(width, args.vectors, args.seed) if args.worst_case else args.vectors
    res = run_sequence(stage, vectors, _library(args), seed=args.seed, record_trace=bool(args.trace))
    if args.trace:
        with open(args.trace, "w") as fh:
            write_vcd(res.trace, fh)
    if args.out:
        with _output(args.out) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "a", "b", "result", "forward_latency", "reverse_latency", "cycle_time"])
            for i, ((a, b), value, t) in enumerate(zip(res.vectors, res.results, res.timings)):
                w.writerow([i, a, b, value, t.forward_latency, t.reverse_latency, t.cycle_time])
    print(f"vectors {len(res.vectors)}  mismatches {len(res.mismatches)}")
    print(f"forward max {res.max_forward:g} mean {res.mean_forward:.3f}")
    print(f"reverse max {res.max_reverse:g} mean {res.mean_reverse:.3f}")
    print(f"cycle   max {max(t.cycle_time for t in res.timings):g}")
    for i in res.mismatches[:10]:
        a, b = res.vectors[i]
        print(f"mismatch at vector {i}: a={a} b={b} got {res.results[i]}", file=sys.stderr)
    return 1 if res.mismatches else 0


def cmd_check(args) -> int:
    stage = _stage_from_args(args)
    lib = _library(args)
    violations = []
    if args.early_reset:
        v = verify_early_reset(stage, args.early_reset.split(","), lib,
                               outputs=args.outputs.split(",") if args.outputs else None)
        violations += [v] if v else []
    else:
        res = run_sequence(stage, args.vectors, lib, seed=args.seed, record_trace=True)
        violations += check_all(res.trace, stage)
        if res.mismatches:
            print(f"{len(res.mismatches)} functional mismatches", file=sys.stderr)
            if not violations:
                return 1
    with _output(args.out) as fh:
        fh.write(format_report(violations))
    if not violations:
        print("no violations", file=sys.stderr)
    return 1 if violations else 0


def cmd_errors(args) -> int:
    rows = []
    for k in _int_list(args.approx):
        if args.mode == "exhaustive":
            rows.append(error_stats(args.width, k, "exhaustive"))
        else:
            rows.append(error_stats(args.width, k, "sampled", n=args.samples, seed=args.seed))
    with _output(args.out) as fh:
        fh.write(ErrorStats.csv_header())
        for s in rows:
            fh.write(s.csv_row())
    return 0


def cmd_report(args) -> int:
    if args.approx is None:
        sizes = [k for k in STANDARD_APPROX_SIZES if k <= args.width - 2]
    else:
        sizes = _int_list(args.approx)
    configs = [AdderConfig(args.width, k, proto) for proto in _protocols(args.protocol) for k in sizes]
    rep = table_report(configs, args.vectors, args.seed, _library(args),
                       check=not args.no_check, jobs=args.jobs)
    if args.out:
        Path(args.out).write_text(rep.to_csv())
    print(rep.to_text(), end="")
    for r in rep.results:
        for v in r.violations[:5]:
            print(f"{r.config.label}: {v.to_line()}", file=sys.stderr)
    return 0 if rep.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdiadd", description="QDI dual-rail adder toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="emit a netlist for one adder configuration")
    _config_args(p)
    p.add_argument("--stage", action=argparse.BooleanOptionalAction, default=True,
                   help="wrap the adder with registers and completion detector (default on)")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dualize", help="convert a netlist between RTZ and RTO")
    p.add_argument("netlist", help="netlist file")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_dualize)

    for name, func, help_ in (("sim", cmd_sim, "simulate transactions on a stage"),
                              ("check", cmd_check, "run the QDI checks on a simulated stage")):
        p = sub.add_parser(name, help=help_)
        _config_args(p)
        p.add_argument("--netlist", help="load a stage netlist instead of generating one")
        p.add_argument("--vectors", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--library", help="JSON cell table (kind -> {area, delay})")
        p.add_argument("--out", help="per-vector CSV (sim) or violation report (check)")
        p.set_defaults(func=func)
        if name == "sim":
            p.add_argument("--trace", help="write a VCD trace of the whole run")
            p.add_argument("--worst-case", action="store_true",
                           help="prepend the carry-rippling worst-case operands")
        else:
            p.add_argument("--early-reset", metavar="PORTS",
                           help="instead of trace checks, verify early reset for these input ports")
            p.add_argument("--outputs", metavar="PORTS", help="restrict --early-reset to these outputs")

    p = sub.add_parser("errors", help="error statistics of the approximate adder")
    p.add_argument("--width", type=int, default=8)
    p.add_argument("--approx", default="0,2,4", help="comma-separated approximation sizes")
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("report", help="metrics table over approximation sizes and protocols")
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--approx", help="comma-separated approximation sizes "
                   "(default 0,4,8,12,16,20 where they fit the width)")
    p.add_argument("--protocol", default="both", help="RTZ, RTO or both")
    p.add_argument("--vectors", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--library", help="JSON cell table (kind -> {area, delay})")
    p.add_argument("--out", help="CSV file")
    p.add_argument("--jobs", type=int, default=1, help="rows simulated in parallel")
    p.add_argument("--no-check", action="store_true", help="skip the QDI trace checks")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QDIError, ValueError, OSError) as exc:
        print(f"qdiadd: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
