"""Design metrics per adder configuration and the accurate-vs-approximate comparison report.

Latencies are in abstract delay units, area in square micrometres from the
cell library, and power as a switching proxy: output transitions weighted by
cell area. Latency columns are maxima over the vector set, which always
starts with the carry-rippling worst-case operands so the maxima reflect the
critical path.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field, fields
from statistics import fmean
from typing import Sequence

from .adders import AdderConfig, build
from .approx import error_stats
from .cells import DEFAULT_LIBRARY, Library
from .check import Violation, check_all
from .errors import QDIError
from .netlist import Netlist
from .railcode import Protocol
from .sim import random_vectors, run_sequence, worst_case_vectors

REPORT_METRICS = ("forward_latency", "cycle_time", "area", "power_proxy")


def area_of(netlist: Netlist, library: Library = DEFAULT_LIBRARY) -> float:
    return sum(library[c.kind].area for c in netlist.cells)


def power_proxy(activity: Sequence[int], netlist: Netlist, library: Library = DEFAULT_LIBRARY,
                cells: range | None = None) -> float:
    """Sum of output transitions times cell area, optionally over a cell id range."""
    ids = cells if cells is not None else range(len(netlist.cells))
    return sum(activity[i] * library[netlist.cells[i].kind].area for i in ids)


def core_cells(stage: Netlist) -> range:
    start, end = stage.metadata.get("core_cells", (0, len(stage.cells)))
    return range(start, end)


@dataclass(frozen=True)
class MetricsRow:
    protocol: str
    width: int
    approx_bits: int
    forward_latency: float
    reverse_latency: float
    cycle_time: float
    area: float
    power_proxy: float
    error_rate: float

    @classmethod
    def header(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass
class RowResult:
    config: AdderConfig
    row: MetricsRow | None
    mean_forward: float = 0.0
    mean_reverse: float = 0.0
    core_power: float = 0.0
    vectors: int = 0
    mismatches: int = 0
    violations: list[Violation] = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and self.mismatches == 0 and not self.violations


def report_vectors(width: int, count: int, seed: int) -> list[tuple[int, int]]:
    return worst_case_vectors(width) + random_vectors(count, width, seed)


def _error_rate(width: int, k: int, seed: int) -> float:
    if width <= 8:
        return error_stats(width, k, "exhaustive").error_rate
    return error_stats(width, k, "sampled", n=100_000, seed=seed).error_rate


def measure(cfg: AdderConfig, vectors: int = 1000, seed: int = 0,
            library: Library = DEFAULT_LIBRARY, check: bool = True) -> RowResult:
    """Build, simulate and (optionally) QDI-check one configuration."""
    try:
        stage = build(cfg)
        seq = run_sequence(stage, report_vectors(cfg.width, vectors, seed), library,
                           record_trace=check)
    except QDIError as exc:
        return RowResult(cfg, None, error=f"{type(exc).__name__}: {exc}")
    fwd, rev = seq.max_forward, seq.max_reverse
    row = MetricsRow(
        protocol=cfg.protocol.value,
        width=cfg.width,
        approx_bits=cfg.approx_bits,
        forward_latency=fwd,
        reverse_latency=rev,
        cycle_time=fwd + rev,
        area=round(area_of(stage, library), 6),
        power_proxy=round(power_proxy(seq.activity, stage, library), 6),
        error_rate=_error_rate(cfg.width, cfg.approx_bits, seed),
    )
    return RowResult(
        cfg, row,
        mean_forward=seq.mean_forward,
        mean_reverse=seq.mean_reverse,
        core_power=round(power_proxy(seq.activity, stage, library, core_cells(stage)), 6),
        vectors=len(seq.vectors),
        mismatches=len(seq.mismatches),
        violations=check_all(seq.trace, stage) if check else [],
    )


def _measure_args(args):
    return measure(*args)


def percent_reduction(baseline: float, value: float) -> float:
    return 100.0 * (baseline - value) / baseline


def average_reduction(baseline: float, values: Sequence[float]) -> float:
    """Mean of per-value percent reductions relative to ``baseline``."""
    return fmean(percent_reduction(baseline, v) for v in values)


@dataclass
class Report:
    results: list[RowResult]

    @property
    def rows(self) -> list[MetricsRow]:
        return [r.row for r in self.results if r.row is not None]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def approximation_savings(self) -> dict[tuple[str, int], dict[str, float]]:
        """Per (protocol, width): mean reduction of each metric over the approximate rows."""
        out = {}
        groups: dict[tuple[str, int], list[MetricsRow]] = {}
        for row in self.rows:
            groups.setdefault((row.protocol, row.width), []).append(row)
        for key, rows in groups.items():
            base = next((r for r in rows if r.approx_bits == 0), None)
            approx = [r for r in rows if r.approx_bits > 0]
            if base is None or not approx:
                continue
            out[key] = {m: average_reduction(getattr(base, m), [getattr(r, m) for r in approx])
                        for m in REPORT_METRICS}
        return out

    def protocol_savings(self) -> dict[int, dict[str, float]]:
        """Per width: mean reduction of RTO relative to RTZ over matching rows."""
        rtz = {(r.width, r.approx_bits): r for r in self.rows if r.protocol == Protocol.RTZ.value}
        rto = {(r.width, r.approx_bits): r for r in self.rows if r.protocol == Protocol.RTO.value}
        out: dict[int, dict[str, float]] = {}
        for width in sorted({w for w, _ in rtz}):
            keys = [k for k in rtz if k[0] == width and k in rto]
            if keys:
                out[width] = {m: fmean(percent_reduction(getattr(rtz[k], m), getattr(rto[k], m))
                                       for k in keys) for m in REPORT_METRICS}
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(MetricsRow.header())
        for row in self.rows:
            writer.writerow(astuple(row))
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        head = (f"{'proto':<5} {'width':>5} {'k':>3} {'fwd':>7} {'rev':>6} {'cycle':>7} "
                f"{'area':>10} {'power':>11} {'err_rate':>9} {'fwd_mean':>9} status")
        lines.append(head)
        lines.append("-" * len(head))
        for r in self.results:
            cfg = r.config
            if r.row is None:
                lines.append(f"{cfg.protocol.value:<5} {cfg.width:>5} {cfg.approx_bits:>3} FAILED: {r.error}")
                continue
            m = r.row
            status = "ok" if r.ok else f"{r.mismatches} mismatches, {len(r.violations)} violations"
            lines.append(
                f"{m.protocol:<5} {m.width:>5} {m.approx_bits:>3} {m.forward_latency:>7g} "
                f"{m.reverse_latency:>6g} {m.cycle_time:>7g} {m.area:>10.2f} {m.power_proxy:>11.2f} "
                f"{m.error_rate:>9.4f} {r.mean_forward:>9.3f} {status}")
        savings = self.approximation_savings()
        if savings:
            lines.append("")
            lines.append("average reduction of approximate rows vs accurate (%):")
            for (proto, width), red in sorted(savings.items()):
                body = ", ".join(f"{m} {v:.1f}" for m, v in red.items())
                lines.append(f"  {proto} width {width}: {body}")
        proto = self.protocol_savings()
        if proto:
            lines.append("RTO vs RTZ, average reduction over matching rows (%):")
            for width, red in proto.items():
                body = ", ".join(f"{m} {v:.1f}" for m, v in red.items())
                lines.append(f"  width {width}: {body}")
        return "\n".join(lines) + "\n"


def table_report(configs: Sequence[AdderConfig], vectors: int = 1000, seed: int = 0,
                 library: Library = DEFAULT_LIBRARY, check: bool = True, jobs: int = 1) -> Report:
    """One :class:`MetricsRow` per config; rows that fail are kept with their error."""
    if not configs:
        raise ValueError("no configurations given")
    args = [(cfg, vectors, seed, library, check) for cfg in configs]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_measure_args, args))
    else:
        results = [_measure_args(a) for a in args]
    return Report(results)
