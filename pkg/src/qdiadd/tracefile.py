"""Value-change-dump export of simulation traces.

Only a small subset of VCD is written: one flat scope of 1-bit wires, an
initial ``$dumpvars`` block, then ``#time`` records with scalar changes.
Phase markers become ``$comment`` records. Times are abstract delay units
multiplied by ``ticks_per_unit`` and rounded, so the default ``1 ps``
timescale gives a resolution of a thousandth of a unit.
"""

from __future__ import annotations

import re
from typing import TextIO

from .sim import Trace

_FIRST, _LAST = 33, 126


def _ident(i: int) -> str:
    span = _LAST - _FIRST + 1
    chars = []
    while True:
        i, r = divmod(i, span)
        chars.append(chr(_FIRST + r))
        if i == 0:
            return "".join(chars)
        i -= 1


def write_vcd(trace: Trace, fh: TextIO, ticks_per_unit: int = 1000, timescale: str = "1 ps",
              scope: str = "stage") -> None:
    ids = [_ident(i) for i in range(len(trace.net_names))]
    fh.write("$version qdiadd $end\n")
    fh.write(f"$comment protocol {trace.protocol.value}; 1 delay unit = {ticks_per_unit} ticks $end\n")
    fh.write(f"$timescale {timescale} $end\n")
    fh.write(f"$scope module {scope} $end\n")
    for ident, name in zip(ids, trace.net_names):
        fh.write(f"$var wire 1 {ident} {name.replace(' ', '_')} $end\n")
    fh.write("$upscope $end\n$enddefinitions $end\n")
    fh.write("#0\n$dumpvars\n")
    for ident, v in zip(ids, trace.initial):
        fh.write(f"{v}{ident}\n")
    fh.write("$end\n")

    markers = sorted(trace.markers)
    mi = 0
    current = 0
    for t, net, v in trace.changes:
        tick = round(t * ticks_per_unit)
        while mi < len(markers) and markers[mi][0] <= t:
            mtick = round(markers[mi][0] * ticks_per_unit)
            if mtick != current:
                fh.write(f"#{mtick}\n")
                current = mtick
            fh.write(f"$comment {markers[mi][1]} $end\n")
            mi += 1
        if tick != current:
            fh.write(f"#{tick}\n")
            current = tick
        fh.write(f"{v}{ids[net]}\n")
    for t, kind in markers[mi:]:
        mtick = round(t * ticks_per_unit)
        if mtick != current:
            fh.write(f"#{mtick}\n")
            current = mtick
        fh.write(f"$comment {kind} $end\n")


_VAR = re.compile(r"\$var\s+\S+\s+1\s+(\S+)\s+(\S+)\s+\$end")


def read_vcd(fh: TextIO) -> tuple[dict[str, int], list[tuple[int, str, int]]]:
    """Parse what :func:`write_vcd` emits.

    Returns ``(initial values by name, [(tick, name, value), ...])``.
    """
    names: dict[str, str] = {}
    initial: dict[str, int] = {}
    changes = []
    tick = 0
    in_dump = False
    for raw in fh:
        line = raw.strip()
        m = _VAR.match(line)
        if m:
            names[m.group(1)] = m.group(2)
            continue
        if not line or line.startswith("$comment") or line.startswith("$version"):
            continue
        if line == "$dumpvars":
            in_dump = True
        elif line == "$end":
            in_dump = False
        elif line.startswith("#"):
            tick = int(line[1:])
        elif line[0] in "01" and line[1:] in names:
            if in_dump:
                initial[names[line[1:]]] = int(line[0])
            else:
                changes.append((tick, names[line[1:]], int(line[0])))
    return initial, changes
