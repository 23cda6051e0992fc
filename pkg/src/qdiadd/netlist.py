"""Gate-level netlist model, structural validation and the ``qdi-netlist-v1`` text format.

A :class:`Netlist` is a flat list of cells over densely numbered nets. Every
net has at most one driving cell; undriven nets are primary inputs. Dual-rail
ports name a pair of nets ``(rail1, rail0)``; a stage additionally carries a
single-rail acknowledge input and output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .cells import CellKind
from .errors import NetlistParseError, NetlistValidationError
from .railcode import Protocol, RailPair

SCHEMA = "qdi-netlist-v1"
FILE_SUFFIX = ".qdinet.json"

INPUT = "input"
OUTPUT = "output"


@dataclass(frozen=True)
class GateInst:
    id: int
    kind: CellKind
    inputs: tuple[int, ...]
    output: int


@dataclass(frozen=True)
class Net:
    id: int
    name: str
    driver: int | None
    fanout: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class DualRailPort:
    name: str
    rail1: int
    rail0: int
    direction: str

    @property
    def rails(self) -> RailPair:
        return RailPair(self.rail1, self.rail0)


@dataclass(frozen=True)
class Netlist:
    protocol: Protocol
    net_names: tuple[str, ...]
    cells: tuple[GateInst, ...]
    in_ports: tuple[DualRailPort, ...] = ()
    out_ports: tuple[DualRailPort, ...] = ()
    ack_in: int | None = None
    ack_out: int | None = None
    # treat as read-only
    metadata: dict = field(default_factory=dict)

    @property
    def num_nets(self) -> int:
        return len(self.net_names)

    @property
    def is_stage(self) -> bool:
        return self.ack_in is not None and self.ack_out is not None

    @cached_property
    def drivers(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for c in self.cells:
            out.setdefault(c.output, []).append(c.id)
        return out

    @cached_property
    def nets(self) -> tuple[Net, ...]:
        fanout: list[list[tuple[int, int]]] = [[] for _ in self.net_names]
        for c in self.cells:
            for pin, n in enumerate(c.inputs):
                if 0 <= n < len(fanout):
                    fanout[n].append((c.id, pin))
        return tuple(
            Net(i, name, self.drivers.get(i, [None])[0], tuple(fanout[i]))
            for i, name in enumerate(self.net_names)
        )

    def port(self, name: str) -> DualRailPort:
        for p in self.in_ports + self.out_ports:
            if p.name == name:
                return p
        raise KeyError(name)

    def census(self) -> dict[CellKind, int]:
        counts: dict[CellKind, int] = {}
        for c in self.cells:
            counts[c.kind] = counts.get(c.kind, 0) + 1
        return counts

    def port_nets(self) -> set[int]:
        nets = set()
        for p in self.in_ports + self.out_ports:
            nets.update(p.rails)
        for n in (self.ack_in, self.ack_out):
            if n is not None:
                nets.add(n)
        return nets


def validate(netlist: Netlist) -> list[str]:
    """Return a list of human-readable violations; empty means valid."""
    problems: list[str] = []
    n_nets = netlist.num_nets

    def net_label(n):
        if 0 <= n < n_nets:
            return f"net {n} ({netlist.net_names[n]})"
        return f"net {n}"

    for idx, c in enumerate(netlist.cells):
        if c.id != idx:
            problems.append(f"cell at position {idx} has id {c.id}; ids must be dense and ordered")
        if len(c.inputs) != c.kind.arity:
            problems.append(
                f"cell {c.id} ({c.kind.value}): arity {c.kind.arity} but {len(c.inputs)} inputs")
        for n in (*c.inputs, c.output):
            if not 0 <= n < n_nets:
                problems.append(f"cell {c.id} ({c.kind.value}): references missing net {n}")
        if c.output in c.inputs:
            problems.append(f"cell {c.id} ({c.kind.value}): {net_label(c.output)} is both input and output")

    for n, cells in sorted(netlist.drivers.items()):
        if len(cells) > 1:
            problems.append(f"{net_label(n)}: driven by cells {', '.join(map(str, cells))}")

    problems.extend(_combinational_cycles(netlist))

    names = set()
    for p in netlist.in_ports + netlist.out_ports:
        if p.name in names:
            problems.append(f"port {p.name}: duplicate name")
        names.add(p.name)
        if p.rail1 == p.rail0:
            problems.append(f"port {p.name}: rail1 and rail0 are the same net {p.rail1}")
        for n in p.rails:
            if not 0 <= n < n_nets:
                problems.append(f"port {p.name}: references missing net {n}")
    for p in netlist.in_ports:
        if p.direction != INPUT:
            problems.append(f"port {p.name}: listed as input but direction is {p.direction!r}")
        for n in p.rails:
            if n in netlist.drivers:
                problems.append(f"input port {p.name}: {net_label(n)} is driven by a cell")
    for p in netlist.out_ports:
        if p.direction != OUTPUT:
            problems.append(f"port {p.name}: listed as output but direction is {p.direction!r}")
        for n in p.rails:
            if 0 <= n < n_nets and n not in netlist.drivers:
                problems.append(f"output port {p.name}: {net_label(n)} is undriven")

    if (netlist.ack_in is None) != (netlist.ack_out is None):
        problems.append("ack ports must be given together")
    if netlist.ack_in is not None:
        if not 0 <= netlist.ack_in < n_nets:
            problems.append(f"ack_in references missing net {netlist.ack_in}")
        elif netlist.ack_in in netlist.drivers:
            problems.append(f"ack_in {net_label(netlist.ack_in)} is driven by a cell")
    if netlist.ack_out is not None:
        if not 0 <= netlist.ack_out < n_nets:
            problems.append(f"ack_out references missing net {netlist.ack_out}")
        elif netlist.ack_out not in netlist.drivers:
            problems.append(f"ack_out {net_label(netlist.ack_out)} is undriven")
    return problems


def _combinational_cycles(netlist: Netlist) -> list[str]:
    # Only stateless cells count; C2 outputs break loops.
    stateless = {c.output: c for c in netlist.cells if not c.kind.stateful}
    state: dict[int, int] = {}  # 1 = on stack, 2 = done
    found = []
    for start in stateless:
        if start in state:
            continue
        stack = [(start, iter(stateless[start].inputs))]
        state[start] = 1
        while stack:
            net, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[net] = 2
                stack.pop()
                continue
            if nxt not in stateless:
                continue
            if state.get(nxt) == 1:
                found.append(f"combinational loop through net {nxt}")
                continue
            if nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(stateless[nxt].inputs)))
    return found


def check_valid(netlist: Netlist) -> Netlist:
    problems = validate(netlist)
    if problems:
        raise NetlistValidationError(problems)
    return netlist


class NetlistBuilder:
    """Incremental construction helper used by the generators.

    Gates are requested by their return-to-zero kind; under RTO the builder
    substitutes the dual, which is exactly the RTZ to RTO transformation.
    """

    def __init__(self, protocol: Protocol):
        self.protocol = protocol
        self.net_names: list[str] = []
        self.cells: list[GateInst] = []
        self.in_ports: list[DualRailPort] = []
        self.out_ports: list[DualRailPort] = []
        self.ack_in: int | None = None
        self.ack_out: int | None = None

    def net(self, name: str) -> int:
        self.net_names.append(name)
        return len(self.net_names) - 1

    def pair(self, name: str) -> RailPair:
        return RailPair(self.net(f"{name}_1"), self.net(f"{name}_0"))

    def gate(self, kind: CellKind, inputs: Sequence[int], name: str | None = None,
             output: int | None = None) -> int:
        if self.protocol is Protocol.RTO:
            kind = kind.dual
        if output is None:
            output = self.net(name if name is not None else f"n{len(self.net_names)}")
        self.cells.append(GateInst(len(self.cells), kind, tuple(inputs), output))
        return output

    def input_port(self, name: str) -> RailPair:
        rails = self.pair(name)
        self.in_ports.append(DualRailPort(name, rails.rail1, rails.rail0, INPUT))
        return rails

    def output_port(self, name: str, rails) -> None:
        self.out_ports.append(DualRailPort(name, rails[0], rails[1], OUTPUT))

    def build(self, **metadata) -> Netlist:
        return Netlist(
            protocol=self.protocol,
            net_names=tuple(self.net_names),
            cells=tuple(self.cells),
            in_ports=tuple(self.in_ports),
            out_ports=tuple(self.out_ports),
            ack_in=self.ack_in,
            ack_out=self.ack_out,
            metadata=dict(metadata),
        )


# -- serialization -----------------------------------------------------------

def _port_dict(p: DualRailPort) -> dict:
    return {"name": p.name, "rail1": p.rail1, "rail0": p.rail0}


def serialize(netlist: Netlist) -> str:
    check_valid(netlist)
    meta = dict(netlist.metadata)
    head = {
        "schema": SCHEMA,
        "protocol": netlist.protocol.value,
        "width": meta.pop("width", None),
        "approx_bits": meta.pop("approx_bits", None),
        "metadata": meta,
        "ports": {
            "inputs": [_port_dict(p) for p in netlist.in_ports],
            "outputs": [_port_dict(p) for p in netlist.out_ports],
            "ack_in": netlist.ack_in,
            "ack_out": netlist.ack_out,
        },
    }
    lines = ["{"]
    for key, value in head.items():
        lines.append(f"  {json.dumps(key)}: {json.dumps(value, sort_keys=True)},")
    lines.append('  "nets": [')
    lines.append(",\n".join(f"    {json.dumps(n)}" for n in netlist.net_names))
    lines.append("  ],")
    lines.append('  "cells": [')
    lines.append(",\n".join(
        "    " + json.dumps({"id": c.id, "kind": c.kind.value,
                             "inputs": list(c.inputs), "output": c.output})
        for c in netlist.cells))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _require(obj, key, kind, where):
    if not isinstance(obj, dict) or key not in obj:
        raise NetlistParseError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise NetlistParseError(f"{where}.{key}: expected an integer")
    if kind is not int and not isinstance(value, kind):
        raise NetlistParseError(f"{where}.{key}: expected {kind.__name__}")
    return value


def _parse_ports(entries, direction, where) -> tuple[DualRailPort, ...]:
    if not isinstance(entries, list):
        raise NetlistParseError(f"{where}: expected a list")
    ports = []
    for i, e in enumerate(entries):
        w = f"{where}[{i}]"
        ports.append(DualRailPort(
            _require(e, "name", str, w), _require(e, "rail1", int, w),
            _require(e, "rail0", int, w), direction))
    return tuple(ports)


def deserialize(text: str) -> Netlist:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetlistParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise NetlistParseError("top level must be an object")
    schema = doc.get("schema")
    if schema != SCHEMA:
        raise NetlistParseError(f"unsupported schema {schema!r}, expected {SCHEMA!r}")
    try:
        protocol = Protocol(_require(doc, "protocol", str, "netlist"))
    except ValueError:
        raise NetlistParseError(f"unknown protocol {doc['protocol']!r}") from None

    names = _require(doc, "nets", list, "netlist")
    if not all(isinstance(n, str) for n in names):
        raise NetlistParseError("nets: every entry must be a string")

    cells = []
    for i, entry in enumerate(_require(doc, "cells", list, "netlist")):
        where = f"cells[{i}]"
        kind_name = _require(entry, "kind", str, where)
        try:
            kind = CellKind(kind_name)
        except ValueError:
            raise NetlistParseError(f"{where}: unknown cell kind {kind_name!r}") from None
        inputs = _require(entry, "inputs", list, where)
        if not all(isinstance(n, int) and not isinstance(n, bool) for n in inputs):
            raise NetlistParseError(f"{where}.inputs: expected integers")
        cells.append(GateInst(_require(entry, "id", int, where), kind, tuple(inputs),
                              _require(entry, "output", int, where)))

    ports = _require(doc, "ports", dict, "netlist")
    ack_in, ack_out = ports.get("ack_in"), ports.get("ack_out")
    for label, n in (("ack_in", ack_in), ("ack_out", ack_out)):
        if n is not None and (isinstance(n, bool) or not isinstance(n, int)):
            raise NetlistParseError(f"ports.{label}: expected an integer or null")

    metadata = doc.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise NetlistParseError("metadata: expected an object")
    metadata = dict(metadata)
    for key in ("width", "approx_bits"):
        if doc.get(key) is not None:
            metadata[key] = doc[key]

    netlist = Netlist(
        protocol=protocol,
        net_names=tuple(names),
        cells=tuple(cells),
        in_ports=_parse_ports(ports.get("inputs", []), INPUT, "ports.inputs"),
        out_ports=_parse_ports(ports.get("outputs", []), OUTPUT, "ports.outputs"),
        ack_in=ack_in,
        ack_out=ack_out,
        metadata=metadata,
    )
    return check_valid(netlist)


def save(netlist: Netlist, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize(netlist))


def load(path) -> Netlist:
    with open(path) as fh:
        return deserialize(fh.read())


def renumbered_copy(builder: NetlistBuilder, netlist: Netlist, prefix: str = "",
                    bind: dict[int, int] | None = None) -> dict[int, int]:
    """Copy ``netlist``'s cells into ``builder``; returns the old-to-new net map.

    ``bind`` pre-maps some of the source nets onto existing builder nets.
    Kinds are copied verbatim (no dual substitution).
    """
    mapping = dict(bind or {})
    for i, name in enumerate(netlist.net_names):
        if i not in mapping:
            mapping[i] = builder.net(prefix + name)
    for c in netlist.cells:
        builder.cells.append(GateInst(len(builder.cells), c.kind,
                                      tuple(mapping[n] for n in c.inputs), mapping[c.output]))
    return mapping


def iter_rails(ports: Iterable[DualRailPort]):
    for p in ports:
        yield p.rail1
        yield p.rail0
