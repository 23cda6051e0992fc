"""Ripple-carry adders (accurate and lower-part-OR approximate) and the handshake stage."""

from __future__ import annotations

from dataclasses import dataclass

from .blocks import (and_block_into, completion_detector_into, full_adder_into,
                     half_adder_into, or_block_into, register_into)
from .errors import ConfigError
from .netlist import Netlist, NetlistBuilder, check_valid, renumbered_copy
from .railcode import Protocol, RailPair

STANDARD_APPROX_SIZES = (0, 4, 8, 12, 16, 20)


@dataclass(frozen=True)
class AdderConfig:
    width: int = 32
    approx_bits: int = 0
    protocol: Protocol = Protocol.RTZ

    def __post_init__(self):
        if not isinstance(self.protocol, Protocol):
            object.__setattr__(self, "protocol", Protocol(self.protocol))
        if self.width < 2:
            raise ConfigError(f"width must be at least 2, got {self.width}")
        if not 0 <= self.approx_bits <= self.width - 2:
            raise ConfigError(
                f"approx_bits must lie in 0..{self.width - 2} for width {self.width}, "
                f"got {self.approx_bits}")

    @property
    def label(self) -> str:
        kind = "accurate" if self.approx_bits == 0 else f"approx{self.approx_bits}"
        return f"{self.protocol.value}-w{self.width}-{kind}"


def carry_port_name(width: int) -> str:
    return "C32" if width == 32 else "COUT"


def build_adder(cfg: AdderConfig) -> Netlist:
    """Bare adder netlist: dual-rail operand ports ``A*``/``B*``, outputs ``SUM*`` and carry.

    Bits below ``approx_bits`` are OR blocks; the top approximate bit pair is
    also AND-ed to form the carry into the accurate section. With no
    approximation, bit 0 is a half adder.
    """
    w, k = cfg.width, cfg.approx_bits
    b = NetlistBuilder(cfg.protocol)
    A = [b.input_port(f"A{i}") for i in range(w)]
    B = [b.input_port(f"B{i}") for i in range(w)]
    sums: list[RailPair] = []

    if k == 0:
        s, carry = half_adder_into(b, A[0], B[0], "ha0")
        sums.append(s)
        first_fa = 1
    else:
        for i in range(k):
            sums.append(or_block_into(b, A[i], B[i], f"or{i}"))
        carry = and_block_into(b, A[k - 1], B[k - 1], f"and{k - 1}")
        first_fa = k

    for i in range(first_fa, w):
        s, carry = full_adder_into(b, A[i], B[i], carry, f"fa{i}")
        sums.append(s)

    for i, s in enumerate(sums):
        b.output_port(f"SUM{i}", s)
    b.output_port(carry_port_name(w), carry)
    return check_valid(b.build(generator="rca", width=w, approx_bits=k))


def build_stage(adder: Netlist) -> Netlist:
    """Wrap an adder with C-element input registers and an output completion detector.

    ``ACKIN`` enables the registers, ``ACKOUT`` is the detector's done signal.
    """
    if adder.ack_in is not None or adder.ack_out is not None:
        raise ValueError("build_stage expects a bare adder without ack ports")
    b = NetlistBuilder(adder.protocol)
    stage_in = {p.name: b.input_port(p.name) for p in adder.in_ports}
    ack_in = b.net("ACKIN")
    ack_out = b.net("ACKOUT")
    b.ack_in, b.ack_out = ack_in, ack_out

    bind = {}
    for p in adder.in_ports:
        bind[p.rail1] = b.net(f"reg.{adder.net_names[p.rail1]}")
        bind[p.rail0] = b.net(f"reg.{adder.net_names[p.rail0]}")
    for p in adder.in_ports:
        register_into(b, stage_in[p.name], ack_in, out=RailPair(bind[p.rail1], bind[p.rail0]))

    core_start = len(b.cells)
    mapping = renumbered_copy(b, adder, bind=bind)
    core_end = len(b.cells)

    outs = []
    for p in adder.out_ports:
        rails = RailPair(mapping[p.rail1], mapping[p.rail0])
        b.output_port(p.name, rails)
        outs.append(rails)
    completion_detector_into(b, outs, "cd", done=ack_out)

    meta = dict(adder.metadata)
    meta.update(generator="stage", core=adder.metadata.get("generator"),
                core_cells=[core_start, core_end])
    return check_valid(b.build(**meta))


def build(cfg: AdderConfig, stage: bool = True) -> Netlist:
    adder = build_adder(cfg)
    return build_stage(adder) if stage else adder


def standard_configs(width: int = 32) -> list[AdderConfig]:
    return [AdderConfig(width, k, proto)
            for proto in (Protocol.RTZ, Protocol.RTO) for k in STANDARD_APPROX_SIZES]
