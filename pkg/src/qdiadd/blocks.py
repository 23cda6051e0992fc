"""Early-output dual-rail building blocks and stage-support blocks.

Each ``*_into`` function adds one block to a :class:`NetlistBuilder` over
existing rail pairs and returns the output pairs. Gates are written in their
return-to-zero form; the builder swaps in duals for RTO, while C-elements and
their input wiring stay put.

The ``gen_*`` functions wrap a single block as a standalone fragment with
named ports (``a``, ``b``, ``cin`` in; ``sum``, ``cout`` / ``z`` / ``v`` out).
"""

from __future__ import annotations

from typing import Sequence

from .cells import CellKind
from .netlist import Netlist, NetlistBuilder
from .railcode import Protocol, RailPair

AND2, OR2, AO22, AO222, C2 = (CellKind.AND2, CellKind.OR2, CellKind.AO22,
                              CellKind.AO222, CellKind.C2)


def full_adder_into(b: NetlistBuilder, a: RailPair, x: RailPair, cin: RailPair,
                    tag: str = "fa") -> tuple[RailPair, RailPair]:
    """Full adder: DSOP sum over C-element minterms, majority carry.

    Sum resets as soon as either the carry input or both operands return to
    spacer; the carry resets once both operands do.
    """
    a1, a0 = a
    b1, b0 = x
    c1, c0 = cin
    n1 = b.gate(C2, (a1, b0), f"{tag}.n1")
    n2 = b.gate(C2, (a0, b1), f"{tag}.n2")
    n3 = b.gate(C2, (a0, b0), f"{tag}.n3")
    n4 = b.gate(C2, (a1, b1), f"{tag}.n4")
    m1 = b.gate(OR2, (n1, n2), f"{tag}.m1")  # operands differ
    m0 = b.gate(OR2, (n3, n4), f"{tag}.m0")  # operands agree
    s1 = b.gate(AO22, (m1, c0, m0, c1), f"{tag}.sum_1")
    s0 = b.gate(AO22, (m0, c0, m1, c1), f"{tag}.sum_0")
    k1 = b.gate(AO222, (a1, b1, a1, c1, b1, c1), f"{tag}.cout_1")
    k0 = b.gate(AO222, (a0, b0, a0, c0, b0, c0), f"{tag}.cout_0")
    return RailPair(s1, s0), RailPair(k1, k0)


def half_adder_into(b: NetlistBuilder, a: RailPair, x: RailPair,
                    tag: str = "ha") -> tuple[RailPair, RailPair]:
    a1, a0 = a
    b1, b0 = x
    s1 = b.gate(AO22, (a1, b0, a0, b1), f"{tag}.sum_1")
    s0 = b.gate(AO22, (a1, b1, a0, b0), f"{tag}.sum_0")
    k1 = b.gate(AND2, (a1, b1), f"{tag}.cout_1")
    # minterms a0b0, a0b1, a1b0 are pairwise disjoint on legal codewords
    k0 = b.gate(AO222, (a0, b0, a0, b1, a1, b0), f"{tag}.cout_0")
    return RailPair(s1, s0), RailPair(k1, k0)


def and_block_into(b: NetlistBuilder, a: RailPair, x: RailPair, tag: str = "and") -> RailPair:
    z1 = b.gate(AND2, (a.rail1, x.rail1), f"{tag}.z_1")
    z0 = b.gate(OR2, (a.rail0, x.rail0), f"{tag}.z_0")
    return RailPair(z1, z0)


def or_block_into(b: NetlistBuilder, a: RailPair, x: RailPair, tag: str = "or") -> RailPair:
    v1 = b.gate(OR2, (a.rail1, x.rail1), f"{tag}.v_1")
    v0 = b.gate(AND2, (a.rail0, x.rail0), f"{tag}.v_0")
    return RailPair(v1, v0)


def completion_detector_into(b: NetlistBuilder, pairs: Sequence[RailPair],
                             tag: str = "cd", done: int | None = None) -> int:
    """Per-pair validity gate followed by a balanced C-element tree.

    Returns the net carrying ``done``: under RTZ it rises once every pair holds
    data and falls once every pair is spacer; under RTO it is the other way round.
    """
    if not pairs:
        raise ValueError("completion detector needs at least one pair")
    level = [b.gate(OR2, p, f"{tag}.valid{i}", output=done if len(pairs) == 1 else None)
             for i, p in enumerate(pairs)]
    depth = 0
    while len(level) > 1:
        depth += 1
        nxt = []
        for i in range(0, len(level) - 1, 2):
            last = len(level) == 2
            nxt.append(b.gate(C2, (level[i], level[i + 1]), f"{tag}.t{depth}_{i // 2}",
                              output=done if last else None))
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def register_into(b: NetlistBuilder, inp: RailPair, enable: int, tag: str = "reg",
                  out: RailPair | None = None) -> RailPair:
    """One C-element latch per rail, gated by ``enable``."""
    o1 = b.gate(C2, (inp.rail1, enable), f"{tag}_1" if out is None else None,
                output=None if out is None else out.rail1)
    o0 = b.gate(C2, (inp.rail0, enable), f"{tag}_0" if out is None else None,
                output=None if out is None else out.rail0)
    return RailPair(o1, o0)


# -- standalone fragments ----------------------------------------------------

def gen_full_adder(proto: Protocol) -> Netlist:
    b = NetlistBuilder(proto)
    a, x, cin = b.input_port("a"), b.input_port("b"), b.input_port("cin")
    s, c = full_adder_into(b, a, x, cin)
    b.output_port("sum", s)
    b.output_port("cout", c)
    return b.build(generator="full_adder")


def gen_half_adder(proto: Protocol) -> Netlist:
    b = NetlistBuilder(proto)
    a, x = b.input_port("a"), b.input_port("b")
    s, c = half_adder_into(b, a, x)
    b.output_port("sum", s)
    b.output_port("cout", c)
    return b.build(generator="half_adder")


def gen_gate_block(func: str, proto: Protocol) -> Netlist:
    func = func.upper()
    if func not in ("AND", "OR"):
        raise ValueError(f"gate block must be AND or OR, not {func!r}")
    b = NetlistBuilder(proto)
    a, x = b.input_port("a"), b.input_port("b")
    if func == "AND":
        b.output_port("z", and_block_into(b, a, x))
    else:
        b.output_port("v", or_block_into(b, a, x))
    return b.build(generator=f"{func.lower()}_block")


def gen_completion_detector(width: int, proto: Protocol) -> Netlist:
    if width < 1:
        raise ValueError("completion detector width must be at least 1")
    b = NetlistBuilder(proto)
    pairs = [b.input_port(f"d{i}") for i in range(width)]
    done = completion_detector_into(b, pairs)
    b.net_names[done] = "done"
    return b.build(generator="completion_detector", width=width, done=done)


def gen_register(width: int, proto: Protocol) -> Netlist:
    if width < 1:
        raise ValueError("register width must be at least 1")
    b = NetlistBuilder(proto)
    ins = [b.input_port(f"d{i}") for i in range(width)]
    enable = b.net("enable")
    for i, p in enumerate(ins):
        b.output_port(f"q{i}", register_into(b, p, enable, f"q{i}"))
    return b.build(generator="register", width=width, enable=enable)
