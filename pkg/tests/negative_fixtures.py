"""Hand-built traces and netlists that each break exactly one QDI rule."""

import bisect
import dataclasses

from qdiadd.adders import AdderConfig, build
from qdiadd.blocks import gen_gate_block
from qdiadd.cells import CellKind
from qdiadd.check import (ViolationKind, check_legality, check_monotonicity, detect_orphans,
                          verify_early_reset)
from qdiadd.netlist import GateInst, NetlistBuilder
from qdiadd.railcode import Protocol
from qdiadd.sim import Trace, run_sequence

RTZ, RTO = Protocol.RTZ, Protocol.RTO


def illegal_rtz_input():
    blk = gen_gate_block("AND", RTZ)
    a = blk.port("a")
    trace = Trace(RTZ, blk.net_names, [0] * blk.num_nets,
                  [(1.0, a.rail1, 1), (2.0, a.rail0, 1)], [(0.0, "data")])
    return check_legality(trace, blk)


def illegal_rto_output():
    blk = gen_gate_block("AND", RTO)
    z = blk.port("z")
    trace = Trace(RTO, blk.net_names, [1] * blk.num_nets,
                  [(1.0, z.rail1, 0), (2.0, z.rail0, 0), (3.0, z.rail0, 1)], [(0.0, "data")])
    return check_legality(trace, blk)


def rise_then_fall():
    trace = Trace(RTZ, ("x", "y"), [0, 0], [(1.0, 0, 1), (1.0, 1, 1), (2.0, 0, 0)], [(0.0, "data")])
    return check_monotonicity(trace)


def rto_rising_in_data():
    trace = Trace(RTO, ("x", "y"), [0, 1], [(1.0, 0, 1), (1.0, 1, 0)], [(0.0, "data")])
    return check_monotonicity(trace)


def stage_with_dangling_or(proto=RTZ):
    """Width-2 stage plus an OR2 on one register output pair whose output goes nowhere."""
    stage = build(AdderConfig(2, 0, proto))
    src = stage.net_names.index("reg.A0_1"), stage.net_names.index("reg.A0_0")
    net = stage.num_nets
    cell = GateInst(len(stage.cells), CellKind.OR2, src, net)
    return dataclasses.replace(stage, net_names=stage.net_names + ("dangling",),
                               cells=stage.cells + (cell,)), net


def late_dangling_trace():
    stage, net = stage_with_dangling_or()
    trace = run_sequence(stage, [(1, 2)], record_trace=True).trace
    ack = next(t for t, k in trace.markers if k == "ack_out")
    # the dangling gate's data-phase rise is moved past the acknowledgement
    changes = [c for c in trace.changes if not (c[1] == net and c[2] == 1)]
    late = (ack + 0.5, net, 1)
    changes.insert(bisect.bisect_right([c[0] for c in changes], late[0]), late)
    return stage, net, dataclasses.replace(trace, changes=changes)


def orphan_after_done():
    stage, _, trace = late_dangling_trace()
    return detect_orphans(trace, stage)


def lone_c2():
    b = NetlistBuilder(RTZ)
    a, x = b.input_port("a"), b.input_port("b")
    z1 = b.gate(CellKind.C2, (a.rail1, x.rail1), "z_1")
    z0 = b.gate(CellKind.C2, (a.rail0, x.rail0), "z_0")
    b.output_port("z", (z1, z0))
    return b.build()


def lone_c2_early_reset():
    v = verify_early_reset(lone_c2(), ["a"])
    return [] if v is None else [v]


# name -> (producer, expected kind, expected count)
FIXTURES = {
    "RTZ (1,1) on an input pair": (illegal_rtz_input, ViolationKind.ILLEGAL_CODEWORD, 1),
    "RTO (0,0) on an output pair": (illegal_rto_output, ViolationKind.ILLEGAL_CODEWORD, 1),
    "rise then fall in one data phase": (rise_then_fall, ViolationKind.NON_MONOTONE, 1),
    "RTO rising transition in a data phase": (rto_rising_in_data, ViolationKind.NON_MONOTONE, 1),
    "dangling OR2 toggling after done": (orphan_after_done, ViolationKind.ORPHAN_TRANSITION, 1),
    "lone C-element early reset": (lone_c2_early_reset, ViolationKind.NOT_EARLY_RESET, 1),
}
