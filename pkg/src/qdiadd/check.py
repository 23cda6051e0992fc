"""QDI behaviour checks over simulation traces.

All checks are pure functions of a trace and its netlist and return a list of
:class:`Violation`. Orphan detection is a dynamic witness: a clean result over
a vector suite is evidence of orphan freedom, not a proof.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .cells import DEFAULT_LIBRARY, Library, eval_cell
from .errors import CheckPreconditionError, DeadlockError
from .netlist import Netlist
from .railcode import Codeword, Protocol, classify_pair, encode_bit
from .sim import ACK_OUT, DATA, SPACER, Simulator, StageEnv, Trace


class ViolationKind(enum.Enum):
    ILLEGAL_CODEWORD = "IllegalCodeword"
    NON_MONOTONE = "NonMonotone"
    ORPHAN_TRANSITION = "OrphanTransition"
    NOT_EARLY_RESET = "NotEarlyReset"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    net: int | None
    name: str
    time: float
    phase: str | None
    detail: str = ""

    def to_line(self) -> str:
        net = "-" if self.net is None else str(self.net)
        return f"{self.kind.value}\t{self.name}[{net}]\t{self.time:g}\t{self.phase or '-'}\t{self.detail}"


def format_report(violations: Iterable[Violation]) -> str:
    return "".join(v.to_line() + "\n" for v in violations)


def _phase_of(trace: Trace):
    """Return a function mapping a time to the phase it falls in (or None)."""
    starts = [(t, k) for t, k in trace.markers if k in (DATA, SPACER)]

    def lookup(t):
        kind = None
        for ts, k in starts:
            if ts <= t:
                kind = k
            else:
                break
        return kind
    return lookup


def _timesteps(changes):
    for t, group in itertools.groupby(changes, key=lambda c: c[0]):
        yield t, list(group)


def check_legality(trace: Trace, netlist: Netlist) -> list[Violation]:
    """Flag every instant at which a dual-rail port pair enters an illegal codeword."""
    proto = trace.protocol
    pairs = {}
    for p in netlist.in_ports + netlist.out_ports:
        pairs[p.rail1] = p
        pairs[p.rail0] = p
    values = list(trace.initial)
    phase = _phase_of(trace)
    out = []
    illegal_now = set()

    def inspect(ports, t):
        for p in ports:
            word = classify_pair((values[p.rail1], values[p.rail0]), proto)
            if word is Codeword.ILLEGAL:
                if p.name not in illegal_now:
                    illegal_now.add(p.name)
                    out.append(Violation(ViolationKind.ILLEGAL_CODEWORD, p.rail1, p.name, t,
                                         phase(t), f"rails=({values[p.rail1]},{values[p.rail0]})"))
            else:
                illegal_now.discard(p.name)

    inspect(netlist.in_ports + netlist.out_ports, 0.0)
    for t, group in _timesteps(trace.changes):
        touched = {}
        for _, n, v in group:
            values[n] = v
            if n in pairs:
                touched[pairs[n].name] = pairs[n]
        inspect(touched.values(), t)
    return out


def check_monotonicity(trace: Trace) -> list[Violation]:
    """Within each phase every data-path net may switch once, toward the phase's level.

    RTZ data phases only rise and spacer phases only fall; RTO is mirrored.
    Handshake wires are exempt.
    """
    if not any(k in (DATA, SPACER) for _, k in trace.markers):
        raise CheckPreconditionError("trace has no data/spacer phase markers")
    spacer = trace.protocol.spacer_level
    out = []
    changes = trace.changes
    i = 0
    for kind, start, end in trace.phases():
        target = 1 - spacer if kind == DATA else spacer
        seen: dict[int, int] = {}
        flagged = set()
        while i < len(changes) and changes[i][0] < end:
            t, n, v = changes[i]
            i += 1
            if t < start or n in trace.control_nets or n in flagged:
                continue
            seen[n] = seen.get(n, 0) + 1
            if v != target:
                detail = f"{'rising' if v else 'falling'} transition against the {kind} phase direction"
            elif seen[n] > 1:
                detail = f"transition #{seen[n]} within one {kind} phase"
            else:
                continue
            flagged.add(n)
            out.append(Violation(ViolationKind.NON_MONOTONE, n, trace.net_names[n], t, kind, detail))
    return out


def detect_orphans(trace: Trace, netlist: Netlist) -> list[Violation]:
    """Flag internal transitions the completion detector cannot have seen.

    Two witnesses: an internal gate output switching after the phase's
    ``ACKOUT`` event, and a gate that switched in the phase but is left
    unsettled (output disagrees with its inputs) when the phase ends.
    """
    if not netlist.is_stage:
        raise CheckPreconditionError(
            "orphan detection needs a stage with a completion detector (ACKOUT); "
            "wrap the fragment with build_stage or simulate a full stage")
    phases = trace.phases()
    if not any(k == DATA for k, _, _ in phases) or not any(k == SPACER for k, _, _ in phases):
        raise CheckPreconditionError("trace must cover at least one complete transaction")

    ports = netlist.port_nets()
    internal = {c.output for c in netlist.cells} - ports
    driver = {c.output: c for c in netlist.cells}
    acks = [t for t, k in trace.markers if k == ACK_OUT]
    values = list(trace.initial)
    changes = trace.changes
    i = 0
    out = []
    for kind, start, end in phases:
        ack_t = next((t for t in acks if start <= t < end), None)
        switched = set()
        while i < len(changes) and changes[i][0] < end:
            t, n, v = changes[i]
            i += 1
            values[n] = v
            if t < start:
                continue
            switched.add(n)
            if ack_t is not None and t > ack_t and n in internal:
                out.append(Violation(ViolationKind.ORPHAN_TRANSITION, n, trace.net_names[n], t, kind,
                                     f"switched {t - ack_t:g} after ACKOUT at {ack_t:g}"))
        for n in sorted(switched & internal):
            c = driver[n]
            settled = eval_cell(c.kind, [values[x] for x in c.inputs], values[n])
            if settled != values[n]:
                out.append(Violation(ViolationKind.ORPHAN_TRANSITION, n, trace.net_names[n],
                                     end, kind, "left unsettled at end of phase"))
    return out


def check_all(trace: Trace, netlist: Netlist) -> list[Violation]:
    return check_legality(trace, netlist) + check_monotonicity(trace) + detect_orphans(trace, netlist)


# -- early reset -------------------------------------------------------------

def _default_assignments(names: Sequence[str], seed: int = 0) -> list[dict[str, int]]:
    if len(names) <= 10:
        return [dict(zip(names, bits)) for bits in itertools.product((0, 1), repeat=len(names))]
    rng = random.Random(seed)
    picks = [dict.fromkeys(names, 0), dict.fromkeys(names, 1)]
    picks += [{n: rng.getrandbits(1) for n in names} for _ in range(32)]
    return picks


def verify_early_reset(netlist: Netlist, subset: Iterable[str], library: Library = DEFAULT_LIBRARY,
                       assignments: Sequence[Mapping[str, int]] | None = None,
                       outputs: Iterable[str] | None = None) -> Violation | None:
    """Check that spacer on ``subset`` alone returns the outputs to spacer.

    ``outputs`` narrows the check to some output ports (default: all). A full
    adder's carry, for instance, follows its operands only, so spacer on the
    carry input alone is expected to reset the sum but not the carry.

    For a fragment the circuit is settled at data on all inputs, then only
    the ``subset`` inputs are driven to spacer while the rest hold data. For a
    stage the usual handshake runs (data, ``ACKOUT``, ``ACKIN``) and spacer is
    then applied to ``subset`` among the operand ports. Every data assignment
    in ``assignments`` is tried (all of them for small fragments). Returns
    ``None`` on success or the first ``NotEarlyReset`` violation.
    """
    subset = list(subset)
    names = [p.name for p in netlist.in_ports]
    unknown = set(subset) - set(names)
    if unknown:
        raise CheckPreconditionError(f"not input ports: {', '.join(sorted(unknown))}")
    if not subset:
        raise CheckPreconditionError("subset must name at least one input port")
    if not netlist.is_stage and set(subset) == set(names):
        raise CheckPreconditionError("subset must be a strict subset of the data inputs")
    if assignments is None:
        assignments = _default_assignments(names)
    watched = netlist.out_ports
    if outputs is not None:
        wanted = set(outputs)
        watched = tuple(p for p in netlist.out_ports if p.name in wanted)
        if len(watched) != len(wanted):
            raise CheckPreconditionError(f"unknown output ports in {sorted(wanted)}")

    for assign in assignments:
        if netlist.is_stage:
            v = _early_reset_stage(netlist, set(subset), assign, library, watched)
        else:
            v = _early_reset_fragment(netlist, set(subset), assign, library, watched)
        if v is not None:
            return v
    return None


def _outputs_not_spacer(ports, values, proto: Protocol):
    return [p for p in ports
            if classify_pair((values[p.rail1], values[p.rail0]), proto) is not Codeword.SPACER]


def _fail(stuck, t, assign, note=""):
    p = stuck[0]
    bits = "".join(f"{k}={v} " for k, v in assign.items()).strip()
    return Violation(ViolationKind.NOT_EARLY_RESET, p.rail1, p.name, t, SPACER,
                     f"{note}outputs holding data: {', '.join(q.name for q in stuck)} ({bits})")


def _early_reset_fragment(netlist, subset, assign, library, watched):
    proto = netlist.protocol
    sim = Simulator(netlist, library, record=False)
    sim.initialize(proto.spacer_level)
    for p in netlist.in_ports:
        r1, r0 = encode_bit(assign[p.name], proto)
        sim.drive(p.rail1, r1, 0.0)
        sim.drive(p.rail0, r0, 0.0)
    try:
        sim.run()
    except DeadlockError as exc:
        return Violation(ViolationKind.NOT_EARLY_RESET, None, "-", sim.now, DATA, str(exc))
    no_data = [p for p in netlist.out_ports
               if not classify_pair((sim.values[p.rail1], sim.values[p.rail0]), proto).is_data]
    if no_data:
        return _fail(no_data, sim.now, assign, "data never settled; ")
    t = sim.now + 1.0
    s = proto.spacer_level
    for p in netlist.in_ports:
        if p.name in subset:
            sim.drive(p.rail1, s, t)
            sim.drive(p.rail0, s, t)
    try:
        sim.run()
    except DeadlockError as exc:
        return Violation(ViolationKind.NOT_EARLY_RESET, None, "-", sim.now, SPACER, str(exc))
    stuck = _outputs_not_spacer(watched, sim.values, proto)
    return _fail(stuck, sim.now, assign) if stuck else None


def _early_reset_stage(stage, subset, assign, library, watched):
    env = StageEnv(stage, library, record=False)
    a = sum(assign.get(p.name, 0) << i for i, p in enumerate(env.a_ports))
    b = sum(assign.get(p.name, 0) << i for i, p in enumerate(env.b_ports))
    sim = env.sim
    try:
        env.apply(a, b)
        env.settle()
        if not env.output_state().is_value:
            stuck = [p for p in stage.out_ports]
            return _fail(stuck, sim.now, assign, "data never settled; ")
        env.acknowledge(1 - env.spacer)
        t = sim.now + env.env_delay
        s = env.spacer
        for p in env.a_ports + env.b_ports:
            if p.name in subset:
                sim.drive(p.rail1, s, t)
                sim.drive(p.rail0, s, t)
        env.settle()
    except DeadlockError as exc:
        return Violation(ViolationKind.NOT_EARLY_RESET, None, "-", sim.now, SPACER, str(exc))
    stuck = _outputs_not_spacer(watched, sim.values, stage.protocol)
    return _fail(stuck, sim.now, assign) if stuck else None
