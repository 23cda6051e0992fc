"""Event-driven gate-level simulation and the 4-phase handshake environment.

The simulator is two-valued with transport delay: every scheduled transition
fires. Events that share a timestamp are applied together (in ascending net
id order) before any affected cell is re-evaluated, so a cell never sees a
half-updated instant.

:class:`StageEnv` plays both the sender and the receiver around a stage built
by :func:`qdiadd.adders.build_stage`. The receiver answers ``ACKOUT`` by
driving ``ACKIN`` to its complement, which under both protocols opens the
input registers for the next kind of codeword.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from statistics import fmean
from typing import Callable, Iterable, Sequence

from .cells import DEFAULT_LIBRARY, CellKind, Library
from .errors import DeadlockError, ProtocolViolation, SimulationError
from .netlist import Netlist
from .railcode import BusState, Protocol, decode_bus, encode_word

DEFAULT_EVENT_BUDGET = 10**6

DATA, SPACER, ACK_OUT, ACK_IN = "data", "spacer", "ack_out", "ack_in"


def _cell_function(kind: CellKind, ins: Sequence[int]) -> Callable[[list, int], int]:
    if kind is CellKind.AND2:
        a, b = ins
        return lambda v, p: v[a] & v[b]
    if kind is CellKind.OR2:
        a, b = ins
        return lambda v, p: v[a] | v[b]
    if kind is CellKind.INV:
        (a,) = ins
        return lambda v, p: 1 - v[a]
    if kind is CellKind.AO22:
        a, b, c, d = ins
        return lambda v, p: (v[a] & v[b]) | (v[c] & v[d])
    if kind is CellKind.OA22:
        a, b, c, d = ins
        return lambda v, p: (v[a] | v[b]) & (v[c] | v[d])
    if kind is CellKind.AO222:
        a, b, c, d, e, f = ins
        return lambda v, p: (v[a] & v[b]) | (v[c] & v[d]) | (v[e] & v[f])
    if kind is CellKind.OA222:
        a, b, c, d, e, f = ins
        return lambda v, p: (v[a] | v[b]) & (v[c] | v[d]) & (v[e] | v[f])
    a, b = ins
    return lambda v, p: v[a] if v[a] == v[b] else p


@dataclass
class Trace:
    """Transition log of one simulation run.

    ``changes`` holds ``(time, net, value)`` in processing order; ``markers``
    holds ``(time, kind)`` with kind one of ``data``, ``spacer``, ``ack_out``,
    ``ack_in``. ``control_nets`` are handshake wires outside the data path.
    """

    protocol: Protocol
    net_names: tuple[str, ...]
    initial: list[int]
    changes: list[tuple[float, int, int]] = field(default_factory=list)
    markers: list[tuple[float, str]] = field(default_factory=list)
    control_nets: frozenset[int] = frozenset()

    def transitions(self, net: int) -> list[tuple[float, int]]:
        return [(t, v) for t, n, v in self.changes if n == net]

    def by_net(self) -> dict[int, list[tuple[float, int]]]:
        out: dict[int, list[tuple[float, int]]] = {}
        for t, n, v in self.changes:
            out.setdefault(n, []).append((t, v))
        return out

    def phases(self) -> list[tuple[str, float, float]]:
        """``(kind, start, end)`` for every data/spacer window; the last ends at +inf."""
        starts = [(t, k) for t, k in self.markers if k in (DATA, SPACER)]
        out = []
        for i, (t, k) in enumerate(starts):
            end = starts[i + 1][0] if i + 1 < len(starts) else float("inf")
            out.append((k, t, end))
        return out


@dataclass(frozen=True)
class TransactionTiming:
    forward_latency: float
    reverse_latency: float

    @property
    def cycle_time(self) -> float:
        return self.forward_latency + self.reverse_latency


class Simulator:
    """Single-threaded event-driven simulator over one immutable netlist."""

    def __init__(self, netlist: Netlist, library: Library = DEFAULT_LIBRARY,
                 record: bool = True, event_budget: int = DEFAULT_EVENT_BUDGET):
        self.netlist = netlist
        self.record = record
        self.event_budget = event_budget
        n = netlist.num_nets
        self.values = [0] * n
        self._proj = [0] * n
        self.last_change = [float("-inf")] * n
        self._driver = [-1] * n
        self._fanout: list[list[int]] = [[] for _ in range(n)]
        self._fns = []
        self._outs = []
        self._delays = []
        for c in netlist.cells:
            self._driver[c.output] = c.id
            for i in set(c.inputs):
                self._fanout[i].append(c.id)
            self._fns.append(_cell_function(c.kind, c.inputs))
            self._outs.append(c.output)
            self._delays.append(library[c.kind].delay)
        self.activity = [0] * len(netlist.cells)
        self.now = 0.0
        self._heap: list[tuple[float, int, int]] = []
        self.changes: list[tuple[float, int, int]] = []
        self.initial: list[int] = []

    def initialize(self, level: int, inputs: dict[int, int] | None = None) -> None:
        """Set every net to ``level``, override ``inputs``, then settle in zero time.

        Settling is not recorded and does not count against the event budget;
        the resulting state becomes ``initial``.
        """
        n = self.netlist.num_nets
        self.values = [level] * n
        for net, v in (inputs or {}).items():
            self.values[net] = v
        work = list(range(len(self._fns)))
        pending = set(work)
        steps, limit = 0, 64 * (len(work) + 1)
        while work:
            c = work.pop()
            pending.discard(c)
            out = self._outs[c]
            nv = self._fns[c](self.values, self.values[out])
            if nv != self.values[out]:
                self.values[out] = nv
                for f in self._fanout[out]:
                    if f not in pending:
                        pending.add(f)
                        work.append(f)
            steps += 1
            if steps > limit:
                raise DeadlockError("initial state does not settle")
        self._proj = list(self.values)
        self.initial = list(self.values)
        self.changes = []
        self.activity = [0] * len(self._fns)
        self.last_change = [float("-inf")] * n
        self._heap = []
        self.now = 0.0

    def drive(self, net: int, value: int, at: float | None = None) -> None:
        if self._driver[net] >= 0:
            raise SimulationError(f"net {self.netlist.net_names[net]} is driven by a cell")
        heapq.heappush(self._heap, (self.now if at is None else at, net, value))

    def run(self, watch: dict[int, tuple[int, int]] | None = None,
            illegal_level: int | None = None) -> int:
        """Process events until the queue drains. Returns the number of events handled.

        ``watch`` maps a rail net to its ``(rail1, rail0)`` pair; any instant
        where a watched pair sits at ``illegal_level`` on both rails raises
        :class:`ProtocolViolation`.
        """
        heap = self._heap
        values, proj, fns, outs, delays = self.values, self._proj, self._fns, self._outs, self._delays
        fanout, driver, activity, last = self._fanout, self._driver, self.activity, self.last_change
        record, changes = self.record, self.changes
        budget = self.event_budget
        pop, push = heapq.heappop, heapq.heappush
        count = 0
        while heap:
            t = heap[0][0]
            dirty = set()
            touched = None
            while heap and heap[0][0] == t:
                _, net, v = pop(heap)
                count += 1
                if values[net] == v:
                    continue
                values[net] = v
                last[net] = t
                d = driver[net]
                if d >= 0:
                    activity[d] += 1
                else:
                    proj[net] = v
                if record:
                    changes.append((t, net, v))
                dirty.update(fanout[net])
                if watch is not None and net in watch:
                    if touched is None:
                        touched = []
                    touched.append(watch[net])
            if touched is not None:
                for r1, r0 in touched:
                    if values[r1] == illegal_level and values[r0] == illegal_level:
                        names = self.netlist.net_names
                        raise ProtocolViolation(
                            f"illegal codeword on ({names[r1]}, {names[r0]}) at t={t:g}")
            for c in dirty:
                out = outs[c]
                nv = fns[c](values, proj[out])
                if nv != proj[out]:
                    proj[out] = nv
                    push(heap, (t + delays[c], out, nv))
            self.now = t
            if count > budget:
                raise DeadlockError(f"event budget of {budget} exhausted at t={t:g}")
        return count

    def trace(self, protocol: Protocol | None = None, markers=(), control=()) -> Trace:
        return Trace(protocol or self.netlist.protocol, self.netlist.net_names,
                     list(self.initial), list(self.changes), list(markers), frozenset(control))


def evaluate_fragment(netlist: Netlist, inputs: dict[str, int | None],
                      library: Library = DEFAULT_LIBRARY, sim: Simulator | None = None):
    """Drive named input ports (bit value, or None for spacer) and settle.

    Starts from the settled spacer state unless an existing ``sim`` is passed
    in to continue from. Returns ``(codewords by output port name, sim)``.
    """
    from .railcode import classify_pair, encode_bit
    proto = netlist.protocol
    if sim is None:
        sim = Simulator(netlist, library)
        sim.initialize(proto.spacer_level)
    t = sim.now + 1.0
    for name, bit in inputs.items():
        p = netlist.port(name)
        pair = (proto.spacer_level,) * 2 if bit is None else encode_bit(bit, proto)
        sim.drive(p.rail1, pair[0], t)
        sim.drive(p.rail0, pair[1], t)
    sim.run()
    words = {p.name: classify_pair((sim.values[p.rail1], sim.values[p.rail0]), proto)
             for p in netlist.out_ports}
    return words, sim


def operand_ports(netlist: Netlist):
    a = [p for p in netlist.in_ports if p.name.startswith("A")]
    b = [p for p in netlist.in_ports if p.name.startswith("B")]
    if not a or len(a) != len(b) or len(a) + len(b) != len(netlist.in_ports):
        raise SimulationError("stage inputs must be operand buses A* and B* of equal width")
    return a, b


class StageEnv:
    """Behavioural sender and receiver wrapped around a stage netlist.

    Each :meth:`transaction` runs data phase then spacer phase, starting and
    ending in the settled spacer state. The environment reacts ``env_delay``
    units after the circuit has gone quiet.
    """

    def __init__(self, stage: Netlist, library: Library = DEFAULT_LIBRARY, record: bool = True,
                 event_budget: int = DEFAULT_EVENT_BUDGET, env_delay: float = 1.0):
        if not stage.is_stage:
            raise SimulationError("netlist has no ACKIN/ACKOUT; wrap it with build_stage first")
        self.stage = stage
        self.proto = stage.protocol
        self.env_delay = env_delay
        self.a_ports, self.b_ports = operand_ports(stage)
        self.width = len(self.a_ports)
        self.out_ports = stage.out_ports
        self.out_rails = [r for p in self.out_ports for r in p.rails]
        self.sim = Simulator(stage, library, record, event_budget)
        self.markers: list[tuple[float, str]] = []
        self.spacer = self.proto.spacer_level
        self._watch = {}
        for p in self.out_ports:
            self._watch[p.rail1] = p.rails
            self._watch[p.rail0] = p.rails
        self._illegal = 1 - self.spacer
        self.sim.initialize(self.spacer, {stage.ack_in: 1 - self.spacer})
        if self.sim.values[stage.ack_out] != self.spacer:
            raise SimulationError("stage does not settle with ACKOUT idle")

    def settle(self):
        self.sim.run(self._watch, self._illegal)

    def apply(self, a: int | None, b: int | None) -> float:
        t = self.sim.now + self.env_delay
        for ports, value in ((self.a_ports, a), (self.b_ports, b)):
            if value is None:
                word = [(self.spacer, self.spacer)] * len(ports)
            else:
                word = encode_word(value, len(ports), self.proto)
            for p, (r1, r0) in zip(ports, word):
                self.sim.drive(p.rail1, r1, t)
                self.sim.drive(p.rail0, r0, t)
        return t

    def _stuck(self, want_data: bool) -> str:
        names = []
        for p in self.out_ports:
            pair = (self.sim.values[p.rail1], self.sim.values[p.rail0])
            is_spacer = pair == (self.spacer, self.spacer)
            if want_data == is_spacer:
                names.append(p.name)
        return ", ".join(names) or "ACKOUT"

    def acknowledge(self, level: int) -> None:
        ack_out = self.stage.ack_out
        if self.sim.values[ack_out] != level:
            raise DeadlockError(f"ACKOUT never reached {level}")
        self.markers.append((self.sim.last_change[ack_out], ACK_OUT))
        t = self.sim.now + self.env_delay
        self.markers.append((t, ACK_IN))
        self.sim.drive(self.stage.ack_in, 1 - level, t)
        self.settle()

    def output_state(self):
        bus = [(self.sim.values[p.rail1], self.sim.values[p.rail0]) for p in self.out_ports]
        return decode_bus(bus, self.proto)

    def transaction(self, a: int, b: int) -> tuple[int, TransactionTiming]:
        last = self.sim.last_change
        t0 = self.apply(a, b)
        self.markers.append((t0, DATA))
        self.settle()
        result = self.output_state()
        if not result.is_value:
            raise DeadlockError(f"data phase stalled; outputs without data: {self._stuck(True)}")
        forward = max(last[r] for r in self.out_rails) - t0
        self.acknowledge(1 - self.spacer)

        t1 = self.apply(None, None)
        self.markers.append((t1, SPACER))
        self.settle()
        if self.output_state().state is not BusState.SPACER:
            raise DeadlockError(f"spacer phase stalled; outputs not reset: {self._stuck(False)}")
        reverse = max(last[r] for r in self.out_rails) - t1
        self.acknowledge(self.spacer)
        return result.value, TransactionTiming(forward, reverse)

    def trace(self) -> Trace:
        return self.sim.trace(self.proto, self.markers, (self.stage.ack_in, self.stage.ack_out))


def simulate_transaction(stage: Netlist, a: int, b: int, library: Library = DEFAULT_LIBRARY,
                         event_budget: int = DEFAULT_EVENT_BUDGET):
    """One complete 4-phase transaction from the settled spacer state.

    Returns ``(decoded result, TransactionTiming, Trace)``.
    """
    env = StageEnv(stage, library, record=True, event_budget=event_budget)
    value, timing = env.transaction(a, b)
    return value, timing, env.trace()


@dataclass
class SequenceResult:
    vectors: list[tuple[int, int]]
    results: list[int]
    timings: list[TransactionTiming]
    activity: list[int]
    mismatches: list[int]
    trace: Trace | None = None

    @property
    def passed(self) -> bool:
        return not self.mismatches

    @property
    def max_forward(self) -> float:
        return max(t.forward_latency for t in self.timings)

    @property
    def max_reverse(self) -> float:
        return max(t.reverse_latency for t in self.timings)

    @property
    def mean_forward(self) -> float:
        return fmean(t.forward_latency for t in self.timings)

    @property
    def mean_reverse(self) -> float:
        return fmean(t.reverse_latency for t in self.timings)


def random_vectors(n: int, width: int, seed: int) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    return [(rng.getrandbits(width), rng.getrandbits(width)) for _ in range(n)]


def worst_case_vectors(width: int) -> list[tuple[int, int]]:
    """Operands that ripple a carry through every full adder (both operand orders)."""
    ones = (1 << width) - 1
    return [(ones, 0), (0, ones)]


def run_sequence(stage: Netlist, vectors: Iterable[tuple[int, int]] | int,
                 library: Library = DEFAULT_LIBRARY, seed: int = 0, record_trace: bool = False,
                 oracle: Callable[[int, int], int] | None = None,
                 event_budget: int = DEFAULT_EVENT_BUDGET) -> SequenceResult:
    """Run transactions back to back and compare against the behavioural adder.

    ``vectors`` may be an explicit list or a count of seeded random operand
    pairs. The default oracle is :func:`qdiadd.approx.approx_add` with the
    stage's width and approximation size.
    """
    env = StageEnv(stage, library, record=record_trace, event_budget=event_budget)
    if isinstance(vectors, int):
        vectors = random_vectors(vectors, env.width, seed)
    vectors = list(vectors)
    if not vectors:
        raise ValueError("need at least one vector")
    if oracle is None:
        from .approx import approx_add
        k = int(stage.metadata.get("approx_bits", 0))
        w = env.width
        oracle = lambda a, b: approx_add(a, b, w, k)  # noqa: E731

    results, timings, mismatches = [], [], []
    for i, (a, b) in enumerate(vectors):
        try:
            value, timing = env.transaction(a, b)
        except SimulationError as exc:
            err = type(exc)(f"vector {i} (a={a}, b={b}): {exc}")
            err.index = i
            raise err from exc
        results.append(value)
        timings.append(timing)
        if value != oracle(a, b):
            mismatches.append(i)
    return SequenceResult(vectors, results, timings, list(env.sim.activity), mismatches,
                          env.trace() if record_trace else None)
