"""Dual-rail (1-of-2) encoding under return-to-zero and return-to-one handshaking.

A bit ``W`` travels on two wires ``(W1, W0)``. Under RTZ the spacer is
``(0, 0)`` and ``W = 1`` is ``(1, 0)``; under RTO every wire is complemented,
so the spacer is ``(1, 1)`` and ``W = 1`` is ``(0, 1)``. Bus index 0 is the
least significant bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence


class Protocol(enum.Enum):
    RTZ = "RTZ"
    RTO = "RTO"

    @property
    def spacer_level(self) -> int:
        """Value every wire sits at between data words."""
        return 0 if self is Protocol.RTZ else 1

    @property
    def other(self) -> "Protocol":
        return Protocol.RTO if self is Protocol.RTZ else Protocol.RTZ


class Codeword(enum.Enum):
    DATA0 = "DATA0"
    DATA1 = "DATA1"
    SPACER = "SPACER"
    ILLEGAL = "ILLEGAL"

    @property
    def is_data(self) -> bool:
        return self in (Codeword.DATA0, Codeword.DATA1)


class RailPair(NamedTuple):
    rail1: int
    rail0: int


_CLASSIFY = {
    Protocol.RTZ: {
        (1, 0): Codeword.DATA1,
        (0, 1): Codeword.DATA0,
        (0, 0): Codeword.SPACER,
        (1, 1): Codeword.ILLEGAL,
    },
    Protocol.RTO: {
        (0, 1): Codeword.DATA1,
        (1, 0): Codeword.DATA0,
        (1, 1): Codeword.SPACER,
        (0, 0): Codeword.ILLEGAL,
    },
}


def classify_pair(pair, proto: Protocol) -> Codeword:
    return _CLASSIFY[proto][(pair[0], pair[1])]


def encode_bit(bit: int, proto: Protocol) -> RailPair:
    rail1, rail0 = (1, 0) if bit else (0, 1)
    if proto is Protocol.RTO:
        return RailPair(1 - rail1, 1 - rail0)
    return RailPair(rail1, rail0)


def spacer_pair(proto: Protocol) -> RailPair:
    s = proto.spacer_level
    return RailPair(s, s)


def encode_word(value: int, width: int, proto: Protocol) -> list[RailPair]:
    if width < 1:
        raise ValueError("width must be at least 1")
    if not 0 <= value < (1 << width):
        raise ValueError(f"value {value} does not fit in {width} bits")
    return [encode_bit((value >> i) & 1, proto) for i in range(width)]


class BusState(enum.Enum):
    VALUE = "VALUE"
    SPACER = "SPACER"
    MIXED = "MIXED"
    ILLEGAL = "ILLEGAL"


@dataclass(frozen=True)
class Decoded:
    state: BusState
    value: int | None = None

    @property
    def is_value(self) -> bool:
        return self.state is BusState.VALUE


def decode_bus(bus: Sequence, proto: Protocol) -> Decoded:
    words = [classify_pair(p, proto) for p in bus]
    if any(w is Codeword.ILLEGAL for w in words):
        return Decoded(BusState.ILLEGAL)
    if all(w is Codeword.SPACER for w in words):
        return Decoded(BusState.SPACER)
    if all(w.is_data for w in words):
        value = 0
        for i, w in enumerate(words):
            if w is Codeword.DATA1:
                value |= 1 << i
        return Decoded(BusState.VALUE, value)
    return Decoded(BusState.MIXED)
