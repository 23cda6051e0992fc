"""Cell vocabulary: gate kinds, their Boolean semantics, duals and the area/delay table.

The C-element (``C2``) is a primitive with built-in state. Its area and delay
default to the AO222 entry because that is the gate it is hand-built from.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError


class CellKind(enum.Enum):
    AND2 = "AND2"
    OR2 = "OR2"
    INV = "INV"
    AO22 = "AO22"
    OA22 = "OA22"
    AO222 = "AO222"
    OA222 = "OA222"
    C2 = "C2"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def stateful(self) -> bool:
        return self is CellKind.C2

    @property
    def dual(self) -> "CellKind":
        return _DUAL[self]


_ARITY = {
    CellKind.AND2: 2,
    CellKind.OR2: 2,
    CellKind.INV: 1,
    CellKind.AO22: 4,
    CellKind.OA22: 4,
    CellKind.AO222: 6,
    CellKind.OA222: 6,
    CellKind.C2: 2,
}

_DUAL = {
    CellKind.AND2: CellKind.OR2,
    CellKind.OR2: CellKind.AND2,
    CellKind.AO22: CellKind.OA22,
    CellKind.OA22: CellKind.AO22,
    CellKind.AO222: CellKind.OA222,
    CellKind.OA222: CellKind.AO222,
    CellKind.INV: CellKind.INV,
    CellKind.C2: CellKind.C2,
}


def eval_cell(kind: CellKind, inputs: Sequence[int], prev_out: int = 0) -> int:
    """Evaluate one cell. ``prev_out`` only matters for the C-element."""
    if len(inputs) != kind.arity:
        raise ValueError(f"{kind.value} takes {kind.arity} inputs, got {len(inputs)}")
    x = inputs
    if kind is CellKind.AND2:
        return x[0] & x[1]
    if kind is CellKind.OR2:
        return x[0] | x[1]
    if kind is CellKind.INV:
        return 1 - x[0]
    if kind is CellKind.AO22:
        return (x[0] & x[1]) | (x[2] & x[3])
    if kind is CellKind.OA22:
        return (x[0] | x[1]) & (x[2] | x[3])
    if kind is CellKind.AO222:
        return (x[0] & x[1]) | (x[2] & x[3]) | (x[4] & x[5])
    if kind is CellKind.OA222:
        return (x[0] | x[1]) & (x[2] | x[3]) & (x[4] | x[5])
    # C2: follow the inputs when they agree, otherwise hold
    return x[0] if x[0] == x[1] else prev_out


@dataclass(frozen=True)
class CellSpec:
    kind: CellKind
    area: float
    delay: float = 1.0

    def __post_init__(self):
        if not self.area > 0:
            raise ConfigError(f"{self.kind.value}: area must be positive, got {self.area}")
        if not self.delay >= 0:
            raise ConfigError(f"{self.kind.value}: delay must be non-negative, got {self.delay}")


class Library(Mapping):
    """Immutable mapping ``CellKind -> CellSpec``.

    Partial libraries are allowed to exist; asking for a missing kind raises
    :class:`ConfigError`.
    """

    def __init__(self, specs: Iterable[CellSpec]):
        self._specs = {s.kind: s for s in specs}

    def __getitem__(self, kind):
        try:
            return self._specs[kind]
        except KeyError:
            raise ConfigError(f"library has no entry for {kind.value}") from None

    def __iter__(self):
        return iter(self._specs)

    def __len__(self):
        return len(self._specs)

    def __repr__(self):
        body = ", ".join(f"{k.value}={s.area}/{s.delay}" for k, s in self._specs.items())
        return f"Library({body})"

    def missing(self) -> list[CellKind]:
        return [k for k in CellKind if k not in self._specs]

    def with_delay(self, delay: float) -> "Library":
        return Library(CellSpec(s.kind, s.area, delay) for s in self._specs.values())

    def to_dict(self) -> dict:
        return {k.value: {"area": s.area, "delay": s.delay} for k, s in self._specs.items()}

    @classmethod
    def from_dict(cls, table: Mapping, base: "Library | None" = None) -> "Library":
        specs = dict(base._specs) if base is not None else {}
        for name, entry in table.items():
            try:
                kind = CellKind(name)
            except ValueError:
                raise ConfigError(f"unknown cell kind {name!r} in library") from None
            if not isinstance(entry, Mapping) or "area" not in entry:
                raise ConfigError(f"{name}: entry needs at least an 'area' value")
            delay = entry.get("delay", specs[kind].delay if kind in specs else 1.0)
            specs[kind] = CellSpec(kind, float(entry["area"]), float(delay))
        return cls(specs.values())

    @classmethod
    def load(cls, path, merge_defaults: bool = True) -> "Library":
        """Read a JSON table ``{"AND2": {"area": 2.03, "delay": 1.0}, ...}``."""
        try:
            table = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(table, Mapping):
            raise ConfigError(f"{path}: expected a JSON object keyed by cell kind")
        return cls.from_dict(table, DEFAULT_LIBRARY if merge_defaults else None)


# Areas in square micrometres for minimum-size cells; dual pairs share an area.
DEFAULT_LIBRARY = Library([
    CellSpec(CellKind.AND2, 2.03),
    CellSpec(CellKind.OR2, 2.03),
    CellSpec(CellKind.AO22, 2.54),
    CellSpec(CellKind.OA22, 2.54),
    CellSpec(CellKind.AO222, 3.3),
    CellSpec(CellKind.OA222, 3.3),
    CellSpec(CellKind.C2, 3.3),
    CellSpec(CellKind.INV, 1.0),
])


def cell_spec(kind: CellKind, library: Library = DEFAULT_LIBRARY) -> CellSpec:
    return library[kind]
