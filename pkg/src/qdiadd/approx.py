"""Word-level model of the lower-part-OR approximate adder and its error statistics."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

EXHAUSTIVE_MAX_WIDTH = 12
MAX_WIDTH = 60  # int64 sums must not overflow


def approx_add(a: int, b: int, width: int, k: int) -> int:
    """Sum of ``a`` and ``b`` with the low ``k`` bits approximated.

    Low bits are ``a | b``; the carry into bit ``k`` is ``a[k-1] & b[k-1]``
    (none when ``k == 0``); the upper slices are added exactly. The result has
    ``width + 1`` bits, the top one being the carry out.
    """
    if not 0 <= k <= width - 2:
        raise ValueError(f"approximation size {k} outside 0..{width - 2}")
    if not (0 <= a < 1 << width and 0 <= b < 1 << width):
        raise ValueError(f"operands must fit in {width} bits")
    if k == 0:
        return a + b
    low_mask = (1 << k) - 1
    carry = (a >> (k - 1)) & (b >> (k - 1)) & 1
    high = (a >> k) + (b >> k) + carry
    return (high << k) | ((a | b) & low_mask)


def _approx_add_array(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    if k == 0:
        return a + b
    carry = (a >> (k - 1)) & (b >> (k - 1)) & 1
    high = (a >> k) + (b >> k) + carry
    return (high << k) | ((a | b) & ((1 << k) - 1))


@dataclass(frozen=True)
class ErrorStats:
    width: int
    approx_bits: int
    total_cases: int
    error_cases: int
    error_rate: float
    mean_abs_error: float
    max_abs_error: int
    mode: str

    def csv_row(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(asdict(self)), lineterminator="\n")
        writer.writerow(asdict(self))
        return buf.getvalue()

    @staticmethod
    def csv_header() -> str:
        return ",".join(ErrorStats.__dataclass_fields__) + "\n"


class _Accumulator:
    def __init__(self):
        self.total = 0
        self.errors = 0
        self.abs_sum = 0
        self.abs_max = 0

    def add(self, a: np.ndarray, b: np.ndarray, k: int):
        diff = np.abs(_approx_add_array(a, b, k) - (a + b))
        self.total += int(diff.size)
        self.errors += int(np.count_nonzero(diff))
        self.abs_sum += int(diff.sum())
        if diff.size:
            self.abs_max = max(self.abs_max, int(diff.max()))


def error_stats(width: int, k: int, mode: str = "exhaustive", n: int | None = None,
                seed: int = 0) -> ErrorStats:
    """Error rate, mean and max absolute error of :func:`approx_add` against exact addition.

    ``mode="exhaustive"`` enumerates all ``2**(2*width)`` operand pairs (width
    at most 12). ``mode="sampled"`` draws ``n`` operand pairs from a seeded
    generator; they are distinct whenever the case space is small enough to
    enumerate, so ``n = 2**(2*width)`` reproduces the exhaustive figures.
    """
    if not 0 <= k <= width - 2:
        raise ValueError(f"approximation size {k} outside 0..{width - 2}")
    if width > MAX_WIDTH:
        raise ValueError(f"statistics limited to width <= {MAX_WIDTH}")
    acc = _Accumulator()
    if mode == "exhaustive":
        if width > EXHAUSTIVE_MAX_WIDTH:
            raise ValueError(f"exhaustive statistics limited to width <= {EXHAUSTIVE_MAX_WIDTH}")
        b = np.arange(1 << width, dtype=np.int64)
        chunk = max(1, (1 << 20) >> width)
        for start in range(0, 1 << width, chunk):
            a = np.arange(start, min(start + chunk, 1 << width), dtype=np.int64)
            aa = np.repeat(a, b.size)
            bb = np.tile(b, a.size)
            acc.add(aa, bb, k)
        label = "exhaustive"
    elif mode == "sampled":
        if not n or n < 1:
            raise ValueError("sampled mode needs n >= 1")
        rng = np.random.default_rng(seed)
        space_bits = 2 * width
        if space_bits <= 24:
            if n > 1 << space_bits:
                raise ValueError(f"cannot draw {n} distinct cases from {1 << space_bits}")
            cases = rng.choice(1 << space_bits, size=n, replace=False).astype(np.int64)
            a, b = cases >> width, cases & ((1 << width) - 1)
        else:
            a = rng.integers(0, 1 << width, size=n, dtype=np.int64)
            b = rng.integers(0, 1 << width, size=n, dtype=np.int64)
        acc.add(a, b, k)
        label = f"sampled(seed={seed},n={n})"
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return ErrorStats(
        width=width,
        approx_bits=k,
        total_cases=acc.total,
        error_cases=acc.errors,
        error_rate=acc.errors / acc.total,
        mean_abs_error=acc.abs_sum / acc.total,
        max_abs_error=acc.abs_max,
        mode=label,
    )
