"""Periodic sampling schedules as lists of inter-sample intervals.

A schedule (tau_0, ..., tau_{j-1}) samples the state at times
0, tau_0, tau_0+tau_1, ... and repeats with period h = sum(tau).  The
equivalent one-period binary pattern has a 1 at each sampling instant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import AllZeros, FirstBitNotOne

__all__ = ["Schedule"]


@dataclass(frozen=True, eq=False)
class Schedule:
    intervals: tuple[int, ...]

    def __init__(self, intervals: Iterable[int]):
        ivals = tuple(int(t) for t in intervals)
        if not ivals:
            raise ValueError("a schedule needs at least one interval")
        if any(t < 1 for t in ivals):
            raise ValueError(f"intervals must be >= 1, got {ivals}")
        object.__setattr__(self, "intervals", ivals)

    # Two schedules are the same sampling pattern up to phase exactly when
    # their interval multisets agree; costs depend on nothing else.
    def __eq__(self, other) -> bool:
        if not isinstance(other, Schedule):
            return NotImplemented
        return sorted(self.intervals) == sorted(other.intervals)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.intervals)))

    def __repr__(self) -> str:
        return f"Schedule({list(self.intervals)})"

    @property
    def period(self) -> int:
        return sum(self.intervals)

    @property
    def count(self) -> int:
        return len(self.intervals)

    @property
    def max_interval(self) -> int:
        return max(self.intervals)

    def average_interval(self) -> Fraction:
        """Exact h/m; the average sampling rate is its reciprocal."""
        return Fraction(self.period, self.count)

    def canonical(self) -> "Schedule":
        """Intervals sorted nonincreasing; the multiset representative."""
        return Schedule(sorted(self.intervals, reverse=True))

    def rotate(self, k: int) -> "Schedule":
        j = self.count
        k %= j
        return Schedule(self.intervals[k:] + self.intervals[:k])

    def to_sigma(self) -> list[int]:
        """One period of the binary sampling pattern (length h)."""
        bits = [0] * self.period
        t = 0
        for tau in self.intervals:
            bits[t] = 1
            t += tau
        return bits

    @classmethod
    def from_sigma(cls, bits: Sequence[int]) -> "Schedule":
        """Intervals between the 1s of one period, last one wrapping around."""
        bits = [int(b) for b in bits]
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be a nonempty 0/1 sequence")
        if bits[0] != 1:
            raise FirstBitNotOne("the pattern must start with a sample (bit 1)")
        ones = [i for i, b in enumerate(bits) if b == 1]
        if not ones:
            raise AllZeros("the pattern contains no samples")
        intervals = [b - a for a, b in zip(ones, ones[1:])]
        intervals.append(len(bits) - ones[-1])
        return cls(intervals)

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """Parse "2,4" (comma-separated intervals) or "101000" (bit pattern).

        A comma-free digit string is read as a bit pattern when it consists
        of 0s and 1s and contains at least one 0; otherwise it is a single
        interval length.
        """
        text = text.strip()
        if not text:
            raise ValueError("empty schedule")
        if "," in text:
            return cls(int(part) for part in text.split(","))
        if set(text) <= {"0", "1"} and "0" in text:
            return cls.from_sigma([int(c) for c in text])
        return cls([int(text)])
