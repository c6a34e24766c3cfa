"""h2 cost of a sampling schedule and schedule optimization.

The long-run average cost of a schedule splits into a schedule-independent
floor tr(PW) plus the average over one period of a convex per-interval
penalty beta(tau).  Convexity makes interval rebalancing (shrink the
largest, grow the smallest) monotonically improving, which yields the
floor/ceil characterization of optimal schedules.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BetaOverflow, InvalidArgs, InvalidPair, POutOfRange, RateOutOfRange, TooLarge
from .matops import RiccatiData
from .model import SystemModel
from .schedule import Schedule

BRUTE_FORCE_MAX_PERIOD = 12


class BetaTable:
    """Lazily grown table of the per-interval penalties beta(1..p).

    beta(p) = tr(Z * sum_{s=1}^{p-1} Y(s)) with Y(s) the s-step disturbance
    covariance sum; computed incrementally via Y(s+1) = Y(s) + A^s W A'^s.
    Thread-safe: concurrent readers observe consistent values.
    """

    def __init__(self, model: SystemModel, riccati: RiccatiData):
        self.model = model
        self.riccati = riccati
        self._lock = threading.Lock()
        self._values = [0.0]  # beta(1) = 0
        self._y = np.zeros((model.n, model.n))       # Y(p-1)
        self._y_cumsum = np.zeros((model.n, model.n))
        self._a_pow = np.eye(model.n)                # A^(p-2) for the next Y step

    def value(self, p: int) -> float:
        if p < 1:
            raise ValueError(f"interval length must be >= 1, got {p}")
        with self._lock, np.errstate(over="ignore", invalid="ignore"):
            while len(self._values) < p:
                self._y = self._y + self._a_pow @ self.model.W @ self._a_pow.T
                self._a_pow = self.model.A @ self._a_pow
                self._y_cumsum = self._y_cumsum + self._y
                val = float(np.trace(self.riccati.Z @ self._y_cumsum))
                if not math.isfinite(val):
                    raise BetaOverflow(
                        f"beta({len(self._values) + 1}) overflows double precision")
                self._values.append(val)
            return self._values[p - 1]

    def values(self, p_max: int) -> list[float]:
        self.value(p_max)
        with self._lock:
            return self._values[:p_max]


def beta(model: SystemModel, riccati: RiccatiData, p: int,
         table: BetaTable | None = None) -> float:
    """Expected quadratic penalty accrued over an inter-sample gap of length p."""
    if table is None:
        table = BetaTable(model, riccati)
    return table.value(p)


def j2(model: SystemModel, riccati: RiccatiData, s: Schedule,
       table: BetaTable | None = None) -> float:
    """Average cost tr(PW) + (1/h) * sum of beta over the intervals."""
    if table is None:
        table = BetaTable(model, riccati)
    return riccati.tr_pw + sum(table.value(tau) for tau in s.intervals) / s.period


def improve_step(s: Schedule, i: int, l: int, p: int) -> Schedule:
    """Move p units from interval i to interval l (requires tau_i > tau_l).

    With p at most floor((tau_i - tau_l)/2) the new schedule keeps the same
    period and sample count and never costs more.
    """
    tau = list(s.intervals)
    if tau[i] <= tau[l]:
        raise InvalidPair(f"need tau[{i}]={tau[i]} > tau[{l}]={tau[l]}")
    if not 0 <= p <= (tau[i] - tau[l]) // 2:
        raise POutOfRange(
            f"p={p} outside 0..{(tau[i] - tau[l]) // 2} for pair ({tau[i]}, {tau[l]})")
    tau[i] -= p
    tau[l] += p
    return Schedule(tau)


def greedy_optimize(model: SystemModel, riccati: RiccatiData, s: Schedule) -> Schedule:
    """Repeatedly rebalance the largest interval into the smallest.

    Each step moves the maximal admissible amount; ties break at the lowest
    index.  Stops when max - min <= 1, i.e. all intervals are floor or ceil
    of the average.  The cost sequence is nonincreasing throughout.
    """
    current = s
    while True:
        tau = current.intervals
        i = max(range(len(tau)), key=lambda k: (tau[k], -k))
        l = min(range(len(tau)), key=lambda k: (tau[k], k))
        if tau[i] - tau[l] <= 1:
            return current
        current = improve_step(current, i, l, (tau[i] - tau[l]) // 2)


def optimal_schedule(h: int, m: int) -> Schedule:
    """The floor/ceil schedule: m1 intervals of floor(h/m), m2 of ceil(h/m)."""
    if not 1 <= m <= h:
        raise InvalidArgs(f"need 1 <= m <= h, got h={h}, m={m}")
    h1 = h // m
    m2 = h - m * h1
    m1 = m - m2
    return Schedule((h1,) * m1 + (h1 + 1,) * m2)


@dataclass(frozen=True)
class CurvePoint:
    rate: Fraction
    value: float


def h2_curve(model: SystemModel, riccati: RiccatiData, h_max: int,
             rates: Iterable[Fraction | float],
             table: BetaTable | None = None) -> list[CurvePoint]:
    """Optimal cost at each average sampling rate.

    Piecewise affine in the rate between the integer-interval breakpoints:
    with h1 = floor(1/r), the value is
    tr(PW) + beta(h1)*(r*(h1+1) - 1) + beta(h1+1)*(1 - r*h1).
    """
    if table is None:
        table = BetaTable(model, riccati)
    points = []
    for rate in rates:
        r = Fraction(rate).limit_denominator(10**12) if not isinstance(rate, Fraction) else rate
        if not Fraction(1, h_max) <= r <= 1:
            raise RateOutOfRange(f"rate {r} outside [1/{h_max}, 1]")
        avg = 1 / r
        if avg.denominator == 1:
            h = avg.numerator
            value = riccati.tr_pw + table.value(h) / h
        else:
            h1 = avg.numerator // avg.denominator
            value = (riccati.tr_pw
                     + table.value(h1) * float(r * (h1 + 1) - 1)
                     + table.value(h1 + 1) * float(1 - r * h1))
        points.append(CurvePoint(rate=r, value=value))
    return points


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _min_rotation(tau: Sequence[int]) -> tuple[int, ...]:
    rots = [tuple(tau[k:]) + tuple(tau[:k]) for k in range(len(tau))]
    return min(rots)


def brute_force_h2(model: SystemModel, riccati: RiccatiData, h: int, m: int,
                   table: BetaTable | None = None) -> tuple[float, list[Schedule]]:
    """Enumerate all period-h schedules with m samples (up to rotation).

    Independent oracle for the floor/ceil characterization: returns the
    minimal cost and every rotation-distinct argmin.
    """
    if h > BRUTE_FORCE_MAX_PERIOD:
        raise TooLarge(f"brute force capped at period {BRUTE_FORCE_MAX_PERIOD}, got {h}")
    if not 1 <= m <= h:
        raise InvalidArgs(f"need 1 <= m <= h, got h={h}, m={m}")
    if table is None:
        table = BetaTable(model, riccati)
    necklaces = {_min_rotation(tau) for tau in _compositions(h, m)}
    best_cost = math.inf
    argmins: list[Schedule] = []
    for tau in sorted(necklaces):
        s = Schedule(tau)
        cost = j2(model, riccati, s, table=table)
        if math.isinf(best_cost) or cost < best_cost - 1e-9 * (1.0 + abs(best_cost)):
            best_cost = cost
            argmins = [s]
        elif abs(cost - best_cost) <= 1e-9 * (1.0 + abs(best_cost)):
            argmins.append(s)
    return best_cost, argmins
