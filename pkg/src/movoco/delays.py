"""Delays-to-movements reduction.

Gradient feedback for round t arrives only at the end of round t + d_t.  The
ledger precomputes, for a known delay schedule, which source rounds arrive at
each round and how many are still missing, so the reduction can aggregate each
round's arrivals into a single gradient and hand it to a movement-cost learner
with coefficient G * |m_{t+1}| (plus an optional external movement cost).

No in-order assumption anywhere: arrivals are grouped purely by arrival round.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Feedback, norm, validate_horizon, zeros


@dataclass(frozen=True)
class DelaySchedule:
    """Delays d_1..d_T with the feedback-within-horizon requirement
    t + d_t <= T."""

    delays: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        T = validate_horizon(self.horizon)
        object.__setattr__(self, "horizon", T)
        d = tuple(int(x) for x in self.delays)
        if len(d) != T:
            raise ValueError(f"need {T} delays, got {len(d)}")
        for t, dt in enumerate(d, start=1):
            if dt < 0:
                raise ValueError(f"delay d_{t} = {dt} is negative")
            if t + dt > T:
                raise ValueError(f"delay d_{t} = {dt} violates t + d_t <= T")
        object.__setattr__(self, "delays", d)

    @property
    def d_tot(self) -> int:
        return sum(self.delays)


class DelayLedger:
    """Precomputed arrival structure of a delay schedule.

    ``buckets[t]`` (t in 1..T) lists the source rounds whose gradients arrive
    at the end of round t, i.e. o_{t+1} \\ o_t.  ``missing[t]`` is |m_t| for
    t in 1..T+1 with m_t the rounds in [t-1] still unobserved before round t.
    """

    def __init__(self, schedule: DelaySchedule):
        self.schedule = schedule
        T = schedule.horizon
        self.buckets: dict[int, list[int]] = {t: [] for t in range(1, T + 1)}
        for t, dt in enumerate(schedule.delays, start=1):
            self.buckets[t + dt].append(t)
        self.missing = [0] * (T + 2)  # index t = |m_t|, t in 1..T+1
        arrived = 0
        for t in range(1, T + 2):
            # |o_t| = number of source rounds with tau + d_tau < t
            self.missing[t] = (t - 1) - arrived
            if t <= T:
                arrived += len(self.buckets[t])
        self.sigma_max = max(self.missing[t] for t in range(1, T + 1))
        self.d_tot = schedule.d_tot

    @property
    def horizon(self) -> int:
        return self.schedule.horizon

    def required_L(self, G: float) -> float:
        """Smallest scale parameter the inner learner's guarantee needs:
        G * (1 + 3 * sigma_max)."""
        return G * (1.0 + 3.0 * self.sigma_max)


def build_ledger(schedule: DelaySchedule) -> DelayLedger:
    return DelayLedger(schedule)


def delay_aux_check(ledger: DelayLedger) -> bool:
    """sum_t |m_t| * |o_{t+1} \\ o_t| <= 2 * d_tot, with the constant exactly 2."""
    total = sum(
        ledger.missing[t] * len(ledger.buckets[t]) for t in range(1, ledger.horizon + 1)
    )
    return total <= 2 * ledger.d_tot


def ledger_identity_check(ledger: DelayLedger) -> bool:
    """Structural identities: the |m|-recurrence, m_1 empty, o_{T+1} = [T]."""
    T = ledger.horizon
    if ledger.missing[1] != 0 or ledger.missing[T + 1] != 0:
        return False
    if sum(len(ledger.buckets[t]) for t in range(1, T + 1)) != T:
        return False
    for t in range(1, T + 1):
        if ledger.missing[t + 1] != ledger.missing[t] + 1 - len(ledger.buckets[t]):
            return False
    return True


class DelayReduction:
    """Wraps a movement-cost learner (batched or doubling-wrapped) behind the
    delayed-feedback protocol."""

    def __init__(self, ledger: DelayLedger, inner, G: float):
        if not G > 0:
            raise ValueError(f"G must be > 0, got {G}")
        self.ledger = ledger
        self.inner = inner
        self.G = G
        self._next_round = 1

    def predict(self) -> np.ndarray:
        return self.inner.predict()

    def step(self, t: int, arrived: list[np.ndarray], external_lambda_next: float = 0.0) -> None:
        """End-of-round t: feed the aggregated bucket to the inner learner.

        ``arrived`` must contain exactly the gradients of the source rounds in
        this round's bucket (any order; summation commutes).
        """
        if t != self._next_round:
            raise ValueError(f"rounds must be stepped in order; expected {self._next_round}, got {t}")
        bucket = self.ledger.buckets[t]
        if len(arrived) != len(bucket):
            raise ValueError(
                f"round {t}: expected {len(bucket)} arrivals, got {len(arrived)}"
            )
        h = zeros(self.inner.dim)
        for g in arrived:
            h += g
        lam = self.G * self.ledger.missing[t + 1] + external_lambda_next
        self.inner.observe(Feedback(h, lam))
        self._next_round += 1
