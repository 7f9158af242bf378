"""Adaptive first-order batching on top of the grid learner.

Gradients accumulate in a buffer while the decision stays frozen; only when
the buffered norm strictly exceeds the current movement coefficient is the
aggregate forwarded to the inner grid learner and the decision refreshed.
A doubling wrapper adapts the scale parameter L when the stream violates the
initial guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import Feedback, as_vector, norm, zeros
from .grid import GridLearner, GridParams


@dataclass
class EpochMember:
    """One buffered round: its gradient, the coefficient in force when it
    arrived (lambda_t), and the coefficient delivered with it (lambda_{t+1})."""

    gradient: np.ndarray
    lambda_in: float
    lambda_next: float


@dataclass
class EpochRecord:
    members: list[EpochMember] = field(default_factory=list)
    g_tilde: np.ndarray | None = None
    lambda_tilde_next: float | None = None
    closed: bool = False


class BatchedLearner:
    """Freezes its decision within each epoch; flushes the gradient buffer to
    the inner grid learner when ||H|| > lambda_{t+1} (strictly).

    Ties do not flush.  The caller delivers lambda = 0 with the final round's
    feedback (the end-of-horizon convention), which flushes any nonzero
    residual buffer; a zero residual buffer is left as a trailing open epoch.
    """

    def __init__(self, params: GridParams, dim: int):
        self.params = params
        self.inner = GridLearner(params, dim)
        self.H = zeros(dim)
        self.epoch_index = 1
        self.current_decision = self.inner.predict()
        self.epoch_log: list[EpochRecord] = [EpochRecord()]
        self._lambda_in = 0.0  # lambda_1 = 0 convention

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def current_L(self) -> float:
        return self.params.L

    def predict(self) -> np.ndarray:
        return self.current_decision.copy()

    def observe(self, fb: Feedback) -> None:
        as_vector(fb.gradient, dim=self.dim)
        self.H += fb.gradient
        record = self.epoch_log[-1]
        record.members.append(
            EpochMember(fb.gradient.copy(), self._lambda_in, fb.next_lambda)
        )
        self._lambda_in = fb.next_lambda
        if norm(self.H) > fb.next_lambda:
            record.g_tilde = self.H.copy()
            record.lambda_tilde_next = fb.next_lambda
            record.closed = True
            self.inner.update(Feedback(self.H.copy(), fb.next_lambda))
            self.current_decision = self.inner.predict()
            self.H = zeros(self.dim)
            self.epoch_index += 1
            self.epoch_log.append(EpochRecord())


def epoch_decomposition_check(log: list[EpochRecord]) -> bool:
    """For every closed epoch,
    ||g_tilde||^2 + lambda_tilde_next^2 <= sum_t (2||g_t||^2 + 4*lambda_t*||g_t||),
    with lambda_t the coefficient in force when g_t arrived.  Constants 2 and 4
    are exact; only float rounding slack is allowed."""
    for record in log:
        if not record.closed:
            continue
        lhs = norm(record.g_tilde) ** 2 + record.lambda_tilde_next**2
        rhs = sum(
            2.0 * norm(m.gradient) ** 2 + 4.0 * m.lambda_in * norm(m.gradient)
            for m in record.members
        )
        if lhs > rhs * (1.0 + 1e-12) + 1e-12:
            return False
    return True


def epoch_prefix_check(log: list[EpochRecord]) -> bool:
    """Within each epoch every non-flush prefix satisfies
    ||sum of gradients so far|| <= the lambda delivered at that step."""
    for record in log:
        members = record.members
        last = len(members) - 1 if record.closed else len(members)
        prefix = None
        for i, m in enumerate(members[:last]):
            prefix = m.gradient.copy() if prefix is None else prefix + m.gradient
            if norm(prefix) > m.lambda_next * (1.0 + 1e-12) + 1e-12:
                return False
    return True


class LipschitzAdaptiveLearner:
    """Doubling wrapper for an unknown scale L.

    When ||g|| + 2*lambda exceeds the current guess, the guess is raised to
    the smallest power-of-2 multiple covering the violation and the inner
    batched learner is rebuilt from scratch (decision resets to 0) before the
    feedback is forwarded.
    """

    def __init__(self, G_guess: float, factory: Callable[[float], BatchedLearner]):
        if not G_guess > 0:
            raise ValueError(f"G_guess must be > 0, got {G_guess}")
        self.G_guess = G_guess
        self.current_L = G_guess
        self._factory = factory
        self.inner = factory(G_guess)
        self.restart_count = 0

    @classmethod
    def for_batched(cls, G_guess: float, epsilon: float, horizon: int, dim: int):
        return cls(
            G_guess,
            lambda L: BatchedLearner(GridParams(L=L, epsilon=epsilon, horizon=horizon), dim),
        )

    @property
    def dim(self) -> int:
        return self.inner.dim

    def predict(self) -> np.ndarray:
        return self.inner.predict()

    def observe(self, fb: Feedback) -> None:
        violation = norm(fb.gradient) + 2.0 * fb.next_lambda
        if violation > self.current_L:
            k = max(1, math.ceil(math.log2(violation / self.current_L)))
            while self.current_L * 2**k < violation:  # guard fp rounding
                k += 1
            self.current_L *= 2**k
            self.inner = self._factory(self.current_L)
            self.restart_count += 1
        self.inner.observe(fb)
