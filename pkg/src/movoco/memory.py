"""Memory-to-movements reduction.

The round-t loss depends on the last b_t + 1 decisions.  With the unary
surrogate f_hat_t(w) = f_t(w, ..., w), the reduction feeds the unary gradient
together with an effective movement coefficient G * xi_t, where

    xi_t = sum_{s=t}^T [t - (s - b_s)]_+

converts memory sensitivity into movement sensitivity.  The full schedule
b_1..b_T must be known up front (xi_t looks at future lengths).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Feedback, norm, validate_horizon


@dataclass(frozen=True)
class MemorySchedule:
    """Memory lengths b_1..b_T with 0 <= b_t <= t-1; B is the maximum."""

    lengths: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        T = validate_horizon(self.horizon)
        object.__setattr__(self, "horizon", T)
        b = tuple(int(x) for x in self.lengths)
        if len(b) != T:
            raise ValueError(f"need {T} memory lengths, got {len(b)}")
        for t, bt in enumerate(b, start=1):
            if not 0 <= bt <= t - 1:
                raise ValueError(f"memory length b_{t} = {bt} outside [0, {t - 1}]")
        object.__setattr__(self, "lengths", b)

    @property
    def B(self) -> int:
        return max(self.lengths)


def xi_naive(t: int, schedule: MemorySchedule) -> int:
    """Direct double-loop evaluation of xi_t; kept as the test oracle."""
    if not 1 <= t <= schedule.horizon:
        raise ValueError(f"t = {t} outside [1, {schedule.horizon}]")
    total = 0
    for s in range(t, schedule.horizon + 1):
        b_s = schedule.lengths[s - 1]
        total += max(t - (s - b_s), 0)
    return total


def xi_profile(schedule: MemorySchedule) -> np.ndarray:
    """All xi_t at once in O(T): each s contributes the ramp 1..b_s on the
    interval t in [s - b_s + 1, s], accumulated with difference arrays so
    xi_t = t * count_t - offset_t."""
    T = schedule.horizon
    count = np.zeros(T + 2, dtype=np.int64)
    offset = np.zeros(T + 2, dtype=np.int64)
    for s in range(1, T + 1):
        b_s = schedule.lengths[s - 1]
        if b_s == 0:
            continue
        lo = s - b_s + 1
        count[lo] += 1
        count[s + 1] -= 1
        offset[lo] += s - b_s
        offset[s + 1] -= s - b_s
    count = np.cumsum(count[: T + 1])
    offset = np.cumsum(offset[: T + 1])
    t_idx = np.arange(T + 1, dtype=np.int64)
    return (t_idx * count - offset)[1:]


def xi_bounds_check(schedule: MemorySchedule) -> bool:
    """xi_t <= B^2 for every t and sum_t xi_t <= sum_t b_t^2."""
    xi = xi_profile(schedule)
    B = schedule.B
    if np.any(xi > B * B):
        return False
    return int(xi.sum()) <= sum(b * b for b in schedule.lengths)


@dataclass(frozen=True)
class UnaryOracle:
    """Callback contract for a memory loss.

    ``unary_grad(t, w)`` returns a subgradient of the unary surrogate at w,
    with norm at most ``H``.  ``memory_loss(t, window)`` evaluates the full
    loss on the decision window (w_{t-b_t}, ..., w_t), used only for regret
    accounting.
    """

    unary_grad: Callable[[int, np.ndarray], np.ndarray]
    H: float
    memory_loss: Callable[[int, list[np.ndarray]], float]


class AssumptionViolationError(RuntimeError):
    """The oracle produced a gradient larger than its declared bound."""


class MemoryReduction:
    """Drives a movement-cost learner through the unary reduction.

    ``step(t)`` plays the inner decision, queries the unary gradient, and
    forwards it with coefficient G * xi_{t+1} (the one in force when the
    movement w_{t+1} - w_t is charged); xi_{T+1} = 0.  The decision history is
    retained so the memory loss of the realized trajectory can be evaluated.
    """

    def __init__(self, schedule: MemorySchedule, oracle: UnaryOracle, inner, G: float):
        if not G > 0:
            raise ValueError(f"G must be > 0, got {G}")
        self.schedule = schedule
        self.oracle = oracle
        self.inner = inner
        self.G = G
        self.xi = xi_profile(schedule)
        self.history: list[np.ndarray] = []  # w_1, w_2, ... as played
        self._next_round = 1

    def required_L(self) -> float:
        """Scale the inner learner's guarantee needs: H + 2*G*B^2."""
        return self.oracle.H + 2.0 * self.G * self.schedule.B**2

    def predict(self) -> np.ndarray:
        return self.inner.predict()

    def window(self, t: int) -> list[np.ndarray]:
        """Decisions (w_{t-b_t}, ..., w_t) of the realized trajectory."""
        b_t = self.schedule.lengths[t - 1]
        return self.history[t - b_t - 1 : t]

    def step(self, t: int) -> np.ndarray:
        if t != self._next_round:
            raise ValueError(f"rounds must be stepped in order; expected {self._next_round}, got {t}")
        w = self.inner.predict()
        self.history.append(w)
        h = self.oracle.unary_grad(t, w)
        h_norm = norm(h)
        if h_norm > self.oracle.H * (1.0 + 1e-9) + 1e-12:
            raise AssumptionViolationError(
                f"unary gradient norm {h_norm:.6g} exceeds declared bound {self.oracle.H:.6g}"
            )
        next_xi = self.xi[t] if t < self.schedule.horizon else 0  # xi array is 0-indexed by t-1
        self.inner.observe(Feedback(h, self.G * float(next_xi)))
        self._next_round += 1
        return w
