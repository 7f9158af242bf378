"""Learning-rate grid aggregation.

One base learner per rate in the exponential grid

    { 2^i / (L * sqrt(T)),  i = 0, 1, ...  capped at 1/L },

with the aggregate playing the sum of the instances' iterates.  The grid has
ceil(log2(sqrt(T))) + 1 strictly increasing rates; the cap 1/L appears exactly
once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cmd import CmdLearner, CmdParams
from .core import Feedback, validate_horizon, zeros


def build_grid(L: float, T: int) -> list[float]:
    """Rates 2^i/(L*sqrt(T)) for i = 0,... until the cap 1/L is reached,
    then 1/L once.  The loop bound is the integer test 4^i >= T (equivalent
    to 2^i >= sqrt(T)) so grid size is deterministic at powers of four."""
    if not L > 0:
        raise ValueError(f"L must be > 0, got {L}")
    T = validate_horizon(T)
    sqrt_T = math.sqrt(T)
    rates = []
    i = 0
    while 4**i < T:
        rates.append(2**i / (L * sqrt_T))
        i += 1
    rates.append(1.0 / L)
    return rates


def expected_grid_size(T: int) -> int:
    """ceil(log2(sqrt(T))) + 1, computed in exact integer arithmetic."""
    T = validate_horizon(T)
    i = 0
    while 4**i < T:
        i += 1
    return i + 1


@dataclass(frozen=True)
class GridParams:
    L: float
    epsilon: float
    horizon: int

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        object.__setattr__(self, "horizon", validate_horizon(self.horizon))


class GridLearner:
    """Plays the sum of one CmdLearner per grid rate; broadcasts feedback."""

    def __init__(self, params: GridParams, dim: int):
        self.params = params
        self.rates = build_grid(params.L, params.horizon)
        self.instances = [
            CmdLearner(CmdParams(epsilon0=params.epsilon, eta=eta, horizon=params.horizon), dim)
            for eta in self.rates
        ]
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    def predict(self) -> np.ndarray:
        w = zeros(self._dim)
        for inst in self.instances:
            w += inst.w
        return w

    def update(self, fb: Feedback) -> None:
        for inst in self.instances:
            inst.update(fb)


def _doubling_grid(eta_min: float, eta_max: float) -> list[float]:
    grid = []
    i = 0
    while eta_min * 2**i < eta_max:
        grid.append(eta_min * 2**i)
        i += 1
    grid.append(eta_max)
    return grid


def grid_tuning_check(P: float, V: float, eta_min: float, eta_max: float) -> bool:
    """True iff the best rate in the doubling grid {2^i * eta_min, capped at
    eta_max} achieves P/eta + eta*V <= 3*sqrt(P*V) + P/eta_max + eta_min*V.

    Property-test hook for the grid geometry; the constant 3 is exact, the
    only slack is float rounding.
    """
    if P < 0 or V < 0:
        raise ValueError("P and V must be nonnegative")
    if not (0 < eta_min <= eta_max):
        raise ValueError(f"need 0 < eta_min <= eta_max, got {eta_min}, {eta_max}")
    best = min(P / eta + eta * V for eta in _doubling_grid(eta_min, eta_max))
    rhs = 3.0 * math.sqrt(P * V) + P / eta_max + eta_min * V
    return best <= rhs * (1.0 + 1e-12) + 1e-12
