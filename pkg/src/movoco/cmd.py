"""Composite mirror descent base learner for movement costs.

The learner keeps a single iterate ``w`` and, on receiving a gradient and the
next movement coefficient, replaces it with the exact minimizer of

    <g, w> + D_psi(w | w_old) + (eta * beta^2 + gamma) * ||w||,

where ``psi`` is the linearithmic regularizer

    psi(w) = (2 / eta) * integral_0^{||w||} log(x / alpha + 1) dx

and ``beta = ||g|| + next_lambda``.  Because psi and the penalty are both
radial, the minimizer lies along theta = grad_psi(w_old) - g and the
one-dimensional stationarity condition solves in closed form:

    r = alpha * (exp(eta * (||theta|| - c) / 2) - 1),  c = eta * beta^2 + gamma,

with r clamped to 0 whenever ||theta|| <= c.  The numeric search oracle in
``movoco.environments`` exists to cross-check exactly this solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Feedback, as_vector, check_same_dim, norm, validate_horizon, zeros

# exp argument above this indicates eta far outside the 1/(G + lambda_max)
# regime the analysis needs; fail loudly instead of returning inf
_EXP_GUARD = 700.0


class StepOverflowError(FloatingPointError):
    """The closed-form radius would overflow float64; eta is mis-tuned."""


@dataclass(frozen=True)
class CmdParams:
    """Parameters of one base-learner instance.

    ``gamma`` and ``alpha`` are derived, never passed: gamma = 1/(eta*T) and
    alpha = epsilon0/T.  The horizon must be known up front since both depend
    on it.
    """

    epsilon0: float
    eta: float
    horizon: int

    def __post_init__(self):
        if not (self.epsilon0 > 0 and math.isfinite(self.epsilon0)):
            raise ValueError(f"epsilon0 must be > 0, got {self.epsilon0}")
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be > 0, got {self.eta}")
        object.__setattr__(self, "horizon", validate_horizon(self.horizon))

    @property
    def gamma(self) -> float:
        return 1.0 / (self.eta * self.horizon)

    @property
    def alpha(self) -> float:
        return self.epsilon0 / self.horizon


def psi_value(w: np.ndarray, params: CmdParams) -> float:
    """Value of the regularizer, via the closed antiderivative

    (2/eta) * ((R + alpha) * log(R/alpha + 1) - R)  with  R = ||w||.
    """
    r = norm(w)
    a = params.alpha
    return (2.0 / params.eta) * ((r + a) * math.log1p(r / a) - r)


def psi_gradient(w: np.ndarray, params: CmdParams) -> np.ndarray:
    """Gradient (2/eta) * log(||w||/alpha + 1) * w/||w||; zero at the origin
    (the continuous limit)."""
    r = norm(w)
    if r == 0.0:
        return np.zeros_like(w)
    return (2.0 / params.eta) * math.log1p(r / params.alpha) * (w / r)


def objective_value(w: np.ndarray, w_old: np.ndarray, fb: Feedback, params: CmdParams) -> float:
    """Raw composite objective at ``w``: linear term + Bregman divergence from
    ``w_old`` + movement-aware norm penalty.  Exposed for oracle testing."""
    check_same_dim(w, w_old)
    check_same_dim(w, fb.gradient)
    beta = norm(fb.gradient) + fb.next_lambda
    c = params.eta * beta * beta + params.gamma
    bregman = (
        psi_value(w, params)
        - psi_value(w_old, params)
        - float(np.dot(psi_gradient(w_old, params), w - w_old))
    )
    return float(np.dot(fb.gradient, w)) + bregman + c * norm(w)


def solve_update(w_old: np.ndarray, fb: Feedback, params: CmdParams) -> np.ndarray:
    """Closed-form minimizer of the composite objective."""
    check_same_dim(w_old, fb.gradient)
    theta = psi_gradient(w_old, params) - fb.gradient
    theta_norm = norm(theta)
    beta = norm(fb.gradient) + fb.next_lambda
    c = params.eta * beta * beta + params.gamma
    if theta_norm <= c:
        return np.zeros_like(w_old)
    arg = params.eta * (theta_norm - c) / 2.0
    if arg > _EXP_GUARD:
        raise StepOverflowError(
            f"update radius exponent {arg:.3g} exceeds the overflow guard; "
            f"eta={params.eta:.3g} is outside the supported regime "
            f"(need eta <= 1/(G + lambda_max))"
        )
    r = params.alpha * math.expm1(arg)
    return r * (theta / theta_norm)


class CmdLearner:
    """Stateful wrapper around :func:`solve_update`.

    ``predict`` returns the current iterate; ``update`` consumes one round's
    feedback and must be called exactly once per round.
    """

    def __init__(self, params: CmdParams, dim: int):
        self.params = params
        self.w = zeros(dim)
        self.round = 1

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def predict(self) -> np.ndarray:
        return self.w.copy()

    def update(self, fb: Feedback) -> None:
        as_vector(fb.gradient, dim=self.dim)
        self.w = solve_update(self.w, fb, self.params)
        self.round += 1

    def objective_value(self, w, fb: Feedback) -> float:
        return objective_value(as_vector(w, dim=self.dim), self.w, fb, self.params)
