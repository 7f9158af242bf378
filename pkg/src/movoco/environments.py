"""Synthetic streams, schedule generators, and the numeric update oracle.

Everything here is deterministic given a seed (numpy PCG64; the algorithm
identifier is recorded in experiment metadata for reproducibility).  Tracking
losses G*||w - c_t|| are the canonical dynamic-regret environment: the
comparator u_t = c_t achieves zero loss, so regret curves are interpretable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cmd import CmdParams, objective_value, psi_gradient, solve_update
from .core import Feedback, norm, validate_horizon, zeros
from .delays import DelaySchedule
from .memory import MemorySchedule, UnaryOracle

GENERATOR_ALGORITHM = "numpy-PCG64"


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# loss streams


@dataclass
class LinearStream:
    """f_t(w) = <g_t, w> with ||g_t|| <= G; the gradient ignores w."""

    kind: str
    G: float
    gradients: np.ndarray  # shape (T, dim)

    @property
    def horizon(self) -> int:
        return self.gradients.shape[0]

    @property
    def dim(self) -> int:
        return self.gradients.shape[1]

    def loss(self, t: int, w: np.ndarray) -> float:
        return float(np.dot(self.gradients[t - 1], w))

    def grad(self, t: int, w: np.ndarray) -> np.ndarray:
        return self.gradients[t - 1].copy()


@dataclass
class TrackingStream:
    """f_t(w) = G * ||w - c_t||; subgradient G*(w-c_t)/||w-c_t||, zero at the
    kink.  G-Lipschitz by construction."""

    G: float
    centers: np.ndarray  # shape (T, dim)
    kind: str = "tracking"

    @property
    def horizon(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def loss(self, t: int, w: np.ndarray) -> float:
        return self.G * norm(w - self.centers[t - 1])

    def grad(self, t: int, w: np.ndarray) -> np.ndarray:
        diff = w - self.centers[t - 1]
        r = norm(diff)
        if r == 0.0:
            return np.zeros_like(diff)
        return self.G * diff / r


@dataclass
class MemoryTrackingStream:
    """Memory loss f_t(x_0..x_b) = (G/(b+1)) * sum_i ||x_i - z_t||, which is
    coordinate-wise G-Lipschitz and convex in memory.  The unary surrogate is
    G * ||w - z_t|| with gradient bound H = G."""

    G: float
    centers: np.ndarray  # shape (T, dim)
    schedule: MemorySchedule
    kind: str = "memory_tracking"

    @property
    def horizon(self) -> int:
        return self.centers.shape[0]

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def memory_loss(self, t: int, window: list[np.ndarray]) -> float:
        b_t = self.schedule.lengths[t - 1]
        if len(window) != b_t + 1:
            raise ValueError(f"round {t}: window must hold {b_t + 1} decisions")
        z = self.centers[t - 1]
        return self.G / (b_t + 1) * sum(norm(x - z) for x in window)

    def unary_loss(self, t: int, w: np.ndarray) -> float:
        return self.G * norm(w - self.centers[t - 1])

    def unary_grad(self, t: int, w: np.ndarray) -> np.ndarray:
        diff = w - self.centers[t - 1]
        r = norm(diff)
        if r == 0.0:
            return np.zeros_like(diff)
        return self.G * diff / r

    def unary_oracle(self) -> UnaryOracle:
        return UnaryOracle(unary_grad=self.unary_grad, H=self.G, memory_loss=self.memory_loss)


# ---------------------------------------------------------------------------
# comparator / lambda streams


@dataclass
class ComparatorStream:
    """Comparator sequence u_1..u_T with realized statistics recomputed from
    the values (never trusted from config): M = max ||u_t|| and the path
    length P_T with u_0 = 0."""

    kind: str
    values: np.ndarray  # shape (T, dim)
    M: float = field(init=False)
    P_T: float = field(init=False)

    def __post_init__(self):
        u = self.values
        self.M = float(np.max(np.linalg.norm(u, axis=1))) if u.size else 0.0
        prev = np.vstack([np.zeros((1, u.shape[1])), u[:-1]])
        self.P_T = float(np.linalg.norm(u - prev, axis=1).sum())

    @property
    def horizon(self) -> int:
        return self.values.shape[0]

    def u(self, t: int) -> np.ndarray:
        return self.values[t - 1].copy()


@dataclass
class LambdaStream:
    """Coefficients lambda_1..lambda_{T+1}; the boundary zeros lambda_1 =
    lambda_{T+1} = 0 are enforced at construction."""

    kind: str
    values: np.ndarray  # length T+1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if np.any(v < 0):
            raise ValueError("lambda values must be nonnegative")
        if v[0] != 0.0 or v[-1] != 0.0:
            raise ValueError("boundary convention lambda_1 = lambda_{T+1} = 0 violated")
        self.values = v

    @property
    def horizon(self) -> int:
        return len(self.values) - 1

    @property
    def lambda_max(self) -> float:
        return float(self.values.max())

    def lam(self, t: int) -> float:
        """lambda_t for t in 1..T+1."""
        return float(self.values[t - 1])


# ---------------------------------------------------------------------------
# generators


def make_linear_stream(kind: str, G: float, dim: int, T: int, seed: int) -> LinearStream:
    T = validate_horizon(T)
    if not G > 0:
        raise ValueError(f"G must be > 0, got {G}")
    rng = _rng(seed)
    if kind == "gaussian":
        raw = rng.standard_normal((T, dim))
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        scale = rng.uniform(0.1, 1.0, size=(T, 1))
        grads = raw / np.maximum(norms, 1e-30) * (G * scale)
    elif kind == "rademacher":
        signs = rng.choice([-1.0, 1.0], size=(T, 1))
        direction = np.zeros((T, dim))
        direction[:, 0] = 1.0
        grads = G * signs * direction
    else:
        raise ValueError(f"unknown linear stream kind {kind!r}")
    return LinearStream(kind=f"linear_{kind}", G=G, gradients=grads)


def make_centers(kind: str, dim: int, T: int, seed: int, scale: float = 1.0,
                 switches: int = 5) -> np.ndarray:
    rng = _rng(seed)
    if kind == "fixed":
        c = rng.standard_normal(dim) * scale
        return np.tile(c, (T, 1))
    if kind == "piecewise_constant":
        n_seg = switches + 1
        bounds = np.linspace(0, T, n_seg + 1).astype(int)
        out = np.empty((T, dim))
        for i in range(n_seg):
            out[bounds[i] : bounds[i + 1]] = rng.standard_normal(dim) * scale
        return out
    if kind == "random_walk":
        steps = rng.standard_normal((T, dim)) * (scale / math.sqrt(T))
        return np.cumsum(steps, axis=0)
    raise ValueError(f"unknown center/comparator kind {kind!r}")


def make_tracking_stream(G: float, dim: int, T: int, seed: int,
                         center_kind: str = "piecewise_constant",
                         scale: float = 1.0, switches: int = 5) -> TrackingStream:
    centers = make_centers(center_kind, dim, validate_horizon(T), seed, scale, switches)
    return TrackingStream(G=G, centers=centers)


def make_comparators(kind: str, dim: int, T: int, seed: int, scale: float = 1.0,
                     switches: int = 5, values: np.ndarray | None = None) -> ComparatorStream:
    if values is not None:
        return ComparatorStream(kind=kind, values=np.asarray(values, dtype=np.float64))
    return ComparatorStream(kind=kind, values=make_centers(kind, dim, T, seed, scale, switches))


def make_lambdas(kind: str, T: int, seed: int, level: float = 1.0) -> LambdaStream:
    T = validate_horizon(T)
    v = np.zeros(T + 1)
    rng = _rng(seed)
    if kind == "zero":
        pass
    elif kind == "constant":
        v[1:T] = level
    elif kind == "uniform_random":
        v[1:T] = rng.uniform(0.0, level, size=max(T - 1, 0))
    elif kind == "bursty":
        # occasional bursts of high cost over a quiet baseline
        v[1:T] = rng.uniform(0.0, 0.1 * level, size=max(T - 1, 0))
        n_bursts = max(1, T // 50)
        if T > 2:
            idx = rng.integers(1, T - 1, size=n_bursts)
            v[idx] = rng.uniform(0.5 * level, level, size=n_bursts)
    else:
        raise ValueError(f"unknown lambda kind {kind!r}")
    return LambdaStream(kind=kind, values=v)


def make_delay_schedule(kind: str, T: int, seed: int, d: int = 0, d_max: int = 0) -> DelaySchedule:
    T = validate_horizon(T)
    rng = _rng(seed)
    if kind == "constant":
        delays = [min(d, T - t) for t in range(1, T + 1)]
    elif kind == "uniform_random":
        delays = [int(rng.integers(0, min(d_max, T - t) + 1)) for t in range(1, T + 1)]
    elif kind == "bursty":
        delays = []
        for t in range(1, T + 1):
            hi = min(d_max, T - t)
            delays.append(int(rng.integers(0, hi + 1)) if rng.uniform() < 0.2 else 0)
    elif kind == "all_at_end":
        delays = [T - t for t in range(1, T + 1)]
    else:
        raise ValueError(f"unknown delay kind {kind!r}")
    return DelaySchedule(delays=tuple(delays), horizon=T)


def make_memory_schedule(kind: str, T: int, seed: int, B: int = 0,
                         period: tuple[int, ...] | None = None) -> MemorySchedule:
    T = validate_horizon(T)
    rng = _rng(seed)
    if kind == "constant":
        lengths = [min(B, t - 1) for t in range(1, T + 1)]
    elif kind == "periodic":
        pattern = tuple(period) if period else tuple(range(B + 1))
        lengths = [min(pattern[(t - 1) % len(pattern)], t - 1) for t in range(1, T + 1)]
    elif kind == "random":
        lengths = [int(rng.integers(0, min(t - 1, B) + 1)) for t in range(1, T + 1)]
    else:
        raise ValueError(f"unknown memory kind {kind!r}")
    return MemorySchedule(lengths=tuple(lengths), horizon=T)


# ---------------------------------------------------------------------------
# numeric update oracle


class OracleDisagreement(RuntimeError):
    """The perturbation certificate found a better point than the candidate."""


def _golden_section(f, lo: float, hi: float, tol: float) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def cmd_update_oracle(w_old: np.ndarray, fb: Feedback, params: CmdParams,
                      tol: float = 1e-9, certificate_samples: int = 1000,
                      seed: int = 0) -> np.ndarray:
    """Numeric minimizer of the composite objective, independent of the
    closed-form solve.

    A dense golden-section search over the radius along theta locates the
    candidate; a perturbation certificate (Gaussian probes at two scales,
    which does NOT assume the minimizer is along theta) then verifies no
    probe improves the objective by more than ``tol``.
    """
    theta = psi_gradient(w_old, params) - fb.gradient
    theta_norm = norm(theta)

    def obj(w: np.ndarray) -> float:
        return objective_value(w, w_old, fb, params)

    if theta_norm == 0.0:
        candidate = np.zeros_like(w_old)
    else:
        direction = theta / theta_norm
        r_closed = norm(solve_update(w_old, fb, params))
        r_hi = 4.0 * r_closed + params.alpha
        r_star = _golden_section(lambda r: obj(r * direction), 0.0, r_hi, 1e-10)
        candidate = r_star * direction
        if obj(np.zeros_like(w_old)) < obj(candidate):
            candidate = np.zeros_like(w_old)

    f_star = obj(candidate)
    rng = _rng(seed)
    beta = norm(fb.gradient) + fb.next_lambda
    c = params.eta * beta * beta + params.gamma
    a = params.alpha

    def obj_batch(W: np.ndarray) -> np.ndarray:
        # vectorized copy of cmd.objective_value over rows of W
        r = np.linalg.norm(W, axis=1)
        psi = (2.0 / params.eta) * ((r + a) * np.log1p(r / a) - r)
        psi_old = (2.0 / params.eta) * (
            (norm(w_old) + a) * math.log1p(norm(w_old) / a) - norm(w_old)
        )
        grad_old = psi_gradient(w_old, params)
        return (
            W @ fb.gradient
            + psi - psi_old - (W - w_old) @ grad_old
            + c * r
        )

    for scale in (1e-3, 1e-6):
        sigma = scale * (1.0 + norm(candidate))
        probes = candidate + rng.standard_normal(
            (certificate_samples // 2, w_old.shape[0])
        ) * sigma
        if np.any(obj_batch(probes) < f_star - tol):
            raise OracleDisagreement(
                f"perturbation at scale {scale} improved the objective beyond tol={tol}"
            )
    return candidate
