"""Shared numeric primitives and the per-round feedback contract.

Decisions, gradients and comparators are dense float64 vectors.  All inputs
crossing a module boundary go through :func:`as_vector`, which enforces
finiteness and one-dimensionality, so downstream code can rely on clean
arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DimensionMismatchError(ValueError):
    """Binary vector operation received vectors of different lengths."""


class NonFiniteValueError(ValueError):
    """A vector or scalar contained NaN or infinity."""


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite float64 1-D array, copying the input.

    Raises ``NonFiniteValueError`` on NaN/inf entries and
    ``DimensionMismatchError`` if ``dim`` is given and does not match.
    """
    v = np.array(x, dtype=np.float64, copy=True)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteValueError("vector contains NaN or infinite entries")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.shape[0]}")
    return v


def check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def dot(a: np.ndarray, b: np.ndarray) -> float:
    check_same_dim(a, b)
    return float(np.dot(a, b))


def zeros(dim: int) -> np.ndarray:
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return np.zeros(dim, dtype=np.float64)


def validate_horizon(T: int) -> int:
    if not isinstance(T, (int, np.integer)) or T < 1:
        raise ValueError(f"horizon must be a positive integer, got {T!r}")
    return int(T)


@dataclass(frozen=True)
class Feedback:
    """One round's information: the gradient g_t and the coefficient
    lambda_{t+1} scaling the next movement penalty.

    The coefficient for the round after the final one is zero by convention;
    callers driving a full game are responsible for delivering 0 at the last
    round.
    """

    gradient: np.ndarray
    next_lambda: float

    def __post_init__(self):
        g = as_vector(self.gradient)
        object.__setattr__(self, "gradient", g)
        lam = float(self.next_lambda)
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"next_lambda must be finite and >= 0, got {lam}")
        object.__setattr__(self, "next_lambda", lam)

    @property
    def dim(self) -> int:
        return self.gradient.shape[0]
