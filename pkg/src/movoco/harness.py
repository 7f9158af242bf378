"""Regret accounting and bound-formula evaluation.

Two regret notions are tracked per round: the asymmetric one, where only the
learner pays movement costs, and the symmetric one, where the comparator pays
them too.  They differ exactly by the comparator's movement bill, and the
trace maintains that identity at every prefix.

The explicit-constant bound of the base learner is a hard inequality the
harness certifies.  The big-O theorem bounds are evaluated as shapes (formula
with the unknown constant stripped) and checked only through ratio stability
across horizons.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cmd import CmdParams
from .core import norm, zeros


@dataclass
class TraceRow:
    t: int
    lambda_t: float
    loss: float
    move_cost: float
    comp_loss: float
    comp_move: float
    regret_asym: float
    regret_sym: float
    w_norm: float
    epoch_index: int
    current_L: float


class RegretTrace:
    """Per-round regret ledger.

    ``account`` must be called with consecutive round indices starting at 1;
    w_0 = u_0 = 0 conventions are applied internally.
    """

    COLUMNS = [
        "t", "lambda_t", "loss", "move_cost", "comp_loss", "comp_move",
        "regret_asym", "regret_sym", "w_norm", "epoch_index", "current_L",
    ]

    def __init__(self, dim: int):
        self.rows: list[TraceRow] = []
        self._prev_w = zeros(dim)
        self._prev_u = zeros(dim)
        self._regret_asym = 0.0
        self._regret_sym = 0.0

    def account(self, t: int, lam: float, loss: float, w: np.ndarray,
                comp_loss: float, u: np.ndarray, epoch_index: int = 0,
                current_L: float = 0.0) -> TraceRow:
        if t != len(self.rows) + 1:
            raise ValueError(f"out-of-order round: expected {len(self.rows) + 1}, got {t}")
        move_cost = lam * norm(w - self._prev_w)
        comp_move = lam * norm(u - self._prev_u)
        self._regret_asym += loss + move_cost - comp_loss
        self._regret_sym += loss + move_cost - comp_loss - comp_move
        row = TraceRow(
            t=t, lambda_t=lam, loss=loss, move_cost=move_cost,
            comp_loss=comp_loss, comp_move=comp_move,
            regret_asym=self._regret_asym, regret_sym=self._regret_sym,
            w_norm=norm(w), epoch_index=epoch_index, current_L=current_L,
        )
        self.rows.append(row)
        self._prev_w = w.copy()
        self._prev_u = u.copy()
        return row

    @property
    def regret_asym(self) -> float:
        return self._regret_asym

    @property
    def regret_sym(self) -> float:
        return self._regret_sym

    @property
    def total_move_cost(self) -> float:
        return sum(r.move_cost for r in self.rows)

    def identity_gap(self) -> float:
        """Max over prefixes of |R_t - (sym_t + comparator movement bill)|."""
        gap = 0.0
        comp_bill = 0.0
        for r in self.rows:
            comp_bill += r.comp_move
            gap = max(gap, abs(r.regret_asym - (r.regret_sym + comp_bill)))
        return gap


# ---------------------------------------------------------------------------
# explicit-constant bound of the base learner


@dataclass(frozen=True)
class Prop1Report:
    value: float
    certified: bool  # False when the eta <= 1/(G + lambda_max) precondition fails


def prop1_bound(u_seq: np.ndarray, g_seq: np.ndarray, lam_seq: np.ndarray,
                params: CmdParams, G: float, lambda_max: float) -> Prop1Report:
    """Fully explicit regret bound of a single base-learner run:

        (2||u_T|| log(||u_T|| T / eps0 + 1)
         + 2 sum_{t>=2} ||du_t|| log(2 ||du_t|| T^2 / eps0 + 1)) / eta
        + 2 eta sum_t (||g_t||^2 + lambda_{t+1}^2) ||u_t||
        + (1/(eta T)) sum_t ||u_t||
        + eps0 (G + lambda_max)

    ``lam_seq`` holds lambda_1..lambda_T; lambda_{T+1} = 0 by convention.
    Returns certified=False (value NaN) when eta > 1/(G + lambda_max).
    """
    T = params.horizon
    u = np.asarray(u_seq, dtype=np.float64).reshape(T, -1)
    g = np.asarray(g_seq, dtype=np.float64).reshape(T, -1)
    lam = np.asarray(lam_seq, dtype=np.float64).reshape(T)
    if params.eta > 1.0 / (G + lambda_max) * (1.0 + 1e-12):
        return Prop1Report(value=math.nan, certified=False)
    eps0, eta = params.epsilon0, params.eta

    u_T = float(np.linalg.norm(u[-1]))
    term_uT = 2.0 * u_T * math.log1p(u_T * T / eps0)
    du = np.linalg.norm(np.diff(u, axis=0), axis=1)  # ||u_t - u_{t-1}||, t = 2..T
    term_path = 2.0 * float(np.sum(du * np.log1p(2.0 * du * T * T / eps0)))

    lam_next = np.append(lam[1:], 0.0)  # lambda_{t+1} for t = 1..T
    g_norm = np.linalg.norm(g, axis=1)
    u_norm = np.linalg.norm(u, axis=1)
    term_second = 2.0 * eta * float(np.sum((g_norm**2 + lam_next**2) * u_norm))
    term_gamma = float(np.sum(u_norm)) / (eta * T)

    value = (term_uT + term_path) / eta + term_second + term_gamma + eps0 * (G + lambda_max)
    return Prop1Report(value=value, certified=True)


# ---------------------------------------------------------------------------
# big-O bound shapes


@dataclass
class BoundReport:
    M: float
    P_T: float
    M_tilde: float
    P_tilde_thm1: float
    P_tilde_thm2: float
    thm1_shape: float
    thm2_shape: float
    ratio_thm1: float
    ratio_thm2: float
    delay_shape: float | None = None
    memory_shape: float | None = None


def bound_shapes(u_seq: np.ndarray, g_seq: np.ndarray, lam_seq: np.ndarray,
                 regret: float, L: float, epsilon: float = 1.0,
                 d_tot: int | None = None, G: float | None = None,
                 H: float | None = None,
                 memory_lengths: tuple[int, ...] | None = None) -> BoundReport:
    """Evaluate every theorem bound formula with the O-constant stripped and
    report regret/shape ratios.

    The gradient-aggregation shape uses sum (||g||^2 + lambda_{t+1}^2)||u_t||;
    the batched shape replaces lambda_{t+1}^2 with lambda_t ||g_t||.
    """
    u = np.asarray(u_seq, dtype=np.float64)
    g = np.asarray(g_seq, dtype=np.float64)
    T = u.shape[0]
    lam = np.asarray(lam_seq, dtype=np.float64).reshape(T)
    u_norm = np.linalg.norm(u, axis=1)
    g_norm = np.linalg.norm(g, axis=1)
    M = float(u_norm.max()) if T else 0.0
    du = np.linalg.norm(np.diff(u, axis=0), axis=1)
    P_T = float(np.linalg.norm(u[0]) + du.sum()) if T else 0.0

    M_tilde = M * (math.log1p(M * T / epsilon) + 1.0) if M > 0 else 0.0
    P1 = float(np.sum(du * np.log1p(du * T * T / epsilon)))
    P2 = P_T * (math.log1p(2.0 * M * T * T / epsilon) + 1.0)

    lam_next = np.append(lam[1:], 0.0)
    V1 = float(np.sum((g_norm**2 + lam_next**2) * u_norm))
    V2 = float(np.sum((g_norm**2 + lam * g_norm) * u_norm))

    log_T = math.log(T + 1)
    thm1 = (epsilon * log_T + M_tilde + P1) * L + math.sqrt(max((M_tilde + P1) * V1, 0.0))
    thm2 = (epsilon * log_T + M_tilde + P2) * L + math.sqrt(max((M_tilde + P2) * V2, 0.0))

    report = BoundReport(
        M=M, P_T=P_T, M_tilde=M_tilde, P_tilde_thm1=P1, P_tilde_thm2=P2,
        thm1_shape=thm1, thm2_shape=thm2,
        ratio_thm1=regret / thm1 if thm1 > 0 else math.nan,
        ratio_thm2=regret / thm2 if thm2 > 0 else math.nan,
    )
    if d_tot is not None and G is not None:
        report.delay_shape = (
            (epsilon * log_T + M_tilde + P2) * L
            + G * math.sqrt(max(M * (M_tilde + P2) * (T + d_tot), 0.0))
        )
    if H is not None and G is not None and memory_lengths is not None:
        sum_b2 = sum(b * b for b in memory_lengths)
        report.memory_shape = (
            (epsilon * log_T + M_tilde + P2) * L
            + math.sqrt(max(M * (M_tilde + P2) * (H * H * T + G * H * sum_b2), 0.0))
        )
    return report


def growth_slope(points: list[tuple[int, float]]) -> float:
    """Least-squares slope of log(regret) against log(T).

    Nonpositive regrets are dropped with a warning; at least 3 usable points
    are required.
    """
    usable = [(T, R) for T, R in points if R > 0]
    if len(usable) < len(points):
        warnings.warn("dropping nonpositive regret points from growth fit")
    if len(usable) < 3:
        raise ValueError("need at least 3 horizons with positive regret")
    x = np.log([float(T) for T, _ in usable])
    y = np.log([R for _, R in usable])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
