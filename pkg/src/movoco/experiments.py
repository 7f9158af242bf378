"""Experiment orchestration: config -> streams -> learner -> regret trace.

This module does the wiring the CLI exposes.  Every run is deterministic
given the config seed; child streams use fixed seed offsets so the same seed
reproduces the same experiment bit for bit.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
import warnings

import numpy as np

from .batching import BatchedLearner, LipschitzAdaptiveLearner, epoch_decomposition_check, epoch_prefix_check
from .cmd import CmdLearner, CmdParams
from .core import Feedback, zeros
from .delays import (DelayReduction, build_ledger, delay_aux_check, ledger_identity_check)
from .environments import (GENERATOR_ALGORITHM, MemoryTrackingStream, cmd_update_oracle,
                           make_centers, make_comparators, make_delay_schedule, make_lambdas,
                           make_linear_stream, make_memory_schedule, make_tracking_stream)
from .grid import GridLearner, GridParams, grid_tuning_check
from .harness import RegretTrace, bound_shapes
from .memory import MemoryReduction, MemorySchedule, xi_bounds_check, xi_naive, xi_profile

ARTIFACT_VERSION = "0.1.0"

# seed offsets for the independent random streams of one experiment
_SEED_ENV, _SEED_COMP, _SEED_LAMBDA, _SEED_DELAY, _SEED_MEMORY = 0, 1, 2, 3, 4

ALGORITHMS = ("cmd", "grid", "batched", "batched_doubling", "delay", "memory")


class ConfigError(ValueError):
    """The experiment config is missing or inconsistent."""


def config_hash(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def _require(config: dict, key: str):
    if key not in config:
        raise ConfigError(f"config is missing required field {key!r}")
    return config[key]


def _build_environment(config: dict, T: int, dim: int, seed: int):
    env = _require(config, "environment")
    kind = _require(env, "kind")
    G = float(env.get("G", 1.0))
    if kind == "linear_gaussian":
        return make_linear_stream("gaussian", G, dim, T, seed + _SEED_ENV), None
    if kind == "linear_rademacher":
        return make_linear_stream("rademacher", G, dim, T, seed + _SEED_ENV), None
    if kind == "tracking":
        return make_tracking_stream(
            G, dim, T, seed + _SEED_ENV,
            center_kind=env.get("center_kind", "piecewise_constant"),
            scale=float(env.get("scale", 1.0)),
            switches=int(env.get("switches", 5)),
        ), None
    if kind == "memory_tracking":
        mem = config.get("memory", {"kind": "constant", "B": 0})
        schedule = make_memory_schedule(
            mem.get("kind", "constant"), T, seed + _SEED_MEMORY,
            B=int(mem.get("B", 0)),
            period=tuple(mem["period"]) if "period" in mem else None,
        )
        centers = make_centers(
            env.get("center_kind", "piecewise_constant"), dim, T, seed + _SEED_ENV,
            scale=float(env.get("scale", 1.0)), switches=int(env.get("switches", 5)),
        )
        return MemoryTrackingStream(G=G, centers=centers, schedule=schedule), schedule
    raise ConfigError(f"unknown environment kind {kind!r}")


def _build_comparators(config: dict, stream, T: int, dim: int, seed: int):
    spec = config.get("comparator", {"kind": "fixed"})
    kind = spec.get("kind", "fixed")
    if kind == "centers":
        return make_comparators("centers", dim, T, 0, values=stream.centers)
    if kind == "fixed_value":
        value = np.asarray(spec["value"], dtype=np.float64).reshape(1, -1)
        return make_comparators("fixed_value", dim, T, 0, values=np.tile(value, (T, 1)))
    return make_comparators(
        kind, dim, T, seed + _SEED_COMP,
        scale=float(spec.get("scale", 1.0)), switches=int(spec.get("switches", 5)),
    )


def run_experiment(config: dict) -> tuple[RegretTrace, dict]:
    t0 = time.perf_counter()
    T = int(_require(config, "T"))
    dim = int(_require(config, "dim"))
    seed = int(_require(config, "seed"))
    algorithm = _require(config, "algorithm")
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    learner_cfg = config.get("learner", {})

    stream, mem_schedule = _build_environment(config, T, dim, seed)
    comparators = _build_comparators(config, stream, T, dim, seed)
    lam_spec = config.get("lambda", {"kind": "zero"})
    lambdas = make_lambdas(
        lam_spec.get("kind", "zero"), T, seed + _SEED_LAMBDA,
        level=float(lam_spec.get("level", 1.0)),
    )

    trace = RegretTrace(dim)
    g_log = np.zeros((T, dim))
    lam_log = lambdas.values[:T].copy()  # lambda_1..lambda_T
    extra: dict = {}

    if algorithm == "cmd":
        params = CmdParams(
            epsilon0=float(learner_cfg.get("epsilon0", 1.0)),
            eta=float(_require(learner_cfg, "eta")),
            horizon=T,
        )
        learner = CmdLearner(params, dim)
        for t in range(1, T + 1):
            w = learner.predict()
            u = comparators.u(t)
            g = stream.grad(t, w)
            g_log[t - 1] = g
            learner.update(Feedback(g, lambdas.lam(t + 1)))
            trace.account(t, lambdas.lam(t), stream.loss(t, w), w,
                          stream.loss(t, u), u, epoch_index=t)
        extra["cmd_params"] = {"eta": params.eta, "epsilon0": params.epsilon0}
        L_report = 0.0

    elif algorithm in ("grid", "batched", "batched_doubling"):
        epsilon = float(learner_cfg.get("epsilon", 1.0))
        if algorithm == "batched_doubling":
            learner = LipschitzAdaptiveLearner.for_batched(
                float(learner_cfg.get("G_guess", stream.G)), epsilon, T, dim)
        else:
            L = float(_require(learner_cfg, "L"))
            gp = GridParams(L=L, epsilon=epsilon, horizon=T)
            learner = GridLearner(gp, dim) if algorithm == "grid" else BatchedLearner(gp, dim)
        for t in range(1, T + 1):
            w = learner.predict()
            u = comparators.u(t)
            g = stream.grad(t, w)
            g_log[t - 1] = g
            fb = Feedback(g, lambdas.lam(t + 1))
            if algorithm == "grid":
                learner.update(fb)
                epoch, cur_L = t, learner.params.L
            else:
                learner.observe(fb)
                inner = learner.inner if algorithm == "batched_doubling" else learner
                epoch, cur_L = inner.epoch_index, learner.current_L
            trace.account(t, lambdas.lam(t), stream.loss(t, w), w,
                          stream.loss(t, u), u, epoch_index=epoch, current_L=cur_L)
        if algorithm != "grid":
            inner = learner.inner if algorithm == "batched_doubling" else learner
            extra["epoch_count"] = sum(1 for r in inner.epoch_log if r.closed)
        L_report = learner.params.L if algorithm == "grid" else learner.current_L
        if algorithm == "batched_doubling":
            extra["restart_count"] = learner.restart_count
        if algorithm == "batched":
            needed = stream.G + 2.0 * lambdas.lambda_max
            if learner.params.L < needed:
                warnings.warn(
                    f"L = {learner.params.L:.3g} is below the realized "
                    f"G + 2*lambda_max = {needed:.3g}; guarantees do not apply")

    elif algorithm == "delay":
        G = float(learner_cfg.get("G", stream.G))
        delay_spec = config.get("delay", {"kind": "constant", "d": 0})
        schedule = make_delay_schedule(
            delay_spec.get("kind", "constant"), T, seed + _SEED_DELAY,
            d=int(delay_spec.get("d", 0)), d_max=int(delay_spec.get("d_max", 0)))
        ledger = build_ledger(schedule)
        epsilon = float(learner_cfg.get("epsilon", 1.0))
        use_external = lam_spec.get("kind", "zero") != "zero"
        if learner_cfg.get("doubling", False):
            inner = LipschitzAdaptiveLearner.for_batched(
                float(learner_cfg.get("G_guess", G)), epsilon, T, dim)
        else:
            L = float(learner_cfg.get("L", ledger.required_L(G)
                                      + (2.0 * lambdas.lambda_max if use_external else 0.0)))
            inner = BatchedLearner(GridParams(L=L, epsilon=epsilon, horizon=T), dim)
        reduction = DelayReduction(ledger, inner, G)
        pending: dict[int, np.ndarray] = {}
        for t in range(1, T + 1):
            w = reduction.predict()
            u = comparators.u(t)
            g = stream.grad(t, w)
            g_log[t - 1] = g
            pending[t] = g
            arrived = [pending.pop(tau) for tau in ledger.buckets[t]]
            reduction.step(t, arrived, lambdas.lam(t + 1) if use_external else 0.0)
            lam_t = lambdas.lam(t) if use_external else 0.0
            batched = inner.inner if isinstance(inner, LipschitzAdaptiveLearner) else inner
            trace.account(t, lam_t, stream.loss(t, w), w, stream.loss(t, u), u,
                          epoch_index=batched.epoch_index, current_L=inner.current_L)
        lam_log = np.array([G * ledger.missing[t] for t in range(1, T + 1)], dtype=np.float64)
        if use_external:
            lam_log += lambdas.values[:T]
        extra.update(sigma_max=ledger.sigma_max, d_tot=ledger.d_tot,
                     required_L=ledger.required_L(G))
        L_report = inner.current_L

    elif algorithm == "memory":
        schedule = mem_schedule
        if schedule is None:
            raise ConfigError("algorithm 'memory' requires a memory_tracking environment")
        G = stream.G
        oracle = stream.unary_oracle()
        epsilon = float(learner_cfg.get("epsilon", 1.0))
        required_L = oracle.H + 2.0 * G * schedule.B**2
        L = float(learner_cfg.get("L", required_L))
        inner = BatchedLearner(GridParams(L=L, epsilon=epsilon, horizon=T), dim)
        reduction = MemoryReduction(schedule, oracle, inner, G)
        u_hist: list[np.ndarray] = []
        for t in range(1, T + 1):
            w = reduction.step(t)
            u = comparators.u(t)
            u_hist.append(u)
            b_t = schedule.lengths[t - 1]
            g_log[t - 1] = oracle.unary_grad(t, w)
            loss = stream.memory_loss(t, reduction.window(t))
            comp_loss = stream.memory_loss(t, u_hist[t - b_t - 1 : t])
            trace.account(t, 0.0, loss, w, comp_loss, u,
                          epoch_index=inner.epoch_index, current_L=L)
        lam_log = G * xi_profile(schedule).astype(np.float64)
        extra.update(B=schedule.B, sum_b_sq=sum(b * b for b in schedule.lengths),
                     required_L=required_L)
        L_report = L

    epsilon_report = float(config.get("epsilon_report", 1.0))
    report = bound_shapes(
        comparators.values, g_log, lam_log, trace.regret_asym,
        L=L_report if L_report > 0 else 1.0, epsilon=epsilon_report,
        d_tot=extra.get("d_tot"), G=getattr(stream, "G", None),
        H=getattr(stream, "G", None) if algorithm == "memory" else None,
        memory_lengths=mem_schedule.lengths if mem_schedule is not None else None,
    )

    summary = {
        "name": config.get("name", "experiment"),
        "config": config,
        "config_hash": config_hash(config),
        "seed": seed,
        "generator_algorithm": GENERATOR_ALGORITHM,
        "artifact_version": ARTIFACT_VERSION,
        "T": T,
        "dim": dim,
        "algorithm": algorithm,
        "realized": {
            "M": comparators.M,
            "P_T": comparators.P_T,
            "lambda_max": float(lam_log.max()) if len(lam_log) else 0.0,
            **{k: v for k, v in extra.items() if not isinstance(v, dict)},
        },
        "regret_asym": trace.regret_asym,
        "regret_sym": trace.regret_sym,
        "total_move_cost": trace.total_move_cost,
        "bound_report": dataclasses.asdict(report),
        "timing_seconds": time.perf_counter() - t0,
    }
    return trace, summary


def sweep_experiment(config: dict, horizons: list[int]) -> dict:
    """Run the config at each horizon (same seed, horizon-dependent schedules
    regenerated) and fit the growth of regret against T."""
    if len(horizons) < 2:
        raise ConfigError("sweep needs at least 2 horizons")
    points = []
    for T in sorted(horizons):
        cfg = dict(config, T=int(T))
        _, summary = run_experiment(cfg)
        points.append({
            "T": int(T),
            "regret_asym": summary["regret_asym"],
            "regret_sym": summary["regret_sym"],
            "ratio_thm2": summary["bound_report"]["ratio_thm2"],
        })
    out = {
        "name": config.get("name", "sweep"),
        "config": config,
        "config_hash": config_hash(config),
        "horizons": sorted(int(T) for T in horizons),
        "points": points,
        "generator_algorithm": GENERATOR_ALGORITHM,
        "artifact_version": ARTIFACT_VERSION,
    }
    positive = [(p["T"], p["regret_asym"]) for p in points if p["regret_asym"] > 0]
    if len(positive) >= 3:
        from .harness import growth_slope
        out["growth_slope"] = growth_slope(positive)
    else:
        out["growth_slope"] = None
        out["growth_slope_flag"] = "need >= 3 horizons with positive regret"
    ratios = [p["ratio_thm2"] for p in points if not math.isnan(p["ratio_thm2"])]
    if len(ratios) >= 2:
        out["ratio_stability"] = ratios[-1] / ratios[0] if ratios[0] > 0 else None
    return out


# ---------------------------------------------------------------------------
# property-check suites (driven by the CLI `check` subcommand and the tests)


def check_oracle(cases: int, seed: int) -> list[str]:
    """Closed-form update vs numeric oracle on random problems."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(cases):
        n = int(rng.choice([1, 3, 10]))
        T = int(rng.choice([10, 100, 1000]))
        eps0 = float(rng.choice([0.1, 1.0]))
        g = rng.standard_normal(n) * rng.uniform(0.1, 2.0)
        lam = float(rng.uniform(0.0, 1.0))
        eta = float(rng.uniform(0.05, 1.0)) / (float(np.linalg.norm(g)) + lam)
        w_old = rng.standard_normal(n) * rng.uniform(0.0, 2.0)
        params = CmdParams(epsilon0=eps0, eta=eta, horizon=T)
        fb = Feedback(g, lam)
        from .cmd import objective_value, solve_update
        w_closed = solve_update(w_old, fb, params)
        try:
            w_oracle = cmd_update_oracle(w_old, fb, params, seed=seed + i)
        except Exception as exc:  # oracle certificate failure
            failures.append(f"case {i}: oracle failed: {exc}")
            continue
        gap = float(np.linalg.norm(w_closed - w_oracle))
        if gap > 1e-6 * (1.0 + float(np.linalg.norm(w_oracle))):
            failures.append(f"case {i}: minimizer gap {gap:.3g}")
        f_c = objective_value(w_closed, w_old, fb, params)
        f_o = objective_value(w_oracle, w_old, fb, params)
        if f_c - f_o > 1e-9 * (1.0 + abs(f_o)):
            failures.append(f"case {i}: objective gap {f_c - f_o:.3g}")
    return failures


def check_lemmas(cases: int, seed: int, T: int = 500, dim: int = 2) -> list[str]:
    """Epoch decomposition (constants 2 and 4) and prefix invariant on random
    batched runs."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(cases):
        G = float(rng.uniform(0.5, 2.0))
        lam_max = float(rng.uniform(0.0, 1.0))
        learner = BatchedLearner(GridParams(L=G + 2 * lam_max + 0.1, epsilon=1.0, horizon=T), dim)
        for t in range(1, T + 1):
            g = rng.uniform(-1.0, 1.0, size=dim)
            g *= G / max(float(np.linalg.norm(g)), 1.0)
            lam = float(rng.uniform(0.0, lam_max)) if t < T else 0.0
            learner.observe(Feedback(g, lam))
        if not epoch_decomposition_check(learner.epoch_log):
            failures.append(f"run {i}: epoch decomposition violated")
        if not epoch_prefix_check(learner.epoch_log):
            failures.append(f"run {i}: epoch prefix invariant violated")
    return failures


def check_ledger(cases: int, seed: int, T_max: int = 2000) -> list[str]:
    """Delay-ledger identities and the <= 2*d_tot lemma on random schedules."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(cases):
        T = int(rng.integers(1, T_max + 1))
        d_max = int(rng.integers(0, max(T // 4, 1) + 1))
        schedule = make_delay_schedule("uniform_random", T, seed + i, d_max=d_max)
        ledger = build_ledger(schedule)
        if not ledger_identity_check(ledger):
            failures.append(f"schedule {i} (T={T}): ledger identities violated")
        if not delay_aux_check(ledger):
            failures.append(f"schedule {i} (T={T}): aux sum exceeds 2*d_tot")
    return failures


def check_xi(cases: int, seed: int, T_max: int = 300) -> list[str]:
    """xi bounds and fast-vs-naive agreement on random memory schedules."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(cases):
        T = int(rng.integers(1, T_max + 1))
        B = int(rng.integers(0, 6))
        schedule = make_memory_schedule("random", T, seed + i, B=B)
        if not xi_bounds_check(schedule):
            failures.append(f"schedule {i} (T={T}): xi bounds violated")
        xi = xi_profile(schedule)
        for t in (1, max(1, T // 2), T):
            if int(xi[t - 1]) != xi_naive(t, schedule):
                failures.append(f"schedule {i} (T={T}): xi fast/naive mismatch at t={t}")
    return failures


def check_grid(cases: int, seed: int) -> list[str]:
    """Grid-tuning inequality with the exact constant 3 on random inputs."""
    rng = np.random.default_rng(seed)
    failures = []
    for i in range(cases):
        P = float(rng.uniform(0.0, 1e3))
        V = float(rng.uniform(0.0, 1e3))
        eta_min = float(rng.uniform(1e-4, 1.0))
        eta_max = eta_min * float(rng.uniform(1.0, 1e4))
        if not grid_tuning_check(P, V, eta_min, eta_max):
            failures.append(
                f"case {i}: P={P:.6g} V={V:.6g} eta_min={eta_min:.6g} eta_max={eta_max:.6g}")
    return failures


CHECK_SUITES = {
    "oracle": check_oracle,
    "lemmas": check_lemmas,
    "ledger": check_ledger,
    "xi": check_xi,
    "grid": check_grid,
}
