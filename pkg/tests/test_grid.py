import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movoco.cmd import CmdLearner, CmdParams
from movoco.core import Feedback
from movoco.grid import (GridLearner, GridParams, build_grid, expected_grid_size,
                         grid_tuning_check)


class TestBuildGrid:
    def test_worked_example(self):
        assert build_grid(1.0, 16) == [0.25, 0.5, 1.0]

    def test_horizon_one(self):
        assert build_grid(1.0, 1) == [1.0]

    def test_endpoints(self):
        for L in (0.5, 1.0, 7.3):
            for T in (1, 2, 16, 17, 100, 4096):
                rates = build_grid(L, T)
                assert rates[0] == pytest.approx(1.0 / (L * math.sqrt(T)))
                assert rates[-1] == 1.0 / L

    def test_strictly_increasing_cap_once(self):
        for T in (2, 3, 16, 100, 1000):
            rates = build_grid(2.0, T)
            assert all(a < b for a, b in zip(rates, rates[1:]))
            assert rates.count(1.0 / 2.0) == 1

    def test_size_formula(self):
        # |S| = ceil(log2(sqrt(T))) + 1, checked in exact arithmetic
        for T in (1, 2, 3, 4, 5, 15, 16, 17, 255, 256, 1000, 10**6):
            assert len(build_grid(1.0, T)) == expected_grid_size(T)
            assert expected_grid_size(T) == math.ceil(math.log2(math.sqrt(T))) + 1

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            build_grid(0.0, 10)
        with pytest.raises(ValueError):
            build_grid(1.0, 0)


class TestGridLearner:
    def test_round_one_plays_zero(self):
        learner = GridLearner(GridParams(L=1.0, epsilon=1.0, horizon=64), 3)
        assert np.all(learner.predict() == 0.0)

    def test_zero_feedback_stays_zero(self):
        learner = GridLearner(GridParams(L=1.0, epsilon=1.0, horizon=16), 2)
        for _ in range(16):
            learner.update(Feedback(np.zeros(2), 0.0))
            assert np.all(learner.predict() == 0.0)

    def test_instance_count_static(self):
        learner = GridLearner(GridParams(L=1.0, epsilon=1.0, horizon=64), 1)
        n = len(learner.instances)
        learner.update(Feedback(np.array([0.5]), 0.2))
        assert len(learner.instances) == n == expected_grid_size(64)

    def test_broadcast_matches_standalone(self):
        # instance i after k updates equals a standalone CmdLearner(eta_i)
        gp = GridParams(L=1.5, epsilon=0.7, horizon=32)
        learner = GridLearner(gp, 2)
        shadows = [CmdLearner(CmdParams(epsilon0=gp.epsilon, eta=eta, horizon=gp.horizon), 2)
                   for eta in learner.rates]
        rng = np.random.default_rng(9)
        for t in range(32):
            fb = Feedback(rng.uniform(-1, 1, 2), float(rng.uniform(0, 0.2)))
            learner.update(fb)
            for shadow in shadows:
                shadow.update(fb)
        for inst, shadow in zip(learner.instances, shadows):
            np.testing.assert_array_equal(inst.w, shadow.w)

    def test_sum_decomposition_identity(self):
        # <g, w> = sum_i <g, w_i> to 1e-12 at every round
        learner = GridLearner(GridParams(L=1.0, epsilon=1.0, horizon=64), 3)
        rng = np.random.default_rng(10)
        for t in range(64):
            g = rng.uniform(-1, 1, 3)
            w = learner.predict()
            parts = sum(float(g @ inst.w) for inst in learner.instances)
            assert float(g @ w) == pytest.approx(parts, abs=1e-12)
            learner.update(Feedback(g, float(rng.uniform(0, 0.3))))


class TestGridTuning:
    def test_degenerate_p(self):
        assert grid_tuning_check(0.0, 5.0, 0.01, 10.0)

    def test_worked_example(self):
        assert grid_tuning_check(1.0, 1.0, 0.01, 10.0)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            grid_tuning_check(-1.0, 1.0, 0.01, 1.0)
        with pytest.raises(ValueError):
            grid_tuning_check(1.0, 1.0, 0.5, 0.1)
        with pytest.raises(ValueError):
            grid_tuning_check(1.0, 1.0, 0.0, 1.0)

    @settings(max_examples=300, deadline=None)
    @given(
        P=st.floats(0.0, 1e3),
        V=st.floats(0.0, 1e3),
        eta_min=st.floats(1e-4, 1.0),
        factor=st.floats(1.0, 1e4),
    )
    def test_holds_on_random_inputs(self, P, V, eta_min, factor):
        assert grid_tuning_check(P, V, eta_min, eta_min * factor)
