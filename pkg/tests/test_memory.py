import numpy as np
import pytest

from movoco.batching import BatchedLearner
from movoco.core import Feedback
from movoco.environments import make_centers, make_memory_schedule, MemoryTrackingStream
from movoco.grid import GridParams
from movoco.memory import (AssumptionViolationError, MemoryReduction, MemorySchedule,
                           UnaryOracle, xi_bounds_check, xi_naive, xi_profile)


def constant_schedule(b, T):
    return MemorySchedule(lengths=tuple(min(b, t - 1) for t in range(1, T + 1)), horizon=T)


class TestSchedule:
    def test_validation(self):
        with pytest.raises(ValueError):
            MemorySchedule(lengths=(1, 0, 0), horizon=3)  # b_1 > 0
        with pytest.raises(ValueError):
            MemorySchedule(lengths=(0, 2, 0), horizon=3)  # b_2 > 1
        with pytest.raises(ValueError):
            MemorySchedule(lengths=(0, 0), horizon=3)

    def test_B(self):
        assert constant_schedule(2, 10).B == 2


class TestXi:
    def test_memoryless(self):
        schedule = constant_schedule(0, 10)
        assert np.all(xi_profile(schedule) == 0)

    def test_constant_two_interior_and_boundary(self):
        T = 10
        schedule = constant_schedule(2, T)
        xi = xi_profile(schedule)
        # interior t: contributions b + (b-1) = 3 = B(B+1)/2
        for t in range(3, T - 1):
            assert xi[t - 1] == 3
        assert xi[T - 1] == 2  # only s = T contributes, value b_T
        assert xi[T - 2] == 3

    def test_fast_matches_naive(self):
        rng = np.random.default_rng(18)
        for i in range(20):
            T = int(rng.integers(1, 120))
            B = int(rng.integers(0, 6))
            schedule = make_memory_schedule("random", T, seed=i, B=B)
            xi = xi_profile(schedule)
            for t in range(1, T + 1):
                assert int(xi[t - 1]) == xi_naive(t, schedule)

    def test_naive_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            xi_naive(0, constant_schedule(1, 5))

    def test_bounds_constant_two(self):
        schedule = constant_schedule(2, 10)
        xi = xi_profile(schedule)
        assert np.all(xi <= 4) and int(xi.sum()) <= 40
        assert xi_bounds_check(schedule)

    def test_bounds_random(self):
        for i in range(30):
            schedule = make_memory_schedule("random", 100, seed=100 + i, B=5)
            assert xi_bounds_check(schedule)

    def test_interior_triangular_bound(self):
        # xi_t <= B(B+1)/2 for every t on constant schedules
        for B in range(6):
            schedule = constant_schedule(B, 50)
            assert np.all(xi_profile(schedule) <= B * (B + 1) // 2)


def _tracking_setup(T=40, dim=2, seed=19, B=3):
    schedule = make_memory_schedule("random", T, seed=seed, B=B)
    centers = make_centers("piecewise_constant", dim, T, seed + 1)
    stream = MemoryTrackingStream(G=1.0, centers=centers, schedule=schedule)
    inner = BatchedLearner(
        GridParams(L=1.0 + 2.0 * schedule.B**2, epsilon=1.0, horizon=T), dim)
    return schedule, stream, MemoryReduction(schedule, stream.unary_oracle(), inner, G=1.0)


class TestReduction:
    def test_required_L(self):
        schedule, stream, red = _tracking_setup(B=3)
        assert red.required_L() == 1.0 + 2.0 * 1.0 * schedule.B**2

    def test_out_of_order_rejected(self):
        _, _, red = _tracking_setup()
        with pytest.raises(ValueError):
            red.step(2)

    def test_window_lengths(self):
        schedule, stream, red = _tracking_setup()
        for t in range(1, schedule.horizon + 1):
            red.step(t)
            assert len(red.window(t)) == schedule.lengths[t - 1] + 1

    def test_feeds_next_xi(self):
        # the coefficient delivered with round t is G * xi_{t+1}, xi_{T+1} = 0
        T = 12
        schedule = make_memory_schedule("random", T, seed=20, B=3)
        xi = xi_profile(schedule)
        fed = []

        class Probe:
            dim = 1

            def predict(self):
                return np.zeros(1)

            def observe(self, fb):
                fed.append(fb.next_lambda)

        oracle = UnaryOracle(unary_grad=lambda t, w: np.array([0.5]), H=1.0,
                             memory_loss=lambda t, win: 0.0)
        red = MemoryReduction(schedule, oracle, Probe(), G=2.0)
        for t in range(1, T + 1):
            red.step(t)
        assert fed == [2.0 * float(x) for x in xi[1:]] + [0.0]

    def test_oracle_violation_raises(self):
        schedule = constant_schedule(0, 5)
        oracle = UnaryOracle(unary_grad=lambda t, w: np.array([3.0]), H=1.0,
                             memory_loss=lambda t, win: 0.0)
        inner = BatchedLearner(GridParams(L=1.0, epsilon=1.0, horizon=5), 1)
        red = MemoryReduction(schedule, oracle, inner, G=1.0)
        with pytest.raises(AssumptionViolationError):
            red.step(1)

    def test_memoryless_collapses_to_direct(self):
        # b = 0: pipeline identical to feeding (g_t, 0) straight to the learner
        T, dim = 40, 1
        schedule = constant_schedule(0, T)
        centers = make_centers("piecewise_constant", dim, T, seed=21)
        stream = MemoryTrackingStream(G=1.0, centers=centers, schedule=schedule)
        inner = BatchedLearner(GridParams(L=1.0, epsilon=1.0, horizon=T), dim)
        red = MemoryReduction(schedule, stream.unary_oracle(), inner, G=1.0)
        direct = BatchedLearner(GridParams(L=1.0, epsilon=1.0, horizon=T), dim)
        for t in range(1, T + 1):
            w = red.step(t)
            np.testing.assert_array_equal(w, direct.predict())
            direct.observe(Feedback(stream.unary_grad(t, w), 0.0))

    def test_kink_subgradient_is_zero(self):
        T = 3
        centers = np.zeros((T, 2))
        schedule = constant_schedule(1, T)
        stream = MemoryTrackingStream(G=1.0, centers=centers, schedule=schedule)
        assert np.all(stream.unary_grad(1, np.zeros(2)) == 0.0)

    def test_surrogate_inequality_on_trajectory(self):
        # |f_t(window) - f_hat_t(w_t)| <= G * sum_i ||w_t - w_{t-i}||
        schedule, stream, red = _tracking_setup(T=60, seed=22)
        for t in range(1, schedule.horizon + 1):
            w = red.step(t)
            window = red.window(t)
            gap = abs(stream.memory_loss(t, window) - stream.unary_loss(t, w))
            slack = stream.G * sum(float(np.linalg.norm(w - x)) for x in window)
            assert gap <= slack + 1e-12

    def test_invalid_G(self):
        schedule = constant_schedule(0, 3)
        oracle = UnaryOracle(unary_grad=lambda t, w: np.zeros(1), H=1.0,
                             memory_loss=lambda t, win: 0.0)
        with pytest.raises(ValueError):
            MemoryReduction(schedule, oracle, None, G=-1.0)
