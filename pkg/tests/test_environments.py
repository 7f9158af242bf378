import numpy as np
import pytest

from movoco.cmd import CmdParams, objective_value, solve_update
from movoco.core import Feedback
from movoco.environments import (ComparatorStream, LambdaStream, cmd_update_oracle,
                                 make_centers, make_comparators, make_delay_schedule,
                                 make_lambdas, make_linear_stream, make_memory_schedule,
                                 make_tracking_stream)


class TestLambdaStream:
    def test_zero_kind(self):
        lam = make_lambdas("zero", 10, seed=0)
        assert np.all(lam.values == 0.0)
        assert lam.lambda_max == 0.0

    def test_boundary_convention_enforced(self):
        with pytest.raises(ValueError):
            LambdaStream(kind="bad", values=np.array([0.5, 0.1, 0.0]))
        with pytest.raises(ValueError):
            LambdaStream(kind="bad", values=np.array([0.0, 0.1, 0.7]))
        with pytest.raises(ValueError):
            LambdaStream(kind="bad", values=np.array([0.0, -0.1, 0.0]))

    def test_generated_kinds_respect_boundaries(self):
        for kind in ("constant", "uniform_random", "bursty"):
            lam = make_lambdas(kind, 50, seed=1, level=2.0)
            assert lam.values[0] == 0.0 and lam.values[-1] == 0.0
            assert np.all(lam.values >= 0.0)
            assert lam.lambda_max <= 2.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_lambdas("nope", 10, seed=0)


class TestComparators:
    def test_fixed_path_length_is_norm(self):
        # u_0 = 0 convention: a constant comparator pays exactly one step
        comp = make_comparators("fixed", 2, 20, seed=2)
        assert comp.P_T == pytest.approx(float(np.linalg.norm(comp.values[0])))
        assert comp.M == pytest.approx(float(np.linalg.norm(comp.values[0])))

    def test_statistics_recomputed_from_values(self):
        u = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 3.0]])
        comp = ComparatorStream(kind="manual", values=u)
        assert comp.M == 3.0
        assert comp.P_T == pytest.approx(1.0 + np.sqrt(2.0) + 2.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            make_comparators("nope", 1, 10, seed=0)


class TestSchedulesAndStreams:
    def test_constant_delay_clamped_dtot(self):
        T, d = 20, 4
        schedule = make_delay_schedule("constant", T, seed=0, d=d)
        assert schedule.d_tot == sum(min(d, T - t) for t in range(1, T + 1))

    def test_unknown_kinds(self):
        with pytest.raises(ValueError):
            make_delay_schedule("nope", 10, seed=0)
        with pytest.raises(ValueError):
            make_memory_schedule("nope", 10, seed=0)
        with pytest.raises(ValueError):
            make_linear_stream("nope", 1.0, 1, 10, seed=0)
        with pytest.raises(ValueError):
            make_centers("nope", 1, 10, seed=0)

    def test_invalid_G(self):
        with pytest.raises(ValueError):
            make_linear_stream("gaussian", 0.0, 1, 10, seed=0)

    def test_linear_streams_respect_gradient_bound(self):
        for kind in ("gaussian", "rademacher"):
            stream = make_linear_stream(kind, 1.5, 3, 100, seed=3)
            norms = np.linalg.norm(stream.gradients, axis=1)
            assert np.all(norms <= 1.5 + 1e-12)

    def test_lipschitz_certificate(self):
        # |f(x) - f(y)| <= G ||x - y|| on random pairs for every stream kind
        rng = np.random.default_rng(23)
        streams = [
            make_linear_stream("gaussian", 1.0, 3, 50, seed=4),
            make_tracking_stream(2.0, 3, 50, seed=5),
        ]
        for stream in streams:
            for _ in range(200):
                t = int(rng.integers(1, 51))
                x, y = rng.standard_normal(3), rng.standard_normal(3)
                assert abs(stream.loss(t, x) - stream.loss(t, y)) <= \
                    stream.G * float(np.linalg.norm(x - y)) + 1e-12

    def test_subgradient_certificate(self):
        # f(y) >= f(x) + <g(x), y - x> on random pairs (convexity)
        rng = np.random.default_rng(24)
        streams = [
            make_linear_stream("gaussian", 1.0, 2, 50, seed=6),
            make_tracking_stream(1.0, 2, 50, seed=7, center_kind="random_walk"),
        ]
        for stream in streams:
            for _ in range(200):
                t = int(rng.integers(1, 51))
                x, y = rng.standard_normal(2), rng.standard_normal(2)
                lhs = stream.loss(t, y)
                rhs = stream.loss(t, x) + float(stream.grad(t, x) @ (y - x))
                assert lhs >= rhs - 1e-9

    def test_determinism(self):
        a = make_linear_stream("gaussian", 1.0, 4, 64, seed=8)
        b = make_linear_stream("gaussian", 1.0, 4, 64, seed=8)
        c = make_linear_stream("gaussian", 1.0, 4, 64, seed=9)
        np.testing.assert_array_equal(a.gradients, b.gradients)
        assert not np.array_equal(a.gradients, c.gradients)


class TestUpdateOracle:
    @pytest.fixture
    def params(self):
        return CmdParams(epsilon0=1.0, eta=0.1, horizon=100)

    def test_zero_case(self, params):
        w = cmd_update_oracle(np.zeros(2), Feedback(np.zeros(2), 0.0), params)
        assert np.all(w == 0.0)

    def test_worked_1d_case(self, params):
        w = cmd_update_oracle(np.zeros(1), Feedback(np.array([0.5]), 0.0), params)
        assert w[0] == pytest.approx(-1.8927e-4, rel=1e-3)

    def test_agrees_with_closed_form_3d(self, params):
        rng = np.random.default_rng(25)
        for i in range(10):
            w_old = rng.standard_normal(3) * 0.5
            g = rng.standard_normal(3)
            g *= float(rng.uniform(0.1, 1.0)) / float(np.linalg.norm(g))
            lam = float(rng.uniform(0, 0.5))
            eta = float(rng.uniform(0.05, 1.0)) / (float(np.linalg.norm(g)) + lam)
            p = CmdParams(epsilon0=1.0, eta=eta, horizon=100)
            fb = Feedback(g, lam)
            w_closed = solve_update(w_old, fb, p)
            w_oracle = cmd_update_oracle(w_old, fb, p, seed=i)
            gap = float(np.linalg.norm(w_closed - w_oracle))
            assert gap <= 1e-6 * (1.0 + float(np.linalg.norm(w_oracle)))
            f_gap = objective_value(w_closed, w_old, fb, p) - \
                objective_value(w_oracle, w_old, fb, p)
            assert f_gap <= 1e-9 * (1.0 + abs(objective_value(w_oracle, w_old, fb, p)))
