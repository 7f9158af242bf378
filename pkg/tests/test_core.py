import numpy as np
import pytest

from movoco.core import (DimensionMismatchError, Feedback, NonFiniteValueError,
                         as_vector, check_same_dim, dot, norm, validate_horizon, zeros)


class TestAsVector:
    def test_scalar_promoted_to_1d(self):
        v = as_vector(3.0)
        assert v.shape == (1,) and v.dtype == np.float64

    def test_copies_input(self):
        src = np.array([1.0, 2.0])
        v = as_vector(src)
        v[0] = 99.0
        assert src[0] == 1.0

    def test_rejects_nan_and_inf(self):
        with pytest.raises(NonFiniteValueError):
            as_vector([1.0, np.nan])
        with pytest.raises(NonFiniteValueError):
            as_vector([np.inf])

    def test_rejects_matrix(self):
        with pytest.raises(DimensionMismatchError):
            as_vector(np.zeros((2, 2)))

    def test_dim_check(self):
        assert as_vector([1.0, 2.0], dim=2).shape == (2,)
        with pytest.raises(DimensionMismatchError):
            as_vector([1.0, 2.0], dim=3)


class TestNormDot:
    def test_norm_345(self):
        assert norm(np.array([3.0, 4.0])) == 5.0

    def test_dot_orthogonal(self):
        assert dot(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_dot_self_is_norm_squared(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            v = rng.standard_normal(rng.integers(1, 8))
            assert dot(v, v) == pytest.approx(norm(v) ** 2, rel=1e-12)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = rng.integers(1, 8)
            a, b = rng.standard_normal(n), rng.standard_normal(n)
            assert norm(a + b) <= norm(a) + norm(b) + 1e-12

    def test_dot_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            dot(np.zeros(2), np.zeros(3))

    def test_check_same_dim(self):
        with pytest.raises(DimensionMismatchError):
            check_same_dim(np.zeros(2), np.zeros(3))


class TestScaffolding:
    def test_zeros_rejects_nonpositive_dim(self):
        with pytest.raises(ValueError):
            zeros(0)

    def test_validate_horizon(self):
        assert validate_horizon(1) == 1
        assert validate_horizon(np.int64(5)) == 5
        for bad in (0, -1, 2.5, "10"):
            with pytest.raises(ValueError):
                validate_horizon(bad)


class TestFeedback:
    def test_coerces_gradient(self):
        fb = Feedback([1.0, 2.0], 0.5)
        assert isinstance(fb.gradient, np.ndarray)
        assert fb.dim == 2
        assert fb.next_lambda == 0.5

    def test_rejects_negative_lambda(self):
        with pytest.raises(ValueError):
            Feedback([1.0], -0.1)

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFiniteValueError):
            Feedback([np.nan], 0.0)
        with pytest.raises(ValueError):
            Feedback([1.0], np.inf)
