import math

import numpy as np
import pytest

from advland.activations import RELU, TANH, TANH_DERIV_LIPSCHITZ, from_name
from advland.errors import NotSmooth, UnsupportedPower

# Frozen 1e7-sample Monte-Carlo oracles (SFC64 seed 12345) for the tanh
# Gaussian moments; quadrature must agree within 1e-3.
MC_TANH_SQ = 0.39448643802046734
MC_DTANH_SQ = 0.4641816823845818


class TestValue:
    def test_relu_negative(self):
        assert RELU.value(-1.5) == 0.0

    def test_relu_positive_identity(self):
        assert RELU.value(2.0) == 2.0

    def test_tanh_vanishes_at_zero(self):
        assert TANH.value(0.0) == 0.0


class TestDeriv:
    def test_relu_positive(self):
        assert RELU.deriv(3.0) == 1.0

    def test_relu_kink_convention(self):
        assert RELU.deriv(0.0) == 0.0

    def test_tanh_at_zero(self):
        assert TANH.deriv(0.0) == 1.0

    def test_matches_finite_difference(self, rng):
        h = 1e-6
        for act in (RELU, TANH):
            t = rng.uniform(-5, 5, size=100)
            if act is RELU:
                t = t[np.abs(t) > 1e-3]
            fd = (act.value(t + h) - act.value(t - h)) / (2 * h)
            np.testing.assert_allclose(act.deriv(t), fd, rtol=1e-6, atol=1e-9)


class TestSecondDeriv:
    def test_tanh_odd_symmetry(self):
        assert TANH.second_deriv(0.0) == 0.0

    @pytest.mark.parametrize("t", [0.5, -1.0])
    def test_matches_finite_difference_of_deriv(self, t):
        h = 1e-6
        fd = (TANH.deriv(t + h) - TANH.deriv(t - h)) / (2 * h)
        assert abs(TANH.second_deriv(t) - fd) <= 1e-6 * abs(fd)

    def test_relu_raises(self):
        with pytest.raises(NotSmooth):
            RELU.second_deriv(1.0)


class TestGaussianMoment:
    def test_relu_deriv_squared(self):
        assert RELU.gaussian_moment(1, 2) == 0.5

    def test_relu_value_squared(self):
        # E[max(0,X)^2] = E[X^2]/2 by symmetry; Monte-Carlo cross-check below.
        assert abs(RELU.gaussian_moment(0, 2) - 0.5) < 1e-12

    def test_relu_first_moment(self):
        assert abs(RELU.gaussian_moment(0, 1) - 1.0 / math.sqrt(2 * math.pi)) < 1e-12

    def test_relu_fourth_moment(self):
        # E[X^4]/2 = 3/2.
        assert abs(RELU.gaussian_moment(0, 4) - 1.5) < 1e-12

    def test_tanh_squared_vs_monte_carlo(self):
        assert abs(TANH.gaussian_moment(0, 2) - MC_TANH_SQ) < 1e-3

    def test_tanh_deriv_squared_vs_monte_carlo(self):
        assert abs(TANH.gaussian_moment(1, 2) - MC_DTANH_SQ) < 1e-3

    def test_power_cap(self):
        with pytest.raises(UnsupportedPower):
            TANH.gaussian_moment(0, 9)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            TANH.gaussian_moment(2, 2)

    def test_nonzero_second_moments(self):
        for act in (RELU, TANH):
            for order in (0, 1):
                assert act.gaussian_moment(order, 2) > 0.0


class TestLipschitz:
    def test_value_is_one_lipschitz(self, rng):
        s, t = rng.uniform(-5, 5, size=(2, 10_000))
        for act in (RELU, TANH):
            assert np.all(np.abs(act.value(s) - act.value(t)) <= np.abs(s - t) + 1e-15)

    def test_tanh_deriv_lipschitz_constant(self, rng):
        s, t = rng.uniform(-5, 5, size=(2, 10_000))
        lhs = np.abs(TANH.deriv(s) - TANH.deriv(t))
        assert np.all(lhs <= TANH.lipschitz_of_derivative * np.abs(s - t) + 1e-12)

    def test_stored_constant_is_max_curvature(self):
        ts = np.linspace(-3, 3, 200_001)
        assert abs(np.max(np.abs(TANH.second_deriv(ts))) - TANH_DERIV_LIPSCHITZ) < 1e-8


def test_from_name():
    assert from_name("relu") is RELU
    assert from_name("tanh") is TANH
    with pytest.raises(ValueError, match="cubic"):
        from_name("cubic")


def test_relu_not_smooth_flag():
    assert not RELU.is_smooth
    assert TANH.is_smooth
    assert RELU.lipschitz_of_derivative is None
