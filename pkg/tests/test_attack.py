import math

import numpy as np
import pytest
from conftest import make_pair

import advland as al
from advland.attack import sign
from advland.errors import Unsupported, ZeroGradient
from test_network import single_neuron


class TestSingleStep:
    def test_small_step_is_continuous(self):
        net, x = make_pair(100, 100, al.TANH, seed=1)
        out = al.single_step_attack(net, x, 1e-9)
        assert not out.flipped
        assert abs(out.value_after - out.value_before) < 1e-6

    def test_perturbation_norm_identity(self):
        net, x = make_pair(100, 150, al.RELU, seed=2)
        out = al.single_step_attack(net, x, 3.0)
        gn = np.linalg.norm(al.gradient(net, x))
        assert out.perturbation_norm == pytest.approx(abs(out.eta) * gn, rel=1e-12)

    def test_saturation_at_moderate_size(self):
        flips = [
            al.single_step_attack(*make_pair(200, 200, al.RELU, seed=s), 20.0).flipped
            for s in range(300)
        ]
        assert np.mean(flips) >= 0.99

    def test_zero_gradient_raises(self):
        x = np.array([1.0, 0.0])
        net = single_neuron([-1.0, 0.0], +1, 2)  # w.x < 0, relu inactive
        with pytest.raises(ZeroGradient):
            al.single_step_attack(net, x, 1.0)

    def test_never_increases_value_to_first_order(self):
        # Small steps against sign(f) must strictly shrink f toward 0.
        for s in range(1000):
            net, x = make_pair(150, 150, al.TANH, seed=s)
            out = al.single_step_attack(net, x, 0.1)
            assert (out.value_after - out.value_before) * sign(out.value_before) < 0

    @pytest.mark.slow
    def test_perturbation_stays_mesoscopic(self):
        d = 1000
        ratios = []
        for s in range(1000):
            net, x = make_pair(d, 1000, al.RELU, seed=s)
            out = al.single_step_attack(net, x, 3.0)
            ratios.append(out.perturbation_norm / np.linalg.norm(x))
        assert max(ratios) <= 10.0 / math.sqrt(d)


class TestSmallestFlipEta:
    def test_absent_when_output_cannot_change_sign(self):
        # A single +1 relu neuron is nonnegative everywhere: sign stays +1.
        x = np.array([2.0, 1.0])
        net = single_neuron([1.0, 0.0], +1, 2)
        assert al.smallest_flip_eta(net, x) is None

    def test_single_neuron_closed_form(self):
        w = np.array([0.6, -0.8, 0.0])
        x = np.array([2.0 / 0.6, 0.0, 0.0])  # w.x = 2
        net = single_neuron(w, -1, 3)
        eta = al.smallest_flip_eta(net, x, eta_max=20.0, grid=400)
        assert eta is not None
        assert eta > 0  # f(x) = -2, so the step sign is positive
        assert abs(eta) == pytest.approx(2.0 / (w @ w), rel=1e-9)

    def test_result_flips_and_grid_point_below_does_not(self):
        eta_max, grid = 20.0, 50
        delta = eta_max / grid
        checked = 0
        for s in range(20):
            net, x = make_pair(120, 120, al.RELU, seed=s)
            eta = al.smallest_flip_eta(net, x, eta_max, grid)
            if eta is None:
                continue
            g = al.gradient(net, x)
            s_before = sign(al.forward(net, x))
            assert sign(al.forward(net, x + eta * g)) != s_before
            idx = int(math.ceil(abs(eta) / delta - 1e-9))
            below = (idx - 1) * delta
            if below > 0:
                assert sign(al.forward(net, x + math.copysign(below, eta) * g)) == s_before
            checked += 1
        assert checked >= 15

    def test_mean_flat_across_dimension(self):
        means = {}
        for d in (200, 1000):
            etas = []
            for s in range(200):
                net, x = make_pair(d, 1000, al.RELU, seed=s)
                eta = al.smallest_flip_eta(net, x)
                if eta is not None:
                    etas.append(abs(eta))
            means[d] = np.mean(etas)
        assert max(means.values()) / min(means.values()) <= 1.25


class TestUniversalDirection:
    def test_single_neuron(self):
        net = single_neuron([0.3, -0.4], -1, 2)
        np.testing.assert_allclose(al.universal_direction(net), [-0.3, 0.4], rtol=1e-15)

    def test_equals_gradient_when_all_neurons_active(self, rng):
        d, k = 30, 40
        x = al.sample_input(d, seed=5)
        w = rng.standard_normal((k, d)) / np.sqrt(d)
        w *= np.where(w @ x > 0, 1.0, -1.0)[:, None]  # force every neuron on
        signs = rng.integers(0, 2, k) * 2.0 - 1.0
        net = al.Network(1, d, k, (np.ascontiguousarray(w),), signs, al.RELU, 0)
        np.testing.assert_allclose(
            al.universal_direction(net), al.gradient(net, x), rtol=1e-12
        )

    def test_deep_unsupported(self):
        net, _ = make_pair(10, 10, al.RELU, seed=0, depth=2)
        with pytest.raises(Unsupported):
            al.universal_direction(net)

    def test_flip_rate_along_universal_direction(self):
        flips = 0
        n = 200
        ts = 20.0 * np.arange(1, 401) / 400
        for s in range(n):
            net, x = make_pair(200, 200, al.RELU, seed=s)
            u = al.universal_direction(net)
            s0 = sign(al.forward(net, x))
            ray = al.ray_evaluator(net, x, u)
            vals = np.concatenate([ray(ts), ray(-ts)])
            flips += bool(np.any(np.where(vals >= 0, 1.0, -1.0) != s0))
        assert flips / n >= 0.90


class TestMultiStep:
    def test_one_step_matches_single_step(self):
        net, x = make_pair(80, 100, al.TANH, seed=3)
        eta_mag = 1.7
        gn = np.linalg.norm(al.gradient(net, x))
        single = al.single_step_attack(net, x, eta_mag)
        multi = al.multi_step_attack(net, x, step_size=eta_mag * gn, max_steps=1)
        assert len(multi.outcomes) == 1
        assert multi.outcomes[0].value_after == pytest.approx(single.value_after, abs=1e-12)

    def test_exact_step_count_in_linear_region(self):
        # f(x) = c*x1/sqrt(2) globally, |grad| = c/sqrt(2): the flip arrives in
        # ceil(|f0| / (step * |grad|)) steps.
        c = 1.0
        w = np.array([[c, 0.0], [-c, 0.0]])
        net = al.Network(1, 2, 2, (w,), np.array([1.0, -1.0]), al.RELU, 0)
        x = np.array([3.7, 0.5])
        step = 1.0
        f0 = al.forward(net, x)
        gn = np.linalg.norm(al.gradient(net, x))
        expected = math.ceil(abs(f0) / (step * gn))
        res = al.multi_step_attack(net, x, step_size=step, max_steps=50)
        assert not res.hit_zero_gradient
        assert res.flipped
        assert len(res.outcomes) == expected

    def test_zero_gradient_mid_trajectory_sets_flag(self):
        # One positive relu neuron: walking downhill lands in the dead region,
        # where the gradient vanishes before any sign change is possible.
        net = single_neuron([1.0, 0.0], +1, 2)
        res = al.multi_step_attack(net, np.array([2.0, 0.0]), step_size=5.0, max_steps=10)
        assert res.hit_zero_gradient
        assert not res.flipped
        assert len(res.outcomes) >= 1

    @pytest.mark.slow
    def test_multi_step_dominates_single_step_on_deep_nets(self):
        single = multi = 0
        for s in range(500):
            net, x = make_pair(500, 500, al.RELU, seed=s, depth=4)
            single += al.single_step_attack(net, x, 20.0).flipped
            multi += al.multi_step_attack(net, x, step_size=1.0, max_steps=40).flipped
        assert multi >= single

    def test_validation(self):
        net, x = make_pair(10, 10, al.RELU, seed=0)
        with pytest.raises(ValueError):
            al.multi_step_attack(net, x, step_size=0.0, max_steps=5)
        with pytest.raises(ValueError):
            al.single_step_attack(net, x, 0.0)
