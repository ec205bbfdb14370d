import numpy as np
import pytest
from conftest import make_pair

import advland as al
from advland.errors import DimMismatch, InvalidDims, NotSmooth, Unsupported
from advland.rng import derive_seed


def single_neuron(w, a, d, activation=al.RELU):
    """Hand-built k=1 network."""
    w = np.asarray(w, dtype=np.float64).reshape(1, d)
    return al.Network(
        depth=1,
        input_dim=d,
        hidden_width=1,
        hidden_weights=(w,),
        output_signs=np.array([float(a)]),
        activation=activation,
        seed=0,
    )


class TestSampleNetwork:
    def test_deterministic(self):
        a = al.sample_network(1, 4, 3, al.RELU, seed=7)
        b = al.sample_network(1, 4, 3, al.RELU, seed=7)
        assert a.hidden_weights[0].shape == (3, 4)
        assert len(a.output_signs) == 3
        np.testing.assert_array_equal(a.hidden_weights[0], b.hidden_weights[0])
        np.testing.assert_array_equal(a.output_signs, b.output_signs)

    def test_signs_exact(self):
        net = al.sample_network(1, 10, 200, al.RELU, seed=1)
        assert set(np.unique(net.output_signs)) == {-1.0, 1.0}

    def test_row_norms_concentrate(self):
        for seed in (0, 1, 2):
            net = al.sample_network(1, 1000, 1000, al.RELU, seed=seed)
            mean_sq = float(np.mean(np.sum(net.hidden_weights[0] ** 2, axis=1)))
            assert 0.9 <= mean_sq <= 1.1

    def test_deep_shapes(self):
        net = al.sample_network(3, 100, 200, al.RELU, seed=5)
        assert [w.shape for w in net.hidden_weights] == [(200, 100), (200, 200), (200, 200)]

    def test_invalid_dims(self):
        with pytest.raises(InvalidDims):
            al.sample_network(1, 0, 3, al.RELU, seed=0)
        with pytest.raises(InvalidDims):
            al.sample_network(0, 3, 3, al.RELU, seed=0)


class TestSampleInput:
    def test_norm(self):
        x = al.sample_input(10, seed=3)
        assert abs(np.linalg.norm(x) - np.sqrt(10)) < 1e-9 * np.sqrt(10)

    def test_near_orthogonality(self):
        d = 1000
        for seed in range(20):
            x1 = al.sample_input(d, seed=derive_seed(seed, 0))
            x2 = al.sample_input(d, seed=derive_seed(seed, 1))
            assert abs(x1 @ x2) / d <= 0.2

    def test_d_one_is_sign(self):
        for seed in range(5):
            x = al.sample_input(1, seed=seed)
            assert x[0] in (-1.0, 1.0)


class TestForward:
    def test_single_neuron_hand_case(self):
        d = 4
        x = al.sample_input(d, seed=2)
        w = x * (2.0 / d)  # w.x = 2
        net = single_neuron(w, +1, d)
        assert abs(al.forward(net, x) - 2.0) < 1e-12

    def test_positive_homogeneity(self):
        net, x = make_pair(50, 80, al.RELU, seed=4)
        for c in (0.5, 2.0, 7.3):
            assert al.forward(net, c * x) == pytest.approx(c * al.forward(net, x), rel=1e-12)

    def test_variance_matches_activation_second_moment(self):
        # E[f(x)^2] equals E[psi(Z)^2] = 1/2 for relu.
        vals = np.array(
            [al.forward(*make_pair(300, 300, al.RELU, seed=s)) for s in range(3000)]
        )
        assert 0.45 <= vals.var() <= 0.55

    def test_dim_mismatch(self):
        net, _ = make_pair(10, 5, al.RELU, seed=0)
        with pytest.raises(DimMismatch):
            al.forward(net, np.zeros(11))

    def test_sign_symmetry(self):
        net, x = make_pair(40, 60, al.TANH, seed=9)
        flipped = al.Network(
            depth=net.depth,
            input_dim=net.input_dim,
            hidden_width=net.hidden_width,
            hidden_weights=net.hidden_weights,
            output_signs=-net.output_signs,
            activation=net.activation,
            seed=net.seed,
        )
        assert al.forward(flipped, x) == -al.forward(net, x)
        np.testing.assert_array_equal(al.gradient(flipped, x), -al.gradient(net, x))


class TestGradient:
    def test_single_active_neuron(self):
        d = 4
        x = al.sample_input(d, seed=2)
        w = x * (2.0 / d)
        net = single_neuron(w, +1, d)
        np.testing.assert_allclose(al.gradient(net, x), w.ravel(), rtol=1e-12)

    @pytest.mark.parametrize("depth", [1, 3])
    def test_tanh_finite_difference(self, depth):
        net, x = make_pair(50, 80, al.TANH, seed=11, depth=depth)
        g = al.gradient(net, x)
        h = 1e-5
        fd = np.empty_like(g)
        for i in range(len(x)):
            e = np.zeros_like(x)
            e[i] = h
            fd[i] = (al.forward(net, x + e) - al.forward(net, x - e)) / (2 * h)
        np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-8 * np.linalg.norm(g))

    def test_relu_gradient_scale(self):
        norms = np.array(
            [
                np.linalg.norm(al.gradient(*make_pair(400, 400, al.RELU, seed=s)))
                for s in range(2000)
            ]
        )
        assert 0.68 <= norms.mean() <= 0.74

    def test_homogeneity_of_relu_gradient(self):
        net, x = make_pair(50, 80, al.RELU, seed=13)
        np.testing.assert_array_equal(al.gradient(net, 3.0 * x), al.gradient(net, x))


class TestHessianVectorProduct:
    def test_zero_vector(self):
        net, x = make_pair(30, 50, al.TANH, seed=1)
        np.testing.assert_array_equal(
            al.hessian_vector_product(net, x, np.zeros(30)), np.zeros(30)
        )

    def test_finite_difference(self):
        net, x = make_pair(30, 50, al.TANH, seed=2)
        u = al.sample_input(30, seed=77)
        h = 1e-5
        fd = (al.gradient(net, x + h * u) - al.gradient(net, x - h * u)) / (2 * h)
        hv = al.hessian_vector_product(net, x, u)
        np.testing.assert_allclose(hv, fd, rtol=1e-4, atol=1e-7 * np.linalg.norm(hv))

    def test_zero_at_origin(self):
        # tanh'' is odd, so the Hessian vanishes at x = 0.
        net, _ = make_pair(30, 50, al.TANH, seed=3)
        hv = al.hessian_vector_product(net, np.zeros(30), np.ones(30))
        np.testing.assert_array_equal(hv, np.zeros(30))

    def test_relu_raises(self):
        net, x = make_pair(10, 5, al.RELU, seed=0)
        with pytest.raises(NotSmooth):
            al.hessian_vector_product(net, x, x)

    def test_deep_unsupported(self):
        net, x = make_pair(10, 5, al.TANH, seed=0, depth=2)
        with pytest.raises(Unsupported):
            al.hessian_vector_product(net, x, x)


class TestRayEvaluator:
    @pytest.mark.parametrize("depth", [1, 3])
    def test_matches_forward(self, depth):
        net, x = make_pair(20, 30, al.TANH, seed=6, depth=depth)
        direction = al.sample_input(20, seed=8)
        ts = np.array([-1.5, 0.0, 0.3, 2.0])
        vals = al.forward_along_ray(net, x, direction, ts)
        expected = [al.forward(net, x + t * direction) for t in ts]
        np.testing.assert_allclose(vals, expected, rtol=1e-12)


class TestDump:
    def test_round_trip(self, tmp_path):
        net, x = make_pair(12, 7, al.TANH, seed=21, depth=2)
        path = tmp_path / "net.bin"
        al.save_network(net, path)
        loaded = al.load_network(path)
        assert (loaded.depth, loaded.input_dim, loaded.hidden_width) == (2, 12, 7)
        assert loaded.activation.kind == "tanh"
        assert loaded.seed == net.seed
        for a, b in zip(loaded.hidden_weights, net.hidden_weights):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(loaded.output_signs, net.output_signs)
        assert al.forward(loaded, x) == al.forward(net, x)
