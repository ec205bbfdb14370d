import numpy as np
import pytest

import advland as al
from advland.rng import derive_seed


def make_pair(d, k, activation, seed, depth=1):
    """Fresh (network, on-sphere input) pair with decorrelated seeds."""
    net = al.sample_network(depth, d, k, activation, derive_seed(seed, 0))
    x = al.sample_input(d, derive_seed(seed, 1))
    return net, x


def dense_hessian(net, x):
    """Materialized Hessian of a depth-1 smooth network, built directly from
    the weighted outer-product sum (independent of the HVP code path)."""
    w = net.hidden_weights[0]
    coef = net.output_signs * net.activation.second_deriv(w @ x) / np.sqrt(net.hidden_width)
    return (w * coef[:, None]).T @ w


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
