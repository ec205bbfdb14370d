"""Random layered networks: sampling and exact evaluation.

The model is f(x) = (1/sqrt(k)) * sum_l a_l * psi(w_l . x) for depth 1, with
w_l i.i.d. N(0, I/d) rows and a_l independent uniform signs.  Deeper networks
stack hidden layers of width k, each with i.i.d. N(0, 1/fan_in) entries, and
keep the same +-1/sqrt(k) output combination.  Inputs of interest live on the
sphere of radius sqrt(d), so first-layer preactivations are standard normal.

Everything is float64.  Networks are immutable after sampling and all
evaluation routines are read-only, so they are safe to share across threads.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .activations import Activation, from_name
from .errors import DimMismatch, InvalidDims, NotSmooth, Unsupported
from .rng import substream

# Role tags for RNG substreams.
_WEIGHTS, _SIGNS, _INPUT = 0, 1, 2

_DUMP_MAGIC = b"RNET"
_DUMP_VERSION = 1
_ACTIVATION_IDS = {"relu": 0, "tanh": 1}


@dataclass(frozen=True)
class Network:
    """A sampled network; regenerable from (seed, dims, activation)."""

    depth: int
    input_dim: int
    hidden_width: int
    hidden_weights: tuple[np.ndarray, ...]
    output_signs: np.ndarray
    activation: Activation
    seed: int


def sample_network(depth: int, d: int, k: int, activation: Activation, seed: int) -> Network:
    """Draw a fresh network. Layer j has shape (fan_out, fan_in) with i.i.d.
    N(0, 1/fan_in) entries; output signs are exact +-1."""
    if depth < 1 or d < 1 or k < 1:
        raise InvalidDims(f"depth, d, k must be >= 1, got ({depth}, {d}, {k})")
    weights = []
    for layer in range(depth):
        fan_in = d if layer == 0 else k
        w = substream(seed, _WEIGHTS, layer).standard_normal((k, fan_in))
        w /= math.sqrt(fan_in)
        w.setflags(write=False)
        weights.append(w)
    signs = substream(seed, _SIGNS).integers(0, 2, size=k).astype(np.float64) * 2.0 - 1.0
    signs.setflags(write=False)
    return Network(
        depth=depth,
        input_dim=d,
        hidden_width=k,
        hidden_weights=tuple(weights),
        output_signs=signs,
        activation=activation,
        seed=seed,
    )


def sample_input(d: int, seed: int) -> np.ndarray:
    """Uniform point on the sphere of radius sqrt(d)."""
    if d < 1:
        raise InvalidDims(f"d must be >= 1, got {d}")
    g = substream(seed, _INPUT).standard_normal(d)
    return g * (math.sqrt(d) / np.linalg.norm(g))


def _check_input(net: Network, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != net.input_dim:
        raise DimMismatch(f"input has dim {x.shape[-1]}, network expects {net.input_dim}")
    return x


def _forward_hidden(net: Network, X: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """Run the hidden stack on a (n, d) batch; returns preactivations and the
    final (n, k) hidden output."""
    pre = []
    h = X
    for w in net.hidden_weights:
        z = h @ w.T
        pre.append(z)
        h = net.activation.value(z)
    return pre, h


def forward(net: Network, x: np.ndarray) -> float:
    """f(x) for a single d-vector."""
    return float(forward_batch(net, _check_input(net, x)[None, :])[0])


def forward_batch(net: Network, X: np.ndarray) -> np.ndarray:
    """f on a (n, d) batch of inputs."""
    X = _check_input(net, X)
    _, h = _forward_hidden(net, X)
    return h @ net.output_signs / math.sqrt(net.hidden_width)


def gradient(net: Network, x: np.ndarray) -> np.ndarray:
    """Exact gradient of f at x (reverse-mode through the layers; relu uses
    the psi'(0) = 0 convention)."""
    return gradient_batch(net, _check_input(net, x)[None, :])[0]


def gradient_batch(net: Network, X: np.ndarray) -> np.ndarray:
    """Gradients for a (n, d) batch, returned as (n, d)."""
    X = _check_input(net, X)
    pre, _ = _forward_hidden(net, X)
    g = np.broadcast_to(net.output_signs / math.sqrt(net.hidden_width), pre[-1].shape)
    for w, z in zip(reversed(net.hidden_weights), reversed(pre)):
        g = (g * net.activation.deriv(z)) @ w
    return g


def hessian_vector_product(net: Network, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """(grad^2 f(x)) u for a depth-1 smooth network, without forming the d*d
    matrix: (1/sqrt(k)) * sum_l a_l (w_l . u) psi''(w_l . x) w_l."""
    if not net.activation.is_smooth:
        raise NotSmooth("Hessian undefined for relu networks")
    if net.depth != 1:
        raise Unsupported("Hessian-vector products are only supported at depth 1")
    x = _check_input(net, x)
    u = _check_input(net, u)
    w = net.hidden_weights[0]
    coef = net.output_signs * net.activation.second_deriv(w @ x) * (w @ u)
    return (coef @ w) / math.sqrt(net.hidden_width)


def ray_evaluator(net: Network, x: np.ndarray, direction: np.ndarray):
    """Callable ts -> f(x + t * direction) for arrays of step sizes t.

    The first layer is linear in t, so its projections of x and direction are
    computed once; repeated evaluations (grid scans, bisection) then cost
    O(len(ts) * k) per hidden layer instead of a fresh matvec against the
    d-dimensional input.
    """
    x = _check_input(net, x)
    direction = _check_input(net, direction)
    w0 = net.hidden_weights[0]
    z0 = x @ w0.T
    c0 = direction @ w0.T
    scale = 1.0 / math.sqrt(net.hidden_width)

    def values(ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=np.float64)
        h = net.activation.value(z0[None, :] + ts[:, None] * c0[None, :])
        for w in net.hidden_weights[1:]:
            h = net.activation.value(h @ w.T)
        return h @ net.output_signs * scale

    return values


def forward_along_ray(net: Network, x: np.ndarray, direction: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """f(x + t * direction) for every t in ts."""
    return ray_evaluator(net, x, direction)(ts)


def save_network(net: Network, path) -> None:
    """Binary dump: little-endian header (magic, version, depth, d, k,
    activation id, seed) followed by raw float64 weights and signs."""
    act_id = _ACTIVATION_IDS[net.activation.kind]
    header = struct.pack(
        "<4sIIQQIQ",
        _DUMP_MAGIC,
        _DUMP_VERSION,
        net.depth,
        net.input_dim,
        net.hidden_width,
        act_id,
        net.seed,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for w in net.hidden_weights:
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(net.output_signs, dtype="<f8").tobytes())


def load_network(path) -> Network:
    """Inverse of save_network."""
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<4sIIQQIQ"))
        magic, version, depth, d, k, act_id, seed = struct.unpack("<4sIIQQIQ", header)
        if magic != _DUMP_MAGIC or version != _DUMP_VERSION:
            raise ValueError(f"not a version-{_DUMP_VERSION} network dump: {path}")
        name = {v: n for n, v in _ACTIVATION_IDS.items()}[act_id]
        weights = []
        for layer in range(depth):
            fan_in = d if layer == 0 else k
            raw = fh.read(8 * k * fan_in)
            w = np.frombuffer(raw, dtype="<f8").reshape(k, fan_in).copy()
            w.setflags(write=False)
            weights.append(w)
        signs = np.frombuffer(fh.read(8 * k), dtype="<f8").copy()
        signs.setflags(write=False)
    return Network(
        depth=depth,
        input_dim=d,
        hidden_width=k,
        hidden_weights=tuple(weights),
        output_signs=signs,
        activation=from_name(name),
        seed=seed,
    )
