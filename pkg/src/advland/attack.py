"""Gradient-direction attacks on a sampled network.

The central object is the single-step perturbation delta = eta * grad f(x)
with sign(eta) = -sign(f(x)): stepping against the function's current sign.
Also provided: the smallest-step search used by the sweep experiments, the
input-independent perturbation direction (1/sqrt(k)) * sum_l a_l w_l, and a
normalized multi-step baseline for deeper networks.

sign(0) is +1 everywhere, so a value driven exactly to 0 from a negative
start counts as a flip while 0 reached from a positive start does not.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Unsupported, ZeroGradient
from .network import Network, forward, gradient, ray_evaluator

GRAD_NORM_TOL = 1e-12

#: Default search resolution for the smallest flipping step.
DEFAULT_ETA_MAX = 20.0
DEFAULT_ETA_GRID = 400
_BISECTION_STEPS = 40


def sign(v: float) -> float:
    """Sign with the convention sign(0) = +1."""
    return 1.0 if v >= 0.0 else -1.0


@dataclass(frozen=True)
class AttackOutcome:
    """Result of one gradient step: the step used, where it landed."""

    eta: float
    perturbation_norm: float
    value_before: float
    value_after: float
    flipped: bool

    def to_json(self) -> dict:
        return {
            "eta": self.eta,
            "perturbation_norm": self.perturbation_norm,
            "value_before": self.value_before,
            "value_after": self.value_after,
            "flipped": self.flipped,
        }


@dataclass(frozen=True)
class MultiStepResult:
    """Trajectory of a multi-step attack; hit_zero_gradient marks early
    termination at a vanishing gradient."""

    outcomes: list[AttackOutcome]
    hit_zero_gradient: bool

    @property
    def flipped(self) -> bool:
        return bool(self.outcomes) and self.outcomes[-1].flipped


def _gradient_or_raise(net: Network, x: np.ndarray) -> tuple[np.ndarray, float]:
    g = gradient(net, x)
    gn = float(np.linalg.norm(g))
    if gn < GRAD_NORM_TOL:
        raise ZeroGradient(f"gradient norm {gn:.3e} below {GRAD_NORM_TOL:.0e}")
    return g, gn


def single_step_attack(net: Network, x: np.ndarray, eta_magnitude: float) -> AttackOutcome:
    """One step x -> x + eta * grad f(x) with eta = -sign(f(x)) * eta_magnitude."""
    if eta_magnitude <= 0.0:
        raise ValueError(f"eta_magnitude must be positive, got {eta_magnitude}")
    before = forward(net, x)
    g, gn = _gradient_or_raise(net, x)
    eta = -sign(before) * eta_magnitude
    after = forward(net, x + eta * g)
    return AttackOutcome(
        eta=eta,
        perturbation_norm=abs(eta) * gn,
        value_before=before,
        value_after=after,
        flipped=sign(before) != sign(after),
    )


def smallest_flip_eta(
    net: Network,
    x: np.ndarray,
    eta_max: float = DEFAULT_ETA_MAX,
    grid: int = DEFAULT_ETA_GRID,
) -> float | None:
    """Smallest step size (in magnitude) flipping sign(f), or None.

    Scans |eta| over a uniform grid of `grid` points in (0, eta_max], with
    sign(eta) fixed to -sign(f(x)), then refines the first non-flip/flip
    bracket by bisection.  f along the ray need not be monotone, so this is
    the smallest grid-bracketed flip.  Returns the signed eta.
    """
    if eta_max <= 0.0:
        raise ValueError(f"eta_max must be positive, got {eta_max}")
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    before = forward(net, x)
    g, _ = _gradient_or_raise(net, x)
    s_before = sign(before)
    step_sign = -s_before
    ray = ray_evaluator(net, x, g)

    magnitudes = eta_max * np.arange(1, grid + 1) / grid
    values = ray(step_sign * magnitudes)
    flips = np.where(values >= 0.0, 1.0, -1.0) != s_before
    if not flips.any():
        return None
    first = int(np.argmax(flips))
    lo = 0.0 if first == 0 else float(magnitudes[first - 1])
    hi = float(magnitudes[first])
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        v = float(ray(np.array([step_sign * mid]))[0])
        if sign(v) != s_before:
            hi = mid
        else:
            lo = mid
    return step_sign * hi


def universal_direction(net: Network) -> np.ndarray:
    """The input-independent direction (1/sqrt(k)) * sum_l a_l w_l (depth 1)."""
    if net.depth != 1:
        raise Unsupported("universal direction is only defined at depth 1")
    return (net.output_signs @ net.hidden_weights[0]) / math.sqrt(net.hidden_width)


def multi_step_attack(
    net: Network,
    x: np.ndarray,
    step_size: float,
    max_steps: int,
) -> MultiStepResult:
    """Normalized gradient descent against sign(f(x0)) until flip or budget.

    Each step moves step_size in the direction -sign(f(x0)) * grad/|grad|;
    normalizing keeps step_size comparable across depths, where the raw
    gradient scale varies.
    """
    if step_size <= 0.0:
        raise ValueError(f"step_size must be positive, got {step_size}")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    current = np.asarray(x, dtype=np.float64)
    value = forward(net, current)
    s0 = sign(value)
    outcomes: list[AttackOutcome] = []
    for _ in range(max_steps):
        try:
            g, gn = _gradient_or_raise(net, current)
        except ZeroGradient:
            return MultiStepResult(outcomes=outcomes, hit_zero_gradient=True)
        eta = -s0 * step_size / gn
        current = current + eta * g
        value_after = forward(net, current)
        outcomes.append(
            AttackOutcome(
                eta=eta,
                perturbation_norm=step_size,
                value_before=value,
                value_after=value_after,
                flipped=sign(value_after) != s0,
            )
        )
        value = value_after
        if outcomes[-1].flipped:
            break
    return MultiStepResult(outcomes=outcomes, hit_zero_gradient=False)
