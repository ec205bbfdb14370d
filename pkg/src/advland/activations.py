"""Scalar nonlinearities with exact derivatives and Gaussian moments.

Two kinds are provided: the rectifier ``relu`` and the smooth ``tanh``.
Both vanish at zero and are 1-Lipschitz; tanh additionally has a Lipschitz
first derivative (constant 4/(3*sqrt(3)), the maximum of |tanh''|), which is
what the smooth-activation analysis requires.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotSmooth, UnsupportedPower

#: Lipschitz constant of tanh' (attained at tanh(t) = 1/sqrt(3)).
TANH_DERIV_LIPSCHITZ = 4.0 / (3.0 * math.sqrt(3.0))

_QUAD_NODES = 128
_MAX_MOMENT_POWER = 8


@dataclass(frozen=True)
class Activation:
    """A fixed scalar nonlinearity.

    Attributes:
        kind: lowercase name, "relu" or "tanh" (the name used by configs
            and CLI flags).
        lipschitz_of_derivative: Lipschitz constant of the first derivative;
            None for kinds whose derivative is discontinuous (relu).
    """

    kind: str
    lipschitz_of_derivative: float | None

    @property
    def is_smooth(self) -> bool:
        return self.lipschitz_of_derivative is not None

    def value(self, t):
        """psi(t); vectorized over numpy arrays."""
        if self.kind == "relu":
            return np.maximum(t, 0.0)
        return np.tanh(t)

    def deriv(self, t):
        """psi'(t); relu uses the almost-everywhere convention psi'(0) = 0."""
        if self.kind == "relu":
            return np.where(np.asarray(t) > 0.0, 1.0, 0.0)
        th = np.tanh(t)
        return 1.0 - th * th

    def second_deriv(self, t):
        """psi''(t); raises NotSmooth for relu."""
        if not self.is_smooth:
            raise NotSmooth(
                "second derivative undefined for relu; use finite-difference "
                "gradient-deviation statistics instead"
            )
        th = np.tanh(t)
        return -2.0 * th * (1.0 - th * th)

    def gaussian_moment(self, derivative_order: int, power: int) -> float:
        """E[psi^(j)(X)^p] for X ~ N(0,1), j in {0,1}, 1 <= p <= 8."""
        if derivative_order not in (0, 1):
            raise ValueError(f"derivative_order must be 0 or 1, got {derivative_order}")
        if not 1 <= power <= _MAX_MOMENT_POWER:
            raise UnsupportedPower(f"moment power must be in [1, {_MAX_MOMENT_POWER}], got {power}")
        return _gaussian_moment(self.kind, derivative_order, power)


@lru_cache(maxsize=None)
def _hermgauss_standard_normal() -> tuple[np.ndarray, np.ndarray]:
    # Physicists' Gauss-Hermite nodes rescaled so that sum(w * g(x)) = E[g(X)],
    # X ~ N(0,1).
    nodes, weights = np.polynomial.hermite.hermgauss(_QUAD_NODES)
    return nodes * math.sqrt(2.0), weights / math.sqrt(math.pi)


@lru_cache(maxsize=None)
def _gaussian_moment(kind: str, derivative_order: int, power: int) -> float:
    if kind == "relu":
        if derivative_order == 1:
            # psi' is the indicator of positivity: E[1{X>0}^p] = 1/2.
            return 0.5
        # E[max(0,X)^p] = E|X|^p / 2 by symmetry.
        return 0.5 * 2.0 ** (power / 2.0) * math.gamma((power + 1) / 2.0) / math.sqrt(math.pi)
    x, w = _hermgauss_standard_normal()
    act = from_name(kind)
    g = act.value(x) if derivative_order == 0 else act.deriv(x)
    return float(np.sum(w * g**power))


RELU = Activation(kind="relu", lipschitz_of_derivative=None)
TANH = Activation(kind="tanh", lipschitz_of_derivative=TANH_DERIV_LIPSCHITZ)

_BY_NAME = {"relu": RELU, "tanh": TANH}


def from_name(name: str) -> Activation:
    """Look up an activation by its lowercase config/CLI name."""
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown activation {name!r}; expected one of {sorted(_BY_NAME)}") from None
