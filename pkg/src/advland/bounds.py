"""Closed-form concentration bounds and their Monte-Carlo verification.

Each evaluator is a pure function of its named parameters.  `verify_bound`
samples the statistic a bound speaks about over fresh random networks and
reports how often the bound is exceeded; a bound at confidence level
1 - gamma passes when the empirical exceedance rate stays within gamma plus
two-sigma binomial slack.

Lower bounds whose inner terms go negative at small k are clamped to 0
(the vacuous regime) so every evaluator is total on its domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .activations import RELU, TANH, Activation
from .errors import DomainError, InvalidTrials, PreconditionViolated, UnknownBound
from .landscape import sample_gradient_norms, sample_values
from .rng import substream

_CHUNK_ELEMS = 4_000_000

# RNG role tags.
_RADEMACHER, _CHISQ, _PAIR_GEOM, _PAIR, _FLIP = range(40, 45)


def _check_gamma(gamma: float, upper: float = 1.0) -> None:
    if not 0.0 < gamma < upper:
        raise DomainError(f"gamma must lie in (0, {upper}), got {gamma}")


def bernstein_bound(sigma: float, c: float, k: int, gamma: float) -> float:
    """High-probability upper bound for a sum of k centered variables with
    moment growth E|X|^q <= (q!/2) sigma^2 c^(q-2)."""
    _check_gamma(gamma)
    if sigma <= 0.0 or c <= 0.0 or k < 1:
        raise DomainError(f"need sigma, c > 0 and k >= 1, got ({sigma}, {c}, {k})")
    log_term = math.log(1.0 / gamma)
    return math.sqrt(2.0 * sigma**2 * k * log_term) + c * log_term


def chisq_deviation_bound(k: int, gamma: float) -> float:
    """Bound on |sum of k squared standard normals - k|."""
    _check_gamma(gamma)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return 4.0 * math.sqrt(k * math.log(2.0 / gamma))


def value_bound(kind: str, k: int, gamma: float) -> float:
    """Upper bound on |f(x)| holding with probability >= 1 - gamma."""
    _check_gamma(gamma)
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    tail = math.sqrt(math.log(2.0 / gamma) / k)
    if kind == "relu":
        return math.sqrt(2.0 * math.log(2.0 / gamma)) * (1.0 + tail)
    if kind == "smooth":
        return math.sqrt(2.0 * math.log(1.0 / gamma)) * (1.0 + tail)
    raise DomainError(f"kind must be 'relu' or 'smooth', got {kind!r}")


def grad_lower_bound(kind: str, k: int, d: int, gamma: float, c_psi_sq: float | None = None) -> float:
    """Lower bound on |grad f(x)| holding with probability >= 1 - gamma.

    The smooth variant needs c_psi_sq = E[psi'(X)^2]; relu has it equal to
    1/2.  Clamped to 0 where the inner term turns negative (small k).
    Defined for gamma in (0, 2/e).
    """
    _check_gamma(gamma, upper=2.0 / math.e)
    if k < 1 or d < 1:
        raise DomainError(f"k, d must be >= 1, got ({k}, {d})")
    if kind == "relu":
        inner = 0.5 - math.sqrt(2.0 * math.log(4.0 / gamma) / k) * (
            1.0 + math.sqrt(math.log(1.0 / gamma) / k)
        )
        outer = 1.0 - 5.0 * math.sqrt(math.log(4.0 / gamma) / d)
    elif kind == "smooth":
        if c_psi_sq is None or c_psi_sq <= 0.0:
            raise DomainError("smooth kind needs c_psi_sq = E[psi'(X)^2] > 0")
        inner = c_psi_sq - math.sqrt(2.0 * math.log(4.0 / gamma) / k) * (
            1.0 + math.sqrt(math.log(4.0 / gamma) / k)
        )
        outer = 1.0 - 5.0 * math.sqrt(math.log(8.0 / gamma) / d)
    else:
        raise DomainError(f"kind must be 'relu' or 'smooth', got {kind!r}")
    return math.sqrt(max(inner, 0.0)) * max(outer, 0.0)


def grad_dev_bound_smooth(R: float, L: float, k: int, d: int, gamma: float) -> float:
    """Uniform bound on the gradient deviation over a radius-R ball for an
    activation whose derivative is L-Lipschitz."""
    _check_gamma(gamma)
    if R < 1.0:
        raise DomainError(f"R must be >= 1, got {R}")
    if L < 0.0 or k < 1 or d < 1:
        raise DomainError(f"need L >= 0, k, d >= 1, got ({L}, {k}, {d})")
    return 20.0 * R * L * (math.sqrt(math.log(k / gamma) / d) + math.log(1.0 / gamma) / math.sqrt(k))


def grad_dev_bound_relu(R: float, k: int, d: int, gamma: float) -> float:
    """Uniform bound on the relu gradient deviation over a radius-R ball."""
    _check_gamma(gamma)
    if not 1.0 <= R <= math.sqrt(d) / 2.0:
        raise PreconditionViolated(f"needs 1 <= R <= sqrt(d)/2; got R={R}, d={d}")
    if math.sqrt(k) < 52.0:
        raise PreconditionViolated(f"needs sqrt(k) >= 52; got k={k}")
    if d < math.log(1.0 / gamma):
        raise PreconditionViolated(f"needs d >= log(1/gamma); got d={d}, gamma={gamma}")
    log_rk = math.log(R * k)
    return 20.0 * (R * log_rk**2 * math.sqrt(math.log(d) / d)) ** 0.25 + 40.0 * math.sqrt(
        d / k
    ) * log_rk


def flip_prob_bounds(R: float, d: int, epsilon: float) -> tuple[float, float]:
    """Bounds on neuron sign flips under perturbations.

    Returns (single, ball): `single` bounds the probability that one neuron's
    preactivation sign differs between x and x + delta with |delta| <= R;
    `ball` bounds the probability that a sign flip exists anywhere within
    distance epsilon of delta (requires |delta| <= sqrt(d)/2).
    """
    if R <= 0.0 or d < 1:
        raise DomainError(f"need R > 0 and d >= 1, got ({R}, {d})")
    if not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    if R > math.sqrt(d) / 2.0:
        raise DomainError(f"ball variant requires R <= sqrt(d)/2, got R={R}, d={d}")
    single = R * math.sqrt(2.0 * math.log(d) / d) + 1.0 / d
    ball = 2.0 * epsilon * (1.0 + 2.0 * math.sqrt(math.log(2.0 / epsilon) / d))
    return single, ball


def per_sample_grad_dev_bound(
    kind: str, R: float, d: int, k: int, gamma: float, L: float | None = None
) -> float:
    """Bound on the gradient-deviation statistic for one fixed direction pair
    (v, delta), holding with probability >= 1 - gamma over the network."""
    _check_gamma(gamma)
    if d < 1 or k < 1 or R <= 0.0:
        raise DomainError(f"need d, k >= 1 and R > 0, got ({d}, {k}, {R})")
    log_term = math.log(1.0 / gamma)
    if kind == "smooth":
        if L is None or L < 0.0:
            raise DomainError("smooth kind needs the derivative's Lipschitz constant L >= 0")
        return (4.0 * R * L / d) * math.sqrt(log_term) * (1.0 + math.sqrt(log_term / k))
    if kind == "relu":
        if R < 1.0:
            raise DomainError(f"relu kind requires R >= 1, got {R}")
        return (
            2.0
            * math.sqrt(log_term / d)
            * ((2.0 * R * math.sqrt(math.log(d) / d)) ** 0.25 + math.sqrt(log_term / k))
        )
    raise DomainError(f"kind must be 'relu' or 'smooth', got {kind!r}")


def theorem_eta(kind: str, gamma: float, c3: float) -> float:
    """Step magnitude |eta| = c3 * sqrt(log(1/gamma)) used by the flip
    guarantees; the constant c3 is caller-supplied."""
    _check_gamma(gamma)
    if kind not in ("relu", "smooth"):
        raise DomainError(f"kind must be 'relu' or 'smooth', got {kind!r}")
    if c3 <= 0.0:
        raise DomainError(f"c3 must be positive, got {c3}")
    return c3 * math.sqrt(math.log(1.0 / gamma))


# ---------------------------------------------------------------------------
# Monte-Carlo verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking one bound against sampled statistics."""

    name: str
    params: dict
    bound_value: float
    empirical_exceed_rate: float
    trials: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "bound_value": self.bound_value,
            "empirical_exceed_rate": self.empirical_exceed_rate,
            "trials": self.trials,
            "pass": self.passed,
        }


def exceedance_slack(gamma: float, trials: int) -> float:
    """Two-sigma binomial slack added to gamma in the pass criterion."""
    return 2.0 * math.sqrt(gamma * (1.0 - gamma) / trials)


def _chunks(trials: int, elems_per_trial: int) -> list[int]:
    step = max(1, _CHUNK_ELEMS // max(elems_per_trial, 1))
    return [min(step, trials - start) for start in range(0, trials, step)]


def sample_rademacher_sums(k: int, trials: int, seed: int) -> np.ndarray:
    """Sum of k independent uniform +-1 variables, per trial."""
    out = np.empty(trials)
    pos = 0
    for i, n in enumerate(_chunks(trials, k)):
        rng = substream(seed, _RADEMACHER, i)
        signs = rng.integers(0, 2, size=(n, k)) * 2.0 - 1.0
        out[pos : pos + n] = signs.sum(axis=1)
        pos += n
    return out


def sample_chisq_deviations(k: int, trials: int, seed: int) -> np.ndarray:
    """|sum of k squared standard normals - k|, per trial."""
    out = np.empty(trials)
    pos = 0
    for i, n in enumerate(_chunks(trials, k)):
        rng = substream(seed, _CHISQ, i)
        z = rng.standard_normal((n, k))
        out[pos : pos + n] = np.abs((z * z).sum(axis=1) - k)
        pos += n
    return out


def _covariance_factor(cov: np.ndarray) -> np.ndarray:
    """Factor F with F F^T = cov, valid for singular covariances (low d)."""
    vals, vecs = np.linalg.eigh(cov)
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def _fixed_pair_factor(d: int, R: float, seed: int) -> np.ndarray:
    """Covariance factor of the joint law of (w.x, w.v, w.delta) for one
    seeded draw of x on the sqrt(d)-sphere, v on the unit sphere and delta of
    norm R; w is a N(0, I/d) weight row."""
    rng = substream(seed, _PAIR_GEOM)
    pts = rng.standard_normal((3, d))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts[0] *= math.sqrt(d)
    pts[2] *= R
    return _covariance_factor(pts @ pts.T / d)


def sample_fixed_pair_grad_dev(
    activation: Activation, d: int, k: int, R: float, trials: int, seed: int
) -> np.ndarray:
    """The statistic (1/sqrt(k)) sum_l a_l (w_l.v)(psi'(w_l.x) - psi'(w_l.(x+delta)))
    for one fixed (x, v, delta) triple, over `trials` fresh networks.

    Networks enter only through the joint Gaussian projections of each weight
    row onto (x, v, delta), so those three coordinates are sampled directly.
    """
    factor = _fixed_pair_factor(d, R, seed)
    out = np.empty(trials)
    pos = 0
    for i, n in enumerate(_chunks(trials, 3 * k)):
        rng = substream(seed, _PAIR, i)
        z = rng.standard_normal((n, k, 3)) @ factor.T
        a = rng.integers(0, 2, size=(n, k)) * 2.0 - 1.0
        dev = activation.deriv(z[:, :, 0]) - activation.deriv(z[:, :, 0] + z[:, :, 2])
        out[pos : pos + n] = (a * z[:, :, 1] * dev).sum(axis=1) / math.sqrt(k)
        pos += n
    return out


def sample_flip_fractions(d: int, k: int, R: float, trials: int, seed: int) -> np.ndarray:
    """Per-network fraction of neurons whose preactivation sign flips between
    x and x + delta, for one fixed (x, delta) with |delta| = R."""
    rng = substream(seed, _PAIR_GEOM)
    pts = rng.standard_normal((2, d))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts[0] *= math.sqrt(d)
    pts[1] *= R
    factor = _covariance_factor(pts @ pts.T / d)
    out = np.empty(trials)
    pos = 0
    for i, n in enumerate(_chunks(trials, 2 * k)):
        z = substream(seed, _FLIP, i).standard_normal((n, k, 2)) @ factor.T
        before = z[:, :, 0] >= 0.0
        after = (z[:, :, 0] + z[:, :, 1]) >= 0.0
        out[pos : pos + n] = (before != after).mean(axis=1)
        pos += n
    return out


def _recipe_bernstein(params, trials, seed):
    k, gamma = int(params["k"]), params["gamma"]
    bound = bernstein_bound(1.0, 1.0, k, gamma)
    return bound, sample_rademacher_sums(k, trials, seed) > bound


def _recipe_chisq(params, trials, seed):
    k, gamma = int(params["k"]), params["gamma"]
    bound = chisq_deviation_bound(k, gamma)
    return bound, sample_chisq_deviations(k, trials, seed) > bound


def _recipe_value(activation, kind):
    def run(params, trials, seed):
        k, gamma = int(params["k"]), params["gamma"]
        bound = value_bound(kind, k, gamma)
        return bound, np.abs(sample_values(k, activation, trials, seed)) > bound

    return run


def _recipe_grad_lower(activation, kind):
    def run(params, trials, seed):
        k, d, gamma = int(params["k"]), int(params["d"]), params["gamma"]
        c = None if kind == "relu" else activation.gaussian_moment(1, 2)
        bound = grad_lower_bound(kind, k, d, gamma, c_psi_sq=c)
        return bound, sample_gradient_norms(d, k, activation, trials, seed) < bound

    return run


def _recipe_per_sample(activation, kind):
    def run(params, trials, seed):
        k, d, gamma = int(params["k"]), int(params["d"]), params["gamma"]
        R = float(params.get("R", 1.0))
        L = activation.lipschitz_of_derivative if kind == "smooth" else None
        bound = per_sample_grad_dev_bound(kind, R, d, k, gamma, L=L)
        return bound, sample_fixed_pair_grad_dev(activation, d, k, R, trials, seed) > bound

    return run


def _recipe_flip_single(params, trials, seed):
    k, d = int(params["k"]), int(params["d"])
    R = float(params.get("R", 1.0))
    bound = flip_prob_bounds(R, d, epsilon=1.0)[0]
    return bound, sample_flip_fractions(d, k, R, trials, seed) > bound


_RECIPES = {
    "bernstein_rademacher": _recipe_bernstein,
    "chisq": _recipe_chisq,
    "value_relu": _recipe_value(RELU, "relu"),
    "value_tanh": _recipe_value(TANH, "smooth"),
    "grad_lower_relu": _recipe_grad_lower(RELU, "relu"),
    "grad_lower_tanh": _recipe_grad_lower(TANH, "smooth"),
    "per_sample_grad_dev_relu": _recipe_per_sample(RELU, "relu"),
    "per_sample_grad_dev_smooth": _recipe_per_sample(TANH, "smooth"),
    "flip_single": _recipe_flip_single,
}

VERIFIABLE_BOUNDS = tuple(sorted(_RECIPES))


def verify_bound(name: str, params: dict, trials: int, seed: int) -> BoundReport:
    """Sample the statistic behind a named bound and report its exceedance.

    `params` must carry gamma plus the bound's size parameters (k, and d/R
    where applicable).
    """
    if name not in _RECIPES:
        raise UnknownBound(f"no sampling recipe for {name!r}; known: {VERIFIABLE_BOUNDS}")
    if trials < 1:
        raise InvalidTrials(f"trials must be >= 1, got {trials}")
    gamma = params["gamma"]
    _check_gamma(gamma)
    bound, exceeded = _RECIPES[name](params, trials, seed)
    rate = float(np.count_nonzero(exceeded)) / trials
    return BoundReport(
        name=name,
        params=dict(params),
        bound_value=float(bound),
        empirical_exceed_rate=rate,
        trials=trials,
        passed=rate <= gamma + exceedance_slack(gamma, trials),
    )
