"""Random-network adversarial landscapes at desk scale.

Sample random layered networks, attack them with single gradient steps,
measure their landscape statistics by Monte Carlo and verify the matching
closed-form concentration bounds.
"""

from .activations import RELU, TANH, Activation, from_name
from .attack import (
    AttackOutcome,
    MultiStepResult,
    multi_step_attack,
    single_step_attack,
    smallest_flip_eta,
    universal_direction,
)
from .bounds import (
    BoundReport,
    bernstein_bound,
    chisq_deviation_bound,
    flip_prob_bounds,
    grad_dev_bound_relu,
    grad_dev_bound_smooth,
    grad_lower_bound,
    per_sample_grad_dev_bound,
    theorem_eta,
    value_bound,
    verify_bound,
)
from .experiments import SweepConfig, SweepResult, emit_csv, parse_csv, run_bound_suite, run_sweep
from .landscape import (
    LandscapeStats,
    check_gradient_descent_lemma,
    estimate_grad_deviation_sup,
    estimate_gradient_norm,
    estimate_hessian_opnorm,
    estimate_landscape,
    estimate_value_stats,
    flip_fraction,
)
from .network import (
    Network,
    forward,
    forward_along_ray,
    forward_batch,
    gradient,
    gradient_batch,
    hessian_vector_product,
    load_network,
    ray_evaluator,
    sample_input,
    sample_network,
    save_network,
)

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "AttackOutcome",
    "BoundReport",
    "LandscapeStats",
    "MultiStepResult",
    "Network",
    "RELU",
    "SweepConfig",
    "SweepResult",
    "TANH",
    "bernstein_bound",
    "check_gradient_descent_lemma",
    "chisq_deviation_bound",
    "emit_csv",
    "estimate_grad_deviation_sup",
    "estimate_gradient_norm",
    "estimate_hessian_opnorm",
    "estimate_landscape",
    "estimate_value_stats",
    "flip_fraction",
    "flip_prob_bounds",
    "forward",
    "forward_along_ray",
    "forward_batch",
    "from_name",
    "grad_dev_bound_relu",
    "grad_dev_bound_smooth",
    "grad_lower_bound",
    "gradient",
    "gradient_batch",
    "hessian_vector_product",
    "load_network",
    "multi_step_attack",
    "parse_csv",
    "per_sample_grad_dev_bound",
    "ray_evaluator",
    "run_bound_suite",
    "run_sweep",
    "sample_input",
    "sample_network",
    "save_network",
    "single_step_attack",
    "smallest_flip_eta",
    "theorem_eta",
    "universal_direction",
    "value_bound",
    "verify_bound",
]
