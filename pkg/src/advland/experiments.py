"""Seeded sweep runner over (d, k, L) grids and the bound-verification suite.

A sweep samples nets_per_cell networks per cell and inputs_per_net inputs per
network, records each input's gradient norm and smallest flipping step size,
and aggregates per cell.  Output is a fixed-schema CSV.  Everything is fully
determined by the config: per-network and per-input seeds are derived from
(seed, d, k, L, indices), so results do not depend on execution order or on
the worker count (set ADVLAND_THREADS > 1 to fan nets out to processes).
"""
from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import bounds
from .activations import from_name
from .attack import smallest_flip_eta
from .errors import InvalidDims, ZeroGradient
from .network import gradient, sample_input, sample_network
from .rng import derive_seed

# Desk-scale guard: widths beyond this, or cells costing more than
# _MAX_CELL_COST ~ L * k^2 weight entries, are refused rather than attempted.
MAX_HIDDEN_WIDTH = 100_000
_MAX_CELL_COST = 2e10

# RNG role tags.
_NET_SEED, _INPUT_SEED = 60, 61

CSV_HEADER = (
    "d,k,L,n_total,n_flipped,fraction_flipped,"
    "mean_smallest_eta,std_smallest_eta,mean_grad_norm,std_grad_norm"
)

DEFAULT_SUITE_BOUNDS = (
    "bernstein_rademacher",
    "chisq",
    "value_relu",
    "value_tanh",
    "grad_lower_relu",
    "grad_lower_tanh",
    "per_sample_grad_dev_smooth",
    "per_sample_grad_dev_relu",
    "flip_single",
)


@dataclass(frozen=True)
class SweepConfig:
    d_values: tuple[int, ...]
    k_values: tuple[int, ...]
    L_values: tuple[int, ...] = (1,)
    activation: str = "relu"
    nets_per_cell: int = 100
    inputs_per_net: int = 100
    eta_max: float = 20.0
    eta_grid: int = 400
    seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        from_name(self.activation)
        if not (self.d_values and self.k_values and self.L_values):
            raise InvalidDims("d_values, k_values and L_values must be nonempty")
        if self.nets_per_cell * self.inputs_per_net < 1:
            raise InvalidDims("nets_per_cell * inputs_per_net must be >= 1")
        if max(self.k_values) > MAX_HIDDEN_WIDTH:
            raise InvalidDims(f"k capped at {MAX_HIDDEN_WIDTH} (desk scale)")
        worst = max(self.L_values) * max(self.k_values) ** 2
        if worst > _MAX_CELL_COST:
            raise InvalidDims(
                f"cell cost L*k^2 = {worst:.2e} exceeds the desk-scale budget {_MAX_CELL_COST:.0e}"
            )

    @classmethod
    def from_mapping(cls, data: dict) -> "SweepConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        coerced = dict(data)
        for key in ("d_values", "k_values", "L_values"):
            if key in coerced:
                coerced[key] = tuple(int(v) for v in coerced[key])
        return cls(**coerced)


def load_config(path) -> SweepConfig:
    """Read a flat TOML config file and validate it."""
    with open(path, "rb") as fh:
        return SweepConfig.from_mapping(tomllib.load(fh))


@dataclass(frozen=True)
class SweepResult:
    """Per-cell aggregate; eta statistics cover flipped cases only and are
    None when nothing flipped."""

    d: int
    k: int
    L: int
    n_total: int
    n_flipped: int
    fraction_flipped: float
    mean_smallest_eta: float | None
    std_smallest_eta: float | None
    mean_grad_norm: float
    std_grad_norm: float


def _net_job(args) -> tuple[list[float], list[float]]:
    """Run one network of one cell: per-input gradient norms and the |eta|
    values of the inputs that flipped."""
    activation_name, d, k, L, eta_max, eta_grid, inputs_per_net, seed, net_index = args
    act = from_name(activation_name)
    net = sample_network(L, d, k, act, derive_seed(seed, _NET_SEED, d, k, L, net_index))
    flipped_etas: list[float] = []
    grad_norms: list[float] = []
    for j in range(inputs_per_net):
        x = sample_input(d, derive_seed(seed, _INPUT_SEED, d, k, L, net_index, j))
        grad_norms.append(float(np.linalg.norm(gradient(net, x))))
        try:
            eta = smallest_flip_eta(net, x, eta_max, eta_grid)
        except ZeroGradient:
            # Counted in n_total, never as a flip.
            continue
        if eta is not None:
            flipped_etas.append(abs(eta))
    return flipped_etas, grad_norms


def _worker_count() -> int:
    env = os.environ.get("ADVLAND_THREADS", "").strip()
    if not env:
        return 1
    return max(1, int(env))


def run_sweep(config: SweepConfig) -> list[SweepResult]:
    """Run every (d, k, L) cell of the config; cells are emitted in sorted
    (d, k, L) order."""
    cells = sorted(product(config.d_values, config.k_values, config.L_values))
    jobs = [
        (config.activation, d, k, L, config.eta_max, config.eta_grid,
         config.inputs_per_net, config.seed, net_index)
        for (d, k, L) in cells
        for net_index in range(config.nets_per_cell)
    ]
    workers = _worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_net_job, jobs, chunksize=1))
    else:
        outputs = [_net_job(job) for job in jobs]

    results = []
    for idx, (d, k, L) in enumerate(cells):
        per_net = outputs[idx * config.nets_per_cell : (idx + 1) * config.nets_per_cell]
        etas = np.array([e for flipped, _ in per_net for e in flipped])
        gnorms = np.array([g for _, norms in per_net for g in norms])
        n_total = len(gnorms)
        n_flipped = len(etas)
        results.append(
            SweepResult(
                d=d,
                k=k,
                L=L,
                n_total=n_total,
                n_flipped=n_flipped,
                fraction_flipped=n_flipped / n_total,
                mean_smallest_eta=float(etas.mean()) if n_flipped else None,
                std_smallest_eta=float(etas.std()) if n_flipped else None,
                mean_grad_norm=float(gnorms.mean()),
                std_grad_norm=float(gnorms.std()),
            )
        )
    return results


def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.9g}"


def emit_csv(results: list[SweepResult], path) -> None:
    """Write the fixed-schema CSV (9 significant digits, UTF-8, final newline)."""
    if not results:
        raise ValueError("results must be nonempty")
    lines = [CSV_HEADER]
    for r in results:
        lines.append(
            ",".join(
                [
                    str(r.d),
                    str(r.k),
                    str(r.L),
                    str(r.n_total),
                    str(r.n_flipped),
                    _fmt(r.fraction_flipped),
                    _fmt(r.mean_smallest_eta),
                    _fmt(r.std_smallest_eta),
                    _fmt(r.mean_grad_norm),
                    _fmt(r.std_grad_norm),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path) -> list[SweepResult]:
    """Inverse of emit_csv."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header in {path}")
    results = []
    for line in lines[1:]:
        cols = line.split(",")
        results.append(
            SweepResult(
                d=int(cols[0]),
                k=int(cols[1]),
                L=int(cols[2]),
                n_total=int(cols[3]),
                n_flipped=int(cols[4]),
                fraction_flipped=float(cols[5]),
                mean_smallest_eta=float(cols[6]) if cols[6] else None,
                std_smallest_eta=float(cols[7]) if cols[7] else None,
                mean_grad_norm=float(cols[8]),
                std_grad_norm=float(cols[9]),
            )
        )
    return results


def default_bound_params(name: str, size: int, gamma: float) -> dict:
    """Standard parameter map for one suite entry at d = k = size.

    The relu fixed-pair recipe runs at d = 2 * size (its hypotheses want d
    comfortably above k); perturbation radii default to R = 1.
    """
    params: dict = {"k": size, "gamma": gamma}
    if name in ("grad_lower_relu", "grad_lower_tanh", "flip_single"):
        params["d"] = size
    if name == "per_sample_grad_dev_smooth":
        params["d"] = size
        params["R"] = 1.0
    if name == "per_sample_grad_dev_relu":
        params["d"] = 2 * size
        params["R"] = 1.0
    if name == "flip_single":
        params["R"] = 1.0
    return params


def run_bound_suite(
    gamma_list,
    size_list,
    trials: int,
    seed: int,
    path=None,
    names=DEFAULT_SUITE_BOUNDS,
) -> list[bounds.BoundReport]:
    """verify_bound for every name x gamma x size; optionally write one JSON
    line per report."""
    reports = []
    for name in names:
        for size in size_list:
            for gamma in gamma_list:
                params = default_bound_params(name, int(size), float(gamma))
                reports.append(bounds.verify_bound(name, params, trials, seed))
    if path is not None:
        write_reports_jsonl(reports, path)
    return reports


def write_reports_jsonl(reports, path) -> None:
    out = sys.stdout if path == "-" else open(path, "w", encoding="utf-8", newline="\n")
    try:
        for report in reports:
            out.write(json.dumps(report.to_json(), sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
