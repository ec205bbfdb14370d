"""Command-line interface.

Subcommands: attack (one single-step attack as a JSON record), landscape
(Monte-Carlo statistics of one landscape quantity as JSON), sweep (CSV over a
(d, k, L) grid) and verify-bounds (JSON lines of bound reports).  JSON goes
to stdout, diagnostics to stderr.  Identical argv and files produce identical
output bytes.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import experiments, landscape
from .activations import from_name
from .attack import single_step_attack
from .errors import AdvlandError
from .network import sample_input, sample_network
from .rng import derive_seed

_INPUT_TAG = 90


def _add_common(parser: argparse.ArgumentParser, defaults: bool = True) -> None:
    """Shared flags. With defaults=False every flag defaults to None so a
    config file can fill the gaps (flags win on conflict)."""
    parser.add_argument("--seed", type=int, default=0 if defaults else None, help="master RNG seed")
    parser.add_argument("--d", type=int, help="input dimension")
    parser.add_argument("--k", type=int, help="hidden width")
    parser.add_argument(
        "--depth", type=int, default=1 if defaults else None, help="number of hidden layers"
    )
    parser.add_argument(
        "--activation",
        choices=("relu", "tanh"),
        default="relu" if defaults else None,
        help="activation kind",
    )
    parser.add_argument("--trials", type=int, default=1000, help="Monte-Carlo trials")
    parser.add_argument("--out", help="output path (default: stdout)")


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_attack(args) -> int:
    if args.d is None or args.k is None:
        raise AdvlandError("attack requires --d and --k")
    net = sample_network(args.depth, args.d, args.k, from_name(args.activation), args.seed)
    x = sample_input(args.d, derive_seed(args.seed, _INPUT_TAG))
    outcome = single_step_attack(net, x, args.eta)
    _emit(json.dumps(outcome.to_json()) + "\n", args.out)
    return 0


def _cmd_landscape(args) -> int:
    if args.d is None or args.k is None:
        raise AdvlandError("landscape requires --d and --k")
    stats = landscape.estimate_landscape(
        args.quantity,
        args.d,
        args.k,
        from_name(args.activation),
        args.trials,
        args.seed,
        R=args.radius,
        iterations=args.iterations,
    )
    _emit(json.dumps(stats.to_json()) + "\n", args.out)
    return 0


def _cmd_sweep(args) -> int:
    if args.config:
        config = experiments.load_config(args.config)
    else:
        if args.d is None or args.k is None:
            raise AdvlandError("sweep requires --config or both --d and --k")
        config = experiments.SweepConfig(d_values=(args.d,), k_values=(args.k,))
    # Flags win over the config file.
    overrides = {}
    if args.d is not None:
        overrides["d_values"] = (args.d,)
    if args.k is not None:
        overrides["k_values"] = (args.k,)
    if args.depth is not None:
        overrides["L_values"] = (args.depth,)
    if args.activation is not None:
        overrides["activation"] = args.activation
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.nets is not None:
        overrides["nets_per_cell"] = args.nets
    if args.inputs is not None:
        overrides["inputs_per_net"] = args.inputs
    if args.out is not None:
        overrides["output_path"] = args.out
    if overrides:
        config = dataclasses.replace(config, **overrides)
    results = experiments.run_sweep(config)
    if not config.output_path:
        raise AdvlandError("sweep requires an output path (--out or output_path in config)")
    experiments.emit_csv(results, config.output_path)
    print(f"wrote {len(results)} cells to {config.output_path}", file=sys.stderr)
    return 0


def _cmd_verify_bounds(args) -> int:
    names = args.names.split(",") if args.names else experiments.DEFAULT_SUITE_BOUNDS
    gammas = [float(g) for g in args.gammas.split(",")]
    sizes = [int(s) for s in args.sizes.split(",")]
    reports = experiments.run_bound_suite(gammas, sizes, args.trials, args.seed, path=None, names=names)
    text = "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in reports)
    _emit(text, args.out)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"bounds exceeded beyond slack: {failed}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="advland",
        description="Single-gradient-step attacks on random networks: "
        "attack single cases, estimate landscape statistics, run sweeps, verify bounds.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_attack = sub.add_parser("attack", help="one single-step attack, JSON to stdout")
    _add_common(p_attack)
    p_attack.add_argument("--eta", type=float, default=20.0, help="step magnitude |eta|")
    p_attack.set_defaults(func=_cmd_attack)

    p_land = sub.add_parser("landscape", help="Monte-Carlo landscape statistics, JSON to stdout")
    _add_common(p_land)
    p_land.add_argument(
        "--quantity",
        choices=landscape.QUANTITIES,
        required=True,
        help="which statistic to sample",
    )
    p_land.add_argument("--radius", type=float, default=1.0, help="perturbation radius R")
    p_land.add_argument("--iterations", type=int, default=100, help="power-iteration steps")
    p_land.set_defaults(func=_cmd_landscape)

    p_sweep = sub.add_parser("sweep", help="run a (d, k, L) sweep and write CSV")
    _add_common(p_sweep, defaults=False)
    p_sweep.add_argument("--config", help="TOML config file (flags win on conflict)")
    p_sweep.add_argument("--nets", type=int, help="networks per cell")
    p_sweep.add_argument("--inputs", type=int, help="inputs per network")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify-bounds", help="bound-exceedance suite, JSON lines")
    _add_common(p_verify)
    p_verify.add_argument("--gammas", default="0.05,0.2", help="comma-separated gamma levels")
    p_verify.add_argument("--sizes", default="1000", help="comma-separated sizes (d = k = size)")
    p_verify.add_argument("--names", help="comma-separated bound names (default: full suite)")
    p_verify.set_defaults(func=_cmd_verify_bounds)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (AdvlandError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
