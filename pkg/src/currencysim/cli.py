"""Command-line interface: graph generation, single runs, sweeps, bounds.

All outputs are plot-tool-agnostic text/CSV.  Exit codes: 0 success,
1 runtime or I/O failure, 2 usage error.  The ``SIM_SEED`` environment
variable supplies a default master seed, overridden by ``--seed``.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager

from . import theory
from .dynamics import Schedule
from .experiments import (
    CSV_HEADER,
    DISTINCT,
    UNIFIED,
    ExperimentConfig,
    OneCommunity,
    TwoCommunity,
    run_one_full,
    sweep,
    write_summary_csv,
)
from .graph import gen_er, gen_two_community, write_edge_list

_SCHEDULES = {
    "random": Schedule.RANDOM_SEQUENTIAL,
    "fixed": Schedule.FIXED_SEQUENTIAL,
    "synchronous": Schedule.SYNCHRONOUS,
}


class UsageError(Exception):
    pass


@contextmanager
def _open_out(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as f:
            yield f


def _default_seed() -> int:
    return int(os.environ.get("SIM_SEED", "0"))


def _parse_values(args) -> list[float]:
    if (args.values is None) == (args.range is None):
        raise UsageError("provide exactly one of --values or --range")
    if args.values is not None:
        try:
            return [float(v) for v in args.values.split(",") if v != ""]
        except ValueError as exc:
            raise UsageError(f"malformed --values: {exc}") from exc
    try:
        lo, hi, step = (float(x) for x in args.range.split(":"))
    except ValueError as exc:
        raise UsageError("malformed --range, expected lo:hi:step") from exc
    if step <= 0 or hi < lo:
        raise UsageError("malformed --range, expected lo:hi:step with step > 0")
    values = []
    k = 0
    while lo + k * step <= hi + 1e-12:
        values.append(round(lo + k * step, 12))
        k += 1
    return values


def _parse_n_grid(spec: str) -> list[int]:
    if ":" in spec:
        try:
            lo, hi, step = (int(x) for x in spec.split(":"))
        except ValueError as exc:
            raise UsageError("malformed --n grid, expected lo:hi:step") from exc
        if step <= 0 or hi < lo:
            raise UsageError("malformed --n grid, expected lo:hi:step with step > 0")
        return list(range(lo, hi + 1, step))
    try:
        return [int(x) for x in spec.split(",") if x != ""]
    except ValueError as exc:
        raise UsageError(f"malformed --n grid: {exc}") from exc


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"malformed config line {line!r}, expected key=value")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


_CONFIG_KEYS = {
    "n": int,
    "p": float,
    "p_intra": float,
    "p_inter": float,
    "initial": str,
    "schedule": str,
    "weighting": str,
    "poisson_mean": float,
    "replications": int,
    "seed": int,
    "max_steps": int,
}


def _merge_config_file(args) -> None:
    """Fill flags the user did not set from a key=value config file."""
    if getattr(args, "config", None) is None:
        return
    values = _load_config_file(args.config)
    unknown = set(values) - set(_CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for key, raw in values.items():
        if getattr(args, key, None) is None:
            try:
                setattr(args, key, _CONFIG_KEYS[key](raw))
            except ValueError as exc:
                raise UsageError(f"malformed config value for {key}: {raw!r}") from exc


def _topology_from_args(args) -> OneCommunity | TwoCommunity:
    has_one = args.p is not None
    has_two = args.p_intra is not None or args.p_inter is not None
    if has_one == has_two:
        raise UsageError("provide either --p, or both --p-intra and --p-inter")
    if has_one:
        return OneCommunity(args.p)
    if args.p_intra is None or args.p_inter is None:
        raise UsageError("two-community graphs need both --p-intra and --p-inter")
    return TwoCommunity(args.p_intra, args.p_inter)


def cmd_generate(args) -> int:
    topology = _topology_from_args(args)
    seed = args.seed if args.seed is not None else _default_seed()
    if isinstance(topology, OneCommunity):
        g = gen_er(args.n, topology.p, seed)
    else:
        g = gen_two_community(args.n, topology.p_intra, topology.p_inter, seed)
    with _open_out(args.out) as f:
        write_edge_list(g, f)
    return 0


def _experiment_config(args, replications: int = 1) -> ExperimentConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return ExperimentConfig(
        n=args.n,
        topology=_topology_from_args(args),
        initial=args.initial or DISTINCT,
        schedule=_SCHEDULES[args.schedule or "random"],
        weighting=args.weighting or "none",
        poisson_mean=args.poisson_mean,
        replications=replications,
        master_seed=seed,
        max_steps=args.max_steps,
    )


def cmd_run(args) -> int:
    _merge_config_file(args)
    if args.n is None:
        raise UsageError("--n is required")
    config = _experiment_config(args)
    record, result = run_one_full(config, 0)
    with _open_out(args.out) as f:
        f.write(f"steps {record.steps}\n")
        f.write(f"switches {record.switches}\n")
        f.write(f"currencies {record.currency_count}\n")
        f.write(f"components {record.component_count}\n")
        f.write(f"utility {record.final_social_utility}\n")
        f.write(f"converged {str(record.converged).lower()}\n")
        f.write(f"cycle_detected {str(result.cycle_detected).lower()}\n")
    if args.trace is not None:
        with open(args.trace, "w") as f:
            f.write("step,utility\n")
            for s, u in zip(result.trace_steps, result.utility_trace):
                f.write(f"{s},{u}\n")
    return 0


def _run_sweep(args, parameter: str) -> int:
    _merge_config_file(args)
    if args.n is None:
        raise UsageError("--n is required")
    values = _parse_values(args)
    base = _experiment_config(args, replications=args.replications or 1000)
    summary = sweep(base, parameter, values, workers=args.workers)
    with _open_out(args.out) as f:
        write_summary_csv(summary, f)
    return 0


def cmd_sweep_one(args) -> int:
    args.p = 0.0  # placeholder; each sweep value replaces it
    args.p_intra = args.p_inter = None
    return _run_sweep(args, "density_p")


def cmd_sweep_two(args) -> int:
    if args.p_intra is None:
        raise UsageError("--p-intra is required")
    args.p = None
    args.p_inter = 0.0  # placeholder
    return _run_sweep(args, "p_inter")


def cmd_bounds(args) -> int:
    if args.p_inter >= args.p_intra:
        raise UsageError("bounds need p_inter < p_intra (rates reach 1 at equality)")
    grid = _parse_n_grid(args.n)
    with _open_out(args.out) as f:
        f.write("N,p_intra,p_inter,p_av,k_N,flip_exact,rho_a,rho_r,geom_bound,union_bound\n")
        for n in grid:
            rep = theory.union_bound(theory.BoundParams(n, args.p_intra, args.p_inter, args.trials_convention))
            f.write(
                f"{rep.n},{rep.p_intra!r},{rep.p_inter!r},{rep.p_av!r},{rep.k_n},"
                f"{rep.flip_prob_exact!r},{rep.rho_a!r},{rep.rho_r!r},"
                f"{rep.geometric_bound!r},{rep.union_bound!r}\n"
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="currencysim",
        description="Currency-competition dynamics on random graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seed_help="master seed (default: $SIM_SEED or 0)"):
        p.add_argument("--seed", type=int, default=None, help=seed_help)
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("generate", help="write a graph as an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None, help="one-community link density")
    p.add_argument("--p-intra", type=float, default=None, dest="p_intra")
    p.add_argument("--p-inter", type=float, default=None, dest="p_inter")
    add_common(p)
    p.set_defaults(func=cmd_generate)

    def add_run_flags(p, with_initial=True):
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--schedule", choices=sorted(_SCHEDULES), default=None)
        p.add_argument("--weighting", choices=["none", "degree", "poisson"], default=None)
        p.add_argument("--poisson-mean", type=float, default=None, dest="poisson_mean")
        p.add_argument("--max-steps", type=int, default=None, dest="max_steps")
        p.add_argument("--config", default=None, help="key=value config file; flags win")
        if with_initial:
            p.add_argument("--initial", choices=[DISTINCT, "unified", UNIFIED], default=None)
        add_common(p)

    p = sub.add_parser("run", help="run one replication to equilibrium")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--p-intra", type=float, default=None, dest="p_intra")
    p.add_argument("--p-inter", type=float, default=None, dest="p_inter")
    p.add_argument("--trace", default=None, help="write the utility trace CSV here")
    add_run_flags(p)
    p.set_defaults(func=cmd_run)

    def add_sweep_flags(p):
        p.add_argument("--values", default=None, help="comma-separated grid values")
        p.add_argument("--range", default=None, help="grid as lo:hi:step")
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("sweep-one", help="sweep link density p on one community")
    add_sweep_flags(p)
    add_run_flags(p, with_initial=False)
    p.set_defaults(func=cmd_sweep_one, initial=None)

    p = sub.add_parser("sweep-two", help="sweep p_inter on two communities")
    p.add_argument("--p-intra", type=float, default=None, dest="p_intra")
    add_sweep_flags(p)
    add_run_flags(p)
    p.set_defaults(func=cmd_sweep_two)

    p = sub.add_parser("bounds", help="tail-bound report over an N grid")
    p.add_argument("--p-intra", type=float, required=True, dest="p_intra")
    p.add_argument("--p-inter", type=float, required=True, dest="p_inter")
    p.add_argument("--n", required=True, help="N grid: lo:hi:step or comma list")
    p.add_argument(
        "--trials-convention",
        choices=[theory.PAPER_N, theory.EXACT_HALVES],
        default=theory.PAPER_N,
        dest="trials_convention",
    )
    add_common(p)
    p.set_defaults(func=cmd_bounds)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "initial", None) == "unified":
            args.initial = UNIFIED
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
