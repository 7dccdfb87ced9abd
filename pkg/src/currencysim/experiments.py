"""Seeded, replicated experiment campaigns with CSV-ready aggregation.

A campaign is described declaratively by :class:`ExperimentConfig`; every
replication derives its own graph / schedule / tie-break / weight streams
from ``(master_seed, point_index, replication_index)``, so any record can
be reproduced bit-for-bit in isolation and sweeps are independent of
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import IO, Sequence

import numpy as np

from . import rng
from .dynamics import (
    CurrencyState,
    RunResult,
    Schedule,
    default_max_steps,
    initial_state_distinct,
    initial_state_unified_communities,
    run_to_equilibrium,
    would_switch_agents,
)
from .graph import connected_components, gen_er, gen_two_community, mean_density

CSV_HEADER = (
    "param,value,replications,converged,frac_single,mean_currencies,"
    "mean_components,mean_utility,mean_winner_weight,mean_pop_weight"
)

DISTINCT = "distinct"
UNIFIED = "unified_communities"

WEIGHTING_NONE = "none"
WEIGHTING_DEGREE = "degree"
WEIGHTING_POISSON = "poisson"


@dataclass(frozen=True)
class OneCommunity:
    p: float


@dataclass(frozen=True)
class TwoCommunity:
    p_intra: float
    p_inter: float


Topology = OneCommunity | TwoCommunity


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one replicated experiment point."""

    n: int
    topology: Topology
    initial: str = DISTINCT
    schedule: Schedule = Schedule.RANDOM_SEQUENTIAL
    weighting: str = WEIGHTING_NONE
    poisson_mean: float | None = None  # default: mean degree of the topology
    replications: int = 1
    master_seed: int = 0
    max_steps: int | None = None
    point_index: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.initial not in (DISTINCT, UNIFIED):
            raise ValueError(f"unknown initial condition {self.initial!r}")
        if self.initial == UNIFIED and not isinstance(self.topology, TwoCommunity):
            raise ValueError("unified_communities start requires a two_community topology")
        if self.weighting not in (WEIGHTING_NONE, WEIGHTING_DEGREE, WEIGHTING_POISSON):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.poisson_mean is not None and not self.poisson_mean > 0:
            raise ValueError("poisson mean must be > 0")
        object.__setattr__(self, "schedule", Schedule(self.schedule))

    def density(self) -> float:
        if isinstance(self.topology, OneCommunity):
            return self.topology.p
        return mean_density(self.topology.p_intra, self.topology.p_inter)


@dataclass(frozen=True)
class RunRecord:
    """Summary of one replication."""

    replication_index: int
    graph_seed: int
    steps: int
    switches: int
    converged: bool
    currency_count: int
    component_count: int
    single_currency: bool
    final_social_utility: int
    winner_origin_weight: int | None  # only for single-currency distinct starts
    mean_population_weight: float


@dataclass(frozen=True)
class SummaryPoint:
    """Aggregates of one sweep point, over converged runs only."""

    param: str
    value: float
    replications: int
    converged: int
    frac_single: float
    mean_currencies: float
    mean_components: float
    mean_utility: float
    mean_winner_weight: float  # nan when no single-currency distinct-start run
    mean_pop_weight: float
    mean_currencies_per_component: float


@dataclass(frozen=True)
class SweepSummary:
    param: str
    points: tuple[SummaryPoint, ...]


def _build_weights(config: ExperimentConfig, g, weight_seed: int) -> list[int]:
    if config.weighting == WEIGHTING_DEGREE:
        return g.degrees()
    if config.weighting == WEIGHTING_POISSON:
        mean = config.poisson_mean
        if mean is None:
            mean = config.density() * (config.n - 1)
        draws = rng.stream(weight_seed).poisson(mean, size=config.n)
        return [int(w) for w in draws]
    return [1] * config.n


def run_one_full(config: ExperimentConfig, replication_index: int) -> tuple[RunRecord, RunResult]:
    """Execute one replication and return both the record and the raw trajectory."""
    seeds = rng.run_seeds(config.master_seed, config.point_index, replication_index)
    if isinstance(config.topology, OneCommunity):
        g = gen_er(config.n, config.topology.p, seeds[rng.GRAPH])
    else:
        g = gen_two_community(config.n, config.topology.p_intra, config.topology.p_inter, seeds[rng.GRAPH])

    if config.initial == DISTINCT:
        st = initial_state_distinct(g)
    else:
        st = initial_state_unified_communities(g)
    st = CurrencyState(st.currencies, _build_weights(config, g, seeds[rng.WEIGHTS]))

    result = run_to_equilibrium(
        g,
        st,
        config.schedule,
        select_rng=rng.stream(seeds[rng.SELECTION]),
        tie_rng=rng.stream(seeds[rng.TIEBREAK]),
        max_steps=config.max_steps if config.max_steps is not None else default_max_steps(config.n),
    )

    currencies = set(st.currencies)
    _, component_count = connected_components(g)
    single = len(currencies) == 1

    if result.converged:
        # Soundness guards, cheap relative to the run itself.
        if would_switch_agents(g, st):
            raise RuntimeError("converged run failed the equilibrium rescan")
        if config.initial == DISTINCT and len(currencies) < component_count:
            raise RuntimeError("fewer currencies than components on a distinct-start run")

    winner_weight = None
    if single and config.initial == DISTINCT:
        # With a distinct start the currency id is its originator's agent id.
        winner_weight = st.weights[next(iter(currencies))]

    record = RunRecord(
        replication_index=replication_index,
        graph_seed=seeds[rng.GRAPH],
        steps=result.steps_executed,
        switches=result.switches,
        converged=result.converged,
        currency_count=len(currencies),
        component_count=component_count,
        single_currency=single,
        final_social_utility=result.utility_trace[-1],
        winner_origin_weight=winner_weight,
        mean_population_weight=sum(st.weights) / config.n,
    )
    return record, result


def run_one(config: ExperimentConfig, replication_index: int) -> RunRecord:
    """One replication, deterministic given ``(config, replication_index)``."""
    return run_one_full(config, replication_index)[0]


def _run_range(config: ExperimentConfig, lo: int, hi: int) -> list[RunRecord]:
    return [run_one(config, r) for r in range(lo, hi)]


def _default_point_label(config: ExperimentConfig) -> tuple[str, float]:
    if isinstance(config.topology, OneCommunity):
        return "density_p", config.topology.p
    return "p_inter", config.topology.p_inter


def aggregate(records: Sequence[RunRecord], param: str, value: float) -> SummaryPoint:
    """Aggregate records into one sweep point; non-converged runs are only counted."""
    records = sorted(records, key=lambda r: r.replication_index)
    done = [r for r in records if r.converged]
    winner_weights = [r.winner_origin_weight for r in done if r.winner_origin_weight is not None]

    def mean(xs) -> float:
        xs = list(xs)
        return sum(xs) / len(xs) if xs else math.nan

    return SummaryPoint(
        param=param,
        value=value,
        replications=len(records),
        converged=len(done),
        frac_single=mean(1.0 if r.single_currency else 0.0 for r in done),
        mean_currencies=mean(r.currency_count for r in done),
        mean_components=mean(r.component_count for r in done),
        mean_utility=mean(r.final_social_utility for r in done),
        mean_winner_weight=mean(winner_weights),
        mean_pop_weight=mean(r.mean_population_weight for r in done),
        mean_currencies_per_component=mean(r.currency_count / r.component_count for r in done),
    )


def run_batch(config: ExperimentConfig, workers: int = 1) -> tuple[list[RunRecord], SummaryPoint]:
    """Execute all replications of one point; aggregation is order-independent."""
    reps = config.replications
    if workers > 1 and reps > 1:
        chunk = max(1, math.ceil(reps / (workers * 4)))
        bounds = [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_range, [config] * len(bounds), *zip(*bounds))
        records = [r for part in parts for r in part]
        records.sort(key=lambda r: r.replication_index)
    else:
        records = _run_range(config, 0, reps)
    param, value = _default_point_label(config)
    return records, aggregate(records, param, value)


def sweep(
    base_config: ExperimentConfig,
    parameter: str,
    values: Sequence[float],
    workers: int = 1,
) -> SweepSummary:
    """One run_batch per grid value, with seeds derived per point index."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    if any(not (0.0 <= v <= 1.0) for v in values):
        raise ValueError("sweep values must lie in [0,1]")
    if values != sorted(values):
        raise ValueError("sweep values must be sorted ascending")

    points = []
    for idx, value in enumerate(values):
        if parameter == "density_p":
            if not isinstance(base_config.topology, OneCommunity):
                raise ValueError("density_p sweeps need a one_community topology")
            topology: Topology = OneCommunity(value)
        elif parameter == "p_inter":
            if not isinstance(base_config.topology, TwoCommunity):
                raise ValueError("p_inter sweeps need a two_community topology")
            topology = TwoCommunity(base_config.topology.p_intra, value)
        else:
            raise ValueError(f"unknown sweep parameter {parameter!r}")
        config = replace(base_config, topology=topology, point_index=idx)
        _, point = run_batch(config, workers=workers)
        points.append(replace(point, param=parameter, value=value))
    return SweepSummary(param=parameter, points=tuple(points))


def originator_statistics(records: Sequence[RunRecord]) -> tuple[float, float] | None:
    """(mean winner-origin weight, mean population weight) over converged
    single-currency runs; None when no run ended on a single currency."""
    hits = [r for r in records if r.converged and r.single_currency and r.winner_origin_weight is not None]
    if not hits:
        return None
    mean_winner = sum(r.winner_origin_weight for r in hits) / len(hits)
    mean_pop = sum(r.mean_population_weight for r in hits) / len(hits)
    return mean_winner, mean_pop


def write_summary_csv(summary: SweepSummary, f: IO[str]) -> None:
    f.write(CSV_HEADER + "\n")
    for pt in summary.points:
        f.write(
            f"{pt.param},{pt.value!r},{pt.replications},{pt.converged},"
            f"{pt.frac_single!r},{pt.mean_currencies!r},{pt.mean_components!r},"
            f"{pt.mean_utility!r},{pt.mean_winner_weight!r},{pt.mean_pop_weight!r}\n"
        )
