"""Currency competition on random graphs: dynamics, experiments, tail bounds."""

from .dynamics import (
    CurrencyState,
    RunResult,
    Schedule,
    agent_utility,
    choose_currency,
    initial_state_distinct,
    initial_state_unified_communities,
    is_equilibrium,
    neighbor_tally,
    run_to_equilibrium,
    social_utility,
    step,
    switch_utility_delta,
)
from .experiments import (
    ExperimentConfig,
    OneCommunity,
    RunRecord,
    SweepSummary,
    TwoCommunity,
    originator_statistics,
    run_batch,
    run_one,
    sweep,
)
from .graph import (
    Graph,
    connected_components,
    from_edges,
    gen_er,
    gen_two_community,
    mean_density,
)
from .theory import (
    BoundParams,
    BoundReport,
    binom_cdf,
    binom_pmf,
    flip_probability_exact,
    flip_probability_mc,
    geometric_rates,
    union_bound,
)

__version__ = "0.1.0"
