"""Currency-adoption dynamics: agent utilities, the mimetic update rule,
update schedules, and equilibrium detection.

Each agent holds one currency and pays, per discordant neighbor j, a
trading cost equal to that neighbor's weight (1 everywhere in the
unweighted model).  When updated, an agent adopts the currency with the
maximal weight-tally among its neighbors, keeping its own on ties that
include it and breaking other ties uniformly at random.  With unit
weights every committed switch strictly increases social utility, so
sequential runs terminate; weighted and synchronous variants are capped
by ``max_steps`` and report honestly via ``converged``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import IO

import numpy as np


class Schedule(enum.Enum):
    """Order in which agents revise their currency choice."""

    RANDOM_SEQUENTIAL = "random_sequential"
    FIXED_SEQUENTIAL = "fixed_sequential"
    SYNCHRONOUS = "synchronous"

    @property
    def is_sequential(self) -> bool:
        return self is not Schedule.SYNCHRONOUS


@dataclass
class CurrencyState:
    """Per-agent currency assignment plus per-agent integer weights."""

    currencies: list[int]
    weights: list[int]

    def __post_init__(self):
        if len(self.currencies) != len(self.weights):
            raise ValueError("currencies and weights must have equal length")
        if any(w < 0 or w != int(w) for w in self.weights):
            raise ValueError("weights must be nonnegative integers")

    @property
    def n(self) -> int:
        return len(self.currencies)

    def copy(self) -> "CurrencyState":
        return CurrencyState(list(self.currencies), list(self.weights))

    def currency_count(self) -> int:
        return len(set(self.currencies))


@dataclass(frozen=True)
class SwitchEvent:
    """One committed currency change.  ``delta`` is the social-utility
    change of the switch in isolation; None for synchronous commits, where
    individual deltas are not additive."""

    agent: int
    old: int
    new: int
    delta: int | None


@dataclass(frozen=True)
class StepResult:
    events: tuple[SwitchEvent, ...]
    cursor: int


@dataclass
class RunResult:
    """Trajectory summary of one dynamics run.

    ``utility_trace`` holds the initial social utility followed by the
    value after every switch (after every committed sweep under the
    synchronous schedule); ``trace_steps`` gives the elementary-update
    index of each entry.  ``steps_executed`` counts elementary agent
    updates; a synchronous sweep counts n of them.
    """

    steps_executed: int
    switches: int
    utility_trace: list[int]
    trace_steps: list[int]
    final_state: CurrencyState
    converged: bool
    cycle_detected: bool = False


def default_max_steps(n: int) -> int:
    """Default elementary-update budget, 100 n^2: far above observed convergence times."""
    return 100 * n * n


def initial_state_distinct(g) -> CurrencyState:
    """Every agent starts with its own currency; unit weights."""
    return CurrencyState(list(range(g.n)), [1] * g.n)


def initial_state_unified_communities(g) -> CurrencyState:
    """Each community starts unified on one currency (its lowest agent index); unit weights."""
    if g.community is None:
        raise ValueError("unified-communities start requires a graph with community labels")
    anchor = {c: min(i for i in range(g.n) if g.community[i] == c) for c in (0, 1)}
    return CurrencyState([anchor[g.community[i]] for i in range(g.n)], [1] * g.n)


def neighbor_tally(g, st: CurrencyState, i: int) -> dict[int, int]:
    """Total neighbor weight per currency around agent i; empty for isolated agents."""
    cur = st.currencies
    wts = st.weights
    tally: dict[int, int] = {}
    for j in g.adjacency[i]:
        c = cur[j]
        tally[c] = tally.get(c, 0) + wts[j]
    return tally


def agent_utility(g, st: CurrencyState, i: int) -> int:
    """Opposite of agent i's total trading cost: -sum of discordant neighbors' weights."""
    cur = st.currencies
    wts = st.weights
    si = cur[i]
    return -sum(wts[j] for j in g.adjacency[i] if cur[j] != si)


def social_utility(g, st: CurrencyState) -> int:
    """Sum of all agents' utilities: -(w_i + w_j) summed over discordant edges."""
    if g.edge_count == 0:
        return 0
    cur = np.asarray(st.currencies)
    wts = np.asarray(st.weights)
    ei, ej = g.edges_i, g.edges_j
    discord = cur[ei] != cur[ej]
    return -int(((wts[ei] + wts[ej]) * discord).sum())


def switch_utility_delta(g, st: CurrencyState, i: int, new_currency: int) -> int:
    """Exact social-utility change if agent i switched to ``new_currency``, computed locally."""
    cur = st.currencies
    wts = st.weights
    si = cur[i]
    if new_currency == si:
        raise ValueError("new_currency must differ from the agent's current currency")
    wi = wts[i]
    delta = 0
    for j in g.adjacency[i]:
        cj = cur[j]
        if cj == new_currency:
            delta += wts[j] + wi
        elif cj == si:
            delta -= wts[j] + wi
    return delta


def _pick(tally: dict[int, int], current: int, tie_rng: np.random.Generator) -> int | None:
    """Currency the mimetic rule adopts, or None to keep the current one.

    Keeps the current currency whenever it attains the maximal tally
    (including the isolated-agent empty tally); otherwise picks uniformly
    among the argmax set, consuming tie randomness only on actual ties.
    """
    if not tally:
        return None
    best = max(tally.values())
    if tally.get(current, 0) == best:
        return None
    top = [c for c, v in tally.items() if v == best]
    if len(top) == 1:
        return top[0]
    top.sort()
    return top[int(tie_rng.integers(len(top)))]


def choose_currency(g, st: CurrencyState, i: int, tie_rng: np.random.Generator) -> tuple[int, bool]:
    """Apply the mimetic rule for agent i against the current state.

    Returns ``(currency, switched)`` without mutating the state.
    """
    new = _pick(neighbor_tally(g, st, i), st.currencies[i], tie_rng)
    if new is None:
        return st.currencies[i], False
    return new, True


def is_equilibrium(g, st: CurrencyState) -> bool:
    """True iff every non-isolated agent's currency attains its neighborhood's maximal tally."""
    cur = st.currencies
    wts = st.weights
    for i in range(g.n):
        row = g.adjacency[i]
        if not row:
            continue
        tally: dict[int, int] = {}
        for j in row:
            c = cur[j]
            tally[c] = tally.get(c, 0) + wts[j]
        if tally.get(cur[i], 0) != max(tally.values()):
            return False
    return True


def would_switch_agents(g, st: CurrencyState) -> list[int]:
    """Agents for which :func:`choose_currency` would switch, via a full rescan."""
    probe = np.random.default_rng(0)
    return [i for i in range(g.n) if choose_currency(g, st, i, probe)[1]]


def _update_agent(g, st: CurrencyState, i: int, tie_rng: np.random.Generator) -> SwitchEvent | None:
    tally = neighbor_tally(g, st, i)
    old = st.currencies[i]
    new = _pick(tally, old, tie_rng)
    if new is None:
        return None
    delta = switch_utility_delta(g, st, i, new)
    st.currencies[i] = new
    return SwitchEvent(i, old, new, delta)


def step(
    g,
    st: CurrencyState,
    schedule: Schedule,
    *,
    select_rng: np.random.Generator | None = None,
    tie_rng: np.random.Generator,
    cursor: int = 0,
) -> StepResult:
    """Advance the state by one schedule step, mutating it in place.

    random_sequential updates one uniformly chosen agent; fixed_sequential
    updates the agent at ``cursor`` (cycling through 0..n-1); synchronous
    computes every agent's choice against the pre-step state and commits
    all changes at once.
    """
    schedule = Schedule(schedule)
    if schedule is Schedule.RANDOM_SEQUENTIAL:
        if select_rng is None:
            raise ValueError("random_sequential steps need a selection stream")
        i = int(select_rng.integers(g.n))
        ev = _update_agent(g, st, i, tie_rng)
        return StepResult(() if ev is None else (ev,), cursor)
    if schedule is Schedule.FIXED_SEQUENTIAL:
        ev = _update_agent(g, st, cursor, tie_rng)
        return StepResult(() if ev is None else (ev,), (cursor + 1) % g.n)
    # Synchronous: decide everything against the pre-step state, then commit.
    cur = st.currencies
    decisions = []
    for i in range(g.n):
        new = _pick(neighbor_tally(g, st, i), cur[i], tie_rng)
        if new is not None:
            decisions.append((i, cur[i], new))
    for i, _, new in decisions:
        cur[i] = new
    return StepResult(tuple(SwitchEvent(i, old, new, None) for i, old, new in decisions), cursor)


def run_to_equilibrium(
    g,
    st: CurrencyState,
    schedule: Schedule,
    *,
    select_rng: np.random.Generator | None = None,
    tie_rng: np.random.Generator,
    max_steps: int | None = None,
) -> RunResult:
    """Iterate the dynamics until equilibrium, a detected synchronous cycle,
    or exhaustion of ``max_steps``, advancing ``st`` in place.

    Sequential schedules run the exact equilibrium test (a full scan) at
    the start and after every n elementary updates; no "quiet for k steps"
    heuristic is involved.  The synchronous schedule stops when a sweep
    commits no change (which is the equilibrium condition) and flags
    period-2 cycles by comparing each swept state against the previous two.
    """
    schedule = Schedule(schedule)
    if max_steps is None:
        max_steps = default_max_steps(g.n)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if schedule is Schedule.RANDOM_SEQUENTIAL and select_rng is None:
        raise ValueError("random_sequential runs need a selection stream")

    n = g.n
    cur = st.currencies
    wts = st.weights
    adjacency = g.adjacency
    utility = social_utility(g, st)
    trace = [utility]
    trace_steps = [0]
    steps = 0
    switches = 0
    converged = False
    cycle_detected = False

    if schedule.is_sequential:
        if is_equilibrium(g, st):
            converged = True
        cursor = 0
        while not converged and steps < max_steps:
            block = min(n, max_steps - steps)
            if schedule is Schedule.RANDOM_SEQUENTIAL:
                agents = select_rng.integers(0, n, size=block).tolist()
            else:
                agents = [(cursor + k) % n for k in range(block)]
                cursor = (cursor + block) % n
            for i in agents:
                steps += 1
                si = cur[i]
                tally: dict[int, int] = {}
                for j in adjacency[i]:
                    c = cur[j]
                    tally[c] = tally.get(c, 0) + wts[j]
                new = _pick(tally, si, tie_rng)
                if new is None:
                    continue
                utility += switch_utility_delta(g, st, i, new)
                cur[i] = new
                switches += 1
                trace.append(utility)
                trace_steps.append(steps)
            if is_equilibrium(g, st):
                converged = True
    else:
        prev1 = tuple(cur)
        prev2 = None
        while steps < max_steps:
            decisions = []
            for i in range(n):
                si = cur[i]
                tally = {}
                for j in adjacency[i]:
                    c = cur[j]
                    tally[c] = tally.get(c, 0) + wts[j]
                new = _pick(tally, si, tie_rng)
                if new is not None:
                    decisions.append((i, new))
            if not decisions:
                # The scan itself is the exact equilibrium test.
                converged = True
                break
            for i, new in decisions:
                cur[i] = new
            steps += n
            switches += len(decisions)
            utility = social_utility(g, st)
            trace.append(utility)
            trace_steps.append(steps)
            state = tuple(cur)
            if state == prev2:
                cycle_detected = True
                break
            prev2, prev1 = prev1, state
        else:
            # Budget exhausted right after a committed sweep.
            converged = is_equilibrium(g, st)

    return RunResult(
        steps_executed=steps,
        switches=switches,
        utility_trace=trace,
        trace_steps=trace_steps,
        final_state=st,
        converged=converged,
        cycle_detected=cycle_detected,
    )


def write_state(st: CurrencyState, f: IO[str]) -> None:
    """Snapshot format: one `currencies ...` line, one `weights ...` line."""
    f.write("currencies " + " ".join(str(c) for c in st.currencies) + "\n")
    f.write("weights " + " ".join(str(w) for w in st.weights) + "\n")


def read_state(f: IO[str]) -> CurrencyState:
    fields = {}
    for line in f:
        parts = line.split()
        if parts:
            fields[parts[0]] = [int(x) for x in parts[1:]]
    if "currencies" not in fields or "weights" not in fields:
        raise ValueError("state snapshot needs 'currencies' and 'weights' lines")
    return CurrencyState(fields["currencies"], fields["weights"])
