"""Tail bounds for fragmentation persistence in large two-community graphs.

For one agent of a pre-unified two-community graph, let X_a count its
own-community neighbors and X_r its cross-community neighbors.  A
single-currency cascade can only start at an agent with X_a <= X_r.  This
module evaluates that flip probability exactly, the geometric decay rates
of its binomial-tail bound, and the union bound
``n * (rho_a**n + rho_r**n)`` on the probability that any agent can flip,
which vanishes as n grows whenever p_inter < p_intra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .rng import stream

PAPER_N = "paper_n"  # both link counts modeled as Binomial(n, .)
EXACT_HALVES = "exact_halves"  # trials as realized by the graph: n/2 - 1 intra, n/2 inter

_CONVENTIONS = (PAPER_N, EXACT_HALVES)


@dataclass(frozen=True)
class BoundParams:
    """Inputs of the bound computation for a community-size parameter n."""

    n: int
    p_intra: float
    p_inter: float
    trials_convention: str = PAPER_N

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        for name in ("p_intra", "p_inter"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name} must lie in [0,1], got {p}")
        if self.trials_convention not in _CONVENTIONS:
            raise ValueError(f"trials_convention must be one of {_CONVENTIONS}")

    @property
    def p_av(self) -> float:
        return (self.p_intra + self.p_inter) / 2.0

    @property
    def k_n(self) -> int:
        # Floor of p_av * n against the decimal-intended parameter values
        # (via shortest round-trip decimals), immune to binary slop in either
        # direction: a threshold one too low breaks the upper-tail bound.
        p_sum = Fraction(repr(self.p_intra)) + Fraction(repr(self.p_inter))
        return math.floor(p_sum / 2 * self.n)

    def trials(self) -> tuple[int, int]:
        """(intra, inter) trial counts for (X_a, X_r) under the active convention."""
        if self.trials_convention == PAPER_N:
            return self.n, self.n
        # An agent of the (larger) first community: ceil(n/2)-1 potential
        # own-community partners and floor(n/2) cross-community ones.
        return (self.n + 1) // 2 - 1, self.n // 2


@dataclass(frozen=True)
class BoundReport:
    n: int
    p_intra: float
    p_inter: float
    p_av: float
    k_n: int
    flip_prob_exact: float
    rho_a: float
    rho_r: float
    geometric_bound: float
    union_bound: float


def binom_pmf(n: int, p: float, k: int) -> float:
    """Binomial point mass C(n,k) p^k (1-p)^(n-k), evaluated in log space."""
    if not (0 <= k <= n):
        raise ValueError(f"k must lie in [0,{n}], got {k}")
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0,1], got {p}")
    if p == 0.0:
        return 1.0 if k == 0 else 0.0
    if p == 1.0:
        return 1.0 if k == n else 0.0
    log_comb = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.exp(log_comb + k * math.log(p) + (n - k) * math.log1p(-p))


def binom_cdf(n: int, p: float, k: int) -> float:
    """P(X <= k) for X ~ Binomial(n, p), with clamped semantics outside [0, n]."""
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    return min(math.fsum(binom_pmf(n, p, j) for j in range(k + 1)), 1.0)


def flip_probability_exact(params: BoundParams) -> float:
    """P(X_a <= X_r) = sum_k P(X_r = k) P(X_a <= k), to float precision."""
    trials_a, trials_r = params.trials()
    pmf_a = [binom_pmf(trials_a, params.p_intra, j) for j in range(trials_a + 1)]
    cdf_a = 0.0
    terms = []
    for k in range(trials_r + 1):
        if k <= trials_a:
            cdf_a += pmf_a[k]
        terms.append(binom_pmf(trials_r, params.p_inter, k) * min(cdf_a, 1.0))
    return min(math.fsum(terms), 1.0)


def geometric_rates(p_intra: float, p_inter: float) -> tuple[float, float]:
    """Decay rates (rho_a, rho_r) of the two binomial tails at threshold floor(p_av n).

    rho_a = ((1-p_intra)/(1-p_av))^(1-p_av) bounds the lower tail of X_a,
    rho_r = (p_inter/p_av)^p_av the upper tail of X_r; both are < 1 exactly
    when 0 < p_inter < p_intra < 1, which is required here.
    """
    if not (0.0 < p_inter < p_intra < 1.0):
        raise ValueError(
            f"geometric rates need 0 < p_inter < p_intra < 1, got p_intra={p_intra}, p_inter={p_inter}"
        )
    p_av = (p_intra + p_inter) / 2.0
    rho_a = ((1.0 - p_intra) / (1.0 - p_av)) ** (1.0 - p_av)
    rho_r = (p_inter / p_av) ** p_av
    return rho_a, rho_r


def threshold_tails(params: BoundParams) -> tuple[float, float]:
    """The two tail masses split at k_n: (phi_a(k_n), 1 - phi_r(k_n)).

    Their sum dominates the flip probability; under the paper_n convention
    each term is in turn dominated by the matching geometric rate to the
    n-th power.
    """
    trials_a, trials_r = params.trials()
    k = params.k_n
    return binom_cdf(trials_a, params.p_intra, k), 1.0 - binom_cdf(trials_r, params.p_inter, k)


def union_bound(params: BoundParams) -> BoundReport:
    """Assemble the full report: exact flip probability, rates, and n (rho_a^n + rho_r^n)."""
    rho_a, rho_r = geometric_rates(params.p_intra, params.p_inter)
    geometric = rho_a**params.n + rho_r**params.n
    return BoundReport(
        n=params.n,
        p_intra=params.p_intra,
        p_inter=params.p_inter,
        p_av=params.p_av,
        k_n=params.k_n,
        flip_prob_exact=flip_probability_exact(params),
        rho_a=rho_a,
        rho_r=rho_r,
        geometric_bound=geometric,
        union_bound=params.n * geometric,
    )


def flip_probability_mc(
    n: int,
    p_intra: float,
    p_inter: float,
    samples: int,
    seed: int,
    trials_convention: str = PAPER_N,
) -> tuple[float, float]:
    """Monte Carlo estimate of P(X_a <= X_r) from direct binomial pairs.

    Returns ``(estimate, standard_error)`` with the binomial standard
    error sqrt(p(1-p)/samples) of the estimate.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    params = BoundParams(n, p_intra, p_inter, trials_convention)
    trials_a, trials_r = params.trials()
    rng = stream(seed)
    xa = rng.binomial(trials_a, p_intra, size=samples)
    xr = rng.binomial(trials_r, p_inter, size=samples)
    estimate = float(np.mean(xa <= xr))
    return estimate, math.sqrt(estimate * (1.0 - estimate) / samples)
