import math
from fractions import Fraction

import pytest

from currencysim.theory import (
    EXACT_HALVES,
    PAPER_N,
    BoundParams,
    binom_cdf,
    binom_pmf,
    flip_probability_exact,
    flip_probability_mc,
    geometric_rates,
    threshold_tails,
    union_bound,
)

# Exact rational oracles (binary-float inputs converted exactly).


def pmf_fraction(n: int, p: Fraction, k: int) -> Fraction:
    return Fraction(math.comb(n, k)) * p**k * (1 - p) ** (n - k)


def flip_fraction(trials_a: int, trials_r: int, p_intra: float, p_inter: float) -> Fraction:
    pa, pe = Fraction(p_intra), Fraction(p_inter)
    total = Fraction(0)
    for k in range(trials_r + 1):
        cdf_a = sum(pmf_fraction(trials_a, pa, j) for j in range(min(k, trials_a) + 1))
        total += pmf_fraction(trials_r, pe, k) * cdf_a
    return total


# --- binomial pmf / cdf ---


def test_pmf_degenerate_probabilities():
    assert binom_pmf(5, 0.0, 0) == 1.0
    assert binom_pmf(5, 0.0, 3) == 0.0
    assert binom_pmf(5, 1.0, 5) == 1.0
    assert binom_pmf(5, 1.0, 2) == 0.0


def test_pmf_small_case():
    assert binom_pmf(4, 0.5, 2) == pytest.approx(6 / 16, abs=1e-15)


def test_pmf_rejects_out_of_range():
    with pytest.raises(ValueError):
        binom_pmf(4, 0.5, 5)
    with pytest.raises(ValueError):
        binom_pmf(4, 0.5, -1)
    with pytest.raises(ValueError):
        binom_pmf(4, 1.5, 2)


@pytest.mark.parametrize("n", [1, 7, 19, 30])
@pytest.mark.parametrize("p", [0.05, 0.3, 0.5, 0.97])
def test_pmf_matches_exact_rationals(n, p):
    pf = Fraction(p)
    for k in range(n + 1):
        exact = float(pmf_fraction(n, pf, k))
        assert binom_pmf(n, p, k) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("n,p", [(3, 0.2), (40, 0.5), (200, 0.03), (1000, 0.8)])
def test_pmf_normalization(n, p):
    assert math.fsum(binom_pmf(n, p, k) for k in range(n + 1)) == pytest.approx(1.0, abs=1e-12)


def test_pmf_stable_at_large_n():
    # Peak of Binomial(1e5, 0.3) ~ N(30000, 21000): density 1/sqrt(2*pi*21000).
    peak = binom_pmf(100_000, 0.3, 30_000)
    assert peak == pytest.approx(1 / math.sqrt(2 * math.pi * 21_000), rel=1e-3)


def test_cdf_clamped_semantics():
    assert binom_cdf(4, 0.3, 4) == 1.0
    assert binom_cdf(4, 0.3, 9) == 1.0
    assert binom_cdf(4, 0.3, -1) == 0.0
    assert binom_cdf(4, 0.5, 2) == pytest.approx(11 / 16, abs=1e-14)


def test_cdf_monotone_in_k_and_p():
    # Tolerance covers the log-space pmf evaluation noise near cdf = 1.
    n = 25
    values = [binom_cdf(n, 0.37, k) for k in range(-1, n + 1)]
    assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))
    for k in (0, 5, 12, 24):
        by_p = [binom_cdf(n, p, k) for p in (0.05, 0.2, 0.5, 0.8, 0.95)]
        assert all(a >= b - 1e-12 for a, b in zip(by_p, by_p[1:]))


# --- exact flip probability ---


def test_bound_params_validation():
    with pytest.raises(ValueError):
        BoundParams(1, 0.3, 0.1)
    with pytest.raises(ValueError):
        BoundParams(10, 1.3, 0.1)
    with pytest.raises(ValueError):
        BoundParams(10, 0.3, 0.1, "folk")


def test_k_n_is_exact_floor():
    assert BoundParams(100, 0.3, 0.1).k_n == 20
    assert BoundParams(10, 0.4, 0.2).k_n == 3
    assert BoundParams(7, 0.3, 0.1).k_n == 1


def test_trials_conventions():
    assert BoundParams(100, 0.3, 0.1, PAPER_N).trials() == (100, 100)
    assert BoundParams(100, 0.3, 0.1, EXACT_HALVES).trials() == (49, 50)
    assert BoundParams(11, 0.3, 0.1, EXACT_HALVES).trials() == (5, 5)


@pytest.mark.parametrize("convention", [PAPER_N, EXACT_HALVES])
def test_flip_reduces_when_p_inter_zero(convention):
    params = BoundParams(10, 0.3, 0.0, convention)
    trials_a = params.trials()[0]
    assert flip_probability_exact(params) == pytest.approx((1 - 0.3) ** trials_a, abs=1e-14)


def test_flip_symmetry_when_rates_equal():
    # Identically distributed independent counts: P(A <= R) = (1 + P(A = R)) / 2.
    for n, p in [(10, 0.3), (25, 0.6)]:
        params = BoundParams(n, p, p, PAPER_N)
        p_eq = math.fsum(binom_pmf(n, p, k) ** 2 for k in range(n + 1))
        assert flip_probability_exact(params) == pytest.approx((1 + p_eq) / 2, abs=1e-12)


@pytest.mark.parametrize("convention", [PAPER_N, EXACT_HALVES])
@pytest.mark.parametrize("n", [2, 5, 9, 12])
@pytest.mark.parametrize("p_intra,p_inter", [(0.3, 0.1), (0.5, 0.45), (0.2, 0.6)])
def test_flip_matches_exhaustive_enumeration(convention, n, p_intra, p_inter):
    params = BoundParams(n, p_intra, p_inter, convention)
    oracle = float(flip_fraction(*params.trials(), p_intra, p_inter))
    assert flip_probability_exact(params) == pytest.approx(oracle, abs=1e-12)


# --- geometric rates and bounds ---


def test_geometric_rates_frozen_values():
    # High-precision reference: ((0.7/0.8))**0.8 and (0.1/0.2)**0.2.
    rho_a, rho_r = geometric_rates(0.3, 0.1)
    assert rho_a == pytest.approx(0.8986828262031827, rel=1e-14)
    assert rho_r == pytest.approx(0.8705505632961241, rel=1e-14)
    assert rho_a < 1 and rho_r < 1


def test_geometric_rates_rejects_invalid_order():
    for pair in [(0.3, 0.3), (0.1, 0.3), (0.3, 0.0), (1.0, 0.3)]:
        with pytest.raises(ValueError):
            geometric_rates(*pair)


def test_geometric_rates_approach_one_at_equality():
    rho_a, rho_r = geometric_rates(0.3, 0.3 - 1e-9)
    assert rho_a > 1 - 1e-6 and rho_r > 1 - 1e-6


def test_rates_decrease_as_gap_widens():
    center = 0.2
    gaps = [0.02, 0.05, 0.1, 0.15, 0.19]
    rates = [geometric_rates(center + g, center - g) for g in gaps]
    for (a1, r1), (a2, r2) in zip(rates, rates[1:]):
        assert a2 < a1 and r2 < r1


def test_union_bound_frozen_point():
    # Independently recomputed with 50-digit arithmetic.
    rep = union_bound(BoundParams(100, 0.3, 0.1))
    assert rep.union_bound == pytest.approx(0.0023896359286273093, rel=1e-12)
    assert rep.geometric_bound == pytest.approx(2.3896359286273093e-05, rel=1e-12)
    assert rep.k_n == 20 and rep.p_av == pytest.approx(0.2)


def test_union_bound_halves_shrink():
    for n in (10, 20, 50, 100, 250):
        a = union_bound(BoundParams(n, 0.3, 0.1)).union_bound
        b = union_bound(BoundParams(2 * n, 0.3, 0.1)).union_bound
        assert b < a


@pytest.mark.parametrize("p_intra,p_inter", [(0.3, 0.1), (0.3, 0.2), (0.5, 0.1)])
@pytest.mark.parametrize("n", [10, 50, 200])
def test_bound_chain(p_intra, p_inter, n):
    params = BoundParams(n, p_intra, p_inter)
    flip = flip_probability_exact(params)
    lower_tail, upper_tail = threshold_tails(params)
    rho_a, rho_r = geometric_rates(p_intra, p_inter)
    slack = 1e-12
    assert flip <= lower_tail + upper_tail + slack
    assert lower_tail <= rho_a**n + slack
    assert upper_tail <= rho_r**n + slack


# --- Monte Carlo cross-check ---


def test_mc_matches_analytic_reduction():
    exact = (1 - 0.4) ** 30
    est, se = flip_probability_mc(30, 0.4, 0.0, samples=100_000, seed=5)
    se_exact = math.sqrt(exact * (1 - exact) / 100_000)
    assert abs(est - exact) <= 4 * se_exact
    assert se == pytest.approx(math.sqrt(est * (1 - est) / 100_000))


def test_mc_single_sample_is_indicator():
    est, se = flip_probability_mc(20, 0.3, 0.1, samples=1, seed=0)
    assert est in (0.0, 1.0) and se == 0.0


def test_mc_respects_trials_convention():
    est, _ = flip_probability_mc(30, 0.4, 0.0, samples=50_000, seed=9, trials_convention=EXACT_HALVES)
    exact = (1 - 0.4) ** 14
    assert abs(est - exact) <= 4 * math.sqrt(exact * (1 - exact) / 50_000)


def test_mc_rejects_no_samples():
    with pytest.raises(ValueError):
        flip_probability_mc(10, 0.3, 0.1, samples=0, seed=0)
