import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from currencysim.graph import (
    connected_components,
    from_edges,
    gen_er,
    gen_two_community,
    mean_density,
    read_edge_list,
    write_edge_list,
)


def check_invariants(g):
    seen = set()
    for i, row in enumerate(g.adjacency):
        assert list(row) == sorted(set(row)), "neighbor lists sorted and duplicate-free"
        assert i not in row, "no self-loops"
        for j in row:
            assert i in g.adjacency[j], "symmetry"
            seen.add((min(i, j), max(i, j)))
    assert g.edge_count == sum(len(row) for row in g.adjacency) / 2
    assert set(g.edges) == seen


def test_gen_er_p_zero_empty():
    assert gen_er(4, 0.0, 123).edge_count == 0


def test_gen_er_p_one_complete():
    g = gen_er(4, 1.0, 99)
    assert g.edge_count == 6
    assert g.adjacency[0] == (1, 2, 3)


@pytest.mark.parametrize("fn,args", [(gen_er, (0, 0.5)), (gen_er, (10, -0.1)), (gen_er, (10, 1.5))])
def test_gen_er_rejects_bad_inputs(fn, args):
    with pytest.raises(ValueError):
        fn(*args, 1)


def test_gen_two_community_rejects_bad_inputs():
    with pytest.raises(ValueError):
        gen_two_community(1, 0.5, 0.5, 0)
    with pytest.raises(ValueError):
        gen_two_community(10, 1.2, 0.5, 0)
    with pytest.raises(ValueError):
        gen_two_community(10, 0.5, -0.5, 0)


@given(st.integers(1, 40), st.floats(0, 1), st.integers(0, 2**63 - 1))
@settings(max_examples=60, deadline=None)
def test_gen_er_invariants(n, p, seed):
    g = gen_er(n, p, seed)
    check_invariants(g)
    assert g.community is None


@given(st.integers(2, 41), st.floats(0, 1), st.floats(0, 1), st.integers(0, 2**63 - 1))
@settings(max_examples=60, deadline=None)
def test_gen_two_community_invariants(n, p_intra, p_inter, seed):
    g = gen_two_community(n, p_intra, p_inter, seed)
    check_invariants(g)
    assert g.community.count(0) == (n + 1) // 2
    assert g.community.count(1) == n // 2
    assert g.community == tuple(sorted(g.community)), "labels assigned by index block"


def test_generation_deterministic():
    assert gen_er(60, 0.1, 777) == gen_er(60, 0.1, 777)
    assert gen_two_community(31, 0.4, 0.05, 5) == gen_two_community(31, 0.4, 0.05, 5)
    assert gen_er(60, 0.1, 777) != gen_er(60, 0.1, 778)


def test_gen_er_mean_edge_count():
    # C(100,2) Bernoulli(0.05) trials: mean 247.5, variance 4950*0.05*0.95.
    runs = 1000
    counts = [gen_er(100, 0.05, seed).edge_count for seed in range(runs)]
    sigma = math.sqrt(4950 * 0.05 * 0.95)
    assert abs(sum(counts) / runs - 247.5) < 3 * sigma / math.sqrt(runs)


def test_gen_two_community_no_cross_edges_when_p_inter_zero():
    g = gen_two_community(10, 0.5, 0.0, 42)
    assert all(g.community[i] == g.community[j] for i, j in g.edges)


def test_gen_two_community_pair_class_means():
    # 2*C(50,2)=2450 intra pairs at 0.3, 2500 inter pairs at 0.1.
    runs = 1000
    intra = inter = 0
    for seed in range(runs):
        g = gen_two_community(100, 0.3, 0.1, 10_000 + seed)
        same = sum(1 for i, j in g.edges if g.community[i] == g.community[j])
        intra += same
        inter += g.edge_count - same
    sig_intra = math.sqrt(2450 * 0.3 * 0.7)
    sig_inter = math.sqrt(2500 * 0.1 * 0.9)
    assert abs(intra / runs - 735.0) < 3 * sig_intra / math.sqrt(runs)
    assert abs(inter / runs - 250.0) < 3 * sig_inter / math.sqrt(runs)


def test_equal_probabilities_match_er_ensemble():
    # Edge-count distributions agree (two-sample KS at significance 0.01)
    # when p_intra == p_inter; disjoint seed ranges keep the samples honest.
    from scipy.stats import ks_2samp

    a = [gen_er(100, 0.08, s).edge_count for s in range(1000)]
    b = [gen_two_community(100, 0.08, 0.08, 50_000 + s).edge_count for s in range(1000)]
    assert ks_2samp(a, b).pvalue > 0.01


def test_components_trivial_cases():
    assert connected_components(from_edges(5, []))[1] == 5
    assert connected_components(gen_er(5, 1.0, 0))[1] == 1
    two_triangles = from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    labels, count = connected_components(two_triangles)
    assert count == 2
    assert labels == [0, 0, 0, 1, 1, 1]
    bridged = from_edges(6, list(two_triangles.edges) + [(2, 3)])
    assert connected_components(bridged)[1] == 1


@given(st.integers(1, 30), st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_components_extremes(n, seed):
    assert connected_components(gen_er(n, 0.0, seed))[1] == n
    assert connected_components(gen_er(n, 1.0, seed))[1] == 1


@pytest.mark.parametrize(
    "p_intra,p_inter,expected",
    [(0.3, 0.3, 0.3), (0.3, 0.0, 0.15), (0.3, 0.1, 0.2)],
)
def test_mean_density(p_intra, p_inter, expected):
    assert mean_density(p_intra, p_inter) == pytest.approx(expected)


def test_from_edges_validation():
    with pytest.raises(ValueError):
        from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        from_edges(3, [(0, 5)])
    with pytest.raises(ValueError):
        from_edges(3, [], community=[0, 1])
    with pytest.raises(ValueError):
        from_edges(3, [], community=[0, 2, 1])
    with pytest.raises(ValueError):
        from_edges(4, [], community=[0, 1, 1, 1])


def test_edge_list_round_trip():
    g = gen_two_community(11, 0.6, 0.2, 31)
    buf = io.StringIO()
    write_edge_list(g, buf)
    buf.seek(0)
    assert read_edge_list(buf) == g

    g2 = gen_er(9, 0.4, 8)
    buf = io.StringIO()
    write_edge_list(g2, buf)
    buf.seek(0)
    assert read_edge_list(buf) == g2


def test_edge_list_rejects_malformed():
    with pytest.raises(ValueError):
        read_edge_list(io.StringIO("nodes 4\n"))
    with pytest.raises(ValueError):
        read_edge_list(io.StringIO("n 4\n2 1\n"))
