"""Random commercial-link graphs: generation, connectivity, serialization.

Two ensembles are supported, matching the model's setups: a homogeneous
Erdos-Renyi graph, and a planted two-community graph where same-community
pairs link with probability ``p_intra`` and cross-community pairs with
``p_inter``.  Graphs are immutable after construction and safe to share
across concurrent runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .rng import stream


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph with optional two-community labels.

    ``adjacency[i]`` is the sorted tuple of neighbors of agent ``i``;
    ``edges`` lists each undirected edge once as ``(i, j)`` with ``i < j``.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]
    community: tuple[int, ...] | None = None
    # Flat endpoint arrays for vectorized whole-graph tallies.
    edges_i: np.ndarray = field(repr=False, compare=False, default=None)
    edges_j: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.edges_i is None:
            ei = np.fromiter((e[0] for e in self.edges), dtype=np.intp, count=len(self.edges))
            ej = np.fromiter((e[1] for e in self.edges), dtype=np.intp, count=len(self.edges))
            object.__setattr__(self, "edges_i", ei)
            object.__setattr__(self, "edges_j", ej)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def degrees(self) -> list[int]:
        return [len(row) for row in self.adjacency]


def from_edges(n: int, edges: Iterable[tuple[int, int]], community: Iterable[int] | None = None) -> Graph:
    """Build and validate a Graph from an undirected edge list.

    Accepts edges in either endpoint order; rejects self-loops, duplicate
    edges, and out-of-range indices.
    """
    if n < 1:
        raise ValueError(f"agent count must be >= 1, got {n}")
    canon = set()
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i},{j}) out of range for n={n}")
        if i == j:
            raise ValueError(f"self-loop at agent {i}")
        e = (i, j) if i < j else (j, i)
        if e in canon:
            raise ValueError(f"duplicate edge {e}")
        canon.add(e)
    comm = None
    if community is not None:
        comm = tuple(int(c) for c in community)
        if len(comm) != n or any(c not in (0, 1) for c in comm):
            raise ValueError("community labels must be one value in {0,1} per agent")
        if comm.count(0) != (n + 1) // 2:
            raise ValueError(f"community 0 must hold ceil(n/2)={(n + 1) // 2} agents")
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in canon:
        adj[i].append(j)
        adj[j].append(i)
    for row in adj:
        row.sort()
    return Graph(
        n=n,
        adjacency=tuple(tuple(row) for row in adj),
        edges=tuple(sorted(canon)),
        community=comm,
    )


def _pair_mask_graph(n: int, probs: np.ndarray, seed: int, community: tuple[int, ...] | None) -> Graph:
    # One uniform draw per unordered pair, in fixed (i<j) lexicographic order.
    iu, ju = np.triu_indices(n, 1)
    mask = stream(seed).random(iu.size) < probs
    ei = iu[mask]
    ej = ju[mask]
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in zip(ei.tolist(), ej.tolist()):
        adj[a].append(b)
        adj[b].append(a)
    for row in adj:
        row.sort()
    return Graph(
        n=n,
        adjacency=tuple(tuple(row) for row in adj),
        edges=tuple(zip(ei.tolist(), ej.tolist())),
        community=community,
        edges_i=ei.astype(np.intp),
        edges_j=ej.astype(np.intp),
    )


def _check_prob(name: str, p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name} must lie in [0,1], got {p}")


def gen_er(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each unordered pair linked independently with probability p."""
    if n < 1:
        raise ValueError(f"agent count must be >= 1, got {n}")
    _check_prob("p", p)
    return _pair_mask_graph(n, np.asarray(p), seed, community=None)


def gen_two_community(n: int, p_intra: float, p_inter: float, seed: int) -> Graph:
    """Planted two-community graph.

    Agents 0..ceil(n/2)-1 form community 0, the rest community 1.
    Same-community pairs link with probability ``p_intra``, cross-community
    pairs with ``p_inter``.  With ``p_intra == p_inter`` the construction
    consumes randomness identically to :func:`gen_er`, so the ensembles
    coincide seed-for-seed.
    """
    if n < 2:
        raise ValueError(f"two-community graph needs n >= 2, got {n}")
    _check_prob("p_intra", p_intra)
    _check_prob("p_inter", p_inter)
    half = (n + 1) // 2
    labels = np.zeros(n, dtype=np.int64)
    labels[half:] = 1
    iu, ju = np.triu_indices(n, 1)
    probs = np.where(labels[iu] == labels[ju], p_intra, p_inter)
    return _pair_mask_graph(n, probs, seed, community=tuple(labels.tolist()))


def mean_density(p_intra: float, p_inter: float) -> float:
    """Large-n mean link density of the two-community ensemble, (p_intra + p_inter) / 2."""
    _check_prob("p_intra", p_intra)
    _check_prob("p_inter", p_inter)
    return (p_intra + p_inter) / 2.0


def connected_components(g: Graph) -> tuple[list[int], int]:
    """Partition agents into connected components.

    Returns ``(labels, count)`` where ``labels[i]`` is the component id of
    agent ``i``.  Ids are assigned in order of first appearance, so the
    labeling is deterministic for a given graph.
    """
    parent = list(range(g.n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for i, j in g.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    labels = [-1] * g.n
    count = 0
    for i in range(g.n):
        r = find(i)
        if labels[r] == -1:
            labels[r] = count
            count += 1
        labels[i] = labels[r]
    return labels, count


def write_edge_list(g: Graph, f: IO[str]) -> None:
    """Serialize a graph: `n <N>`, optional `communities <c_0 ... c_{N-1}>`, then `i j` lines with i < j."""
    f.write(f"n {g.n}\n")
    if g.community is not None:
        f.write("communities " + " ".join(str(c) for c in g.community) + "\n")
    for i, j in g.edges:
        f.write(f"{i} {j}\n")


def read_edge_list(f: IO[str]) -> Graph:
    """Parse the edge-list format written by :func:`write_edge_list`."""
    header = f.readline().split()
    if len(header) != 2 or header[0] != "n":
        raise ValueError("edge list must start with a 'n <N>' line")
    n = int(header[1])
    community = None
    edges = []
    for line in f:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "communities":
            community = [int(c) for c in parts[1:]]
            continue
        i, j = int(parts[0]), int(parts[1])
        if not i < j:
            raise ValueError(f"edge lines must satisfy i < j, got {i} {j}")
        edges.append((i, j))
    return from_edges(n, edges, community)
