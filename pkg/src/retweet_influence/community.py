"""Louvain modularity maximization on the symmetrized influence graph."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .graph import SocialGraph

MIN_GAIN = 1e-9
_TIE = 1e-12


@dataclass(frozen=True)
class CommunityPartition:
    assignment: np.ndarray
    community_count: int
    modularity: float
    seed: int | None = None

    def __getitem__(self, v: int) -> int:
        return int(self.assignment[v])

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c)


def undirected_edges(g: SocialGraph) -> np.ndarray:
    """Unique ``(u, v)`` pairs with ``u < v``; an edge in either direction counts once."""
    pairs = [(min(u, v), max(u, v)) for u, v in g.edges()]
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    return np.unique(np.array(pairs, dtype=np.int64), axis=0)


def modularity(g: SocialGraph, assignment) -> float:
    """Newman modularity ``sum_c (e_c - a_c**2)`` of the symmetrized graph.

    ``e_c`` is the fraction of undirected edges inside ``c`` and ``a_c`` the
    fraction of edge endpoints in ``c``. A graph without edges scores 0.
    """
    labels = np.asarray(assignment)
    if labels.shape != (g.node_count,):
        raise ValueError(f"assignment covers {labels.size} of {g.node_count} nodes")
    if labels.size and (labels < 0).any():
        raise ValueError("assignment contains unassigned nodes")
    edges = undirected_edges(g)
    m = len(edges)
    if m == 0:
        return 0.0
    _, lab = np.unique(labels, return_inverse=True)
    k = np.bincount(edges.ravel(), minlength=g.node_count)
    inside = lab[edges[:, 0]] == lab[edges[:, 1]]
    e = np.bincount(lab[edges[inside, 0]], minlength=lab.max() + 1) / m
    a = np.bincount(lab, weights=k, minlength=lab.max() + 1) / (2 * m)
    return float(np.sum(e - a * a))


def _relabel(labels: np.ndarray) -> np.ndarray:
    # dense ids in order of each community's smallest node
    out = np.empty_like(labels)
    mapping: dict[int, int] = {}
    for i, c in enumerate(labels):
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out


class _Level:
    """Weighted undirected graph for one aggregation level."""

    def __init__(self, n: int, adj: list[dict[int, float]], loops: np.ndarray):
        self.n = n
        self.adj = adj
        self.loops = loops
        self.k = np.array([sum(a.values()) for a in adj]) + 2 * loops
        self.m2 = float(self.k.sum())

    def quality(self, comm: np.ndarray) -> float:
        inner = defaultdict(float)
        tot = defaultdict(float)
        for i in range(self.n):
            c = comm[i]
            tot[c] += self.k[i]
            inner[c] += 2 * self.loops[i]
            for j, w in self.adj[i].items():
                if comm[j] == c:
                    inner[c] += w
        return sum(inner[c] / self.m2 - (tot[c] / self.m2) ** 2 for c in tot)


def _local_moves(level: _Level, rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    comm = np.arange(level.n)
    tot = level.k.astype(float).copy()
    m2 = level.m2
    q = level.quality(comm)
    moved_any = False
    while True:
        order = rng.permutation(level.n)
        for i in order:
            ki = level.k[i]
            own = comm[i]
            links: dict[int, float] = defaultdict(float)
            for j, w in level.adj[i].items():
                links[comm[j]] += w
            tot[own] -= ki
            best, best_gain = own, links.get(own, 0.0) - tot[own] * ki / m2
            for c in sorted(links):
                gain = links[c] - tot[c] * ki / m2
                if gain > best_gain + _TIE or (abs(gain - best_gain) <= _TIE and c < best):
                    best, best_gain = c, gain
            tot[best] += ki
            comm[i] = best
        new_q = level.quality(comm)
        gained = new_q - q
        q = new_q
        if gained < MIN_GAIN:
            break
        moved_any = True
    return comm, moved_any


def _aggregate(level: _Level, comm: np.ndarray) -> _Level:
    n = int(comm.max()) + 1
    adj: list[dict[int, float]] = [defaultdict(float) for _ in range(n)]
    loops = np.zeros(n)
    for i in range(level.n):
        ci = comm[i]
        loops[ci] += level.loops[i]
        for j, w in level.adj[i].items():
            cj = comm[j]
            if ci == cj:
                loops[ci] += w / 2
            else:
                adj[ci][cj] += w
    return _Level(n, [dict(a) for a in adj], loops)


def louvain(g: SocialGraph, seed: int = 0) -> CommunityPartition:
    """Partition ``g`` by Louvain with a seeded node visit order.

    Each level moves nodes greedily to the neighboring community with the
    largest modularity gain (ties go to the lowest community id) until a full
    pass gains less than ``MIN_GAIN``; communities are then collapsed and the
    process repeats until a level makes no move.
    """
    if g.node_count == 0:
        raise ValueError("louvain needs a non-empty graph")
    rng = np.random.default_rng(seed)
    adj: list[dict[int, float]] = [dict() for _ in range(g.node_count)]
    for u, v in undirected_edges(g):
        adj[u][v] = 1.0
        adj[v][u] = 1.0
    level = _Level(g.node_count, adj, np.zeros(g.node_count))
    labels = np.arange(g.node_count)
    if level.m2 > 0:
        while True:
            comm, moved = _local_moves(level, rng)
            if not moved:
                break
            comm = _relabel(comm)
            labels = comm[labels]
            level = _aggregate(level, comm)
    labels = _relabel(labels)
    return CommunityPartition(
        assignment=labels,
        community_count=int(labels.max()) + 1,
        modularity=modularity(g, labels),
        seed=seed,
    )


def write_partition(path, g: SocialGraph, part: CommunityPartition) -> None:
    with open(path, "w") as fh:
        fh.write(f"# modularity={part.modularity!r} seed={part.seed}\n")
        for v in range(g.node_count):
            fh.write(f"{g.source_ids[v]}\t{part.assignment[v]}\n")


def read_partition(path, g: SocialGraph) -> CommunityPartition:
    labels = np.full(g.node_count, -1, dtype=np.int64)
    seed = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                for tok in line[1:].split():
                    key, _, val = tok.partition("=")
                    if key == "seed" and val != "None":
                        seed = int(val)
                continue
            sid, c = line.split("\t")
            labels[g.node_of(sid)] = int(c)
    if (labels < 0).any():
        raise ValueError(f"{path}: partition misses {int((labels < 0).sum())} nodes")
    return CommunityPartition(labels, int(labels.max()) + 1, modularity(g, labels), seed)
