"""Brute-force reference implementations used to cross-check the library.

Everything here works from plain edge sets and dictionaries and avoids the
library's own traversal code, so agreement is meaningful.
"""

from __future__ import annotations

import math

import numpy as np


def edge_set(g) -> set[tuple[int, int]]:
    return {(u, v) for u in range(g.node_count) for v in range(g.node_count) if g.has_edge(u, v)}


def in_nbrs(edges, v) -> set[int]:
    return {u for u, w in edges if w == v}


def out_nbrs(edges, u) -> set[int]:
    return {w for x, w in edges if x == u}


def modularity_double_sum(n: int, edges, labels) -> float:
    """Q = 1/(2m) * sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j] on the symmetrized graph."""
    A = np.zeros((n, n))
    for u, v in edges:
        if u != v:
            A[u, v] = A[v, u] = 1.0
    m2 = A.sum()
    if m2 == 0:
        return 0.0
    k = A.sum(axis=1)
    same = np.equal.outer(labels, labels)
    return float(((A - np.outer(k, k) / m2) * same).sum() / m2)


def set_partitions(items, max_blocks=None):
    """All set partitions of ``items`` as label tuples (restricted growth strings)."""
    items = list(items)
    n = len(items)

    def rec(i, labels, k):
        if i == n:
            yield tuple(labels)
            return
        top = k + 1 if max_blocks is None else min(k + 1, max_blocks)
        for c in range(top):
            labels.append(c)
            yield from rec(i + 1, labels, max(k, c + 1))
            labels.pop()

    yield from rec(0, [], 0)


def components_by_reachability(nodes, undirected_edges) -> int:
    """Count components via transitive closure of a boolean adjacency matrix."""
    nodes = sorted(nodes)
    if not nodes:
        return 0
    idx = {v: i for i, v in enumerate(nodes)}
    R = np.eye(len(nodes), dtype=bool)
    for u, v in undirected_edges:
        if u in idx and v in idx:
            R[idx[u], idx[v]] = R[idx[v], idx[u]] = True
    for _ in range(len(nodes)):
        R = (R.astype(int) @ R.astype(int)) > 0
    return len({tuple(row) for row in R})


def all_simple_paths_len(children: dict[int, set[int]], src: int, dst: int) -> int | None:
    """Shortest length among all simple paths, found by exhaustive DFS enumeration."""
    best = None
    stack = [(src, (src,))]
    while stack:
        u, path = stack.pop()
        if u == dst:
            L = len(path) - 1
            best = L if best is None else min(best, L)
            continue
        for w in children.get(u, ()):
            if w not in path:
                stack.append((w, path + (w,)))
    return best


def oracle_snapshot(members, times, t) -> set[int]:
    return {v for v, tv in zip(members, times) if tv <= t}


def oracle_path_length(members, parents, active, edges, v) -> int | None:
    root = members[0]
    if root not in active:
        return None
    children: dict[int, set[int]] = {}
    for w, p in zip(members, parents):
        if p >= 0 and w in active and p in active:
            children.setdefault(p, set()).add(w)
    if v in active:
        return all_simple_paths_len(children, root, v)
    depths = [all_simple_paths_len(children, root, u) for u in in_nbrs(edges, v) & active]
    depths = [d for d in depths if d is not None]
    return min(depths) + 1 if depths else None


def oracle_features(edges, n, labels, members, times, parents, metadata, v, t_obs,
                    w=0.5, a=0.5, b=0.5, mu=1.0, unit=1.0) -> list[float]:
    """The twelve measurements for node ``v`` at ``t_obs``, computed from first principles."""
    active = oracle_snapshot(members, times, t_obs)
    ins = in_nbrs(edges, v)
    S = ins & active
    d_in = len(ins)
    count = len(S)
    pne = count / d_in
    avg_in = sum(len(in_nbrs(edges, u)) for u in S) / count if S else 0.0
    comm_S = {labels[u] for u in S}
    comm_in = {labels[u] for u in ins}
    n_comm = len(comm_S)
    ratio = n_comm / len(comm_in) if S else 0.0
    und = {(x, y) for x, y in edges} | {(y, x) for x, y in edges}
    circ = components_by_reachability(S, [(x, y) for x, y in und if x in S and y in S])
    f = a * math.log(count + 1) + b * math.exp(-mu * circ)
    time_of = dict(zip(members, times))
    if S:
        prod = 1.0
        for u in S:
            prod *= (t_obs - time_of[u]) / unit * (1.0 / len(out_nbrs(edges, u)))
        gterm = prod ** (1.0 / count)
    else:
        gterm = 0.0
    q = w * gterm + (1 - w) * f
    size = len(active)
    plen = oracle_path_length(members, parents, active, edges, v)
    delay = (t_obs - times[0]) / unit
    return [count, pne, avg_in, n_comm, ratio, q, size, plen, delay, *metadata]


def random_case(rng: np.random.Generator, max_nodes: int = 15):
    """A random small graph, partition, cascade and an observation (v, t_obs).

    Returns a dict with the library objects and the plain data the oracles need.
    Cascades are trees grown along graph edges with non-decreasing integer times.
    """
    from retweet_influence.cascade import Cascade
    from retweet_influence.community import CommunityPartition
    from retweet_influence.graph import build_graph

    while True:
        n = int(rng.integers(3, max_nodes + 1))
        p = rng.uniform(0.1, 0.6)
        events = [(f"n{u}", f"n{v}", 0.0) for u in range(n) for v in range(n)
                  if u != v and rng.random() < p]
        if not events:
            continue
        g = build_graph(events)
        N = g.node_count
        E = edge_set(g)
        root = int(rng.integers(N))
        if not out_nbrs(E, root):
            continue
        members, parents, times = [root], [-1], [float(rng.integers(0, 50))]
        frontier = [0]
        while frontier and rng.random() < 0.95:
            i = frontier.pop(int(rng.integers(len(frontier))))
            u = members[i]
            for w in sorted(out_nbrs(E, u) - set(members)):
                if rng.random() < 0.5:
                    members.append(w)
                    parents.append(u)
                    times.append(times[i] + float(rng.integers(0, 40)))
                    frontier.append(len(members) - 1)
        casc = Cascade("m0", members, np.array(times), parents, tuple(int(b) for b in rng.integers(0, 2, 3)))
        exposed = sorted({w for u in members for w in out_nbrs(E, u)})
        if not exposed:
            continue
        v = int(exposed[rng.integers(len(exposed))])
        t_nbr = min(times[members.index(u)] for u in in_nbrs(E, v) if u in members)
        t_obs = t_nbr + float(rng.integers(0, 60))
        labels = rng.integers(0, max(1, N // 3), N)
        _, labels = np.unique(labels, return_inverse=True)
        part = CommunityPartition(labels.astype(np.int64), int(labels.max()) + 1, 0.0)
        return {"g": g, "edges": E, "n": N, "labels": labels, "partition": part, "cascade": casc,
                "members": members, "times": times, "parents": parents, "v": v, "t_obs": t_obs}
