"""Six groups of influence measurements evaluated on a cascade snapshot.

Every function takes the active set ``S`` of a user ``v`` (its in-neighbors
that already posted the microblog) and returns plain numbers. Column order of
the assembled vector is :data:`FEATURE_NAMES`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .cascade import Cascade, CascadeSnapshot, path_length, snapshot
from .community import CommunityPartition
from .graph import SocialGraph

FEATURE_NAMES = (
    "active_nbrs", "pne", "avg_in_nbr",
    "act_comm", "act_comm_ratio",
    "lrcq",
    "cascade_size", "path_len",
    "delay",
    "has_link", "has_mention", "has_hashtag",
)

GROUPS = {
    "neighborhood": ("active_nbrs", "pne", "avg_in_nbr"),
    "structural": ("act_comm", "act_comm_ratio"),
    "lrcq": ("lrcq",),
    "cascade": ("cascade_size", "path_len"),
    "temporal": ("delay",),
    "metadata": ("has_link", "has_mention", "has_hashtag"),
}
GROUPS["multi"] = tuple(f for f in FEATURE_NAMES if f != "lrcq")
GROUPS["multi+lrcq"] = FEATURE_NAMES

TIME_UNITS = {"seconds": 1.0, "minutes": 60.0, "hours": 3600.0, "days": 86400.0}


class LabelLeakageError(ValueError):
    """An active neighbor posted after the observation time."""


@dataclass(frozen=True)
class LrcqParams:
    w: float = 0.5
    a: float = 0.5
    b: float = 0.5
    mu: float = 1.0


def group_columns(group: str) -> list[int]:
    try:
        names = GROUPS[group]
    except KeyError:
        raise ValueError(f"unknown feature group {group!r}; choose from {sorted(GROUPS)}") from None
    if not names:
        raise ValueError(f"feature group {group!r} is empty")
    return [FEATURE_NAMES.index(n) for n in names]


def unit_seconds(unit: str) -> float:
    try:
        return TIME_UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown time unit {unit!r}") from None


def active_set(g: SocialGraph, snap: CascadeSnapshot, v: int) -> frozenset:
    return frozenset(int(u) for u in g.in_adj[v] if int(u) in snap.active)


def neighborhood_features(g: SocialGraph, S: Iterable[int], v: int) -> tuple[int, float, float]:
    """Active-neighbor count, personal network exposure and mean in-degree of actives."""
    S = list(S)
    d_in = len(g.in_adj[v])
    if d_in == 0:
        raise ValueError(f"node {v} has no in-neighbors; it cannot be exposed")
    avg_in = sum(len(g.in_adj[u]) for u in S) / len(S) if S else 0.0
    return len(S), len(S) / d_in, avg_in


def structural_features(partition: CommunityPartition, g: SocialGraph, S: Iterable[int],
                        v: int) -> tuple[int, float]:
    """Distinct communities among actives, and their share of communities among all in-neighbors."""
    active_comms = {int(partition.assignment[u]) for u in S}
    if not active_comms:
        return 0, 0.0
    adjacent = {int(c) for c in partition.assignment[g.in_adj[v]]}
    return len(active_comms), len(active_comms) / len(adjacent)


def random_walk_prob(g: SocialGraph, u: int, v: int) -> float:
    """One-step probability that a uniform walk on out-edges goes from ``u`` to ``v``."""
    if not g.has_edge(u, v):
        raise ValueError(f"no edge {u} -> {v}")
    return 1.0 / len(g.out_adj[u])


def circles(g: SocialGraph, S: Iterable[int], v: int | None = None) -> int:
    """Connected components among the actives, edges taken in either direction."""
    S = sorted(set(S))
    if not S:
        return 0
    parent = {u: u for u in S}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    members = set(S)
    for u in S:
        for w in g.out_adj[u]:
            w = int(w)
            if w in members:
                ru, rw = find(u), find(w)
                if ru != rw:
                    parent[max(ru, rw)] = min(ru, rw)
    return sum(1 for u in S if find(u) == u)


def lrcq_terms(g: SocialGraph, snap: CascadeSnapshot, S: Iterable[int], v: int, t_obs: float,
               params: LrcqParams = LrcqParams(), unit: float = 1.0) -> tuple[float, float]:
    """Peer factor (geometric mean of gap-weighted walk probabilities) and structural factor.

    Gaps are measured in multiples of ``unit`` seconds. An empty active set
    gives a peer factor of 0.
    """
    S = sorted(S)
    f = params.a * math.log(len(S) + 1) + params.b * math.exp(-params.mu * circles(g, S, v))
    if not S:
        return 0.0, f
    logs = 0.0
    for u in S:
        gap = (t_obs - snap.cascade.time_of(u)) / unit
        if gap < 0:
            raise LabelLeakageError(f"active neighbor {u} posted {-gap} units after t_obs={t_obs}")
        term = gap * random_walk_prob(g, u, v)
        if term == 0.0:
            return 0.0, f
        logs += math.log(term)
    return math.exp(logs / len(S)), f


def lrcq(g: SocialGraph, snap: CascadeSnapshot, S: Iterable[int], v: int, t_obs: float,
         params: LrcqParams = LrcqParams(), unit: float = 1.0) -> float:
    gterm, fterm = lrcq_terms(g, snap, S, v, t_obs, params, unit)
    return params.w * gterm + (1 - params.w) * fterm


def cascade_features(snap: CascadeSnapshot, v: int, g: SocialGraph,
                     depths: dict[int, int] | None = None) -> tuple[int, int]:
    return snap.size, path_length(snap, v, g, depths)


def temporal_feature(snap: CascadeSnapshot, t_obs: float, unit: float = 1.0) -> float:
    return (t_obs - snap.cascade.origin_time) / unit


def metadata_features(cascade: Cascade) -> tuple[int, int, int]:
    return tuple(int(b) for b in cascade.metadata)


def feature_vector(g: SocialGraph, partition: CommunityPartition, snap: CascadeSnapshot, v: int,
                   t_obs: float, params: LrcqParams = LrcqParams(), unit: float = 1.0,
                   depths: dict[int, int] | None = None) -> np.ndarray:
    S = active_set(g, snap, v)
    count, pne, avg_in = neighborhood_features(g, S, v)
    n_comm, comm_ratio = structural_features(partition, g, S, v)
    q = lrcq(g, snap, S, v, t_obs, params, unit)
    size, plen = cascade_features(snap, v, g, depths)
    delay = temporal_feature(snap, t_obs, unit)
    return np.array([count, pne, avg_in, n_comm, comm_ratio, q, size, plen, delay,
                     *metadata_features(snap.cascade)], dtype=float)


def featurize(g: SocialGraph, partition: CommunityPartition, cascades: Iterable[Cascade],
              instances, params: LrcqParams = LrcqParams(), time_unit: str = "seconds") -> np.ndarray:
    """Feature matrix for ``instances`` (rows in input order); also stored on each instance."""
    unit = unit_seconds(time_unit)
    by_id = {c.microblog_id: c for c in cascades}
    cache: dict[tuple[str, float], tuple[CascadeSnapshot, dict]] = {}
    rows = np.empty((len(instances), len(FEATURE_NAMES)))
    current = None
    for i, inst in enumerate(instances):
        if inst.microblog_id != current:
            cache.clear()
            current = inst.microblog_id
        key = (inst.microblog_id, inst.observation_time)
        if key not in cache:
            snap = snapshot(by_id[inst.microblog_id], inst.observation_time)
            cache[key] = (snap, snap.depths())
        snap, depths = cache[key]
        rows[i] = feature_vector(g, partition, snap, inst.user, inst.observation_time,
                                 params, unit, depths)
        inst.features = rows[i]
    return rows
