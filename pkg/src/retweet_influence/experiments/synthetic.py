"""Seeded synthetic corpus: planted-partition graph plus cascades from a logistic adoption rule.

Cascades grow in waves spaced ``wave_interval`` seconds apart. A user is
exposed in the wave after one of its in-neighbors reposts and decides once,
adopting with probability ``logistic(bias + sum_k weight_k * feature_k)``
where the features are the measurement vector at ``wave time - eps`` (the
same snapshot the instance extractor uses for positives). Every adopter at
depth ``k`` posts at ``t0 + k * wave_interval``, so linear interpolation of
chain times reproduces the true times.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import expit

from ..cascade import Cascade, ChainRecord, snapshot
from ..community import CommunityPartition, modularity
from ..features import FEATURE_NAMES, LrcqParams, feature_vector, unit_seconds
from ..graph import RepostEvent, SocialGraph, build_graph

DAY = 86400.0


@dataclass
class SyntheticConfig:
    n_nodes: int = 400
    n_communities: int = 4
    p_in: float = 0.05
    p_out: float = 0.002
    n_microblogs: int = 100
    edge_window: float = 90 * DAY
    study_window: float = 31 * DAY
    wave_interval: float = 600.0
    max_waves: int = 60
    max_events_per_edge: int = 3
    bias: float = -1.5
    weights: dict = field(default_factory=dict)
    metadata_rates: tuple = (0.3, 0.3, 0.3)
    time_unit: str = "minutes"

    def validate(self) -> None:
        unknown = set(self.weights) - set(FEATURE_NAMES)
        if unknown:
            raise ValueError(f"weights for unknown features {sorted(unknown)}")
        if self.n_nodes < 2 or not 1 <= self.n_communities <= self.n_nodes:
            raise ValueError("need n_nodes >= 2 and 1 <= n_communities <= n_nodes")
        for name in ("p_in", "p_out"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be a probability")
        if self.n_microblogs > 0 and self.p_in == 0 and self.p_out == 0:
            raise ValueError("cascades requested on a graph with edge density 0")
        if self.wave_interval <= self.eps:
            raise ValueError("wave_interval must exceed one time unit")
        if self.max_waves * self.wave_interval >= self.study_window:
            raise ValueError("study_window too short for max_waves")

    @property
    def eps(self) -> float:
        return unit_seconds(self.time_unit)

    @property
    def extraction(self) -> dict:
        """Instance-extraction settings under which extracted features equal the decision features."""
        return {"negative_mode": "exposure", "horizon": self.wave_interval - self.eps, "eps": self.eps,
                "time_unit": self.time_unit}

    def weight_vector(self) -> np.ndarray:
        return np.array([float(self.weights.get(f, 0.0)) for f in FEATURE_NAMES])


@dataclass
class SyntheticCorpus:
    events: list
    records: list
    graph: SocialGraph
    blocks: np.ndarray
    ground_truth: dict
    decision_features: np.ndarray
    decision_labels: np.ndarray
    decision_microblogs: list = field(default_factory=list)

    def reposted_decisions(self) -> tuple[np.ndarray, np.ndarray]:
        """Decisions on microblogs that got at least one repost.

        A microblog nobody reposted leaves no record, so its exposures cannot
        be recovered from the corpus files.
        """
        seen = {r.microblog_id for r in self.records}
        keep = np.array([m in seen for m in self.decision_microblogs], dtype=bool)
        return self.decision_features[keep], self.decision_labels[keep]

    def planted_partition(self) -> CommunityPartition:
        return CommunityPartition(self.blocks, int(self.blocks.max()) + 1,
                                  modularity(self.graph, self.blocks))


def planted_blocks(n: int, k: int) -> np.ndarray:
    return np.arange(n) * k // n


def planted_digraph(n: int, k: int, p_in: float, p_out: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean adjacency of a directed planted-partition graph without self-loops."""
    blocks = planted_blocks(n, k)
    same = blocks[:, None] == blocks[None, :]
    adj = rng.random((n, n)) < np.where(same, p_in, p_out)
    np.fill_diagonal(adj, False)
    return adj


def generate_synthetic(config: SyntheticConfig, seed: int = 0) -> SyntheticCorpus:
    config.validate()
    rng = np.random.default_rng(seed)
    names = [f"u{i}" for i in range(config.n_nodes)]
    adj = planted_digraph(config.n_nodes, config.n_communities, config.p_in, config.p_out, rng)
    us, vs = np.nonzero(adj)
    if config.n_microblogs > 0 and len(us) == 0:
        raise ValueError("generated graph has no edges; cannot grow cascades")
    events = []
    for u, v in zip(us, vs):
        for t in np.sort(rng.uniform(0, config.edge_window, size=rng.integers(1, config.max_events_per_edge + 1))):
            events.append(RepostEvent(names[u], names[v], float(round(t))))
    events.sort(key=lambda e: e.time)
    g = build_graph(events)
    raw_blocks = planted_blocks(config.n_nodes, config.n_communities)
    blocks = np.array([raw_blocks[int(s[1:])] for s in g.source_ids], dtype=np.int64)
    partition = CommunityPartition(blocks, int(blocks.max()) + 1, modularity(g, blocks))

    unit = config.eps
    weights = config.weight_vector()
    params = LrcqParams()
    study_start = config.edge_window
    latest_start = config.study_window - config.max_waves * config.wave_interval
    sources = [v for v in range(g.node_count) if len(g.out_adj[v])]
    records: list[ChainRecord] = []
    dec_x: list[np.ndarray] = []
    dec_y: list[int] = []
    dec_m: list[str] = []
    for m in range(config.n_microblogs):
        mid = f"m{m:05d}"
        root = int(sources[rng.integers(len(sources))])
        t0 = float(round(study_start + rng.uniform(0, latest_start)))
        meta = tuple(int(b) for b in rng.random(3) < np.asarray(config.metadata_rates))
        members, times, parents = [root], [t0], [-1]
        pos = {root: 0}
        decided = {root}
        frontier = [root]
        for k in range(1, config.max_waves + 1):
            if not frontier:
                break
            cascade = Cascade(mid, list(members), np.array(times), list(parents), meta)
            t_obs = t0 + k * config.wave_interval - config.eps
            snap = snapshot(cascade, t_obs)
            depths = snap.depths()
            exposed = sorted({int(w) for u in frontier for w in g.out_adj[u]} - decided)
            adopters = []
            for v in exposed:
                x = feature_vector(g, partition, snap, v, t_obs, params, unit, depths)
                p = expit(config.bias + float(weights @ x))
                decided.add(v)
                adopted = bool(rng.random() < p)
                dec_x.append(x)
                dec_y.append(int(adopted))
                dec_m.append(mid)
                if adopted:
                    adopters.append(v)
            in_frontier = set(frontier)
            for v in adopters:
                cands = [int(u) for u in g.in_adj[v] if int(u) in in_frontier]
                parent = cands[rng.integers(len(cands))]
                pos[v] = len(members)
                members.append(v)
                times.append(t0 + k * config.wave_interval)
                parents.append(parent)
            frontier = adopters
        children = {p for p in parents if p >= 0}
        for i, v in enumerate(members[1:], 1):
            if v in children:
                continue
            path = []
            u = v
            while u != root:
                path.append(g.source_ids[u])
                u = parents[pos[u]]
            records.append(ChainRecord(mid, g.source_ids[root], t0, tuple(reversed(path)),
                                       times[i], meta))
    decisions, adoptions = len(dec_y), int(sum(dec_y))
    truth = {
        "seed": seed,
        "config": _config_dict(config),
        "bias": config.bias,
        "weights": {f: float(w) for f, w in zip(FEATURE_NAMES, weights)},
        "decisions": decisions,
        "adoptions": adoptions,
        "adoption_rate": adoptions / decisions if decisions else math.nan,
        "planted_modularity": partition.modularity,
    }
    X = np.array(dec_x).reshape(len(dec_x), len(FEATURE_NAMES))
    return SyntheticCorpus(events, records, g, blocks, truth, X, np.array(dec_y, dtype=int), dec_m)


def _config_dict(config: SyntheticConfig) -> dict:
    d = asdict(config)
    d["metadata_rates"] = list(d["metadata_rates"])
    return d


def write_ground_truth(path, corpus: SyntheticCorpus) -> None:
    with open(path, "w") as fh:
        json.dump(corpus.ground_truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
