"""Directed influence graph built from repost events.

An edge ``(v, w)`` means ``v`` can influence ``w``: at least one post of ``v``
was reposted by ``w`` during the edge-derivation window.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple, Sequence

import numpy as np

logger = logging.getLogger(__name__)

IN = "in"
OUT = "out"


class InvalidNodeError(IndexError):
    """Raised when a node id is outside ``[0, node_count)``."""


class RepostEvent(NamedTuple):
    poster: Hashable
    reposter: Hashable
    time: float = 0.0


@dataclass(frozen=True)
class SocialGraph:
    """Immutable directed graph with dense node ids.

    ``in_adj[v]`` holds the in-neighbors of ``v`` (the users ``v`` reposted),
    ``out_adj[v]`` its out-neighbors, both sorted ascending.
    """

    node_count: int
    in_adj: tuple[np.ndarray, ...]
    out_adj: tuple[np.ndarray, ...]
    source_ids: tuple[Hashable, ...]
    index: dict = field(repr=False)
    self_loops_dropped: int = 0
    repost_multiplicity: int = 0

    @property
    def edge_count(self) -> int:
        return int(sum(len(a) for a in self.out_adj))

    def edges(self) -> list[tuple[int, int]]:
        return [(u, int(v)) for u in range(self.node_count) for v in self.out_adj[u]]

    def has_edge(self, u: int, v: int) -> bool:
        adj = self.out_adj[u]
        i = np.searchsorted(adj, v)
        return bool(i < len(adj) and adj[i] == v)

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[self._check(v)])

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[self._check(v)])

    def node_of(self, source_id: Hashable) -> int:
        return self.index[source_id]

    def __contains__(self, source_id: Hashable) -> bool:
        return source_id in self.index

    def _check(self, v: int) -> int:
        if not 0 <= v < self.node_count:
            raise InvalidNodeError(f"node {v} not in graph of {self.node_count} nodes")
        return v

    def undirected_neighbors(self, v: int) -> np.ndarray:
        return np.union1d(self.in_adj[v], self.out_adj[v])


def from_edges(source_ids: Sequence[Hashable], edges: Iterable[tuple[int, int]],
               self_loops_dropped: int = 0, repost_multiplicity: int = 0) -> SocialGraph:
    """Assemble a graph from dense ids; duplicate edges and self-loops are ignored."""
    n = len(source_ids)
    outs: list[set[int]] = [set() for _ in range(n)]
    ins: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if u == v:
            continue
        outs[u].add(v)
        ins[v].add(u)
    as_arr = lambda s: np.array(sorted(s), dtype=np.int64)  # noqa: E731
    return SocialGraph(
        node_count=n,
        in_adj=tuple(as_arr(s) for s in ins),
        out_adj=tuple(as_arr(s) for s in outs),
        source_ids=tuple(source_ids),
        index={s: i for i, s in enumerate(source_ids)},
        self_loops_dropped=self_loops_dropped,
        repost_multiplicity=repost_multiplicity,
    )


def build_graph(events: Iterable[RepostEvent | tuple]) -> SocialGraph:
    """Build the influence graph from repost events.

    Nodes are numbered by first appearance (poster before reposter within an
    event). Self-reposts are dropped and counted in ``self_loops_dropped``;
    repeated reposts of the same pair count toward ``repost_multiplicity``.
    """
    index: dict[Hashable, int] = {}
    ids: list[Hashable] = []
    edges: set[tuple[int, int]] = set()
    dropped = 0
    seen = 0

    def intern(s):
        if s not in index:
            index[s] = len(ids)
            ids.append(s)
        return index[s]

    for ev in events:
        poster, reposter = ev[0], ev[1]
        if poster == reposter:
            dropped += 1
            continue
        seen += 1
        edges.add((intern(poster), intern(reposter)))
    if dropped:
        logger.warning("dropped %d self-repost events", dropped)
    return from_edges(ids, edges, self_loops_dropped=dropped,
                      repost_multiplicity=seen - len(edges))


def neighbors(g: SocialGraph, v: int, direction: str = OUT) -> np.ndarray:
    g._check(v)
    if direction == IN:
        return g.in_adj[v]
    if direction == OUT:
        return g.out_adj[v]
    raise ValueError(f"direction must be 'in' or 'out', got {direction!r}")


def read_events(path) -> list[RepostEvent]:
    """Read ``poster<TAB>reposter<TAB>unix_time`` lines."""
    events = []
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            events.append(RepostEvent(parts[0], parts[1], float(parts[2])))
    return events


def write_events(path, events: Iterable[RepostEvent]) -> None:
    with open(path, "w", newline="") as fh:
        for ev in events:
            fh.write(f"{ev.poster}\t{ev.reposter}\t{_fmt_time(ev.time)}\n")


def write_edges(path, g: SocialGraph) -> None:
    """Export the edge list with original source ids, in dense-id order."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow([f"# nodes={g.node_count} edges={g.edge_count}"])
        for sid in g.source_ids:
            w.writerow(["#node", sid])
        for u in range(g.node_count):
            for v in g.out_adj[u]:
                w.writerow([g.source_ids[u], g.source_ids[v]])


def read_edges(path) -> SocialGraph:
    ids: list[str] = []
    index: dict[str, int] = {}
    pairs = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#node\t"):
                s = line.rstrip("\n").split("\t", 1)[1]
                index[s] = len(ids)
                ids.append(s)
                continue
            if line.startswith("#"):
                continue
            a, b = line.rstrip("\n").split("\t")
            for s in (a, b):
                if s not in index:
                    index[s] = len(ids)
                    ids.append(s)
            pairs.append((index[a], index[b]))
    return from_edges(ids, pairs)


def _fmt_time(t: float) -> str:
    return str(int(t)) if float(t).is_integer() else repr(float(t))
