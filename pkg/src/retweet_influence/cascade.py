"""Per-microblog repost cascades reconstructed from last-repost chains."""

from __future__ import annotations

import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from typing import Hashable, Iterable, Sequence

import numpy as np

from .graph import SocialGraph

logger = logging.getLogger(__name__)


class RejectedRecord(ValueError):
    reason = "rejected"


class EmptyChainError(RejectedRecord):
    reason = "empty_chain"


class CorruptRecordError(RejectedRecord):
    reason = "corrupt"


class UnknownOriginError(RejectedRecord):
    reason = "unknown_origin"


class UndefinedPathError(ValueError):
    """``v`` is neither active nor exposed through an active in-neighbor."""


@dataclass(frozen=True)
class ChainRecord:
    microblog_id: str
    origin_user: Hashable
    origin_time: float
    path: tuple
    final_time: float
    metadata: tuple[int, int, int] = (0, 0, 0)


@dataclass
class Cascade:
    """Repost tree of one microblog.

    ``members[0]`` is the originator. ``parents[i]`` is the node id that
    member ``i`` reposted from (``-1`` for the originator). ``times`` may hold
    NaN for mid-chain members until :func:`interpolate_times` runs.
    """

    microblog_id: str
    members: list[int]
    times: np.ndarray
    parents: list[int]
    metadata: tuple[int, int, int] = (0, 0, 0)
    pos: dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.pos:
            self.pos = {v: i for i, v in enumerate(self.members)}

    @property
    def originator(self) -> int:
        return self.members[0]

    @property
    def origin_time(self) -> float:
        return float(self.times[0])

    @property
    def end_time(self) -> float:
        return float(np.nanmax(self.times))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return v in self.pos

    def time_of(self, v: int) -> float:
        return float(self.times[self.pos[v]])


@dataclass(frozen=True)
class CascadeSnapshot:
    cascade: Cascade
    t: float
    active: frozenset

    @property
    def size(self) -> int:
        return len(self.active)

    def depths(self) -> dict[int, int]:
        """Hop distance from the originator over the snapshot's repost edges (BFS)."""
        c = self.cascade
        if c.originator not in self.active:
            return {}
        children: dict[int, list[int]] = {}
        for v, p in zip(c.members, c.parents):
            if p >= 0 and v in self.active:
                children.setdefault(p, []).append(v)
        dist = {c.originator: 0}
        queue = deque([c.originator])
        while queue:
            u = queue.popleft()
            for w in children.get(u, ()):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist


def reconstruct(record: ChainRecord, g: SocialGraph) -> Cascade:
    """Turn one chain record into a path-shaped cascade over graph node ids.

    Path users missing from ``g`` are dropped; each remaining user's parent is
    its predecessor in the filtered path. Only the originator and the last
    member carry times; the rest are NaN.
    """
    if not record.final_time >= record.origin_time:
        raise CorruptRecordError(
            f"{record.microblog_id}: final time {record.final_time} precedes origin {record.origin_time}")
    if record.origin_user not in g:
        raise UnknownOriginError(f"{record.microblog_id}: originator {record.origin_user!r} not in graph")
    root = g.node_of(record.origin_user)
    members = [root]
    seen = {root}
    for user in record.path:
        if user in g:
            v = g.node_of(user)
            if v not in seen:
                seen.add(v)
                members.append(v)
    if len(members) == 1:
        raise EmptyChainError(f"{record.microblog_id}: no path user left in graph")
    times = np.full(len(members), np.nan)
    times[0] = record.origin_time
    times[-1] = record.final_time
    return Cascade(record.microblog_id, members, times,
                   [-1] + members[:-1], tuple(int(b) for b in record.metadata))


def interpolate_times(cascade: Cascade) -> Cascade:
    """Fill missing times linearly between the origin and final repost times.

    The ``i``-th of ``n`` path members gets ``t0 + (i / n) * (final - t0)``;
    the last member keeps its recorded time.
    """
    n = len(cascade) - 1
    times = cascade.times.copy()
    if n <= 0:
        return replace(cascade, times=times, pos=dict(cascade.pos))
    t0, final = times[0], times[-1]
    steps = np.arange(1, n + 1) / n
    filled = t0 + steps * (final - t0)
    filled[-1] = final
    missing = np.isnan(times[1:])
    times[1:][missing] = filled[missing]
    return replace(cascade, times=times, pos=dict(cascade.pos))


def merge(cascades: Sequence[Cascade]) -> Cascade:
    """Merge interpolated cascades of the same microblog.

    The earliest origin time wins (first on ties). A user seen in several
    chains keeps its earliest time and the parent from that chain; a later
    chain replaces it only on a strictly earlier time.
    """
    if not cascades:
        raise ValueError("nothing to merge")
    order = sorted(range(len(cascades)), key=lambda i: (cascades[i].origin_time, i))
    base = cascades[order[0]]
    members = list(base.members)
    times = list(base.times)
    parents = list(base.parents)
    pos = dict(base.pos)
    for i in order[1:]:
        c = cascades[i]
        if c.originator != base.originator:
            raise CorruptRecordError(
                f"{c.microblog_id}: originator {c.originator} conflicts with {base.originator}")
        for v, t, p in zip(c.members[1:], c.times[1:], c.parents[1:]):
            if v not in pos:
                pos[v] = len(members)
                members.append(v)
                times.append(t)
                parents.append(p)
            elif t < times[pos[v]]:
                times[pos[v]] = t
                parents[pos[v]] = p
    return Cascade(base.microblog_id, members, np.array(times, dtype=float), parents,
                   base.metadata, pos)


def build_cascades(records: Iterable[ChainRecord], g: SocialGraph) -> tuple[list[Cascade], Counter]:
    """Reconstruct, interpolate and merge records; returns cascades sorted by microblog id.

    Rejected records are counted by reason in the returned counter.
    """
    groups: dict[str, list[Cascade]] = {}
    stats: Counter = Counter()
    for rec in records:
        stats["records"] += 1
        try:
            c = interpolate_times(reconstruct(rec, g))
        except RejectedRecord as exc:
            stats[exc.reason] += 1
            continue
        groups.setdefault(rec.microblog_id, []).append(c)
    out = []
    for mid in sorted(groups):
        try:
            out.append(merge(groups[mid]))
        except RejectedRecord as exc:
            stats[exc.reason] += 1
    stats["cascades"] = len(out)
    if stats["empty_chain"] or stats["corrupt"] or stats["unknown_origin"]:
        logger.info("chain records rejected: %s", dict(stats))
    return out, stats


def snapshot(cascade: Cascade, t: float) -> CascadeSnapshot:
    """Members whose post time is at or before ``t``."""
    mask = cascade.times <= t
    return CascadeSnapshot(cascade, t, frozenset(np.asarray(cascade.members)[mask].tolist()))


def exposure_time(cascade: Cascade, g: SocialGraph, v: int) -> float:
    """Earliest post time among ``v``'s in-neighbors in the cascade (inf if none)."""
    best = math.inf
    for u in g.in_adj[v]:
        i = cascade.pos.get(int(u))
        if i is not None and cascade.times[i] < best:
            best = float(cascade.times[i])
    return best


def path_length(snap: CascadeSnapshot, v: int, g: SocialGraph | None = None,
                depths: dict[int, int] | None = None) -> int:
    """Hop distance from the originator to ``v`` in the snapshot.

    An inactive ``v`` is one hop below its shallowest active in-neighbor.
    """
    if depths is None:
        depths = snap.depths()
    if v in depths:
        return depths[v]
    if g is None:
        raise UndefinedPathError(f"node {v} is not active and no graph was given")
    best = None
    for u in g.in_adj[v]:
        d = depths.get(int(u))
        if d is not None and (best is None or d < best):
            best = d
    if best is None:
        raise UndefinedPathError(f"node {v} has no active in-neighbor at t={snap.t}")
    return best + 1


def parse_record(line: str) -> ChainRecord:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 6:
        raise ValueError(f"expected 6 tab-separated fields, got {len(parts)}")
    mid, origin, t0, path, final, bits = parts
    meta = tuple(int(b) for b in bits.split(","))
    if len(meta) != 3 or any(b not in (0, 1) for b in meta):
        raise ValueError(f"metadata must be three 0/1 bits, got {bits!r}")
    return ChainRecord(mid, origin, float(t0), tuple(p for p in path.split(",") if p),
                       float(final), meta)


def read_records(path) -> list[ChainRecord]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                out.append(parse_record(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def format_record(rec: ChainRecord) -> str:
    def ts(t):
        return str(int(t)) if float(t).is_integer() else repr(float(t))
    return "\t".join([
        str(rec.microblog_id), str(rec.origin_user), ts(rec.origin_time),
        ",".join(str(p) for p in rec.path), ts(rec.final_time),
        ",".join(str(int(b)) for b in rec.metadata),
    ])


def write_records(path, records: Iterable[ChainRecord]) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(format_record(rec) + "\n")
