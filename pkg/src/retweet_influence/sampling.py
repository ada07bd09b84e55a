"""Study population and labeled (user, microblog) instances."""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cascade import Cascade, ChainRecord, exposure_time
from .features import FEATURE_NAMES
from .graph import SocialGraph

POSITIVE = 1
NEGATIVE = 0

WINDOW_END = "window_end"
EXPOSURE = "exposure"
NEGATIVE_MODES = (WINDOW_END, EXPOSURE)

CSV_HEADER = ("user", "microblog", "label", "obs_time") + FEATURE_NAMES


class InsufficientNegativesError(ValueError):
    def __init__(self, wanted: int, available: int, positives: int):
        self.max_ratio = available / positives if positives else math.inf
        super().__init__(
            f"need {wanted} negatives but only {available} exist; "
            f"maximum achievable ratio is {self.max_ratio:.4g}")


@dataclass
class Instance:
    user: int
    microblog_id: str
    label: int
    observation_time: float
    exposure_time: float
    features: np.ndarray | None = None


def top_retweeters(records: Iterable[ChainRecord], g: SocialGraph, threshold: int = 100) -> set[int]:
    """Graph users that reposted at least ``threshold`` distinct microblogs."""
    pairs = set()
    for rec in records:
        for user in rec.path:
            if user != rec.origin_user and user in g:
                pairs.add((g.node_of(user), rec.microblog_id))
    counts = Counter(v for v, _ in pairs)
    return {v for v in range(g.node_count) if counts[v] >= threshold}


def extract_instances(g: SocialGraph, cascades: Sequence[Cascade], population: Iterable[int],
                      negative_mode: str = WINDOW_END, window_end: float | None = None,
                      horizon: float = 0.0, eps: float = 1.0) -> list[Instance]:
    """Label every exposed (population user, cascade) pair.

    A member whose earliest in-neighbor post is at least ``eps`` before its
    own repost is positive, observed at ``repost - eps``. A non-member with an
    in-neighbor in the cascade is negative, observed at ``window_end``
    (default: last post time over all cascades) or, in ``exposure`` mode, at
    its exposure time plus ``horizon``. Output is ordered by (microblog, user).
    """
    if negative_mode not in NEGATIVE_MODES:
        raise ValueError(f"negative_mode must be one of {NEGATIVE_MODES}")
    population = set(population)
    if not population:
        raise ValueError("empty population")
    if window_end is None and cascades:
        window_end = max(c.end_time for c in cascades)
    out: list[Instance] = []
    for c in sorted(cascades, key=lambda c: c.microblog_id):
        exposed = set()
        for u in c.members:
            exposed.update(int(w) for w in g.out_adj[u])
        for v in sorted(exposed & population):
            t_exp = exposure_time(c, g, v)
            if v in c:
                t_v = c.time_of(v)
                if t_exp <= t_v - eps:
                    out.append(Instance(v, c.microblog_id, POSITIVE, t_v - eps, t_exp))
            else:
                t_obs = window_end if negative_mode == WINDOW_END else t_exp + horizon
                out.append(Instance(v, c.microblog_id, NEGATIVE, t_obs, t_exp))
    return out


def negative_order(labels, seed: int) -> np.ndarray:
    """Indices of the negatives in a seeded random order."""
    labels = np.asarray(labels)
    neg = np.flatnonzero(labels == NEGATIVE)
    return neg[np.random.default_rng(seed).permutation(len(neg))]


def ratio_indices(labels, neg_per_pos: float, seed: int) -> np.ndarray:
    """Sorted row indices of all positives plus a ``neg_per_pos`` share of negatives.

    Negatives are a prefix of :func:`negative_order`, so samples for growing
    ratios under one seed are nested.
    """
    if neg_per_pos < 0:
        raise ValueError("neg_per_pos must be non-negative")
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels == POSITIVE)
    order = negative_order(labels, seed)
    want = math.floor(neg_per_pos * len(pos) + 1e-9)
    if want > len(order):
        raise InsufficientNegativesError(want, len(order), len(pos))
    return np.sort(np.concatenate([pos, order[:want]]))


def sample_ratio(instances: Sequence[Instance], neg_per_pos: float, seed: int) -> list[Instance]:
    """Keep all positives and ``floor(neg_per_pos * #pos)`` negatives drawn without replacement.

    Input order is preserved.
    """
    labels = np.array([x.label for x in instances], dtype=int)
    return [instances[i] for i in ratio_indices(labels, neg_per_pos, seed)]


def _fmt(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def write_instances(path, g: SocialGraph, instances: Sequence[Instance]) -> None:
    """CSV in the fixed column order; users written with their source ids."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for inst in instances:
            feats = inst.features if inst.features is not None else [math.nan] * len(FEATURE_NAMES)
            w.writerow([g.source_ids[inst.user], inst.microblog_id, inst.label,
                        _fmt(inst.observation_time), *(_fmt(x) for x in feats)])


def read_instances(path, g: SocialGraph | None = None) -> list[Instance]:
    out = []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in r:
            user = g.node_of(row[0]) if g is not None else int(row[0])
            feats = np.array([float(x) for x in row[4:]])
            out.append(Instance(user, row[1], int(row[2]), float(row[3]), math.nan,
                                None if np.isnan(feats).all() else feats))
    return out


def design_matrix(instances: Sequence[Instance]) -> tuple[np.ndarray, np.ndarray]:
    X = np.array([inst.features for inst in instances], dtype=float).reshape(len(instances), -1)
    y = np.array([inst.label for inst in instances], dtype=int)
    return X, y
