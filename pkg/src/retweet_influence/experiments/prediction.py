"""Measurement-group comparison and the negative:positive ratio sweep."""

from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..features import FEATURE_NAMES, GROUPS
from ..learners import LearnerSpec, ModelReport, confusion, fit, predict, split_and_cv, stratified_split
from ..sampling import negative_order

SINGLE_GROUPS = ("neighborhood", "structural", "lrcq", "cascade", "temporal", "metadata")
LR_ONLY_GROUPS = ("lrcq",)


@dataclass
class GroupResult:
    group: str
    learner: str
    report: ModelReport


def _resolve_groups(groups) -> dict[str, list[int]]:
    if isinstance(groups, Mapping):
        named = {k: tuple(v) for k, v in groups.items()}
    else:
        named = {}
        for gname in groups:
            if gname not in GROUPS:
                raise ValueError(f"unknown feature group {gname!r}")
            named[gname] = GROUPS[gname]
    out = {}
    for gname, cols in named.items():
        if not cols:
            raise ValueError(f"feature group {gname!r} has no features")
        out[gname] = [FEATURE_NAMES.index(c) for c in cols]
    return out


def _group_job(args):
    gname, lspec, Xg, y, train_frac, folds, seed, cv = args
    return GroupResult(gname, lspec.name, split_and_cv(Xg, y, lspec, train_frac, folds, seed, cv=cv))


def group_comparison(X, y, groups: Iterable[str] | Mapping[str, Sequence[str]],
                     specs: Sequence[LearnerSpec], seed: int = 0, train_frac: float = 0.7,
                     folds: int = 10, workers: int = 1, cv: bool = True) -> list[GroupResult]:
    """One :func:`split_and_cv` report per (group, learner) cell.

    The single-feature ``lrcq`` group is only fitted with logistic regression
    (a default one if ``specs`` has none).
    """
    X = np.asarray(X, dtype=float)
    cols = _resolve_groups(groups)
    lr_specs = [s for s in specs if s.kind == "logistic_regression"] or \
        [LearnerSpec("logistic_regression", seed=seed)]
    jobs = []
    for gname, c in cols.items():
        for lspec in (lr_specs if gname in LR_ONLY_GROUPS else specs):
            jobs.append((gname, lspec, X[:, c], y, train_frac, folds, seed, cv))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_group_job, jobs))
    return [_group_job(j) for j in jobs]


def write_metrics(path, results: Sequence[GroupResult], with_cv: bool = True) -> None:
    """``model,feature_group,precision,recall,f1``; CV estimates are tagged ``<model>:cv_mean``
    and ``<model>:cv_pooled`` next to the untagged held-out row."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "feature_group", "precision", "recall", "f1"])
        for r in results:
            w.writerow([r.learner, r.group, *(repr(float(x)) for x in r.report.metrics)])
            if with_cv and r.report.cv_mean is not None:
                w.writerow([f"{r.learner}:cv_mean", r.group, *(repr(float(x)) for x in r.report.cv_mean)])
                w.writerow([f"{r.learner}:cv_pooled", r.group,
                            *(repr(float(x)) for x in r.report.cv_pooled)])


@dataclass
class SweepGrid:
    """Precision/recall/F1 for every (train ratio, test ratio) cell; ``nan`` marks skipped cells."""

    ratios: tuple[int, ...]
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    seed: int
    skipped: list[tuple[int, int]] = field(default_factory=list)

    def metric(self, name: str) -> np.ndarray:
        return getattr(self, name)


def imbalance_sweep(X, y, spec: LearnerSpec, ratios: Sequence[int] = tuple(range(1, 10)),
                    seed: int = 0, train_frac: float = 0.7) -> SweepGrid:
    """Train at each negative:positive ratio and test at each ratio.

    All cells of one sweep share the positive split and draw negatives as
    nested prefixes of a single seeded order: the 1:1 sample is split exactly
    as :func:`split_and_cv` would split it, and extra negatives are appended
    to the train or test side. A fixed-train row therefore reuses one model
    and one set of test positives, and its test sets grow by supersets.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    ratios = tuple(int(r) for r in ratios)
    if min(ratios) < 1:
        raise ValueError("ratios must be >= 1")
    pos = np.flatnonzero(y == 1)
    order = negative_order(y, seed)
    P = len(pos)
    if len(order) < P:
        raise ValueError(f"need at least {P} negatives for the 1:1 base, have {len(order)}")
    base = np.sort(np.concatenate([pos, order[:P]]))
    tr, te = stratified_split(y[base], train_frac, seed)
    tr, te = base[tr], base[te]
    tr_pos, tr_neg = tr[y[tr] == 1], tr[y[tr] == 0]
    te_pos, te_neg = te[y[te] == 1], te[y[te] == 0]
    extra = order[P:]
    top = max(ratios)
    train_pool = extra[: (top - 1) * len(tr_neg)]
    test_pool = extra[(top - 1) * len(tr_neg):]

    shape = (len(ratios), len(ratios))
    prec, rec, f1 = np.full(shape, np.nan), np.full(shape, np.nan), np.full(shape, np.nan)
    skipped = []
    for i, rt in enumerate(ratios):
        need_tr = (rt - 1) * len(tr_neg)
        if need_tr > len(train_pool):
            skipped += [(rt, rs) for rs in ratios]
            continue
        rows = np.sort(np.concatenate([tr_pos, tr_neg, train_pool[:need_tr]]))
        model = fit(spec, X[rows], y[rows])
        for j, rs in enumerate(ratios):
            need_te = (rs - 1) * len(te_neg)
            if need_te > len(test_pool):
                skipped.append((rt, rs))
                continue
            test = np.sort(np.concatenate([te_pos, te_neg, test_pool[:need_te]]))
            m = confusion(predict(model, X[test])[0], y[test]).metrics()
            prec[i, j], rec[i, j], f1[i, j] = m
    return SweepGrid(ratios, prec, rec, f1, seed, skipped)


def _sweep_job(args):
    X, y, spec, ratios, seed, train_frac = args
    return imbalance_sweep(X, y, spec, ratios, seed, train_frac)


def replicate_sweep(X, y, spec: LearnerSpec, ratios: Sequence[int] = tuple(range(1, 10)),
                    seeds: Sequence[int] = tuple(range(20)), train_frac: float = 0.7,
                    workers: int = 1) -> list[SweepGrid]:
    """Independent sweeps, one per seed (sampling, split and learner seed all follow it)."""
    jobs = [(X, y, spec.with_seed(s), ratios, s, train_frac) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_sweep_job, jobs))
    return [_sweep_job(j) for j in jobs]


def sweep_summary(grids: Sequence[SweepGrid], metric: str) -> tuple[np.ndarray, np.ndarray]:
    """Seed mean and standard error of ``metric`` per cell."""
    stack = np.array([g.metric(metric) for g in grids])
    n = np.sum(~np.isnan(stack), axis=0)
    with warnings.catch_warnings(), np.errstate(invalid="ignore", divide="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)  # all-skipped cells stay nan
        mean = np.nanmean(stack, axis=0) if len(grids) else np.full((0, 0), np.nan)
        se = np.nanstd(stack, axis=0, ddof=1) / np.sqrt(n) if len(grids) > 1 else np.zeros_like(mean)
    return mean, se


def write_sweep(path, grids: Sequence[SweepGrid]) -> None:
    """Long format ``seed,train_ratio,test_ratio,precision,recall,f1`` (skipped cells as nan)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "train_ratio", "test_ratio", "precision", "recall", "f1"])
        for g in grids:
            for i, rt in enumerate(g.ratios):
                for j, rs in enumerate(g.ratios):
                    w.writerow([g.seed, rt, rs, *(repr(float(v[i, j])) for v in (g.precision, g.recall, g.f1))])


def is_nonincreasing(values, tol: float = 0.0) -> bool:
    v = np.asarray(values, dtype=float)
    v = v[~np.isnan(v)]
    return bool(np.all(np.diff(v) <= tol))


def recall_row_spread(grids: Sequence[SweepGrid]) -> np.ndarray:
    """Per train ratio, the largest |cell mean - row mean| in units of cell standard error (0 if exact)."""
    mean, se = sweep_summary(grids, "recall")
    out = np.zeros(mean.shape[0])
    for i in range(mean.shape[0]):
        dev = np.abs(mean[i] - np.nanmean(mean[i]))
        with np.errstate(invalid="ignore", divide="ignore"):
            z = np.where(dev > 0, dev / np.where(se[i] > 0, se[i], math.inf), 0.0)
        out[i] = float(np.nanmax(z)) if z.size else 0.0
    return out
