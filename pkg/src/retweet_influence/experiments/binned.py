"""Probability of adoption per equal-width interval of one measure."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ..features import FEATURE_NAMES

STANDARD_ERROR = "standard_error"
SAMPLE_STD = "sample_std"


@dataclass
class BinTable:
    """Per-bin positive fraction with ``2 * spread`` error half-widths.

    Empty bins carry ``nan`` fraction and half-width.
    """

    measure: str
    edges: np.ndarray
    fraction: np.ndarray
    count: np.ndarray
    half_width: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2

    def rows(self):
        for i in range(len(self.count)):
            yield (self.edges[i], self.edges[i + 1], self.count[i], self.fraction[i], self.half_width[i])


def _half_width(p: np.ndarray, n: np.ndarray, error: str) -> np.ndarray:
    spread = p * (1 - p)
    if error == STANDARD_ERROR:
        spread = spread / np.where(n > 0, n, 1)
    elif error != SAMPLE_STD:
        raise ValueError(f"error must be {STANDARD_ERROR!r} or {SAMPLE_STD!r}")
    return 2 * np.sqrt(spread)


def binned_adoption(values, labels, measure: str = "", bin_count: int = 10,
                    error: str = STANDARD_ERROR) -> BinTable:
    """Split the observed range of ``values`` into ``bin_count`` equal intervals.

    The last interval is closed on the right. ``error`` picks the spread
    behind the half-width: the proportion's standard error ``sqrt(p(1-p)/n)``
    or the per-sample deviation ``sqrt(p(1-p))``.
    """
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if not np.isfinite(values).all():
        raise ValueError(f"measure {measure!r} has non-finite values")
    if len(values) == 0:
        edges = np.linspace(0.0, 1.0, bin_count + 1)
    else:
        lo, hi = float(values.min()), float(values.max())
        edges = np.linspace(lo, hi if hi > lo else lo + 1.0, bin_count + 1)
    which = np.clip(np.searchsorted(edges, values, side="right") - 1, 0, bin_count - 1)
    count = np.bincount(which, minlength=bin_count)
    pos = np.bincount(which, weights=labels, minlength=bin_count)
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(count > 0, pos / np.where(count > 0, count, 1), np.nan)
    hw = np.where(count > 0, _half_width(np.nan_to_num(frac), count, error), np.nan)
    return BinTable(measure, edges, frac, count, hw)


def binned_from_matrix(X, y, measure: str, bin_count: int = 10, error: str = STANDARD_ERROR) -> BinTable:
    return binned_adoption(np.asarray(X)[:, FEATURE_NAMES.index(measure)], y, measure, bin_count, error)


@dataclass
class MetadataConditional:
    bit: str
    p_given_0: float
    n_0: int
    p_given_1: float
    n_1: int

    def standard_error(self) -> float:
        """Standard error of ``p_given_1 - p_given_0``; nan when either side is undefined."""
        if self.n_0 == 0 or self.n_1 == 0:
            return math.nan
        return math.sqrt(self.p_given_0 * (1 - self.p_given_0) / self.n_0
                         + self.p_given_1 * (1 - self.p_given_1) / self.n_1)


METADATA_BITS = ("has_link", "has_mention", "has_hashtag")


def metadata_conditionals(X, y) -> list[MetadataConditional]:
    """``P(positive | bit = 0)`` and ``P(positive | bit = 1)`` per metadata bit (nan if unseen)."""
    X = np.asarray(X)
    y = np.asarray(y, dtype=int)
    out = []
    for name in METADATA_BITS:
        bit = X[:, FEATURE_NAMES.index(name)].astype(int)
        cells = []
        for value in (0, 1):
            sel = bit == value
            n = int(sel.sum())
            cells += [float(y[sel].mean()) if n else math.nan, n]
        out.append(MetadataConditional(name, *cells))
    return out


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return str(int(x)) if x.is_integer() else repr(x)


def write_bin_table(path, table: BinTable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["measure", "lo", "hi", "count", "fraction", "half_width"])
        for lo, hi, n, p, hw in table.rows():
            w.writerow([table.measure, _fmt(lo), _fmt(hi), int(n), _fmt(p), _fmt(hw)])


def write_plot_data(path, x, y, err) -> None:
    """Figure-panel data in the ``x,y,err`` schema."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "err"])
        for row in zip(x, y, err):
            w.writerow([_fmt(v) for v in row])


def write_metadata_table(path, rows: list[MetadataConditional]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bit", "p_pos_given_0", "n_0", "p_pos_given_1", "n_1"])
        for r in rows:
            w.writerow([r.bit, _fmt(r.p_given_0), r.n_0, _fmt(r.p_given_1), r.n_1])
