"""Stage functions and the all-in-one run.

Each stage reads the files written by the previous ones from the output
directory, so any stage can be rerun on its own. :func:`run` chains them and
finishes with ``manifest.json`` listing every written file and its SHA-256.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from . import cascade as cascade_mod
from . import community, graph, sampling
from .config import PipelineConfig
from .experiments import binned as binned_mod
from .experiments import prediction
from .experiments.synthetic import generate_synthetic, write_ground_truth
from .features import featurize, group_columns, unit_seconds
from .learners import save_model

logger = logging.getLogger(__name__)

TMPDIR_ENV = "RETWEET_INFLUENCE_TMPDIR"

EVENTS = "window_a.tsv"
RECORDS = "window_b.tsv"
GROUND_TRUTH = "ground_truth.json"
GRAPH = "graph.tsv"
COMMUNITIES = "communities.tsv"
RAW_INSTANCES = "instances_raw.csv"
INSTANCES = "instances.csv"
CASCADE_STATS = "cascade_stats.json"
MANIFEST = "manifest.json"


class StageError(RuntimeError):
    def __init__(self, stage: str, exc: BaseException):
        self.stage = stage
        super().__init__(f"[{stage}] {type(exc).__name__}: {exc}")


@dataclass
class Manifest:
    out: Path
    entries: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    def add(self, stage: str, path: Path) -> None:
        self.entries[str(path.relative_to(self.out))] = stage

    def to_json(self) -> dict:
        files = []
        for rel, stage in sorted(self.entries.items()):
            data = (self.out / rel).read_bytes()
            files.append({"path": rel, "stage": stage, "bytes": len(data),
                          "sha256": hashlib.sha256(data).hexdigest()})
        return {"status": "partial" if self.errors else "ok", "errors": self.errors, "files": files}

    def write(self) -> Path:
        path = self.out / MANIFEST
        with atomic_path(path) as tmp, open(tmp, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


@contextmanager
def atomic_path(path: Path):
    """Yield a temporary path that replaces ``path`` only if the block succeeds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_dir = os.environ.get(TMPDIR_ENV) or str(path.parent)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=tmp_dir)
    os.close(fd)
    try:
        yield Path(tmp)
        shutil.move(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write(manifest: Manifest | None, stage: str, path: Path, writer, *args) -> Path:
    with atomic_path(path) as tmp:
        writer(tmp, *args)
    if manifest is not None:
        manifest.add(stage, path)
    return path


# -- stages --------------------------------------------------------------------

def stage_synth(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None):
    corpus = generate_synthetic(cfg.synthetic, cfg.seed)
    _write(manifest, "synth", out / EVENTS, graph.write_events, corpus.events)
    _write(manifest, "synth", out / RECORDS, cascade_mod.write_records, corpus.records)
    _write(manifest, "synth", out / GROUND_TRUTH, write_ground_truth, corpus)
    return corpus


def input_paths(cfg: PipelineConfig, out: Path) -> tuple[Path, Path]:
    if cfg.synthetic is not None:
        return out / EVENTS, out / RECORDS
    return Path(cfg.events_path), Path(cfg.records_path)


def extraction_settings(cfg: PipelineConfig) -> dict:
    if cfg.synthetic is not None and cfg.match_extraction:
        return dict(cfg.synthetic.extraction)
    return {"negative_mode": cfg.negative_mode, "horizon": cfg.horizon,
            "eps": unit_seconds(cfg.time_unit), "time_unit": cfg.time_unit}


def stage_build_graph(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None):
    events_path, records_path = input_paths(cfg, out)
    events = graph.read_events(events_path)
    if cfg.extend_graph:
        for rec in cascade_mod.read_records(records_path):
            chain = (rec.origin_user,) + rec.path
            events += [graph.RepostEvent(a, b, rec.final_time) for a, b in zip(chain, chain[1:])]
    g = graph.build_graph(events)
    _write(manifest, "build-graph", out / GRAPH, graph.write_edges, g)
    return g


def stage_communities(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None, g=None):
    g = g if g is not None else graph.read_edges(out / GRAPH)
    part = community.louvain(g, cfg.seed)
    _write(manifest, "communities", out / COMMUNITIES, community.write_partition, g, part)
    return part


def _cascades(cfg: PipelineConfig, out: Path, g):
    _, records_path = input_paths(cfg, out)
    records = cascade_mod.read_records(records_path)
    cascades, stats = cascade_mod.build_cascades(records, g)
    return records, cascades, stats


def stage_instances(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None, g=None):
    g = g if g is not None else graph.read_edges(out / GRAPH)
    records, cascades, stats = _cascades(cfg, out, g)
    ex = extraction_settings(cfg)
    population = sampling.top_retweeters(records, g, cfg.top_retweeter_threshold)
    if not population:
        raise ValueError(f"no user reaches {cfg.top_retweeter_threshold} reposts")
    instances = sampling.extract_instances(g, cascades, population, ex["negative_mode"],
                                           horizon=ex["horizon"], eps=ex["eps"])
    stats = dict(stats, population=len(population), instances=len(instances),
                 positives=sum(i.label for i in instances), self_loops_dropped=g.self_loops_dropped)

    def dump(path):
        with open(path, "w") as fh:
            json.dump(stats, fh, indent=2, sort_keys=True)
            fh.write("\n")

    _write(manifest, "instances", out / CASCADE_STATS, dump)
    _write(manifest, "instances", out / RAW_INSTANCES, sampling.write_instances, g, instances)
    return instances


def stage_features(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None,
                   g=None, part=None, instances=None):
    g = g if g is not None else graph.read_edges(out / GRAPH)
    part = part if part is not None else community.read_partition(out / COMMUNITIES, g)
    instances = instances if instances is not None else sampling.read_instances(out / RAW_INSTANCES, g)
    _, cascades, _ = _cascades(cfg, out, g)
    featurize(g, part, cascades, instances, cfg.lrcq, extraction_settings(cfg)["time_unit"])
    _write(manifest, "features", out / INSTANCES, sampling.write_instances, g, instances)
    return instances


def _load_matrix(out: Path, instances=None):
    if instances is None:
        instances = sampling.read_instances(out / INSTANCES, graph.read_edges(out / GRAPH))
    return sampling.design_matrix(instances)


def _balanced(cfg: PipelineConfig, X, y):
    idx = sampling.ratio_indices(y, cfg.sample_ratio, cfg.seed)
    return X[idx], y[idx]


def stage_binned(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None, instances=None):
    X, y = _load_matrix(out, instances)
    tables = []
    for measure in cfg.binned_measures:
        t = binned_mod.binned_from_matrix(X, y, measure, cfg.bin_count, cfg.error_bars)
        _write(manifest, "binned", out / "binned" / f"{measure}.csv", binned_mod.write_bin_table, t)
        _write(manifest, "binned", out / "plots" / f"adoption_{measure}.csv", binned_mod.write_plot_data,
               t.centers, t.fraction, t.half_width)
        tables.append(t)
    return tables


def stage_metadata(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None, instances=None):
    X, y = _load_matrix(out, instances)
    rows = binned_mod.metadata_conditionals(X, y)
    _write(manifest, "metadata", out / "metadata_conditionals.csv", binned_mod.write_metadata_table, rows)
    return rows


def stage_train(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None, instances=None):
    X, y = _balanced(cfg, *_load_matrix(out, instances))
    specs = [s.with_seed(cfg.seed) for s in cfg.learners]
    results = prediction.group_comparison(X, y, ["multi"], specs, cfg.seed, cfg.train_frac,
                                          cfg.folds, cfg.workers)
    for r in results:
        spec = next(s for s in specs if s.name == r.learner)
        _write(manifest, "train", out / "models" / f"{r.learner}_{r.group}.pkl", save_model,
               r.report.model, spec)
    _write(manifest, "train", out / "metrics_train.csv", prediction.write_metrics, results)
    return results


def stage_groups(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None, instances=None):
    X, y = _balanced(cfg, *_load_matrix(out, instances))
    specs = [s.with_seed(cfg.seed) for s in cfg.learners]
    results = prediction.group_comparison(X, y, cfg.groups, specs, cfg.seed, cfg.train_frac,
                                          cfg.folds, cfg.workers)
    _write(manifest, "groups", out / "metrics_groups.csv", prediction.write_metrics, results)
    return results


def stage_sweep(cfg: PipelineConfig, out: Path, manifest: Manifest | None = None, instances=None):
    X, y = _load_matrix(out, instances)
    cols = group_columns(cfg.sweep_group)
    spec = cfg.learner(cfg.sweep_learner)
    seeds = tuple(cfg.seed + i for i in range(cfg.sweep_seeds))
    grids = prediction.replicate_sweep(X[:, cols], y, spec, cfg.sweep_ratios, seeds,
                                       cfg.train_frac, cfg.workers)
    _write(manifest, "sweep", out / "sweep.csv", prediction.write_sweep, grids)
    for metric in ("precision", "recall", "f1"):
        mean, se = prediction.sweep_summary(grids, metric)
        for i, rt in enumerate(cfg.sweep_ratios):
            _write(manifest, "sweep", out / "plots" / f"sweep_{metric}_train{rt}.csv",
                   binned_mod.write_plot_data, cfg.sweep_ratios, mean[i], se[i])
    return grids


EXPERIMENT_STAGES = {
    "binned": stage_binned,
    "metadata": stage_metadata,
    "train": stage_train,
    "groups": stage_groups,
    "sweep": stage_sweep,
}


def run(cfg: PipelineConfig, out: str | os.PathLike | None = None) -> tuple[int, Manifest]:
    """Run every stage and the selected experiments; returns (exit status, manifest).

    A failing stage stops the run; the manifest is still written, marked
    ``partial`` with a stage-attributed error.
    """
    out = Path(out if out is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg.validate()
    manifest = Manifest(out)
    _write(manifest, "config", out / "config.ini",
           lambda p: Path(p).write_text(cfg.to_text(portable=True)))
    status = 0
    stage = "synth"
    try:
        if cfg.synthetic is not None:
            stage_synth(cfg, out, manifest)
        stage = "build-graph"
        g = stage_build_graph(cfg, out, manifest)
        stage = "communities"
        part = stage_communities(cfg, out, manifest, g)
        stage = "instances"
        instances = stage_instances(cfg, out, manifest, g)
        stage = "features"
        instances = stage_features(cfg, out, manifest, g, part, instances)
        for name in cfg.experiments:
            stage = name
            EXPERIMENT_STAGES[name](cfg, out, manifest, instances)
    except Exception as exc:  # noqa: BLE001 - every failure is reported through the manifest
        err = StageError(stage, exc)
        logger.error("%s", err)
        manifest.errors.append(str(err))
        status = 2
    manifest.write()
    return status, manifest
