"""Precision and recall as the negative:positive ratio changes.

Trains a random forest at each train ratio and scores it at each test
ratio, averaging over a few seeds. Along a row (fixed train ratio) recall
stays put while precision can only fall, since extra test rows are all
negatives.

    python demos/imbalance_sweep.py [OUT] [SEEDS]
"""

import sys
from pathlib import Path

import numpy as np

from retweet_influence import pipeline
from retweet_influence.config import PipelineConfig
from retweet_influence.experiments.prediction import replicate_sweep, sweep_summary
from retweet_influence.features import group_columns
from retweet_influence.learners import LearnerSpec
from retweet_influence.sampling import design_matrix

HERE = Path(__file__).resolve().parent


def show(name, mean, ratios):
    print(f"\n{name} (rows: train ratio, columns: test ratio)")
    print("      " + " ".join(f"{r:6d}" for r in ratios))
    for r, row in zip(ratios, mean):
        print(f"{r:5d} " + " ".join(f"{v:6.3f}" for v in row))


def main(out: Path, seeds: int) -> None:
    cfg = PipelineConfig.load(HERE / "configs" / "imbalance.cfg").validate()
    out.mkdir(parents=True, exist_ok=True)
    pipeline.stage_synth(cfg, out)
    g = pipeline.stage_build_graph(cfg, out)
    part = pipeline.stage_communities(cfg, out, g=g)
    inst = pipeline.stage_instances(cfg, out, g=g)
    X, y = design_matrix(pipeline.stage_features(cfg, out, g=g, part=part, instances=inst))

    # a fixed 1:9 pool so every cell of the grid is affordable
    rng = np.random.default_rng(cfg.seed)
    n_pos = min(300, int(y.sum()), int((1 - y).sum()) // 9)
    rows = np.sort(np.concatenate([rng.choice(np.flatnonzero(y == 1), n_pos, replace=False),
                                   rng.choice(np.flatnonzero(y == 0), 9 * n_pos, replace=False)]))
    spec = LearnerSpec("random_forest", {"n_trees": 30}, cfg.seed)  # fewer trees keep the demo quick
    ratios = tuple(range(1, 10))
    grids = replicate_sweep(X[rows][:, group_columns("multi")], y[rows], spec, ratios, range(seeds))
    for metric in ("precision", "recall", "f1"):
        show(metric, sweep_summary(grids, metric)[0], ratios)


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out") / "imbalance"
    main(out, int(sys.argv[2]) if len(sys.argv) > 2 else 3)
