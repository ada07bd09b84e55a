"""Walk through the pipeline on a small synthetic corpus.

Builds the influence graph, finds communities, rebuilds cascades, extracts
labeled instances and prints a few of the resulting tables. Everything is
written under ``demo_out/walkthrough`` (or the directory given as argv[1]).

    python demos/walkthrough.py [OUT]
"""

import json
import sys
from pathlib import Path

from retweet_influence import pipeline
from retweet_influence.config import PipelineConfig
from retweet_influence.experiments.binned import binned_from_matrix, metadata_conditionals
from retweet_influence.sampling import design_matrix

HERE = Path(__file__).resolve().parent


def main(out: Path) -> None:
    cfg = PipelineConfig.load(HERE / "configs" / "quick.cfg").validate()
    out.mkdir(parents=True, exist_ok=True)

    corpus = pipeline.stage_synth(cfg, out)
    print(f"synthetic corpus: {len(corpus.events)} repost events, {len(corpus.records)} chain records")
    print(f"  planted adoption rate {corpus.ground_truth['adoption_rate']:.3f} "
          f"over {corpus.ground_truth['decisions']} exposure decisions")

    g = pipeline.stage_build_graph(cfg, out)
    print(f"influence graph: {g.node_count} users, {g.edge_count} edges")

    part = pipeline.stage_communities(cfg, out, g=g)
    print(f"louvain: {part.community_count} communities, modularity {part.modularity:.3f}")

    inst = pipeline.stage_instances(cfg, out, g=g)
    inst = pipeline.stage_features(cfg, out, g=g, part=part, instances=inst)
    stats = json.loads((out / pipeline.CASCADE_STATS).read_text())
    print(f"cascades: {stats['cascades']} rebuilt from {stats['records']} records")
    print(f"instances: {stats['instances']} ({stats['positives']} positive)")

    X, y = design_matrix(inst)
    table = binned_from_matrix(X, y, "active_nbrs", cfg.bin_count)
    print("\nadoption probability by number of active in-neighbors")
    print(f"  {'interval':>15} {'n':>6} {'P(adopt)':>9}")
    for lo, hi, n, p, hw in table.rows():
        if n:
            print(f"  [{lo:5.2f}, {hi:5.2f}) {int(n):6d} {p:9.3f} +/- {hw:.3f}")

    print("\nmetadata bits")
    for r in metadata_conditionals(X, y):
        print(f"  {r.bit:12s} P(adopt|0)={r.p_given_0:.3f}  P(adopt|1)={r.p_given_1:.3f}")

    results = pipeline.stage_groups(cfg, out, instances=inst)
    print("\nheld-out F1 by measurement group")
    for r in results:
        print(f"  {r.learner:3s} {r.group:13s} {r.report.f1:.3f}")
    print(f"\nfiles written under {out}: {sum(1 for p in out.rglob('*') if p.is_file())}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo_out") / "walkthrough")
