"""Command-line entry point.

Every subcommand takes ``--config``; ``--seed``, ``--workers`` and ``--out``
override the matching config keys. Stage subcommands read the files earlier
stages left in the output directory. Exit status is 0 on success, 1 on usage
or configuration errors and 2 on runtime errors. Temporary files go to
``$RETWEET_INFLUENCE_TMPDIR`` when it is set.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, PipelineConfig

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _binned_and_metadata(cfg, out):
    pipeline.stage_binned(cfg, out)
    pipeline.stage_metadata(cfg, out)


STAGES = {
    "synth": (pipeline.stage_synth, "generate a synthetic corpus into the output directory"),
    "build-graph": (pipeline.stage_build_graph, "build the influence graph from repost events"),
    "communities": (pipeline.stage_communities, "detect communities with Louvain"),
    "instances": (pipeline.stage_instances, "rebuild cascades and extract labeled instances"),
    "features": (pipeline.stage_features, "compute the measurement vector for every instance"),
    "binned": (_binned_and_metadata, "binned adoption probability and metadata conditionals"),
    "train": (pipeline.stage_train, "train every configured learner on the multi group"),
    "groups": (pipeline.stage_groups, "compare measurement groups across learners"),
    "sweep": (pipeline.stage_sweep, "negative:positive ratio sweep"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="pipeline configuration file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--workers", type=int, help="cap on worker processes")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="retweet-influence", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, help_) in STAGES.items():
        sub.add_parser(name, parents=[common], help=help_)
    run = sub.add_parser("run", parents=[common], help="all stages plus the selected experiments")
    run.add_argument("--synthetic", metavar="CONFIG",
                     help="same as --config; the file must hold a [synthetic] section")
    return parser


def load_config(args) -> PipelineConfig:
    path = args.config
    synth = getattr(args, "synthetic", None)
    if synth is not None:
        if path is not None and path != synth:
            raise ConfigError("give either --config or --synthetic, not both")
        path = synth
    if path is None:
        raise ConfigError("--config is required")
    try:
        cfg = PipelineConfig.load(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    if synth is not None and cfg.synthetic is None:
        raise ConfigError(f"{synth} has no [synthetic] section")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.out is not None:
        cfg.out = args.out
    return cfg.validate()


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = load_config(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out = Path(cfg.out)
    if args.command == "run":
        status, manifest = pipeline.run(cfg, out)
        for err in manifest.errors:
            print(err, file=sys.stderr)
        print(out / pipeline.MANIFEST)
        return status
    if args.command == "synth" and cfg.synthetic is None:
        print("config: synth needs a [synthetic] section", file=sys.stderr)
        return EXIT_USAGE
    try:
        out.mkdir(parents=True, exist_ok=True)
        STAGES[args.command][0](cfg, out)
    except Exception as exc:  # noqa: BLE001 - reported with the stage name
        print(pipeline.StageError(args.command, exc), file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
