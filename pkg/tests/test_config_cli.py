import hashlib
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import pytest

from retweet_influence import cli, pipeline
from retweet_influence.config import ConfigError, PipelineConfig
from retweet_influence.learners import LearnerSpec

SMALL = """\
[synthetic]
n_nodes = 120
n_communities = 3
p_in = 0.1
p_out = 0.01
n_microblogs = 20
bias = -3.0
weights = active_nbrs:0.8, pne:4.0, has_hashtag:1.0

[pipeline]
top_retweeter_threshold = 0
folds = 3

[learners]
kinds = random_forest, gaussian_nb
random_forest.n_trees = 5

[experiments]
run = {run}
groups = neighborhood, multi
binned_measures = active_nbrs, pne
sweep_seeds = 2
sweep_ratios = 1, 2
"""


def _cfg_file(tmp_path, run="binned, metadata, train, groups, sweep", text=None):
    p = tmp_path / "c.cfg"
    p.write_text(text if text is not None else SMALL.format(run=run))
    return p


def test_config_round_trip(tmp_path):
    cfg = PipelineConfig.load(_cfg_file(tmp_path))
    back = PipelineConfig.from_text(cfg.to_text())
    assert back == cfg
    assert back.synthetic.weights == {"active_nbrs": 0.8, "pne": 4.0, "has_hashtag": 1.0}
    assert back.learners[0] == LearnerSpec("random_forest", {"n_trees": 5})
    assert "\nout =" not in cfg.to_text(portable=True) and "\nout =" in cfg.to_text()


def test_defaults_validate_for_real_input(tmp_path):
    (tmp_path / "a.tsv").write_text("x\ty\t1\n")
    (tmp_path / "b.tsv").write_text("")
    cfg = PipelineConfig.from_text(f"[input]\nevents = {tmp_path / 'a.tsv'}\nrecords = {tmp_path / 'b.tsv'}\n")
    assert cfg.validate() is cfg
    assert cfg.top_retweeter_threshold == 100 and cfg.sweep_ratios == tuple(range(1, 10))


@pytest.mark.parametrize("text", [
    "[input]\nevents = a\nrecords = b\n[synthetic]\nn_nodes = 10\n",
    "[pipeline]\nseed = 1\n",
    "[synthetic]\nn_nodes = 10\n[pipeline]\ntime_unit = fortnights\n",
    "[synthetic]\nn_nodes = 10\n[experiments]\nrun = everything\n",
    "[synthetic]\nn_nodes = 10\n[experiments]\ngroups = content\n",
    "[synthetic]\nn_nodes = 10\nweights = retweets:1\n",
    "[synthetic]\nn_nodes = 10\n[learners]\nrandom_forest.depth = 3\n",
    "[synthetic]\nn_nodes = 10\n[pipeline]\nfolds = 1\n",
])
def test_invalid_configs(text):
    with pytest.raises(ConfigError):
        PipelineConfig.from_text(text).validate()


@pytest.mark.parametrize("text", ["[weird]\nx = 1\n", "[pipeline]\nnot_a_key = 1\n", "no section"])
def test_unparseable_configs(text):
    with pytest.raises(ConfigError):
        PipelineConfig.from_text(text)


def test_missing_input_file(tmp_path):
    cfg = PipelineConfig.from_text(f"[input]\nevents = {tmp_path / 'nope'}\nrecords = {tmp_path / 'nope'}\n")
    with pytest.raises(ConfigError):
        cfg.validate()


def test_usage_errors_exit_1(tmp_path, capsys):
    assert cli.main([]) == 1
    assert cli.main(["frobnicate"]) == 1
    assert cli.main(["run"]) == 1
    assert cli.main(["run", "--config", str(tmp_path / "missing.cfg")]) == 1
    bad = _cfg_file(tmp_path, text="[pipeline]\nseed = 1\n")
    assert cli.main(["run", "--config", str(bad)]) == 1
    assert cli.main(["run", "--seed", "x", "--config", str(_cfg_file(tmp_path))]) == 1
    err = capsys.readouterr().err
    assert "config:" in err


def test_run_synthetic_end_to_end(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["run", "--synthetic", str(_cfg_file(tmp_path)), "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == str(out / "manifest.json")
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "ok" and manifest["errors"] == []
    paths = {f["path"] for f in manifest["files"]}
    for want in ["config.ini", "graph.tsv", "communities.tsv", "instances.csv", "metrics_groups.csv",
                 "metrics_train.csv", "sweep.csv", "metadata_conditionals.csv", "binned/pne.csv",
                 "plots/adoption_active_nbrs.csv", "plots/sweep_f1_train2.csv", "models/RF_multi.pkl"]:
        assert want in paths
    for f in manifest["files"]:
        data = (out / f["path"]).read_bytes()
        assert f["bytes"] == len(data) and f["sha256"] == hashlib.sha256(data).hexdigest()
    assert not [p for p in out.rglob(".*") if p.is_file()]  # no temporaries left behind


def test_experiment_subset_writes_only_its_outputs(tmp_path):
    out = tmp_path / "out"
    cfg = PipelineConfig.load(_cfg_file(tmp_path, run="binned"))
    status, manifest = pipeline.run(cfg, out)
    assert status == 0
    stages = {stage for stage in manifest.entries.values()}
    assert stages == {"config", "synth", "build-graph", "communities", "instances", "features", "binned"}
    assert sorted(p.name for p in (out / "binned").iterdir()) == ["active_nbrs.csv", "pne.csv"]
    assert not (out / "metrics_groups.csv").exists() and not (out / "sweep.csv").exists()


def test_stage_subcommands_chain(tmp_path):
    cfg_path = str(_cfg_file(tmp_path, run="groups"))
    out = str(tmp_path / "out")
    for cmd in ["synth", "build-graph", "communities", "instances", "features", "binned", "groups"]:
        assert cli.main([cmd, "--config", cfg_path, "--out", out]) == 0, cmd
    assert (Path(out) / "metrics_groups.csv").exists()
    assert (Path(out) / "binned" / "pne.csv").exists()
    assert (Path(out) / "metadata_conditionals.csv").exists()


def test_stage_without_prerequisites_exits_2(tmp_path, capsys):
    cfg_path = str(_cfg_file(tmp_path))
    assert cli.main(["communities", "--config", cfg_path, "--out", str(tmp_path / "empty")]) == 2
    assert "[communities]" in capsys.readouterr().err


def test_runtime_failure_gives_partial_manifest(tmp_path, capsys):
    (tmp_path / "a.tsv").write_text("only\ttwo\n")
    (tmp_path / "b.tsv").write_text("")
    cfg = _cfg_file(tmp_path, text=f"[input]\nevents = {tmp_path / 'a.tsv'}\nrecords = {tmp_path / 'b.tsv'}\n")
    out = tmp_path / "out"
    assert cli.main(["run", "--config", str(cfg), "--out", str(out)]) == 2
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "partial"
    assert manifest["errors"][0].startswith("[build-graph] ValueError")
    assert [f["path"] for f in manifest["files"]] == ["config.ini"]


def test_temporaries_go_to_env_dir(tmp_path, monkeypatch):
    scratch = tmp_path / "scratch"
    scratch.mkdir()
    seen = []
    real = tempfile.mkstemp

    def spy(*args, **kwargs):
        seen.append(kwargs.get("dir"))
        return real(*args, **kwargs)

    monkeypatch.setenv(pipeline.TMPDIR_ENV, str(scratch))
    monkeypatch.setattr(pipeline.tempfile, "mkstemp", spy)
    cfg = PipelineConfig.load(_cfg_file(tmp_path, run="metadata"))
    assert pipeline.run(cfg, tmp_path / "out")[0] == 0
    assert seen and set(seen) == {str(scratch)}
    assert list(scratch.iterdir()) == []


def test_failed_write_leaves_no_file(tmp_path):
    target = tmp_path / "x.txt"
    with pytest.raises(RuntimeError):
        with pipeline.atomic_path(target) as tmp:
            tmp.write_text("half")
            raise RuntimeError("boom")
    assert not target.exists() and list(tmp_path.iterdir()) == []


def test_seed_override_and_manifest_determinism(tmp_path):
    cfg_path = str(_cfg_file(tmp_path, run="binned, groups"))
    a, b, c = (str(tmp_path / n) for n in "abc")
    assert cli.main(["run", "--config", cfg_path, "--out", a]) == 0
    assert cli.main(["run", "--config", cfg_path, "--out", b, "--workers", "2"]) == 0
    assert cli.main(["run", "--config", cfg_path, "--out", c, "--seed", "9"]) == 0
    ma, mb, mc = ((Path(d) / "manifest.json").read_bytes() for d in (a, b, c))
    assert ma == mb
    assert ma != mc


def test_module_entry_point_exit_codes(tmp_path):
    run = [sys.executable, "-m", "retweet_influence"]
    assert subprocess.run(run + ["--help"], capture_output=True).returncode == 0
    assert subprocess.run(run + ["sweep"], capture_output=True).returncode == 1
