"""Pipeline configuration in a sectioned ``key = value`` text format.

Every key has a default; unknown sections or keys are rejected. Exactly one of
``[input]`` (real TSV files) or ``[synthetic]`` must be present.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field, fields

from .experiments.synthetic import SyntheticConfig
from .features import FEATURE_NAMES, GROUPS, TIME_UNITS, LrcqParams
from .learners import DEFAULTS, KINDS, LearnerSpec
from .sampling import NEGATIVE_MODES

EXPERIMENTS = ("binned", "metadata", "train", "groups", "sweep")
PIPELINE_KEYS = ("seed", "time_unit", "top_retweeter_threshold", "negative_mode", "horizon",
                 "sample_ratio", "train_frac", "folds", "bin_count", "error_bars", "workers", "out")


class ConfigError(ValueError):
    pass


def _csv(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def _num(value: str):
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    if value in ("true", "false"):
        return value == "true"
    return value


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ", ".join(_fmt(v) for v in value)
    return str(value)


@dataclass
class PipelineConfig:
    events_path: str | None = None
    records_path: str | None = None
    extend_graph: bool = False
    synthetic: SyntheticConfig | None = None
    match_extraction: bool = True
    seed: int = 0
    time_unit: str = "seconds"
    top_retweeter_threshold: int = 100
    negative_mode: str = "window_end"
    horizon: float = 0.0
    sample_ratio: float = 1.0
    train_frac: float = 0.7
    folds: int = 10
    bin_count: int = 10
    error_bars: str = "standard_error"
    lrcq: LrcqParams = field(default_factory=LrcqParams)
    learners: tuple[LearnerSpec, ...] = tuple(LearnerSpec(k) for k in KINDS if k != "decision_tree")
    experiments: tuple[str, ...] = ("binned", "metadata", "groups", "sweep")
    groups: tuple[str, ...] = ("neighborhood", "structural", "lrcq", "cascade", "temporal",
                               "metadata", "multi")
    binned_measures: tuple[str, ...] = tuple(f for f in FEATURE_NAMES
                                             if f not in ("has_link", "has_mention", "has_hashtag"))
    sweep_learner: str = "random_forest"
    sweep_group: str = "multi"
    sweep_ratios: tuple[int, ...] = tuple(range(1, 10))
    sweep_seeds: int = 20
    workers: int = 1
    out: str = "out"

    def validate(self, check_paths: bool = True) -> "PipelineConfig":
        real = self.events_path is not None or self.records_path is not None
        if real == (self.synthetic is not None):
            raise ConfigError("exactly one of [input] or [synthetic] must be given")
        if real:
            if self.events_path is None or self.records_path is None:
                raise ConfigError("[input] needs both events and records")
            if check_paths:
                for p in (self.events_path, self.records_path):
                    if not os.path.isfile(p):
                        raise ConfigError(f"input file not found: {p}")
        else:
            try:
                self.synthetic.validate()
            except ValueError as exc:
                raise ConfigError(f"[synthetic] {exc}") from None
        if self.time_unit not in TIME_UNITS:
            raise ConfigError(f"time_unit must be one of {sorted(TIME_UNITS)}")
        if self.negative_mode not in NEGATIVE_MODES:
            raise ConfigError(f"negative_mode must be one of {NEGATIVE_MODES}")
        if self.error_bars not in ("standard_error", "sample_std"):
            raise ConfigError("error_bars must be standard_error or sample_std")
        for e in self.experiments:
            if e not in EXPERIMENTS:
                raise ConfigError(f"unknown experiment {e!r}; choose from {EXPERIMENTS}")
        for gname in self.groups + (self.sweep_group,):
            if gname not in GROUPS:
                raise ConfigError(f"unknown feature group {gname!r}")
        for m in self.binned_measures:
            if m not in FEATURE_NAMES:
                raise ConfigError(f"unknown measure {m!r}")
        if self.sweep_learner not in KINDS:
            raise ConfigError(f"unknown sweep learner {self.sweep_learner!r}")
        if not self.learners:
            raise ConfigError("no learners configured")
        if self.workers < 1 or self.folds < 2 or self.sweep_seeds < 1:
            raise ConfigError("workers >= 1, folds >= 2 and sweep_seeds >= 1 required")
        return self

    def learner(self, kind: str) -> LearnerSpec:
        for s in self.learners:
            if s.kind == kind:
                return s.with_seed(self.seed)
        return LearnerSpec(kind, seed=self.seed)

    # -- text format ---------------------------------------------------------

    def to_text(self, portable: bool = False) -> str:
        """INI text that :meth:`from_text` reads back.

        ``portable`` leaves out ``out`` and ``workers``, which affect neither
        results nor file contents, so copies of a run compare equal.
        """
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        if self.synthetic is None:
            cp["input"] = {"events": self.events_path or "", "records": self.records_path or "",
                           "extend_graph": _fmt(self.extend_graph)}
        else:
            s = self.synthetic
            sec = {f.name: _fmt(getattr(s, f.name)) for f in fields(s) if f.name != "weights"}
            sec["weights"] = ", ".join(f"{k}:{_fmt(float(v))}" for k, v in sorted(s.weights.items()))
            sec["match_extraction"] = _fmt(self.match_extraction)
            cp["synthetic"] = sec
        skip = ("out", "workers") if portable else ()
        cp["pipeline"] = {k: _fmt(getattr(self, k)) for k in PIPELINE_KEYS if k not in skip}
        cp["lrcq"] = {f.name: _fmt(getattr(self.lrcq, f.name)) for f in fields(self.lrcq)}
        lsec = {"kinds": _fmt(tuple(s.kind for s in self.learners))}
        for s in self.learners:
            for k, v in sorted(s.params.items()):
                lsec[f"{s.kind}.{k}"] = _fmt(v)
        cp["learners"] = lsec
        cp["experiments"] = {
            "run": _fmt(self.experiments), "groups": _fmt(self.groups),
            "binned_measures": _fmt(self.binned_measures), "sweep_learner": self.sweep_learner,
            "sweep_group": self.sweep_group, "sweep_ratios": _fmt(self.sweep_ratios),
            "sweep_seeds": _fmt(self.sweep_seeds),
        }
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        known = {"input", "synthetic", "pipeline", "lrcq", "learners", "experiments"}
        extra = set(cp.sections()) - known
        if extra:
            raise ConfigError(f"unknown sections {sorted(extra)}")
        cfg = cls()
        try:
            _apply(cfg, cp)
        except (KeyError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None
        return cfg

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())


def _take(section, key, conv, default):
    return conv(section.pop(key)) if key in section else default


def _reject_leftover(name: str, section: dict) -> None:
    if section:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(section)}")


def _apply(cfg: PipelineConfig, cp: configparser.ConfigParser) -> None:
    if cp.has_section("input"):
        sec = dict(cp["input"])
        cfg.events_path = sec.pop("events", None) or None
        cfg.records_path = sec.pop("records", None) or None
        cfg.extend_graph = _take(sec, "extend_graph", _bool, False)
        _reject_leftover("input", sec)
    if cp.has_section("synthetic"):
        sec = dict(cp["synthetic"])
        s = SyntheticConfig()
        cfg.match_extraction = _take(sec, "match_extraction", _bool, True)
        weights = sec.pop("weights", "")
        s.weights = {}
        for item in _csv(weights):
            k, _, v = item.partition(":")
            s.weights[k.strip()] = float(v)
        for f in fields(s):
            if f.name in sec:
                raw = sec.pop(f.name)
                default = getattr(s, f.name)
                if isinstance(default, tuple):
                    setattr(s, f.name, tuple(float(x) for x in _csv(raw)))
                elif isinstance(default, bool):
                    setattr(s, f.name, _bool(raw))
                else:
                    setattr(s, f.name, type(default)(raw))
        _reject_leftover("synthetic", sec)
        cfg.synthetic = s
    if cp.has_section("pipeline"):
        sec = dict(cp["pipeline"])
        for key in PIPELINE_KEYS:
            if key in sec:
                setattr(cfg, key, type(getattr(cfg, key))(sec.pop(key)))
        _reject_leftover("pipeline", sec)
    if cp.has_section("lrcq"):
        sec = dict(cp["lrcq"])
        cfg.lrcq = LrcqParams(**{k: float(sec.pop(k)) for k in ("w", "a", "b", "mu") if k in sec})
        _reject_leftover("lrcq", sec)
    if cp.has_section("learners"):
        sec = dict(cp["learners"])
        kinds = _csv(sec.pop("kinds", ",".join(s.kind for s in cfg.learners)))
        params: dict[str, dict] = {k: {} for k in kinds}
        for key in list(sec):
            kind, _, name = key.partition(".")
            if kind not in params or name not in DEFAULTS.get(kind, {}):
                raise ConfigError(f"unknown learner option {key!r}")
            params[kind][name] = _num(sec.pop(key))
        cfg.learners = tuple(LearnerSpec(k, params[k]) for k in kinds)
    if cp.has_section("experiments"):
        sec = dict(cp["experiments"])
        cfg.experiments = _take(sec, "run", _csv, cfg.experiments)
        cfg.groups = _take(sec, "groups", _csv, cfg.groups)
        cfg.binned_measures = _take(sec, "binned_measures", _csv, cfg.binned_measures)
        cfg.sweep_learner = _take(sec, "sweep_learner", str.strip, cfg.sweep_learner)
        cfg.sweep_group = _take(sec, "sweep_group", str.strip, cfg.sweep_group)
        cfg.sweep_ratios = _take(sec, "sweep_ratios", lambda v: tuple(int(x) for x in _csv(v)),
                                 cfg.sweep_ratios)
        cfg.sweep_seeds = _take(sec, "sweep_seeds", int, cfg.sweep_seeds)
        _reject_leftover("experiments", sec)
