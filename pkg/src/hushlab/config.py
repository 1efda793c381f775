"""Run configuration: a YAML document with fixed sections.

Sections: audio (rate), corpus (dir / label_map / synthetic), dataset
(kind, counts, seed), processors (per-algorithm params), anc (curve,
algo_gain_db), optimize (strategy, n_trials, space), output (dir).
Unknown keys anywhere are rejected; all paths resolve relative to the
config file's directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from hushlab.audio import DEFAULT_RATE
from hushlab.errors import ConfigError
from hushlab.mixgen import DATASET_KINDS, DESK_COUNTS, SPLITS


@dataclass
class RunConfig:
    rate: int = DEFAULT_RATE
    corpus_dir: Path = Path("corpus")
    label_map: Path = None  # defaults to corpus_dir / "labels.csv"
    synth_clips_per_kind: int = 3
    synth_clip_duration_s: float = 6.0
    dataset_kind: str = "dataset1"
    counts: dict = field(default_factory=lambda: dict(DESK_COUNTS))
    seed: int = 0
    processor_params: dict = field(default_factory=dict)
    anc_curve: Path = None  # packaged placeholder curve when None
    algo_gain_db: float = 0.0
    opt_strategy: str = "tpe"
    opt_trials: int = 50
    opt_space: dict = None  # per-algorithm default space when None
    output_dir: Path = Path("out")
    jobs: int = 1

    def resolved_label_map(self) -> Path:
        return self.label_map if self.label_map else self.corpus_dir / "labels.csv"


def _require_mapping(value, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {where!r} must be a mapping, got {type(value).__name__}")
    return value


def _take(section: dict, where: str, known: dict) -> dict:
    extra = set(section) - set(known)
    if extra:
        raise ConfigError(f"unknown keys {sorted(extra)} in section {where!r}; "
                          f"known: {sorted(known)}")
    out = {}
    for key, convert in known.items():
        if key in section and section[key] is not None:
            try:
                out[key] = convert(section[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{where}.{key}: {exc}") from exc
    return out


def load_config(path=None) -> RunConfig:
    """Load a RunConfig, or defaults when ``path`` is None.

    Raises ``ConfigError`` for unknown sections/keys or malformed
    values.  Path-valued entries are resolved against the config file's
    directory.
    """
    cfg = RunConfig()
    if path is None:
        return cfg
    path = Path(path)
    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    doc = _require_mapping(doc, str(path))
    base = path.resolve().parent

    known_sections = ("audio", "corpus", "dataset", "processors", "anc",
                      "optimize", "output")
    extra = set(doc) - set(known_sections)
    if extra:
        raise ConfigError(f"{path}: unknown sections {sorted(extra)}; "
                          f"known: {sorted(known_sections)}")

    audio = _take(_require_mapping(doc.get("audio"), "audio"), "audio",
                  {"rate": int})
    if "rate" in audio:
        if audio["rate"] <= 0:
            raise ConfigError(f"audio.rate must be positive, got {audio['rate']}")
        cfg.rate = audio["rate"]

    corpus = _require_mapping(doc.get("corpus"), "corpus")
    taken = _take(corpus, "corpus",
                  {"dir": str, "label_map": str, "synthetic": dict})
    if "dir" in taken:
        cfg.corpus_dir = base / taken["dir"]
    if "label_map" in taken:
        cfg.label_map = base / taken["label_map"]
    synth = _take(_require_mapping(taken.get("synthetic"), "corpus.synthetic"),
                  "corpus.synthetic",
                  {"clips_per_kind": int, "clip_duration_s": float})
    cfg.synth_clips_per_kind = synth.get("clips_per_kind", cfg.synth_clips_per_kind)
    cfg.synth_clip_duration_s = synth.get("clip_duration_s", cfg.synth_clip_duration_s)
    if cfg.synth_clips_per_kind < 0:
        raise ConfigError("corpus.synthetic.clips_per_kind must be >= 0")

    dataset = _take(_require_mapping(doc.get("dataset"), "dataset"), "dataset",
                    {"kind": str, "counts": dict, "seed": int})
    if "kind" in dataset:
        if dataset["kind"] not in DATASET_KINDS:
            raise ConfigError(f"dataset.kind must be one of {DATASET_KINDS}, "
                              f"got {dataset['kind']!r}")
        cfg.dataset_kind = dataset["kind"]
    if "counts" in dataset:
        counts = _take(dataset["counts"], "dataset.counts",
                       {s: int for s in SPLITS})
        if any(v < 0 for v in counts.values()):
            raise ConfigError("dataset.counts must be >= 0")
        cfg.counts = {**{s: 0 for s in SPLITS}, **counts}
    cfg.seed = dataset.get("seed", cfg.seed)

    cfg.processor_params = _require_mapping(doc.get("processors"), "processors")
    for name, params in cfg.processor_params.items():
        _require_mapping(params, f"processors.{name}")

    anc = _take(_require_mapping(doc.get("anc"), "anc"), "anc",
                {"curve": str, "algo_gain_db": float})
    if "curve" in anc:
        cfg.anc_curve = base / anc["curve"]
    cfg.algo_gain_db = anc.get("algo_gain_db", cfg.algo_gain_db)

    optimize = _take(_require_mapping(doc.get("optimize"), "optimize"), "optimize",
                     {"strategy": str, "n_trials": int, "space": dict})
    if "strategy" in optimize:
        if optimize["strategy"] not in ("tpe", "random"):
            raise ConfigError(f"optimize.strategy must be tpe or random, "
                              f"got {optimize['strategy']!r}")
        cfg.opt_strategy = optimize["strategy"]
    if "n_trials" in optimize:
        if optimize["n_trials"] < 1:
            raise ConfigError("optimize.n_trials must be >= 1")
        cfg.opt_trials = optimize["n_trials"]
    if "space" in optimize:
        for dim_name, dim_spec in _require_mapping(optimize["space"],
                                                   "optimize.space").items():
            _take(_require_mapping(dim_spec, f"optimize.space.{dim_name}"),
                  f"optimize.space.{dim_name}",
                  {"kind": str, "lo": float, "hi": float})
        cfg.opt_space = optimize["space"]

    output = _take(_require_mapping(doc.get("output"), "output"), "output",
                   {"dir": str})
    if "dir" in output:
        cfg.output_dir = base / output["dir"]
    return cfg
