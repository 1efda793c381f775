"""Command-line entry point.

Subcommands: synth-corpus, build-dataset, process, evaluate, anc-sim,
optimize, analyze-ratings.  Global flags --config/--seed/--jobs/--rate/
--anc-curve override the corresponding config values.  Every command is
deterministic under a fixed config and seed.
"""

from __future__ import annotations

import argparse
import shutil
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from hushlab import anc as anc_mod
from hushlab import mixgen, sources, tpe
from hushlab.audio import AudioBuffer, read_wav, write_wav
from hushlab.config import RunConfig, load_config
from hushlab.errors import ConfigError, HushlabError
from hushlab.metrics import (EvalRecord, delta_si_snr, si_snr,
                             write_eval_csv, write_eval_jsonl)
from hushlab.processors import ALGORITHMS, make_processor
from hushlab.ratings import RatingsTable, analyze_ratings, render_analysis

PROCESS_ALGORITHMS = ("drc", "eq", "agc", "mctr", "lpf", "nn", "identity")
OPTIMIZE_ALGORITHMS = ("drc", "eq", "agc")

_EQ_OPT_CORNERS = ((("low", 200.0), "gain_db_200"),
                   (("high", 2000.0), "gain_db_2000"),
                   (("high", 5000.0), "gain_db_5000"),
                   (("high", 10000.0), "gain_db_10000"),
                   (("high", 15000.0), "gain_db_15000"))

DEFAULT_OPT_SPACES = {
    "drc": {
        "threshold_db": tpe.uniform(-60.0, 0.0),
        "ratio": tpe.uniform(1.0, 40.0),
        "attack_ms": tpe.log_uniform(0.01, 50.0),
        "release_ms": tpe.log_uniform(5.0, 500.0),
    },
    "eq": {name: tpe.uniform(-12.0, 6.0) for (_b, name) in _EQ_OPT_CORNERS},
    "agc": {
        "attack_coeff": tpe.log_uniform(1e-3, 0.5),
        "release_coeff": tpe.log_uniform(1e-4, 0.1),
        "target_level_dbfs": tpe.uniform(-40.0, -10.0),
        "max_gain_db": tpe.uniform(0.0, 24.0),
    },
}


def params_to_processor_config(algorithm: str, params: dict) -> dict:
    """Map a flat optimizer point to a make_processor config dict."""
    if algorithm == "eq":
        bands = []
        for (shelf_type, corner), name in _EQ_OPT_CORNERS:
            bands.append({"type": shelf_type, "corner_hz": corner,
                          "gain_db": float(params[name])})
        return {"bands": bands}
    return {k: float(v) for k, v in params.items()}


def _map_jobs(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _load_curve(cfg: RunConfig):
    if cfg.anc_curve is None:
        return anc_mod.default_curve()
    return anc_mod.AttenuationCurve.from_csv(cfg.anc_curve)


def _manifest_path(cfg: RunConfig, args) -> Path:
    if getattr(args, "manifest", None):
        return Path(args.manifest)
    return cfg.output_dir / "manifest.jsonl"


def _entries(manifest, split: str):
    if split == "all":
        return list(manifest.entries)
    return manifest.split_entries(split)


def cmd_synth_corpus(cfg: RunConfig, args) -> int:
    cfg.corpus_dir.mkdir(parents=True, exist_ok=True)
    store = sources.synth_store(cfg.synth_clips_per_kind,
                                cfg.synth_clip_duration_s, cfg.seed, cfg.rate)
    for clip_id in sorted(store.ids()):
        clip = store.get(clip_id)
        write_wav(clip.audio, cfg.corpus_dir / f"{clip_id}.wav")
    sources.write_label_map(store, cfg.resolved_label_map())
    print(f"wrote {len(store)} clips ({cfg.synth_clips_per_kind} per kind) "
          f"to {cfg.corpus_dir}")
    return 0


def cmd_build_dataset(cfg: RunConfig, args) -> int:
    store = sources.ingest_corpus(cfg.corpus_dir, cfg.resolved_label_map(),
                                  cfg.rate)
    manifest = mixgen.build_dataset(cfg.dataset_kind, cfg.counts, store, cfg.seed)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    mixgen.write_manifest(manifest, cfg.output_dir / "manifest.jsonl")

    def render(entry):
        result = mixgen.synthesize_mixture(entry.recipe, store)
        write_wav(result.mixture, cfg.output_dir / f"{entry.id}_mix.wav")
        write_wav(result.ground_truth, cfg.output_dir / f"{entry.id}_gt.wav")

    _map_jobs(render, manifest.entries, cfg.jobs)
    for split in mixgen.SPLITS:
        print(f"{split}: {len(manifest.split_entries(split))} mixtures")
    return 0


def cmd_process(cfg: RunConfig, args) -> int:
    manifest = mixgen.read_manifest(_manifest_path(cfg, args))
    entries = _entries(manifest, args.split)
    algorithm = args.algorithm

    if algorithm == "nn":
        nn_dir = Path(args.nn_dir) if args.nn_dir else cfg.output_dir
        if not nn_dir.is_dir():
            print(f"error: nn outputs not found: expected directory {nn_dir} "
                  f"containing <id>_proc_nn.wav files", file=sys.stderr)
            return 1
        missing = [e.id for e in entries
                   if not (nn_dir / f"{e.id}_proc_nn.wav").exists()]
        if missing:
            print(f"error: missing nn outputs in {nn_dir}: "
                  + ", ".join(f"{m}_proc_nn.wav" for m in missing),
                  file=sys.stderr)
            return 1
        copied = 0
        for entry in entries:
            src = nn_dir / f"{entry.id}_proc_nn.wav"
            dst = cfg.output_dir / f"{entry.id}_proc_nn.wav"
            if src.resolve() != dst.resolve():
                shutil.copyfile(src, dst)
                copied += 1
        print(f"adopted {len(entries)} nn outputs ({copied} copied)")
        return 0

    missing = [e.id for e in entries
               if not (cfg.output_dir / f"{e.id}_mix.wav").exists()]
    if missing:
        print("error: missing mixtures: "
              + ", ".join(f"{m}_mix.wav" for m in missing), file=sys.stderr)
        return 1
    params = cfg.processor_params.get(algorithm)

    def render(entry):
        mix = read_wav(cfg.output_dir / f"{entry.id}_mix.wav")
        processor = make_processor(algorithm, params, fs=mix.sample_rate_hz)
        processor.reset()
        est = processor.process(mix.samples)
        write_wav(AudioBuffer(np.asarray(est), mix.sample_rate_hz),
                  cfg.output_dir / f"{entry.id}_proc_{algorithm}.wav")

    _map_jobs(render, entries, cfg.jobs)
    print(f"processed {len(entries)} stimuli with {algorithm}")
    return 0


def cmd_evaluate(cfg: RunConfig, args) -> int:
    manifest = mixgen.read_manifest(_manifest_path(cfg, args))
    entries = _entries(manifest, args.split)
    algorithms = args.algorithms.split(",")
    records = []
    skipped = 0
    for algorithm in algorithms:
        for entry in entries:
            proc_path = cfg.output_dir / f"{entry.id}_proc_{algorithm}.wav"
            mix_path = cfg.output_dir / f"{entry.id}_mix.wav"
            gt_path = cfg.output_dir / f"{entry.id}_gt.wav"
            if not (proc_path.exists() and mix_path.exists() and gt_path.exists()):
                skipped += 1
                continue
            proc = read_wav(proc_path)
            mix = read_wav(mix_path)
            gt = read_wav(gt_path)
            score = si_snr(proc, gt)
            delta = delta_si_snr(proc, mix, gt)
            records.append(EvalRecord(entry.id, algorithm, score, delta))
    if skipped:
        print(f"warning: {skipped} stimulus/algorithm pairs lacked files and "
              f"were skipped", file=sys.stderr)
    if not records:
        print("error: nothing to evaluate (no processed files found)",
              file=sys.stderr)
        return 1
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    write_eval_csv(records, cfg.output_dir / "eval_records.csv")
    write_eval_jsonl(records, cfg.output_dir / "eval_records.jsonl")
    with open(cfg.output_dir / "delta_sisnr_distribution.csv", "w") as fh:
        fh.write("algorithm,stimulus_id,delta_si_snr_db\n")
        for rec in records:
            fh.write(f"{rec.algorithm},{rec.stimulus_id},{rec.delta_si_snr_db:.6f}\n")
    print(f"{'algorithm':<12}{'n':>4}{'mean dSI-SNR':>14}{'std':>10}"
          f"{'mean SI-SNR':>13}")
    for algorithm in algorithms:
        deltas = [r.delta_si_snr_db for r in records if r.algorithm == algorithm]
        scores = [r.si_snr_db for r in records if r.algorithm == algorithm]
        if not deltas:
            continue
        print(f"{algorithm:<12}{len(deltas):>4}{np.mean(deltas):>14.3f}"
              f"{np.std(deltas):>10.3f}{np.mean(scores):>13.3f}")
    return 0


def cmd_anc_sim(cfg: RunConfig, args) -> int:
    curve = _load_curve(cfg)
    manifest = mixgen.read_manifest(_manifest_path(cfg, args))
    entries = _entries(manifest, args.split)
    algorithms = [a for a in args.algorithms.split(",") if a and a != "none"]
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r} for anc-sim; "
                              f"expected one of {', '.join(ALGORITHMS)}")

    def render(entry):
        mix = read_wav(cfg.output_dir / f"{entry.id}_mix.wav")
        write_wav(anc_mod.apply_attenuation(mix, curve),
                  cfg.output_dir / f"{entry.id}_st_none.wav")
        for algorithm in algorithms:
            processor = make_processor(algorithm,
                                       cfg.processor_params.get(algorithm),
                                       fs=mix.sample_rate_hz)
            out = anc_mod.selective_transparency(mix, curve, processor,
                                                 cfg.algo_gain_db)
            write_wav(out, cfg.output_dir / f"{entry.id}_st_{algorithm}.wav")

    _map_jobs(render, entries, cfg.jobs)
    print(f"wrote selective-transparency stimuli for {len(entries)} mixtures "
          f"x ({', '.join(['none'] + algorithms)})")
    return 0


def cmd_optimize(cfg: RunConfig, args) -> int:
    algorithm = args.algorithm
    manifest = mixgen.read_manifest(_manifest_path(cfg, args))
    entries = manifest.split_entries("val")
    if not entries:
        print("error: manifest has no validation split (optimize tunes on "
              "val; build dataset1/dataset2 first)", file=sys.stderr)
        return 1

    class _Pair:
        def __init__(self, mixture, ground_truth):
            self.mixture = mixture
            self.ground_truth = ground_truth

    validation = []
    for entry in entries:
        mix_path = cfg.output_dir / f"{entry.id}_mix.wav"
        gt_path = cfg.output_dir / f"{entry.id}_gt.wav"
        if not (mix_path.exists() and gt_path.exists()):
            print(f"error: missing WAV pair for {entry.id} in {cfg.output_dir}",
                  file=sys.stderr)
            return 1
        validation.append(_Pair(read_wav(mix_path), read_wav(gt_path)))
    rate = validation[0].mixture.sample_rate_hz

    if cfg.opt_space is not None:
        space = tpe.ParamSpace({name: tpe.Dim(d["kind"], d["lo"], d["hi"])
                                for name, d in cfg.opt_space.items()})
    else:
        space = tpe.ParamSpace(DEFAULT_OPT_SPACES[algorithm])

    def factory(params):
        return make_processor(algorithm,
                              params_to_processor_config(algorithm, params),
                              fs=rate)

    objective = tpe.mean_sisnr_objective(factory, validation)
    best, history = tpe.run_search(objective, space, cfg.opt_trials,
                                   cfg.opt_strategy, cfg.seed)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    tpe.write_history_csv(history, cfg.output_dir / f"opt_history_{algorithm}.csv")
    best_config = params_to_processor_config(algorithm, best.params)
    with open(cfg.output_dir / f"best_params_{algorithm}.yaml", "w") as fh:
        yaml.safe_dump({"processors": {algorithm: best_config}}, fh,
                       sort_keys=False)
    print(f"best mean SI-SNR {best.objective:.3f} dB after {len(history)} "
          f"{cfg.opt_strategy} trials")
    for key, value in best.params.items():
        print(f"  {key} = {value:.6g}")
    return 0


def cmd_analyze_ratings(cfg: RunConfig, args) -> int:
    table = RatingsTable.from_csv(args.ratings_csv)
    analysis = analyze_ratings(table, seed=cfg.seed)
    print(render_analysis(analysis))
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.output_dir / "ratings_analysis.csv"
    with open(out, "w") as fh:
        fh.write("algorithm,mean_n,mean_c,delta,p_value,p_adjusted,significance\n")
        for c in analysis.comparisons:
            fh.write(f"{c.algorithm},{c.mean_n:.6f},{c.mean_c:.6f},"
                     f"{c.delta:.6f},{c.p_value:.6g},{c.p_adjusted:.6g},"
                     f"{c.stars}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hushlab",
        description="Trigger-sound attenuation toolkit: corpus synthesis, "
                    "mixture datasets, causal DSP, ANC simulation, "
                    "evaluation, parameter search, ratings analysis.")
    parser.add_argument("--config", metavar="PATH", help="YAML run config")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--jobs", type=int, help="parallel workers for "
                        "per-stimulus stages")
    parser.add_argument("--rate", type=int, help="sample rate override (Hz)")
    parser.add_argument("--anc-curve", metavar="PATH",
                        help="attenuation curve CSV (freq_hz,attenuation_db)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("synth-corpus", help="write seeded synthetic source clips")
    sub.add_parser("build-dataset", help="draw recipes and render WAV pairs")

    p = sub.add_parser("process", help="run one algorithm over the mixtures")
    p.add_argument("--algorithm", required=True, choices=PROCESS_ALGORITHMS)
    p.add_argument("--manifest", help="manifest path (default <out>/manifest.jsonl)")
    p.add_argument("--split", default="all",
                   choices=("train", "val", "test", "all"))
    p.add_argument("--nn-dir", help="directory of externally produced "
                   "<id>_proc_nn.wav files (nn algorithm only)")

    p = sub.add_parser("evaluate", help="SI-SNR / dSI-SNR per stimulus")
    p.add_argument("--algorithms", required=True,
                   help="comma-separated algorithm list")
    p.add_argument("--manifest")
    p.add_argument("--split", default="all",
                   choices=("train", "val", "test", "all"))

    p = sub.add_parser("anc-sim", help="selective-transparency stimuli")
    p.add_argument("--algorithms", required=True,
                   help="comma-separated algorithm list")
    p.add_argument("--manifest")
    p.add_argument("--split", default="all",
                   choices=("train", "val", "test", "all"))

    p = sub.add_parser("optimize", help="TPE/random parameter search on val")
    p.add_argument("--algorithm", required=True, choices=OPTIMIZE_ALGORITHMS)
    p.add_argument("--manifest")

    p = sub.add_parser("analyze-ratings", help="group statistics on a "
                       "ratings CSV")
    p.add_argument("ratings_csv")
    return parser


_COMMANDS = {
    "synth-corpus": cmd_synth_corpus,
    "build-dataset": cmd_build_dataset,
    "process": cmd_process,
    "evaluate": cmd_evaluate,
    "anc-sim": cmd_anc_sim,
    "optimize": cmd_optimize,
    "analyze-ratings": cmd_analyze_ratings,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.jobs is not None:
            if args.jobs < 1:
                raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
            cfg.jobs = args.jobs
        if args.rate is not None:
            if args.rate <= 0:
                raise ConfigError(f"--rate must be positive, got {args.rate}")
            cfg.rate = args.rate
        if args.anc_curve is not None:
            cfg.anc_curve = Path(args.anc_curve)
        return _COMMANDS[args.command](cfg, args)
    except (HushlabError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
