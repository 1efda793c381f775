"""Acceptance gate: one test per required behavior, with runtime budgets.

Each test aggregates its required checks into a single pass/fail line
emitted through the ``acceptance_report`` fixture, then asserts the
result and its wall-clock budget.
"""

import dataclasses
import time

import numpy as np

from helpers import FS, buf, db, rms, sine, steady_gain_db
from hushlab.anc import (AttenuationCurve, apply_attenuation, default_curve,
                         selective_transparency)
from hushlab.metrics import bh_adjust, delta_si_snr, si_snr
from hushlab.mixgen import (DESK_COUNTS, MixtureRecipe, build_dataset,
                            splitmix64, synthesize_mixture)
from hushlab.processors import ALGORITHMS, make_processor
from hushlab.processors.drc import DrcParams, static_gain_curve
from hushlab.ratings import RatingsTable, aggregate_ratings
from hushlab.sources import ClipStore, synth_source, synth_store
from hushlab.tpe import ParamSpace, run_search, uniform

DSP_ALGORITHMS = ("drc", "eq", "agc", "mctr", "lpf")


def _elapsed(t0: float) -> float:
    return time.perf_counter() - t0


def test_si_snr_metric_properties(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    ref = rng.standard_normal(32000)
    noise = rng.standard_normal(32000)
    noise -= ref * np.dot(noise, ref) / np.dot(ref, ref)
    est = ref + 0.2 * noise

    checks = []
    base = si_snr(est, ref)
    for alpha in (0.5, 2.0, 10.0):
        checks.append(abs(si_snr(alpha * est, ref) - base) < 1e-6)
        checks.append(abs(si_snr(est, alpha * ref) - base) < 1e-6)
    checks.append(si_snr(ref, ref) == 100.0)
    mix = ref + noise
    checks.append(abs(delta_si_snr(mix, mix, ref)) < 1e-9)
    gain = si_snr(ref + 0.1 * noise, ref) - base
    checks.append(abs(gain - 6.02) < 0.1)

    elapsed = _elapsed(t0)
    ok = all(checks) and elapsed < 1.0
    assert acceptance_report(
        "si-snr metric properties", ok,
        f"scale-invariance/clamp/zero-delta/halved-error gain "
        f"{gain:+.3f} dB, {elapsed:.2f} s (budget 1 s)")
    assert ok


def test_dsp_algorithm_defaults(acceptance_report):
    t0 = time.perf_counter()
    checks = []

    # compressor: measured steady sine levels track the static curve
    params = DrcParams()
    worst = 0.0
    for level in np.arange(-30.0, 0.1, 2.5):
        x = sine(997.0, 1.0, amp=10 ** (level / 20.0))
        drc = make_processor("drc", {}, FS)
        y = drc.process(x)
        out_level = db(np.max(np.abs(y[len(y) // 2:])))
        want = static_gain_curve(params, level)
        worst = max(worst, abs(out_level - want))
    checks.append(worst < 0.5)

    # equalizer: low-shelf cut fully expressed well below the corner
    eq_gain = steady_gain_db(make_processor("eq", {}, FS).process, 20.0)
    checks.append(abs(eq_gain - (-8.0)) < 0.5)

    # low-pass: half-power at the cutoff, deep stopband
    lpf_1k = steady_gain_db(make_processor("lpf", {}, FS).process, 1000.0)
    lpf_8k = steady_gain_db(make_processor("lpf", {}, FS).process, 8000.0)
    checks.append(abs(lpf_1k - (-3.01)) < 0.3)
    checks.append(lpf_8k <= -70.0)

    # transient suppressor: clicks ducked, stationary noise untouched
    n = FS
    click = np.zeros(n)
    burst = int(0.005 * FS)
    window = np.hanning(burst)
    pos = FS // 2
    click[pos:pos + burst] = 0.5 * window * np.sin(
        2 * np.pi * 3000.0 * np.arange(burst) / FS)
    out = make_processor("mctr", {}, FS).process(click)
    peak_drop = db(np.max(np.abs(click))) - db(np.max(np.abs(out)))
    checks.append(peak_drop >= 6.0)
    noise = 0.05 * np.random.default_rng(1).standard_normal(2 * FS)
    out_n = make_processor("mctr", {}, FS).process(noise)
    rms_shift = abs(db(rms(out_n) / rms(noise)))
    checks.append(rms_shift < 1.0)

    elapsed = _elapsed(t0)
    ok = all(checks) and elapsed < 30.0
    assert acceptance_report(
        "dsp algorithm defaults", ok,
        f"drc curve err {worst:.3f} dB, eq@20Hz {eq_gain:+.2f} dB, "
        f"lpf {lpf_1k:+.2f}/{lpf_8k:+.1f} dB, click -{peak_drop:.1f} dB, "
        f"noise shift {rms_shift:.3f} dB, {elapsed:.1f} s (budget 30 s)")
    assert ok


def test_streaming_processor_laws(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    x = 0.2 * rng.standard_normal(3 * FS)
    checks = []
    for name in DSP_ALGORITHMS:
        whole = make_processor(name, {}, FS).process(x)

        # block-partition bit-identity over a random partition
        part_rng = np.random.default_rng(11)
        proc = make_processor(name, {}, FS)
        pieces = []
        i = 0
        while i < len(x):
            step = int(part_rng.integers(1, 4096))
            pieces.append(proc.process(x[i:i + step]))
            i += step
        checks.append(bool(np.array_equal(np.concatenate(pieces), whole)))

        # causality: a tail perturbation cannot reach earlier samples
        y = x.copy()
        y[2 * FS:] += 0.5
        out_y = make_processor(name, {}, FS).process(y)
        checks.append(bool(np.array_equal(out_y[:2 * FS], whole[:2 * FS])))

    elapsed = _elapsed(t0)
    ok = all(checks) and elapsed < 30.0
    assert acceptance_report(
        "streaming processor laws", ok,
        f"causality + partition bit-identity for {len(DSP_ALGORITHMS)} "
        f"algorithms, {elapsed:.1f} s (budget 30 s)")
    assert ok


def _component_ratios(recipe: MixtureRecipe, store: ClipStore):
    """Per-recipe neutral/trigger and background/trigger level ratios.

    Each ratio is measured inside a single synthesis run (the other
    component silenced at -200 dB), so the shared peak-guard scaling
    cancels exactly.
    """
    neutral_run = synthesize_mixture(
        dataclasses.replace(recipe, snr_background_db=-200.0), store)
    background_run = synthesize_mixture(
        dataclasses.replace(recipe, snr_neutral_db=-200.0), store)
    neutral_ratio = db(rms(neutral_run.ground_truth.samples)
                       / rms(neutral_run.trigger_component.samples))
    background_ratio = db(rms(background_run.ground_truth.samples)
                          / rms(background_run.trigger_component.samples))
    return neutral_ratio, background_ratio


def test_mixture_synthesis_snr_and_splits(acceptance_report):
    t0 = time.perf_counter()
    store = synth_store(3, 6.0, 0, FS)
    checks = []
    worst_ratio = 0.0
    worst_additivity = 0.0

    ds1 = build_dataset("dataset1", dict(DESK_COUNTS), store, 0)
    checks.append([len(ds1.split_entries(s)) for s in ("train", "val", "test")]
                  == [200, 50, 50])
    for entry in (ds1.split_entries("train")[:2] + ds1.split_entries("val")[:2]
                  + ds1.split_entries("test")[:2]):
        result = synthesize_mixture(entry.recipe, store)
        additivity = rms(result.mixture.samples
                         - result.ground_truth.samples
                         - result.trigger_component.samples)
        worst_additivity = max(worst_additivity, additivity)
        nr, br = _component_ratios(entry.recipe, store)
        worst_ratio = max(worst_ratio, abs(nr - 0.0), abs(br - (-10.0)))

    ds2 = build_dataset("dataset2", dict(DESK_COUNTS), store, 1)
    draws = [e.recipe.snr_neutral_db for e in ds2.entries]
    checks.append(all(-15.0 <= d <= 5.0 for d in draws))

    ts3 = build_dataset("testset3", {}, store, 2)
    checks.append(len(ts3.entries) == 10)
    for entry in ts3.entries:
        result = synthesize_mixture(entry.recipe, store)
        checks.append(abs(result.mixture.duration_s - 5.0) < 1e-9)
        additivity = rms(result.mixture.samples
                         - result.ground_truth.samples
                         - result.trigger_component.samples)
        worst_additivity = max(worst_additivity, additivity)
        nr, br = _component_ratios(entry.recipe, store)
        worst_ratio = max(worst_ratio, abs(nr - (-10.0)), abs(br - (-35.0)))
    checks.append(worst_ratio < 0.05)
    checks.append(worst_additivity < 1e-6)

    for manifest in (ds1, ds2):
        splits = [set(manifest.pools[s]) for s in ("train", "val", "test")]
        checks.append(not (splits[0] & splits[1] or splits[0] & splits[2]
                           or splits[1] & splits[2]))
        for entry in manifest.entries:
            pool = set(manifest.pools[entry.split])
            checks.append({entry.recipe.trigger_id, entry.recipe.neutral_id,
                           entry.recipe.background_id} <= pool)

    elapsed = _elapsed(t0)
    ok = all(checks) and elapsed < 60.0
    assert acceptance_report(
        "mixture synthesis snr + splits", ok,
        f"ratio err {worst_ratio:.4f} dB (tol 0.05), additivity rms "
        f"{worst_additivity:.2e}, splits disjoint, {elapsed:.1f} s "
        f"(budget 60 s)")
    assert ok


def test_transient_trigger_ordering(acceptance_report):
    t0 = time.perf_counter()
    seed = 42
    deltas = {name: [] for name in DSP_ALGORITHMS}
    for i in range(50):
        kind = "tapping_clicks" if i % 2 == 0 else "chewing_crackle"
        store = ClipStore()
        trig = synth_source(kind, 5.0, splitmix64(seed, 3 * i))
        neut = synth_source("tone_neutral", 5.0, splitmix64(seed, 3 * i + 1))
        bg = synth_source("traffic_rumble", 5.0, splitmix64(seed, 3 * i + 2))
        for clip in (trig, neut, bg):
            store.add(clip)
        recipe = MixtureRecipe(
            trigger_id=trig.id, neutral_id=neut.id, background_id=bg.id,
            snr_neutral_db=-10.0, snr_background_db=-35.0,
            duration_s=5.0, seed=splitmix64(seed, 1000 + i),
        )
        result = synthesize_mixture(recipe, store)
        gt = result.ground_truth.samples
        base = si_snr(result.mixture.samples, gt)
        for name in DSP_ALGORITHMS:
            est = make_processor(name, {}, FS).process(result.mixture.samples)
            deltas[name].append(si_snr(est, gt) - base)

    means = {name: float(np.mean(v)) for name, v in deltas.items()}
    checks = [
        means["drc"] > 0.0,
        means["lpf"] < 0.0,
        all(means["drc"] >= means[name] for name in DSP_ALGORITHMS),
    ]
    elapsed = _elapsed(t0)
    ok = all(checks) and elapsed < 120.0
    summary = " ".join(f"{k}{v:+.2f}" for k, v in
                       sorted(means.items(), key=lambda kv: -kv[1]))
    assert acceptance_report(
        "transient-trigger ordering", ok,
        f"mean dSI-SNR over 50 stimuli: {summary} dB, {elapsed:.1f} s "
        f"(budget 120 s)")
    assert ok


def test_optimizer_benchmarks(acceptance_report):
    t0 = time.perf_counter()
    space_1d = ParamSpace({"x": uniform(-10.0, 10.0)})
    parabola = lambda p: -((p["x"] - 2.0) ** 2)  # noqa: E731
    hits = 0
    for seed in range(20):
        best, _ = run_search(parabola, space_1d, 200, "tpe", seed)
        hits += abs(best.params["x"] - 2.0) < 0.5

    space_2d = ParamSpace({"x": uniform(-10.0, 10.0),
                           "y": uniform(-10.0, 10.0)})
    bowl = lambda p: -((p["x"] - 2.0) ** 2) - ((p["y"] + 3.0) ** 2)  # noqa: E731
    tpe_best = [run_search(bowl, space_2d, 200, "tpe", s)[0].objective
                for s in range(20)]
    rnd_best = [run_search(bowl, space_2d, 200, "random", s)[0].objective
                for s in range(20)]
    tpe_median = float(np.median(tpe_best))
    rnd_median = float(np.median(rnd_best))

    repro = (run_search(parabola, space_1d, 50, "tpe", 5)
             == run_search(parabola, space_1d, 50, "tpe", 5))

    elapsed = _elapsed(t0)
    ok = hits >= 18 and tpe_median > rnd_median and repro and elapsed < 60.0
    assert acceptance_report(
        "optimizer benchmarks", ok,
        f"1-D hits {hits}/20 (need 18), 2-D median tpe {tpe_median:+.3f} vs "
        f"random {rnd_median:+.3f}, reproducible={repro}, {elapsed:.1f} s "
        f"(budget 60 s)")
    assert ok


def _bh_oracle(p: np.ndarray) -> np.ndarray:
    order = np.argsort(p, kind="stable")
    m = len(p)
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty(m)
    out[order] = np.minimum(adjusted, 1.0)
    return out


def test_group_statistics_reproduction(acceptance_report):
    import importlib.resources

    t0 = time.perf_counter()
    checks = []

    hand = bh_adjust([0.005, 0.01, 0.03, 0.04])
    checks.append(np.allclose(hand, [0.02, 0.02, 0.04, 0.04], atol=1e-12))

    rng = np.random.default_rng(3)
    oracle_ok = True
    for _ in range(1000):
        p = rng.uniform(0.0, 1.0, size=int(rng.integers(1, 12)))
        if rng.uniform() < 0.3:
            p = np.round(p, 1)  # force ties
        oracle_ok &= np.allclose(bh_adjust(list(p)), _bh_oracle(p),
                                 atol=1e-12)
    checks.append(oracle_ok)

    path = importlib.resources.files("hushlab.data") / "ratings_cell_means.csv"
    summary = aggregate_ratings(RatingsTable.from_csv(str(path)))
    spot = {
        ("anc-drc", "neurodivergent", "alarm"): 46.4,
        ("mix", "neurodivergent", "alarm"): 80.9,
    }
    cell_ok = len(summary.cell_means) == 80
    for (algorithm, group, trig_prefix), want in spot.items():
        key = next(k for k in summary.cell_means
                   if k[0] == algorithm and k[1] == group
                   and k[2].startswith(trig_prefix))
        cell_ok &= abs(summary.cell_means[key] - want) < 1e-9
    checks.append(cell_ok)
    drc_n_raw = summary.overall_raw[("anc-drc", "neurodivergent")]
    drc_n_trig = summary.overall_by_trigger[("anc-drc", "neurodivergent")]
    checks.append(abs(drc_n_raw - 38.10) < 1e-9)
    checks.append(abs(drc_n_trig - 38.10) < 1e-9)

    elapsed = _elapsed(t0)
    ok = all(checks) and elapsed < 10.0
    assert acceptance_report(
        "group statistics reproduction", ok,
        f"bh hand-case + 1000-vector oracle, 80 cell means exact, overall "
        f"anc-drc/N {drc_n_raw:.2f} both weightings (published overall row "
        f"prints 38.22; weighting ambiguous), {elapsed:.1f} s (budget 10 s)")
    assert ok


def test_anc_selective_transparency(acceptance_report):
    t0 = time.perf_counter()
    checks = []

    store = synth_store(1, 5.0, 3, FS)
    trig = store.by_category("trigger")[0]
    neut = store.by_category("neutral")[0]
    bg = store.by_category("background")[0]
    recipe = MixtureRecipe(trigger_id=trig.id, neutral_id=neut.id,
                           background_id=bg.id, snr_neutral_db=-10.0,
                           snr_background_db=-35.0, duration_s=4.0, seed=99)
    result = synthesize_mixture(recipe, store)
    mixture = result.mixture

    flat = AttenuationCurve(((100.0, 0.0), (16000.0, 0.0)))
    passthrough = apply_attenuation(mixture, flat)
    flat_err = rms(passthrough.samples - mixture.samples)
    checks.append(flat_err < 1e-6)

    iso_30 = AttenuationCurve(((100.0, 30.0), (16000.0, 30.0)))
    probe = buf(sine(1000.0, 1.0, amp=0.1))
    attenuated = apply_attenuation(probe, iso_30)
    probe_drop = -db(rms(attenuated.samples) / rms(probe.samples))
    checks.append(abs(probe_drop - 30.0) < 1.0)

    curve = default_curve()
    evaluable = True
    for name in ALGORITHMS:
        processor = make_processor(name, {}, FS)
        out = selective_transparency(mixture, curve, processor)
        evaluable &= (len(out.samples) == len(mixture.samples)
                      and bool(np.all(np.isfinite(out.samples))))
        evaluable &= np.isfinite(
            delta_si_snr(out, mixture, result.ground_truth))
    checks.append(evaluable)

    elapsed = _elapsed(t0)
    ok = all(checks) and elapsed < 30.0
    assert acceptance_report(
        "anc selective transparency", ok,
        f"flat-curve rms err {flat_err:.2e}, 1 kHz probe -{probe_drop:.2f} dB "
        f"(want 30 +/- 1), evaluable for {len(ALGORITHMS)} algorithms, "
        f"{elapsed:.1f} s (budget 30 s)")
    assert ok
