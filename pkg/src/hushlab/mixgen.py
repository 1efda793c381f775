"""Deterministic trigger/neutral/background mixture synthesis.

Each mixture sums three components: a trigger looped to the target
duration and normalized to a -25 dBFS RMS reference, plus a neutral and
a background scaled relative to that reference.  "SNR of X dB" is
trigger-relative: positive X means the trigger is X dB louder than the
companion sound.  Everything is a pure function of (recipe, seed); the
seed drives circular start offsets within the source clips.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from hushlab.audio import AudioBuffer, rms
from hushlab.errors import PoolError
from hushlab.sources import ClipStore

TRIGGER_REF_DBFS = -25.0
PEAK_GUARD = 0.99
LOOP_FADE_S = 0.010

SPLITS = ("train", "val", "test")
DATASET_KINDS = ("dataset1", "dataset2", "testset3")

#: Desk-scale default split sizes (full-scale runs use 20000/1000/1000).
DESK_COUNTS = {"train": 200, "val": 50, "test": 50}


def splitmix64(seed: int, index: int) -> int:
    """Derive an independent 64-bit stream seed from (master seed, index)."""
    z = (seed + index * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass(frozen=True)
class MixtureRecipe:
    trigger_id: str
    neutral_id: str
    background_id: str
    snr_neutral_db: float
    snr_background_db: float
    duration_s: float
    seed: int

    def __post_init__(self):
        if self.duration_s <= 0.0:
            raise ValueError(f"duration_s must be positive, got {self.duration_s}")
        ids = (self.trigger_id, self.neutral_id, self.background_id)
        if len(set(ids)) != 3:
            raise ValueError(f"recipe ids must be distinct, got {ids}")


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    split: str  # train | val | test
    recipe: MixtureRecipe

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")


@dataclass(frozen=True)
class DatasetManifest:
    kind: str
    entries: tuple  # ManifestEntry
    pools: dict  # split -> tuple of clip ids assigned to that split

    def split_entries(self, split: str) -> list:
        return [e for e in self.entries if e.split == split]


@dataclass(frozen=True)
class MixtureResult:
    mixture: AudioBuffer
    ground_truth: AudioBuffer  # neutral + background only
    trigger_component: AudioBuffer


def loop_to_length(clip: AudioBuffer, duration_s: float) -> AudioBuffer:
    """Tile a clip to a duration with equal-power crossfaded seams.

    Clips at least as long as the target are truncated without a seam.
    Shorter clips repeat with a 10 ms sin/cos crossfade at each seam, so
    the loop period is ``len(clip) - fade`` samples.

    Parameters
    ----------
    clip : AudioBuffer
        Non-empty source clip.
    duration_s : float
        Target duration, > 0.

    Returns
    -------
    AudioBuffer
    """
    if duration_s <= 0.0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    if len(clip) == 0:
        raise ValueError("clip is empty")
    fs = clip.sample_rate_hz
    n_target = int(round(duration_s * fs))
    x = clip.samples
    length = len(x)
    if length >= n_target:
        return AudioBuffer(x[:n_target].copy(), fs)

    fade = min(int(round(LOOP_FADE_S * fs)), length - 1)
    stride = length - fade
    u = (np.arange(fade) + 0.5) / fade
    w_in = np.sin(0.5 * np.pi * u)
    w_out = np.cos(0.5 * np.pi * u)

    # enough tiles that every seam inside the output is complete
    n_tiles = max(2, int(np.ceil((n_target + fade) / stride)) + 1)
    out = np.zeros(stride * (n_tiles - 1) + length)
    for k in range(n_tiles):
        tile = x.copy()
        if k > 0:
            tile[:fade] *= w_in
        if k < n_tiles - 1:
            tile[-fade:] *= w_out
        start = k * stride
        out[start:start + length] += tile
    return AudioBuffer(out[:n_target], fs)


def scale_to_snr(signal: AudioBuffer, reference: AudioBuffer,
                 snr_db: float) -> AudioBuffer:
    """Scale ``signal`` to sit ``snr_db`` dB relative to the reference.

    The gain is (rms_ref / rms_signal) · 10^(snr_db/20), making
    20·log10(rms_out / rms_ref) = snr_db: the value is the component's
    level with the reference (trigger) as the 0 dB point, so negative
    values place the signal below the trigger.

    Parameters
    ----------
    signal, reference : AudioBuffer
        Both must be non-silent.
    snr_db : float
        Trigger-relative level of the signal.

    Returns
    -------
    AudioBuffer
    """
    rms_sig = rms(signal.samples)
    rms_ref = rms(reference.samples)
    if rms_sig == 0.0:
        raise ValueError("cannot scale a silent signal")
    if rms_ref == 0.0:
        raise ValueError("reference is silent")
    gain = (rms_ref / rms_sig) * 10.0 ** (snr_db / 20.0)
    return AudioBuffer(signal.samples * gain, signal.sample_rate_hz)


def synthesize_mixture(recipe: MixtureRecipe, store: ClipStore) -> MixtureResult:
    """Render one mixture plus its trigger-free ground truth.

    The trigger is looped to the recipe duration and normalized to
    -25 dBFS RMS; neutral and background are looped and scaled by their
    trigger-relative SNRs; the recipe seed draws a circular start offset
    within each source clip.  If the summed mixture peaks above 0.99 the
    same scalar is applied to mixture, ground truth, and trigger, so the
    additive identity and all level ratios are preserved.
    """
    clips = [store.get(recipe.trigger_id), store.get(recipe.neutral_id),
             store.get(recipe.background_id)]
    rng = np.random.default_rng(recipe.seed)
    rotated = []
    for clip in clips:
        samples = clip.audio.samples
        if rms(samples) == 0.0:
            raise ValueError(f"clip {clip.id!r} is silent")
        offset = int(rng.integers(0, len(samples)))
        rotated.append(AudioBuffer(np.roll(samples, -offset), clip.audio.sample_rate_hz))

    trigger, neutral, background = (loop_to_length(c, recipe.duration_s) for c in rotated)
    ref_rms = 10.0 ** (TRIGGER_REF_DBFS / 20.0)
    trigger = AudioBuffer(trigger.samples * (ref_rms / rms(trigger.samples)),
                          trigger.sample_rate_hz)
    neutral = scale_to_snr(neutral, trigger, recipe.snr_neutral_db)
    background = scale_to_snr(background, trigger, recipe.snr_background_db)

    ground = neutral.samples + background.samples
    mixture = ground + trigger.samples
    peak = np.max(np.abs(mixture))
    if peak > PEAK_GUARD:
        scale = PEAK_GUARD / peak
        mixture = mixture * scale
        ground = ground * scale
        trigger = AudioBuffer(trigger.samples * scale, trigger.sample_rate_hz)
    fs = trigger.sample_rate_hz
    return MixtureResult(AudioBuffer(mixture, fs), AudioBuffer(ground, fs), trigger)


def _assign_pools(store: ClipStore, counts: dict, seed: int,
                  eligible=None) -> dict:
    """Disjoint per-split clip pools, one slice per category.

    Splits with a zero count get empty pools; every nonzero split gets at
    least one clip of each category or a PoolError explains the shortfall.
    """
    active = [s for s in SPLITS if counts.get(s, 0) > 0]
    pools = {s: [] for s in SPLITS}
    rng = np.random.default_rng(splitmix64(seed, 0xA5))
    for category in ("trigger", "neutral", "background"):
        clips = store.by_category(category)
        if eligible is not None:
            clips = [c for c in clips if eligible(category, c)]
        ids = sorted(c.id for c in clips)
        if len(ids) < len(active):
            raise PoolError(
                f"need at least {len(active)} eligible {category} clips for "
                f"{len(active)} splits, have {len(ids)}"
            )
        ids = list(np.array(ids)[rng.permutation(len(ids))])
        # proportional allocation with a floor of one clip per active split
        total = sum(counts[s] for s in active)
        shares = {s: max(1, int(round(len(ids) * counts[s] / total))) for s in active}
        while sum(shares.values()) > len(ids):
            biggest = max(shares, key=lambda s: shares[s])
            shares[biggest] -= 1
        pos = 0
        for s in active:
            pools[s].extend(ids[pos:pos + shares[s]])
            pos += shares[s]
    return {s: tuple(sorted(p)) for s, p in pools.items()}


def build_dataset(kind: str, counts: dict, store: ClipStore,
                  seed: int) -> DatasetManifest:
    """Draw a full manifest of mixture recipes for one dataset kind.

    dataset1: 10 s, neutral at 0 dB, background at -10 dB.
    dataset2: 10 s, neutral drawn uniformly in [-15, 5] dB per recipe,
    background at -10 dB.  testset3: exactly 10 five-second stimuli with
    10 distinct trigger/neutral pairings — triggers >= 0.5 s at the 0 dB
    reference, neutrals >= 3 s at -10 dB, traffic-labeled background at
    -35 dB, all in the test split.

    Split pools are disjoint by clip id; recipe seeds derive from the
    master seed by a splitmix64 stream, so equal seeds give identical
    manifests.
    """
    if kind not in DATASET_KINDS:
        raise ValueError(f"kind must be one of {DATASET_KINDS}, got {kind!r}")

    if kind == "testset3":
        def eligible(category, clip):
            dur = clip.audio.duration_s
            if category == "trigger":
                return dur >= 0.5
            if category == "neutral":
                return dur >= 3.0
            return "traffic" in clip.label
        counts = {"train": 0, "val": 0, "test": 10}
        pools = _assign_pools(store, counts, seed, eligible)
        neut = [i for i in pools["test"] if store.get(i).category == "neutral"]
        trig = [i for i in pools["test"] if store.get(i).category == "trigger"]
        bg = [i for i in pools["test"] if store.get(i).category == "background"]
        rng = np.random.default_rng(splitmix64(seed, 0x7E57))
        pairs = set()
        entries = []
        guard = 0
        while len(entries) < 10:
            guard += 1
            if guard > 10000:
                raise PoolError(
                    f"cannot form 10 distinct trigger/neutral pairs from "
                    f"{len(trig)} triggers x {len(neut)} neutrals"
                )
            pair = (trig[int(rng.integers(len(trig)))],
                    neut[int(rng.integers(len(neut)))])
            if pair in pairs:
                continue
            pairs.add(pair)
            i = len(entries)
            entries.append(ManifestEntry(
                id=f"ts3-test-{i:04d}", split="test",
                recipe=MixtureRecipe(
                    trigger_id=pair[0], neutral_id=pair[1],
                    background_id=bg[int(rng.integers(len(bg)))],
                    snr_neutral_db=-10.0, snr_background_db=-35.0,
                    duration_s=5.0, seed=splitmix64(seed, 1 + i),
                ),
            ))
        return DatasetManifest(kind, tuple(entries), pools)

    pools = _assign_pools(store, counts, seed)
    prefix = {"dataset1": "ds1", "dataset2": "ds2"}[kind]
    entries = []
    index = 0
    for split in SPLITS:
        n = counts.get(split, 0)
        by_cat = {
            c: [i for i in pools[split] if store.get(i).category == c]
            for c in ("trigger", "neutral", "background")
        }
        for i in range(n):
            recipe_seed = splitmix64(seed, 1 + index)
            rng = np.random.default_rng(recipe_seed)
            if kind == "dataset2":
                snr_neutral = float(rng.uniform(-15.0, 5.0))
            else:
                snr_neutral = 0.0
            entries.append(ManifestEntry(
                id=f"{prefix}-{split}-{i:04d}", split=split,
                recipe=MixtureRecipe(
                    trigger_id=by_cat["trigger"][int(rng.integers(len(by_cat["trigger"])))],
                    neutral_id=by_cat["neutral"][int(rng.integers(len(by_cat["neutral"])))],
                    background_id=by_cat["background"][int(rng.integers(len(by_cat["background"])))],
                    snr_neutral_db=snr_neutral, snr_background_db=-10.0,
                    duration_s=10.0, seed=recipe_seed,
                ),
            ))
            index += 1
    return DatasetManifest(kind, tuple(entries), pools)


def write_manifest(manifest: DatasetManifest, path) -> None:
    """Serialize as JSON-lines: one entry per line with id, split, and
    the recipe fields flattened; a sibling ``<stem>.pools.json`` records
    the per-split source pools."""
    path = Path(path)
    with open(path, "w") as fh:
        for entry in manifest.entries:
            record = {"id": entry.id, "split": entry.split}
            record.update(asdict(entry.recipe))
            fh.write(json.dumps(record) + "\n")
    pools_path = path.with_suffix(path.suffix + ".pools.json")
    with open(pools_path, "w") as fh:
        json.dump({"kind": manifest.kind,
                   "pools": {s: list(p) for s, p in manifest.pools.items()}},
                  fh, indent=2)
        fh.write("\n")


def read_manifest(path) -> DatasetManifest:
    """Read ``write_manifest`` output; pools fall back to the ids used
    per split when the sidecar file is absent."""
    path = Path(path)
    entries = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            entry_id = record.pop("id")
            split = record.pop("split")
            entries.append(ManifestEntry(entry_id, split, MixtureRecipe(**record)))
    pools_path = path.with_suffix(path.suffix + ".pools.json")
    if pools_path.exists():
        with open(pools_path) as fh:
            data = json.load(fh)
        kind = data.get("kind", "dataset1")
        pools = {s: tuple(p) for s, p in data["pools"].items()}
    else:
        kind = "dataset1"
        pools = {s: () for s in SPLITS}
        used = {s: set() for s in SPLITS}
        for e in entries:
            used[e.split].update((e.recipe.trigger_id, e.recipe.neutral_id,
                                  e.recipe.background_id))
        pools = {s: tuple(sorted(ids)) for s, ids in used.items()}
    return DatasetManifest(kind, tuple(entries), pools)
