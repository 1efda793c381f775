"""Source clips: synthetic generators, the clip store, corpus ingestion.

The six parametric generators are desk-scale stand-ins for field
recordings so the pipeline and tests run without downloads: three
trigger kinds (alarm beeps, tapping, chewing), one neutral (low tone),
two backgrounds (pink ambience, traffic rumble).  Every generator is a
pure function of (kind, duration, seed).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import butter, sosfilt

from hushlab.audio import DEFAULT_RATE, AudioBuffer, read_wav, resample
from hushlab.errors import PoolError

CATEGORIES = ("trigger", "neutral", "background")

#: kind -> (label, category).  Labels follow the taxonomy-leaf style of
#: the field corpora they stand in for.
SYNTH_KINDS = {
    "alarm_beep": ("alarm", "trigger"),
    "tapping_clicks": ("tapping", "trigger"),
    "chewing_crackle": ("chewing, -mastication", "trigger"),
    "noise_ambient": ("ambient", "background"),
    "tone_neutral": ("tone", "neutral"),
    "traffic_rumble": ("traffic", "background"),
}

LABEL_MAP_HEADER = ("filename", "label", "category")


@dataclass(frozen=True)
class SourceClip:
    id: str
    label: str
    category: str  # trigger | neutral | background
    audio: AudioBuffer

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"category must be one of {CATEGORIES}, got {self.category!r}")


class ClipStore:
    """Id-keyed clip registry enforcing pool hygiene.

    A label may not appear in both the trigger and the neutral pool, and
    ids are unique.  All clips must share one sample rate.
    """

    def __init__(self):
        self._clips = {}
        self._labels_by_category = {c: set() for c in CATEGORIES}

    def __len__(self) -> int:
        return len(self._clips)

    def __contains__(self, clip_id: str) -> bool:
        return clip_id in self._clips

    def add(self, clip: SourceClip) -> None:
        if clip.id in self._clips:
            raise PoolError(f"duplicate clip id {clip.id!r}")
        if self._clips:
            rate = next(iter(self._clips.values())).audio.sample_rate_hz
            if clip.audio.sample_rate_hz != rate:
                raise PoolError(
                    f"clip {clip.id!r} rate {clip.audio.sample_rate_hz} != store rate {rate}"
                )
        opposing = {"trigger": "neutral", "neutral": "trigger"}.get(clip.category)
        if opposing and clip.label in self._labels_by_category[opposing]:
            raise PoolError(
                f"label {clip.label!r} already present in the {opposing} pool"
            )
        self._clips[clip.id] = clip
        self._labels_by_category[clip.category].add(clip.label)

    def get(self, clip_id: str) -> SourceClip:
        try:
            return self._clips[clip_id]
        except KeyError:
            raise PoolError(f"unknown clip id {clip_id!r}") from None

    def by_category(self, category: str) -> list:
        if category not in CATEGORIES:
            raise ValueError(f"unknown category {category!r}")
        return [c for c in self._clips.values() if c.category == category]

    def ids(self) -> list:
        return list(self._clips)


def _normalize(y: np.ndarray, rms_target: float = 0.1) -> np.ndarray:
    rms = np.sqrt(np.mean(y ** 2))
    if rms > 0.0:
        y = y * (rms_target / rms)
    peak = np.max(np.abs(y))
    if peak > 0.99:
        y = y * (0.99 / peak)
    return y


def _alarm_beep(n: int, fs: int, rng) -> np.ndarray:
    t = np.arange(n) / fs
    beep = int(round(0.2 * fs))
    gap = int(round(0.1 * fs))
    ramp = int(round(0.005 * fs))
    y = np.zeros(n)
    pos = 0
    k = 0
    while pos < n:
        f0 = 1000.0 if k % 2 == 0 else 1300.0
        seg = slice(pos, min(pos + beep, n))
        burst = 0.7 * np.sign(np.sin(2.0 * np.pi * f0 * t[seg]))
        m = len(burst)
        if m > 2 * ramp:
            env = np.ones(m)
            env[:ramp] = np.linspace(0.0, 1.0, ramp)
            env[-ramp:] = np.linspace(1.0, 0.0, ramp)
            burst = burst * env
        y[seg] += burst
        pos += beep + gap
        k += 1
    return y


def _tapping_clicks(n: int, fs: int, rng) -> np.ndarray:
    # resonant thumps (300-700 Hz) with 40-80 ms decaying tails and a
    # weaker rebound tap, the way struck objects actually ring and settle
    y = np.zeros(n)
    click_len = int(round(0.35 * fs))
    t_click = np.arange(click_len) / fs

    def add_thump(pos: int, amp: float, f0: float, tau: float) -> None:
        if pos >= n:
            return
        click = amp * np.sin(2.0 * np.pi * f0 * t_click) * np.exp(-t_click / tau)
        seg = slice(pos, min(pos + click_len, n))
        y[seg] += click[: seg.stop - seg.start]

    # force an early first tap so short clips are never silent
    pos = int(rng.uniform(0.0, 0.3) * fs)
    while pos < n:
        f0 = rng.uniform(300.0, 700.0)
        tau = rng.uniform(0.04, 0.08)
        amp = rng.uniform(0.6, 1.0)
        add_thump(pos, amp, f0, tau)
        add_thump(pos + int(rng.uniform(0.06, 0.12) * fs),
                  rng.uniform(0.3, 0.5) * amp, f0, 0.6 * tau)
        pos += int(rng.exponential(0.5) * fs) + 1
    return y


def _chewing_crackle(n: int, fs: int, rng) -> np.ndarray:
    # band-limited crunch noise gated by ~1 Hz chew cycles, a few
    # crackles per bite with slow decaying tails
    noise = rng.standard_normal(n)
    sos = butter(4, [150.0, 1500.0], btype="bandpass", fs=fs, output="sos")
    noise = sosfilt(sos, noise)
    env = np.zeros(n)
    tap_len = int(round(0.15 * fs))
    decay = np.exp(-np.arange(tap_len) / (0.04 * fs))
    pos = int(rng.uniform(0.0, 0.3) * fs)
    while pos < n:
        dur = rng.uniform(0.15, 0.3)
        for _ in range(int(rng.integers(2, 5))):
            tap = pos + int(rng.uniform(0.0, dur) * fs)
            if tap >= n:
                break
            seg = slice(tap, min(tap + tap_len, n))
            env[seg] += rng.uniform(0.5, 1.0) * decay[: seg.stop - seg.start]
        pos += int(rng.uniform(0.8, 1.2) * fs)
    return noise * env


def _noise_ambient(n: int, fs: int, rng) -> np.ndarray:
    # pink: shape white noise by 1/sqrt(f) in the frequency domain
    white = rng.standard_normal(n)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    spectrum[0] = 0.0
    spectrum[1:] /= np.sqrt(freqs[1:])
    return np.fft.irfft(spectrum, n=n)


def _tone_neutral(n: int, fs: int, rng) -> np.ndarray:
    t = np.arange(n) / fs
    amp = rng.uniform(0.25, 0.4)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    y = amp * np.sin(2.0 * np.pi * 300.0 * t + phase)
    # faint octave for character; keeps >99% of energy below 400 Hz
    y += amp * 10.0 ** (-30.0 / 20.0) * np.sin(2.0 * np.pi * 600.0 * t + phase)
    return y


def _traffic_rumble(n: int, fs: int, rng) -> np.ndarray:
    brown = np.cumsum(rng.standard_normal(n))
    hp = butter(2, 20.0, btype="highpass", fs=fs, output="sos")
    lp = butter(4, 200.0, btype="lowpass", fs=fs, output="sos")
    return sosfilt(lp, sosfilt(hp, brown))


_GENERATORS = {
    "alarm_beep": _alarm_beep,
    "tapping_clicks": _tapping_clicks,
    "chewing_crackle": _chewing_crackle,
    "noise_ambient": _noise_ambient,
    "tone_neutral": _tone_neutral,
    "traffic_rumble": _traffic_rumble,
}


def synth_source(kind: str, duration_s: float, seed: int,
                 rate: int = DEFAULT_RATE) -> SourceClip:
    """Generate one synthetic source clip.

    Parameters
    ----------
    kind : str
        One of ``SYNTH_KINDS``: alarm_beep, tapping_clicks,
        chewing_crackle, noise_ambient, tone_neutral, traffic_rumble.
    duration_s : float
        Clip length in seconds, > 0.
    seed : int
        Generation is deterministic per (kind, duration, seed, rate).
    rate : int
        Sample rate in Hz.

    Returns
    -------
    SourceClip
        Normalized to 0.1 RMS, id ``<kind>-<seed>``.
    """
    if kind not in SYNTH_KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {sorted(SYNTH_KINDS)}")
    if duration_s <= 0.0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    n = int(round(duration_s * rate))
    rng = np.random.default_rng(seed)
    samples = _normalize(_GENERATORS[kind](n, rate, rng))
    label, category = SYNTH_KINDS[kind]
    return SourceClip(
        id=f"{kind}-{seed}", label=label, category=category,
        audio=AudioBuffer(samples, rate),
    )


def synth_store(clips_per_kind: int, duration_s: float, seed: int,
                rate: int = DEFAULT_RATE, kinds=None) -> ClipStore:
    """Fill a store with ``clips_per_kind`` seeded clips of each kind."""
    store = ClipStore()
    for k, kind in enumerate(sorted(kinds or SYNTH_KINDS)):
        for i in range(clips_per_kind):
            store.add(synth_source(kind, duration_s, seed + 1000 * k + i, rate))
    return store


def ingest_corpus(corpus_dir, label_map, rate: int = DEFAULT_RATE) -> ClipStore:
    """Load WAVs listed in a label-map CSV into a store.

    Parameters
    ----------
    corpus_dir : path
        Directory containing the WAV files.
    label_map : path
        CSV with header ``filename,label,category``.
    rate : int
        Canonical rate; clips are resampled on ingest.

    Returns
    -------
    ClipStore
        Ids are the filenames.  WAVs present in the directory but absent
        from the map — and files that fail to read — are skipped with a
        warning each.
    """
    corpus_dir = Path(corpus_dir)
    mapped = {}
    with open(label_map, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(h.strip() for h in next(reader, ()))
        if header != LABEL_MAP_HEADER:
            raise PoolError(
                f"{label_map}: header must be {','.join(LABEL_MAP_HEADER)}"
            )
        for row in reader:
            if row:
                mapped[row[0].strip()] = (row[1].strip(), row[2].strip())

    store = ClipStore()
    for wav in sorted(corpus_dir.glob("*.wav")):
        entry = mapped.get(wav.name)
        if entry is None:
            warnings.warn(f"{wav.name}: no label-map row, skipped", stacklevel=2)
            continue
        label, category = entry
        try:
            buf = read_wav(wav)
        except Exception as exc:  # unreadable files are skipped, not fatal
            warnings.warn(f"{wav.name}: unreadable ({exc}), skipped", stacklevel=2)
            continue
        if buf.sample_rate_hz != rate:
            buf = resample(buf, rate)
        store.add(SourceClip(id=wav.name, label=label, category=category, audio=buf))
    return store


def write_label_map(store: ClipStore, path) -> None:
    """Write the store's clips as a label-map CSV (filenames = ``<id>.wav``)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LABEL_MAP_HEADER)
        for clip_id in sorted(store.ids()):
            clip = store.get(clip_id)
            writer.writerow([f"{clip_id}.wav", clip.label, clip.category])
