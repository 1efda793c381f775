"""Mono audio buffers, WAV I/O, resampling and level measurement.

All in-memory signals are float64 numpy arrays at a nominal full scale of
±1.0; files are written as 32-bit float mono WAV.  The default working
rate everywhere else in the package is ``DEFAULT_RATE`` (32 kHz).
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import resample_poly

from hushlab.errors import UnsupportedWavError, WavFormatError

DEFAULT_RATE = 32000

# rms_dbfs clamp for silence
SILENCE_DB = -200.0

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioBuffer:
    """A finite mono signal with its sample rate.

    Invariants are checked on construction: finite samples, positive
    integer rate.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValueError("samples contain NaN or Inf")
        rate = int(self.sample_rate_hz)
        if rate <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", rate)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def _read_exact(f, n, what):
    data = f.read(n)
    if len(data) != n:
        raise WavFormatError(f"truncated WAV file while reading {what}")
    return data


def read_wav(path) -> AudioBuffer:
    """Read a PCM16 or float32 WAV file as a mono buffer.

    Multichannel input is downmixed by channel mean; int16 samples are
    scaled by 1/32768.  Raises FileNotFoundError for a missing file,
    WavFormatError for a broken RIFF container and UnsupportedWavError
    for codecs other than PCM16/float32.
    """
    path = Path(path)
    with open(path, "rb") as f:
        header = _read_exact(f, 12, "RIFF header")
        if header[:4] != b"RIFF" or header[8:12] != b"WAVE":
            raise WavFormatError(f"{path}: not a RIFF/WAVE file")

        fmt = None
        data = None
        while True:
            chunk_head = f.read(8)
            if len(chunk_head) == 0:
                break
            if len(chunk_head) < 8:
                raise WavFormatError(f"{path}: truncated chunk header")
            cid, size = struct.unpack("<4sI", chunk_head)
            if cid == b"fmt ":
                if size < 16:
                    raise WavFormatError(f"{path}: fmt chunk too short")
                fmt = _read_exact(f, size, "fmt chunk")
            elif cid == b"data":
                data = _read_exact(f, size, "data chunk")
            else:
                f.seek(size + (size & 1), 1)
                continue
            if size & 1:
                f.seek(1, 1)

    if fmt is None:
        raise WavFormatError(f"{path}: missing fmt chunk")
    if data is None:
        raise WavFormatError(f"{path}: missing data chunk")

    tag, n_channels, rate, _, _, bits = struct.unpack("<HHIIHH", fmt[:16])
    if tag == _WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise WavFormatError(f"{path}: extensible fmt chunk too short")
        tag = struct.unpack("<H", fmt[24:26])[0]
    if n_channels < 1:
        raise WavFormatError(f"{path}: zero channels")

    if tag == _WAVE_FORMAT_PCM and bits == 16:
        raw = np.frombuffer(data, dtype="<i2")
        scale = 1.0 / 32768.0
    elif tag == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(data, dtype="<f4")
        scale = 1.0
    else:
        raise UnsupportedWavError(
            f"{path}: unsupported codec (format tag {tag:#06x}, {bits}-bit); "
            "only 16-bit PCM and 32-bit float are handled"
        )

    n_frames = raw.size // n_channels
    frames = raw[: n_frames * n_channels].reshape(n_frames, n_channels)
    mono = frames.astype(np.float64).mean(axis=1) * scale
    return AudioBuffer(mono, rate)


def write_wav(buffer: AudioBuffer, path) -> None:
    """Write a buffer as 32-bit float mono WAV.

    Samples outside ±1 are written as-is (float WAV carries them) with a
    warning.  read_wav(write_wav(b)) is bit-exact for float32-representable
    samples.
    """
    samples = buffer.samples
    if samples.size and np.max(np.abs(samples)) > 1.0:
        warnings.warn(
            f"writing {path}: peak {np.max(np.abs(samples)):.3f} exceeds full "
            "scale; float WAV stores it unclipped",
            stacklevel=2,
        )
    payload = samples.astype("<f4").tobytes()
    rate = buffer.sample_rate_hz
    header = b"".join(
        [
            struct.pack("<4sI4s", b"RIFF", 36 + len(payload), b"WAVE"),
            struct.pack(
                "<4sIHHIIHH",
                b"fmt ",
                16,
                _WAVE_FORMAT_IEEE_FLOAT,
                1,
                rate,
                rate * 4,
                4,
                32,
            ),
            struct.pack("<4sI", b"data", len(payload)),
        ]
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(payload)


def resample(buffer: AudioBuffer, target_rate_hz: int) -> AudioBuffer:
    """Polyphase windowed-sinc resampling to a new rate.

    Same-rate calls pass the buffer through untouched.  Output length is
    round(len * target / source); the signal is band-limited below the
    smaller of the two Nyquist frequencies.
    """
    target = int(target_rate_hz)
    if target <= 0:
        raise ValueError(f"target rate must be positive, got {target_rate_hz}")
    source = buffer.sample_rate_hz
    if target == source:
        return buffer
    g = math.gcd(target, source)
    up, down = target // g, source // g
    n_out = int(math.floor(len(buffer) * target / source + 0.5))
    if len(buffer) == 0:
        return AudioBuffer(np.zeros(0), target)
    # kaiser beta 8.6 ~ 90 dB stopband; default 5.0 would leak aliases
    out = resample_poly(buffer.samples, up, down, window=("kaiser", 8.6))
    if out.size < n_out:
        out = np.concatenate([out, np.zeros(n_out - out.size)])
    return AudioBuffer(out[:n_out], target)


def rms(x: np.ndarray) -> float:
    """Linear RMS of an array (0.0 for empty input)."""
    if x.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(np.square(x))))


def rms_dbfs(buffer: AudioBuffer) -> float:
    """RMS level in dBFS, clamped at -200 dB for silence."""
    if len(buffer) == 0:
        raise ValueError("rms_dbfs of an empty buffer")
    r = rms(buffer.samples)
    if r <= 0.0:
        return SILENCE_DB
    return max(20.0 * math.log10(r), SILENCE_DB)
