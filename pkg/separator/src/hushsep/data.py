"""File-contract I/O: manifest JSONL and mixture/ground-truth WAV pairs.

This module is the only bridge to the primary hushlab package and it is
purely file-based: the dataset builder writes a ``manifest.jsonl`` where
each line is a JSON object with at least ``id`` and ``split`` fields,
and for every entry a ``<id>_mix.wav`` / ``<id>_gt.wav`` pair of
float32 mono WAVs sits next to the manifest.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.io import wavfile

__all__ = ["DataError", "load_manifest", "load_pairs", "read_wav_f32", "write_wav_f32"]


class DataError(Exception):
    """Raised when the manifest or the WAV files violate the contract."""


def read_wav_f32(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a mono WAV file as float32 samples.

    Parameters
    ----------
    path : str or Path
        WAV file to read.

    Returns
    -------
    samples : numpy.ndarray
        1-D float32 array.  Integer PCM files are scaled to [-1, 1);
        float32 files are returned bit-exactly.
    rate : int
        Sample rate in Hz.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"WAV file not found: {path}")
    rate, data = wavfile.read(path)
    if data.ndim != 1:
        raise DataError(f"expected mono audio in {path}, got shape {data.shape}")
    if data.dtype == np.float32:
        return data, int(rate)
    if data.dtype == np.int16:
        return (data.astype(np.float32) / 32768.0), int(rate)
    if data.dtype == np.int32:
        return (data.astype(np.float32) / 2147483648.0), int(rate)
    raise DataError(f"unsupported WAV sample format {data.dtype} in {path}")


def write_wav_f32(samples: np.ndarray, path: str | Path, rate: int) -> None:
    """Write float32 mono samples as an IEEE-float WAV file.

    Parameters
    ----------
    samples : numpy.ndarray
        1-D array of samples; converted to float32 if needed.
    path : str or Path
        Destination file; parent directories must exist.
    rate : int
        Sample rate in Hz.
    """
    out = np.ascontiguousarray(np.asarray(samples, dtype=np.float32))
    if out.ndim != 1:
        raise DataError(f"expected a 1-D sample array, got shape {out.shape}")
    wavfile.write(Path(path), int(rate), out)


def load_manifest(manifest_path: str | Path) -> list[dict]:
    """Parse a dataset manifest (one JSON object per line).

    Parameters
    ----------
    manifest_path : str or Path
        Path to the ``manifest.jsonl`` written by the dataset builder.

    Returns
    -------
    list of dict
        One dict per line, in file order.  Every entry must carry an
        ``id`` field; ``split`` defaults to ``"all"`` when absent.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DataError(f"manifest not found: {manifest_path}")
    entries: list[dict] = []
    with open(manifest_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(
                    f"{manifest_path}:{lineno}: invalid JSON: {exc}"
                ) from exc
            if not isinstance(entry, dict) or "id" not in entry:
                raise DataError(
                    f"{manifest_path}:{lineno}: manifest entries must be "
                    "JSON objects with an 'id' field"
                )
            entry.setdefault("split", "all")
            entries.append(entry)
    return entries


def load_pairs(
    manifest_path: str | Path,
    data_dir: str | Path | None = None,
    split: str | None = None,
) -> list[tuple[str, np.ndarray, np.ndarray, int]]:
    """Load (id, mixture, ground truth, rate) tuples for a split.

    Parameters
    ----------
    manifest_path : str or Path
        Manifest JSONL file.
    data_dir : str or Path, optional
        Directory holding the WAV files; defaults to the manifest's
        directory.
    split : str, optional
        Keep only entries whose ``split`` field matches; ``None`` keeps
        everything.

    Returns
    -------
    list of (str, numpy.ndarray, numpy.ndarray, int)
        One tuple per manifest entry, in manifest order.

    Raises
    ------
    DataError
        If the selection is empty, a WAV file named by the manifest is
        missing, or a pair disagrees in length or rate.
    """
    manifest_path = Path(manifest_path)
    base = Path(data_dir) if data_dir is not None else manifest_path.parent
    entries = load_manifest(manifest_path)
    if split is not None:
        entries = [e for e in entries if e.get("split") == split]
    if not entries:
        raise DataError(
            f"no manifest entries selected from {manifest_path}"
            + (f" for split '{split}'" if split is not None else "")
        )

    pairs: list[tuple[str, np.ndarray, np.ndarray, int]] = []
    for entry in entries:
        clip_id = str(entry["id"])
        mix, mix_rate = read_wav_f32(base / f"{clip_id}_mix.wav")
        gt, gt_rate = read_wav_f32(base / f"{clip_id}_gt.wav")
        if mix_rate != gt_rate:
            raise DataError(
                f"rate mismatch for id '{clip_id}': mix {mix_rate} Hz "
                f"vs gt {gt_rate} Hz"
            )
        if mix.shape != gt.shape:
            raise DataError(
                f"length mismatch for id '{clip_id}': mix {mix.shape[0]} "
                f"vs gt {gt.shape[0]} samples"
            )
        pairs.append((clip_id, mix, gt, mix_rate))

    rates = {rate for _, _, _, rate in pairs}
    if len(rates) > 1:
        raise DataError(f"mixed sample rates across pairs: {sorted(rates)}")
    return pairs
