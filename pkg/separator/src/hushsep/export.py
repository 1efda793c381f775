"""Export model estimates as ``<id>_proc_nn.wav`` files.

The output naming matches what the hushlab CLI's ``process
--algorithm nn`` adapter expects, so a directory produced here can be
handed straight to the primary evaluation pipeline.
"""

from __future__ import annotations

import warnings
from pathlib import Path

import numpy as np
import torch
from scipy.signal import resample_poly

from .data import load_manifest, read_wav_f32, write_wav_f32
from .train import load_checkpoint

__all__ = ["export_processed"]


def export_processed(
    checkpoint_path: str | Path,
    manifest_path: str | Path,
    data_dir: str | Path | None = None,
    out_dir: str | Path | None = None,
    split: str | None = None,
) -> list[Path]:
    """Run a checkpointed model over every manifest mixture.

    For each manifest entry the mixture ``<id>_mix.wav`` is read,
    separated, and written as ``<id>_proc_nn.wav`` — float32 mono at the
    checkpoint's canonical sample rate.  Mixtures recorded at a
    different rate are resampled to the canonical rate first, with a
    warning.  Re-running with the same checkpoint and inputs reproduces
    the output files exactly.

    Parameters
    ----------
    checkpoint_path : str or Path
        Checkpoint written by `train` or `save_checkpoint`.
    manifest_path : str or Path
        Dataset manifest JSONL naming the mixture ids.
    data_dir : str or Path, optional
        Directory holding the ``<id>_mix.wav`` files; defaults to the
        manifest's directory.
    out_dir : str or Path, optional
        Destination directory, created if needed; defaults to
        `data_dir`.
    split : str, optional
        Restrict the export to entries of one split.

    Returns
    -------
    list of Path
        Written files, in manifest order.
    """
    manifest_path = Path(manifest_path)
    base = Path(data_dir) if data_dir is not None else manifest_path.parent
    dest = Path(out_dir) if out_dir is not None else base
    dest.mkdir(parents=True, exist_ok=True)

    model, payload = load_checkpoint(checkpoint_path)
    canonical_rate = int(payload["sample_rate_hz"])

    entries = load_manifest(manifest_path)
    if split is not None:
        entries = [e for e in entries if e.get("split") == split]

    written: list[Path] = []
    with torch.no_grad():
        for entry in entries:
            clip_id = str(entry["id"])
            mix, rate = read_wav_f32(base / f"{clip_id}_mix.wav")
            if rate != canonical_rate:
                warnings.warn(
                    f"resampling '{clip_id}' from {rate} Hz to the "
                    f"canonical {canonical_rate} Hz",
                    stacklevel=2,
                )
                mix = resample_poly(
                    mix.astype(np.float64), canonical_rate, rate
                ).astype(np.float32)
            est = model(torch.from_numpy(mix[None, :]))[0].numpy()
            out_path = dest / f"{clip_id}_proc_nn.wav"
            write_wav_f32(est, out_path, canonical_rate)
            written.append(out_path)
    return written
