"""Seeded training loop, loss history CSV, and checkpoint round-trip."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .loss import neg_sisnr_loss
from .model import CausalSeparator, ModelConfig

__all__ = [
    "TrainConfig",
    "train",
    "evaluate_loss",
    "save_checkpoint",
    "load_checkpoint",
]


@dataclass(frozen=True)
class TrainConfig:
    """Optimisation settings for `train`.

    Parameters
    ----------
    epochs : int
        Number of passes over the training pairs.
    learning_rate : float
        Adam step size.
    batch_size : int
        Items per optimiser step.
    seed : int
        Seeds both parameter initialisation noise consumers and the
        crop-offset draws, making training runs reproducible.
    chunk_samples : int
        Length of the random crop taken from each clip per step; clips
        shorter than this are used whole.  Must cover the model's
        receptive field.
    stop_at_loss : float, optional
        Stop early once the epoch-mean training loss reaches this value.
    """

    epochs: int = 10
    learning_rate: float = 5e-4
    batch_size: int = 4
    seed: int = 0
    chunk_samples: int = 8192
    stop_at_loss: float | None = None

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0.0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.chunk_samples < 1:
            raise ValueError(f"chunk_samples must be >= 1, got {self.chunk_samples}")


def train(
    model: CausalSeparator,
    pairs: list[tuple[str, np.ndarray, np.ndarray, int]],
    config: TrainConfig,
    out_dir: str | Path,
    val_pairs: list[tuple[str, np.ndarray, np.ndarray, int]] | None = None,
) -> tuple[Path, list[float]]:
    """Train `model` on mixture/ground-truth pairs.

    Runs Adam on `neg_sisnr_loss` over seeded random crops, writes a
    per-epoch loss history to ``loss_curve.csv`` and the final weights
    to ``checkpoint.pt`` in `out_dir`, both created on the fly.  With
    the same model initialisation, pairs and config the run is
    reproducible.

    Parameters
    ----------
    model : CausalSeparator
        Network to optimise in place.
    pairs : list
        Training tuples from `load_pairs`; must be non-empty.
    config : TrainConfig
        Optimisation settings.
    out_dir : str or Path
        Output directory for the checkpoint and loss history.
    val_pairs : list, optional
        Held-out tuples; when given, a validation loss is recorded per
        epoch alongside the training loss.

    Returns
    -------
    checkpoint_path : Path
        Location of the saved checkpoint.
    losses : list of float
        Epoch-mean training losses, one per completed epoch.
    """
    if not pairs:
        raise ValueError("no training pairs given")
    if config.chunk_samples < model.config.receptive_field:
        raise ValueError(
            f"chunk_samples ({config.chunk_samples}) must cover the "
            f"receptive field ({model.config.receptive_field})"
        )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    optimiser = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    rate = pairs[0][3]

    losses: list[float] = []
    val_losses: list[float] = []
    for _epoch in range(config.epochs):
        order = rng.permutation(len(pairs))
        epoch_losses: list[float] = []
        model.train()
        for lo in range(0, len(order), config.batch_size):
            batch = [pairs[i] for i in order[lo : lo + config.batch_size]]
            length = min(config.chunk_samples, min(p[1].shape[0] for p in batch))
            # one offset per item so mix and gt stay aligned
            offsets = [
                0
                if p[1].shape[0] <= length
                else int(rng.integers(0, p[1].shape[0] - length + 1))
                for p in batch
            ]
            mix = np.stack([p[1][o : o + length] for p, o in zip(batch, offsets)])
            gt = np.stack([p[2][o : o + length] for p, o in zip(batch, offsets)])

            est = model(torch.from_numpy(mix))
            loss = neg_sisnr_loss(est, torch.from_numpy(gt))
            optimiser.zero_grad()
            loss.backward()
            optimiser.step()
            epoch_losses.append(float(loss.detach()))
        losses.append(float(np.mean(epoch_losses)))
        if val_pairs is not None:
            val_losses.append(evaluate_loss(model, val_pairs))
        if config.stop_at_loss is not None and losses[-1] <= config.stop_at_loss:
            break

    _write_loss_csv(out_dir / "loss_curve.csv", losses, val_losses or None)
    checkpoint_path = out_dir / "checkpoint.pt"
    save_checkpoint(
        model,
        checkpoint_path,
        sample_rate_hz=rate,
        train_config=config,
        loss_history=losses,
    )
    return checkpoint_path, losses


def _write_loss_csv(
    path: Path, losses: list[float], val_losses: list[float] | None
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["epoch", "train_loss"]
        if val_losses is not None:
            header.append("val_loss")
        writer.writerow(header)
        for epoch, loss in enumerate(losses):
            row: list[object] = [epoch, f"{loss:.6f}"]
            if val_losses is not None:
                row.append(f"{val_losses[epoch]:.6f}")
            writer.writerow(row)


def evaluate_loss(
    model: CausalSeparator,
    pairs: list[tuple[str, np.ndarray, np.ndarray, int]],
) -> float:
    """Mean `neg_sisnr_loss` over full (uncropped) clips, one at a time.

    Parameters
    ----------
    model : CausalSeparator
        Network to evaluate; gradients are disabled and the model is
        left in eval mode.
    pairs : list
        Tuples from `load_pairs`; must be non-empty.

    Returns
    -------
    float
        Mean per-clip loss.
    """
    if not pairs:
        raise ValueError("no evaluation pairs given")
    model.eval()
    totals: list[float] = []
    with torch.no_grad():
        for _clip_id, mix, gt, _rate in pairs:
            est = model(torch.from_numpy(mix[None, :]))
            totals.append(float(neg_sisnr_loss(est, torch.from_numpy(gt[None, :]))))
    return float(np.mean(totals))


def save_checkpoint(
    model: CausalSeparator,
    path: str | Path,
    sample_rate_hz: int,
    train_config: TrainConfig | None = None,
    loss_history: list[float] | None = None,
) -> Path:
    """Serialise model weights plus the configs needed to rebuild it.

    Parameters
    ----------
    model : CausalSeparator
        Network whose weights are saved.
    path : str or Path
        Destination file.
    sample_rate_hz : int
        Canonical sample rate the model was (or will be) trained at;
        `export_processed` resamples inputs that disagree.
    train_config : TrainConfig, optional
        Recorded for provenance when available.
    loss_history : list of float, optional
        Epoch-mean losses recorded alongside the weights.

    Returns
    -------
    Path
        The written checkpoint path.
    """
    path = Path(path)
    payload = {
        "model_config": asdict(model.config),
        "state_dict": model.state_dict(),
        "sample_rate_hz": int(sample_rate_hz),
        "train_config": asdict(train_config) if train_config is not None else None,
        "loss_history": list(loss_history) if loss_history is not None else [],
    }
    torch.save(payload, path)
    return path


def load_checkpoint(path: str | Path) -> tuple[CausalSeparator, dict]:
    """Rebuild a `CausalSeparator` from a checkpoint file.

    Parameters
    ----------
    path : str or Path
        File written by `save_checkpoint`.

    Returns
    -------
    model : CausalSeparator
        Network with the stored architecture and weights, in eval mode.
    payload : dict
        The full checkpoint contents, including ``sample_rate_hz``.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    payload = torch.load(path, map_location="cpu", weights_only=True)
    model = CausalSeparator(ModelConfig(**payload["model_config"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, payload
