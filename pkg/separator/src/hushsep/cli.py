"""Command-line entry points: ``hushsep train`` and ``hushsep export``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import torch

from .data import DataError, load_pairs
from .export import export_processed
from .model import CausalSeparator, ModelConfig, count_parameters
from .train import TrainConfig, train

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hushsep", description="Causal neural trigger-sound separator."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a separator on a dataset")
    p_train.add_argument("--manifest", type=Path, required=True)
    p_train.add_argument("--data-dir", type=Path, default=None)
    p_train.add_argument("--out", type=Path, required=True)
    p_train.add_argument("--split", default="train")
    p_train.add_argument("--val-split", default=None)
    p_train.add_argument("--epochs", type=int, default=10)
    p_train.add_argument("--learning-rate", type=float, default=5e-4)
    p_train.add_argument("--batch-size", type=int, default=4)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--chunk-samples", type=int, default=8192)
    p_train.add_argument("--enc-channels", type=int, default=64)
    p_train.add_argument("--latent-dim", type=int, default=512)

    p_export = sub.add_parser(
        "export", help="write <id>_proc_nn.wav estimates for a manifest"
    )
    p_export.add_argument("--checkpoint", type=Path, required=True)
    p_export.add_argument("--manifest", type=Path, required=True)
    p_export.add_argument("--data-dir", type=Path, default=None)
    p_export.add_argument("--out", type=Path, default=None)
    p_export.add_argument("--split", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run the hushsep command line.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name; defaults to ``sys.argv``.

    Returns
    -------
    int
        Process exit status: 0 on success, 1 on handled errors.
    """
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "train":
            torch.manual_seed(args.seed)  # seed the weight initialisation too
            config = ModelConfig(
                enc_channels=args.enc_channels, latent_dim=args.latent_dim
            )
            model = CausalSeparator(config)
            print(
                f"model: {count_parameters(model)} parameters, "
                f"receptive field {config.receptive_field} samples"
            )
            pairs = load_pairs(args.manifest, args.data_dir, split=args.split)
            val_pairs = (
                load_pairs(args.manifest, args.data_dir, split=args.val_split)
                if args.val_split
                else None
            )
            train_config = TrainConfig(
                epochs=args.epochs,
                learning_rate=args.learning_rate,
                batch_size=args.batch_size,
                seed=args.seed,
                chunk_samples=args.chunk_samples,
            )
            checkpoint_path, losses = train(
                model, pairs, train_config, args.out, val_pairs
            )
            print(f"final train loss {losses[-1]:.3f} dB -> {checkpoint_path}")
        else:
            written = export_processed(
                args.checkpoint,
                args.manifest,
                data_dir=args.data_dir,
                out_dir=args.out,
                split=args.split,
            )
            print(f"wrote {len(written)} files")
    except (DataError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
