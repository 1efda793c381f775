"""Causal neural separator for trigger-sound removal.

Consumes mixture/ground-truth WAV pairs produced by the hushlab dataset
builder (via its manifest JSONL and file-naming contracts) and exports
``<id>_proc_nn.wav`` estimates that the hushlab CLI adopts through its
``process --algorithm nn`` adapter.  No hushlab code is imported; the two
packages communicate only through files.
"""

from .data import DataError, load_pairs, read_wav_f32, write_wav_f32
from .export import export_processed
from .loss import neg_sisnr_loss
from .model import CausalSeparator, ModelConfig, count_parameters
from .train import (
    TrainConfig,
    evaluate_loss,
    load_checkpoint,
    save_checkpoint,
    train,
)

__all__ = [
    "CausalSeparator",
    "DataError",
    "ModelConfig",
    "TrainConfig",
    "count_parameters",
    "evaluate_loss",
    "export_processed",
    "load_checkpoint",
    "load_pairs",
    "neg_sisnr_loss",
    "read_wav_f32",
    "save_checkpoint",
    "train",
    "write_wav_f32",
]

__version__ = "0.1.0"
