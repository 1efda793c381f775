"""Strictly causal separator network.

Architecture
------------
A stack of dilated causal 1-D convolutions (dilation doubling per layer)
encodes the waveform into a per-sample latent sequence.  The latent
sequence is average-pooled into non-overlapping frames and a multi-head
attention layer lets every frame attend to *strictly previous* frames
only; the attended context is upsampled back to sample rate and
concatenated onto the latent sequence before a small causal decoder
regresses the output waveform directly.  Direct waveform regression was
chosen over masking: the network is free to reconstruct the kept
components rather than being constrained to scale the mixture.

Causality
---------
Every convolution is left-padded so output sample ``n`` sees inputs
``<= n``.  The attention context for the frame covering sample ``n`` is
built exclusively from frames that end before the frame containing ``n``
starts, so it depends on samples ``< n - (n mod hop)``.  With
``lookahead_samples = 0`` the network is therefore strictly causal at
the sample level: perturbing input sample ``n`` can never change any
output sample before ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

__all__ = ["ModelConfig", "CausalSeparator", "count_parameters"]


@dataclass(frozen=True)
class ModelConfig:
    """Hyper-parameters of the separator network.

    Parameters
    ----------
    enc_layers : int
        Number of dilated causal convolution layers in the encoder.
        Dilations double per layer: ``1, 2, 4, ..., 2**(enc_layers-1)``.
    enc_channels : int
        Channel width of the encoder convolutions.
    latent_dim : int
        Width of the per-sample latent sequence and of the attention
        embedding.
    kernel_size : int
        Kernel length of every convolution in the network.
    dec_layers : int
        Number of causal convolution layers in the decoder (the last
        layer projects to one output channel).
    attn_heads : int
        Number of attention heads in the past-frame attention layer.
    attn_hop : int
        Frame hop (and length) in samples for the attention stage.
    lookahead_samples : int
        Permitted lookahead.  Only ``0`` (strict causality) is
        supported; the field exists so checkpoints record the contract
        explicitly.
    """

    enc_layers: int = 10
    enc_channels: int = 64
    latent_dim: int = 512
    kernel_size: int = 3
    dec_layers: int = 2
    attn_heads: int = 4
    attn_hop: int = 64
    lookahead_samples: int = 0

    def __post_init__(self) -> None:
        if self.enc_layers < 1:
            raise ValueError(f"enc_layers must be >= 1, got {self.enc_layers}")
        if self.enc_channels < 1:
            raise ValueError(f"enc_channels must be >= 1, got {self.enc_channels}")
        if self.latent_dim < 1:
            raise ValueError(f"latent_dim must be >= 1, got {self.latent_dim}")
        if self.kernel_size < 1:
            raise ValueError(f"kernel_size must be >= 1, got {self.kernel_size}")
        if self.dec_layers < 2:
            raise ValueError(f"dec_layers must be >= 2, got {self.dec_layers}")
        if self.attn_heads < 1:
            raise ValueError(f"attn_heads must be >= 1, got {self.attn_heads}")
        if self.latent_dim % self.attn_heads != 0:
            raise ValueError(
                f"latent_dim ({self.latent_dim}) must be divisible by "
                f"attn_heads ({self.attn_heads})"
            )
        if self.attn_hop < 1:
            raise ValueError(f"attn_hop must be >= 1, got {self.attn_hop}")
        if self.lookahead_samples != 0:
            raise ValueError(
                "only lookahead_samples = 0 (strictly causal) is supported, "
                f"got {self.lookahead_samples}"
            )

    @property
    def receptive_field(self) -> int:
        """Receptive field of the dilated encoder stack in samples.

        One input sample plus ``(kernel_size - 1)`` past samples per
        dilation: ``1 + (kernel_size - 1) * (2**enc_layers - 1)``.
        The attention stage additionally sees all previous frames, so
        the full context is unbounded into the past; this count is the
        reach of the convolutional stack alone.
        """
        return 1 + (self.kernel_size - 1) * (2**self.enc_layers - 1)


class _CausalConv1d(nn.Module):
    """Conv1d with left padding so output n depends on inputs <= n."""

    def __init__(
        self, in_channels: int, out_channels: int, kernel_size: int, dilation: int = 1
    ) -> None:
        super().__init__()
        self.pad = dilation * (kernel_size - 1)
        self.conv = nn.Conv1d(
            in_channels, out_channels, kernel_size, dilation=dilation
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.conv(F.pad(x, (self.pad, 0)))


class CausalSeparator(nn.Module):
    """Strictly causal mixture-to-clean separator.

    Maps a batch of mixture waveforms ``[B, T]`` to estimates of the
    mixture with the trigger component removed, also ``[B, T]``.  There
    is no label or class conditioning input: the network must decide
    from the waveform alone what to attenuate.

    Parameters
    ----------
    config : ModelConfig
        Architecture hyper-parameters.
    """

    def __init__(self, config: ModelConfig | None = None) -> None:
        super().__init__()
        self.config = config if config is not None else ModelConfig()
        cfg = self.config

        enc = []
        in_ch = 1
        for layer in range(cfg.enc_layers):
            enc.append(
                _CausalConv1d(in_ch, cfg.enc_channels, cfg.kernel_size, 2**layer)
            )
            in_ch = cfg.enc_channels
        self.encoder = nn.ModuleList(enc)
        self.enc_act = nn.ModuleList(
            nn.PReLU(cfg.enc_channels) for _ in range(cfg.enc_layers)
        )

        self.to_latent = nn.Conv1d(cfg.enc_channels, cfg.latent_dim, 1)
        self.latent_act = nn.PReLU(cfg.latent_dim)

        self.attention = nn.MultiheadAttention(
            cfg.latent_dim, cfg.attn_heads, batch_first=True
        )

        dec = []
        in_ch = 2 * cfg.latent_dim
        for _ in range(cfg.dec_layers - 1):
            dec.append(_CausalConv1d(in_ch, cfg.enc_channels, cfg.kernel_size))
            in_ch = cfg.enc_channels
        self.decoder = nn.ModuleList(dec)
        self.dec_act = nn.ModuleList(
            nn.PReLU(cfg.enc_channels) for _ in range(cfg.dec_layers - 1)
        )
        self.out = _CausalConv1d(in_ch, 1, cfg.kernel_size)

    def _past_frame_context(self, latent: torch.Tensor) -> torch.Tensor:
        """Attention over strictly previous frames, upsampled to samples.

        The latent sequence is pooled into hop-length frames, shifted
        right by one frame (a zero start token fills frame 0), and run
        through causally masked self-attention.  Row ``i`` of the result
        therefore only mixes frames ``< i`` of the unshifted sequence,
        so after upsampling the context at sample ``n`` depends on
        samples ``< n - (n mod hop)`` only.
        """
        hop = self.config.attn_hop
        total = latent.shape[-1]
        n_frames = math.ceil(total / hop)
        padded = F.pad(latent, (0, n_frames * hop - total))
        frames = F.avg_pool1d(padded, kernel_size=hop, stride=hop)

        shifted = F.pad(frames, (1, 0))[..., :-1].transpose(1, 2)  # [B, F, C]
        mask = torch.triu(
            torch.ones(n_frames, n_frames, dtype=torch.bool, device=latent.device),
            diagonal=1,
        )
        context, _ = self.attention(
            shifted, shifted, shifted, attn_mask=mask, need_weights=False
        )
        context = context.transpose(1, 2)  # [B, C, F]
        return torch.repeat_interleave(context, hop, dim=-1)[..., :total]

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Estimate the trigger-free waveform for a batch of mixtures.

        Parameters
        ----------
        x : torch.Tensor
            Mixture waveforms, shape ``[B, T]`` with
            ``T >= config.receptive_field``.

        Returns
        -------
        torch.Tensor
            Estimates, shape ``[B, T]``.  Finite for any finite input,
            including all-zero mixtures (no normalisation layers that
            could divide by zero).
        """
        if x.dim() != 2:
            raise ValueError(f"expected input of shape [B, T], got {tuple(x.shape)}")
        if x.shape[-1] < self.config.receptive_field:
            raise ValueError(
                f"input length {x.shape[-1]} is shorter than the receptive "
                f"field {self.config.receptive_field}"
            )

        h = x.unsqueeze(1)  # [B, 1, T]
        for layer, (conv, act) in enumerate(zip(self.encoder, self.enc_act)):
            out = act(conv(h))
            # residual once widths match; layer 0 maps 1 -> enc_channels
            h = out if layer == 0 else h + out

        latent = self.latent_act(self.to_latent(h))
        context = self._past_frame_context(latent)

        h = torch.cat([latent, context], dim=1)
        for conv, act in zip(self.decoder, self.dec_act):
            h = act(conv(h))
        return self.out(h).squeeze(1)


def count_parameters(model: nn.Module) -> int:
    """Total number of trainable parameters in `model`."""
    return sum(p.numel() for p in model.parameters() if p.requires_grad)
