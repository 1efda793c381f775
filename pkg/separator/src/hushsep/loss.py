"""Training loss: negative scale-invariant signal-to-noise ratio."""

from __future__ import annotations

import torch

__all__ = ["neg_sisnr_loss"]

#: Floor added inside divisions and logarithms to keep the loss finite
#: when the projection error or the reference energy vanishes.
_EPS = 1e-8


def neg_sisnr_loss(est: torch.Tensor, ref: torch.Tensor) -> torch.Tensor:
    """Mean negative SI-SNR between estimates and references, in dB.

    Both signals are mean-subtracted, the estimate is projected onto the
    reference, and the loss for each item is ``-10 * log10`` of the
    projection-to-error energy ratio.  The loss is *not* clamped: a
    perfect estimate drives it to a large negative value, limited only
    by the ``1e-8`` floor inside the ratio.  Minimising this loss
    maximises SI-SNR, and scaling an estimate by any positive constant
    leaves the value unchanged up to floor effects.

    Items whose reference is identically zero after mean subtraction
    carry no directional information (any estimate projects to zero), so
    they are masked out of the batch mean rather than contributing an
    arbitrary constant.  A batch consisting entirely of such items
    raises ``ValueError``.

    Parameters
    ----------
    est : torch.Tensor
        Estimated waveforms, shape ``[B, T]``.
    ref : torch.Tensor
        Reference waveforms, shape ``[B, T]``.

    Returns
    -------
    torch.Tensor
        Scalar loss, differentiable with respect to `est`.
    """
    if est.shape != ref.shape:
        raise ValueError(
            f"shape mismatch: est {tuple(est.shape)} vs ref {tuple(ref.shape)}"
        )
    if est.dim() != 2:
        raise ValueError(f"expected [B, T] tensors, got {tuple(est.shape)}")

    est = est - est.mean(dim=-1, keepdim=True)
    ref = ref - ref.mean(dim=-1, keepdim=True)

    ref_energy = (ref * ref).sum(dim=-1, keepdim=True)
    valid = ref_energy.squeeze(-1) > 0.0
    if not bool(valid.any()):
        raise ValueError("all references are silent; SI-SNR is undefined")

    scale = (est * ref).sum(dim=-1, keepdim=True) / (ref_energy + _EPS)
    target = scale * ref
    error = est - target

    ratio = (target * target).sum(dim=-1) / ((error * error).sum(dim=-1) + _EPS)
    per_item = -10.0 * torch.log10(ratio + _EPS)
    return per_item[valid].mean()
