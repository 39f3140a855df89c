# SPDX-License-Identifier: Apache-2.0
"""Flow-consistency and silhouette metrics for generated video."""

from vmetrics._core import (
    ComputeError,
    ValidationError,
    dfci,
    dice,
    endpoint_error,
    estimate_flow,
    facial_attention,
    l1_metric,
    masked_loss,
    masked_loss_grad,
    masked_psnr,
    psnr,
    read_flo,
    sampler_attention,
    self_check,
    silhouette_consistency,
    ssim,
    to_luma,
    token_layout,
    warp,
    write_flo,
)

__all__ = [
    "ComputeError",
    "ValidationError",
    "dfci",
    "dice",
    "endpoint_error",
    "estimate_flow",
    "facial_attention",
    "l1_metric",
    "masked_loss",
    "masked_loss_grad",
    "masked_psnr",
    "psnr",
    "read_flo",
    "sampler_attention",
    "self_check",
    "silhouette_consistency",
    "ssim",
    "to_luma",
    "token_layout",
    "warp",
    "write_flo",
]
