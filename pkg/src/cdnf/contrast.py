"""Grayscale normalization, inter-frame luminance change and ON/OFF split."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, ParameterError

# ITU-R BT.601 luma
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_grayscale(raw) -> np.ndarray:
    """Convert an image buffer to a gray frame with values in [0, 1].

    Accepts ``(m, n)`` gray or ``(m, n, 3)`` RGB buffers.  Integer buffers are
    scaled by the maximum of their dtype (255 for ``uint8``); float buffers
    must already lie in [0, 1].
    """
    img = np.asarray(raw)
    if img.ndim == 3 and img.shape[2] == 1:
        img = img[:, :, 0]
    if not (img.ndim == 2 or (img.ndim == 3 and img.shape[2] == 3)):
        raise ParameterError(f"unsupported pixel layout with shape {img.shape}")

    if np.issubdtype(img.dtype, np.integer):
        scale = float(np.iinfo(img.dtype).max)
        img = img.astype(np.float64) / scale
    elif np.issubdtype(img.dtype, np.floating):
        img = img.astype(np.float64)
        if img.size and (img.min() < 0.0 or img.max() > 1.0):
            raise ParameterError("float pixel buffers must lie in [0, 1]")
    else:
        raise ParameterError(f"unsupported pixel dtype {img.dtype}")

    if img.ndim == 3:
        img = img @ LUMA_WEIGHTS
        np.clip(img, 0.0, 1.0, out=img)
    return img


def luminance_change(curr, prev) -> np.ndarray:
    """Pointwise ``curr - prev``."""
    curr = np.asarray(curr, dtype=np.float64)
    prev = np.asarray(prev, dtype=np.float64)
    if curr.shape != prev.shape:
        raise DimensionError(f"frame shapes differ: {curr.shape} vs {prev.shape}")
    return curr - prev


def rectify(p):
    """Half-wave split into (ON, OFF) channels, both non-negative.

    ``p_on - p_off == p`` and ``p_on * p_off == 0`` hold exactly.
    """
    p = np.asarray(p, dtype=np.float64)
    p_on = np.maximum(p, 0.0)
    p_off = -np.minimum(p, 0.0)
    # -min(0, 0) would give -0.0
    p_off += 0.0
    return p_on, p_off
