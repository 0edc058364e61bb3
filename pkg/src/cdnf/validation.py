"""Input checks shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, ParameterError


def check_frame(frame) -> np.ndarray:
    """Return ``frame`` as a 2-D float64 array with every pixel in [0, 1]."""
    arr = np.asarray(frame, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"a frame must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
        raise ParameterError("frame pixels must be finite and lie in [0, 1]")
    return arr


def check_frames(frames, min_frames: int = 1) -> np.ndarray:
    """Validate a clip and return it as a ``(T, m, n)`` float64 array."""
    if hasattr(frames, "frames"):
        frames = frames.frames
    if isinstance(frames, (list, tuple)):
        if not frames:
            raise DimensionError("empty frame sequence")
        shapes = {np.shape(f) for f in frames}
        if len(shapes) != 1:
            raise DimensionError(f"frames differ in resolution: {sorted(shapes)}")
    arr = np.asarray(frames, dtype=np.float64)
    if arr.ndim != 3 or 0 in arr.shape[1:]:
        raise DimensionError(f"a clip must have shape (T, m, n), got {arr.shape}")
    if arr.shape[0] < min_frames:
        raise DimensionError(f"need at least {min_frames} frames, got {arr.shape[0]}")
    if not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0:
        raise ParameterError("frame pixels must be finite and lie in [0, 1]")
    return arr
