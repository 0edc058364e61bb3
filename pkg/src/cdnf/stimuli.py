"""Synthetic test stimuli: looming/receding squares, translating bars,
coherence-degraded variants, synthetic rain and SNR measurement.

Every generator is a pure function of its spec and seed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import cv2
import numpy as np

from .exceptions import DimensionError, ParameterError
from .validation import check_frames

KINDS = ("looming", "receding", "translating")
POLARITIES = ("dark", "light")
EXPANSIONS = ("hyperbolic", "linear")

_POLARITY_ALIASES = {"dark_on_light": "dark", "light_on_dark": "light"}


@dataclass
class FrameSequence:
    """Gray frames in [0, 1] with shape ``(T, m, n)`` plus clip metadata."""

    frames: np.ndarray
    fps: float = 30.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frames = check_frames(self.frames)

    def __len__(self):
        return self.frames.shape[0]

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, idx):
        return self.frames[idx]

    @property
    def resolution(self) -> Tuple[int, int]:
        return self.frames.shape[1:]

    def inverted(self) -> "FrameSequence":
        return FrameSequence(1.0 - self.frames, self.fps, dict(self.meta, inverted=True))

    def reversed(self) -> "FrameSequence":
        return FrameSequence(self.frames[::-1].copy(), self.fps, dict(self.meta, reversed=True))


@dataclass(frozen=True)
class StimulusSpec:
    """Geometry and timing of one synthetic clip.

    ``size_start``/``size_end`` are half-widths of the looming square in
    pixels; ``None`` selects 2.5% and 45% of the smaller frame dimension.
    With ``expansion="hyperbolic"`` the half-width follows a constant-speed
    approach (``1/size`` linear in time); ``"linear"`` grows it linearly.
    """

    kind: str = "looming"
    polarity: str = "dark"
    resolution: Tuple[int, int] = (200, 200)
    fps: float = 30.0
    duration: int = 90
    size_start: Optional[float] = None
    size_end: Optional[float] = None
    expansion: str = "hyperbolic"
    bar_width: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "polarity", _POLARITY_ALIASES.get(self.polarity, self.polarity))
        object.__setattr__(self, "resolution", tuple(int(v) for v in self.resolution))
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.polarity not in POLARITIES:
            raise ParameterError(f"polarity must be one of {POLARITIES}, got {self.polarity!r}")
        if self.expansion not in EXPANSIONS:
            raise ParameterError(f"expansion must be one of {EXPANSIONS}, got {self.expansion!r}")
        if len(self.resolution) != 2 or min(self.resolution) < 1:
            raise ParameterError(f"resolution must be two positive integers, got {self.resolution}")
        if self.duration < 2:
            raise ParameterError(f"duration must be at least 2 frames, got {self.duration}")
        if not self.fps > 0:
            raise ParameterError(f"fps must be positive, got {self.fps}")
        s0, s1 = self.sizes
        if not 0 < s0 < s1:
            raise ParameterError(f"need 0 < size_start < size_end, got {s0}, {s1}")
        if 2 * round(s1) > min(self.resolution):
            raise DimensionError(f"object half-width {s1} exceeds frame {self.resolution}")
        w = self.bar_px
        if not 1 <= w <= self.resolution[1]:
            raise DimensionError(f"bar width {w} does not fit frame width {self.resolution[1]}")

    @property
    def sizes(self) -> Tuple[float, float]:
        short = min(self.resolution)
        s0 = 0.025 * short if self.size_start is None else float(self.size_start)
        s1 = 0.45 * short if self.size_end is None else float(self.size_end)
        return s0, s1

    @property
    def bar_px(self) -> int:
        return max(1, round(0.1 * self.resolution[1])) if self.bar_width is None else int(self.bar_width)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RainParams:
    droplets_per_frame: int = 500
    length_px: int = 8
    width_px: int = 1
    angle_jitter: float = 0.1
    gray_value: float = 0.7
    blur_sigma: float = 0.8
    blend_weight: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.droplets_per_frame < 0 or self.length_px < 1 or self.width_px < 1:
            raise ParameterError("droplet count must be >= 0 and streak size >= 1 pixel")
        if not 0.0 <= self.blend_weight <= 1.0:
            raise ParameterError(f"blend_weight must lie in [0, 1], got {self.blend_weight}")
        if not 0.0 <= self.gray_value <= 1.0:
            raise ParameterError(f"gray_value must lie in [0, 1], got {self.gray_value}")
        if self.blur_sigma < 0 or self.angle_jitter < 0:
            raise ParameterError("blur_sigma and angle_jitter must be non-negative")


def half_width_schedule(spec: StimulusSpec) -> np.ndarray:
    """Half-width of the looming square at every frame (float, unrounded)."""
    s0, s1 = spec.sizes
    a = np.linspace(0.0, 1.0, spec.duration)
    if spec.expansion == "linear":
        return s0 + (s1 - s0) * a
    # constant approach speed: distance is linear in time, size ~ 1/distance
    return 1.0 / (1.0 / s0 + (1.0 / s1 - 1.0 / s0) * a)


def object_masks(spec: StimulusSpec) -> np.ndarray:
    """Boolean ``(T, m, n)`` masks of the object pixels of the coherent clip."""
    m, n = spec.resolution
    T = spec.duration
    masks = np.zeros((T, m, n), dtype=bool)
    if spec.kind == "translating":
        w = spec.bar_px
        # whole-pixel step per frame keeps the speed exactly constant
        step = max(1, (n - w) // (T - 1))
        lefts = np.minimum(step * np.arange(T), n - w)
        for k, x in enumerate(lefts):
            masks[k, :, x : x + w] = True
        return masks
    cy, cx = m // 2, n // 2
    for k, r in enumerate(np.rint(half_width_schedule(spec)).astype(int)):
        masks[k, cy - r : cy + r, cx - r : cx + r] = True
    if spec.kind == "receding":
        masks = masks[::-1].copy()
    return masks


def _render(masks: np.ndarray, polarity: str) -> np.ndarray:
    obj, bg = (0.0, 1.0) if polarity == "dark" else (1.0, 0.0)
    return np.where(masks, obj, bg)


def gen_coherent(spec: StimulusSpec) -> FrameSequence:
    """Solid object on a uniform background.

    Dark polarity draws a black object (0) on white (1); light swaps them.
    Receding clips are the exact frame reversal of the looming clip.
    """
    meta = {"spec": spec.to_dict(), "coherence": 100.0, "jump_frame": None}
    return FrameSequence(_render(object_masks(spec), spec.polarity), spec.fps, meta)


def _scatter_masks(masks: np.ndarray, degree: float, rng: np.random.Generator):
    """Incrementally relocate object pixels.

    Every coherent object pixel is bound to one display position when it
    first appears: in place for a ``degree``% share of each frame's newcomers,
    otherwise a random free background position.  A newcomer kept in place
    evicts any relocated pixel sitting there, and the evicted pixel moves to
    fresh background.  Bindings persist until the coherent pixel leaves the
    object, so each frame flips exactly as many pixels as the coherent clip.
    When the free background cannot take the relocated pixels, the clip
    jumps to the final object size.

    Returns the display masks, the jump frame (or None) and per-frame counts
    of pixels kept in place and relocated.
    """
    T = masks.shape[0]
    flat = masks.reshape(T, -1)
    N = flat.shape[1]
    bound = np.full(N, -1, dtype=np.int64)  # coherent pixel -> display position
    owner = np.full(N, -1, dtype=np.int64)  # display position -> coherent pixel
    out = np.zeros_like(flat)
    prev = np.zeros(N, dtype=bool)
    frac = degree / 100.0
    kept_counts, moved_counts = [], []

    for k in range(T):
        cur = flat[k]
        removed = np.flatnonzero(prev & ~cur)
        added = np.flatnonzero(cur & ~prev)
        freed = bound[removed]
        owner[freed] = -1
        bound[removed] = -1
        # a position vacated this frame must not be refilled this frame
        blocked = np.zeros(N, dtype=bool)
        blocked[freed] = True

        n_keep = int(math.floor(frac * added.size + 0.5))
        inplace_ok = added[~blocked[added]]
        keep = rng.choice(inplace_ok, size=min(n_keep, inplace_ok.size), replace=False)
        evicted = owner[keep]
        evicted = evicted[evicted >= 0]
        move = np.concatenate([np.setdiff1d(added, keep, assume_unique=True), evicted])
        occupied = owner >= 0
        occupied[keep] = True
        candidates = np.flatnonzero(~occupied & ~cur & ~blocked)
        if candidates.size < move.size:
            out[k:] = _final_layout(flat[-1], bound, owner, rng)
            return out.reshape(masks.shape), k, kept_counts, moved_counts
        targets = rng.choice(candidates, size=move.size, replace=False)
        bound[keep] = keep
        owner[keep] = keep
        bound[move] = targets
        owner[targets] = move
        out[k] = owner >= 0
        kept_counts.append(int(keep.size))
        moved_counts.append(int(move.size))
        prev = cur
    return out.reshape(masks.shape), None, kept_counts, moved_counts


def _final_layout(final: np.ndarray, bound: np.ndarray, owner: np.ndarray, rng) -> np.ndarray:
    """Final-size object that keeps the current scattered layout.

    Pixels still bound stay where they are; the missing ones go in place
    where free, otherwise to random free positions.
    """
    occupied = owner >= 0
    gone = np.flatnonzero((bound >= 0) & ~final)
    occupied[bound[gone]] = False
    pending = np.flatnonzero(final & (bound < 0))
    inplace = pending[~occupied[pending]]
    occupied[inplace] = True
    rest = pending.size - inplace.size
    occupied[rng.choice(np.flatnonzero(~occupied), size=rest, replace=False)] = True
    return occupied


def degrade_coherence(spec: StimulusSpec, degree: float, seed: Optional[int] = None) -> FrameSequence:
    """Clip whose object keeps only ``degree`` percent of its pixels in place.

    ``meta["jump_frame"]`` holds the frame at which the clip skipped to its
    final layout, or ``None``.
    """
    if not 0.0 < degree <= 100.0:
        raise ParameterError(f"coherence degree must lie in (0, 100], got {degree}")
    seed = spec.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    if spec.kind == "receding":
        base = StimulusSpec(**dict(spec.to_dict(), kind="looming"))
        display, jump, kept, moved = _scatter_masks(object_masks(base), degree, rng)
        display = display[::-1].copy()
        jump = None if jump is None else spec.duration - jump
    else:
        display, jump, kept, moved = _scatter_masks(object_masks(spec), degree, rng)
    meta = {
        "spec": spec.to_dict(),
        "coherence": float(degree),
        "seed": int(seed),
        "jump_frame": jump,
        "kept_in_place": kept,
        "relocated": moved,
    }
    return FrameSequence(_render(display, spec.polarity), spec.fps, meta)


def make_stimulus(spec: StimulusSpec, degree: float = 100.0, seed: Optional[int] = None) -> FrameSequence:
    if degree == 100.0:
        return gen_coherent(spec)
    return degrade_coherence(spec, degree, seed)


def rain_layer(shape: Tuple[int, int], params: RainParams, rng: np.random.Generator) -> np.ndarray:
    """Blurred layer of gray streaks, each ``length_px`` long, heading downward."""
    m, n = shape
    layer = np.zeros((m, n), dtype=np.float64)
    count = params.droplets_per_frame
    if count:
        # one row per droplet, so a larger count extends the same droplet set
        u = rng.random((count, 3))
        y0 = u[:, 0] * m
        x0 = u[:, 1] * n
        ang = (2.0 * u[:, 2] - 1.0) * params.angle_jitter
        steps = np.arange(params.length_px)
        ys = np.floor(y0[:, None] + steps[None, :] * np.cos(ang)[:, None]).astype(int)
        xs = np.floor(x0[:, None] + steps[None, :] * np.sin(ang)[:, None]).astype(int)
        for dx in range(params.width_px):
            xx = xs + dx
            ok = (ys < m) & (xx >= 0) & (xx < n)
            layer[ys[ok], xx[ok]] = params.gray_value
    if params.blur_sigma > 0:
        k = 2 * max(1, int(round(params.blur_sigma))) + 1
        layer = cv2.GaussianBlur(layer, (k, k), params.blur_sigma)
    return layer


def overlay_rain(frame, params: RainParams = RainParams(), frame_seed=None) -> np.ndarray:
    """``clip(frame + blend_weight * rain_layer, 0, 1)`` for one frame."""
    frame = np.asarray(frame, dtype=np.float64)
    rng = np.random.default_rng(frame_seed)
    layer = rain_layer(frame.shape, params, rng)
    return np.clip(frame + params.blend_weight * layer, 0.0, 1.0)


def add_rain(seq, params: RainParams = RainParams()) -> FrameSequence:
    """Rain over every frame; frame ``t`` draws from the seed pair ``(params.seed, t)``."""
    fps = getattr(seq, "fps", 30.0)
    meta = dict(getattr(seq, "meta", {}))
    frames = check_frames(seq)
    rained = np.stack([overlay_rain(f, params, [params.seed, t]) for t, f in enumerate(frames)])
    meta["rain"] = asdict(params)
    return FrameSequence(rained, fps, meta)


def compute_snr(clean, noisy) -> float:
    """``10 log10(sum clean^2 / sum (noisy - clean)^2)`` in dB; ``inf`` for zero noise."""
    clean = check_frames(clean) if np.ndim(getattr(clean, "frames", clean)) == 3 else np.asarray(clean, float)
    noisy = check_frames(noisy) if np.ndim(getattr(noisy, "frames", noisy)) == 3 else np.asarray(noisy, float)
    if clean.shape != noisy.shape:
        raise DimensionError(f"clean {clean.shape} and noisy {noisy.shape} differ in shape")
    noise = float(np.sum((noisy - clean) ** 2))
    if noise == 0.0:
        return math.inf
    signal = float(np.sum(clean**2))
    if signal == 0.0:
        return -math.inf
    return 10.0 * math.log10(signal / noise)
