"""Per-frame pipeline of the three-field looming detector.

Each frame goes through: luminance change -> ON/OFF rectification ->
stationary ON and OFF contrast fields (normalized Gaussian excitation) ->
Summation field driven by both (DoG interaction) -> sigmoid integration
of the gated Summation activity -> threshold spike.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .contrast import luminance_change, rectify
from .exceptions import DimensionError, ParameterError
from .field import SolverSettings, solve_stationary, summation_rhs
from .kernels import DogKernel, Kernel3x3, build_dog, build_gaussian3x3, theta
from .validation import check_frame, check_frames

logger = logging.getLogger(__name__)

BASELINE_IV = 0.5
INTEGRATION_GATES = ("positive", "above_h")


@dataclass(frozen=True)
class ModelParams:
    h: float = 0.2
    sigma_c: float = 1.0
    alpha_on: float = 0.5
    alpha_off: float = 0.5
    sigma1: float = 1.0 / 3.0
    dog_radius: int = 3
    epsilon: float = 0.006
    solver: SolverSettings = field(default_factory=SolverSettings)
    integration_gate: str = "positive"

    def __post_init__(self):
        if self.integration_gate not in INTEGRATION_GATES:
            raise ParameterError(
                f"integration_gate must be one of {INTEGRATION_GATES}, got {self.integration_gate!r}"
            )
        if not self.epsilon >= 0:
            raise ParameterError(f"epsilon must be >= 0, got {self.epsilon!r}")
        # kernel constructors raise on bad sigma/radius
        _kernels(self.sigma_c, self.sigma1, self.dog_radius)

    @property
    def i_thre(self) -> float:
        """Alert threshold: the resting integrated signal 0.5 plus ``epsilon``."""
        return BASELINE_IV + self.epsilon

    @property
    def sigma2(self) -> float:
        return 3.0 * self.sigma1

    def with_solver(self, **kwargs) -> "ModelParams":
        return replace(self, solver=replace(self.solver, **kwargs))


@functools.lru_cache(maxsize=32)
def _kernels(sigma_c: float, sigma1: float, radius: int) -> Tuple[Kernel3x3, DogKernel]:
    return build_gaussian3x3(sigma_c), build_dog(sigma1, radius)


@dataclass
class ModelState:
    u_on: np.ndarray
    u_off: np.ndarray
    v_s: np.ndarray
    prev_frame: Optional[np.ndarray] = None
    t: int = 0

    @classmethod
    def initial(cls, shape: Tuple[int, int]) -> "ModelState":
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.u_on.shape


@dataclass(frozen=True)
class FrameRecord:
    t: int
    iv: float
    spike: bool
    converged: bool = True
    iterations: Tuple[int, int, int] = (0, 0, 0)
    residual: float = 0.0


@dataclass
class RunTrace:
    records: List[FrameRecord] = field(default_factory=list)
    snapshots: Optional[List[dict]] = None

    def __len__(self):
        return len(self.records)

    @property
    def iv(self) -> np.ndarray:
        return np.array([r.iv for r in self.records], dtype=np.float64)

    @property
    def spikes(self) -> np.ndarray:
        return np.array([r.spike for r in self.records], dtype=bool)

    @property
    def first_spike(self) -> Optional[int]:
        for r in self.records:
            if r.spike:
                return r.t
        return None

    @property
    def non_converged_frames(self) -> List[int]:
        return [r.t for r in self.records if not r.converged]


def logistic(x: float) -> float:
    return 1.0 / (1.0 + np.exp(-x))


def integrate(v_s, params: ModelParams = ModelParams()) -> float:
    """Integrated signal ``1 / (1 + exp(-mean(gated theta(v_s))))``.

    Only neurons above the gate level (0 for ``"positive"``, ``h`` for
    ``"above_h"``) contribute; a field with no such neuron yields exactly 0.5.
    """
    v_s = np.asarray(v_s, dtype=np.float64)
    level = 0.0 if params.integration_gate == "positive" else params.h
    active = v_s > level
    total = float(theta(v_s[active]).sum()) if active.any() else 0.0
    return float(logistic(total / v_s.size))


def spike(iv: float, params: ModelParams = ModelParams()) -> bool:
    return bool(iv > params.i_thre)


def process_frame(
    state: ModelState, frame, params: ModelParams = ModelParams(), keep_snapshot: bool = False
) -> Tuple[ModelState, FrameRecord, Optional[dict]]:
    """Advance the model by one frame.

    Returns the new state, the frame record and, when ``keep_snapshot`` is
    set, a dict with copies of the input maps and stationary fields.  The
    first frame (no predecessor) sees an all-zero luminance change.
    """
    frame = check_frame(frame)
    if frame.shape != state.shape:
        raise DimensionError(f"frame shape {frame.shape} != model resolution {state.shape}")
    gauss, dog = _kernels(params.sigma_c, params.sigma1, params.dog_radius)
    settings = params.solver

    if state.prev_frame is None:
        p = np.zeros_like(frame)
    else:
        p = luminance_change(frame, state.prev_frame)
    p_on, p_off = rectify(p)

    warm = settings.warm_start
    on = solve_stationary(p_on, gauss, params.h, init=state.u_on if warm else None, settings=settings)
    off = solve_stationary(p_off, gauss, params.h, init=state.u_off if warm else None, settings=settings)
    drive = summation_rhs(on.values, off.values, params.alpha_on, params.alpha_off)
    summ = solve_stationary(drive, dog, params.h, init=state.v_s if warm else None, settings=settings)

    iv = integrate(summ.values, params)
    converged = on.converged and off.converged and summ.converged
    if not converged:
        logger.warning("frame %d: solver did not converge", state.t)
    record = FrameRecord(
        t=state.t,
        iv=iv,
        spike=spike(iv, params),
        converged=converged,
        iterations=(on.iterations, off.iterations, summ.iterations),
        residual=max(on.residual, off.residual, summ.residual),
    )
    new_state = ModelState(on.values, off.values, summ.values, prev_frame=frame, t=state.t + 1)
    snapshot = None
    if keep_snapshot:
        snapshot = dict(p_on=p_on, p_off=p_off, u_on=on.values, u_off=off.values, v_s=summ.values)
    return new_state, record, snapshot


def run_sequence(frames, params: ModelParams = ModelParams(), snapshots: bool = False) -> RunTrace:
    """Run the model over a whole clip, starting from the zero state."""
    frames = check_frames(frames, min_frames=2)
    state = ModelState.initial(frames.shape[1:])
    trace = RunTrace(snapshots=[] if snapshots else None)
    for frame in frames:
        state, record, snap = process_frame(state, frame, params, keep_snapshot=snapshots)
        trace.records.append(record)
        if snapshots:
            trace.snapshots.append(snap)
    return trace
