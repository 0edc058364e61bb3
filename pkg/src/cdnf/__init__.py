"""Looming detection with coupled ON/OFF-contrast dynamic neural fields."""

from .contrast import luminance_change, rectify, to_grayscale
from .exceptions import DimensionError, ParameterError
from .field import SolverSettings, SolveResult, convolve, solve_stationary, summation_rhs
from .kernels import DogKernel, Kernel3x3, build_dog, build_gaussian3x3, theta, vartheta
from .model import (
    FrameRecord,
    ModelParams,
    ModelState,
    RunTrace,
    integrate,
    process_frame,
    run_sequence,
    spike,
)
from .stimuli import (
    FrameSequence,
    RainParams,
    StimulusSpec,
    add_rain,
    compute_snr,
    degrade_coherence,
    gen_coherent,
    make_stimulus,
    overlay_rain,
)

__version__ = "0.1.0"
