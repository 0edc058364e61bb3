"""Stationary solutions of Amari-type fields by fixed-point iteration.

Field grids are plain 2-D ``float64`` arrays; one array element per neuron
(and per video pixel).  With the temporal derivative set to zero, every
field in the model satisfies

    u = drive - h + gate(kernel (*) u)

and is solved with undamped Picard sweeps of that map.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import cv2
import numpy as np

from .exceptions import DimensionError, ParameterError
from .kernels import DogKernel, Kernel3x3, theta, vartheta

logger = logging.getLogger(__name__)

AnyKernel = Union[Kernel3x3, DogKernel, np.ndarray]


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-6
    max_iters: int = 200
    warm_start: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterError(f"tol must be > 0, got {self.tol!r}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ParameterError(f"max_iters must be an integer >= 1, got {self.max_iters!r}")


class SolveResult(NamedTuple):
    values: np.ndarray
    converged: bool
    iterations: int
    residual: float


def _weights(kernel: AnyKernel) -> np.ndarray:
    w = kernel if isinstance(kernel, np.ndarray) else kernel.weights
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2 == 0:
        raise DimensionError(f"kernel must be square with odd side, got shape {w.shape}")
    return w


def as_grid(values, name: str = "field") -> np.ndarray:
    """Return ``values`` as a C-contiguous 2-D float64 array, checking finiteness."""
    grid = np.ascontiguousarray(values, dtype=np.float64)
    if grid.ndim != 2 or grid.size == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D grid, got shape {grid.shape}")
    if not np.isfinite(grid).all():
        raise ParameterError(f"{name} contains non-finite values")
    return grid


def convolve(field, kernel: AnyKernel) -> np.ndarray:
    """Zero-padded lateral sum ``out[x, y] = sum_ij k[i, j] * field[x+i, y+j]``.

    Neighbours outside the grid contribute nothing.
    """
    grid = as_grid(field)
    w = _weights(kernel)
    if w.shape[0] > min(grid.shape):
        raise DimensionError(f"kernel side {w.shape[0]} exceeds grid shape {grid.shape}")
    return _correlate(grid, w)


def _correlate(grid: np.ndarray, w: np.ndarray) -> np.ndarray:
    # filter2D correlates (no kernel flip), matching the neighbour sum above
    return cv2.filter2D(grid, cv2.CV_64F, w, borderType=cv2.BORDER_CONSTANT)


def solve_stationary(
    drive,
    kernel: AnyKernel,
    h: float,
    gate: Callable[[np.ndarray], np.ndarray] = vartheta,
    init=None,
    settings: Optional[SolverSettings] = None,
) -> SolveResult:
    """Iterate ``u <- drive - h + gate(kernel (*) u)`` to a fixed point.

    Stops when the max-norm change of one sweep drops below ``settings.tol``
    and returns the iterate that satisfied the test, so a converged result
    has a stationarity residual below ``tol``.  Hitting ``max_iters`` is not
    an error: the last iterate comes back with ``converged=False``.

    Parameters
    ----------
    drive : array_like, shape (m, n)
        External input of the field (P_on, P_off, or the Summation drive).
    kernel : Kernel3x3, DogKernel or ndarray
        Lateral interaction weights.
    h : float
        Resting level subtracted from every neuron.
    gate : callable
        Nonlinearity applied to the lateral sum.
    init : array_like, optional
        Starting field; zeros when omitted.
    settings : SolverSettings, optional
    """
    settings = settings or SolverSettings()
    drive = as_grid(drive, "drive")
    w = _weights(kernel)
    if w.shape[0] > min(drive.shape):
        raise DimensionError(f"kernel side {w.shape[0]} exceeds grid shape {drive.shape}")
    if init is None:
        u = np.zeros_like(drive)
    else:
        u = as_grid(init, "init")
        if u.shape != drive.shape:
            raise DimensionError(f"init shape {u.shape} != drive shape {drive.shape}")

    offset = drive - h
    residual = np.inf
    for k in range(1, settings.max_iters + 1):
        nxt = offset + gate(_correlate(u, w))
        residual = float(np.max(np.abs(nxt - u)))
        if residual < settings.tol:
            return SolveResult(u, True, k, residual)
        u = nxt
    logger.warning("fixed point not reached in %d sweeps (residual %.3g)", settings.max_iters, residual)
    return SolveResult(u, False, settings.max_iters, residual)


def summation_rhs(u_on, u_off, alpha_on: float = 0.5, alpha_off: float = 0.5) -> np.ndarray:
    """Drive of the Summation field: ``alpha_on*theta(u_on) + alpha_off*theta(u_off)``."""
    u_on = as_grid(u_on, "u_on")
    u_off = as_grid(u_off, "u_off")
    if u_on.shape != u_off.shape:
        raise DimensionError(f"ON field {u_on.shape} and OFF field {u_off.shape} differ in shape")
    return alpha_on * theta(u_on) + alpha_off * theta(u_off)
