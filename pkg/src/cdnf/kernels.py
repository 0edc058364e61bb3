"""Lateral-interaction kernels and the pointwise nonlinearities of the fields.

The contrast fields use a normalized 3x3 Gaussian (pure lateral excitation);
the Summation field uses a difference of Gaussians with fixed amplitudes
A = 3/2 and B = 1/2 and an inhibitory width three times the excitatory one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError

DOG_AMP_A = 1.5
DOG_AMP_B = 0.5
DOG_SIGMA_RATIO = 3.0

# (e^2 + 1) / (e^2 - 1) == 1 / tanh(1); dividing keeps theta(1) == 1 exactly
_TANH_ONE = np.tanh(1.0)


@dataclass(frozen=True)
class Kernel3x3:
    weights: np.ndarray = field(repr=False)
    sigma_c: float

    @property
    def radius(self) -> int:
        return 1


@dataclass(frozen=True)
class DogKernel:
    weights: np.ndarray = field(repr=False)
    radius: int
    sigma1: float
    sigma2: float
    amp_A: float = DOG_AMP_A
    amp_B: float = DOG_AMP_B


def _squared_offsets(radius: int) -> np.ndarray:
    offs = np.arange(-radius, radius + 1, dtype=float)
    return offs[:, None] ** 2 + offs[None, :] ** 2


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_gaussian3x3(sigma_c: float) -> Kernel3x3:
    """Normalized 3x3 Gaussian excitation kernel (weights sum to one)."""
    if not sigma_c > 0 or not np.isfinite(sigma_c):
        raise ParameterError(f"sigma_c must be positive and finite, got {sigma_c!r}")
    w = np.exp(-_squared_offsets(1) / (2.0 * sigma_c**2))
    w /= w.sum()
    return Kernel3x3(weights=_frozen(w), sigma_c=float(sigma_c))


def build_dog(sigma1: float, radius: int = 3) -> DogKernel:
    """Mexican-hat kernel ``A*G(sigma1) - B*G(3*sigma1)`` on a (2r+1)^2 support.

    The kernel is truncated at ``radius`` but not renormalized, so the
    center weight stays at ``A - B = 1``.
    """
    if not sigma1 > 0 or not np.isfinite(sigma1):
        raise ParameterError(f"sigma1 must be positive and finite, got {sigma1!r}")
    if int(radius) != radius or radius < 1:
        raise ParameterError(f"radius must be an integer >= 1, got {radius!r}")
    radius = int(radius)
    sigma2 = DOG_SIGMA_RATIO * sigma1
    d2 = _squared_offsets(radius)
    w = DOG_AMP_A * np.exp(-d2 / (2.0 * sigma1**2)) - DOG_AMP_B * np.exp(-d2 / (2.0 * sigma2**2))
    return DogKernel(weights=_frozen(w), radius=radius, sigma1=float(sigma1), sigma2=float(sigma2))


def vartheta(u):
    """Interaction gate ``2 / (1 + exp(-u)) - 1``, bounded in (-1, 1).

    Evaluated as ``tanh(u / 2)``, which is algebraically identical and does
    not overflow for large negative ``u``.
    """
    return np.tanh(np.multiply(u, 0.5))


def theta(u):
    """Activation ``tanh(u) * (e^2 + 1) / (e^2 - 1)``; ``theta(1) == 1``."""
    return np.tanh(u) / _TANH_ONE
